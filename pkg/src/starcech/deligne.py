"""Cech-Deligne complexes over star covers and gerbe cocycles.

The integer model of the degree-(n+2) Deligne complex has one Z-row (chain
degree n+2) and form rows Omega^0 ... Omega^k (chain degree n+1-j for form
degree j); for the flat variant the top row is restricted to patchwise
closed cochains.  The Cech direction runs over the simplices of the base
(ordered tuples), and the total complex carries the sign (-1)^i on
vertical maps in Cech column i -- the one global choice that reproduces
the cocycle equations

    0 = delta z
    0 = delta A_0 + (-1)^(n+2) iota z
    0 = delta A_(j+1) + (-1)^(n+1-j) d A_j        (j = 0 .. k-1)

on degree-zero elements.  The last family is enforced for every
consecutive pair: the tuple (z, A_0, ..., A_k) is kept consistent as a
whole.
"""

from dataclasses import dataclass
from fractions import Fraction

from .exactalg import q_kernel_basis, q_solve
from .homalg import (
    ChainMap,
    DoubleComplexZQ,
    MixedGroup,
    MixedMap,
    ZQComplex,
    homology_map,
)
from .site import SimplicialComplex, cohomology_generators

FR0 = Fraction(0)
FR1 = Fraction(1)


@dataclass(frozen=True)
class DelignePars:
    """Gerbe degree n >= 0 and connection level 0 <= k <= n + 1.

    The flat marker stands for 'k beyond n+1': the complex of n-gerbes with
    flat connection, whose top form row holds only closed cochains.
    """

    n: int
    k: int
    flat: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("gerbe degree must be >= 0")
        if not (0 <= self.k <= self.n + 1):
            raise ValueError("connection level must be between 0 and n + 1")
        if self.flat and self.k != self.n + 1:
            raise ValueError("the flat marker fixes k = n + 1")

    @staticmethod
    def full(n):
        return DelignePars(n, n + 1)

    @staticmethod
    def flat_pars(n):
        return DelignePars(n, n + 1, flat=True)

    def label(self):
        return f"(n={self.n}, {'flat' if self.flat else f'k={self.k}'})"


# ---------------------------------------------------------------------------
# the assembled model: rows, layouts, total complex


class DeligneModel:
    """All bookkeeping for one (base complex, parameters) pair."""

    def __init__(self, M: SimplicialComplex, pars: DelignePars):
        self.M = M
        self.pars = pars
        self.n, self.k = pars.n, pars.k
        self.top = self.n + 2
        # closed-row kernel bases per patch (flat variant only)
        self._closed_basis = {}
        if pars.flat:
            for d in range(M.dim + 1):
                for sigma in M.simplices_of_dim(d):
                    star = M.closed_star(sigma)
                    rows = star.coboundary_matrix(self.n + 1)
                    basis = q_kernel_basis(rows, star.n_cells(self.n + 1))
                    self._closed_basis[sigma] = basis
        self._complex = None
        self._labels = {}

    # -- row descriptions ---------------------------------------------------

    def row_degrees(self):
        rows = [("Z", self.top, None)]
        for j in range(self.k + 1):
            rows.append(("form", self.top - 1 - j, j))
        return rows

    def form_dim(self, sigma, j):
        if self.pars.flat and j == self.n + 1:
            return len(self._closed_basis[sigma])
        return self.M.closed_star(sigma).n_cells(j)

    def form_labels(self, col, j):
        key = (col, j)
        if key not in self._labels:
            out = []
            for sigma in self.M.simplices_of_dim(col):
                if self.pars.flat and j == self.n + 1:
                    out.extend((sigma, idx) for idx in range(len(self._closed_basis[sigma])))
                else:
                    star = self.M.closed_star(sigma)
                    out.extend((sigma, cell) for cell in star.cells_of_dim(j))
            self._labels[key] = out
        return self._labels[key]

    # -- assembling the double complex ---------------------------------------

    def double_complex(self):
        M = self.M
        rows = []
        horiz = {}
        vert = {}
        floor = -1
        # Z-row
        zdims = {}
        for i in range(min(M.dim, self.top - floor) + 1):
            zdims[i] = M.n_simplices(i)
        rows.append({"degree": self.top, "kind": "Z", "dims": zdims})
        from .site import coboundary_matrix

        for i in range(min(M.dim, self.top - floor)):
            horiz[(0, i)] = coboundary_matrix(M, i)
        # form rows
        for j in range(self.k + 1):
            degree = self.top - 1 - j
            idx = len(rows)
            dims = {}
            max_col = min(M.dim, degree - floor)
            for i in range(max_col + 1):
                dims[i] = sum(self.form_dim(s, j) for s in M.simplices_of_dim(i))
            rows.append({"degree": degree, "kind": "Q", "dims": dims})
            for i in range(max_col):
                horiz[(idx, i)] = self._form_delta(j, i)
            # vertical into this row (from the Z-row for j = 0, else d)
            if j == 0:
                for i in range(0, min(max(zdims, default=-1), max_col) + 1):
                    vert[(0, i)] = self._iota_block(i)
            else:
                prev_max = min(M.dim, (degree + 1) - floor)
                for i in range(0, min(prev_max, max_col) + 1):
                    vert[(idx - 1, i)] = self._d_block(j - 1, i)
        return DoubleComplexZQ(rows, horiz, vert)

    def _form_delta(self, j, i):
        """Cech differential block of the form-j row, column i -> i + 1."""
        M = self.M
        src = self.form_labels(i, j)
        dst = self.form_labels(i + 1, j)
        src_off = {}
        for pos, (sigma, cell) in enumerate(src):
            src_off[(sigma, cell)] = pos
        block = [[FR0] * len(src) for _ in dst]
        closed = self.pars.flat and j == self.n + 1
        if closed:
            # express restriction of source kernel bases in target bases
            dst_start = {}
            for pos, (rho, idx) in enumerate(dst):
                if rho not in dst_start:
                    dst_start[rho] = pos
            for rho in M.simplices_of_dim(i + 1):
                star_rho = self.M.closed_star(rho)
                basis_rho = self._closed_basis[rho]
                cells_rho = star_rho.cells_of_dim(self.n + 1)
                Bmat = [[basis_rho[b][r] for b in range(len(basis_rho))] for r in range(len(cells_rho))]
                for l in range(len(rho)):
                    sigma = rho[:l] + rho[l + 1 :]
                    star_sigma = self.M.closed_star(sigma)
                    basis_sigma = self._closed_basis[sigma]
                    cells_sigma = star_sigma.cells_of_dim(self.n + 1)
                    cell_pos = {c: r for r, c in enumerate(cells_sigma)}
                    sign = (-1) ** l
                    for b, vec in enumerate(basis_sigma):
                        restricted = [vec[cell_pos[c]] for c in cells_rho]
                        coeffs = q_solve(Bmat, restricted)
                        if coeffs is None:
                            raise AssertionError("restriction escapes the closed-cochain basis")
                        col = src_off[(sigma, b)]
                        for bb, cval in enumerate(coeffs):
                            if cval:
                                block[dst_start[rho] + bb][col] += sign * cval
        else:
            dst_pos = {}
            for pos, (rho, cell) in enumerate(dst):
                dst_pos[(rho, cell)] = pos
            for rho in M.simplices_of_dim(i + 1):
                star_rho = self.M.closed_star(rho)
                for l in range(len(rho)):
                    sigma = rho[:l] + rho[l + 1 :]
                    sign = (-1) ** l
                    for cell in star_rho.cells_of_dim(j):
                        block[dst_pos[(rho, cell)]][src_off[(sigma, cell)]] += sign
        return block

    def _iota_block(self, i):
        """Z -> Omega^0: the constant cochain on each patch."""
        M = self.M
        dst = self.form_labels(i, 0)
        n_src = M.n_simplices(i)
        pos = {s: c for c, s in enumerate(M.simplices_of_dim(i))}
        block = [[0] * n_src for _ in dst]
        for r, (sigma, _cell) in enumerate(dst):
            block[r][pos[sigma]] = 1
        return block

    def _d_block(self, j, i):
        """Vertical coboundary from form row j to form row j + 1, column i."""
        M = self.M
        src = self.form_labels(i, j)
        dst = self.form_labels(i, j + 1)
        block = [[FR0] * len(src) for _ in dst]
        closed_target = self.pars.flat and (j + 1) == self.n + 1
        src_start = {}
        for pos, (sigma, _c) in enumerate(src):
            src_start.setdefault(sigma, pos)
        dst_start = {}
        for pos, (sigma, _c) in enumerate(dst):
            dst_start.setdefault(sigma, pos)
        for sigma in M.simplices_of_dim(i):
            star = M.closed_star(sigma)
            d = star.coboundary_matrix(j)
            if closed_target:
                basis = self._closed_basis[sigma]
                cells = star.cells_of_dim(self.n + 1)
                Bmat = [[basis[b][r] for b in range(len(basis))] for r in range(len(cells))]
                for c in range(star.n_cells(j)):
                    colvec = [d[r][c] for r in range(len(cells))]
                    coeffs = q_solve(Bmat, colvec)
                    if coeffs is None:
                        raise AssertionError("coboundary image not closed")
                    for b, val in enumerate(coeffs):
                        if val:
                            block[dst_start[sigma] + b][src_start[sigma] + c] = Fraction(val)
            else:
                for r in range(star.n_cells(j + 1)):
                    for c in range(star.n_cells(j)):
                        if d[r][c]:
                            block[dst_start[sigma] + r][src_start[sigma] + c] = Fraction(d[r][c])
        return block

    def complex(self) -> ZQComplex:
        if self._complex is None:
            self._complex = self.double_complex().total_complex(floor=-1)
            self._complex.meta["model"] = self
        return self._complex

    # -- packing cocycle data into level vectors ------------------------------

    def level_blocks(self, t):
        layout = self.complex().meta["blocks"].get(t, {})
        return layout

    def pack(self, t, z_data, form_data):
        """Pack {sigma: int} plus per-form-degree {sigma: {cell: value}} data.

        For the flat variant, top-layer cochains are expressed in the
        closed-cochain basis of each patch (they must be closed).
        """
        X = self.complex()
        za, qa = X.level(t)
        vec = [0] * za + [FR0] * qa
        for (rdeg, col), (kind, off, size) in self.level_blocks(t).items():
            if kind == "Z":
                pos = {s: c for c, s in enumerate(self.M.simplices_of_dim(col))}
                for sigma, val in (z_data or {}).items():
                    if sigma in pos:
                        vec[off + pos[sigma]] = int(val)
            else:
                j = self.top - 1 - rdeg
                labels = self.form_labels(col, j)
                data = (form_data or {}).get(j, {})
                if self.pars.flat and j == self.n + 1:
                    coords = self._closed_coords(col, data)
                    for p, (sigma, idx) in enumerate(labels):
                        val = coords.get(sigma, {}).get(idx)
                        if val:
                            vec[za + off + p] = Fraction(val)
                else:
                    for p, (sigma, cell) in enumerate(labels):
                        val = data.get(sigma, {}).get(cell)
                        if val:
                            vec[za + off + p] = Fraction(val)
        return vec

    def _closed_coords(self, col, data):
        """Express per-patch closed cochains in the kernel bases."""
        out = {}
        for sigma, cochain in data.items():
            if not cochain:
                continue
            # coordinates may arrive already in basis form (integer keys)
            if all(isinstance(c, int) for c in cochain):
                out[sigma] = dict(cochain)
                continue
            star = self.M.closed_star(sigma)
            cells = star.cells_of_dim(self.n + 1)
            basis = self._closed_basis[sigma]
            Bmat = [[basis[b][r] for b in range(len(basis))] for r in range(len(cells))]
            target = [Fraction(cochain.get(c, 0)) for c in cells]
            coeffs = q_solve(Bmat, target)
            if coeffs is None:
                raise ValueError(f"top-layer cochain on {sigma} is not closed")
            out[sigma] = {i: v for i, v in enumerate(coeffs) if v}
        return out

    def unpack(self, t, vec):
        X = self.complex()
        za, _ = X.level(t)
        z_data = {}
        form_data = {}
        for (rdeg, col), (kind, off, size) in self.level_blocks(t).items():
            if kind == "Z":
                simps = self.M.simplices_of_dim(col)
                for c, sigma in enumerate(simps):
                    if vec[off + c]:
                        z_data[sigma] = int(vec[off + c])
            else:
                j = self.top - 1 - rdeg
                labels = self.form_labels(col, j)
                bucket = form_data.setdefault(j, {})
                for p, (sigma, cell) in enumerate(labels):
                    v = vec[za + off + p]
                    if v:
                        bucket.setdefault(sigma, {})[cell] = Fraction(v)
        return z_data, form_data


_MODEL_ATTR = "_deligne_models"


def deligne_model(M: SimplicialComplex, pars: DelignePars) -> DeligneModel:
    cache = getattr(M, _MODEL_ATTR, None)
    if cache is None:
        cache = {}
        setattr(M, _MODEL_ATTR, cache)
    if pars not in cache:
        cache[pars] = DeligneModel(M, pars)
    return cache[pars]


def build_deligne_complex(M: SimplicialComplex, pars: DelignePars) -> ZQComplex:
    """The truncated total Cech-Deligne complex (levels >= -1 retained)."""
    return deligne_model(M, pars).complex()


def gerbe_pi(M: SimplicialComplex, pars: DelignePars, i: int) -> MixedGroup:
    """pi_i of the Kan complex of n-gerbes with k-connection: H_i of the total."""
    if i < 0:
        return MixedGroup()
    X = build_deligne_complex(M, pars)
    if i > X.hi:
        return MixedGroup()
    return X.homology(i)


# ---------------------------------------------------------------------------
# cocycles


class DeligneCocycle:
    """Transition data (z, A_0, ..., A_k) of an n-gerbe with k-connection.

    z assigns integers to (n+2)-simplices; A_j assigns to each
    (n+1-j)-simplex sigma a rational j-cochain on St(sigma), stored as
    {cell: Fraction} with zeros omitted.
    """

    def __init__(self, M: SimplicialComplex, pars: DelignePars, z=None, A=None):
        self.M = M
        self.pars = pars
        self.z = {}
        for sigma, val in (z or {}).items():
            sigma = tuple(sorted(sigma))
            if len(sigma) != pars.n + 3 or not M.contains(sigma):
                raise ValueError(f"z is indexed by (n+2)-simplices; got {sigma}")
            if val:
                self.z[sigma] = int(val)
        self.A = []
        A = A or [{} for _ in range(pars.k + 1)]
        if len(A) != pars.k + 1:
            raise ValueError(f"expected {pars.k + 1} form layers A_0..A_{pars.k}")
        for j, layer in enumerate(A):
            clean = {}
            for sigma, cochain in layer.items():
                sigma = tuple(sorted(sigma))
                if len(sigma) != pars.n + 2 - j or not M.contains(sigma):
                    raise ValueError(f"A_{j} is indexed by ({pars.n + 1 - j})-simplices; got {sigma}")
                star = M.closed_star(sigma)
                vals = {}
                for cell, v in cochain.items():
                    cell = tuple(sorted(cell))
                    if not star.contains(cell) or len(cell) != j + 1:
                        raise ValueError(f"A_{j}[{sigma}] has a cell {cell} outside the patch")
                    v = Fraction(v)
                    if v:
                        vals[cell] = v
                if vals:
                    clean[sigma] = vals
            self.A.append(clean)

    def a_value(self, j, sigma, cell):
        return self.A[j].get(tuple(sorted(sigma)), {}).get(tuple(sorted(cell)), FR0)

    def copy(self):
        return DeligneCocycle(
            self.M,
            self.pars,
            z=dict(self.z),
            A=[{s: dict(c) for s, c in layer.items()} for layer in self.A],
        )

    def add(self, other):
        if other.M is not self.M or other.pars != self.pars:
            raise ValueError("cocycle mismatch")
        z = dict(self.z)
        for s, v in other.z.items():
            z[s] = z.get(s, 0) + v
        A = []
        for j in range(self.pars.k + 1):
            layer = {s: dict(c) for s, c in self.A[j].items()}
            for s, c in other.A[j].items():
                dst = layer.setdefault(s, {})
                for cell, v in c.items():
                    dst[cell] = dst.get(cell, FR0) + v
            A.append(layer)
        return DeligneCocycle(self.M, self.pars, z=z, A=A)

    def scale(self, c):
        return DeligneCocycle(
            self.M,
            self.pars,
            z={s: c * v for s, v in self.z.items()},
            A=[{s: {cell: c * v for cell, v in coch.items()} for s, coch in layer.items()} for layer in self.A],
        )

    def neg(self):
        return self.scale(-1)

    def __eq__(self, other):
        return (
            isinstance(other, DeligneCocycle)
            and self.M is other.M
            and self.pars == other.pars
            and self.z == other.z
            and all(a == b for a, b in zip(self.A, other.A))
        )

    def is_zero(self):
        return not self.z and all(not layer for layer in self.A)

    def to_vector(self):
        model = deligne_model(self.M, self.pars)
        return model.pack(0, self.z, {j: self.A[j] for j in range(self.pars.k + 1)})

    @staticmethod
    def from_vector(M, pars, vec):
        model = deligne_model(M, pars)
        z, forms = model.unpack(0, vec)
        if pars.flat:
            forms = _expand_closed_layer(model, forms)
        return DeligneCocycle(M, pars, z=z, A=[forms.get(j, {}) for j in range(pars.k + 1)])

    # -- JSON ---------------------------------------------------------------

    def to_json(self):
        import json

        def key(sigma):
            return ",".join(str(self.M.vertices[i]) for i in sigma)

        return json.dumps(
            {
                "n": self.pars.n,
                "k": self.pars.k,
                "flat": self.pars.flat,
                "z": {key(s): v for s, v in self.z.items()},
                "A": [
                    {key(s): {key(c): str(v) for c, v in coch.items()} for s, coch in layer.items()}
                    for layer in self.A
                ],
            }
        )

    @staticmethod
    def from_json(M: SimplicialComplex, text):
        import json

        data = json.loads(text)
        pars = DelignePars(data["n"], data["k"], data.get("flat", False))
        lookup = {str(v): i for i, v in enumerate(M.vertices)}

        def unkey(s):
            return tuple(sorted(lookup[p] for p in s.split(",")))

        z = {unkey(s): int(v) for s, v in data.get("z", {}).items()}
        A = [
            {unkey(s): {unkey(c): Fraction(v) for c, v in coch.items()} for s, coch in layer.items()}
            for layer in data.get("A", [])
        ]
        return DeligneCocycle(M, pars, z=z, A=A)


def _expand_closed_layer(model, forms):
    """Convert closed-row basis coordinates back to honest cochains."""
    j = model.n + 1
    if j not in forms:
        return forms
    out = dict(forms)
    expanded = {}
    for sigma, coeffs in forms[j].items():
        star = model.M.closed_star(sigma)
        cells = star.cells_of_dim(j)
        acc = {}
        for idx, val in coeffs.items():
            basis_vec = model._closed_basis[sigma][idx if isinstance(idx, int) else idx[0]]
            for r, cell in enumerate(cells):
                if basis_vec[r]:
                    acc[cell] = acc.get(cell, FR0) + val * basis_vec[r]
        expanded[sigma] = {c: v for c, v in acc.items() if v}
    out[j] = expanded
    return out


def zero_cocycle(M, pars):
    return DeligneCocycle(M, pars)


# ---------------------------------------------------------------------------
# validation: the cocycle equations, checked tuple by tuple


def validate_cocycle(X: DeligneCocycle):
    """Check every Cech-Deligne equation exactly; failures name the tuple."""
    M, pars = X.M, X.pars
    n, k = pars.n, pars.k
    failures = []
    # delta z = 0 on (n+3)-simplices
    for rho in M.simplices_of_dim(n + 3):
        total = 0
        for l in range(len(rho)):
            total += (-1) ** l * X.z.get(rho[:l] + rho[l + 1 :], 0)
        if total:
            failures.append(("delta z", rho, total))
    # delta A_0 + (-1)^(n+2) iota z = 0 on the patch of each (n+2)-simplex
    sign0 = (-1) ** (n + 2)
    for rho in M.simplices_of_dim(n + 2):
        star = M.closed_star(rho)
        zval = X.z.get(rho, 0)
        for cell in star.cells_of_dim(0):
            total = sign0 * zval
            for l in range(len(rho)):
                total += (-1) ** l * X.a_value(0, rho[:l] + rho[l + 1 :], cell)
            if total:
                failures.append(("delta A_0 + iota z", rho, cell, total))
    # delta A_(j+1) + (-1)^(n+1-j) d A_j = 0 for all consecutive pairs
    for j in range(0, k):
        sign = (-1) ** (n + 1 - j)
        for rho in M.simplices_of_dim(n + 1 - j):
            star = M.closed_star(rho)
            for cell in star.cells_of_dim(j + 1):
                total = FR0
                for l in range(len(rho)):
                    total += (-1) ** l * X.a_value(j + 1, rho[:l] + rho[l + 1 :], cell)
                dval = FR0
                for i in range(len(cell)):
                    dval += (-1) ** i * X.a_value(j, rho, cell[:i] + cell[i + 1 :])
                total += sign * dval
                if total:
                    failures.append((f"delta A_{j + 1} + d A_{j}", rho, cell, total))
    if pars.flat:
        for rho in M.simplices_of_dim(0):
            star = M.closed_star(rho)
            for cell in star.cells_of_dim(n + 2):
                dval = FR0
                for i in range(len(cell)):
                    dval += (-1) ** i * X.a_value(n + 1, rho, cell[:i] + cell[i + 1 :])
                if dval:
                    failures.append(("d A_top (flatness)", rho, cell, dval))
    return {"ok": not failures, "failures": failures}


# ---------------------------------------------------------------------------
# building cocycles from integer classes (the acyclicity zig-zag, forwards)


def cocycle_from_class(M: SimplicialComplex, pars: DelignePars, c) -> DeligneCocycle:
    """A valid cocycle whose z-data is the given closed integer cocycle.

    c maps (n+2)-simplices to integers (missing = 0) and must be
    simplicially closed.  Each A_j is found by solving the patchwise
    linear systems of the Cech-exact form rows, one decomposition
    component at a time: the component of a p-simplex tau is a cochain on
    St(tau), where the Cech differential is the simplicial coboundary.
    """
    n, k = pars.n, pars.k
    z = {}
    for sigma, val in (c or {}).items():
        sigma = tuple(sorted(sigma))
        if len(sigma) != n + 3 or not M.contains(sigma):
            raise ValueError(f"class data must live on (n+2)-simplices; got {sigma}")
        if val:
            z[sigma] = int(val)
    # closedness of c
    for rho in M.simplices_of_dim(n + 3):
        total = sum((-1) ** l * z.get(rho[:l] + rho[l + 1 :], 0) for l in range(len(rho)))
        if total:
            raise ValueError(f"class data is not closed at {rho}")

    A = []
    prev = None  # A_(j-1)
    for j in range(k + 1):
        cech_deg = n + 2 - j  # Cech degree of the equation solved for A_j
        rhs_tau = {}
        if j == 0:
            sign = -((-1) ** (n + 2))
            for rho, zval in z.items():
                if not zval:
                    continue
                star = M.closed_star(rho)
                for cell in star.cells_of_dim(0):
                    rhs_tau.setdefault(cell, {})[rho] = Fraction(sign * zval)
        else:
            sign = -((-1) ** (n + 1 - (j - 1)))
            for sigma, cochain in prev.items():
                star = M.closed_star(sigma)
                dmat_cells = star.cells_of_dim(j)
                for cell in dmat_cells:
                    dval = FR0
                    for i in range(len(cell)):
                        dval += (-1) ** i * cochain.get(cell[:i] + cell[i + 1 :], FR0)
                    if dval:
                        rhs_tau.setdefault(cell, {})[sigma] = sign * dval
        layer = {}
        for tau, rhs in rhs_tau.items():
            star_tau = M.closed_star(tau)
            cells = star_tau.cells_of_dim(cech_deg)
            below = star_tau.cells_of_dim(cech_deg - 1)
            dmat = star_tau.coboundary_matrix(cech_deg - 1)
            b = [rhs.get(cellc, FR0) for cellc in cells]
            sol = q_solve(dmat, b)
            if sol is None:
                raise ValueError(f"patch system unsolvable at component {tau} (degree {j})")
            for pos, sigma in enumerate(below):
                if sol[pos]:
                    layer.setdefault(sigma, {})[tau] = sol[pos]
        A.append(layer)
        prev = layer
    X = DeligneCocycle(M, pars if not pars.flat else DelignePars.full(n), z=z, A=A)
    if pars.flat:
        X = flatten_extension(X)
    rep = validate_cocycle(X)
    if not rep["ok"]:
        raise AssertionError(f"internal: constructed cocycle invalid: {rep['failures'][:3]}")
    return X


def flatten_extension(X: DeligneCocycle) -> DeligneCocycle:
    """Adjust the top layer of a full-connection cocycle to be patchwise closed.

    Solvable exactly when the curvature class vanishes rationally; raises
    otherwise.  The correction is a global (n+1)-cochain eta with
    d eta = -H, subtracted from every patch.
    """
    n = X.pars.n
    H = curvature(X)
    top_cells = X.M.simplices_of_dim(n + 2)
    dmat = _global_coboundary(X.M, n + 1)
    b = [-H.value(c) for c in top_cells]
    eta = q_solve(dmat, b)
    if eta is None:
        raise ValueError("no flat extension: curvature class is rationally nontrivial")
    below = X.M.simplices_of_dim(n + 1)
    A = [dict(layer) for layer in X.A]
    top = {}
    for sigma in X.M.simplices_of_dim(0):
        star = X.M.closed_star(sigma)
        vals = {}
        for cell in star.cells_of_dim(n + 1):
            v = X.a_value(n + 1, sigma, cell) + eta[below.index(cell)]
            if v:
                vals[cell] = v
        if vals:
            top[sigma] = vals
    A[n + 1] = top
    Y = DeligneCocycle(X.M, DelignePars.flat_pars(n), z=dict(X.z), A=A)
    rep = validate_cocycle(Y)
    if not rep["ok"]:
        raise AssertionError(f"internal: flattened cocycle invalid: {rep['failures'][:3]}")
    return Y


def _global_coboundary(M, p):
    from .site import coboundary_matrix

    return [[Fraction(x) for x in row] for row in coboundary_matrix(M, p)]


# ---------------------------------------------------------------------------
# projections p^k_l


def projection_p(X: DeligneCocycle, l: int) -> DeligneCocycle:
    """Forget A_(l+1) .. A_k; the result is valid at parameters (n, l)."""
    if l > X.pars.k:
        raise ValueError(f"cannot project up: l={l} exceeds k={X.pars.k}")
    pars = DelignePars(X.pars.n, l)
    return DeligneCocycle(X.M, pars, z=dict(X.z), A=[dict(X.A[j]) for j in range(l + 1)])


def projection_chain_map(M, pars_k: DelignePars, pars_l: DelignePars) -> ChainMap:
    """The chain map Deligne(n,k) -> Deligne(n,l) forgetting the extra rows."""
    if pars_k.n != pars_l.n or pars_l.k > pars_k.k or pars_l.flat:
        raise ValueError("projection needs l <= k over the same n")
    A = build_deligne_complex(M, pars_k)
    C = build_deligne_complex(M, pars_l)
    model_a = deligne_model(M, pars_k)
    model_c = deligne_model(M, pars_l)
    maps = {}
    for t in range(min(A.lo, C.lo), max(A.hi, C.hi) + 1):
        src = A.level(t)
        dst = C.level(t)
        zz = [[0] * src[0] for _ in range(dst[0])]
        qz = [[FR0] * src[0] for _ in range(dst[1])]
        qq = [[FR0] * src[1] for _ in range(dst[1])]
        blocks_a = model_a.level_blocks(t)
        blocks_c = model_c.level_blocks(t)
        for key, (kind_c, off_c, size_c) in blocks_c.items():
            if key not in blocks_a:
                continue
            kind_a, off_a, size_a = blocks_a[key]
            if size_a != size_c or kind_a != kind_c:
                raise AssertionError("projection blocks misaligned")
            for p in range(size_c):
                if kind_c == "Z":
                    zz[off_c + p][off_a + p] = 1
                else:
                    qq[off_c + p][off_a + p] = FR1
        maps[t] = MixedMap(src, dst, zz=zz, qz=qz, qq=qq)
    return ChainMap(A, C, maps)


def pi0_projection_check(M, n, k, l, flat=False):
    """Classify the map pi_0 Grb(n,k) -> pi_0 Grb(n,l) induced by p^k_l."""
    if not (0 <= l <= k <= n + 1):
        raise ValueError("need 0 <= l <= k <= n+1")
    pars_k = DelignePars(n, k, flat)
    pars_l = DelignePars(n, l)
    f = projection_chain_map(M, pars_k, pars_l)
    rep = homology_map(f, 0)
    return {
        "iso": rep.isomorphism,
        "surjective": rep.surjective,
        "injective": rep.injective,
        "kernel": rep.kernel,
        "cokernel": rep.cokernel,
        "source": rep.source,
        "target": rep.target,
    }


# ---------------------------------------------------------------------------
# curvature


class CurvatureForm:
    """A closed global (n+2)-cochain with rational values."""

    def __init__(self, M, degree, values):
        self.M = M
        self.degree = degree
        self.values = {tuple(sorted(c)): Fraction(v) for c, v in values.items() if Fraction(v)}
        for rho in M.simplices_of_dim(degree + 1):
            total = FR0
            for i in range(len(rho)):
                total += (-1) ** i * self.values.get(rho[:i] + rho[i + 1 :], FR0)
            if total:
                raise ValueError(f"curvature is not closed at {rho}")

    def value(self, cell):
        return self.values.get(tuple(sorted(cell)), FR0)

    def is_zero(self):
        return not self.values

    def add(self, other):
        vals = dict(self.values)
        for c, v in other.values.items():
            vals[c] = vals.get(c, FR0) + v
        return CurvatureForm(self.M, self.degree, vals)


def curvature(X: DeligneCocycle) -> CurvatureForm:
    """The unique global H with delta H = d A_(n+1); requires k = n + 1.

    Existence and uniqueness come from the Cech exactness of the top form
    row: d A_(n+1) is constant across the vertex patches containing each
    top cell, and that constant is H.
    """
    n = X.pars.n
    if X.pars.k != n + 1:
        raise ValueError("curvature needs a full connection (k = n + 1)")
    M = X.M
    values = {}
    for tau in M.simplices_of_dim(n + 2):
        vals = []
        for a in tau:
            star = M.closed_star((a,))
            if not star.contains(tau):
                continue
            dval = FR0
            for i in range(len(tau)):
                dval += (-1) ** i * X.a_value(n + 1, (a,), tau[:i] + tau[i + 1 :])
            vals.append(dval)
        if not vals:
            continue
        if any(v != vals[0] for v in vals):
            raise AssertionError(f"d A_top is not constant over the patches of {tau}")
        if vals[0]:
            values[tau] = vals[0]
    return CurvatureForm(M, n + 2, values)


def curvature_integrality_check(X: DeligneCocycle) -> bool:
    """The de Rham class of the curvature equals the rational image of [z]."""
    H = curvature(X)
    n = X.pars.n
    M = X.M
    if n + 2 > M.dim:
        return H.is_zero() or _is_exact(M, H)
    hq = cohomology_generators(M, "Q", n + 2)
    cells = M.simplices_of_dim(n + 2)
    hvec = [H.value(c) for c in cells]
    zvec = [Fraction(X.z.get(c, 0)) for c in cells]
    diff = [a - b for a, b in zip(hvec, zvec)]
    return hq.is_zero_class(diff)


def _is_exact(M, H):
    cells = M.simplices_of_dim(H.degree)
    if not cells:
        return H.is_zero()
    dmat = _global_coboundary(M, H.degree - 1)
    return q_solve(dmat, [H.value(c) for c in cells]) is not None


# ---------------------------------------------------------------------------
# the U(1) = Q/Z import path


def u1_to_z_model(M, n, k, g, A_forms) -> DeligneCocycle:
    """Convert U(1)-model data (g, A_1..A_k) to the integer model.

    g assigns to each (n+1)-simplex patch a Q/Z-valued 0-cochain (values
    are Fractions taken mod 1).  The conversion lifts g patchwise to A_0,
    corrects the lift by an integer 0-cochain so the lifted transition
    equation holds exactly, and reads z off as the (necessarily constant)
    integer delta A_0 on each (n+2)-patch.
    """
    pars = DelignePars(n, k)
    sign1 = (-1) ** (n + 1)
    lifts = {}
    for sigma_raw, cochain in (g or {}).items():
        sigma = tuple(sorted(sigma_raw))
        if len(sigma) != n + 2 or not M.contains(sigma):
            raise ValueError(f"g is indexed by (n+1)-simplices; got {sigma}")
        star = M.closed_star(sigma)
        vals = {}
        for cell, v in cochain.items():
            cell = tuple(sorted(cell))
            if not star.contains(cell) or len(cell) != 1:
                raise ValueError(f"g[{sigma}] must be a 0-cochain on the patch")
            vals[cell] = Fraction(v) % 1
        lifts[sigma] = vals
    A_forms = [dict(layer) for layer in (A_forms or [])]
    if len(A_forms) != k:
        raise ValueError(f"expected form layers A_1..A_{k}")

    # correct each lift by an integer 0-cochain m so that
    # (-1)^(n+1) d (lift + m) + delta A_1 = 0 holds exactly (k >= 1);
    # for k = 0 the raw lift is used as A_0 directly.
    A0 = {}
    for sigma, vals in lifts.items():
        star = M.closed_star(sigma)
        if k >= 1:
            want = {}
            for cell in star.cells_of_dim(1):
                delta_a1 = FR0
                for l in range(len(sigma)):
                    face = sigma[:l] + sigma[l + 1 :]
                    delta_a1 += (-1) ** l * Fraction(
                        A_forms[0].get(face, {}).get(cell, 0)
                    )
                # wanted: d A_0 = -(-1)^(n+1) * delta A_1... on this patch
                want[cell] = -delta_a1 / sign1
            # m integer 0-cochain with d(lift + m) = want
            cells1 = star.cells_of_dim(1)
            verts = star.cells_of_dim(0)
            d = star.coboundary_matrix(0)
            liftvec = [vals.get(v0, FR0) for v0 in verts]
            dl = [sum(Fraction(d[r][c]) * liftvec[c] for c in range(len(verts))) for r in range(len(cells1))]
            b = [want[cells1[r]] - dl[r] for r in range(len(cells1))]
            if any(x.denominator != 1 for x in b):
                raise ValueError(f"U(1) data violates the A_1 transition equation on {sigma}")
            from .exactalg import solve_integer

            m = solve_integer([[d[r][c] for c in range(len(verts))] for r in range(len(cells1))], [int(x) for x in b])
            if m is None:
                raise ValueError(f"U(1) data admits no integral correction on {sigma}")
            corrected = {v0: liftvec[i] + m[i] for i, v0 in enumerate(verts)}
        else:
            corrected = {v0: vals.get(v0, FR0) for v0 in star.cells_of_dim(0)}
        A0[sigma] = {c: v for c, v in corrected.items() if v}

    # z = (-1)^(n+3) * delta A_0 per (n+2)-simplex (constant integer there)
    z = {}
    sign0 = (-1) ** (n + 2)
    for rho in M.simplices_of_dim(n + 2):
        star = M.closed_star(rho)
        vals = set()
        for cell in star.cells_of_dim(0):
            total = FR0
            for l in range(len(rho)):
                total += (-1) ** l * Fraction(A0.get(rho[:l] + rho[l + 1 :], {}).get(cell, 0))
            vals.add(total)
        if len(vals) > 1:
            raise ValueError(f"delta of the lift is not constant on {rho}: U(1) data invalid")
        val = vals.pop() if vals else FR0
        if val.denominator != 1:
            raise ValueError(f"delta of the lift is not integral on {rho}: delta g != 0")
        if val:
            z[rho] = -sign0 * int(val)
    layers = [A0] + [
        {tuple(sorted(s)): {tuple(sorted(c)): Fraction(v) for c, v in coch.items()} for s, coch in A_forms[j].items()}
        for j in range(k)
    ]
    X = DeligneCocycle(M, pars, z=z, A=layers)
    rep = validate_cocycle(X)
    if not rep["ok"]:
        raise ValueError(f"U(1) data violates the model equations: {rep['failures'][:3]}")
    return X


# ---------------------------------------------------------------------------
# comparison with integer cohomology and randomised cocycles


def class_of_cocycle(X: DeligneCocycle):
    """Coordinates of [z] in the integer cohomology oracle's basis.

    None when the degree exceeds the dimension (the class group is 0).
    """
    M = X.M
    j = X.pars.n + 2
    if j > M.dim:
        return None
    h = cohomology_generators(M, "Z", j)
    cells = M.simplices_of_dim(j)
    return h.class_coords([X.z.get(c, 0) for c in cells])


def random_cocycle(M, pars: DelignePars, rng, bound=2) -> DeligneCocycle:
    """A seeded random valid cocycle: a class representative plus a boundary."""
    n = pars.n
    model = deligne_model(M, pars)
    X = model.complex()
    # random integer class: a random closed (n+2)-cochain
    cells = M.simplices_of_dim(n + 2)
    base = zero_cocycle(M, pars)
    if cells:
        from .exactalg import integral_kernel

        rowsmat = _global_coboundary(M, n + 2)
        closed = integral_kernel(rowsmat) if rowsmat else []
        if not rowsmat:
            closed = [[1 if i == j else 0 for i in range(len(cells))] for j in range(len(cells))]
        if closed:
            coeffs = [rng.randint(-bound, bound) for _ in closed]
            cvec = [sum(c * row[i] for c, row in zip(coeffs, closed)) for i in range(len(cells))]
            cdict = {cells[i]: cvec[i] for i in range(len(cells)) if cvec[i]}
            base = cocycle_from_class(M, pars, cdict)
    # plus the boundary of a random 1-chain
    za, qa = X.level(1)
    wvec = [rng.randint(-bound, bound) for _ in range(za)] + [
        Fraction(rng.randint(-bound, bound), rng.randint(1, 2)) for _ in range(qa)
    ]
    bvec = X.differential(1).apply(wvec)
    pert = DeligneCocycle.from_vector(M, pars, bvec)
    return base.add(pert)
