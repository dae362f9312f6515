"""Chain complexes over mixed Z/Q coefficient towers and their homology.

A level of a mixed complex is Z^a + Q^b; the differential is block lower
triangular (no map from the Q-part back to the Z-part), so the Q-part is a
subcomplex and the Z-part a quotient complex.  All homology computations
happen inside the ambient Q-vector space of a level, through two exact
primitives:

  * mixed kernels  -- solutions of a rational linear system with some
    coordinates constrained to be integers; the result is always of the
    shape "finitely generated lattice + Q-subspace";
  * mixed quotients -- (L1 + W1)/(L2 + W2) of such subgroups, classified as
    Z^r + torsion + Q^s + (Q/Z)^t.  Divisible groups are injective
    Z-modules, so this splitting is a theorem, not a choice.

Every homology group keeps its generators and can express the class of an
arbitrary cycle in coordinates, which is what makes induced maps and
connecting homomorphisms computable downstream.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import (
    hermite_row_basis,
    integral_kernel,
    lattice_coords,
    q_kernel_basis,
    q_solve,
    saturate_lattice,
    transpose,
)

FR0 = Fraction(0)
FR1 = Fraction(1)


# ---------------------------------------------------------------------------
# MixedGroup: the universal answer type


@dataclass(frozen=True)
class MixedGroup:
    """An abelian group Z^free_rank + (+)Z/m_i + Q^q_dim + (Q/Z)^torus_rank.

    torsion holds the invariant factors, each >= 2, sorted by divisibility.
    Equality is componentwise and is the notion of isomorphism used
    throughout the package.
    """

    free_rank: int = 0
    torsion: tuple = ()
    q_dim: int = 0
    torus_rank: int = 0

    def __post_init__(self):
        if self.free_rank < 0 or self.q_dim < 0 or self.torus_rank < 0:
            raise ValueError("negative rank in MixedGroup")
        for m in self.torsion:
            if m < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion list not sorted by divisibility")

    @property
    def is_trivial(self):
        return (self.free_rank, self.torsion, self.q_dim, self.torus_rank) == (0, (), 0, 0)

    def direct_sum(self, other):
        from math import gcd

        # merge invariant factors so the divisibility chain is restored
        factors = list(self.torsion) + list(other.torsion)
        merged = []
        for m in factors:
            for i in range(len(merged)):
                g = gcd(merged[i], m)
                if merged[i] % m and m % merged[i] and g > 1:
                    merged[i], m = g, merged[i] * m // g
            if m > 1:
                merged.append(m)
        changed = True
        while changed:
            changed = False
            merged.sort()
            for i in range(len(merged) - 1):
                a, b = merged[i], merged[i + 1]
                if b % a:
                    g = gcd(a, b)
                    merged[i], merged[i + 1] = g, a * b // g
                    changed = True
        merged = [m for m in merged if m > 1]
        return MixedGroup(
            self.free_rank + other.free_rank,
            tuple(sorted(merged)),
            self.q_dim + other.q_dim,
            self.torus_rank + other.torus_rank,
        )

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{m}" for m in self.torsion)
        if self.q_dim == 1:
            parts.append("Q")
        elif self.q_dim:
            parts.append(f"Q^{self.q_dim}")
        if self.torus_rank == 1:
            parts.append("(Q/Z)")
        elif self.torus_rank:
            parts.append(f"(Q/Z)^{self.torus_rank}")
        return " ⊕ ".join(parts) if parts else "0"


ZERO_GROUP = MixedGroup()


# ---------------------------------------------------------------------------
# small dense rational helpers (row spaces, RREF)


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot_cols), zero rows dropped."""
    rows = [[Fraction(x) for x in r] for r in rows]
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        if p != 1:
            rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                c = rows[i][col]
                rows[i] = [a - c * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def reduce_by_rref(rows, pivots, v):
    """v minus its projection onto the row space: kills the pivot coords."""
    v = [Fraction(x) for x in v]
    for row, p in zip(rows, pivots):
        c = v[p]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return v


def express_in_rref(rows, pivots, v):
    """Coefficients of v in an RREF basis, or None if v is outside the span."""
    v = [Fraction(x) for x in v]
    coeffs = [v[p] for p in pivots]
    for c, row in zip(coeffs, rows):
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    if any(v):
        return None
    return coeffs


class RatLattice:
    """A finitely generated subgroup of Q^n (a lattice, possibly of rank 0).

    Canonical echelon basis via an integer Hermite form after clearing
    denominators; coords() recognises membership and returns exact integer
    coordinates.  basis_exprs expresses each basis vector as an integer
    combination of the original generators.
    """

    def __init__(self, gens, n):
        self.n = n
        gens = [[Fraction(x) for x in g] for g in gens]
        gens = [g for g in gens if any(g)]
        self.gens = gens
        denom = 1
        for g in gens:
            for x in g:
                denom = denom * x.denominator // _gcd(denom, x.denominator)
        self.denom = denom
        int_rows = [[int(x * denom) for x in g] for g in gens]
        basis, expr = hermite_row_basis(int_rows)
        self.int_basis = basis
        self.basis_exprs = expr
        self.basis = [[Fraction(x, denom) for x in row] for row in basis]

    @property
    def rank(self):
        return len(self.basis)

    def coords(self, v):
        v = [Fraction(x) * self.denom for x in v]
        return lattice_coords(self.int_basis, v)

    def from_coords(self, coords):
        out = [FR0] * self.n
        for c, row in zip(coords, self.basis):
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return out


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


# ---------------------------------------------------------------------------
# mixed subgroups of Q^n: lattice + subspace


class MixedSubgroup:
    """Subgroup of Q^n of the form (Z-span of lattice) + (Q-span of subspace)."""

    def __init__(self, n, lattice=(), subspace=()):
        self.n = n
        w_rows, w_piv = rref(list(subspace))
        self.w_rows = w_rows
        self.w_pivots = w_piv
        reduced = [reduce_by_rref(w_rows, w_piv, g) for g in lattice]
        self.lat = RatLattice(reduced, n)

    @property
    def subspace_dim(self):
        return len(self.w_rows)

    @property
    def lattice_rank(self):
        return self.lat.rank

    def lattice_basis(self):
        return self.lat.basis

    def member(self, v):
        """Decompose v as lattice + subspace part; None if v not in the group."""
        bar = reduce_by_rref(self.w_rows, self.w_pivots, v)
        coords = self.lat.coords(bar)
        if coords is None:
            return None
        w = [Fraction(a) - b for a, b in zip(v, self.lat.from_coords(coords))]
        wc = express_in_rref(self.w_rows, self.w_pivots, w)
        if wc is None:
            return None
        return coords, wc

    def contains(self, v):
        return self.member(v) is not None

    def sum(self, other):
        if self.n != other.n:
            raise ValueError("ambient dimension mismatch")
        return MixedSubgroup(
            self.n,
            lattice=self.lat.basis + other.lat.basis,
            subspace=self.w_rows + other.w_rows,
        )

    @staticmethod
    def full(n, int_prefix):
        """All of Z^int_prefix + Q^(n - int_prefix) in standard coordinates."""
        lattice = []
        subspace = []
        for i in range(n):
            e = [FR0] * n
            e[i] = FR1
            (lattice if i < int_prefix else subspace).append(e)
        return MixedSubgroup(n, lattice, subspace)


def mixed_kernel(rows, ncols, int_mask):
    """Solutions x of (rows) x = 0 with x_j integral for masked j.

    rows is a rational matrix given as dense row lists (may be empty).
    Returns a MixedSubgroup of Q^ncols.  The solution set always has the
    lattice + subspace shape: the rational kernel K is intersected with the
    integrality constraints by saturating the projection of K onto the
    masked coordinates.
    """
    K = q_kernel_basis(rows, ncols)
    if not K:
        return MixedSubgroup(ncols)
    masked = [j for j in range(ncols) if int_mask[j]]
    if not masked:
        return MixedSubgroup(ncols, subspace=K)
    # PK: masked coords of each kernel basis vector, as columns
    PK = [[K[t][j] for t in range(len(K))] for j in masked]
    sub_coords = q_kernel_basis(PK, len(K))
    proj_cols = [[PK[r][t] for r in range(len(masked))] for t in range(len(K))]
    sat = saturate_lattice(proj_cols, len(masked))
    lattice = []
    for u in sat:
        c = q_solve(PK, u)
        if c is None:
            raise AssertionError("saturation produced a vector outside the span")
        lattice.append(_combine(K, c, ncols))
    subspace = [_combine(K, c, ncols) for c in sub_coords]
    return MixedSubgroup(ncols, lattice, subspace)


def _combine(vectors, coeffs, n):
    out = [FR0] * n
    for c, vec in zip(coeffs, vectors):
        if c:
            out = [a + c * b for a, b in zip(out, vec)]
    return out


# ---------------------------------------------------------------------------
# mixed quotients with generators and coordinates


@dataclass
class ClassCoords:
    free: tuple
    torsion: tuple
    q: tuple
    torus: tuple

    @property
    def is_zero(self):
        return (
            all(x == 0 for x in self.free)
            and all(x == 0 for x in self.torsion)
            and all(x == 0 for x in self.q)
            and all(x == 0 for x in self.torus)
        )


class MixedQuotient:
    """(L1 + W1) / (L2 + W2) with explicit generators and coordinates.

    The finitely generated part is read off from a Smith form of the
    relation matrix of big.lattice modulo (small.lattice + W1); the
    divisible part is W1/(W1 cap small), a Q-vector space modulo a full
    lattice in a subspace, i.e. Q^(s-d) + (Q/Z)^d.
    """

    def __init__(self, big: MixedSubgroup, small: MixedSubgroup, check=True):
        from .exactalg import smith_normal_form

        if big.n != small.n:
            raise ValueError("ambient dimension mismatch")
        self.big = big
        self.small = small
        n = big.n
        if check:
            for g in small.lat.basis:
                if not big.contains(g):
                    raise ValueError("quotient by a non-subgroup: lattice generator escapes")
            for w in small.w_rows:
                if express_in_rref(big.w_rows, big.w_pivots, w) is None:
                    raise ValueError("quotient by a non-subgroup: subspace escapes")

        # --- finitely generated part: lattice(big) / (lattice(small) + W1)
        B = big.lat  # basis already reduced mod W1
        small_bar = [reduce_by_rref(big.w_rows, big.w_pivots, g) for g in small.lat.basis]
        rel_cols = []
        for g in small_bar:
            c = B.coords(g)
            if c is None:
                raise ValueError("small lattice not contained in big subgroup")
            rel_cols.append(c)
        k = B.rank
        s = len(rel_cols)
        M = [[rel_cols[a][i] for a in range(s)] for i in range(k)]
        U, D, V = smith_normal_form(M)
        Uinv = _int_inverse(U)
        dvals = [D[i][i] if i < s else 0 for i in range(k)]
        self._fg_U = U
        free_idx = [i for i in range(k) if dvals[i] == 0]
        tors_idx = [i for i in range(k) if dvals[i] >= 2]
        tors_idx.sort(key=lambda i: dvals[i])
        self._free_idx = free_idx
        self._tors_idx = tors_idx
        self._tors_orders = [dvals[i] for i in tors_idx]
        self.free_reps = [self._fg_rep(Uinv, i, n) for i in free_idx]
        self.torsion_reps = [self._fg_rep(Uinv, i, n) for i in tors_idx]

        # --- divisible part: W1 / (W2 + image of small lattice inside W1)
        # complement of W2 inside W1
        comp = []
        for w in big.w_rows:
            red = reduce_by_rref(small.w_rows, small.w_pivots, w)
            comp.append(red)
        c_rows, c_piv = rref(comp)
        self._v_rows, self._v_pivots = c_rows, c_piv
        m = len(c_rows)
        # lattice part of W1 cap small: integer combos of small.lattice with
        # zero class mod W1
        lam_vecs = []
        if small.lat.rank:
            cols = [[g[j] for g in small_bar] for j in range(n)]
            ker = integral_kernel(cols)
            for nvec in ker:
                lam_vecs.append(_combine(small.lat.basis, [Fraction(x) for x in nvec], n))
        lam_coords = [self._v_coords(v) for v in lam_vecs]
        self._mu = RatLattice([c for c in lam_coords], m)
        mu_rref, mu_piv = rref(self._mu.basis)
        self._mu_rref, self._mu_pivots = mu_rref, mu_piv
        d = self._mu.rank
        q_positions = [j for j in range(m) if j not in mu_piv]
        self._q_positions = q_positions
        # the V-coordinate vector e_j corresponds to the element c_rows[j]
        self.q_reps = [[Fraction(x) for x in c_rows[j]] for j in q_positions]
        self.torus_reps = [self._v_from_coords(row) for row in self._mu.basis]

        self.group = MixedGroup(
            free_rank=len(free_idx),
            torsion=tuple(self._tors_orders),
            q_dim=len(q_positions),
            torus_rank=d,
        )

    def _fg_rep(self, Uinv, i, n):
        # column i of U^{-1} in the big-lattice basis
        coeffs = [Uinv[j][i] for j in range(len(Uinv))]
        return _combine(self.big.lat.basis, [Fraction(c) for c in coeffs], n)

    def _v_coords(self, w):
        bar = reduce_by_rref(self.small.w_rows, self.small.w_pivots, w)
        coeffs = express_in_rref(self._v_rows, self._v_pivots, bar)
        if coeffs is None:
            raise ValueError("vector outside W1 in divisible-part coordinates")
        return coeffs

    def _v_from_coords(self, coords):
        n = self.big.n
        out = [FR0] * n
        for c, row in zip(coords, self._v_rows):
            if c:
                out = [a + c * Fraction(b) for a, b in zip(out, row)]
        return out

    def coords(self, v):
        """Class of v in quotient coordinates; v must lie in the big subgroup."""
        mem = self.big.member(v)
        if mem is None:
            raise ValueError("vector not in the subgroup being quotiented")
        lat_coords, _ = mem
        k = self.big.lat.rank
        y = [sum(self._fg_U[i][j] * lat_coords[j] for j in range(k)) for i in range(k)]
        free = tuple(y[i] for i in self._free_idx)
        tors = tuple(y[i] % d for i, d in zip(self._tors_idx, self._tors_orders))
        # subtract f.g. representatives, leaving an element of W1 + small
        v2 = [Fraction(x) for x in v]
        for c, rep in zip(free, self.free_reps):
            if c:
                v2 = [a - c * b for a, b in zip(v2, rep)]
        for c, rep in zip(tors, self.torsion_reps):
            if c:
                v2 = [a - c * b for a, b in zip(v2, rep)]
        # remove the small-lattice component so only a W1-element remains;
        # pair barred small generators with their unbarred originals
        bar = reduce_by_rref(self.big.w_rows, self.big.w_pivots, v2)
        pairs = []
        for g in self.small.lat.basis:
            gb = reduce_by_rref(self.big.w_rows, self.big.w_pivots, g)
            if any(gb):
                pairs.append((gb, g))
        lat2 = RatLattice([gb for gb, _ in pairs], self.big.n)
        c2 = lat2.coords(bar)
        if c2 is None:
            raise AssertionError("fg reduction failed in mixed quotient coords")
        g2 = [FR0] * self.big.n
        for coeff, expr in zip(c2, lat2.basis_exprs):
            if coeff:
                for e, (_, gen) in zip(expr, pairs):
                    if e:
                        g2 = [a + coeff * e * b for a, b in zip(g2, gen)]
        w = [a - b for a, b in zip(v2, g2)]
        yv = self._v_coords(w)
        # split V-coords into the mu-span part (torus) and the complement (q)
        resid = reduce_by_rref(self._mu_rref, self._mu_pivots, yv)
        mu_part = [a - b for a, b in zip(yv, resid)]
        a_coords = _solve_in_echelon(self._mu.basis, mu_part)
        torus = tuple(a % 1 for a in a_coords)
        q = tuple(resid[j] for j in self._q_positions)
        return ClassCoords(free=free, torsion=tors, q=q, torus=torus)

    def is_zero_class(self, v):
        return self.coords(v).is_zero


def _solve_in_echelon(basis, v):
    """Rational coordinates of v in an echelon (Hermite-style) basis."""
    v = [Fraction(x) for x in v]
    coords = []
    for row in basis:
        piv = next((j for j in range(len(row)) if row[j]), None)
        if piv is None:
            coords.append(FR0)
            continue
        c = v[piv] / row[piv]
        coords.append(c)
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    if any(v):
        raise AssertionError("vector outside echelon span")
    return coords


def _int_inverse(U):
    """Inverse of a unimodular integer matrix, exact and integer."""
    k = len(U)
    cols = []
    for i in range(k):
        e = [1 if j == i else 0 for j in range(k)]
        x = q_solve(U, e)
        if x is None:
            raise ValueError("matrix not invertible")
        col = []
        for val in x:
            if val.denominator != 1:
                raise ValueError("matrix not unimodular")
            col.append(int(val))
        cols.append(col)
    return [[cols[j][i] for j in range(k)] for i in range(k)]


# ---------------------------------------------------------------------------
# mixed maps between levels Z^a + Q^b


class MixedMap:
    """Linear map (Z^a + Q^b) -> (Z^a' + Q^b'); the Q -> Z block is zero."""

    def __init__(self, src, dst, zz=None, qz=None, qq=None):
        self.src = src
        self.dst = dst
        za, qa = src
        zb, qb = dst
        self.zz = _norm_block(zz, zb, za, 0)
        self.qz = _norm_block(qz, qb, za, FR0)
        self.qq = _norm_block(qq, qb, qa, FR0)
        if len(self.zz) != zb or any(len(r) != za for r in self.zz):
            raise ValueError("zz block shape mismatch")
        if len(self.qz) != qb or any(len(r) != za for r in self.qz):
            raise ValueError("qz block shape mismatch")
        if len(self.qq) != qb or any(len(r) != qa for r in self.qq):
            raise ValueError("qq block shape mismatch")
        for row in self.zz:
            for x in row:
                if not isinstance(x, int):
                    raise ValueError("Z->Z block must be integral")

    @staticmethod
    def zero(src, dst):
        return MixedMap(src, dst)

    @staticmethod
    def identity(shape):
        za, qa = shape
        return MixedMap(
            shape,
            shape,
            zz=[[1 if i == j else 0 for j in range(za)] for i in range(za)],
            qz=[[FR0] * za for _ in range(qa)],
            qq=[[FR1 if i == j else FR0 for j in range(qa)] for i in range(qa)],
        )

    @property
    def src_dim(self):
        return self.src[0] + self.src[1]

    @property
    def dst_dim(self):
        return self.dst[0] + self.dst[1]

    def apply(self, vec):
        za, qa = self.src
        zb, qb = self.dst
        if len(vec) != za + qa:
            raise ValueError("vector length mismatch")
        zv, qv = vec[:za], vec[za:]
        out = []
        for row in self.zz:
            out.append(sum(a * x for a, x in zip(row, zv)))
        for rq, rz in zip(self.qq, self.qz):
            s = sum((a * x for a, x in zip(rz, zv)), FR0)
            s += sum((a * x for a, x in zip(rq, qv)), FR0)
            out.append(s)
        return out

    def dense_rows(self):
        za, qa = self.src
        rows = []
        for row in self.zz:
            rows.append([Fraction(x) for x in row] + [FR0] * qa)
        for rz, rq in zip(self.qz, self.qq):
            rows.append(list(rz) + list(rq))
        return rows

    def compose(self, other):
        """self after other."""
        if other.dst != self.src:
            raise ValueError("composition shape mismatch")
        za, qa = other.src
        zb, qb = self.dst
        zz = _mat_mul_shaped(self.zz, other.zz, zb, za, 0)
        qz1 = _mat_mul_shaped(self.qz, other.zz, qb, za, FR0)
        qz2 = _mat_mul_shaped(self.qq, other.qz, qb, za, FR0)
        qz = _fmat_add(qz1, qz2)
        qq = _mat_mul_shaped(self.qq, other.qq, qb, qa, FR0)
        return MixedMap((za, qa), (zb, qb), zz=zz, qz=qz, qq=qq)

    def add(self, other):
        if self.src != other.src or self.dst != other.dst:
            raise ValueError("sum shape mismatch")
        return MixedMap(
            self.src,
            self.dst,
            zz=[[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.zz, other.zz)],
            qz=[[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.qz, other.qz)],
            qq=[[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.qq, other.qq)],
        )

    def scale(self, c):
        if isinstance(c, int):
            return MixedMap(
                self.src,
                self.dst,
                zz=[[c * x for x in r] for r in self.zz],
                qz=[[c * x for x in r] for r in self.qz],
                qq=[[c * x for x in r] for r in self.qq],
            )
        raise ValueError("mixed maps only scale by integers")

    def is_zero(self):
        return (
            all(all(x == 0 for x in r) for r in self.zz)
            and all(all(x == 0 for x in r) for r in self.qz)
            and all(all(x == 0 for x in r) for r in self.qq)
        )


def _norm_block(block, rows, cols, zero):
    """Normalise a matrix block: None or [] expand to the zero shape."""
    if block is None or (block == [] and rows):
        return [[zero] * cols for _ in range(rows)]
    return block


def _mat_mul_shaped(A, B, n, m, zero):
    """A @ B with the output shape (n x m) given explicitly.

    Needed because empty blocks carry no width information.
    """
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for t in range(len(B)):
            a = Ai[t]
            if a:
                Bt = B[t]
                row = out[i]
                for j in range(m):
                    if Bt[j]:
                        row[j] += a * Bt[j]
    return out


def _fmat_add(A, B):
    return [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(A, B)]


def zero_vec(shape):
    za, qa = shape
    return [0] * za + [FR0] * qa


def check_level_vec(shape, vec):
    za, qa = shape
    if len(vec) != za + qa:
        raise ValueError("level vector length mismatch")
    out = []
    for i, x in enumerate(vec):
        if i < za:
            xf = Fraction(x)
            if xf.denominator != 1:
                raise ValueError(f"Z-coordinate {i} is not an integer: {x}")
            out.append(int(xf))
        else:
            out.append(Fraction(x))
    return out


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, u):
    return [c * a for a in u]


# ---------------------------------------------------------------------------
# ZQ chain complexes


class ZQComplex:
    """Bounded chain complex with levels Z^a_t + Q^b_t, t in [lo, hi].

    diff[t] maps level t to level t-1 and exists for lo < t <= hi.  The
    invariant D o D = 0 is checked exactly at construction.  Instances are
    immutable and hashable by identity; homology is memoised per degree.
    """

    def __init__(self, levels, diffs, lo=0, meta=None, check=True):
        levels = dict(levels)
        if not levels:
            levels = {0: (0, 0)}
        self.lo = min(levels)
        self.hi = max(levels)
        if lo < self.lo:
            self.lo = lo
        self.levels = {t: tuple(levels.get(t, (0, 0))) for t in range(self.lo, self.hi + 1)}
        self.diff = {}
        for t in range(self.lo + 1, self.hi + 1):
            d = diffs.get(t)
            if d is None:
                d = MixedMap.zero(self.levels[t], self.levels[t - 1])
            if d.src != self.levels[t] or d.dst != self.levels[t - 1]:
                raise ValueError(f"differential at degree {t} has wrong shape")
            self.diff[t] = d
        self.meta = meta or {}
        self._hom = {}
        self._hom_full = {}
        if check:
            for t in range(self.lo + 2, self.hi + 1):
                if not self.diff[t - 1].compose(self.diff[t]).is_zero():
                    raise ValueError(f"D o D != 0 between degrees {t} and {t - 2}")

    def level(self, t):
        return self.levels.get(t, (0, 0))

    def level_dim(self, t):
        za, qa = self.level(t)
        return za + qa

    def differential(self, t):
        if t in self.diff:
            return self.diff[t]
        return MixedMap.zero(self.level(t), self.level(t - 1))

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other

    # -- homology ----------------------------------------------------------

    def cycles(self, t):
        shape = self.level(t)
        n = shape[0] + shape[1]
        if t < self.lo or t > self.hi:
            return MixedSubgroup(0)
        if t == self.lo:
            return MixedSubgroup.full(n, shape[0])
        d = self.differential(t)
        mask = [i < shape[0] for i in range(n)]
        return mixed_kernel(d.dense_rows(), n, mask)

    def boundaries(self, t):
        shape = self.level(t)
        n = shape[0] + shape[1]
        if t + 1 > self.hi or t < self.lo:
            return MixedSubgroup(n)
        d = self.differential(t + 1)
        za, qa = self.level(t + 1)
        lattice = []
        subspace = []
        for i in range(za + qa):
            e = zero_vec(self.level(t + 1))
            e[i] = 1 if i < za else FR1
            img = d.apply(e)
            (lattice if i < za else subspace).append([Fraction(x) for x in img])
        return MixedSubgroup(n, lattice, subspace)

    def homology_full(self, t):
        """Homology at degree t with generators: a Homology handle."""
        if t in self._hom_full:
            return self._hom_full[t]
        if t < self.lo or t > self.hi:
            h = Homology(self, t, None, None, ZERO_GROUP)
        else:
            cyc = self.cycles(t)
            bdry = self.boundaries(t)
            quot = MixedQuotient(cyc, bdry, check=False)
            h = Homology(self, t, cyc, quot, quot.group)
        self._hom_full[t] = h
        return h

    def homology(self, t):
        return self.homology_full(t).group


class Homology:
    """Homology group of a ZQComplex at one degree, with generators."""

    def __init__(self, complex_, degree, cycles, quotient, group):
        self.complex = complex_
        self.degree = degree
        self.cycles = cycles
        self.quotient = quotient
        self.group = group

    def class_coords(self, vec):
        if self.quotient is None:
            raise ValueError("degree out of range: zero group has no coordinates")
        vec = check_level_vec(self.complex.level(self.degree), vec)
        return self.quotient.coords([Fraction(x) for x in vec])

    def is_zero_class(self, vec):
        if self.quotient is None:
            return True
        return self.class_coords(vec).is_zero

    @property
    def free_reps(self):
        return self.quotient.free_reps if self.quotient else []

    @property
    def torsion_reps(self):
        return self.quotient.torsion_reps if self.quotient else []

    @property
    def q_reps(self):
        return self.quotient.q_reps if self.quotient else []

    @property
    def torus_reps(self):
        return self.quotient.torus_reps if self.quotient else []


# ---------------------------------------------------------------------------
# constructions on complexes


def shift(X, l):
    """Shift a complex up by l: level t of the result is level t - l of X."""
    if l < 0:
        raise ValueError("shift amount must be nonnegative")
    levels = {t + l: X.level(t) for t in range(X.lo, X.hi + 1)}
    diffs = {t + l: X.differential(t) for t in range(X.lo + 1, X.hi + 1)}
    return ZQComplex(levels, diffs, lo=X.lo + l, check=False)


def represent_subgroups(X, subs):
    """Re-present chosen levels of X by mixed subgroups closed under D.

    subs maps degrees t to MixedSubgroups of the ambient level; other
    levels stay in their standard basis.  Returns a new ZQComplex whose
    level t has the subgroup's lattice generators as Z-coordinates and
    subspace generators as Q-coordinates, plus an embedding (list of
    ambient vectors per new basis vector) stored in meta['embedding'].
    """
    degrees = range(X.lo, X.hi + 1)
    embed = {}
    levels = {}
    for t in degrees:
        if t in subs:
            G = subs[t]
            for w in G.w_rows:
                if any(w[: X.level(t)[0]]):
                    raise ValueError("subspace generators must have zero Z-part")
            levels[t] = (G.lattice_rank, G.subspace_dim)
            embed[t] = [list(v) for v in G.lattice_basis()] + [list(w) for w in G.w_rows]
        else:
            levels[t] = X.level(t)
            embed[t] = _std_basis(X.level(t))
    diffs = {}
    for t in range(X.lo + 1, X.hi + 1):
        d = X.differential(t)
        cols = [d.apply(check_level_vec(X.level(t), v)) for v in embed[t]]
        diffs[t] = _express_map(cols, levels[t], levels[t - 1], subs.get(t - 1), X.level(t - 1))
    Y = ZQComplex(levels, diffs, lo=X.lo, check=True)
    Y.meta = dict(X.meta)
    Y.meta["embedding"] = embed
    Y.meta["parent"] = X
    return Y


def _std_basis(shape):
    za, qa = shape
    out = []
    for i in range(za + qa):
        e = [FR0] * (za + qa)
        e[i] = FR1
        out.append(e)
    return out


def _express_map(cols, src_shape, dst_shape, dst_sub, dst_ambient_shape):
    za, qa = src_shape
    zb, qb = dst_shape
    zz = [[0] * za for _ in range(zb)]
    qz = [[FR0] * za for _ in range(qb)]
    qq = [[FR0] * qa for _ in range(qb)]
    for j, img in enumerate(cols):
        if dst_sub is None:
            zcoords = [Fraction(x) for x in img[: dst_ambient_shape[0]]]
            qcoords = [Fraction(x) for x in img[dst_ambient_shape[0] :]]
        else:
            mem = dst_sub.member([Fraction(x) for x in img])
            if mem is None:
                raise ValueError("differential image escapes the subgroup presentation")
            zc, qc = mem
            zcoords = [Fraction(c) for c in zc]
            qcoords = [Fraction(c) for c in qc]
        for i, c in enumerate(zcoords):
            if j < za:
                if c.denominator != 1:
                    raise ValueError("non-integral Z-block in re-presented differential")
                zz[i][j] = int(c)
            else:
                if c != 0:
                    raise ValueError("Q-part maps into the Z-part after re-presentation")
        for i, c in enumerate(qcoords):
            if j < za:
                qz[i][j] = c
            else:
                qq[i][j - za] = c
    return MixedMap(src_shape, dst_shape, zz=zz, qz=qz, qq=qq)


def truncate_nonneg(X):
    """Smart truncation to nonnegative degrees: level 0 becomes the 0-cycles.

    Homology in degrees >= 0 is preserved; negative degrees are dropped.
    """
    if X.lo >= 0:
        return X
    sub0 = X.cycles(0)
    Y = represent_subgroups(X, {0: sub0})
    levels = {t: Y.level(t) for t in range(0, Y.hi + 1)}
    diffs = {t: Y.differential(t) for t in range(1, Y.hi + 1)}
    Z = ZQComplex(levels, diffs, lo=0, check=False)
    Z.meta = dict(Y.meta)
    Z.meta["embedding"] = {t: Y.meta["embedding"][t] for t in range(0, Y.hi + 1)}
    Z.meta["parent"] = X
    return Z


# ---------------------------------------------------------------------------
# double complexes and the total complex


class DoubleComplexZQ:
    """Double complex: rows of fixed coefficient kind over a Cech direction.

    Each row has a chain degree (its vertical position), a kind 'Z' or 'Q',
    and one block per column i >= 0.  The horizontal differential raises
    the column index; the vertical differential goes from the row at chain
    degree r to the row at chain degree r - 1 (when present) within the
    same column.  All squares are checked to commute exactly; the total
    complex introduces the sign (-1)^i on vertical maps in column i, the
    single global convention from which every cocycle equation downstream
    is derived.
    """

    def __init__(self, rows, horiz, vert, check=True):
        # rows: list of dicts {degree, kind, dims: {col: size}}
        self.rows = rows
        self.horiz = horiz  # (row_index, col) -> matrix block (dense lists)
        self.vert = vert  # (row_index, col) -> matrix block to the row below
        self.by_degree = {}
        for idx, row in enumerate(rows):
            if row["degree"] in self.by_degree:
                raise ValueError("two rows with the same chain degree")
            self.by_degree[row["degree"]] = idx
        if check:
            self._check()

    def row_dim(self, idx, col):
        return self.rows[idx]["dims"].get(col, 0)

    def _block(self, table, idx, col):
        blk = table.get((idx, col))
        return blk

    def _check(self):
        for idx, row in enumerate(self.rows):
            cols = sorted(row["dims"])
            for col in cols:
                h1 = self.horiz.get((idx, col))
                h2 = self.horiz.get((idx, col + 1))
                if h1 is not None and h2 is not None:
                    if not _is_zero(_dense_mul(h2, h1)):
                        raise ValueError(f"horizontal d^2 != 0 at row degree {row['degree']}, column {col}")
            below = self.by_degree.get(row["degree"] - 1)
            if below is None:
                continue
            for col in cols:
                v1 = self.vert.get((idx, col))
                if v1 is None:
                    continue
                bb = self.by_degree.get(row["degree"] - 2)
                if bb is not None:
                    v2 = self.vert.get((below, col))
                    if v2 is not None and not _is_zero(_dense_mul(v2, v1)):
                        raise ValueError(f"vertical d^2 != 0 at row degree {row['degree']}, column {col}")
                h_top = self.horiz.get((idx, col))
                h_bot = self.horiz.get((below, col))
                v_next = self.vert.get((idx, col + 1))
                dims_ok = self.row_dim(below, col + 1)
                if h_top is None and v_next is None:
                    continue
                a = _dense_mul(h_bot, v1) if h_bot is not None else None
                b = _dense_mul(v_next, h_top) if (v_next is not None and h_top is not None) else None
                if a is None and b is None:
                    continue
                rows_n = dims_ok
                cols_n = self.row_dim(idx, col)
                a = a if a is not None else [[0] * cols_n for _ in range(rows_n)]
                b = b if b is not None else [[0] * cols_n for _ in range(rows_n)]
                if a != b:
                    raise ValueError(
                        f"square does not commute at row degree {row['degree']}, column {col}"
                    )

    def total_complex(self, floor=None):
        """Total complex: level t = sum of blocks with row_degree - col = t.

        The differential of a column-i component is delta (column shift)
        plus (-1)^i times the vertical map.  Z-rows contribute the Z-part
        of each level, Q-rows the Q-part.  Block layout per level is kept
        in meta['blocks'] as {(row_degree, col): (offset_kind, offset, size)}.
        """
        degrees = {}
        for idx, row in enumerate(self.rows):
            for col, size in row["dims"].items():
                t = row["degree"] - col
                degrees.setdefault(t, []).append((row["degree"], col, idx, size, row["kind"]))
        if floor is not None:
            degrees = {t: blocks for t, blocks in degrees.items() if t >= floor}
        if not degrees:
            return ZQComplex({0: (0, 0)}, {}, lo=0)
        lo, hi = min(degrees), max(degrees)
        levels = {}
        layout = {}
        for t in range(lo, hi + 1):
            blocks = sorted(degrees.get(t, []), key=lambda b: (-b[0], b[1]))
            zoff = qoff = 0
            lay = {}
            for rdeg, col, idx, size, kind in blocks:
                if kind == "Z":
                    lay[(rdeg, col)] = ("Z", zoff, size)
                    zoff += size
                else:
                    lay[(rdeg, col)] = ("Q", qoff, size)
                    qoff += size
            levels[t] = (zoff, qoff)
            layout[t] = lay
        diffs = {}
        for t in range(lo + 1, hi + 1):
            src = levels[t]
            dst = levels.get(t - 1, (0, 0))
            zz = [[0] * src[0] for _ in range(dst[0])]
            qz = [[FR0] * src[0] for _ in range(dst[1])]
            qq = [[FR0] * src[1] for _ in range(dst[1])]
            for (rdeg, col), (kind, off, size) in layout[t].items():
                idx = self.by_degree[rdeg]
                # horizontal: to (rdeg, col+1), same kind
                h = self.horiz.get((idx, col))
                tgt = layout.get(t - 1, {}).get((rdeg, col + 1))
                if h is not None and tgt is not None:
                    _insert_block(zz, qz, qq, h, kind, off, tgt, 1)
                # vertical: to (rdeg-1, col), with sign (-1)^col
                below = self.by_degree.get(rdeg - 1)
                if below is not None:
                    v = self.vert.get((idx, col))
                    tgt = layout.get(t - 1, {}).get((rdeg - 1, col))
                    if v is not None and tgt is not None:
                        kind_b = self.rows[below]["kind"]
                        if kind == "Q" and kind_b == "Z":
                            raise ValueError("vertical map from a Q-row into a Z-row")
                        _insert_block(zz, qz, qq, v, kind, off, tgt, (-1) ** (col % 2))
            diffs[t] = MixedMap(src, dst, zz=zz, qz=qz, qq=qq)
        X = ZQComplex(levels, diffs, lo=lo, check=True)
        X.meta["blocks"] = layout
        return X


def _insert_block(zz, qz, qq, block, src_kind, src_off, tgt, sign):
    tkind, toff, tsize = tgt
    for i in range(len(block)):
        for j in range(len(block[0]) if block else 0):
            val = block[i][j]
            if not val:
                continue
            val = sign * val
            if src_kind == "Z" and tkind == "Z":
                if not isinstance(val, int):
                    raise ValueError("Z-row blocks must be integral")
                zz[toff + i][src_off + j] += val
            elif src_kind == "Z" and tkind == "Q":
                qz[toff + i][src_off + j] += Fraction(val)
            elif src_kind == "Q" and tkind == "Q":
                qq[toff + i][src_off + j] += Fraction(val)
            else:
                raise ValueError("blocks may not map the Q-part into the Z-part")


def _dense_mul(A, B):
    if A is None or B is None:
        return None
    k = len(B)
    m = len(B[0]) if B else 0
    out = []
    for i in range(len(A)):
        row = [0] * m
        for t in range(k):
            a = A[i][t] if t < len(A[i]) else 0
            if a:
                for j in range(m):
                    if B[t][j]:
                        row[j] += a * B[t][j]
        out.append(row)
    return out


def _is_zero(A):
    return A is None or all(all(x == 0 for x in row) for row in A)


# ---------------------------------------------------------------------------
# chain maps and induced maps on homology


class ChainMap:
    """Levelwise MixedMap f: X -> Y commuting with the differentials."""

    def __init__(self, X, Y, maps, check=True):
        self.X = X
        self.Y = Y
        self.maps = {}
        for t in range(min(X.lo, Y.lo), max(X.hi, Y.hi) + 1):
            f = maps.get(t)
            if f is None:
                f = MixedMap.zero(X.level(t), Y.level(t))
            if f.src != X.level(t) or f.dst != Y.level(t):
                raise ValueError(f"chain map has wrong shape at degree {t}")
            self.maps[t] = f
        if check:
            for t in range(min(X.lo, Y.lo) + 1, max(X.hi, Y.hi) + 1):
                lhs = self.maps[t - 1].compose(X.differential(t))
                rhs = Y.differential(t).compose(self.maps[t])
                diff = lhs.add(rhs.scale(-1))
                if not diff.is_zero():
                    raise ValueError(f"not a chain map: commutation fails at degree {t}")

    def apply(self, t, vec):
        return self.maps[t].apply(vec)


@dataclass
class InducedMapReport:
    degree: int
    source: MixedGroup
    target: MixedGroup
    kernel: MixedGroup
    cokernel: MixedGroup
    matrix: dict = field(default_factory=dict)

    @property
    def injective(self):
        return self.kernel.is_trivial

    @property
    def surjective(self):
        return self.cokernel.is_trivial

    @property
    def isomorphism(self):
        return self.injective and self.surjective


def homology_map(f: ChainMap, t: int) -> InducedMapReport:
    """Induced map H_t(X) -> H_t(Y) with exact kernel and cokernel.

    Kernel and cokernel are computed at the chain level: the kernel as the
    quotient by X-boundaries of {cycles x : f(x) is a Y-boundary} (a mixed
    kernel in the parameter space of cycle and boundary generators), the
    cokernel as Y-cycles modulo (image + Y-boundaries).
    """
    X, Y = f.X, f.Y
    hX = X.homology_full(t)
    hY = Y.homology_full(t)
    if hX.quotient is None or hY.quotient is None:
        return InducedMapReport(t, hX.group, hY.group, hX.group, hY.group)
    ft = f.maps[t]
    cycX, cycY = hX.cycles, hY.cycles
    bdrX, bdrY = X.boundaries(t), Y.boundaries(t)

    # cokernel: cycles(Y) / (f(cycles X) + boundaries Y)
    img_lat = [ft.apply(check_level_vec(X.level(t), v)) for v in cycX.lattice_basis()]
    img_sub = [ft.apply(check_level_vec(X.level(t), _as_level(X.level(t), w))) for w in cycX.w_rows]
    image = MixedSubgroup(
        Y.level_dim(t),
        [[Fraction(x) for x in v] for v in img_lat],
        [[Fraction(x) for x in v] for v in img_sub],
    )
    coker = MixedQuotient(cycY, image.sum(bdrY), check=False).group

    # kernel: {x in cycles X : f(x) in boundaries Y} / boundaries X
    lam = cycX.lattice_basis()
    wx = cycX.w_rows
    lb = bdrY.lat.basis
    wb = bdrY.w_rows
    cols = []
    int_mask = []
    for v in lam:
        cols.append(ft.apply(check_level_vec(X.level(t), v)))
        int_mask.append(True)
    for v in wx:
        cols.append(ft.apply(_q_level(X.level(t), v)))
        int_mask.append(False)
    for v in lb:
        cols.append([-Fraction(x) for x in v])
        int_mask.append(True)
    for v in wb:
        cols.append([-Fraction(x) for x in v])
        int_mask.append(False)
    nvars = len(cols)
    rows = [[Fraction(cols[j][i]) for j in range(nvars)] for i in range(Y.level_dim(t))]
    sols = mixed_kernel(rows, nvars, int_mask)
    nx = len(lam) + len(wx)
    preimage_lat = [_combine_xpart(v, lam, wx, X.level_dim(t)) for v in sols.lattice_basis()]
    preimage_sub = [_combine_xpart(v, lam, wx, X.level_dim(t)) for v in sols.w_rows]
    K = MixedSubgroup(X.level_dim(t), preimage_lat, preimage_sub)
    kernel = MixedQuotient(K, bdrX, check=False).group

    # matrix on generators
    matrix = {"free": [], "torsion": [], "q": [], "torus": []}
    for rep in hX.free_reps:
        matrix["free"].append(hY.class_coords(ft.apply(check_level_vec(X.level(t), rep))))
    for rep in hX.torsion_reps:
        matrix["torsion"].append(hY.class_coords(ft.apply(check_level_vec(X.level(t), rep))))
    for rep in hX.q_reps:
        matrix["q"].append(hY.class_coords(ft.apply(_q_level(X.level(t), rep))))
    for rep in hX.torus_reps:
        matrix["torus"].append(hY.class_coords(ft.apply(_q_level(X.level(t), rep))))
    return InducedMapReport(t, hX.group, hY.group, kernel, coker, matrix)


def _as_level(shape, w):
    return check_level_vec(shape, w)


def _q_level(shape, w):
    za, qa = shape
    vec = [Fraction(x) for x in w]
    zpart = vec[:za]
    if any(zpart):
        raise ValueError("divisible generator with nonzero Z-part")
    return [0] * za + vec[za:]


def _combine_xpart(sol, lam, wx, n):
    out = [FR0] * n
    k = len(lam)
    for c, v in zip(sol[:k], lam):
        if c:
            out = [a + c * Fraction(x) for a, x in zip(out, v)]
    for c, v in zip(sol[k : k + len(wx)], wx):
        if c:
            out = [a + c * Fraction(x) for a, x in zip(out, v)]
    return out
