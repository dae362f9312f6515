"""Finite simplicial complexes and their vertex-star patch systems.

The base space of every computation is a finite simplicial complex with a
fixed total order on its vertices (the orientation convention).  Patches
of the cover are closed stars St(sigma), indexed directly by simplices:
the tuple (a_0 < ... < a_i) indexes a nonempty patch exactly when it spans
a simplex, so the Cech index set in degree i is the list of i-simplices
and the nerve of the cover is the complex itself.
"""

import json
from fractions import Fraction
from itertools import combinations

from .homalg import MixedGroup, MixedMap, ZQComplex

FR0 = Fraction(0)


class SimplicialComplex:
    """Immutable finite simplicial complex with ordered vertices."""

    def __init__(self, vertices, facets, name=None):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertices")
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.name = name or "complex"
        norm_facets = []
        for f in facets:
            if not f:
                raise ValueError("empty facet")
            try:
                idx = tuple(sorted(self.vertex_index[v] for v in f))
            except KeyError as e:
                raise ValueError(f"facet uses unknown vertex {e.args[0]!r}") from None
            if len(set(idx)) != len(idx):
                raise ValueError(f"facet {f} has a repeated vertex")
            norm_facets.append(idx)
        self.facets = sorted(set(norm_facets))
        faces = set()
        for f in self.facets:
            for k in range(1, len(f) + 1):
                faces.update(combinations(f, k))
        self.dim = max((len(f) - 1 for f in self.facets), default=-1)
        self.simplices = {}
        for s in faces:
            self.simplices.setdefault(len(s) - 1, []).append(s)
        for d in self.simplices:
            self.simplices[d].sort()
        self.simplex_pos = {
            s: i for d in self.simplices for i, s in enumerate(self.simplices[d])
        }
        self._stars = {}

    def simplices_of_dim(self, d):
        return self.simplices.get(d, [])

    def n_simplices(self, d):
        return len(self.simplices.get(d, []))

    def contains(self, s):
        return tuple(sorted(s)) in self.simplex_pos

    def euler_characteristic(self):
        return sum((-1) ** d * self.n_simplices(d) for d in self.simplices)

    def __repr__(self):
        counts = ", ".join(str(self.n_simplices(d)) for d in range(self.dim + 1))
        return f"SimplicialComplex({self.name}: {counts})"

    # -- stars -------------------------------------------------------------

    def closed_star(self, sigma):
        """All faces of simplices containing sigma, as a Star (may be empty)."""
        sigma = tuple(sorted(sigma))
        if sigma in self._stars:
            return self._stars[sigma]
        star = Star(self, sigma)
        self._stars[sigma] = star
        return star

    def to_json(self):
        return json.dumps(
            {
                "vertices": [str(v) for v in self.vertices],
                "facets": [[str(self.vertices[i]) for i in f] for f in self.facets],
            }
        )

    @staticmethod
    def from_json(text, name=None):
        data = json.loads(text)
        if "vertices" not in data or "facets" not in data:
            raise ValueError("complex JSON needs 'vertices' and 'facets'")
        return SimplicialComplex(data["vertices"], data["facets"], name=name)

    @staticmethod
    def from_off(text, name=None):
        """Triangulated surface from an OFF file; coordinates are ignored."""
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or not lines[0].upper().startswith("OFF"):
            raise ValueError("not an OFF file")
        body = lines[1:] if lines[0].upper() == "OFF" else [lines[0][3:]] + lines[1:]
        counts = body[0].split()
        nv, nf = int(counts[0]), int(counts[1])
        face_lines = body[1 + nv : 1 + nv + nf]
        facets = []
        for ln in face_lines:
            parts = ln.split()
            k = int(parts[0])
            facets.append([f"v{j}" for j in parts[1 : 1 + k]])
        return SimplicialComplex([f"v{i}" for i in range(nv)], facets, name=name or "off")


class Star:
    """The closed star of a simplex: a subcomplex with its own cell order."""

    def __init__(self, complex_: SimplicialComplex, sigma):
        self.complex = complex_
        self.sigma = sigma
        cells = set()
        if complex_.contains(sigma):
            sset = set(sigma)
            for d in range(complex_.dim + 1):
                for tau in complex_.simplices_of_dim(d):
                    if sset.issubset(tau):
                        for k in range(1, len(tau) + 1):
                            cells.update(combinations(tau, k))
        self.cells = {}
        for c in cells:
            self.cells.setdefault(len(c) - 1, []).append(c)
        for d in self.cells:
            self.cells[d].sort()
        self.pos = {c: i for d in self.cells for i, c in enumerate(self.cells[d])}

    @property
    def is_empty(self):
        return not self.cells

    def cells_of_dim(self, p):
        return self.cells.get(p, [])

    def n_cells(self, p):
        return len(self.cells.get(p, []))

    def contains(self, c):
        return tuple(sorted(c)) in self.pos

    def coboundary_matrix(self, p):
        """d: C^p -> C^(p+1) over the star, alternating-sign convention."""
        src = self.cells_of_dim(p)
        dst = self.cells_of_dim(p + 1)
        rows = [[0] * len(src) for _ in dst]
        src_pos = {c: i for i, c in enumerate(src)}
        for r, tau in enumerate(dst):
            for i in range(len(tau)):
                facet = tau[:i] + tau[i + 1 :]
                j = src_pos.get(facet)
                if j is not None:
                    rows[r][j] += (-1) ** i
        return rows

    def cochain_restriction(self, sub, p):
        """Restriction matrix C^p(self) -> C^p(sub) for sub a sub-star."""
        src = self.cells_of_dim(p)
        dst = sub.cells_of_dim(p)
        src_pos = {c: i for i, c in enumerate(src)}
        rows = [[0] * len(src) for _ in dst]
        for r, c in enumerate(dst):
            j = src_pos.get(c)
            if j is None:
                raise ValueError("restriction target is not a sub-star")
            rows[r][j] = 1
        return rows


class StarSite:
    """A complex together with its closed-star good-cover patch system."""

    def __init__(self, complex_: SimplicialComplex):
        self.complex = complex_

    def cech_tuples(self, i):
        """Ordered Cech tuples of degree i = the i-simplices of the base."""
        return self.complex.simplices_of_dim(i)

    def patch(self, sigma):
        return self.complex.closed_star(sigma)

    @property
    def dim(self):
        return self.complex.dim


# ---------------------------------------------------------------------------
# builders


def circle(m):
    if m < 3:
        raise ValueError("a triangulated circle needs at least 3 vertices")
    verts = list(range(m))
    facets = [(i, (i + 1) % m) for i in range(m)]
    return SimplicialComplex(verts, facets, name=f"circle({m})")


def sphere(n):
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    verts = list(range(n + 2))
    facets = list(combinations(verts, n + 1))
    return SimplicialComplex(verts, facets, name=f"sphere({n})")


def simplex_complex(n):
    """The full n-simplex (used for symmetry sanity checks)."""
    verts = list(range(n + 1))
    return SimplicialComplex(verts, [tuple(verts)], name=f"simplex({n})")


def torus2():
    """The 7-vertex triangulated torus: orbits of {0,1,3} and {0,2,3} mod 7."""
    verts = list(range(7))
    facets = []
    for i in range(7):
        facets.append(tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7))))
        facets.append(tuple(sorted(((i) % 7, (i + 2) % 7, (i + 3) % 7))))
    return SimplicialComplex(verts, facets, name="torus2")


def rp2():
    """The 6-vertex projective plane (antipodal icosahedron)."""
    verts = list(range(1, 7))
    facets = [
        (1, 2, 3),
        (1, 3, 4),
        (1, 4, 5),
        (1, 5, 6),
        (1, 2, 6),
        (2, 3, 5),
        (3, 4, 6),
        (2, 4, 5),
        (3, 5, 6),
        (2, 4, 6),
    ]
    return SimplicialComplex(verts, facets, name="rp2")


def klein():
    """A 9-vertex Klein bottle from a 3x3 grid with a reflecting glue."""
    verts = [(i, j) for i in range(3) for j in range(3)]

    def v(i, j):
        if i < 3:
            return (i, j % 3)
        return (0, (-j) % 3)

    facets = []
    for i in range(3):
        for j in range(3):
            a, b = v(i, j), v(i + 1, j)
            c, d = v(i, j + 1), v(i + 1, j + 1)
            facets.append((a, b, d))
            facets.append((a, c, d))
    return SimplicialComplex(verts, facets, name="klein")


def product(K, L):
    """Staircase (ordered-product) triangulation of |K| x |L|.

    Vertices are ordered lexicographically by (index in K, index in L);
    each pair of an a-facet and a b-facet contributes binomial(a+b, a)
    top cells, the monotone staircase paths through their grid.
    """
    verts = [(vk, vl) for vk in K.vertices for vl in L.vertices]
    facets = []
    for fk in K.facets:
        for fl in L.facets:
            a, b = len(fk) - 1, len(fl) - 1
            for path in _staircases(a, b):
                cell = tuple(
                    (K.vertices[fk[x]], L.vertices[fl[y]]) for x, y in path
                )
                facets.append(cell)
    return SimplicialComplex(verts, facets, name=f"product({K.name},{L.name})")


def _staircases(a, b):
    if a == 0 and b == 0:
        return [[(0, 0)]]
    out = []
    if a > 0:
        for p in _staircases(a - 1, b):
            out.append(p + [(a, b)])
    if b > 0:
        for p in _staircases(a, b - 1):
            out.append(p + [(a, b)])
    return out


def barycentric(K):
    """Barycentric subdivision: vertices are simplices, facets are maximal chains."""
    simps = [s for d in sorted(K.simplices) for s in K.simplices_of_dim(d)]
    facets = []

    def chains(prefix, last):
        extensions = [
            s
            for d in range(len(last), K.dim + 1)
            for s in K.simplices_of_dim(d)
            if len(s) == len(last) + 1 and set(last).issubset(s)
        ]
        if not extensions:
            facets.append(tuple(prefix))
            return
        for s in extensions:
            chains(prefix + [s], s)

    for s in K.simplices_of_dim(0):
        chains([s], s)
    return SimplicialComplex(simps, facets, name=f"barycentric({K.name})")


BUILDERS = {
    "circle": circle,
    "sphere": sphere,
    "torus2": torus2,
    "rp2": rp2,
    "klein": klein,
    "simplex": simplex_complex,
}


def build_complex(vertices, facets, name=None):
    return SimplicialComplex(vertices, facets, name=name)


def builder_from_spec(spec):
    """Resolve 'torus2', 'circle:5', 'product:rp2,circle:3' and friends."""
    spec = spec.strip()
    if spec.startswith("product:"):
        rest = spec[len("product:") :]
        parts = _split_product(rest)
        if len(parts) != 2:
            raise ValueError("product builder takes exactly two factors")
        return product(builder_from_spec(parts[0]), builder_from_spec(parts[1]))
    if spec.startswith("barycentric:"):
        return barycentric(builder_from_spec(spec[len("barycentric:") :]))
    if ":" in spec:
        name, arg = spec.split(":", 1)
        if name not in BUILDERS:
            raise ValueError(f"unknown builder {name!r}")
        return BUILDERS[name](int(arg))
    if spec in BUILDERS:
        try:
            return BUILDERS[spec]()
        except TypeError:
            raise ValueError(f"builder {spec!r} needs a parameter, e.g. {spec}:3")
    raise ValueError(f"unknown builder {spec!r}")


def _split_product(text):
    parts = []
    depth = 0
    cur = ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            cur += ch
    parts.append(cur)
    return parts


# ---------------------------------------------------------------------------
# simplicial cochain complexes and cohomology (the oracle)


def cochain_zq(M: SimplicialComplex, coeff="Z", top=None):
    """The simplicial cochain complex as a ZQComplex.

    Cohomological degree p sits at chain degree top - p (top defaults to
    dim M), so homology at top - p is H^p.  coeff is 'Z' or 'Q'.
    """
    if coeff not in ("Z", "Q"):
        raise ValueError("coefficients must be 'Z' or 'Q'")
    top = M.dim if top is None else top
    levels = {}
    diffs = {}
    for p in range(0, M.dim + 1):
        n = M.n_simplices(p)
        levels[top - p] = (n, 0) if coeff == "Z" else (0, n)
    if M.dim < 0:
        levels = {0: (0, 0)}
    for p in range(0, M.dim):
        rows = coboundary_matrix(M, p)
        t = top - p  # map from level t to level t-1 is d: C^p -> C^(p+1)
        src = levels[t]
        dst = levels[t - 1]
        if coeff == "Z":
            diffs[t] = MixedMap(src, dst, zz=rows)
        else:
            diffs[t] = MixedMap(src, dst, qq=[[Fraction(x) for x in row] for row in rows])
    return ZQComplex(levels, diffs, lo=min(levels))


def coboundary_matrix(M: SimplicialComplex, p):
    src = M.simplices_of_dim(p)
    dst = M.simplices_of_dim(p + 1)
    pos = {s: i for i, s in enumerate(src)}
    rows = [[0] * len(src) for _ in dst]
    for r, tau in enumerate(dst):
        for i in range(len(tau)):
            facet = tau[:i] + tau[i + 1 :]
            j = pos.get(facet)
            if j is not None:
                rows[r][j] += (-1) ** i
    return rows


def simplicial_cohomology(M: SimplicialComplex, coeff, j) -> MixedGroup:
    """H^j(M; Z) or H^j(M; Q) as a MixedGroup."""
    if j < 0 or j > M.dim:
        return MixedGroup()
    X = cochain_zq(M, coeff)
    return X.homology(M.dim - j)


def cohomology_generators(M: SimplicialComplex, coeff, j):
    """The Homology handle at cohomological degree j (with generators)."""
    X = _cochain_cached(M, coeff)
    return X.homology_full(M.dim - j)


_COCHAIN_CACHE = {}


def _cochain_cached(M, coeff):
    key = (id(M), coeff)
    if key not in _COCHAIN_CACHE:
        _COCHAIN_CACHE[key] = cochain_zq(M, coeff)
    return _COCHAIN_CACHE[key]


# ---------------------------------------------------------------------------
# acyclicity of the star cover


def star_acyclicity_check(M: SimplicialComplex):
    """Verify every closed star is connected and Q-acyclic.

    Also checks the combinatorial identity that makes the Cech rows of the
    form degree p decompose over p-simplices: the simplices of St(tau) are
    exactly the sigma with sigma cup tau a simplex.  Returns a report dict;
    failures name the offending simplex.
    """
    failures = []
    for d in range(M.dim + 1):
        for tau in M.simplices_of_dim(d):
            star = M.closed_star(tau)
            # identity {sigma : sigma cup tau in M} = simplices of St(tau)
            direct = set()
            for dd in range(M.dim + 1):
                for s in M.simplices_of_dim(dd):
                    if M.contains(tuple(sorted(set(s) | set(tau)))):
                        direct.add(s)
            star_cells = {c for p in star.cells for c in star.cells[p]}
            if direct != star_cells:
                failures.append((tau, "star identity"))
                continue
            hs = _star_q_homology(star)
            if hs[0] != MixedGroup(q_dim=1) or any(
                not h.is_trivial for h in hs[1:]
            ):
                failures.append((tau, f"cohomology {[str(h) for h in hs]}"))
    return {"ok": not failures, "failures": failures}


def _star_q_homology(star: Star):
    top = max(star.cells) if star.cells else 0
    levels = {top - p: (0, star.n_cells(p)) for p in range(top + 1)}
    diffs = {}
    for p in range(top):
        rows = star.coboundary_matrix(p)
        t = top - p
        diffs[t] = MixedMap(levels[t], levels[t - 1], qq=[[Fraction(x) for x in r] for r in rows])
    X = ZQComplex(levels, diffs, lo=0)
    return [X.homology(top - p) for p in range(top + 1)]


# ---------------------------------------------------------------------------
# simplicial automorphisms


def automorphisms(M: SimplicialComplex):
    """All vertex permutations preserving the facet set, in lex order.

    Backtracking over vertex images with degree-profile pruning; complete
    and deterministic.
    """
    n = len(M.vertices)
    facet_sets = {frozenset(f) for f in M.facets}
    # vertex invariant: multiset of facet sizes through the vertex
    profile = []
    for i in range(n):
        sizes = sorted(len(f) for f in M.facets if i in f)
        profile.append(tuple(sizes))
    adj = [set() for _ in range(n)]
    for f in M.facets:
        for a in f:
            adj[a].update(set(f) - {a})
    out = []
    perm = [-1] * n
    used = [False] * n

    def consistent(i, img):
        if profile[i] != profile[img]:
            return False
        for j in range(n):
            if perm[j] >= 0:
                if (j in adj[i]) != (perm[j] in adj[img]):
                    return False
        return True

    def backtrack(i):
        if i == n:
            mapped = {frozenset(perm[v] for v in f) for f in facet_sets}
            if mapped == facet_sets:
                out.append(tuple(perm))
            return
        for img in range(n):
            if not used[img] and consistent(i, img):
                perm[i] = img
                used[img] = True
                backtrack(i + 1)
                perm[i] = -1
                used[img] = False

    backtrack(0)
    return sorted(out)


def compose_perm(p, q):
    """(p after q) as vertex permutations."""
    return tuple(p[q[i]] for i in range(len(p)))


def invert_perm(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)
