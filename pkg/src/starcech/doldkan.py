"""Simplicial abelian groups from chain complexes, concretely.

A chain complex C gives a simplicial abelian group whose r-simplices are
families indexed by the monotone surjections out of [r]; a monotone map
theta acts through the unique epi-mono factorisation of each composite,
with three cases: identity mono (relabel), the 0th coface (apply the
differential, then relabel), anything else (drop).  Coinciding targets
are summed.

Everything downstream that needs "1-simplex, then take the 0th face"
(gauge actions, equivalences) reduces to these operators, so they are
tested hard against the simplicial identities.
"""

from fractions import Fraction
from itertools import combinations

from .homalg import (
    MixedMap,
    MixedSubgroup,
    ZQComplex,
    check_level_vec,
    mixed_kernel,
    represent_subgroups,
    vec_add,
    vec_scale,
    vec_sub,
    zero_vec,
)

FR0 = Fraction(0)


# ---------------------------------------------------------------------------
# monotone surjections and monotone maps


def surjections(r, t):
    """All monotone surjections [r] ->> [t], lexicographically.

    A monotone surjection is determined by the r - t positions i >= 1
    where the value repeats, so there are binomial(r, t) of them.
    """
    if t < 0 or t > r:
        return []
    out = []
    for repeats in combinations(range(1, r + 1), r - t):
        vals = []
        v = 0
        rep = set(repeats)
        for i in range(r + 1):
            if i == 0:
                vals.append(0)
                continue
            if i not in rep:
                v += 1
            vals.append(v)
        out.append(tuple(vals))
    return sorted(out)


def all_surjections_from(r):
    for t in range(r + 1):
        for phi in surjections(r, t):
            yield phi, t


def is_monotone_map(theta, r):
    return all(0 <= v <= r for v in theta) and all(a <= b for a, b in zip(theta, theta[1:]))


def coface(i, r):
    """delta_i: [r-1] -> [r], skipping i."""
    return tuple(j if j < i else j + 1 for j in range(r))


def codegeneracy(i, r):
    """sigma_i: [r+1] -> [r], repeating i."""
    return tuple(j if j <= i else j - 1 for j in range(r + 2))


def epi_mono_factor(psi):
    """Factor a monotone map psi as iota o pi with pi epi, iota mono.

    Returns (pi, image_values); iota is the inclusion of the sorted image.
    """
    img = sorted(set(psi))
    index = {v: k for k, v in enumerate(img)}
    pi = tuple(index[v] for v in psi)
    return pi, img


# ---------------------------------------------------------------------------
# levels of the simplicial group as mixed coordinate spaces


class GammaLevel:
    """Coordinate layout of the direct sum over surjections [r] ->> [t]."""

    def __init__(self, C: ZQComplex, r: int):
        self.complex = C
        self.r = r
        self.summands = []  # (phi, t, z_off, q_off)
        z_off = q_off = 0
        for phi, t in all_surjections_from(r):
            za, qa = C.level(t)
            self.summands.append((phi, t, z_off, q_off))
            z_off += za
            q_off += qa
        self.shape = (z_off, q_off)
        self.index = {phi: k for k, (phi, t, _, _) in enumerate(self.summands)}

    def inject(self, phi, comp, out=None):
        """Add a component at summand phi into a big-level vector."""
        k = self.index[phi]
        _, t, z_off, q_off = self.summands[k]
        za, qa = self.complex.level(t)
        if out is None:
            out = zero_vec(self.shape)
        for i in range(za):
            out[z_off + i] += comp[i]
        for i in range(qa):
            out[self.shape[0] + q_off + i] += comp[za + i]
        return out

    def extract(self, vec, phi):
        k = self.index[phi]
        _, t, z_off, q_off = self.summands[k]
        za, qa = self.complex.level(t)
        return vec[z_off : z_off + za] + vec[self.shape[0] + q_off : self.shape[0] + q_off + qa]


class GammaSimplex:
    """An r-simplex: a sparse family of chain components indexed by surjections."""

    def __init__(self, C: ZQComplex, level: int, components=None):
        if C.lo != 0:
            raise ValueError("simplicial groups need nonnegatively graded complexes")
        self.complex = C
        self.level = level
        comps = {}
        for phi, comp in (components or {}).items():
            phi = tuple(phi)
            t = max(phi) if phi else 0
            if len(phi) != level + 1 or not is_monotone_map(phi, t) or set(phi) != set(range(t + 1)):
                raise ValueError(f"bad surjection index {phi} at level {level}")
            comp = check_level_vec(C.level(t), comp)
            if any(comp):
                comps[phi] = comp
        self.components = comps

    def component(self, phi):
        phi = tuple(phi)
        t = max(phi) if phi else 0
        return self.components.get(phi, zero_vec(self.complex.level(t)))

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        out = dict(self.components)
        for phi, comp in other.components.items():
            if phi in out:
                s = vec_add(out[phi], comp)
                if any(s):
                    out[phi] = s
                else:
                    del out[phi]
            else:
                out[phi] = comp
        return GammaSimplex(self.complex, self.level, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return GammaSimplex(
            self.complex, self.level, {phi: vec_scale(c, comp) for phi, comp in self.components.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, GammaSimplex)
            and self.level == other.level
            and self.complex is other.complex
            and self.components == other.components
        )

    def __repr__(self):
        return f"GammaSimplex(level={self.level}, {len(self.components)} components)"


def gamma_level_summands(C: ZQComplex, r: int):
    """The summands of level r: pairs (surjection, chain degree)."""
    if r < 0:
        raise ValueError("negative simplicial level")
    return [(phi, t) for phi, t in all_surjections_from(r)]


def apply_simplicial(theta, x: GammaSimplex) -> GammaSimplex:
    """Act by a monotone map theta: [s] -> [r] on an r-simplex."""
    r = x.level
    s = len(theta) - 1
    if not is_monotone_map(theta, r):
        raise ValueError(f"non-monotone map {theta}")
    C = x.complex
    out = {}
    for phi, comp in x.components.items():
        t = max(phi)
        psi = tuple(phi[v] for v in theta)
        pi, img = epi_mono_factor(psi)
        if img == list(range(t + 1)):
            routed = comp
        elif img == list(range(1, t + 1)):
            routed = C.differential(t).apply(comp)
            pi = tuple(pi)
        else:
            continue
        if not any(routed):
            continue
        if pi in out:
            out[pi] = vec_add(out[pi], routed)
        else:
            out[pi] = list(routed)
    return GammaSimplex(C, s, out)


def face(i, x: GammaSimplex) -> GammaSimplex:
    return apply_simplicial(coface(i, x.level), x)


def degeneracy(i, x: GammaSimplex) -> GammaSimplex:
    return apply_simplicial(codegeneracy(i, x.level), x)


def gamma_map(C: ZQComplex, theta, r) -> MixedMap:
    """The action of theta: [s] -> [r] as a MixedMap between gamma levels."""
    s = len(theta) - 1
    src = GammaLevel(C, r)
    dst = GammaLevel(C, s)
    za, qa = src.shape
    zb, qb = dst.shape
    zz = [[0] * za for _ in range(zb)]
    qz = [[FR0] * za for _ in range(qb)]
    qq = [[FR0] * qa for _ in range(qb)]
    for phi, t, z_off, q_off in src.summands:
        ta, tq = C.level(t)
        for local in range(ta + tq):
            basis = zero_vec(C.level(t))
            basis[local] = 1 if local < ta else Fraction(1)
            x = GammaSimplex(C, r, {phi: basis})
            y = apply_simplicial(theta, x)
            col = z_off + local if local < ta else za + q_off + (local - ta)
            vec = zero_vec(dst.shape)
            for psi, comp in y.components.items():
                dst.inject(psi, comp, vec)
            for i in range(zb):
                if vec[i]:
                    if local < ta:
                        zz[i][col] = int(vec[i])
                    else:
                        raise AssertionError("Q-part leaked into Z-part")
            for i in range(qb):
                v = vec[zb + i]
                if v:
                    if local < ta:
                        qz[i][col] = Fraction(v)
                    else:
                        qq[i][col - za] = Fraction(v)
    return MixedMap(src.shape, dst.shape, zz=zz, qz=qz, qq=qq)


# ---------------------------------------------------------------------------
# normalized chains: the round trip N(Gamma(C)) = C


def normalized_chains(C: ZQComplex, max_level=None) -> ZQComplex:
    """Intersection of the kernels of d_1 .. d_r at each level, with d_0.

    The canonical inclusion of C_r as the identity-surjection summand lands
    in this kernel; the Dold-Kan correspondence says it is all of it.  Both
    facts are verified here exactly, and the returned complex is expressed
    in the canonical coordinates, so it has literally the levels and
    differentials of C.
    """
    hi = C.hi if max_level is None else max_level
    levels = {}
    diffs = {}
    for r in range(0, hi + 1):
        lvl = GammaLevel(C, r)
        rows = []
        for i in range(1, r + 1):
            rows.extend(gamma_map(C, coface(i, r), r).dense_rows())
        n = lvl.shape[0] + lvl.shape[1]
        mask = [i < lvl.shape[0] for i in range(n)]
        K = mixed_kernel(rows, n, mask)
        # canonical copy of C_r: the identity-surjection summand
        ident = tuple(range(r + 1))
        za, qa = C.level(r)
        lat, sub = [], []
        for local in range(za + qa):
            basis = zero_vec(C.level(r))
            basis[local] = 1 if local < za else Fraction(1)
            vec = [Fraction(v) for v in lvl.inject(ident, basis)]
            (lat if local < za else sub).append(vec)
        canonical = MixedSubgroup(n, lat, sub)
        if not _subgroups_equal(K, canonical):
            raise AssertionError(f"normalized chains at level {r} differ from the canonical copy")
        levels[r] = C.level(r)
        if r >= 1:
            # d_0 restricted to the canonical copy is the differential of C
            ident_prev = tuple(range(r))
            zz = [[0] * za for _ in range(C.level(r - 1)[0])]
            qz = [[FR0] * za for _ in range(C.level(r - 1)[1])]
            qq = [[FR0] * qa for _ in range(C.level(r - 1)[1])]
            for local in range(za + qa):
                basis = zero_vec(C.level(r))
                basis[local] = 1 if local < za else Fraction(1)
                x = GammaSimplex(C, r, {ident: basis})
                y = apply_simplicial(coface(0, r), x)
                comp = y.component(ident_prev)
                zb, qb = C.level(r - 1)
                for i in range(zb):
                    if comp[i]:
                        if local < za:
                            zz[i][local] = int(comp[i])
                        else:
                            raise AssertionError("Q leak in normalized differential")
                for i in range(qb):
                    if comp[zb + i]:
                        if local < za:
                            qz[i][local] = Fraction(comp[zb + i])
                        else:
                            qq[i][local - za] = Fraction(comp[zb + i])
            diffs[r] = MixedMap(C.level(r), C.level(r - 1), zz=zz, qz=qz, qq=qq)
    return ZQComplex(levels, diffs, lo=0)


def _subgroups_equal(A: MixedSubgroup, B: MixedSubgroup) -> bool:
    for v in A.lattice_basis():
        if not B.contains(v):
            return False
    for w in A.w_rows:
        if not B.contains(w):
            return False
    for v in B.lattice_basis():
        if not A.contains(v):
            return False
    for w in B.w_rows:
        if not A.contains(w):
            return False
    return True


# ---------------------------------------------------------------------------
# horn filling (Moore algorithm)


def check_horn(C, n, j, faces):
    """Verify the simplicial compatibility d_i y_k = d_(k-1) y_i, i < k."""
    for i in faces:
        if faces[i].level != n - 1:
            raise ValueError(f"face {i} has level {faces[i].level}, expected {n - 1}")
    for i in sorted(faces):
        for k in sorted(faces):
            if i < k:
                lhs = face(i, faces[k])
                rhs = face(k - 1, faces[i])
                if lhs != rhs:
                    raise ValueError(f"incompatible horn: d_{i} y_{k} != d_{k-1} y_{i}")


def horn_filler(C: ZQComplex, n: int, j: int, faces: dict) -> GammaSimplex:
    """Fill a horn Lambda^n_j: faces maps i != j to compatible (n-1)-simplices.

    Uses the standard step-by-step construction for simplicial groups;
    the result's faces are verified exactly before returning.
    """
    if not (0 <= j <= n) or n < 1:
        raise ValueError("invalid horn parameters")
    expected = set(range(n + 1)) - {j}
    if set(faces) != expected:
        raise ValueError(f"horn must specify faces {sorted(expected)}")
    check_horn(C, n, j, faces)
    w = GammaSimplex(C, n, {})
    for i in range(0, j):
        w = w + degeneracy(i, faces[i] - face(i, w))
    for i in range(n, j, -1):
        w = w + degeneracy(i - 1, faces[i] - face(i, w))
    for i in expected:
        if face(i, w) != faces[i]:
            raise AssertionError(f"horn filler face {i} mismatch")
    return w


def homotopy_group(C: ZQComplex, i: int, basepoint=0):
    """pi_i of the simplicial abelian group of C equals H_i(C)."""
    return C.homology(i)
