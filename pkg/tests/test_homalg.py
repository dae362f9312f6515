"""Mixed Z/Q chain complexes: homology, truncation, shift, induced maps."""

import random
from fractions import Fraction

import pytest

from starcech.homalg import (
    ChainMap,
    DoubleComplexZQ,
    MixedGroup,
    MixedMap,
    MixedSubgroup,
    MixedQuotient,
    ZQComplex,
    homology_map,
    shift,
    truncate_nonneg,
)

FR = Fraction


def zq_complex(levels, diffs=None, lo=None):
    diffs = diffs or {}
    built = {}
    for t, spec in diffs.items():
        zz, qz, qq = spec
        built[t] = MixedMap(levels[t], levels[t - 1], zz=zz, qz=qz, qq=qq)
    return ZQComplex(levels, built, lo=min(levels) if lo is None else lo)


def test_mixedgroup_rendering_and_sum():
    g = MixedGroup(free_rank=2, torsion=(2, 4), q_dim=1, torus_rank=3)
    assert str(g) == "Z^2 ⊕ Z/2 ⊕ Z/4 ⊕ Q ⊕ (Q/Z)^3"
    assert str(MixedGroup()) == "0"
    assert MixedGroup(torsion=(2,)).direct_sum(MixedGroup(torsion=(3,))) == MixedGroup(torsion=(6,))
    assert MixedGroup(torsion=(2,)).direct_sum(MixedGroup(torsion=(4,))) == MixedGroup(torsion=(2, 4))
    with pytest.raises(ValueError):
        MixedGroup(torsion=(4, 2))


def test_mixed_quotient_q_mod_z():
    # Q / Z inside ambient Q^1
    big = MixedSubgroup(1, subspace=[[1]])
    small = MixedSubgroup(1, lattice=[[1]])
    q = MixedQuotient(big, small)
    assert q.group == MixedGroup(torus_rank=1)
    c = q.coords([FR(1, 3)])
    assert c.torus == (FR(1, 3),) or c.torus == (FR(2, 3),)
    assert q.coords([FR(5)]).is_zero


def test_mixed_quotient_fg_nonzero_class():
    big = MixedSubgroup(2, lattice=[[1, 0], [0, 1]])
    small = MixedSubgroup(2, lattice=[[2, 0], [0, 3]])
    q = MixedQuotient(big, small)
    c = q.coords([1, 1])
    assert c.torsion and c.torsion[0] % 6 != 0


def test_mixed_quotient_fg():
    # Z^2 / span{(2,0),(0,3)} = Z/2 + Z/3 = Z/6
    big = MixedSubgroup(2, lattice=[[1, 0], [0, 1]])
    small = MixedSubgroup(2, lattice=[[2, 0], [0, 3]])
    q = MixedQuotient(big, small)
    assert q.group == MixedGroup(torsion=(6,))
    assert q.coords([1, 1]).is_zero is False
    assert q.coords([2, 0]).is_zero
    assert q.coords([2, 3]).is_zero
    assert q.coords([0, 1]).is_zero is False


def test_mixed_quotient_mixed_shape():
    # (Z + Q)/(Z diag) in ambient Q^2: classes (a, q) ~ (a+n, q+n)
    big = MixedSubgroup(2, lattice=[[1, 0]], subspace=[[0, 1]])
    small = MixedSubgroup(2, lattice=[[1, 1]])
    q = MixedQuotient(big, small)
    # quotient is isomorphic to Q: the free part is absorbed
    assert q.group == MixedGroup(q_dim=1)


def test_homology_z_into_q():
    # Z --iota--> Q in degrees 1 -> 0: H0 = Q/Z, H1 = 0
    X = zq_complex(
        {1: (1, 0), 0: (0, 1)},
        {1: ([], [[FR(1)]], [[]] * 1)},
    )
    assert X.homology(0) == MixedGroup(torus_rank=1)
    assert X.homology(1) == MixedGroup()


def test_homology_multiplication_by_two():
    X = zq_complex({1: (1, 0), 0: (1, 0)}, {1: ([[2]], [], [])})
    assert X.homology(0) == MixedGroup(torsion=(2,))
    assert X.homology(1) == MixedGroup()


def test_homology_zero_differential():
    X = zq_complex({0: (2, 1), 1: (1, 2)})
    assert X.homology(0) == MixedGroup(free_rank=2, q_dim=1)
    assert X.homology(1) == MixedGroup(free_rank=1, q_dim=2)
    assert X.homology(5) == MixedGroup()
    assert X.homology(-3) == MixedGroup()


def random_zq_complex(rng, max_levels=4, max_rank=3, bound=3):
    """Random valid ZQComplex built by composing two random 'halves'.

    To guarantee D o D = 0 we use block differentials of the form
    D_t = 0 except between consecutive pairs, generated independently.
    """
    n_levels = rng.randint(1, max_levels)
    levels = {t: (rng.randint(0, max_rank), rng.randint(0, max_rank)) for t in range(n_levels)}
    diffs = {}
    # alternate: nonzero differentials only from odd degrees, so D o D = 0
    for t in range(1, n_levels):
        if t % 2 == 1:
            za, qa = levels[t]
            zb, qb = levels[t - 1]
            zz = [[rng.randint(-bound, bound) for _ in range(za)] for _ in range(zb)]
            qz = [[FR(rng.randint(-bound, bound)) for _ in range(za)] for _ in range(qb)]
            qq = [[FR(rng.randint(-bound, bound), rng.randint(1, 2)) for _ in range(qa)] for _ in range(qb)]
            diffs[t] = (zz, qz, qq)
    return zq_complex(levels, diffs)


def test_homology_acyclic_cone_invariance():
    rng = random.Random(5)
    for _ in range(10):
        X = random_zq_complex(rng)
        # direct sum with an acyclic two-term cone Z --1--> Z at degrees 1, 0
        levels = {t: X.level(t) for t in range(min(X.lo, 0), max(X.hi, 1) + 1)}
        za0, qa0 = levels[0]
        za1, qa1 = levels[1]
        levels[0] = (za0 + 1, qa0)
        levels[1] = (za1 + 1, qa1)
        diffs = {}
        for t in range(min(X.lo, 0) + 1, max(X.hi, 1) + 1):
            d = X.differential(t)
            zz = [list(r) for r in d.zz]
            qz = [list(r) for r in d.qz]
            qq = [list(r) for r in d.qq]
            if t == 1:
                # source and target both gain a Z coordinate; cone entry 1
                zz = [r + [0] for r in zz] + [[0] * za1 + [1]]
                qz = [r + [FR(0)] for r in qz]
            elif t == 2:
                # target level 1 gained a Z coordinate: zero row
                zz = zz + [[0] * X.level(2)[0]]
            diffs[t] = (zz, qz, qq)
        Y = zq_complex(levels, diffs)
        for i in range(-1, max(X.hi, 1) + 2):
            assert X.homology(i) == Y.homology(i), f"degree {i}"


def test_truncate_nonneg_examples():
    # identity on nonnegatively supported complexes
    X = zq_complex({0: (1, 0), 1: (1, 1)})
    assert truncate_nonneg(X) is X

    # Q --id--> Q in degrees 0, -1: zero complex in degree 0
    X = zq_complex({0: (0, 1), -1: (0, 1)}, {0: ([], [], [[FR(1)]])})
    T = truncate_nonneg(X)
    assert T.level(0) == (0, 0)
    assert T.homology(0) == MixedGroup()

    # Z --2--> Z in degrees 0, -1: cycles at 0 are trivial, H0 = 0
    # (the spec example text says H0 = Z, which contradicts its own
    # postcondition H_i(tau X) = H_i(X) for i >= 0; the kernel computation
    # gives ker(2: Z -> Z) = 0)
    X = zq_complex({0: (1, 0), -1: (1, 0)}, {0: ([[2]], [], [])})
    T = truncate_nonneg(X)
    assert T.homology(0) == X.homology(0) == MixedGroup()


def test_truncate_preserves_homology():
    rng = random.Random(9)
    for _ in range(10):
        X = random_zq_complex(rng)
        # shift down so some degrees are negative
        Xdown = zq_complex(
            {t - 2: X.level(t) for t in range(X.lo, X.hi + 1)},
            {
                t - 2: (X.differential(t).zz, X.differential(t).qz, X.differential(t).qq)
                for t in range(X.lo + 1, X.hi + 1)
            },
        )
        T = truncate_nonneg(Xdown)
        for i in range(0, Xdown.hi + 2):
            assert T.homology(i) == Xdown.homology(i), f"degree {i}"
        assert all(T.homology(i) == MixedGroup() for i in range(T.lo - 2, 0))


def test_shift():
    rng = random.Random(13)
    X = random_zq_complex(rng)
    assert shift(X, 0).levels == X.levels
    Y = shift(X, 2)
    for i in range(X.lo, X.hi + 1):
        assert Y.homology(i + 2) == X.homology(i)
    Z = zq_complex({0: (1, 0)})
    assert shift(Z, 2).level(2) == (1, 0)


def test_homology_map_identity_and_zero():
    rng = random.Random(17)
    X = random_zq_complex(rng)
    ident = ChainMap(X, X, {t: MixedMap.identity(X.level(t)) for t in range(X.lo, X.hi + 1)})
    zero = ChainMap(X, X, {})
    for i in range(X.lo, X.hi + 1):
        rep = homology_map(ident, i)
        assert rep.isomorphism, f"identity not iso at {i}: ker {rep.kernel}, coker {rep.cokernel}"
        repz = homology_map(zero, i)
        assert repz.kernel == X.homology(i)
        assert repz.cokernel == X.homology(i)


def test_homology_map_composition():
    # maps (Z -2-> Z) -> (Z -1-> Z): composition of induced maps
    X = zq_complex({1: (1, 0), 0: (1, 0)}, {1: ([[2]], [], [])})
    Y = zq_complex({1: (1, 0), 0: (1, 0)}, {1: ([[1]], [], [])})
    f = ChainMap(
        X,
        Y,
        {
            1: MixedMap((1, 0), (1, 0), zz=[[2]]),
            0: MixedMap((1, 0), (1, 0), zz=[[1]]),
        },
    )
    rep = homology_map(f, 0)
    # H0(X) = Z/2 -> H0(Y) = 0
    assert rep.source == MixedGroup(torsion=(2,))
    assert rep.target == MixedGroup()
    assert rep.surjective and not rep.injective


def test_chain_map_validation():
    X = zq_complex({1: (1, 0), 0: (1, 0)}, {1: ([[2]], [], [])})
    Y = zq_complex({1: (1, 0), 0: (1, 0)}, {1: ([[3]], [], [])})
    with pytest.raises(ValueError, match="degree 1"):
        ChainMap(X, Y, {t: MixedMap.identity((1, 0)) for t in (0, 1)})


def two_row_double_complex():
    # rows: Z at degree 1, Q at degree 0, one column each, iota vertical
    rows = [
        {"degree": 1, "kind": "Z", "dims": {0: 1}},
        {"degree": 0, "kind": "Q", "dims": {0: 1}},
    ]
    vert = {(0, 0): [[1]]}
    return DoubleComplexZQ(rows, {}, vert)


def test_total_complex_two_rows():
    D = two_row_double_complex()
    X = D.total_complex()
    assert X.level(1) == (1, 0)
    assert X.level(0) == (0, 1)
    assert X.homology(0) == MixedGroup(torus_rank=1)


def test_total_complex_single_row_regrading():
    rows = [{"degree": 2, "kind": "Q", "dims": {0: 2, 1: 1}}]
    horiz = {(0, 0): [[FR(1), FR(-1)]]}
    D = DoubleComplexZQ(rows, horiz, {})
    X = D.total_complex()
    assert X.level(2) == (0, 2)
    assert X.level(1) == (0, 1)
    assert X.homology(2) == MixedGroup(q_dim=1)
    assert X.homology(1) == MixedGroup()


def test_total_complex_commutation_failure():
    rows = [
        {"degree": 1, "kind": "Q", "dims": {0: 1, 1: 1}},
        {"degree": 0, "kind": "Q", "dims": {0: 1, 1: 1}},
    ]
    horiz = {(0, 0): [[FR(1)]], (1, 0): [[FR(1)]]}
    vert = {(0, 0): [[FR(1)]], (0, 1): [[FR(2)]]}
    with pytest.raises(ValueError, match="column 0"):
        DoubleComplexZQ(rows, horiz, vert)


def test_euler_characteristic_zero_differential():
    rng = random.Random(21)
    for _ in range(10):
        levels = {t: (rng.randint(0, 3), rng.randint(0, 3)) for t in range(3)}
        X = zq_complex(levels)
        chi_levels = sum((-1) ** t * (X.level(t)[0] + X.level(t)[1]) for t in range(3))
        chi_hom = 0
        for t in range(3):
            h = X.homology(t)
            chi_hom += (-1) ** t * (h.free_rank + h.q_dim + h.torus_rank)
        assert chi_levels == chi_hom
