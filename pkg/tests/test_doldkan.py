"""Simplicial abelian groups from chain complexes: identities, Kan, round trip."""

import random
from fractions import Fraction
from math import comb

import pytest

from starcech.doldkan import (
    GammaSimplex,
    apply_simplicial,
    coface,
    codegeneracy,
    degeneracy,
    face,
    gamma_level_summands,
    homotopy_group,
    horn_filler,
    normalized_chains,
    surjections,
)
from starcech.homalg import MixedGroup, MixedMap, ZQComplex

FR = Fraction


def zq_complex(levels, diffs=None):
    built = {}
    for t, spec in (diffs or {}).items():
        zz, qz, qq = spec
        built[t] = MixedMap(levels[t], levels[t - 1], zz=zz, qz=qz, qq=qq)
    return ZQComplex(levels, built, lo=0)


def z_mod_2_complex():
    return zq_complex({1: (1, 0), 0: (1, 0)}, {1: ([[2]], None, None)})


def random_complex(rng, max_levels=4, max_rank=3, bound=3):
    n_levels = rng.randint(1, max_levels)
    levels = {t: (rng.randint(0, max_rank), rng.randint(0, max_rank)) for t in range(n_levels)}
    diffs = {}
    for t in range(1, n_levels):
        if t % 2 == 1:
            za, qa = levels[t]
            zb, qb = levels[t - 1]
            zz = [[rng.randint(-bound, bound) for _ in range(za)] for _ in range(zb)]
            qz = [[FR(rng.randint(-bound, bound)) for _ in range(za)] for _ in range(qb)]
            qq = [[FR(rng.randint(-bound, bound)) for _ in range(qa)] for _ in range(qb)]
            diffs[t] = (zz, qz, qq)
    return zq_complex(levels, diffs)


def random_simplex(rng, C, r, bound=3):
    comps = {}
    for phi, t in gamma_level_summands(C, r):
        za, qa = C.level(t)
        if za + qa == 0 or rng.random() < 0.4:
            continue
        vec = [rng.randint(-bound, bound) for _ in range(za)] + [
            FR(rng.randint(-bound, bound), rng.randint(1, 2)) for _ in range(qa)
        ]
        comps[phi] = vec
    return GammaSimplex(C, r, comps)


def test_surjection_counts():
    for r in range(6):
        for t in range(r + 1):
            assert len(surjections(r, t)) == comb(r, t)
    assert surjections(2, 1) == [(0, 0, 1), (0, 1, 1)]


def test_level_summands_match_paper_example():
    C = zq_complex({0: (1, 0), 1: (1, 0), 2: (1, 0)})
    degs = [t for _, t in gamma_level_summands(C, 2)]
    assert sorted(degs) == [0, 1, 1, 2]
    assert [t for _, t in gamma_level_summands(C, 0)] == [0]
    # complex in degree 0 only: single surviving summand per level
    C0 = zq_complex({0: (1, 0)})
    for r in range(4):
        live = [(phi, t) for phi, t in gamma_level_summands(C0, r) if C0.level(t) != (0, 0)]
        assert len(live) == 1


def test_explicit_faces_level_one():
    # d1(x0, x01) = x0;  d0(x0, x01) = x0 + d_C x01;  s0(x0) = (x0, 0)
    C = z_mod_2_complex()
    x = GammaSimplex(C, 1, {(0, 0): [5], (0, 1): [3]})
    d1 = face(1, x)
    assert d1.component((0,)) == [5]
    d0 = face(0, x)
    assert d0.component((0,)) == [5 + 2 * 3]
    s = degeneracy(0, GammaSimplex(C, 0, {(0,): [7]}))
    assert s.component((0, 0)) == [7]
    assert s.component((0, 1)) == [0]


def test_explicit_faces_level_two():
    # paper labelling: x0 at (0,0,0), x01 at (0,1,1), x12' at (0,0,1),
    # x012 at (0,1,2); then d2 = (x0, x01), d1 = (x0, x01 + x12'),
    # d0 = (x0 + d x01, x12' + d x012)
    C = z_mod_2_complex()
    x0, x01, x12 = [2], [4], [3]
    x = GammaSimplex(C, 2, {(0, 0, 0): x0, (0, 1, 1): x01, (0, 0, 1): x12})
    d2 = face(2, x)
    assert d2.component((0, 0)) == x0
    assert d2.component((0, 1)) == x01
    d1 = face(1, x)
    assert d1.component((0, 0)) == x0
    assert d1.component((0, 1)) == [x01[0] + x12[0]]
    d0 = face(0, x)
    assert d0.component((0, 0)) == [x0[0] + 2 * x01[0]]
    assert d0.component((0, 1)) == x12


def test_simplicial_identities_random():
    rng = random.Random(3)
    for trial in range(12):
        C = random_complex(rng)
        for r in range(1, 6):
            x = random_simplex(rng, C, r)
            # d_i d_j = d_(j-1) d_i for i < j
            for j in range(1, r + 1):
                for i in range(j):
                    if r >= 2:
                        assert face(i, face(j, x)) == face(j - 1, face(i, x)), (r, i, j)
            # s_i s_j = s_(j+1) s_i for i <= j
            for j in range(r + 1):
                for i in range(j + 1):
                    assert degeneracy(i, degeneracy(j, x)) == degeneracy(j + 1, degeneracy(i, x))
            # d_i s_j relations
            for j in range(r + 1):
                for i in range(r + 2):
                    ds = face(i, degeneracy(j, x))
                    if i == j or i == j + 1:
                        assert ds == x, (r, i, j)
                    elif i < j:
                        assert ds == degeneracy(j - 1, face(i, x))
                    else:
                        assert ds == degeneracy(j, face(i - 1, x))


def test_contravariant_functoriality():
    rng = random.Random(5)
    for _ in range(10):
        C = random_complex(rng)
        r = rng.randint(1, 4)
        x = random_simplex(rng, C, r)
        s = rng.randint(0, r)
        u = rng.randint(0, s)
        theta = tuple(sorted(rng.randint(0, r) for _ in range(s + 1)))
        theta2 = tuple(sorted(rng.randint(0, s) for _ in range(u + 1)))
        composite = tuple(theta[v] for v in theta2)
        assert apply_simplicial(theta2, apply_simplicial(theta, x)) == apply_simplicial(composite, x)


def test_non_monotone_rejected():
    C = z_mod_2_complex()
    x = GammaSimplex(C, 1, {(0, 0): [1]})
    with pytest.raises(ValueError, match="monotone"):
        apply_simplicial((1, 0), x)


def test_normalized_chains_round_trip_small():
    # C concentrated in degree 0
    C = zq_complex({0: (1, 1)})
    N = normalized_chains(C, max_level=3)
    assert N.level(0) == (1, 1)
    # C = Z --2--> Z reproduces itself
    C = z_mod_2_complex()
    N = normalized_chains(C, max_level=3)
    assert N.level(1) == (1, 0) and N.level(0) == (1, 0)
    assert N.differential(1).zz == [[2]]


def test_normalized_chains_round_trip_random():
    rng = random.Random(7)
    for _ in range(8):
        C = random_complex(rng, max_levels=3, max_rank=2)
        N = normalized_chains(C, max_level=C.hi + 1)
        for t in range(C.hi + 1):
            assert N.level(t) == C.level(t)
        for t in range(1, C.hi + 1):
            d, e = N.differential(t), C.differential(t)
            assert d.zz == e.zz and d.qz == e.qz and d.qq == e.qq


def test_horn_fillers_random():
    rng = random.Random(11)
    filled = 0
    for _ in range(40):
        C = random_complex(rng, max_levels=4, max_rank=2)
        n = rng.randint(1, 4)
        j = rng.randint(0, n)
        # generate a compatible horn as the boundary of a random simplex
        w = random_simplex(rng, C, n)
        faces = {i: face(i, w) for i in range(n + 1) if i != j}
        filler = horn_filler(C, n, j, faces)
        for i in range(n + 1):
            if i != j:
                assert face(i, filler) == faces[i]
        filled += 1
    assert filled == 40


def test_horn_zero_and_inner_composition():
    C = z_mod_2_complex()
    # all-zero horn has the zero filler's faces
    zero_faces = {0: GammaSimplex(C, 1, {}), 2: GammaSimplex(C, 1, {})}
    filler = horn_filler(C, 2, 1, zero_faces)
    assert face(0, filler).is_zero() and face(2, filler).is_zero()

    # inner horn made of two composable 1-simplices (x0, a) and (x0 + da, b):
    # the composite face d_1 is (x0, a + b)
    x0, a, b = [3], [2], [5]
    f = GammaSimplex(C, 1, {(0, 0): x0, (0, 1): a})
    x1 = [x0[0] + 2 * a[0]]
    g = GammaSimplex(C, 1, {(0, 0): x1, (0, 1): b})
    filler = horn_filler(C, 2, 1, {0: g, 2: f})
    d1 = face(1, filler)
    assert d1.component((0, 0)) == x0
    assert d1.component((0, 1)) == [a[0] + b[0]]


def test_incompatible_horn_rejected():
    C = z_mod_2_complex()
    f = GammaSimplex(C, 1, {(0, 0): [1]})
    g = GammaSimplex(C, 1, {(0, 0): [2]})
    with pytest.raises(ValueError, match="incompatible"):
        horn_filler(C, 2, 1, {0: f, 2: g})


def test_homotopy_groups_equal_homology():
    C = zq_complex({1: (1, 0), 0: (0, 0)})
    assert homotopy_group(C, 1) == MixedGroup(free_rank=1)
    assert homotopy_group(C, 0) == MixedGroup()
    C = z_mod_2_complex()
    assert homotopy_group(C, 0) == MixedGroup(torsion=(2,))
    rng = random.Random(13)
    for _ in range(5):
        X = random_complex(rng)
        for i in range(X.hi + 1):
            assert homotopy_group(X, i) == X.homology(i)
