import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import polys
from secantcat.errors import ModeUnsupported, RingMismatch
from secantcat.exactpoly import GF, PolyRing
from secantcat.groebner import Ideal, ideal_equal, ideal_member
from secantcat.multisym import (
    ConfigRing,
    TwistedProjector,
    act,
    all_perms,
    alternating_family,
    alternating_piece,
    compose,
    diagonal_ideal,
    diagonal_substitutions,
    from_cycles,
    ideal_Jd,
    minimal_alternating_degree,
    pair_diagonal_ideal,
    project,
    sign,
    triple_product,
    verify_Jd_equals_diagonal,
    verify_mappoly,
    verify_product_triple,
)


def vandermonde(cfg):
    x = cfg.x
    out = cfg.ring.one
    for a, b in itertools.combinations(range(1, cfg.d + 1), 2):
        out = out * (x(1, a) - x(1, b))
    return out


# permutations and the action ---------------------------------------------


def test_sign_brute_force():
    for d in range(1, 6):
        for p in all_perms(d):
            inversions = sum(1 for i, j in itertools.combinations(range(d), 2) if p[i] > p[j])
            assert sign(p) == (-1) ** inversions


def test_act_examples():
    c12 = ConfigRing(1, 2)
    assert act(from_cycles(2, (1, 2)), c12.x(1, 1), c12) == c12.x(1, 2)
    c23 = ConfigRing(2, 3)
    f = c23.x(1, 1) * c23.x(2, 2)
    assert act((0, 1, 2), f, c23) == f
    assert act(from_cycles(3, (1, 2, 3)), f, c23) == c23.x(1, 2) * c23.x(2, 3)


def test_act_ring_mismatch():
    with pytest.raises(RingMismatch):
        act((1, 0), PolyRing(["a"])("a"), ConfigRing(1, 2))


def test_project_examples():
    c = ConfigRing(1, 2)
    x = c.x
    assert project(x(1, 1), TwistedProjector(c, 1)) == (x(1, 1) - x(1, 2)).scale("1/2")
    assert project(x(1, 1), TwistedProjector(c, 0)) == (x(1, 1) + x(1, 2)).scale("1/2")
    c2 = ConfigRing(2, 2)
    x = c2.x
    det = x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)
    assert project(det, TwistedProjector(c2, 1)) == det


def test_project_small_characteristic():
    c = ConfigRing(1, 3, GF(3))
    with pytest.raises(ModeUnsupported):
        project(c.x(1, 1), TwistedProjector(c, 1))
    c5 = ConfigRing(1, 3, GF(5))
    assert not project(vandermonde(c5), TwistedProjector(c5, 1)).is_zero()


def test_alternating_family_examples():
    fam = alternating_family(ConfigRing(1, 2), 1)
    c = fam.config
    assert len(fam.members) == 1
    assert ideal_equal(Ideal(c.ring, fam.members), Ideal(c.ring, [c.x(1, 1) - c.x(1, 2)]))
    assert alternating_family(ConfigRing(1, 3), 2).members == []
    assert alternating_piece(ConfigRing(3, 3), 1).rank == 0


def test_ideal_Jd_examples():
    c = ConfigRing(1, 2)
    assert ideal_equal(ideal_Jd(c, 1), Ideal(c.ring, [c.x(1, 1) - c.x(1, 2)]))
    c = ConfigRing(1, 3)
    assert ideal_equal(ideal_Jd(c, 3), diagonal_ideal(c))
    assert ideal_member(vandermonde(c), ideal_Jd(c, 3))
    c = ConfigRing(2, 2)
    target = Ideal(c.ring, [c.x(1, 1) - c.x(1, 2), c.x(2, 1) - c.x(2, 2)])
    assert ideal_equal(ideal_Jd(c, 1), target)


def test_diagonal_ideal_examples():
    c = ConfigRing(1, 2)
    assert ideal_equal(diagonal_ideal(c), Ideal(c.ring, [c.x(1, 1) - c.x(1, 2)]))
    c = ConfigRing(1, 3)
    assert ideal_equal(diagonal_ideal(c), Ideal(c.ring, [vandermonde(c)]))
    c = ConfigRing(2, 2)
    assert ideal_equal(diagonal_ideal(c), Ideal(c.ring, [c.x(1, 1) - c.x(1, 2), c.x(2, 1) - c.x(2, 2)]))


def test_J2_equals_diagonal_n2():
    c = ConfigRing(2, 2)
    assert ideal_equal(ideal_Jd(c, 2), diagonal_ideal(c))


@pytest.mark.parametrize("n,d,D", [(1, 3, 3), (2, 2, 1), (1, 2, 1)])
def test_check_diagonal_witness(n, d, D):
    cert = verify_Jd_equals_diagonal(ConfigRing(n, d))
    assert cert.all_true
    assert cert.details["witness_D"] == D and cert.details["status"] == "SUCCESS"


def test_check_diagonal_inconclusive_below_generation_degree():
    cert = verify_Jd_equals_diagonal(ConfigRing(1, 3), Dmax=2)
    assert cert.verdicts["equal"] == "inconclusive"
    assert cert.details["status"] == "INCONCLUSIVE(2)"


def test_product_triple_small():
    cert = verify_product_triple(ConfigRing(1, 3))
    assert cert.all_true and cert.details["witness_D"] == {"111": 3}
    cert = verify_product_triple(ConfigRing(2, 3), Dmax=6)
    assert cert.all_true and cert.details["witness_D"]["112"] <= 6


def test_triple_product_vanishes_on_diagonals():
    c = ConfigRing(2, 3)
    for t in itertools.product((1, 2), repeat=3):
        f = triple_product(c, *t)
        for _, images in diagonal_substitutions(c):
            assert f.apply_ring_map(images).is_zero()


def test_mappoly_hand_example():
    cert = verify_mappoly(ConfigRing(1, 2), 2, 2)
    assert cert.all_true
    assert cert.details["degrees"][2]["dims"] == [1, 1, 1]
    assert cert.details["degrees"][0]["dims"] == [0, 0, 0]


def test_mappoly_n2_degree2():
    cert = verify_mappoly(ConfigRing(2, 2), 2, 2)
    dims = cert.details["degrees"][2]["dims"]
    assert cert.all_true and dims[0] == dims[1] == dims[2] > 0


def test_mappoly_ell_one_below_minimal_degree():
    cert = verify_mappoly(ConfigRing(1, 3), 1, 2)
    assert all(row["dims"] == [0, 0, 0] for row in cert.details["degrees"])


def partitions_in_box(total, parts, largest):
    """Brute-force count of multisets of ``parts`` integers in [0, largest]
    summing to ``total``."""
    return sum(1 for c in itertools.combinations_with_replacement(range(largest + 1), parts) if sum(c) == total)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_alternating_dims_n1(d):
    # alternating = Vandermonde times symmetric: count exponents of the
    # symmetric cofactor, i.e. partitions with at most d parts
    c = ConfigRing(1, d)
    v = d * (d - 1) // 2
    for e in range(v + 4):
        expected = partitions_in_box(e - v, d, e - v) if e >= v else 0
        assert alternating_piece(c, e).rank == expected
    assert minimal_alternating_degree(c) == v


# properties ---------------------------------------------------------------

CFGS = {(n, d): ConfigRing(n, d) for n in (1, 2) for d in (2, 3, 4)}


def config_and_poly(max_deg=3):
    return st.sampled_from(sorted(CFGS)).flatmap(
        lambda k: st.tuples(st.just(CFGS[k]), polys(CFGS[k].ring, max_terms=3, max_deg=max_deg)))


@given(config_and_poly(), st.integers(0, 3))
def test_projector_equivariant_and_idempotent(cp, twist):
    cfg, f = cp
    P = TwistedProjector(cfg, twist)
    g = project(f, P)
    for sigma in all_perms(cfg.d):
        expected = g if twist % 2 == 0 or sign(sigma) > 0 else -g
        assert act(sigma, g, cfg) == expected
    assert project(g, P) == g


@given(config_and_poly(), config_and_poly())
def test_projector_linear(a, b):
    cfg, f = a
    g = b[1] if b[0] is cfg else cfg.ring.zero
    P = TwistedProjector(cfg, 1)
    assert project(f + g.scale(3), P) == project(f, P) + project(g, P).scale(3)


@given(st.sampled_from([2, 3, 4]).flatmap(lambda d: st.tuples(
    st.just(d), st.permutations(range(d)), st.permutations(range(d)))), st.data())
def test_action_is_homomorphism(dst, data):
    d, s, t = dst
    cfg = CFGS[(2, d)]
    f = data.draw(polys(cfg.ring, max_terms=3))
    g = data.draw(polys(cfg.ring, max_terms=3))
    s, t = tuple(s), tuple(t)
    assert act(compose(s, t), f, cfg) == act(s, act(t, f, cfg), cfg)
    assert act(s, f * g, cfg) == act(s, f, cfg) * act(s, g, cfg)
    assert sign(compose(s, t)) == sign(s) * sign(t)


@pytest.mark.parametrize("n,d,D", [(1, 2, 3), (1, 3, 4), (2, 2, 3), (2, 3, 4), (3, 3, 3)])
def test_family_vanishes_on_pair_diagonals(n, d, D):
    cfg = ConfigRing(n, d)
    fam = alternating_family(cfg, D)
    for g in fam.members:
        for sigma in all_perms(d):
            assert act(sigma, g, cfg) == (g if sign(sigma) > 0 else -g)
        for _, images in diagonal_substitutions(cfg):
            assert g.apply_ring_map(images).is_zero()


@pytest.mark.parametrize("n,d", [(1, 3), (2, 3), (1, 4)])
def test_diagonal_ideal_is_stable(n, d):
    cfg = ConfigRing(n, d)
    I = diagonal_ideal(cfg)
    for g in I.gens:
        for sigma in all_perms(d):
            assert ideal_member(act(sigma, g, cfg), I)


def sympy_intersection(ideals, syms):
    """I_1 ∩ I_2 ∩ ... by the t-trick, computed entirely in sympy."""
    import sympy

    t = sympy.Symbol("t_aux")
    current = ideals[0]
    for other in ideals[1:]:
        gens = [t * f for f in current] + [(1 - t) * g for g in other]
        G = sympy.groebner(gens, t, *syms, order="lex")
        current = [g for g in G.exprs if t not in g.free_symbols]
    return sympy.groebner(current, *syms, order="grevlex").exprs


@pytest.mark.parametrize("n", [2, 3])
def test_J3_equals_diagonal_sympy_oracle(n):
    import sympy

    from oracles import sympy_reduced_gb, sympy_syms, to_sympy

    cfg = ConfigRing(n, 3)
    syms = sympy_syms(cfg.ring)
    pairs = [[to_sympy(g, syms) for g in pair_diagonal_ideal(cfg, a, b).gens]
             for a, b in itertools.combinations((1, 2, 3), 2)]
    diag = sympy_intersection(pairs, syms)
    J = ideal_Jd(cfg, 3)
    jgb = [to_sympy(g, syms) for g in sympy_reduced_gb(J.gens, cfg.ring)]
    assert sorted(map(str, (sympy.expand(g) for g in jgb))) == sorted(map(str, (sympy.expand(g) for g in diag)))
    assert [to_sympy(g, syms) for g in J.groebner()] == jgb
