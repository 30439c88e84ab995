import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from oracles import sympy_syms, to_sympy
from secantcat.errors import ParseError, UnsupportedProvenance
from secantcat.groebner import Ideal, graded_piece, ideal_equal, ideal_member
from secantcat.sections import (
    _bareiss_poly_det,
    build_catalecticant,
    minor_values,
    minors,
    minors_ideal,
    model_p1,
    model_user_table,
    model_veronese,
    rank_profile,
    read_user_table,
    variety_ideal,
)


def texts(C):
    return [[str(f) for f in row] for row in C.entries]


def test_p1_hankel_examples():
    assert texts(build_catalecticant(model_p1(2, 2))) == [
        ["z_0", "z_1", "z_2"], ["z_1", "z_2", "z_3"], ["z_2", "z_3", "z_4"]]
    assert texts(build_catalecticant(model_p1(1, 1))) == [["z_0", "z_1"], ["z_1", "z_2"]]
    C = build_catalecticant(model_p1(1, 3))
    assert C.shape == (2, 4)
    assert all(str(C.entries[i][j]) == f"z_{i + j}" for i in range(2) for j in range(4))


def test_model_dimensions():
    for a, b in [(0, 0), (1, 4), (3, 2)]:
        m = model_p1(a, b)
        assert (m.dimA, m.dimB, m.dimL) == (a + 1, b + 1, a + b + 1)
    m = model_veronese(2, 2, 2)
    assert (m.dimA, m.dimL) == (6, 15)


def test_veronese_examples():
    assert texts(build_catalecticant(model_veronese(1, 1, 1))) == texts(build_catalecticant(model_p1(1, 1)))
    assert texts(build_catalecticant(model_veronese(1, 2, 2))) == texts(build_catalecticant(model_p1(2, 2)))
    C = build_catalecticant(model_veronese(2, 1, 1))
    assert C.shape == (3, 3) and C.is_symmetric() and C.ring.nvars == 6
    entries = {str(f) for row in C.entries for f in row}
    assert entries == {f"z_{g}" for g in range(6)}
    assert build_catalecticant(model_veronese(2, 2, 2)).is_symmetric()


def test_builtin_tables_are_01():
    for m in (model_p1(2, 3), model_veronese(2, 1, 2)):
        for row in m.mult.values():
            assert list(row.values()) == [1]


def test_user_table():
    m = model_user_table(1, 1, 3, {(0, 0): {0: 2, 2: mpq(-1, 3)}})
    C = build_catalecticant(m)
    assert C.shape == (1, 1) and str(C.entries[0][0]) == "2*z_0 - 1/3*z_2"
    with pytest.raises(UnsupportedProvenance):
        variety_ideal(m)
    text = "sections: a=2 b=2 l=3\n0 0 : z_0\n0 1 : z_1\n1 0 : z_1\n1 1 : z_2\n"
    assert texts(build_catalecticant(read_user_table(text))) == texts(build_catalecticant(model_p1(1, 1)))
    for bad in ["sections: a=1\n", "sections: a=1 b=1 l=1\n0 0 : z_0^2\n", "sections: a=1 b=1 l=1\nx\n"]:
        with pytest.raises(ParseError):
            read_user_table(bad)
    with pytest.raises(ValueError):
        model_user_table(1, 1, 1, {(1, 0): {0: 1}})


def test_minors_examples():
    C = build_catalecticant(model_p1(1, 1))
    (m,) = minors(C, 2)
    assert m in (C.ring("z_0*z_2 - z_1^2"), C.ring("z_1^2 - z_0*z_2"))
    H = build_catalecticant(model_p1(2, 2))
    assert len(minors_ideal(H, 3).gens) == 1
    quartic = minors_ideal(build_catalecticant(model_p1(1, 3)), 2)
    assert ideal_equal(quartic, variety_ideal(model_p1(2, 2)).ideal)


def test_minors_match_sympy_determinants():
    H = build_catalecticant(model_p1(3, 3))
    syms = sympy_syms(H.ring)
    M = sympy.Matrix([[to_sympy(f, syms) for f in row] for row in H.entries])
    assert sympy.expand(to_sympy(minors(H, 4)[0], syms) - M.det()) == 0
    assert sympy.expand(to_sympy(_bareiss_poly_det(H.entries, H.ring), syms) - M.det()) == 0


def test_large_minor_uses_fraction_free_route():
    H = build_catalecticant(model_p1(6, 6))
    det = minors(H, 7)[0]
    # evaluate at an integer point and compare with a scalar determinant
    point = [random.Random(3).randint(-3, 3) for _ in range(13)]
    assert det.evaluate(point) == minor_values(H, 7, point)[0]


def test_variety_ideal_examples():
    conic = variety_ideal(model_p1(1, 1)).ideal
    assert ideal_equal(conic, Ideal(conic.ring, [conic.ring("z_0*z_2 - z_1^2")]))
    surf = variety_ideal(model_veronese(2, 1, 1))
    assert surf.method == "Elimination"
    assert graded_piece(surf.ideal, 2).dim == 6
    assert graded_piece(surf.ideal, 1).dim == 0


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)])
def test_rational_normal_curve_presentation(a, b):
    lhs = variety_ideal(model_p1(a, b)).ideal
    rhs = minors_ideal(build_catalecticant(model_p1(1, a + b - 1)), 2)
    assert ideal_equal(lhs, rhs)


@pytest.mark.parametrize("model", [model_p1(2, 2), model_veronese(2, 1, 1), model_veronese(1, 1, 2)])
def test_parametrization_consistency(model):
    I = variety_ideal(model).ideal
    rng = random.Random(0)
    for _ in range(5):
        pt = model.point([rng.randint(-5, 5) for _ in model.param_names])
        assert all(g.evaluate(pt) == 0 for g in I.gens)


def test_rank_profile_examples():
    H = build_catalecticant(model_p1(2, 2))
    assert rank_profile(H, [1] * 5) == 1
    assert rank_profile(H, [1, 0, 0, 0, 1]) == 2
    assert rank_profile(H, [0] * 5) == 0


def test_laplace_identity_for_minors():
    # every 3-minor is a combination of 2-minors with linear coefficients
    H = build_catalecticant(model_p1(2, 2))
    two = minors_ideal(H, 2)
    for f in minors(H, 3):
        assert ideal_member(f, two)


def test_minors_ideal_generators_homogeneous():
    C = build_catalecticant(model_veronese(2, 1, 2))
    for s in (1, 2, 3):
        for f in minors_ideal(C, s).gens:
            assert f.is_homogeneous() and f.degree() == s


# properties ---------------------------------------------------------------

MODELS = [model_p1(1, 1), model_p1(2, 2), model_p1(2, 3), model_veronese(2, 1, 1), model_veronese(2, 1, 2)]
params = st.lists(st.integers(-6, 6), min_size=3, max_size=3)


@given(st.sampled_from(range(len(MODELS))), st.lists(params, min_size=1, max_size=3))
def test_rank_bounded_on_secants(mi, pts):
    model = MODELS[mi]
    C = build_catalecticant(model)
    k = len(pts) - 1
    k_params = len(model.param_names)
    coords = [model.point(p[:k_params]) for p in pts]
    z = [sum(c[g] for c in coords) for g in range(model.dimL)]
    r = rank_profile(C, z)
    assert r <= k + 1
    if k == 0:
        assert r == (1 if any(z) else 0)
    if k + 2 <= min(C.shape):
        assert all(v == 0 for v in minor_values(C, k + 2, z))
