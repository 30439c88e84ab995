from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_rank
from secantcat.exactpoly import GF, QQ
from secantcat.linalg import EchelonBasis, determinant, rank, span_rank

matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rank_matches_sympy(m):
    assert rank(m) == brute_rank(m)


@given(matrices)
def test_echelon_rank_matches(m):
    rows = [{j: mpq(v) for j, v in enumerate(r) if v} for r in m]
    assert span_rank(rows) == brute_rank(m)


@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_determinant_matches_sympy(m):
    import sympy

    assert determinant(m) == sympy.Matrix(m).det()


def test_rank_mod_p():
    m = [[1, 2], [3, 6 + 7]]
    assert rank(m) == 2
    assert rank(m, GF(7)) == 1


def test_echelon_contains_and_same_span():
    a = EchelonBasis(QQ)
    a.add({0: mpq(1), 1: mpq(1)})
    a.add({1: mpq(1), 2: mpq(-1)})
    b = EchelonBasis(QQ)
    b.add({0: mpq(1), 2: mpq(1)})
    b.add({0: mpq(2), 1: mpq(1), 2: mpq(1)})
    assert a.contains({0: mpq(1), 2: mpq(1)})
    assert not a.contains({2: mpq(1)})
    assert a.same_span(b)
