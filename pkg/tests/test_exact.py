from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from oracles import X, from_sympy, homogeneous, nonzero_homogeneous, rational_matrix, sympy_rank, to_sympy

from monadws.exact import (
    ExactMatrix,
    MultiPoly,
    SparseRows,
    divides,
    fermat,
    format_poly,
    graded_basis,
    kernel_dim,
    monomials,
    nullspace,
    parse_poly,
    poly_det,
    poly_normal_form,
    rank,
)

x = [MultiPoly.var(i) for i in range(5)]


def test_basic_arithmetic():
    p = (x[0] + x[1]) ** 2
    assert p == x[0] * x[0] + x[0] * x[1] * 2 + x[1] * x[1]
    assert (p - p).is_zero() and (p - p).degree is None
    assert (x[2] * Fraction(1, 3)).coefficient((0, 0, 1, 0, 0)) == Fraction(1, 3)
    assert -x[3] + x[3] == MultiPoly.zero()
    assert str(x[0] * x[1] - x[4] ** 2) == "x0*x1 - x4^2"


def test_non_homogeneous_rejected():
    with pytest.raises(ValueError):
        x[0] + x[1] * x[2]
    with pytest.raises(ValueError):
        MultiPoly({(1, 0, 0, 0, 0): 1, (0, 0, 0, 0, 0): 1})


def test_evaluate():
    f = fermat(3)
    assert f.evaluate((1, 0, 0, 0, 0)) == 1
    assert f.evaluate((1, -1, 0, 0, 0)) == 0
    assert (x[0] * x[1]).evaluate((Fraction(1, 2), 4, 0, 0, 0)) == 2


def test_parse_format_round_trip():
    text = "# a comment\n1/2 1 1 0 0 0\n\n-3 0 0 2 0 0  # trailing\n"
    p = parse_poly(text)
    assert p == x[0] * x[1] * Fraction(1, 2) - x[2] ** 2 * 3
    assert parse_poly(format_poly(p)) == p
    assert parse_poly("") == MultiPoly.zero()


@pytest.mark.parametrize("bad", ["1 1 0 0 0", "1 2 0 0 0 0\n1 1 0 0 0 0", "x 1 0 0 0 0", "1 -1 2 0 0 0"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_poly(bad)


@given(homogeneous(3), homogeneous(3))
def test_format_parse_inverse(p, q):
    assert parse_poly(format_poly(p + q)) == p + q


def test_monomial_counts_and_order():
    for k in range(6):
        ms = monomials(k)
        assert len(ms) == comb(k + 4, 4)
        assert ms == sorted(ms, reverse=True)
    assert monomials(-1) == []


@pytest.mark.parametrize("d", range(1, 7))
def test_graded_basis_size_and_reducedness(d):
    f = fermat(d)
    lt, _ = f.leading_term()
    for k in range(-1, 9):
        gb = graded_basis(k, f)
        expected = (comb(k + 4, 4) if k >= 0 else 0) - (comb(k - d + 4, 4) if k - d >= 0 else 0)
        assert len(gb) == expected
        assert not any(divides(lt, m) for m in gb.monomials)


@pytest.mark.parametrize("d", [2, 3, 4])
@given(data=st.data())
def test_normal_form_matches_sympy(d, data):
    # single-relation division: {f} is a Groebner basis, so the remainder is unique
    k = data.draw(st.integers(d, d + 3))
    p = data.draw(homogeneous(k, 6))
    f = data.draw(nonzero_homogeneous(d, 4)) if data.draw(st.booleans()) else fermat(d)
    _, r = sympy.reduced(to_sympy(p), [to_sympy(f)], *X, order="grlex")
    assert poly_normal_form(p, f) == from_sympy(r)


@given(homogeneous(4, 6))
def test_normal_form_idempotent(p):
    f = fermat(3)
    nf = poly_normal_form(p, f)
    assert poly_normal_form(nf, f) == nf


@given(homogeneous(2), homogeneous(3))
def test_normal_form_multiplicative(p, q):
    f = fermat(3) + x[0] * x[1] * x[2]
    lhs = poly_normal_form(p * q, f)
    rhs = poly_normal_form(poly_normal_form(p, f) * poly_normal_form(q, f), f)
    assert lhs == rhs


def test_normal_form_rejects_constant_relation():
    with pytest.raises(ValueError):
        poly_normal_form(x[0], MultiPoly.const(1))


def test_coordinates_in_graded_basis():
    f = fermat(2)
    gb = graded_basis(2, f)
    v = gb.coordinates(poly_normal_form(x[0] ** 2, f))  # x0^2 = -(x1^2 + ... + x4^2)
    assert sum(1 for c in v if c) == 4 and all(c in (0, -1) for c in v)
    with pytest.raises(ValueError):
        gb.coordinates(x[0] ** 2)


@given(rational_matrix())
def test_rank_matches_sympy(rows):
    M = ExactMatrix(rows, len(rows[0]))
    r = sympy_rank(rows)
    assert rank(M) == r
    assert rank(M, method="sparse") == r


@given(rational_matrix(), st.data())
def test_rank_transpose_and_scaling(rows, data):
    M = ExactMatrix(rows, len(rows[0]))
    assert rank(M) == rank(M.transpose())
    scales = data.draw(st.lists(st.fractions(min_value=1, max_value=7, max_denominator=5),
                                min_size=len(rows), max_size=len(rows)))
    signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=len(rows), max_size=len(rows)))
    scaled = ExactMatrix([[a * s * g for a in r] for r, s, g in zip(rows, scales, signs)], len(rows[0]))
    assert rank(scaled) == rank(M)


@given(rational_matrix(4, 6))
def test_nullspace_vectors(rows):
    M = ExactMatrix(rows, len(rows[0]))
    basis = nullspace(M)
    assert len(basis) == kernel_dim(M) == M.cols - rank(M)
    for v in basis:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


def test_bareiss_known_ranks():
    assert rank(ExactMatrix.identity(5)) == 5
    assert rank(ExactMatrix.zeros(3, 4)) == 0
    assert rank(ExactMatrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]], 3)) == 2


def test_sparse_rows_agree_with_dense():
    S = SparseRows(3, 4)
    for i, j, v in [(0, 0, 1), (0, 2, 2), (1, 1, 3), (2, 0, 2), (2, 2, 4), (2, 1, 3)]:
        S.add(i, j, v)
    assert S.rank() == rank(S.to_dense()) == 2


def test_poly_det_matches_sympy():
    M = [[x[0], x[1], MultiPoly()], [x[2], x[3], x[4]], [x[1], MultiPoly(), x[0]]]
    expected = sympy.Matrix([[to_sympy(e) for e in row] for row in M]).det()
    assert poly_det(M) == from_sympy(expected)
    assert poly_det([[x[1]]]) == x[1]
