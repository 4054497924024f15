from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kohn_spectra._exact import rref
from kohn_spectra.harmonics import (
    basis_hm,
    basis_hpq_derivative,
    basis_hpq_solve,
    bidegree_monomials,
    decompose,
    norm_squared_z,
)
from kohn_spectra.poly import Polynomial, apply_Lbar, laplacian, sphere_inner_product

from conftest import coefficients

P = Polynomial.parse

# the degree-3 basis, in order, as produced by the derivative construction
H3_LISTING = [
    "-6 * zb2^3",
    "-6 * zb1 zb2^2",
    "-6 * zb1^2 zb2",
    "-6 * zb1^3",
    "4 * z1 zb1 zb2 + -2 * z2 zb2^2",
    "2 * z1 zb1^2 + -4 * z2 zb1 zb2",
    "-6 * z2 zb1^2",
    "-6 * z1 zb2^2",
    "4 * z1 z2 zb1 + -2 * z2^2 zb2",
    "-6 * z2^2 zb1",
    "2 * z1^2 zb1 + -4 * z1 z2 zb2",
    "-6 * z1^2 zb2",
    "-6 * z2^3",
    "-6 * z1 z2^2",
    "-6 * z1^2 z2",
    "-6 * z1^3",
]


def _rank(polys):
    monos = sorted({m for f in polys for m, _ in f})
    rows = []
    for f in polys:
        rows.append([f.coefficient(m).re for m in monos])
        rows.append([f.coefficient(m).im for m in monos])
    return len(rref(rows)[1]) if rows and monos else 0


def test_solve_examples():
    b03 = basis_hpq_solve(0, 3)
    assert len(b03) == 4
    assert {frozenset(f.terms) for f in b03} == {frozenset({m}) for m in bidegree_monomials(0, 3)}
    b11 = basis_hpq_solve(1, 1)
    target = [P("z1 zb2"), P("z2 zb1"), P("z1 zb1 + -1 * z2 zb2")]
    assert len(b11) == 3 and _rank(list(b11) + target) == 3
    assert len(bidegree_monomials(2, 1)) == 6 and len(basis_hpq_solve(2, 1)) == 4


def test_derivative_examples():
    assert P("-6 * zb2^3") in basis_hpq_derivative(0, 3).elements
    assert P("4 * z1 z2 zb1 + -2 * z2^2 zb2") in basis_hpq_derivative(2, 1).elements
    b11 = basis_hpq_derivative(1, 1)
    assert _rank(list(b11) + list(basis_hpq_solve(1, 1))) == 3


def test_degree_three_listing_verbatim():
    assert [str(f) for f in basis_hm(3)] == H3_LISTING


def test_small_degree_bases():
    assert basis_hm(0).elements == (Polynomial.constant(1),)
    b1 = basis_hm(1)
    assert len(b1) == 4
    singles = {next(iter(f.terms)) for f in b1}
    assert all(len(f) == 1 for f in b1)
    assert singles == {m for p, q in ((0, 1), (1, 0)) for m in bidegree_monomials(p, q)}


@pytest.mark.parametrize("m", range(0, 13))
def test_dimension_counts(m):
    for p in range(m + 1):
        q = m - p
        assert len(basis_hpq_solve(p, q)) == p + q + 1
    if m <= 9:
        for p in range(m + 1):
            assert len(basis_hpq_derivative(p, m - p)) == m + 1
        assert len(basis_hm(m)) == (m + 1) ** 2


@pytest.mark.parametrize("p,q", [(p, q) for p in range(6) for q in range(6) if p + q <= 8])
def test_bases_harmonic_orthogonal_and_equivalent(p, q):
    deriv = basis_hpq_derivative(p, q).elements
    solved = basis_hpq_solve(p, q).elements
    for f in deriv + solved:
        assert laplacian(f).is_zero()
        assert f.bidegree == (p, q)
    for i, f in enumerate(deriv):
        for g in deriv[i + 1:]:
            assert sphere_inner_product(f, g) == 0
    # each set lies in the span of the other
    assert _rank(list(deriv)) == _rank(list(solved)) == _rank(list(deriv + solved)) == p + q + 1


@pytest.mark.parametrize("m", range(1, 10))
def test_distinct_bidegrees_orthogonal(m):
    blocks = [basis_hpq_derivative(p, m - p).elements for p in range(m + 1)]
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            for f in blocks[i]:
                for g in blocks[j]:
                    assert sphere_inner_product(f, g) == 0


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_lbar_powers_keep_chains_orthogonal(k):
    fs = list(basis_hpq_derivative(0, 2 * k - 1).elements)
    for sigma in range(2 * k):
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                assert sphere_inner_product(fs[i], fs[j]) == 0
        fs = [apply_Lbar(f) for f in fs]


# ------------------------------------------------------------- decomposition


def test_decompose_examples():
    parts = dict(decompose(P("z1 zb1")))
    assert parts[0] == P("1/2 * z1 zb1 + -1/2 * z2 zb2")
    assert parts[1] == Polynomial.constant(Fraction(1, 2))
    assert laplacian(parts[0]).is_zero()

    f = P("z1^2 zb2")
    assert decompose(f) == [(0, f), (1, Polynomial.zero())]

    parts = dict(decompose(P("z1^2 zb1 + z1 z2 zb2")))
    assert parts[0].is_zero() and parts[1] == P("z1")


def test_decompose_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        decompose(P("z1 + z1 zb1"))


@st.composite
def homogeneous(draw):
    m = draw(st.integers(0, 6))
    total = Polynomial.zero()
    for p in range(m + 1):
        for mono in bidegree_monomials(p, m - p):
            if draw(st.booleans()):
                total = total + Polynomial({mono: draw(coefficients)})
    return m, total


@given(homogeneous())
@settings(max_examples=40, deadline=None)
def test_decompose_reconstructs(case):
    m, f = case
    parts = decompose(f)
    r2 = norm_squared_z()
    total = Polynomial.zero()
    for j, comp in parts:
        assert laplacian(comp).is_zero()
        assert comp.is_zero() or comp.degrees() == {m - 2 * j}
        total = total + comp * r2**j
    assert total == f
