from fractions import Fraction

import pytest
from hypothesis import strategies as st

from kohn_spectra.harmonics import basis_hm
from kohn_spectra.poly import ComplexRational, Monomial, Polynomial

small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
coefficients = st.builds(ComplexRational, small_rationals, small_rationals)


@st.composite
def monomials(draw, max_degree=10):
    exps = []
    budget = max_degree
    for _ in range(4):
        e = draw(st.integers(0, min(budget, 4)))
        exps.append(e)
        budget -= e
    return Monomial(*exps)


@st.composite
def polynomials(draw, max_terms=5, max_degree=10):
    n = draw(st.integers(0, max_terms))
    return Polynomial([(draw(monomials(max_degree)), draw(coefficients)) for _ in range(n)])


@st.composite
def harmonic_pairs(draw, max_degree=4):
    """Two random harmonic polynomials of one total degree m."""
    m = draw(st.integers(1, max_degree))
    basis = basis_hm(m).elements

    def combo():
        total = Polynomial.zero()
        for f in basis:
            total = total + f.scale(draw(coefficients))
        return total

    return m, combo(), combo()


@pytest.fixture
def half():
    return Fraction(1, 2)
