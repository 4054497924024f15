"""Bases of spherical harmonics on S^3 and the harmonic decomposition.

Two independent constructions of H_{p,q}:

* :func:`basis_hpq_solve` - kernel of the Laplacian on the monomial space
  P_{p,q}, by exact elimination;
* :func:`basis_hpq_derivative` - conjugate/holomorphic derivatives of
  |z|^{-2}, carried as Laurent sums P/|z|^{2N} and restricted to the sphere.
  This basis is orthogonal under :func:`~kohn_spectra.poly.sphere_inner_product`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from ._exact import nullspace, solve
from .poly import ComplexRational, Monomial, Polynomial, derive, laplacian

__all__ = [
    "HarmonicBasis",
    "basis_hm",
    "basis_hpq_derivative",
    "basis_hpq_solve",
    "bidegree_monomials",
    "decompose",
    "norm_squared_z",
]


@dataclass(frozen=True)
class HarmonicBasis:
    """Ordered basis of H_{p,q}(S^3) (``bidegree`` set) or H_m(S^3) (``bidegree`` None)."""

    degree: int
    elements: tuple[Polynomial, ...]
    bidegree: Optional[tuple[int, int]] = None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def dimension(self) -> int:
        if self.bidegree is not None:
            return self.degree + 1
        return (self.degree + 1) ** 2


def norm_squared_z() -> Polynomial:
    """|z|^2 = z1 zb1 + z2 zb2."""
    return Polynomial({Monomial(1, 0, 1, 0): 1, Monomial(0, 1, 0, 1): 1})


def bidegree_monomials(p: int, q: int) -> list[Monomial]:
    """Monomials spanning P_{p,q}, ordered by descending z2 then zb2 exponent."""
    if p < 0 or q < 0:
        return []
    return [Monomial(p - a2, a2, q - b2, b2) for a2 in range(p, -1, -1) for b2 in range(q, -1, -1)]


def _check_degrees(p: int, q: int) -> None:
    if p < 0 or q < 0:
        raise ValueError(f"bidegree must be nonnegative, got ({p}, {q})")


def _laplacian_matrix(p: int, q: int) -> tuple[list[list[Fraction]], list[Monomial]]:
    cols = bidegree_monomials(p, q)
    rows = bidegree_monomials(p - 1, q - 1)
    index = {m: i for i, m in enumerate(rows)}
    mat = [[Fraction(0)] * len(cols) for _ in rows]
    for j, mono in enumerate(cols):
        for m, c in laplacian(Polynomial({mono: 1})):
            mat[index[m]][j] = c.re
    return mat, cols


@lru_cache(maxsize=None)
def basis_hpq_solve(p: int, q: int) -> HarmonicBasis:
    """Basis of ker(Laplacian) on P_{p,q}, with rational coefficients."""
    _check_degrees(p, q)
    mat, cols = _laplacian_matrix(p, q)
    kernel = nullspace(mat, len(cols))
    elements = tuple(Polynomial(zip(cols, vec)) for vec in kernel)
    return HarmonicBasis(p + q, elements, (p, q))


# ---------------------------------------------------------------- Laurent sums
# A Laurent sum maps N -> P, meaning sum_N P_N / |z|^{2N}.

_GRAD_NORM = {
    "z1": Polynomial.variable("zb1"),
    "z2": Polynomial.variable("zb2"),
    "zb1": Polynomial.variable("z1"),
    "zb2": Polynomial.variable("z2"),
}


def _laurent_derive(expr: dict[int, Polynomial], var: str) -> dict[int, Polynomial]:
    # d(P |z|^{-2N}) = dP |z|^{-2N} - N P d(|z|^2) |z|^{-2N-2}
    out: dict[int, Polynomial] = {}
    for n, poly in expr.items():
        dp = derive(poly, var)
        if dp:
            out[n] = out.get(n, Polynomial.zero()) + dp
        extra = (poly * _GRAD_NORM[var]).scale(-n)
        if extra:
            out[n + 1] = out.get(n + 1, Polynomial.zero()) + extra
    return {n: poly for n, poly in out.items() if poly}


def _restrict_to_sphere(expr: dict[int, Polynomial], degree: int) -> Polynomial:
    # multiply through by |z|^{2(degree+1)}; every N is at most degree + 1
    total = Polynomial.zero()
    r2 = norm_squared_z()
    for n, poly in expr.items():
        total = total + poly * r2 ** (degree + 1 - n)
    return total


def kelvin_derivative(alpha: tuple[int, int], beta: tuple[int, int]) -> Polynomial:
    """Dbar^alpha D^beta |z|^{-2}, as the homogeneous harmonic polynomial
    agreeing with it on the sphere."""
    expr = {1: Polynomial.constant(1)}
    for var, count in zip(("z1", "z2"), beta):
        for _ in range(count):
            expr = _laurent_derive(expr, var)
    for var, count in zip(("zb1", "zb2"), alpha):
        for _ in range(count):
            expr = _laurent_derive(expr, var)
    return _restrict_to_sphere(expr, sum(alpha) + sum(beta))


def derivative_multi_indices(p: int, q: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """(alpha, beta) with |alpha| = p, |beta| = q and alpha_1 = 0 or beta_1 = 0.

    Ordered by descending alpha_2, then descending beta_2.
    """
    out = []
    for a2 in range(p, -1, -1):
        for b2 in range(q, -1, -1):
            alpha, beta = (p - a2, a2), (q - b2, b2)
            if alpha[0] == 0 or beta[0] == 0:
                out.append((alpha, beta))
    return out


@lru_cache(maxsize=None)
def basis_hpq_derivative(p: int, q: int) -> HarmonicBasis:
    """Orthogonal basis of H_{p,q}(S^3) from derivatives of |z|^{-2}.

    Elements keep their raw scale, e.g. ``-6 zb2^3`` for (0, 3).
    """
    _check_degrees(p, q)
    elements = tuple(kelvin_derivative(a, b) for a, b in derivative_multi_indices(p, q))
    return HarmonicBasis(p + q, elements, (p, q))


@lru_cache(maxsize=None)
def basis_hm(m: int) -> HarmonicBasis:
    """Basis of H_m(S^3): bidegree blocks (0, m), (1, m-1), ..., (m, 0)."""
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    elements: list[Polynomial] = []
    for q in range(m, -1, -1):
        elements.extend(basis_hpq_derivative(m - q, q).elements)
    return HarmonicBasis(m, tuple(elements))


# ------------------------------------------------------------- decomposition


def _harmonic_split(f: Polynomial, a: int, b: int) -> tuple[Polynomial, Polynomial]:
    """f in P_{a,b} -> (h, r) with f = h + |z|^2 r, h harmonic, r in P_{a-1,b-1}."""
    if a == 0 or b == 0:
        return f, Polynomial.zero()
    cols = bidegree_monomials(a - 1, b - 1)
    index = {m: i for i, m in enumerate(cols)}
    r2 = norm_squared_z()
    mat = [[Fraction(0)] * len(cols) for _ in cols]
    for j, mono in enumerate(cols):
        for m, c in laplacian(Polynomial({mono: 1}) * r2):
            mat[index[m]][j] = c.re
    lf = laplacian(f)
    rhs_re = [Fraction(0)] * len(cols)
    rhs_im = [Fraction(0)] * len(cols)
    for m, c in lf:
        rhs_re[index[m]] = c.re
        rhs_im[index[m]] = c.im
    x_re = solve(mat, rhs_re)
    x_im = solve(mat, rhs_im) if any(rhs_im) else [Fraction(0)] * len(cols)
    r = Polynomial((m, ComplexRational(xr, xi)) for m, xr, xi in zip(cols, x_re, x_im))
    return f - r * r2, r


def decompose(poly: Polynomial) -> list[tuple[int, Polynomial]]:
    """Write a homogeneous polynomial of degree m as sum_j |z|^{2j} p_{m-2j}.

    Returns ``[(j, p_{m-2j}) for j = 0 .. m//2]``; each p is harmonic and
    the decomposition is unique. Zero components are included.
    """
    if poly.is_zero():
        return [(0, Polynomial.zero())]
    degrees = poly.degrees()
    if len(degrees) != 1:
        raise ValueError(f"decompose needs a homogeneous polynomial, got degrees {sorted(degrees)}")
    m = degrees.pop()
    parts = [Polynomial.zero() for _ in range(m // 2 + 1)]
    for a, b in sorted(poly.bidegrees()):
        rest = poly.bidegree_part(a, b)
        j = 0
        while rest:
            harm, rest = _harmonic_split(rest, a - j, b - j)
            parts[j] = parts[j] + harm
            j += 1
    return list(enumerate(parts))
