"""Spectra of the tridiagonal W/V blocks: symmetrization, continuants,
Sturm bisection, interlacing, and the decay bound for the smallest eigenvalue.

Throughout, ``s`` denotes |t|^2. On the W chain of H_{2k-1} the block is
similar to the symmetric matrix with diagonal a_j + b_j s and off-diagonal
c_j |t|, where

    a_j = 2j (2k - 2j),  b_j = (2j - 1)(2k + 1 - 2j),  c_j^2 = a_j b_{j+1}.

Exact univariate polynomials in s are numpy ``Polynomial`` objects with
``Fraction`` coefficients (object dtype).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Literal, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import eigvalsh_tridiagonal

from .operator import (
    assemble_full,
    block_diag_coeff,
    block_upper_coeff,
    closed_form_block,
    exact_limit,
)
from .poly import RossiParam

__all__ = [
    "BoundReport",
    "ContinuantSeq",
    "SymTridiag",
    "bound_chain",
    "continuants",
    "continuants_in_s",
    "det_closed_form",
    "interlacing_check",
    "lambda_min",
    "smallest_nonzero_even",
    "sturm_count",
    "sweep",
    "symmetrize",
    "v_block_lambda_min",
    "w_block_symmetric",
    "w_coefficients",
]

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- s-polynomials


def spoly(coeffs: Iterable) -> Polynomial:
    """Exact polynomial in s from ascending coefficients."""
    arr = np.array([Fraction(c) for c in coeffs] or [Fraction(0)], dtype=object)
    return _trim(Polynomial(arr))


def _trim(p: Polynomial) -> Polynomial:
    coef = list(p.coef)
    while len(coef) > 1 and coef[-1] == 0:
        coef.pop()
    return Polynomial(np.array(coef, dtype=object))


def peval(p: Polynomial, x):
    """Horner evaluation that stays exact for Fraction input."""
    acc = Fraction(0) if isinstance(x, Fraction) else 0.0
    for c in reversed(p.coef):
        acc = acc * x + c
    return acc


def same_poly(p: Polynomial, q: Polynomial) -> bool:
    a, b = _trim(p).coef, _trim(q).coef
    return len(a) == len(b) and all(x == y for x, y in zip(a, b))


# ------------------------------------------------------------------ SymTridiag


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored as diagonal and squared off-diagonal.

    Keeping e_j^2 rather than e_j lets rational inputs stay exact through the
    Sturm recurrence, which only ever needs the squares.
    """

    diag: tuple
    offdiag_sq: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))
        object.__setattr__(self, "offdiag_sq", tuple(self.offdiag_sq))
        if len(self.offdiag_sq) != max(len(self.diag) - 1, 0):
            raise ValueError("need len(diag) - 1 off-diagonal entries")
        if any(e < 0 for e in self.offdiag_sq):
            raise ValueError("squared off-diagonal entries must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.diag)

    @property
    def offdiag(self) -> np.ndarray:
        return np.sqrt(np.array([float(e) for e in self.offdiag_sq], dtype=float))

    @property
    def exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in self.diag + self.offdiag_sq)

    def leading(self, i: int) -> "SymTridiag":
        """Leading principal i x i submatrix."""
        return SymTridiag(self.diag[:i], self.offdiag_sq[: max(i - 1, 0)])

    def dense(self) -> np.ndarray:
        n = self.size
        out = np.diag(np.array([float(d) for d in self.diag]))
        e = self.offdiag
        out[np.arange(n - 1), np.arange(1, n)] = e
        out[np.arange(1, n), np.arange(n - 1)] = e
        return out

    def eigenvalues(self) -> np.ndarray:
        d = np.array([float(x) for x in self.diag])
        if self.size == 1:
            return d
        return eigvalsh_tridiagonal(d, self.offdiag)

    def gershgorin(self) -> tuple:
        n = self.size
        off = self.offdiag
        lo = hi = None
        for i, d in enumerate(self.diag):
            r = (off[i - 1] if i > 0 else 0.0) + (off[i] if i < n - 1 else 0.0)
            lo = float(d) - r if lo is None else min(lo, float(d) - r)
            hi = float(d) + r if hi is None else max(hi, float(d) + r)
        return lo, hi


def symmetrize(diag: Sequence, upper: Sequence, lower: Sequence) -> SymTridiag:
    """Diagonal similarity to a symmetric tridiagonal with e_j = sqrt(u_j l_j)."""
    if len(upper) != len(lower) or len(upper) != max(len(diag) - 1, 0):
        raise ValueError("inconsistent tridiagonal dimensions")
    products = []
    for j, (u, l) in enumerate(zip(upper, lower), start=1):
        prod = u * l
        if prod <= 0:
            raise ValueError(f"u_{j} * l_{j} = {prod} is not positive; cannot symmetrize")
        products.append(prod)
    return SymTridiag(tuple(diag), tuple(products))


def w_coefficients(k: int, j: int) -> tuple[int, int, int]:
    """(a_j, b_j, c_j^2) of the symmetrized W block; c_k^2 is 0."""
    a = (2 * j) * (2 * k - 2 * j)
    b = (2 * j - 1) * (2 * k + 1 - 2 * j)
    c2 = (2 * j + 1) * (2 * j) * (2 * k - 2 * j) * (2 * k - 1 - 2 * j)
    return a, b, c2


def w_block_symmetric(k: int, t) -> SymTridiag:
    """Symmetrized W block at parameter t, h factored out, exact.

    Built from the closed-form coefficients directly so t = 0 (where the
    off-diagonal vanishes) is allowed.
    """
    t = RossiParam.of(t)
    s = t.s
    diag, off = [], []
    for j in range(1, k + 1):
        a, b, c2 = w_coefficients(k, j)
        diag.append(a + b * s)
        if j < k:
            off.append(c2 * s)
    return SymTridiag(tuple(diag), tuple(off))


# ----------------------------------------------------------------- continuants


@dataclass(frozen=True)
class ContinuantSeq:
    """f_0 .. f_k with f_i the i-th leading principal minor."""

    values: tuple

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    @property
    def determinant(self):
        return self.values[-1]


def continuants(diag: Sequence, products: Sequence) -> ContinuantSeq:
    """f_0 = 1, f_1 = d_1, f_i = d_i f_{i-1} - (u l)_{i-1} f_{i-2}.

    Works for any ring elements (Fractions, floats, exact s-polynomials);
    ``products`` holds u_j l_j (equivalently e_j^2).
    """
    one = spoly([1]) if diag and isinstance(diag[0], Polynomial) else 1
    f = [one]
    if diag:
        f.append(diag[0])
    for i in range(1, len(diag)):
        nxt = diag[i] * f[i] - products[i - 1] * f[i - 1]
        f.append(_trim(nxt) if isinstance(nxt, Polynomial) else nxt)
    return ContinuantSeq(tuple(f))


def block_polys(k: int, kind: Literal["V", "W"] = "W") -> tuple[list[Polynomial], list[Polynomial]]:
    """Diagonal entries and u_j l_j of a V/W block as exact polynomials in s."""
    diag = [spoly(block_diag_coeff(k, kind, j)) for j in range(1, k + 1)]
    prods = [spoly([0, block_upper_coeff(k, kind, j)]) for j in range(1, k)]
    return diag, prods


def continuants_in_s(k: int, kind: Literal["V", "W"] = "W") -> ContinuantSeq:
    """Leading-minor determinants of a block as exact polynomials in s."""
    return continuants(*block_polys(k, kind))


def det_closed_form(k: int, i: int) -> Polynomial:
    """det of the i-th leading minor of the W block, h factored out.

    sum_{r=0}^{i} b_1..b_r a_{r+1}..a_i s^r
    """
    if not 1 <= i <= k:
        raise IndexError(f"need 1 <= i <= k, got i={i}, k={k}")
    a = [w_coefficients(k, j)[0] for j in range(1, i + 1)]
    b = [w_coefficients(k, j)[1] for j in range(1, i + 1)]
    coeffs = []
    for r in range(i + 1):
        coeffs.append(math.prod(b[:r]) * math.prod(a[r:]))
    return spoly(coeffs)


# ----------------------------------------------------------- Sturm bisection


def sturm_count(st: SymTridiag, x) -> int:
    """Number of eigenvalues strictly below x (signs of the shifted LDL^T pivots)."""
    count = 0
    q = None
    n = st.size
    tiny = Fraction(1, 10**60) if isinstance(x, Fraction) else 1e-300
    for i in range(n):
        q = st.diag[i] - x if i == 0 else st.diag[i] - x - st.offdiag_sq[i - 1] / q
        if q == 0:
            # a zero pivot is an eigenvalue of the leading minor; nudge it
            if i == n - 1 or st.offdiag_sq[i] == 0:
                q = tiny
            else:
                q = -tiny
        if q < 0:
            count += 1
    return count


class BisectionError(RuntimeError):
    pass


def lambda_min(st: SymTridiag, tol: float = 1e-12, *, relative: bool = False, max_iter: int = 200):
    """Smallest eigenvalue by Sturm-count bisection.

    Returns the lower end of the final bracket, so the result never exceeds
    the true eigenvalue. With exact (rational) entries, every count is exact.
    ``relative=True`` stops on bracket width <= tol * |lower end| instead of
    an absolute width, after first locating the eigenvalue's binary scale;
    this resolves eigenvalues far below machine epsilon.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if st.size == 0:
        raise ValueError("empty matrix")
    exact = st.exact
    num = (lambda v: Fraction(v)) if exact else float
    g_lo, g_hi = st.gershgorin()
    lo, hi = num(min(g_lo, 0.0)), num(g_hi) + 1
    if sturm_count(st, lo) > 0:
        lo = num(g_lo) - 1
    if relative and sturm_count(st, num(0)) == 0:
        # positive definite: walk the upper end down by halves
        lo = num(0)
        for _ in range(max_iter * 8):
            half = hi / 2
            if sturm_count(st, half) >= 1:
                hi = half
            else:
                lo = half
                break
        else:
            raise BisectionError("could not bracket the smallest eigenvalue")
    tol_n = num(tol)
    for _ in range(max_iter):
        width = hi - lo
        limit = tol_n * abs(lo) if relative and lo > 0 else tol_n
        if width <= limit:
            return lo
        mid = (lo + hi) / 2
        if exact:
            # keep denominators from growing without bound
            mid = Fraction(float(mid)) if mid != 0 else mid
            if not lo < mid < hi:
                mid = (lo + hi) / 2
        if sturm_count(st, mid) >= 1:
            hi = mid
        else:
            lo = mid
    raise BisectionError(f"no convergence to tol={tol} in {max_iter} iterations")


def interlacing_check(st: SymTridiag, slack: float = 1e-10) -> bool:
    """Do the leading (k-1)-minor's eigenvalues interlace the full ones?"""
    if st.size < 2:
        raise ValueError("interlacing needs dimension >= 2")
    lam = np.sort(st.eigenvalues())
    nu = np.sort(st.leading(st.size - 1).eigenvalues())
    for i, v in enumerate(nu):
        if not (lam[i] - slack <= v <= lam[i + 1] + slack):
            return False
    return True


# ---------------------------------------------------------------- bound chain


@dataclass(frozen=True)
class BoundReport:
    """Smallest eigenvalue on one H_m(S^3) piece and the bounds above it.

    For odd rows m = 2k - 1 and all quantities include the factor h. Even
    rows (m = 2k) carry the smallest nonzero eigenvalue only; the bound
    fields are NaN there.
    """

    k: int
    t_abs: Fraction
    h: float
    lambda_min: float
    det_ratio: float
    analytic_bound: float
    corrected_bound: float
    parity: str = "odd"
    holds: bool = True

    def row(self) -> dict:
        out = asdict(self)
        out["t_abs"] = float(self.t_abs)
        return out


def _corrected_constant(k: int) -> float:
    # prod_{j<k} (1 + 1/(2j)) <= exp(H_{k-1}/2) <= sqrt(e * (k - 1)) for k >= 2
    return math.sqrt(math.e * max(k - 1, 1))


def bound_chain(k: int, t, *, tol: float = 1e-12) -> BoundReport:
    """Smallest W-block eigenvalue on H_{2k-1}, the ratio det(A)/det(A_{k-1}),
    and two closed-form upper bounds h (2k-1) C_k |t|^{2k}.

    C_k = sqrt(k) is reported as ``analytic_bound``; C_k = sqrt(e max(k-1, 1))
    is ``corrected_bound``, the one that follows from H_{k-1} <= 1 + ln(k-1)
    and the one checked in ``holds``. Comparisons are exact up to the final
    irrational constant.
    """
    t = RossiParam.of(t)
    if not 0 < t.t_abs < 1:
        raise ValueError("bound chain needs 0 < |t| < 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    s, h = t.s, t.h
    st = w_block_symmetric(k, t)
    lam = lambda_min(st, tol, relative=True)
    dets = continuants(st.diag, st.offdiag_sq)
    ratio = dets[k] / dets[k - 1]
    scale = (2 * k - 1) * s**k
    holds = 0 < lam <= ratio and float(ratio / scale) <= _corrected_constant(k)
    return BoundReport(
        k=k,
        t_abs=t.t_abs,
        h=float(h),
        lambda_min=float(lam * h),
        det_ratio=float(ratio * h),
        analytic_bound=float(h * scale) * math.sqrt(k),
        corrected_bound=float(h * scale) * _corrected_constant(k),
        holds=bool(holds),
    )


def smallest_nonzero_even(k: int, t, *, zero_rtol: float = 1e-9) -> float:
    """Smallest eigenvalue of box_b^t on H_{2k} above zero_rtol * h."""
    t = RossiParam.of(t)
    mat = assemble_full(2 * k, t, mode="numeric")
    h = float(t.h)
    vals = mat.eigenvalues()
    nonzero = vals[vals > zero_rtol * h]
    return float(nonzero.min()) if nonzero.size else math.nan


def sweep(
    k_max: int,
    t_grid: Sequence,
    parity: Literal["odd", "even", "both"] = "odd",
    *,
    tol: float = 1e-12,
    zero_rtol: float = 1e-9,
    even_limit: Optional[int] = None,
) -> list[BoundReport]:
    """Bound reports over k = 1..k_max and every t in the grid.

    Even pieces need full assembly of H_{2k}; they stop at ``even_limit``
    (default: the exact-mode limit) with a warning.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if parity not in ("odd", "even", "both"):
        raise ValueError(f"parity must be odd, even or both, got {parity!r}")
    params = [RossiParam.of(t) for t in t_grid]
    if any(p.t_abs == 0 for p in params):
        raise ValueError("t grid must lie in (0, 1)")
    even_limit = exact_limit() if even_limit is None else even_limit
    reports: list[BoundReport] = []
    for t in params:
        if parity in ("odd", "both"):
            reports.extend(bound_chain(k, t, tol=tol) for k in range(1, k_max + 1))
        if parity in ("even", "both"):
            top = min(k_max, even_limit)
            if top < k_max:
                log.warning("even pieces beyond H_%d skipped (limit k <= %d)", 2 * top, even_limit)
            for k in range(1, top + 1):
                lam = smallest_nonzero_even(k, t, zero_rtol=zero_rtol)
                reports.append(
                    BoundReport(k, t.t_abs, float(t.h), lam, math.nan, math.nan, math.nan, "even")
                )
    return reports


def v_block_lambda_min(k: int, t) -> float:
    """Smallest eigenvalue of the V block (h included), for cross-checks."""
    t = RossiParam.of(t)
    block = closed_form_block(k, "V", t)
    if k == 1:
        return float(block.diag[0] * t.h)
    st = symmetrize(block.diag, block.upper, block.lower)
    return float(lambda_min(st, relative=True) * t.h)
