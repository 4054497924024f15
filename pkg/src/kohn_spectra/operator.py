"""Matrices of the perturbed Kohn Laplacian on H_m(S^3).

Two routes to the same operator:

* :func:`assemble_full` expands the image of every basis vector of H_m in
  that (orthogonal) basis using exact inner products;
* :func:`closed_form_block` gives the k x k tridiagonal blocks on the chains
  V_i = span{Lbar^{2j-2} f_i}, W_i = span{Lbar^{2j-1} f_i} inside H_{2k-1},
  f_i running over the orthogonal basis of H_{0,2k-1}.

Matrices use the column convention: column j holds the coordinates of the
image of basis vector j. The factor h is always factored out of entries.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .harmonics import basis_hm, basis_hpq_derivative
from .poly import (
    ComplexRational,
    Polynomial,
    RossiParam,
    apply_boxbt,
    apply_L,
    apply_Lbar,
    as_coefficient,
    normalization,
    sphere_inner_product,
)

__all__ = [
    "InvarianceReport",
    "OperatorMatrix",
    "VWBlock",
    "assemble_full",
    "block_diag_coeff",
    "block_upper_coeff",
    "closed_form_block",
    "exact_limit",
    "expand_in_orthogonal_basis",
    "spectrum_multiplicity",
    "verify_invariance",
    "vw_chain",
]

Kind = Literal["V", "W"]
DEFAULT_EXACT_LIMIT = 5


def exact_limit() -> int:
    """Largest k handled in exact mode; override with KOHN_SPECTRA_EXACT_LIMIT."""
    raw = os.environ.get("KOHN_SPECTRA_EXACT_LIMIT")
    if raw is None:
        return DEFAULT_EXACT_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"KOHN_SPECTRA_EXACT_LIMIT must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("KOHN_SPECTRA_EXACT_LIMIT must be >= 1")
    return value


def expand_in_orthogonal_basis(
    g: Polynomial, basis: Sequence[Polynomial], norms: Optional[Sequence[Fraction]] = None
) -> list[ComplexRational]:
    """Coordinates of g in an orthogonal basis; raises if g is not in the span."""
    if norms is None:
        norms = [sphere_inner_product(f, f).re for f in basis]
    coords = [sphere_inner_product(g, f) * ComplexRational(1 / n) for f, n in zip(basis, norms)]
    residual = g
    for c, f in zip(coords, basis):
        if c:
            residual = residual - f.scale(c)
    if residual:
        raise ArithmeticError("polynomial does not lie in the span of the basis")
    return coords


# ------------------------------------------------------------------ full H_m


@dataclass(frozen=True)
class _OperatorParts:
    """Coordinate matrices (exact, real) of -L Lbar, -Lbar L, -L^2, -Lbar^2 on H_m."""

    basis: tuple[Polynomial, ...]
    norms: tuple[Fraction, ...]
    ll_bar: tuple[tuple[Fraction, ...], ...]
    l_bar_l: tuple[tuple[Fraction, ...], ...]
    l_sq: tuple[tuple[Fraction, ...], ...]
    l_bar_sq: tuple[tuple[Fraction, ...], ...]


def _real_column(coords: list[ComplexRational]) -> list[Fraction]:
    if any(c.im for c in coords):
        raise ArithmeticError("expected real coordinates for a real basis")
    return [c.re for c in coords]


def _transpose(cols: list[list[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(zip(*cols)) if cols else ()


@lru_cache(maxsize=None)
def _operator_parts(m: int) -> _OperatorParts:
    basis = basis_hm(m).elements
    norms = tuple(sphere_inner_product(f, f).re for f in basis)
    cols: dict[str, list[list[Fraction]]] = {"ll_bar": [], "l_bar_l": [], "l_sq": [], "l_bar_sq": []}
    for f in basis:
        lf, lbf = apply_L(f), apply_Lbar(f)
        images = {
            "ll_bar": -apply_L(lbf),
            "l_bar_l": -apply_Lbar(lf),
            "l_sq": -apply_L(lf),
            "l_bar_sq": -apply_Lbar(lbf),
        }
        for name, g in images.items():
            cols[name].append(_real_column(expand_in_orthogonal_basis(g, basis, norms)))
    return _OperatorParts(basis, norms, **{k: _transpose(v) for k, v in cols.items()})


@dataclass(frozen=True)
class OperatorMatrix:
    """Matrix of box_b^t on H_m(S^3) in the basis of :func:`basis_hm`, h factored out.

    ``entries`` is an object array of ComplexRational in exact mode and a
    float/complex array in numeric mode.
    """

    m: int
    entries: np.ndarray
    basis: tuple[Polynomial, ...]
    norms: tuple[Fraction, ...]
    h: float | Fraction
    mode: str
    t: object = None
    h_factored: bool = True

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_numpy(self) -> np.ndarray:
        """Entries as a complex array (h still factored out)."""
        if self.mode == "exact":
            return np.array([[complex(c) for c in row] for row in self.entries], dtype=complex)
        return np.asarray(self.entries, dtype=complex)

    def hermitian_form(self) -> np.ndarray:
        """D^{1/2} M D^{-1/2} with D the Gram diagonal; Hermitian, h factored."""
        d = np.sqrt(np.array([float(n) for n in self.norms]))
        return (d[:, None] * self.to_numpy()) / d[None, :]

    def eigenvalues(self) -> np.ndarray:
        """Sorted eigenvalues of the operator itself (h multiplied back in)."""
        if self.dim == 0:
            return np.zeros(0)
        herm = self.hermitian_form()
        herm = 0.5 * (herm + herm.conj().T)
        return np.linalg.eigvalsh(herm) * float(self.h)


def assemble_full(m: int, t=0, mode: str = "exact") -> OperatorMatrix:
    """Matrix of box_b^t on H_m(S^3) by brute-force expansion.

    Exact mode takes a :class:`RossiParam`, a rational, or an exact complex
    parameter; numeric mode also accepts floats and Python complex numbers.
    """
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    if mode not in ("exact", "numeric"):
        raise ValueError(f"mode must be 'exact' or 'numeric', got {mode!r}")
    parts = _operator_parts(m)
    n = len(parts.basis)
    if mode == "exact":
        if (m + 1) // 2 > exact_limit():
            raise ValueError(
                f"exact assembly on H_{m} exceeds the exact-mode limit k <= {exact_limit()}"
            )
        tc = as_coefficient(t.t_abs if isinstance(t, RossiParam) else _exact_param(t))
        s = tc.abs2()
        if s >= 1:
            raise ValueError("|t| must be < 1")
        tbar = tc.conjugate()
        entries = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                val = ComplexRational(
                    parts.ll_bar[i][j] + s * parts.l_bar_l[i][j]
                ) + tc * parts.l_sq[i][j] + tbar * parts.l_bar_sq[i][j]
                entries[i, j] = val
        return OperatorMatrix(m, entries, parts.basis, parts.norms, normalization(s), mode, t)

    tn = complex(float(t.t_abs) if isinstance(t, RossiParam) else _numeric_param(t))
    s = abs(tn) ** 2
    if s >= 1:
        raise ValueError("|t| must be < 1")
    arr = lambda rows: np.array([[float(x) for x in r] for r in rows], dtype=float).reshape(n, n)
    entries = arr(parts.ll_bar) + s * arr(parts.l_bar_l) + tn * arr(parts.l_sq) + tn.conjugate() * arr(parts.l_bar_sq)
    if tn.imag == 0:
        entries = entries.real
    h = (1 + s) / (1 - s) ** 2
    return OperatorMatrix(m, entries, parts.basis, parts.norms, h, mode, t)


def _exact_param(t):
    if isinstance(t, float):
        raise TypeError("exact mode needs a rational parameter; pass a Fraction or 'p/q'")
    if isinstance(t, str):
        return Fraction(t)
    return t


def _numeric_param(t):
    if isinstance(t, ComplexRational):
        return complex(t)
    if isinstance(t, str):
        return float(Fraction(t))
    return t


# ------------------------------------------------------------ V/W chains


def vw_chain(k: int, i: int) -> tuple[list[Polynomial], list[Polynomial]]:
    """(v_1..v_k, w_1..w_k) with v_j = Lbar^{2j-2} f_i and w_j = Lbar^{2j-1} f_i."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 <= i <= 2 * k - 1:
        raise IndexError(f"chain index {i} out of range 0..{2 * k - 1}")
    g = basis_hpq_derivative(0, 2 * k - 1)[i]
    chain = [g]
    for _ in range(2 * k - 1):
        g = apply_Lbar(g)
        chain.append(g)
    return chain[0::2], chain[1::2]


def block_diag_coeff(k: int, kind: Kind, j: int) -> tuple[int, int]:
    """(constant, |t|^2 coefficient) of the j-th diagonal entry."""
    if kind == "V":
        return (2 * j - 1) * (2 * k + 1 - 2 * j), (2 * j - 2) * (2 * k + 2 - 2 * j)
    if kind == "W":
        return (2 * j) * (2 * k - 2 * j), (2 * j - 1) * (2 * k + 1 - 2 * j)
    raise ValueError(f"kind must be 'V' or 'W', got {kind!r}")


def block_upper_coeff(k: int, kind: Kind, j: int) -> int:
    """Integer c with u_j = -t * c, for 1 <= j < k."""
    if kind == "V":
        return (2 * j) * (2 * j - 1) * (2 * k + 1 - 2 * j) * (2 * k - 2 * j)
    if kind == "W":
        return (2 * j + 1) * (2 * j) * (2 * k - 2 * j) * (2 * k - 1 - 2 * j)
    raise ValueError(f"kind must be 'V' or 'W', got {kind!r}")


@dataclass(frozen=True)
class VWBlock:
    """Tridiagonal block of box_b^t / h on one V or W chain, exact in |t|."""

    k: int
    kind: str
    t: RossiParam
    diag: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]

    def dense(self) -> list[list[Fraction]]:
        k = self.k
        out = [[Fraction(0)] * k for _ in range(k)]
        for j in range(k):
            out[j][j] = self.diag[j]
        for j in range(k - 1):
            out[j][j + 1] = self.upper[j]
            out[j + 1][j] = self.lower[j]
        return out


def closed_form_block(k: int, kind: Kind, t) -> VWBlock:
    """Closed-form block on V (even powers of Lbar) or W (odd powers).

    d_j = alpha_j + |t|^2 beta_j from :func:`block_diag_coeff`,
    u_j = -|t| c_j from :func:`block_upper_coeff`, and every subdiagonal
    entry is -|t|.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    t = RossiParam.of(t)
    ta, s = t.t_abs, t.s
    diag = []
    for j in range(1, k + 1):
        c0, c2 = block_diag_coeff(k, kind, j)
        diag.append(c0 + s * c2)
    upper = tuple(-ta * block_upper_coeff(k, kind, j) for j in range(1, k))
    lower = tuple(-ta for _ in range(1, k))
    return VWBlock(k, kind, t, tuple(diag), upper, lower)


@dataclass
class InvarianceReport:
    """Outcome of checking chain invariance against closed-form blocks."""

    k: int
    t: RossiParam
    ok: bool = True
    mismatches: list[str] = field(default_factory=list)
    # (kind, chain index) -> exact coordinate matrix found by expansion
    matrices: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def verify_invariance(
    k: int,
    t,
    *,
    blocks: Optional[dict] = None,
    limit: Optional[int] = None,
) -> InvarianceReport:
    """Apply box_b^t to every chain element and compare with the closed form.

    ``blocks`` maps "V"/"W" to a :class:`VWBlock` to test instead of the
    built-in formulas. The report is falsy on any mismatch: an image that
    leaves its chain, a coefficient differing from the block, or blocks
    that differ between chains.
    """
    t = RossiParam.of(t)
    limit = exact_limit() if limit is None else limit
    if k > limit:
        raise ValueError(f"k = {k} exceeds the exact-arithmetic limit {limit}")
    if blocks is None:
        blocks = {kind: closed_form_block(k, kind, t) for kind in ("V", "W")}
    report = InvarianceReport(k, t)
    for i in range(2 * k):
        v, w = vw_chain(k, i)
        for kind, chain in (("V", v), ("W", w)):
            norms = [sphere_inner_product(f, f).re for f in chain]
            cols = []
            for j, f in enumerate(chain):
                image = apply_boxbt(f, t, factor_h=True)
                try:
                    coords = expand_in_orthogonal_basis(image, chain, norms)
                except ArithmeticError:
                    report.ok = False
                    report.mismatches.append(f"{kind}_{i}: image of element {j + 1} leaves the chain")
                    coords = None
                cols.append(coords)
            if any(c is None for c in cols):
                continue
            found = [[cols[col][row].re for col in range(k)] for row in range(k)]
            if any(cols[col][row].im for col in range(k) for row in range(k)):
                report.ok = False
                report.mismatches.append(f"{kind}_{i}: non-real coordinates")
            report.matrices[(kind, i)] = found
            expected = blocks[kind].dense()
            for row in range(k):
                for col in range(k):
                    if found[row][col] != expected[row][col]:
                        report.ok = False
                        report.mismatches.append(
                            f"{kind}_{i}[{row + 1},{col + 1}]: found {found[row][col]}, "
                            f"block has {expected[row][col]}"
                        )
    for kind in ("V", "W"):
        mats = [report.matrices[key] for key in sorted(report.matrices) if key[0] == kind]
        if any(mat != mats[0] for mat in mats[1:]):
            report.ok = False
            report.mismatches.append(f"{kind}: blocks differ between chains")
    return report


def _block_eigenvalues(block: VWBlock) -> np.ndarray:
    d = np.array([float(x) for x in block.diag])
    if block.k == 1:
        return d
    prod = [u * l for u, l in zip(block.upper, block.lower)]
    if any(p < 0 for p in prod):
        raise ValueError("block is not similar to a real symmetric tridiagonal")
    e = np.sqrt(np.array([float(p) for p in prod]))
    return eigvalsh_tridiagonal(d, e)


def spectrum_multiplicity(k: int, t, *, rtol: float = 1e-9) -> list[tuple[float, int]]:
    """Eigenvalues of box_b^t on H_{2k-1} with multiplicities, from the blocks.

    Each block eigenvalue appears once per chain, i.e. 2k times; values of V
    and W closer than ``rtol`` (relative) are merged.
    """
    t = RossiParam.of(t)
    h = float(t.h)
    values = np.sort(
        np.concatenate([_block_eigenvalues(closed_form_block(k, kind, t)) for kind in ("V", "W")])
    ) * h
    out: list[tuple[float, int]] = []
    for val in values:
        if out and math.isclose(out[-1][0], val, rel_tol=rtol, abs_tol=rtol * h):
            out[-1] = (out[-1][0], out[-1][1] + 2 * k)
        else:
            out.append((float(val), 2 * k))
    return out
