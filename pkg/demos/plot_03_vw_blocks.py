"""
Tridiagonal blocks on odd degree
================================

On H_{2k-1} the operator splits into 2k copies of two k x k tridiagonal
blocks, one per chain of even or odd powers of Lbar applied to H_{0,2k-1}.
Here the closed-form blocks are checked against exact application of the
operator, and the two spectra are compared.
"""

from fractions import Fraction

import numpy as np

from kohn_spectra import assemble_full, closed_form_block, spectrum_multiplicity, verify_invariance

k, t = 3, Fraction(1, 3)
for kind in ("V", "W"):
    b = closed_form_block(k, kind, t)
    print(kind, "diag", [str(d) for d in b.diag], "upper", [str(u) for u in b.upper])

# %%
# Exact check: each chain is invariant and the coefficients match.
report = verify_invariance(k, t)
print("invariant:", bool(report), "chains checked:", len(report.matrices))

# %%
# Spectrum of the full 36 x 36 matrix versus the blocks, each eigenvalue
# repeated 2k times.
full = assemble_full(2 * k - 1, t, mode="numeric").eigenvalues()
blocks = np.sort(np.concatenate([np.full(m, v) for v, m in spectrum_multiplicity(k, t)]))
print("max difference:", np.max(np.abs(full - blocks)))
for value, mult in spectrum_multiplicity(k, t):
    print(f"{value:.12f} x {mult}")
