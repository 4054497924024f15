"""
Smallest eigenvalue on odd degree goes to zero
==============================================

The W-block determinant ratio det(A)/det(A_{k-1}) bounds the smallest
eigenvalue from above and decays like |t|^{2k}. This script tabulates
lambda_min, the ratio and both closed-form bounds, then writes the curves
for k = 1, 3, 5, 7, 9 to a CSV file for plotting elsewhere.
"""

import csv
import sys
from fractions import Fraction

from kohn_spectra import bound_chain, sweep

t = Fraction(1, 2)
print(f"{'k':>3} {'lambda_min':>12} {'det ratio':>12} {'sqrt(k) bound':>14} {'corrected':>12}")
for k in (1, 2, 5, 10, 15, 20):
    r = bound_chain(k, t)
    print(f"{k:>3} {r.lambda_min:12.4e} {r.det_ratio:12.4e} {r.analytic_bound:14.4e} {r.corrected_bound:12.4e}")

# %%
# Odd-degree curves over 0 < |t| < 1. Each column decreases with k at every t.
grid = [Fraction(n, 20) for n in range(1, 20)]
rows = [r for r in sweep(9, grid, "odd") if r.k in (1, 3, 5, 7, 9)]
writer = csv.writer(sys.stdout)
writer.writerow(["t", "k", "lambda_min"])
for r in rows:
    writer.writerow([float(r.t_abs), 2 * r.k - 1, f"{r.lambda_min:.6g}"])
