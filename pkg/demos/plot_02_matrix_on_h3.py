"""
The perturbed operator on H_3
=============================

Assemble box_b^t on the 16-dimensional space H_3(S^3) by brute force and
look at its structure: four diagonal values, eight coupled pairs, and a
spectrum that depends on |t| only.
"""

from fractions import Fraction

import numpy as np

from kohn_spectra import ComplexRational, assemble_full
from kohn_spectra.poly import format_coefficient

t = Fraction(1, 2)
M = assemble_full(3, t)
print("h =", M.h)

# %%
# Columns hold the coordinates of the image of each basis vector; h is
# factored out of every entry.
for row in M.entries:
    print(" ".join(format_coefficient(c).rjust(6) for c in row))

# %%
# Coupled entries come in pairs whose product is 12|t|^2.
pairs = [(i, j, M.entries[i, j] * M.entries[j, i])
         for i in range(16) for j in range(i + 1, 16) if M.entries[i, j] != 0]
print(pairs)

# %%
# Rotating t by a phase leaves the spectrum unchanged.
rotated = assemble_full(3, ComplexRational(Fraction(3, 10), Fraction(2, 5)))
print(np.allclose(M.eigenvalues(), rotated.eigenvalues()))
print(M.eigenvalues())
