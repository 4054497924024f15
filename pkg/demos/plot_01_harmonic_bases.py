"""
Harmonic bases and box_b on the sphere
======================================

Two ways to build a basis of H_{p,q}: solve Laplace's equation on the
monomials of bidegree (p, q), or differentiate |z|^{-2} and restrict to the
sphere. The derivative basis is orthogonal, which is why the rest of the
package uses it.
"""

from kohn_spectra import Polynomial, apply_boxb, basis_hm, basis_hpq_solve, decompose
from kohn_spectra.poly import sphere_inner_product

# %%
# Degree 3, in the canonical order (bidegree (0,3) first).
for f in basis_hm(3):
    print(f)

# %%
# Both constructions span the same space; only the derivative one is
# orthogonal for the sphere inner product.
solved = basis_hpq_solve(1, 2).elements
print([str(f) for f in solved])
gram = [[sphere_inner_product(f, g) for g in basis_hm(3)[4:8]] for f in basis_hm(3)[4:8]]
print(gram)

# %%
# box_b acts on H_{p,q} as multiplication by pq + q.
for f in basis_hm(3):
    g = apply_boxb(f)
    p, q = f.bidegree
    assert g == f.scale(p * q + q)
print("box_b eigenvalues on H_3:", sorted({p * q + q for p, q in (f.bidegree for f in basis_hm(3))}))

# %%
# Any homogeneous polynomial splits as sum |z|^{2j} p_{m-2j}, p harmonic.
for j, part in decompose(Polynomial.parse("z1 zb1")):
    print(j, part)
