"""Exact and numerical spectra of the perturbed Kohn Laplacian on the 3-sphere."""

from .harmonics import HarmonicBasis, basis_hm, basis_hpq_derivative, basis_hpq_solve, decompose
from .operator import (
    OperatorMatrix,
    VWBlock,
    assemble_full,
    closed_form_block,
    spectrum_multiplicity,
    verify_invariance,
    vw_chain,
)
from .poly import (
    ComplexRational,
    Monomial,
    Polynomial,
    RossiParam,
    apply_boxb,
    apply_boxbt,
    apply_L,
    apply_Lbar,
    derive,
    laplacian,
    sphere_inner_product,
)
from .tridiag import (
    BoundReport,
    SymTridiag,
    bound_chain,
    continuants,
    det_closed_form,
    interlacing_check,
    lambda_min,
    sweep,
    symmetrize,
)

__version__ = "0.1.0"
