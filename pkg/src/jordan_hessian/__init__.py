"""Metrised Jordan algebras and Hessian potentials with parallel derivatives."""

from .algebra import (
    BilinearForm,
    Family,
    JordanAlgebra,
    MetrisedAlgebra,
    SpectralDecomposition,
    componentwise,
    determinant,
    direct_sum,
    find_unit,
    integrability_residual,
    invariance_residual,
    inverse,
    jordan_residual,
    left_mult,
    logdet,
    metrised,
    multiply,
    power,
    spectral,
    spin,
    sym,
    trace_form,
)
from .config import StencilConfig, VerificationConfig
from .geometry import (
    difference_tensor,
    isomorphism_residual,
    parallel_transport,
    reconstruct_algebra,
    recover_center,
    recover_nu,
    recover_unit,
    residual_first_parallel,
    residual_third_parallel,
    sample_tensors,
)
from .numdiff import fd_consistency, fd_derivative
from .potential import (
    BarrierSpec,
    PotentialField,
    barrier_spec,
    canonical_barrier,
    homogeneity_parameter,
    logdet_gradient,
    logdet_hessian,
    logdet_potential,
    quadratic_field,
    series_field,
    series_gradient,
    series_hessian,
    series_potential,
    series_third,
)

__version__ = "0.1.0"
