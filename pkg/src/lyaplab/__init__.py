"""lyaplab: Monte Carlo laboratory for Lyapunov and generalized Lyapunov
exponents of linear systems driven by stationary isotropic matrix noise."""

from .processes import (
    IsotropicKernel,
    CorrelationShape,
    ProcessSpec,
    SamplePath,
    KernelReport,
    KernelValidationError,
    CumulantIntegral,
    kernel_validate,
    sample_path,
    cumulant_integrals,
    telegraph_cgf_oracle,
    realization_rng,
)
from .evolution import (
    SCHEMES,
    EvolutionState,
    WedgeNorms,
    StepRejectedError,
    step,
    wedge_norms,
    wedge_norms_gram,
    det_residual,
    reorthonormalize,
    split_frame_components,
)
from .estimators import (
    LEEstimate,
    GLEEstimate,
    RateFunctionTable,
    EstimateRejectedError,
    estimate_le,
    estimate_gle,
    estimate_scalar_cgf,
    estimate_scalar_cgf_from_spec,
    empirical_rate_function,
    lyapunov_from_gle,
)
from .analytics import (
    GLEShiftVector,
    gle_shift_vector,
    CGFModel,
    GaussianDiagonalCGF,
    TelegraphCGF,
    TableCGF,
    ShiftedCGF,
    gle_shift,
    analytic_gle_gaussian,
    analytic_lyapunov_gaussian,
    LegendreTable,
    legendre_transform,
    legendre_transform_product,
    EffectiveDeltaModel,
    effective_delta_model,
    FNDeltaCheck,
    fn_delta_check_integrals,
    fn_delta_scalar_check,
)

__version__ = "0.1.0"
