"""Linear variable screening (SIS, HOLP) and its consistency conditions."""

from .bounds import holp_sample_bound, sis_sample_bound
from .conditions import (
    Ar,
    Bounded,
    ConsistencyVerdict,
    IcReport,
    RddReport,
    Witness,
    adversarial_beta,
    consistency_check,
    screen_constant,
    corollary1_sufficient,
    dom_necessary_check,
    ic_check,
    ic_sign_enumeration,
    ic_worst_case,
    rdd_brute_force,
    rdd_check,
    rdd_max_c0,
    signed_rdd_margin,
    sparse_riesz,
)
from .errors import NumericalError, ScreeningError, ValidationError
from .model import (
    DesignMatrix,
    NoiseSpec,
    RegressionInstance,
    SparseCoefficients,
    assemble,
    membership,
    standardize,
)
from .randomdesign import (
    Covariance,
    CovarianceSpec,
    SeedPath,
    materialize,
    sample_beta,
    sample_design,
    sample_noise,
)
from .screeners import (
    AncillaryMatrix,
    Method,
    ScreeningMatrix,
    Submodel,
    Threshold,
    TopD,
    build_holp,
    build_sis,
    estimate,
    noise_shift,
    screen,
    screening_matrix,
    select,
)

__version__ = "0.1.0"
