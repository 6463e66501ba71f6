"""Normality testing with the empirical characteristic function.

The single-point ECF test (``ecft_test``), the Epps-Pulley test
(``ep_test``), five classical comparison tests, seeded samplers for the
usual symmetric alternatives and a deterministic Monte Carlo harness.
"""
__version__ = "0.1.0"

from .classical import (
    TEST_NAMES,
    TestResult,
    anderson_darling,
    dagostino_pearson,
    jarque_bera,
    lilliefors,
    shapiro_wilk,
)
from .distributions import (
    Laplace,
    Logistic,
    Normal,
    NormalMixture,
    RngStream,
    StudentT,
    Uniform01,
    draw_sample,
    parse_spec,
)
from .epps_pulley import PUBLISHED_EP_TABLE, EpCriticalTable, ep_quadrature_oracle, ep_statistic, ep_test
from .errors import (
    DegenerateSample,
    EmptyInput,
    InvalidParameters,
    InvalidPoint,
    NormalityError,
    ParseError,
    SimulationError,
    TooLarge,
    TooSmall,
    UnsupportedAlpha,
    ZeroModulus,
)
from .harness import (
    PowerTable,
    SimulationConfig,
    bias_curve,
    estimate_null_percentile,
    estimate_power,
    estimate_type1,
    variance_curve,
)
from .stat_core import Sample, StudentizedSample, asymptotic_coeff, ecf_at, ecft_test, studentize, vn_statistic
from .suite import run_test
