"""Thermal multiphoton Jaynes-Cummings Bloch-vector dynamics.

Closed-form evolution of a two-level system exchanging l photons with a
thermal field mode, discrete-time trajectory statistics (scale invariance,
equidistribution, symmetry), and a continued-fraction pipeline that predicts
the times where the longitudinal Bloch component nearly vanishes.
"""

from .analysis import (
    CloudMetricConfig,
    EpsilonSchedule,
    PointCloud,
    SamplingPlan,
    ScanHit,
    cloud_distance,
    reflection_asymmetry,
    sample_cloud,
    sample_trajectory,
    scale_invariance_check,
    weyl_discrepancy,
    zero_scan,
)
from .diophantine import (
    CandidateSet,
    CandidateSpec,
    Convergent,
    FilterSpec,
    SurdCF,
    blue_curves,
    build_candidate_set,
    convergents,
    expand_surd,
    filter_candidates,
)
from .errors import (
    BoundsViolation,
    ConfigError,
    DegenerateStep,
    DomainError,
    JCBlochError,
    NormalizationError,
    PrecisionError,
    TruncationOverflow,
    TruncationTooSmall,
)
from .model import (
    BlochVector,
    ModelParams,
    SeriesConfig,
    TrajectoryFrame,
    a_elements,
    bloch_propagate,
    eigen_d,
    eigen_d_prime,
    l3_cosine_form,
    l_coefficients,
)
from .oracle import FockTruncation, evolve_and_trace, truncation_for
from .precision import PrecisionBudget, cos_two_pi_frac, frac_of_surd_multiple, isqrt_floor

__version__ = "0.1.0"
