"""Discrete-time trajectory statistics: sampling, equidistribution, scans.

Sampling the Bloch trajectory at a fixed step dt with pi < dt (mod 2*pi)
makes the reduced phases n*dt mod 2*pi behave like a uniform pseudorandom
sequence, so the scatter of (S_x, S_z) points converges to a distribution
that does not depend on the step.  This module quantifies that picture:
Weyl exponential sums measure equidistribution, a histogram L1 metric turns
"the clouds look the same" into a number, and the zero scan collects the
sampled times where |S_z| drops below a temperature-dependent threshold.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BoundsViolation, DegenerateStep
from .model import BlochVector, ModelParams, SeriesConfig, TrajectoryFrame, l_series

__all__ = [
    "SamplingPlan",
    "EpsilonSchedule",
    "DEFAULT_SCHEDULES",
    "default_schedule",
    "PointCloud",
    "ScanHit",
    "ScaleCheckResult",
    "CloudMetricConfig",
    "sample_trajectory",
    "sample_cloud",
    "weyl_sum_direct",
    "weyl_sum_closed_form",
    "weyl_discrepancy",
    "zero_scan",
    "cloud_distance",
    "scale_invariance_check",
    "reflection_asymmetry",
    "log_beta_grid",
]

TWO_PI = 2.0 * math.pi

# Resonance tolerance for m*dt mod 2*pi, measured with the IEEE remainder.
_DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class SamplingPlan:
    """Uniform sampling grid t_n = n*step for n = 0..n_points.

    The pseudorandom-congruence picture needs pi < dt (mod 2*pi); violating it
    is allowed (the series evaluates regardless) but flagged.  An optional
    scale factor s replaces the step by s*dt; the admissible window keeping
    the rescaled cloud statistically identical is
    pi/(dt mod 2*pi) < s < 2*pi/(dt mod 2*pi).
    """

    dt: float
    n_points: int
    s: float | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        if self.n_points < 0:
            raise ValueError(f"n_points must be >= 0, got {self.n_points!r}")
        if self.s is not None and (not self.s > 0 or not math.isfinite(self.s)):
            raise ValueError(f"s must be finite and > 0, got {self.s!r}")

    @property
    def step(self) -> float:
        return self.dt * self.s if self.s is not None else self.dt

    def scale_window(self) -> tuple[float, float]:
        r = self.dt % TWO_PI
        return math.pi / r, TWO_PI / r

    def pseudorandom_ok(self) -> bool:
        return (self.dt % TWO_PI) > math.pi and (self.step % TWO_PI) > math.pi

    def times(self) -> np.ndarray:
        return np.arange(self.n_points + 1, dtype=float) * self.step


@dataclass(frozen=True)
class EpsilonSchedule:
    """Temperature-dependent zero-scan threshold and sample budget.

    eps(beta) = eps0 on [2, 5] and eps0*exp(c0*(2 - beta)) on [0.5, 2);
    the sample count steps down from n0 by factors 1, 2, 5, 10 across the
    bands [0.5,1), [1,2), [2,3), [3,5].
    """

    eps0: float
    c0: float
    n0: int = 1_000_000

    def __post_init__(self) -> None:
        if not self.eps0 > 0:
            raise ValueError(f"eps0 must be > 0, got {self.eps0!r}")
        if not self.c0 > 0:
            raise ValueError(f"c0 must be > 0, got {self.c0!r}")
        if self.n0 < 1:
            raise ValueError(f"n0 must be >= 1, got {self.n0!r}")

    @staticmethod
    def _check_beta(beta: float) -> None:
        if not 0.5 <= beta <= 5.0:
            raise ValueError(f"schedule covers beta in [0.5, 5.0], got {beta!r}")

    def epsilon(self, beta: float) -> float:
        self._check_beta(beta)
        if beta >= 2.0:
            return self.eps0
        return self.eps0 * math.exp(self.c0 * (2.0 - beta))

    def sample_count(self, beta: float) -> int:
        self._check_beta(beta)
        if beta < 1.0:
            return self.n0
        if beta < 2.0:
            return self.n0 // 2
        if beta < 3.0:
            return self.n0 // 5
        return self.n0 // 10


# Reference per-multiplicity schedule constants (eps0, c0).
DEFAULT_SCHEDULES = {
    1: (0.0035, 0.7),
    2: (0.009, 0.6),
    3: (0.0024, 1.5),
    4: (0.009, 0.7),
}


def default_schedule(l: int, n0: int = 1_000_000) -> EpsilonSchedule:
    try:
        eps0, c0 = DEFAULT_SCHEDULES[l]
    except KeyError:
        raise ValueError(f"no default schedule for l={l}; construct an EpsilonSchedule") from None
    return EpsilonSchedule(eps0, c0, n0)


class PointCloud:
    """Sampled (sx, sz) pairs held as an (N, 2) float array."""

    def __init__(self, points: np.ndarray, norm_tol: float | None = None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (N, 2), got {pts.shape}")
        if norm_tol is not None:
            worst = float(np.max(pts[:, 0] ** 2 + pts[:, 1] ** 2)) if len(pts) else 0.0
            if worst > 1.0 + norm_tol:
                raise ValueError(f"cloud leaves the unit disk: max sx^2+sz^2 = {worst!r}")
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    def reflected_x(self) -> "PointCloud":
        return PointCloud(self.points * np.array([-1.0, 1.0]))


class ScanHit(NamedTuple):
    beta: float
    n: int
    t: float
    sx: float
    sz: float


def sample_trajectory(
    params: ModelParams,
    plan: SamplingPlan,
    cfg: SeriesConfig = SeriesConfig(),
    initial: BlochVector = BlochVector(1.0, 0.0, 0.0),
) -> list[TrajectoryFrame]:
    """Evolve the initial Bloch vector over the whole sampling grid.

    Warns (does not fail) when the plan misses the pseudorandom window; the
    closed form is valid for any step, only the equidistribution argument
    needs it.
    """
    if not plan.pseudorandom_ok():
        warnings.warn(
            f"step {plan.step:g} has (step mod 2*pi) <= pi; the sampled phases are"
            " not in the pseudorandom regime",
            stacklevel=2,
        )
    t = plan.times()
    l1, l2, l3 = l_series(t, params, cfg)
    sx = l1 * initial.sx
    sy = l1 * initial.sy
    sz = l2 * initial.sz + l3
    return [
        TrajectoryFrame(n, float(t[n]), BlochVector(float(sx[n]), float(sy[n]), float(sz[n])))
        for n in range(len(t))
    ]


def sample_cloud(
    params: ModelParams,
    plan: SamplingPlan,
    cfg: SeriesConfig = SeriesConfig(),
    initial_sx: float = 1.0,
) -> PointCloud:
    """Vectorized (S_x, S_z) cloud for an xz-plane initial vector (sx0, 0, 0)."""
    t = plan.times()
    l1, _, l3 = l_series(t, params, cfg)
    cloud = np.column_stack([l1 * initial_sx, l3])
    return PointCloud(cloud, norm_tol=2.0 * cfg.tail_tolerance + 1e-13)


def _check_degenerate(dt: float, m_max: int) -> None:
    for m in range(1, m_max + 1):
        if abs(math.remainder(m * dt, TWO_PI)) < _DEGENERATE_TOL:
            raise DegenerateStep(f"m*dt is a multiple of 2*pi at m={m} (dt={dt!r})")


def weyl_sum_direct(plan: SamplingPlan, m: int) -> complex:
    """(1/(N+1)) sum_n exp(i*m*x_n) with x_n = n*step mod 2*pi, summed directly."""
    x = np.remainder(np.arange(plan.n_points + 1, dtype=float) * plan.step, TWO_PI)
    return complex(np.exp(1j * m * x).sum() / (plan.n_points + 1))


def weyl_sum_closed_form(plan: SamplingPlan, m: int) -> complex:
    """Geometric-sum value of the same average, reduced with the IEEE remainder."""
    n1 = plan.n_points + 1
    num = 1.0 - np.exp(1j * math.remainder(m * n1 * plan.step, TWO_PI))
    den = 1.0 - np.exp(1j * math.remainder(m * plan.step, TWO_PI))
    return complex(num / den / n1)


def weyl_discrepancy(plan: SamplingPlan, m_max: int) -> float:
    """Largest exponential-sum magnitude over frequencies 1..m_max.

    Magnitudes for -m equal those for +m, so only positive m are scanned.
    Raises DegenerateStep when some m*step resonates with 2*pi, where the
    average stays at 1 and the sequence cannot equidistribute.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max!r}")
    _check_degenerate(plan.step, m_max)
    x = np.remainder(np.arange(plan.n_points + 1, dtype=float) * plan.step, TWO_PI)
    best = 0.0
    for m in range(1, m_max + 1):
        best = max(best, abs(complex(np.exp(1j * m * x).sum())) / (plan.n_points + 1))
    return best


def zero_scan(
    params: ModelParams,
    plan: SamplingPlan,
    sched: EpsilonSchedule,
    beta_grid: Sequence[float],
    cfg: SeriesConfig = SeriesConfig(),
    jobs: int = 1,
) -> list[ScanHit]:
    """All sampled frames with |S_z| below the schedule's threshold, per beta.

    Initial vector (1, 0, 0).  Rows are ordered by the beta grid first, frame
    index second, independent of the worker count.
    """

    def one_beta(beta: float) -> list[ScanHit]:
        eps = sched.epsilon(beta)
        count = sched.sample_count(beta)
        t = np.arange(count + 1, dtype=float) * plan.step
        l1, _, l3 = l_series(t, replace(params, beta=beta), cfg)
        idx = np.nonzero(np.abs(l3) < eps)[0]
        return [ScanHit(beta, int(n), float(t[n]), float(l1[n]), float(l3[n])) for n in idx]

    betas = list(beta_grid)
    for beta in betas:
        sched._check_beta(beta)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(one_beta, betas))
    else:
        chunks = [one_beta(beta) for beta in betas]
    return [hit for chunk in chunks for hit in chunk]


def _normalized_histogram(cloud: PointCloud, bins: int) -> np.ndarray:
    # Points outside the unit square are clamped into the border bins so two
    # disjoint clouds always reach the maximal distance of 2.
    x = np.clip(cloud.points[:, 0], -1.0, 1.0)
    z = np.clip(cloud.points[:, 1], -1.0, 1.0)
    hist, _, _ = np.histogram2d(x, z, bins=bins, range=[[-1.0, 1.0], [-1.0, 1.0]])
    total = hist.sum()
    if total == 0:
        raise ValueError("empty cloud")
    return hist / total


def cloud_distance(a: PointCloud, b: PointCloud, bins: int = 64) -> float:
    """L1 distance between normalized 2D histograms on [-1, 1]^2.

    0 for identical clouds, 2 for clouds with disjoint support.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins!r}")
    return float(np.abs(_normalized_histogram(a, bins) - _normalized_histogram(b, bins)).sum())


@dataclass(frozen=True)
class CloudMetricConfig:
    """Cloud-metric settings with thresholds frozen by the calibration runs
    in tests/test_acceptance.py (midpoints between the same-distribution and
    cross-distribution distance bands at N = 400000, bins = 64)."""

    bins: int = 64
    scale_threshold: float = 0.57
    symmetry_threshold: float = 0.67


@dataclass(frozen=True)
class ScaleCheckResult:
    distance: float
    control_distance: float
    threshold: float
    passed: bool
    control_separated: bool


def scale_invariance_check(
    params: ModelParams,
    plan: SamplingPlan,
    cfg: SeriesConfig = SeriesConfig(),
    metric: CloudMetricConfig = CloudMetricConfig(),
    control_beta: float | None = None,
) -> ScaleCheckResult:
    """Compare the base cloud against its rescaled twin and a control.

    The rescaled cloud (step s*dt) must land within `threshold` of the base
    cloud in histogram L1 distance, while the control cloud at a doubled (or
    given) temperature parameter must exceed it.  Rejects plans outside the
    admissible window, where the equidistribution argument breaks.
    """
    if plan.s is None:
        raise ValueError("plan.s must be set for a scale-invariance check")
    lo, hi = plan.scale_window()
    if not lo < plan.s < hi:
        raise BoundsViolation(
            f"scale factor {plan.s:g} outside the admissible window ({lo:.6f}, {hi:.6f})"
        )
    if (plan.dt % TWO_PI) <= math.pi or (plan.step % TWO_PI) <= math.pi:
        raise BoundsViolation(
            f"pseudorandom regime requires pi < step mod 2*pi for dt={plan.dt:g} and s*dt={plan.step:g}"
        )

    base_plan = SamplingPlan(plan.dt, plan.n_points)
    base = sample_cloud(params, base_plan, cfg)
    scaled = sample_cloud(params, plan, cfg)
    distance = cloud_distance(base, scaled, metric.bins)

    control_beta = 2.0 * params.beta if control_beta is None else control_beta
    control = sample_cloud(replace(params, beta=control_beta), base_plan, cfg)
    control_distance = cloud_distance(base, control, metric.bins)

    return ScaleCheckResult(
        distance=distance,
        control_distance=control_distance,
        threshold=metric.scale_threshold,
        passed=distance < metric.scale_threshold,
        control_separated=control_distance > metric.scale_threshold,
    )


def reflection_asymmetry(cloud: PointCloud, bins: int = 64) -> float:
    """Histogram distance between a cloud and its S_x mirror image."""
    return cloud_distance(cloud, cloud.reflected_x(), bins)


def log_beta_grid(lo: float = 0.5, hi: float = 5.0, count: int = 100) -> list[float]:
    """Logarithmically spaced temperature-parameter grid (inclusive ends)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count!r}")
    if count == 1:
        return [lo]
    return [float(v) for v in np.geomspace(lo, hi, count)]
