"""Closed-form Bloch-vector dynamics of the thermal l-photon Jaynes-Cummings model.

A two-level system exchanges l photons at a time with a single field mode that
starts in a Bose-Einstein thermal state.  Tracing out the field leaves three
time-dependent transfer coefficients (l1, l2, l3): the transverse Bloch
components are scaled by l1, the longitudinal one is scaled by l2 and shifted
by l3.  Each coefficient is a thermal average over photon-number sectors, i.e.
a geometrically weighted series of cosines whose angular frequencies are the
square roots of the ladder coupling eigenvalues.

Everything here runs in double precision.  Arguments stay accurate for times
up to ~1e7; for the astronomically large times of the Diophantine pipeline use
:mod:`jcbloch.diophantine`, which reduces phases with certified big-integer
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NormalizationError, TruncationOverflow

__all__ = [
    "ModelParams",
    "BlochVector",
    "SeriesConfig",
    "TrajectoryFrame",
    "AElements",
    "LCoefficients",
    "eigen_d",
    "eigen_d_prime",
    "truncation_index",
    "thermal_weights",
    "a_series",
    "l_series",
    "a_elements",
    "l_coefficients",
    "l3_cosine_form",
    "bloch_propagate",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration: photon multiplicity l, coupling g, photon
    frequency omega and inverse temperature beta (k_B = hbar = 1).

    ``beta = math.inf`` is the zero-temperature marker: only the photon vacuum
    sector survives.  The two-level splitting is pinned to l*omega (zero
    detuning), so it is never stored separately.  All observables depend on g
    only through g**2; negative g is accepted and equivalent to -g.
    """

    l: int = 2
    g: float = 1.0
    omega: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if int(self.l) != self.l or self.l < 1:
            raise ValueError(f"l must be a positive integer, got {self.l!r}")
        if self.g == 0.0 or not math.isfinite(self.g):
            raise ValueError(f"g must be finite and nonzero, got {self.g!r}")
        if not self.omega > 0.0 or not math.isfinite(self.omega):
            raise ValueError(f"omega must be > 0, got {self.omega!r}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0 (use math.inf for T = 0), got {self.beta!r}")

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    @property
    def boltzmann_factor(self) -> float:
        """b = exp(-beta*omega); exactly 0.0 at the zero-temperature marker."""
        return 0.0 if self.zero_temperature else math.exp(-self.beta * self.omega)

    def is_normalized(self) -> bool:
        """True when g = omega = 1, the normalization several closed forms assume."""
        return self.g == 1.0 and self.omega == 1.0


@dataclass(frozen=True)
class BlochVector:
    """Bloch components of the two-level density matrix rho = (I + S.sigma)/2."""

    sx: float
    sy: float
    sz: float

    def norm(self) -> float:
        return math.sqrt(self.sx**2 + self.sy**2 + self.sz**2)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.sx, self.sy, self.sz)


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation policy for the thermal photon-number series.

    The cutoff index is chosen so the geometric tail of the weights,
    (1-b) * sum_{n > n_max} b**n = b**(n_max+1), stays below tail_tolerance.
    """

    tail_tolerance: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if not 0.0 < self.tail_tolerance < 1.0:
            raise ValueError(f"tail_tolerance must be in (0, 1), got {self.tail_tolerance!r}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms!r}")


@dataclass(frozen=True)
class TrajectoryFrame:
    """One sampled point: frame index n, time t = n*step, Bloch vector."""

    n: int
    t: float
    bloch: BlochVector


class AElements(NamedTuple):
    a0000: float
    a1100: float
    a0101: float


class LCoefficients(NamedTuple):
    l1: float
    l2: float
    l3: float


def eigen_d(n: int, params: ModelParams) -> float:
    """Squared Rabi frequency of the pair coupling n and n+l photons:
    g**2 * (n+1)(n+2)...(n+l).  Exact in integer arithmetic when g = 1."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return params.g * params.g * math.prod(range(n + 1, n + params.l + 1))


def eigen_d_prime(n: int, params: ModelParams) -> float:
    """Downward-ladder companion: g**2 * n(n-1)...(n-l+1) for n >= l, else 0.
    Sectors with fewer than l photons cannot emit downward."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n <= params.l - 1:
        return 0.0
    return params.g * params.g * math.prod(range(n - params.l + 1, n + 1))


def truncation_index(params: ModelParams, cfg: SeriesConfig) -> int:
    """Smallest safe series cutoff: ceil(ln(1/tol)/(beta*omega)) + 2 guard terms.

    Raises TruncationOverflow when the cutoff would exceed cfg.max_terms,
    which signals that beta*omega is too small for the configured cap.
    """
    if params.zero_temperature:
        return 0
    n = math.ceil(math.log(1.0 / cfg.tail_tolerance) / (params.beta * params.omega)) + 2
    n = max(n, 0)
    if n > cfg.max_terms:
        raise TruncationOverflow(
            f"series needs {n} terms for tail < {cfg.tail_tolerance:g} at "
            f"beta*omega = {params.beta * params.omega:g}, cap is {cfg.max_terms}"
        )
    return n


def thermal_weights(params: ModelParams, n_max: int) -> np.ndarray:
    """Bose-Einstein weights (1-b) * b**n for n = 0..n_max (delta on n=0 at T=0)."""
    if params.zero_temperature:
        w = np.zeros(n_max + 1)
        w[0] = 1.0
        return w
    b = params.boltzmann_factor
    return (1.0 - b) * b ** np.arange(n_max + 1, dtype=float)


def a_series(t: np.ndarray, params: ModelParams, cfg: SeriesConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized transition elements (a0000, a1100, a0101) at an array of times.

    Accumulates sector by sector so memory stays O(len(t)).  The upward
    thermal average for the excited-to-ground channel carries an extra b**l
    because it is fed by sectors holding at least l photons; its coupling
    ratio g**2 * (n+1)...(n+l) / D_n cancels exactly for every g, so only the
    shifted weight remains.
    """
    t = np.asarray(t, dtype=float)
    n_max = truncation_index(params, cfg)
    weights = thermal_weights(params, n_max)
    bl = params.boltzmann_factor ** params.l

    a0101 = np.zeros_like(t)
    a0000 = np.zeros_like(t)
    a1100 = np.zeros_like(t)
    for n in range(n_max + 1):
        w = weights[n]
        if w == 0.0:
            continue
        c = np.cos(math.sqrt(eigen_d(n, params)) * t)
        c2 = c * c
        a0000 += w * c2
        a1100 += (w * bl) * (1.0 - c2)
        if n >= params.l:
            cp = np.cos(math.sqrt(eigen_d_prime(n, params)) * t)
            a0101 += w * (c * cp)
        else:
            a0101 += w * c
    return a0000, a1100, a0101


def l_series(t: np.ndarray, params: ModelParams, cfg: SeriesConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized transfer coefficients: l1 = a0101, l2 = a0000 - a1100,
    l3 = a0000 + a1100 - 1."""
    a0000, a1100, a0101 = a_series(t, params, cfg)
    return a0101, a0000 - a1100, a0000 + a1100 - 1.0


def a_elements(t: float, params: ModelParams, cfg: SeriesConfig = SeriesConfig()) -> AElements:
    """The three nonzero photon-traced transition elements at time t.

    a0000 maps ground-state population to itself, a1100 feeds it from the
    excited state, a0101 carries the coherence.  All remaining elements vanish
    identically because the interaction conserves the excitation number.
    """
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    a0000, a1100, a0101 = a_series(np.array([t]), params, cfg)
    return AElements(float(a0000[0]), float(a1100[0]), float(a0101[0]))


def l_coefficients(t: float, params: ModelParams, cfg: SeriesConfig = SeriesConfig()) -> LCoefficients:
    """Transfer coefficients at a single time: l1 = a0101,
    l2 = a0000 - a1100, l3 = a0000 + a1100 - 1."""
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    l1, l2, l3 = l_series(np.array([t]), params, cfg)
    return LCoefficients(float(l1[0]), float(l2[0]), float(l3[0]))


def l3_cosine_form(t: float, params: ModelParams, cfg: SeriesConfig = SeriesConfig()) -> float:
    """l3 via its single-cosine thermal series, valid only for g = omega = 1:

        l3(t) = -(1/2) (1 - b**l) [1 - (1-b) sum_n b**n cos(2 sqrt(D_n) t)]

    Must agree with l_coefficients(...).l3 within twice the tail tolerance.
    """
    if not params.is_normalized():
        raise NormalizationError(
            f"l3_cosine_form requires g = omega = 1, got g={params.g!r}, omega={params.omega!r}"
        )
    n_max = truncation_index(params, cfg)
    weights = thermal_weights(params, n_max)
    bl = params.boltzmann_factor ** params.l
    acc = 0.0
    for n in range(n_max + 1):
        if weights[n] == 0.0:
            continue
        acc += weights[n] * math.cos(2.0 * math.sqrt(eigen_d(n, params)) * t)
    return -0.5 * (1.0 - bl) * (1.0 - acc)


def bloch_propagate(
    s0: BlochVector, t: float, params: ModelParams, cfg: SeriesConfig = SeriesConfig()
) -> BlochVector:
    """Evolve a Bloch vector: (l1*sx, l1*sy, l2*sz + l3).

    The transverse plane is uniformly contracted, the z-component relaxes
    toward the thermal fixed point.  For s0 = (1, 0, 0) the motion stays in
    the xz-plane, giving (l1, 0, l3).
    """
    l1, l2, l3 = l_coefficients(t, params, cfg)
    return BlochVector(l1 * s0.sx, l1 * s0.sy, l2 * s0.sz + l3)
