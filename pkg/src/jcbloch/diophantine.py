"""Continued fractions of quadratic surds and the near-zero-S_z time filter.

The longitudinal Bloch component vanishes whenever every cosine in its thermal
series sits near 1 simultaneously.  Truncating the series at second order in
the Boltzmann factor b turns that into a single inequality on three cosines
evaluated at t = q*pi, and the convergent denominators of sqrt(l+1)/k are the
natural candidates for q: they make the second cosine's phase nearly integral
by construction.  Everything on the integer side (expansion, convergents,
candidate sets) is exact; the only approximate step is the certified cosine
from :mod:`jcbloch.precision`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import NormalizationError
from .model import ModelParams, SeriesConfig, truncation_index
from .precision import PrecisionBudget, cos_two_pi_frac, frac_of_surd_multiple, isqrt_floor

__all__ = [
    "SurdCF",
    "Convergent",
    "CandidateSpec",
    "CandidateSet",
    "FilterSpec",
    "CurvePoint",
    "expand_surd",
    "convergents",
    "default_candidate_spec",
    "build_candidate_set",
    "default_filter_spec",
    "filter_threshold",
    "filter_margin",
    "filter_candidates",
    "sz_bound_after_filter",
    "bloch_at_candidate_time",
    "blue_curves",
    "save_candidate_set",
    "load_candidate_set",
]


@dataclass(frozen=True)
class SurdCF:
    """Simple continued fraction of sqrt(m)/k.

    ``quotients`` holds a0, a1, ... with a_i >= 1 for i >= 1.  For rational
    sqrt(m)/k the expansion is finite and ``terminated`` is True; otherwise it
    is the leading slice of an eventually periodic expansion.
    """

    m: int
    k: int
    quotients: tuple[int, ...]
    terminated: bool = False


class Convergent(NamedTuple):
    """Numerator/denominator of one truncation; always in lowest terms."""

    p: int
    q: int


def expand_surd(m: int, k: int, count: int) -> SurdCF:
    """First count+1 partial quotients of sqrt(m)/k by exact integer recurrence.

    Scaling to (P + sqrt(m*k**2)) / Q with Q0 = k**2 keeps the classical
    divisibility invariant Q | (D - P**2) even when k does not divide m - P**2.
    No floating point is involved.
    """
    if m < 1 or k < 1:
        raise ValueError(f"m and k must be >= 1, got m={m}, k={k}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")

    root = isqrt_floor(m)
    if root * root == m:
        # Rational value root/k: Euclid gives the canonical finite expansion.
        a, b = root, k
        quotients: list[int] = []
        while b:
            quotients.append(a // b)
            a, b = b, a % b
        done = len(quotients) <= count + 1
        return SurdCF(m, k, tuple(quotients[: count + 1]), terminated=done)

    big_d = m * k * k
    sqrt_d = isqrt_floor(big_d)
    p_state, q_state = 0, k * k
    quotients = []
    for _ in range(count + 1):
        a = (p_state + sqrt_d) // q_state
        quotients.append(a)
        p_state = a * q_state - p_state
        num = big_d - p_state * p_state
        if num % q_state:
            raise AssertionError("surd recurrence divisibility invariant broken")
        q_state = num // q_state
    return SurdCF(m, k, tuple(quotients), terminated=False)


def convergents(cf: SurdCF) -> list[Convergent]:
    """All convergents p_m/q_m of the expansion via the three-term recurrence
    p_m = a_m p_{m-1} + p_{m-2}, q_m = a_m q_{m-1} + q_{m-2}."""
    if not cf.quotients:
        raise ValueError("continued fraction has no quotients")
    p_prev, q_prev = 1, 0
    p_before, q_before = 0, 1
    out: list[Convergent] = []
    for a in cf.quotients:
        p = a * p_prev + p_before
        q = a * q_prev + q_before
        out.append(Convergent(p, q))
        p_before, q_before = p_prev, q_prev
        p_prev, q_prev = p, q
    return out


@dataclass(frozen=True)
class CandidateSpec:
    """Which convergent denominators of sqrt(l+1)/k to collect.

    ``k_ranges`` lists (k, first_index, last_index) triples, so individual
    divisors may use their own index window.  When sqrt(l+1) is an integer the
    convergent route degenerates and the candidates are simply the integers
    0..enumeration_cap.
    """

    l: int
    k_ranges: tuple[tuple[int, int, int], ...] = ()
    include_zero: bool = True
    enumeration_cap: int = 2000

    def __post_init__(self) -> None:
        if self.l < 1:
            raise ValueError(f"l must be >= 1, got {self.l}")
        for k, lo, hi in self.k_ranges:
            if k < 1 or lo < 0 or hi < lo:
                raise ValueError(f"invalid k-range {(k, lo, hi)!r}")

    @property
    def radicand(self) -> int:
        return self.l + 1


def default_candidate_spec(l: int) -> CandidateSpec:
    """Reference index windows for each photon multiplicity.

    l=4 stops one index early for k=9, whose next denominator is enormous.
    """
    if l == 1:
        return CandidateSpec(l=1, k_ranges=tuple((k, 12, 39) for k in range(1, 5)))
    if l == 2:
        return CandidateSpec(l=2, k_ranges=tuple((k, 12, 59) for k in range(1, 8)))
    if l == 3:
        return CandidateSpec(l=3, enumeration_cap=2000)
    if l == 4:
        ranges = tuple((k, 8, 59) for k in range(1, 9)) + ((9, 8, 58),)
        return CandidateSpec(l=4, k_ranges=ranges)
    raise ValueError(f"no default candidate windows for l={l}; pass an explicit CandidateSpec")


@dataclass(frozen=True)
class CandidateSet:
    """Sorted, deduplicated candidate q values with their provenance.

    ``provenance`` maps each member to the tags that produced it, e.g.
    "sqrt3/2@17" for the denominator of the index-17 convergent of sqrt(3)/2.
    """

    members: tuple[int, ...]
    provenance: dict[int, tuple[str, ...]] = field(default_factory=dict)

    def __contains__(self, q: int) -> bool:
        return q in self.provenance or q in self.members

    def __len__(self) -> int:
        return len(self.members)


def build_candidate_set(spec: CandidateSpec) -> CandidateSet:
    """Union over k of the selected convergent denominators, plus {0}.

    Denominators repeat across divisors, so the union is genuinely smaller
    than the raw count; provenance keeps every source tag for audit.
    """
    prov: dict[int, list[str]] = {}
    if isqrt_floor(spec.radicand) ** 2 == spec.radicand:
        # sqrt(l+1) is an integer: every q aligns the leading phases already.
        for q in range(spec.enumeration_cap + 1):
            prov[q] = ["enumeration"]
    else:
        for k, lo, hi in spec.k_ranges:
            convs = convergents(expand_surd(spec.radicand, k, hi))
            for index in range(lo, hi + 1):
                q = convs[index].q
                prov.setdefault(q, []).append(f"sqrt{spec.radicand}/{k}@{index}")
        if spec.include_zero:
            prov.setdefault(0, []).append("zero")
    members = tuple(sorted(prov))
    return CandidateSet(members, {q: tuple(tags) for q, tags in prov.items()})


@dataclass(frozen=True)
class FilterSpec:
    """Parameters of the second-order near-zero test.

    ``epsilon`` bounds |S_z|; ``order`` fixes the expansion depth in b (only
    2 is implemented, matching the three-cosine inequality); the candidate
    time is t = q*pi/sqrt(time_divisor_squared).
    """

    beta: float = 2.0
    epsilon: float = 0.05
    order: int = 2
    time_divisor_squared: int = 1

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon!r}")
        if self.order != 2:
            raise ValueError("only the second-order (three-cosine) filter is implemented")
        if self.time_divisor_squared < 1:
            raise ValueError(f"time_divisor_squared must be >= 1, got {self.time_divisor_squared!r}")

    @property
    def boltzmann_factor(self) -> float:
        return math.exp(-self.beta)


# Reference filter epsilon for each multiplicity at beta = 2.
_DEFAULT_FILTER_EPSILON = {1: 0.0035, 2: 0.05, 3: 0.003, 4: 0.04}


def default_filter_spec(l: int, beta: float = 2.0) -> FilterSpec:
    try:
        eps = _DEFAULT_FILTER_EPSILON[l]
    except KeyError:
        raise ValueError(f"no default filter epsilon for l={l}; pass an explicit FilterSpec") from None
    return FilterSpec(beta=beta, epsilon=eps)


def _tail_expansion_coefficients(l: int) -> tuple[int, int, int]:
    """Coefficients of 1, b, b**2 in 1 / ((1-b)(1-b**l)): the number of ways
    to write each power as i + l*j."""
    return (1, 1 + (1 if l == 1 else 0), 1 + 2 // l)


def filter_threshold(l: int, fspec: FilterSpec) -> float:
    """Left-hand side of the second-order inequality: the three-cosine sum
    must exceed (1 + b + b**2) - 2*eps*(c0 + c1*b + c2*b**2)."""
    b = fspec.boltzmann_factor
    c0, c1, c2 = _tail_expansion_coefficients(l)
    return (1.0 + b + b * b) - 2.0 * fspec.epsilon * (c0 + c1 * b + c2 * b * b)


def _cosine_sum(q: int, l: int, fspec: FilterSpec, budget: PrecisionBudget | None = None) -> float:
    b = fspec.boltzmann_factor
    total = 0.0
    for n in range(3):
        d_n = math.prod(range(n + 1, n + l + 1))
        frac = frac_of_surd_multiple(d_n, fspec.time_divisor_squared, q, budget)
        total += b**n * cos_two_pi_frac(frac)
    return total


def filter_margin(q: int, l: int, fspec: FilterSpec) -> float:
    """Signed slack of the inequality at candidate q (positive = keep).

    Certified phases keep the result reproducible: the cosine error is below
    2*pi*1e-10, negligible against every observed margin.
    """
    return _cosine_sum(q, l, fspec) - filter_threshold(l, fspec)


def filter_candidates(mset: CandidateSet, params: ModelParams, fspec: FilterSpec) -> CandidateSet:
    """Keep the candidates whose three-cosine sum exceeds the threshold.

    The inequality 2*sqrt(D_n)*t = 2*pi*q*sqrt(D_n/r**2) assumes g = omega = 1.
    The temperature enters through fspec.beta; params supplies the
    multiplicity.  q = 0 always passes (all cosines equal 1).
    """
    if not params.is_normalized():
        raise NormalizationError(
            f"the filter inequality assumes g = omega = 1, got g={params.g!r}, omega={params.omega!r}"
        )
    budget = None
    if mset.members:
        budget = PrecisionBudget.for_multiplier(max(mset.members))
    threshold = filter_threshold(params.l, fspec)
    kept = [q for q in mset.members if _cosine_sum(q, params.l, fspec, budget) > threshold]
    return CandidateSet(tuple(kept), {q: mset.provenance.get(q, ()) for q in kept})


def sz_bound_after_filter(l: int, fspec: FilterSpec) -> float:
    """Rigorous |S_z(t_q)| bound implied by passing the second-order filter.

    Bounding the discarded series tail by b**3/(1-b) and unwinding the
    inequality gives |S_z| < (1 - b**l) * (b**3 + eps*(1-b)*(c0+c1*b+c2*b**2)).
    """
    b = fspec.boltzmann_factor
    c0, c1, c2 = _tail_expansion_coefficients(l)
    tail_sum = c0 + c1 * b + c2 * b * b
    return (1.0 - b**l) * (b**3 + fspec.epsilon * (1.0 - b) * tail_sum)


def bloch_at_candidate_time(
    q: int,
    params: ModelParams,
    cfg: SeriesConfig = SeriesConfig(),
    time_divisor_squared: int = 1,
) -> tuple[float, float]:
    """(S_x, S_z) at t = q*pi/sqrt(r**2) with certified phase reduction.

    cos(sqrt(D)*t) = cos(pi*q*sqrt(D/r**2)) = cos(2*pi*frac(q*sqrt(D/(4*r**2)))),
    so each term costs one big-integer square root however large q is.  The
    initial Bloch vector is (1, 0, 0).
    """
    if not params.is_normalized():
        raise NormalizationError(
            f"candidate times assume g = omega = 1, got g={params.g!r}, omega={params.omega!r}"
        )
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    n_max = truncation_index(params, cfg)
    b = params.boltzmann_factor
    bl = b**params.l
    budget = PrecisionBudget.for_multiplier(q)
    den = 4 * time_divisor_squared

    sx = 0.0
    a0000 = 0.0
    a1100 = 0.0
    for n in range(n_max + 1):
        w = (1.0 - b) * b**n if b else (1.0 if n == 0 else 0.0)
        if w == 0.0:
            continue
        d_n = math.prod(range(n + 1, n + params.l + 1))
        c = cos_two_pi_frac(frac_of_surd_multiple(d_n, den, q, budget))
        if n >= params.l:
            dp_n = math.prod(range(n - params.l + 1, n + 1))
            cp = cos_two_pi_frac(frac_of_surd_multiple(dp_n, den, q, budget))
        else:
            cp = 1.0
        sx += w * c * cp
        a0000 += w * c * c
        a1100 += (w * bl) * (1.0 - c * c)
    return sx, a0000 + a1100 - 1.0


class CurvePoint(NamedTuple):
    beta: float
    q: int
    sx: float


def blue_curves(
    mtilde: CandidateSet,
    params_grid: Iterable[ModelParams],
    cfg: SeriesConfig = SeriesConfig(),
    time_divisor_squared: int = 1,
) -> list[CurvePoint]:
    """S_x at every filtered time over a grid of temperatures.

    Rows are ordered (q, beta) so each candidate traces one contiguous curve.
    """
    grid = list(params_grid)
    out: list[CurvePoint] = []
    for q in mtilde.members:
        for params in grid:
            sx, _ = bloch_at_candidate_time(q, params, cfg, time_divisor_squared)
            out.append(CurvePoint(params.beta, q, sx))
    return out


def save_candidate_set(cs: CandidateSet, path: str | Path) -> None:
    """One decimal integer per line, ascending; provenance in a JSON sidecar."""
    path = Path(path)
    path.write_text("".join(f"{q}\n" for q in cs.members), encoding="ascii")
    sidecar = path.with_name(path.name + ".provenance.json")
    payload = {str(q): list(tags) for q, tags in sorted(cs.provenance.items())}
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="ascii")


def load_candidate_set(path: str | Path) -> CandidateSet:
    path = Path(path)
    members = tuple(int(line) for line in path.read_text(encoding="ascii").split())
    sidecar = path.with_name(path.name + ".provenance.json")
    prov: dict[int, tuple[str, ...]] = {}
    if sidecar.exists():
        raw = json.loads(sidecar.read_text(encoding="ascii"))
        prov = {int(q): tuple(tags) for q, tags in raw.items()}
    return CandidateSet(members, prov)
