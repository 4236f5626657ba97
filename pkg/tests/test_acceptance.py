"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line.  Criterion 3's cardinality check for
the one-, two- and four-photon filtered sets is expected to FAIL: those
reference counts are finite-precision artifacts and cannot be reproduced by
certified arithmetic (the extra members this package keeps are genuine
solutions of the membership inequality, with margins at least six orders of
magnitude above the certified phase error).  All listed set members are
reproduced exactly and in order; the three-photon count, which involves no
large denominators, matches exactly.
"""

from functools import lru_cache

import numpy as np

from jcbloch.analysis import (
    CloudMetricConfig,
    EpsilonSchedule,
    SamplingPlan,
    cloud_distance,
    reflection_asymmetry,
    sample_cloud,
    weyl_discrepancy,
    weyl_sum_closed_form,
    weyl_sum_direct,
    zero_scan,
)
from jcbloch.diophantine import (
    bloch_at_candidate_time,
    build_candidate_set,
    convergents,
    default_candidate_spec,
    default_filter_spec,
    expand_surd,
    filter_candidates,
    sz_bound_after_filter,
)
from jcbloch.model import BlochVector, ModelParams, SeriesConfig, bloch_propagate, eigen_d
from jcbloch.oracle import FockTruncation, build_c2, evolve_and_trace, truncation_for

CFG = SeriesConfig()
METRIC = CloudMetricConfig()

# Graphs reproduced by the scale/symmetry criteria: (panel-a beta, panel-b beta).
PANEL_BETAS = {1: (0.9, 1.8), 2: (1.0, 2.0), 3: (0.6, 1.2), 4: (1.2, 2.4)}
CLOUD_POINTS = 400_000


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")


@lru_cache(maxsize=32)
def cached_cloud(l: int, beta: float, s: float | None = None):
    plan = SamplingPlan(4.0, CLOUD_POINTS, s)
    return sample_cloud(ModelParams(l=l, beta=beta), plan, CFG)


@lru_cache(maxsize=8)
def filtered_set(l: int):
    cset = build_candidate_set(default_candidate_spec(l))
    return filter_candidates(cset, ModelParams(l=l, beta=2.0), default_filter_spec(l))


def test_criterion_01_continued_fraction_goldens():
    golden = {
        (3, 12): (3691, 2131),
        (3, 13): (5042, 2911),
        (3, 14): (13775, 7953),
        (2, 12): (47321, 33461),
        (2, 13): (114243, 80782),
        (2, 14): (275807, 195025),
    }
    results = {}
    for (m, idx), want in golden.items():
        got = convergents(expand_surd(m, 1, idx))[idx]
        results[(m, idx)] = (got.p, got.q) == want
    ok = all(results.values())
    report("1 continued-fraction goldens", ok, f"{sum(results.values())}/6 exact")
    assert ok, results


def test_criterion_02_candidate_set_cardinalities():
    sizes = {l: len(build_candidate_set(default_candidate_spec(l))) for l in (1, 2, 4)}
    enum_ok = build_candidate_set(default_candidate_spec(3)).members == tuple(range(2001))
    ok = sizes == {1: 91, 2: 243, 4: 323} and enum_ok
    report("2 candidate-set cardinalities", ok, f"sizes={sizes}, l=3 enumeration={enum_ok}")
    assert ok


def test_criterion_03a_filtered_sets_listed_members():
    kept2 = filtered_set(2).members
    kept1 = filtered_set(1).members
    ok = kept2[:3] == (0, 15_731_042, 1_117_014_753) and kept1[:4] == (0, 19_601, 33_461, 470_832)
    report(
        "3a filtered-set listed members", ok,
        f"l=2 head={kept2[:3]}, l=1 head={kept1[:4]}",
    )
    assert ok


def test_criterion_03b_filtered_set_cardinalities():
    """Expected to FAIL for l in {1, 2, 4}; see the module docstring.

    Certified arithmetic yields 32/21/19 members where the reference counts
    are 24/15/17.  The disagreeing members all have 14 to 42 digit
    denominators, where double-precision phase evaluation returns effectively
    random cosines; their true inequality margins are >= 2.9e-3, five to six
    orders above the certified 1e-10 phase error, so they are genuine
    members.  The three-photon count (all denominators <= 2000) matches.
    """
    reference = {1: 24, 2: 15, 3: 15, 4: 17}
    got = {l: len(filtered_set(l)) for l in (1, 2, 3, 4)}
    ok = got == reference
    report("3b filtered-set cardinalities", ok, f"reference={reference}, certified={got}")
    assert ok, (
        f"certified-precision evaluation yields {got}, reference counts are {reference}; "
        "the extra members are genuine inequality solutions (margins >= 2.9e-3, certified "
        "phase error <= 1e-10) that finite-precision tooling misclassifies"
    )


def test_criterion_04_oracle_equivalence():
    worst = 0.0
    for l in (1, 2, 3, 4):
        for beta in (0.5, 1.0, 2.0, 5.0):
            params = ModelParams(l=l, beta=beta)
            trunc = truncation_for(params, 1e-12)
            for t in (0.5, 1.0, 5.0, 20.0, 40.0):
                want = evolve_and_trace(params, trunc, t)
                got = bloch_propagate(BlochVector(1, 0, 0), t, params, CFG)
                worst = max(
                    worst,
                    abs(want.sx - got.sx),
                    abs(want.sy - got.sy),
                    abs(want.sz - got.sz),
                )
    ok = worst <= 1e-8
    report("4 oracle equivalence", ok, f"max |closed form - oracle| = {worst:.3e} <= 1e-8")
    assert ok


def test_criterion_05_ladder_eigenvalue_goldens():
    params = ModelParams(l=2, g=1.0)
    goldens_ok = [eigen_d(n, params) for n in (0, 1, 2)] == [2.0, 6.0, 12.0]

    trunc = FockTruncation(12)
    squared = build_c2(params, trunc) @ build_c2(params, trunc)
    m = trunc.n_max + 1
    lower = np.diag(squared[:m, :m])
    worst = 0.0
    for n in range(m):
        want = eigen_d(n, params) if n <= trunc.n_max - params.l else 0.0
        worst = max(worst, abs(lower[n] - want))
    ok = goldens_ok and worst <= 1e-10
    report("5 ladder-eigenvalue goldens", ok, f"D0..D2 exact={goldens_ok}, spectrum gap={worst:.2e}")
    assert ok


def test_criterion_06_scale_invariance():
    details = []
    ok = True
    for l, (beta_a, beta_b) in PANEL_BETAS.items():
        base = cached_cloud(l, beta_a)
        scaled = cached_cloud(l, beta_a, 1.2)
        control = cached_cloud(l, beta_b)
        d_scale = cloud_distance(base, scaled, METRIC.bins)
        d_control = cloud_distance(base, control, METRIC.bins)
        good = d_scale < METRIC.scale_threshold < d_control
        ok &= good
        details.append(f"l={l}: {d_scale:.3f} | {d_control:.3f}")
    report("6 scale invariance", ok, f"threshold {METRIC.scale_threshold}; " + "; ".join(details))
    assert ok


def test_criterion_07_reflection_symmetry():
    asym = {l: reflection_asymmetry(cached_cloud(l, PANEL_BETAS[l][0]), METRIC.bins) for l in (1, 2, 3, 4)}
    symmetric_ok = all(asym[l] < METRIC.symmetry_threshold for l in (1, 2, 4))
    asymmetric_ok = asym[3] > METRIC.symmetry_threshold

    plan = SamplingPlan(4.0, CLOUD_POINTS)
    params3 = ModelParams(l=3, beta=PANEL_BETAS[3][0])
    forward = sample_cloud(params3, plan, CFG, initial_sx=1.0)
    mirrored = sample_cloud(params3, plan, CFG, initial_sx=-1.0)
    from jcbloch.analysis import PointCloud

    union = PointCloud(np.vstack([forward.points, mirrored.points]))
    union_asym = reflection_asymmetry(union, METRIC.bins)
    union_ok = union_asym < METRIC.symmetry_threshold

    summary = ", ".join(f"l={l}: {v:.3f}" for l, v in asym.items())
    ok = symmetric_ok and asymmetric_ok and union_ok
    report("7 reflection symmetry", ok, f"{summary}; dual-union={union_asym:.4f}")
    assert ok, (asym, union_asym)


def test_criterion_08_weyl_equidistribution():
    plan_big = SamplingPlan(4.0, 10**6)
    gap = max(
        abs(weyl_sum_direct(plan_big, m) - weyl_sum_closed_form(plan_big, m)) for m in range(1, 9)
    )
    mags = [weyl_discrepancy(SamplingPlan(4.0, n), 8) for n in (10**4, 10**5, 10**6)]
    slope = float(np.polyfit(np.log([1e4, 1e5, 1e6]), np.log(mags), 1)[0])
    ok = gap <= 1e-12 and mags[0] > mags[1] > mags[2] and -1.5 < slope < -0.6
    report(
        "8 Weyl equidistribution", ok,
        f"closed-form gap {gap:.2e}, magnitudes {[f'{m:.2e}' for m in mags]}, slope {slope:.2f}",
    )
    assert ok


def test_criterion_09_scan_curve_consistency():
    fspec = default_filter_spec(2)
    bound = sz_bound_after_filter(2, fspec)
    params = ModelParams(l=2, beta=2.0)
    members = filtered_set(2).members

    sz_ok = True
    curve_sx = []
    for q in members:
        sx, sz = bloch_at_candidate_time(q, params, CFG)
        sz_ok &= abs(sz) < bound
        curve_sx.append(sx)

    sched = EpsilonSchedule(0.009, 0.6, n0=1_000_000)
    hits = zero_scan(params, SamplingPlan(4.0, 0), sched, [2.0], CFG)
    red_sx = np.array([h.sx for h in hits])
    # co-plot subset relation: every curve value sits on the red-point bands,
    # but red points exist that no curve passes through
    nearest = [float(np.min(np.abs(red_sx - sx))) for sx in curve_sx]
    subset_ok = max(nearest) < 0.05 and len(red_sx) > len(members)

    ok = sz_ok and subset_ok
    report(
        "9 scan/curve consistency", ok,
        f"|S_z| bound {bound:.4f} holds for all {len(members)} members; "
        f"max curve-to-red gap {max(nearest):.4f}; {len(red_sx)} red points",
    )
    assert ok
