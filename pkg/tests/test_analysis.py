"""Sampling plans, Weyl sums, zero scans and cloud metrics."""

import math

import numpy as np
import pytest

from jcbloch.analysis import (
    EpsilonSchedule,
    PointCloud,
    SamplingPlan,
    cloud_distance,
    default_schedule,
    log_beta_grid,
    reflection_asymmetry,
    sample_cloud,
    sample_trajectory,
    scale_invariance_check,
    weyl_discrepancy,
    weyl_sum_closed_form,
    weyl_sum_direct,
    zero_scan,
)
from jcbloch.errors import BoundsViolation, DegenerateStep
from jcbloch.model import BlochVector, ModelParams, bloch_propagate


class TestSamplingPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            SamplingPlan(0.0, 10)
        with pytest.raises(ValueError):
            SamplingPlan(4.0, -1)
        with pytest.raises(ValueError):
            SamplingPlan(4.0, 10, s=-1.0)

    def test_scale_window_for_dt4(self):
        lo, hi = SamplingPlan(4.0, 10).scale_window()
        assert lo == pytest.approx(math.pi / 4.0)
        assert hi == pytest.approx(math.pi / 2.0)

    def test_pseudorandom_window(self):
        assert SamplingPlan(4.0, 10).pseudorandom_ok()
        assert not SamplingPlan(2.0, 10).pseudorandom_ok()
        assert not SamplingPlan(4.0, 10, s=0.5).pseudorandom_ok()


class TestTrajectory:
    def test_single_frame(self):
        frames = sample_trajectory(ModelParams(l=2, beta=1.0), SamplingPlan(4.0, 0))
        assert len(frames) == 1
        assert frames[0].t == 0.0
        assert frames[0].bloch.sx == pytest.approx(1.0, abs=1e-11)
        assert frames[0].bloch.sz == pytest.approx(0.0, abs=1e-11)

    def test_matches_pointwise_propagation(self):
        params = ModelParams(l=3, beta=0.9)
        frames = sample_trajectory(params, SamplingPlan(4.0, 25))
        for frame in frames[::5]:
            ref = bloch_propagate(BlochVector(1, 0, 0), frame.t, params)
            assert frame.bloch.sx == ref.sx
            assert frame.bloch.sy == 0.0
            assert frame.bloch.sz == ref.sz

    def test_warns_outside_pseudorandom_window(self):
        with pytest.warns(UserWarning):
            sample_trajectory(ModelParams(l=1, beta=1.0), SamplingPlan(1.0, 3))

    def test_zero_temperature_locus_matches_oracle(self):
        # At T=0 the atom still entangles with the mode, so the cloud is NOT
        # the unit circle: for l=1 it is the parabola sz = sx^2 - 1.  The
        # Fock oracle confirms both the locus and the (sub-unit) norms.
        from jcbloch.oracle import evolve_and_trace, truncation_for

        params = ModelParams(l=1, beta=math.inf)
        cloud = sample_cloud(params, SamplingPlan(4.0, 2000))
        sx, sz = cloud.points[:, 0], cloud.points[:, 1]
        assert np.max(np.abs(sz - (sx**2 - 1.0))) < 1e-9
        trunc = truncation_for(params)
        for t in (4.0, 8.0, 40.0):
            ref = evolve_and_trace(params, trunc, t)
            i = int(t / 4.0)
            assert sx[i] == pytest.approx(ref.sx, abs=1e-9)
            assert sz[i] == pytest.approx(ref.sz, abs=1e-9)
            assert math.hypot(ref.sx, ref.sz) <= 1.0 + 1e-12


class TestWeyl:
    def test_degenerate_step(self):
        with pytest.raises(DegenerateStep):
            weyl_discrepancy(SamplingPlan(math.pi, 100), 2)

    def test_direct_matches_closed_form(self):
        plan = SamplingPlan(4.0, 100_000)
        for m in range(1, 9):
            gap = abs(weyl_sum_direct(plan, m) - weyl_sum_closed_form(plan, m))
            assert gap <= 1e-12

    def test_bound_from_geometric_sum(self):
        n = 1_000_000
        denom = min(abs(1.0 - np.exp(1j * 4.0 * m)) for m in range(1, 9))
        assert weyl_discrepancy(SamplingPlan(4.0, n), 8) <= 10.0 / (n * denom)

    def test_inverse_n_scaling(self):
        mags = [weyl_discrepancy(SamplingPlan(4.0, n), 8) for n in (10**4, 10**5, 10**6)]
        assert mags[0] > mags[1] > mags[2]
        slope = np.polyfit(np.log([1e4, 1e5, 1e6]), np.log(mags), 1)[0]
        assert -1.5 < slope < -0.6


class TestEpsilonSchedule:
    def test_threshold_bands(self):
        sched = EpsilonSchedule(0.009, 0.6)
        assert sched.epsilon(2.0) == 0.009
        assert sched.epsilon(5.0) == 0.009
        assert sched.epsilon(1.0) == pytest.approx(0.009 * math.exp(0.6))
        assert sched.epsilon(0.5) == pytest.approx(0.009 * math.exp(0.6 * 1.5))

    def test_sample_count_bands(self):
        sched = EpsilonSchedule(0.009, 0.6, n0=1_000_000)
        assert sched.sample_count(0.5) == 1_000_000
        assert sched.sample_count(1.0) == 500_000
        assert sched.sample_count(2.0) == 200_000
        assert sched.sample_count(3.0) == 100_000
        assert sched.sample_count(5.0) == 100_000

    def test_range_enforced(self):
        sched = EpsilonSchedule(0.009, 0.6)
        for beta in (0.4, 5.1):
            with pytest.raises(ValueError):
                sched.epsilon(beta)

    def test_defaults_per_multiplicity(self):
        assert default_schedule(1).eps0 == 0.0035
        assert default_schedule(3).c0 == 1.5
        with pytest.raises(ValueError):
            default_schedule(7)


class TestZeroScan:
    def test_origin_always_hits(self):
        params = ModelParams(l=2, beta=2.0)
        sched = EpsilonSchedule(0.009, 0.6, n0=5000)
        hits = zero_scan(params, SamplingPlan(4.0, 0), sched, [0.7, 2.0])
        for beta in (0.7, 2.0):
            first = next(h for h in hits if h.beta == beta)
            assert first.n == 0
            assert first.sx == pytest.approx(1.0, abs=1e-11)

    def test_hits_satisfy_threshold_on_reevaluation(self):
        params = ModelParams(l=2, beta=2.0)
        sched = EpsilonSchedule(0.009, 0.6, n0=20_000)
        hits = zero_scan(params, SamplingPlan(4.0, 0), sched, [2.0])
        assert hits
        for hit in hits:
            ref = bloch_propagate(BlochVector(1, 0, 0), hit.t, ModelParams(l=2, beta=2.0))
            assert abs(ref.sz) < sched.epsilon(2.0)
            assert ref.sz == hit.sz

    def test_parallel_matches_serial(self):
        params = ModelParams(l=1, beta=2.0)
        sched = EpsilonSchedule(0.0035, 0.7, n0=10_000)
        grid = [0.6, 1.3, 2.2, 4.0]
        serial = zero_scan(params, SamplingPlan(4.0, 0), sched, grid, jobs=1)
        parallel = zero_scan(params, SamplingPlan(4.0, 0), sched, grid, jobs=4)
        assert serial == parallel


class TestCloudMetric:
    def test_identical_clouds(self):
        rng = np.random.default_rng(3)
        cloud = PointCloud(rng.uniform(-0.9, 0.9, size=(2000, 2)))
        assert cloud_distance(cloud, cloud, bins=32) == 0.0

    def test_disjoint_supports(self):
        inside = PointCloud(np.zeros((100, 2)))
        shifted = PointCloud(np.zeros((100, 2)) + 10.0)  # clamps into the corner bin
        assert cloud_distance(inside, shifted, bins=32) == 2.0

    def test_norm_validation(self):
        with pytest.raises(ValueError):
            PointCloud(np.array([[1.3, 0.9]]), norm_tol=1e-9)

    def test_symmetric_cloud_has_no_asymmetry(self):
        pts = np.array([[0.5, 0.2], [-0.5, 0.2], [0.1, -0.7], [-0.1, -0.7]])
        assert reflection_asymmetry(PointCloud(pts), bins=16) == 0.0

    def test_asymmetry_ordering_three_vs_two_photon(self):
        plan = SamplingPlan(4.0, 60_000)
        three = reflection_asymmetry(sample_cloud(ModelParams(l=3, beta=0.6), plan))
        two = reflection_asymmetry(sample_cloud(ModelParams(l=2, beta=1.0), plan))
        assert three > two

    def test_log_beta_grid(self):
        grid = log_beta_grid(0.5, 5.0, 7)
        assert grid[0] == pytest.approx(0.5)
        assert grid[-1] == pytest.approx(5.0)
        ratios = [grid[i + 1] / grid[i] for i in range(6)]
        assert max(ratios) == pytest.approx(min(ratios), rel=1e-12)


class TestScaleInvariance:
    def test_unit_scale_gives_zero_distance(self):
        params = ModelParams(l=2, beta=1.0)
        result = scale_invariance_check(params, SamplingPlan(4.0, 5000, s=1.0))
        assert result.distance == 0.0

    def test_outside_window_rejected(self):
        params = ModelParams(l=2, beta=1.0)
        for s in (0.5, 1.6):
            with pytest.raises(BoundsViolation):
                scale_invariance_check(params, SamplingPlan(4.0, 100, s=s))

    def test_requires_scale_factor(self):
        with pytest.raises(ValueError):
            scale_invariance_check(ModelParams(), SamplingPlan(4.0, 100))

    def test_separates_scale_from_control(self):
        params = ModelParams(l=2, beta=1.0)
        plan = SamplingPlan(4.0, 60_000, s=1.2)
        result = scale_invariance_check(params, plan)
        assert result.passed
        assert result.control_separated
        assert result.distance < result.control_distance
