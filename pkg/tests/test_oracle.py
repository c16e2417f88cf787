import numpy as np
import pytest

from a2gcovert.detection import min_dep_values
from a2gcovert.errors import DomainError
from a2gcovert.oracle import (
    BATCH_SIZE,
    mc_ergodic_capacity,
    mc_expected_min_dep,
    mc_min_dep_radiometer,
    mc_outage,
)

N_SMOKE = 50_000
SEED = 123


class TestDeterminism:
    def test_same_seed_same_result(self, scn):
        a = mc_expected_min_dep(scn, mode="om", n=N_SMOKE, seed=SEED)
        b = mc_expected_min_dep(scn, mode="om", n=N_SMOKE, seed=SEED)
        assert a == b

    def test_worker_count_does_not_change_bits(self, scn):
        # more batches than workers so the pool actually splits the work
        n = 3 * BATCH_SIZE + 17
        for fn in (mc_expected_min_dep, mc_outage, mc_ergodic_capacity):
            one = fn(scn, mode="dm", n=n, seed=SEED, workers=1)
            eight = fn(scn, mode="dm", n=n, seed=SEED, workers=8)
            assert one.mean == eight.mean
            assert one.std_error == eight.std_error

    def test_different_seeds_differ(self, scn):
        a = mc_outage(scn, mode="om", n=N_SMOKE, seed=1)
        b = mc_outage(scn, mode="om", n=N_SMOKE, seed=2)
        assert a.mean != b.mean


class TestEstimates:
    def test_dep_estimate_fields(self, scn):
        est = mc_expected_min_dep(scn, mode="om", n=N_SMOKE, seed=SEED)
        assert est.n_samples == N_SMOKE
        assert est.seed == SEED
        assert 0.0 <= est.mean <= 1.0
        assert est.std_error > 0.0

    def test_outage_is_probability(self, scn):
        for mode in ("om", "dm"):
            est = mc_outage(scn, mode=mode, n=N_SMOKE, seed=SEED)
            assert 0.0 <= est.mean <= 1.0

    def test_capacity_positive(self, scn):
        est = mc_ergodic_capacity(scn, mode="dm", n=N_SMOKE, seed=SEED)
        assert est.mean > 0.0

    def test_silent_transmitter_dep_is_one(self, scn):
        est = mc_expected_min_dep(scn, mode="om", p_a=0.0, n=N_SMOKE,
                                  seed=SEED)
        assert est.mean == pytest.approx(1.0)
        assert est.std_error == pytest.approx(0.0)

    def test_validation(self, scn):
        with pytest.raises(DomainError):
            mc_outage(scn, mode="om", n=10, seed=SEED)
        with pytest.raises(DomainError):
            mc_outage(scn, mode="fm", n=N_SMOKE, seed=SEED)
        with pytest.raises(DomainError):
            mc_expected_min_dep(scn, mode="om", p_a=-1.0, n=N_SMOKE,
                                seed=SEED)


class TestRadiometerCrossCheck:
    def test_finite_observation_limit_matches_kernel(self):
        sigma, rho = 1e-8, 10 ** 0.2
        for k_a in (0.5e-8, 2e-8, 6e-8):
            sim = mc_min_dep_radiometer(k_a, sigma, rho, n_trials=4000,
                                        n_uses=10**4, seed=5)
            ana = float(min_dep_values(k_a, sigma, rho))
            assert sim == pytest.approx(ana, abs=0.05)

    def test_validation(self):
        with pytest.raises(DomainError):
            mc_min_dep_radiometer(1e-8, 1e-8, 0.9)
        with pytest.raises(DomainError):
            mc_min_dep_radiometer(1e-8, 1e-8, 2.0, n_trials=10)


class TestAgainstAnalyticSmoke:
    # a light version of the full validation grid: one cell per metric
    def test_dep_om(self, scn):
        from a2gcovert.detection import expected_min_dep
        ana = expected_min_dep(scn, "om").value
        est = mc_expected_min_dep(scn, mode="om", n=200_000, seed=SEED)
        assert abs(ana - est.mean) <= max(0.02, 4 * est.std_error)

    def test_outage_dm(self, scn):
        from a2gcovert.throughput import outage, snr_threshold
        g = float(snr_threshold(scn.r_b, scn.dm.bandwidth_hz))
        ana = float(outage(scn, "dm", gamma_th=g))
        est = mc_outage(scn, mode="dm", n=200_000, seed=SEED)
        assert abs(ana - est.mean) <= max(0.02, 4 * est.std_error)

    def test_csc_om(self, scn):
        from a2gcovert.throughput import csc
        ana = csc(scn, "om")
        est = mc_ergodic_capacity(scn, mode="om", n=200_000, seed=SEED)
        assert abs(ana - est.mean) <= max(0.05 * ana, 4 * est.std_error)
