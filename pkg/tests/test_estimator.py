import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_profile, random_instance
from tiersplit.errors import InvalidSplitError, RateFitCoverageError
from tiersplit.estimator import (
    EDGE_POWER_MODEL_W,
    InferenceSample,
    NodeRates,
    Split,
    estimate_split,
    fit_rates,
    mean_latency,
    validate_split,
)
from tiersplit.link import LinkModel


def sample(split, profile, t_edge, t_fog, t_cloud, e_fog, e_cloud):
    return InferenceSample(
        split=split,
        compute_edge_s=t_edge,
        compute_fog_s=t_fog,
        compute_cloud_s=t_cloud,
        energy_edge_j=EDGE_POWER_MODEL_W * t_edge,
        energy_fog_j=e_fog,
        energy_cloud_j=e_cloud,
        transfer_ef_s=0.0,
        transfer_fc_s=0.0,
        latency_s=t_edge + t_fog + t_cloud,
        timestamp_s=0.0,
    )


class TestSplit:
    def test_ordering_is_lexicographic(self):
        assert Split(1, 2) < Split(1, 3) < Split(2, 3)

    def test_rejects_bad_pairs(self):
        with pytest.raises(InvalidSplitError):
            Split(3, 3)
        with pytest.raises(InvalidSplitError):
            Split(-1, 2)
        with pytest.raises(InvalidSplitError):
            Split(4, 2)

    def test_validate_against_model(self):
        validate_split(Split(0, 1), n_features=2)
        with pytest.raises(InvalidSplitError):
            validate_split(Split(0, 2), n_features=2)
        with pytest.raises(InvalidSplitError):
            validate_split(Split(0, 1), n_features=5, min_edge_layers=2)
        validate_split(Split(1, 2), n_features=5, min_edge_layers=2)


class TestEstimate:
    """Frozen worked example: every quantity derived by hand once."""

    def setup_method(self):
        self.profile = make_profile([0.5, 0.3, 0.2], [1_000_000, 100_000])
        self.rates = NodeRates(
            sigma_edge=1.0, sigma_fog=0.5, sigma_cloud=0.1,
            rho_fog=15.0, rho_cloud=30.0,
        )
        self.link = LinkModel(omega=0.005, beta=1e7)

    def test_worked_example(self):
        est = estimate_split(
            Split(0, 1), self.profile, self.rates, self.link, self.link
        )
        assert est.compute_edge_s == pytest.approx(0.5)
        assert est.compute_fog_s == pytest.approx(0.15)
        assert est.compute_cloud_s == pytest.approx(0.02)
        assert est.transfer_ef_s == pytest.approx(0.105)
        assert est.transfer_fc_s == pytest.approx(0.015)
        assert est.latency_s == pytest.approx(0.79)
        assert est.energy_edge_j == pytest.approx(6.0)
        assert est.energy_fog_j == pytest.approx(2.25)
        assert est.energy_cloud_j == pytest.approx(0.6)
        assert est.energy_total_j == pytest.approx(8.85)

    def test_latency_is_sum_of_stages(self):
        est = estimate_split(
            Split(0, 1), self.profile, self.rates, self.link, self.link
        )
        assert est.latency_s == pytest.approx(
            est.compute_edge_s + est.transfer_ef_s + est.compute_fog_s
            + est.transfer_fc_s + est.compute_cloud_s
        )

    def test_rejects_invalid_split_for_model(self):
        with pytest.raises(InvalidSplitError):
            estimate_split(
                Split(1, 2), self.profile, self.rates, self.link, self.link
            )

    def test_faster_uplink_lowers_latency(self):
        slow = estimate_split(Split(0, 1), self.profile, self.rates, self.link, self.link)
        fast_link = LinkModel(omega=0.005, beta=1e9)
        fast = estimate_split(Split(0, 1), self.profile, self.rates, fast_link, self.link)
        assert fast.latency_s < slow.latency_s
        assert fast.energy_total_j == pytest.approx(slow.energy_total_j)


class TestFitRates:
    def setup_method(self):
        # shares: split (0,1) -> 0.4/0.4/0.2, split (1,2) -> 0.8/0.1/0.1
        self.profile = make_profile([0.4, 0.4, 0.1, 0.1], [1, 1, 1])

    def frozen_samples(self):
        return [
            sample(Split(0, 1), self.profile, t_edge=0.5, t_fog=0.02,
                   t_cloud=0.01, e_fog=0.30, e_cloud=0.30),
            sample(Split(1, 2), self.profile, t_edge=0.9, t_fog=0.01,
                   t_cloud=0.02, e_fog=0.15, e_cloud=0.60),
        ]

    def test_worked_example(self):
        rates = fit_rates(self.frozen_samples(), self.profile)
        # sigma_edge = (0.5*0.4 + 0.9*0.8) / (0.4^2 + 0.8^2) = 0.92 / 0.80
        assert rates.sigma_edge == pytest.approx(1.15)
        # sigma_fog = (0.02*0.4 + 0.01*0.1) / (0.4^2 + 0.1^2) = 0.009 / 0.17
        assert rates.sigma_fog == pytest.approx(0.009 / 0.17)
        # rho = total joules / total busy seconds
        assert rates.rho_fog == pytest.approx(0.45 / 0.03)
        assert rates.rho_cloud == pytest.approx(0.90 / 0.03)
        assert rates.p_edge == EDGE_POWER_MODEL_W

    def test_round_trip_with_consistent_samples(self):
        true = NodeRates(
            sigma_edge=1.3, sigma_fog=0.4, sigma_cloud=0.05,
            rho_fog=14.0, rho_cloud=33.0,
        )
        samples = []
        for split in (Split(0, 1), Split(0, 2), Split(1, 2)):
            w_e, w_f, w_c = self.profile.weight_shares(split.i, split.j)
            samples.append(
                sample(
                    split, self.profile,
                    t_edge=true.sigma_edge * w_e,
                    t_fog=true.sigma_fog * w_f,
                    t_cloud=true.sigma_cloud * w_c,
                    e_fog=true.rho_fog * true.sigma_fog * w_f,
                    e_cloud=true.rho_cloud * true.sigma_cloud * w_c,
                )
            )
        fitted = fit_rates(samples, self.profile)
        assert fitted.sigma_edge == pytest.approx(true.sigma_edge, rel=1e-12)
        assert fitted.sigma_fog == pytest.approx(true.sigma_fog, rel=1e-12)
        assert fitted.sigma_cloud == pytest.approx(true.sigma_cloud, rel=1e-12)
        assert fitted.rho_fog == pytest.approx(true.rho_fog, rel=1e-12)
        assert fitted.rho_cloud == pytest.approx(true.rho_cloud, rel=1e-12)

    def test_no_samples_is_coverage_error(self):
        with pytest.raises(RateFitCoverageError):
            fit_rates([], self.profile)

    def test_idle_node_energy_rate_needs_busy_time(self):
        # cloud never runs: j = N-1 with zero-weight tail is impossible
        # here, so force zero cloud time through a zero-share profile
        profile = make_profile([0.5, 0.3, 0.2, 0.0], [1, 1, 1])
        s = sample(Split(0, 2), profile, t_edge=0.5, t_fog=0.4,
                   t_cloud=0.0, e_fog=0.1, e_cloud=0.0)
        with pytest.raises(RateFitCoverageError) as excinfo:
            fit_rates([s], profile)
        assert "cloud" in str(excinfo.value)

    def test_single_device_samples_rejected(self):
        s = InferenceSample(
            split=None, compute_edge_s=1.0, compute_fog_s=0.0,
            compute_cloud_s=0.0, energy_edge_j=12.0, energy_fog_j=0.0,
            energy_cloud_j=0.0, transfer_ef_s=0.0, transfer_fc_s=0.0,
            latency_s=1.0, timestamp_s=0.0,
        )
        with pytest.raises(InvalidSplitError):
            fit_rates([s], self.profile)

    def test_mean_latency(self):
        samples = self.frozen_samples()
        assert mean_latency(samples) == pytest.approx(
            (samples[0].latency_s + samples[1].latency_s) / 2
        )


class TestClosedLoop:
    """Noiseless simulator measurements must reproduce estimates exactly
    when the estimator is fed the simulator's true parameters."""

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_estimate_matches_noiseless_measurement(self, seed):
        rng = np.random.default_rng(seed)
        profile, rates, link_ef, link_fc, env = random_instance(rng, n_max=12)
        n = profile.n_features
        for i in range(n - 1):
            for j in range(i + 1, n):
                split = Split(i, j)
                est = estimate_split(split, profile, rates, link_ef, link_fc)
                measured = env.run_inference(split, profile)
                assert measured.latency_s == pytest.approx(est.latency_s, rel=1e-9)
                assert measured.energy_edge_j == pytest.approx(
                    est.energy_edge_j, rel=1e-9, abs=1e-15
                )
                assert measured.energy_fog_j == pytest.approx(
                    est.energy_fog_j, rel=1e-9, abs=1e-15
                )
                assert measured.energy_cloud_j == pytest.approx(
                    est.energy_cloud_j, rel=1e-9, abs=1e-15
                )
