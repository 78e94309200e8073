import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acops._rng import substream
from acops.channel import outage_prob_direct
from acops.netsim import (FEEDBACK_POLICIES, SINGLE_POLICIES, ConfigError, FeedbackAccount,
                          NetworkConfig, OfdmConfig, calibrate_direct_snr, outage_point,
                          run_bundle_experiment, run_montecarlo, run_sequential, run_trial,
                          select_partner)
from acops.valuation import private_value


def test_config_validation():
    with pytest.raises(ConfigError, match="n_users"):
        NetworkConfig(n_users=0)
    with pytest.raises(ConfigError, match="num_partners"):
        NetworkConfig(n_users=3, num_partners=4)
    with pytest.raises(ConfigError, match="direct_snr"):
        NetworkConfig(n_users=3, direct_snr=(1.0, 2.0))
    with pytest.raises(ConfigError):
        NetworkConfig(helper_surplus=-1.0)


def test_run_trial_shapes():
    cfg = NetworkConfig(n_users=4, desired_rate=2.0)
    res = run_trial(cfg, "acops_single", substream(1, "trial"))
    assert res.achieved_rate.shape == (4,) and res.winner.sum() <= 1
    assert np.array_equal(res.outage, res.achieved_rate < 2.0)


def test_no_cooperation_matches_closed_form():
    cfg = NetworkConfig(n_users=3, desired_rate=1.5, direct_snr=2.0, trials=200_000)
    r = outage_point(cfg, ("no_cooperation",))["no_cooperation"]
    assert abs(r["mean_outage"] - outage_prob_direct(1.5, 2.0)) < 3 * r["stderr"]


def test_strong_helper_link_rescues_winner():
    cfg = NetworkConfig(n_users=5, desired_rate=2.0, direct_snr=1.0, helper_link_snr=1e9,
                        helper_surplus=50.0, trials=20_000)
    res = outage_point(cfg)
    base = res["no_cooperation"]["mean_outage"]
    # exactly one weak user per trial is rescued whenever somebody is weak
    p = outage_prob_direct(2.0, 1.0)
    rescued = (1 - (1 - p) ** 5) / 5
    for pol in SINGLE_POLICIES[1:]:
        assert res[pol]["mean_outage"] == pytest.approx(base - rescued, abs=0.01)


def test_example_two_users_max_min():
    # equal helper links, B has the weaker BS link; with a common alpha B values help more
    g_ph = np.array([[8.0, 8.0]])
    g_bs = np.array([[1.5, 0.4]])
    rate_bs = np.log2(1 + g_bs)
    rate_ph = np.minimum(np.log2(1 + g_ph), 5.0)
    value = private_value(g_ph, g_bs, 1.0)
    req = np.array([[True, True]])
    rng = substream(1, "ex2")
    mm, _ = select_partner("central_max_min", rate_bs, rate_ph, value, g_ph, req, 5.0, rng)
    ac, pay = select_partner("acops_single", rate_bs, rate_ph, value, g_ph, req, 5.0, rng)
    assert mm[0] == 1 and ac[0] == 1
    assert pay[0] == pytest.approx(value[0, 0])


def test_gating():
    rng = substream(1, "gate")
    rate_bs = np.array([[0.5, 3.0, 3.0]])
    one = np.array([[True, False, False]])
    w, pay = select_partner("acops_single", rate_bs, 1.0, np.array([[2.0, 5.0, 5.0]]), 1.0, one, 1.0, rng)
    assert w[0] == 0 and pay[0] == 0.0          # lone request: granted, no auction, no price
    both = np.array([[True, True, False]])
    w, _ = select_partner("acops_single", rate_bs, 1.0, np.array([[2.0, 5.0, 5.0]]), 1.0, both, 0.0, rng)
    assert w[0] == -1                            # no surplus, no help


def test_montecarlo_envelope_and_schema():
    cfg = NetworkConfig(n_users=5, desired_rate=2.0, trials=5_000)
    rows = run_montecarlo(cfg, "direct_snr", [0.1, 1.0, 5.0])
    assert {r["policy"] for r in rows} == set(SINGLE_POLICIES)
    for g in (0.1, 1.0, 5.0):
        pts = {r["policy"]: r for r in rows if r["grid"] == g}
        top = pts["no_cooperation"]["mean_outage"]
        for r in pts.values():
            assert r["mean_outage"] <= top + 1e-12
            assert r["ci_low"] <= r["mean_outage"] <= r["ci_high"]
    with pytest.raises(ConfigError):
        run_montecarlo(cfg, "nope", [1])


def test_threads_do_not_change_results():
    cfg = NetworkConfig(n_users=5, desired_rate=2.0, trials=50_000)
    assert outage_point(cfg, threads=1) == outage_point(cfg, threads=4)


def test_bundle_experiment():
    cfg = NetworkConfig(n_users=10, ofdm=OfdmConfig(64, 4), trials=500)
    rates = [80.0, 50.0, 0.0]
    r2 = {(r["grid"], r["policy"]): r["mean_outage"] for r in run_bundle_experiment(cfg, rates, r=2)}
    r4 = {(r["grid"], r["policy"]): r["mean_outage"] for r in run_bundle_experiment(cfg, rates, r=4)}
    for pol in ("no_cooperation", "acops_bundle", "central_max_min"):
        assert r2[(0.0, pol)] == 0.0
    for d in rates:
        assert r4[(d, "acops_bundle")] <= r2[(d, "acops_bundle")] + 1e-12
        assert r2[(d, "acops_bundle")] <= r2[(d, "no_cooperation")]
    with pytest.raises(ConfigError):
        run_bundle_experiment(NetworkConfig(), rates)


def test_bundle_trial():
    cfg = NetworkConfig(n_users=6, num_partners=3, desired_rate=40.0, ofdm=OfdmConfig(32, 4))
    res = run_trial(cfg, "acops_bundle", substream(2, "bt"))
    assert res.achieved_rate.shape == (6,)


def test_feedback_examples():
    assert FeedbackAccount("acops_single", 5).total_bits == 100
    assert FeedbackAccount("central_single", 5).total_bits == 1250
    assert FeedbackAccount("central_single", 1).total_bits == 20
    assert FeedbackAccount("central_multiple", 5, num_subcarriers=128).total_bits == 128 * 1250
    assert FeedbackAccount("acops_bundle", 5, num_bundles=4).total_bits == pytest.approx(
        50 + math.log2(5) + 10 + 2)
    assert FeedbackAccount("central_single", 400).total_bits == math.inf
    with pytest.raises(ValueError):
        FeedbackAccount("acops_single", 0)


@given(st.integers(1, 60), st.sampled_from(FEEDBACK_POLICIES))
def test_feedback_positive(n, policy):
    assert FeedbackAccount(policy, n).total_bits > 0


def test_calibration():
    g = calibrate_direct_snr(6.0, 0.7)
    assert outage_prob_direct(6.0, g) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        calibrate_direct_snr(6.0, 1.0)


def test_sequential_zero_budget():
    g = calibrate_direct_snr(6.0, 0.7)
    cfg = NetworkConfig(n_users=6, desired_rate=6.0, direct_snr=g, helper_link_snr=1000.0)
    res = run_sequential(cfg, ["conservative"] * 3 + ["aggressive"] * 3, 20, 0, 20)
    # no bids possible: every weak stage is an outage stage
    for curve in res.cumulative_outage.values():
        assert curve[-1] == pytest.approx(res.no_coop_outage, abs=0.03)
    assert res.conservation_error == 0


def test_sequential_invariants():
    g = calibrate_direct_snr(6.0, 0.7)
    cfg = NetworkConfig(n_users=6, desired_rate=6.0, direct_snr=g, helper_link_snr=1000.0)
    res = run_sequential(cfg, ["conservative", "aggressive", "no_help"] * 2, 40, 5000, 30)
    assert res.conservation_error == 0
    assert res.min_budget >= 0 and res.max_bid_excess <= 0
    with pytest.raises(ConfigError):
        run_sequential(cfg, ["greedy"] * 6)
    with pytest.raises(ConfigError):
        run_sequential(cfg, ["conservative"] * 6, initial_budget=2.5)
