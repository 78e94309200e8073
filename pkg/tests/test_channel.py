import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from acops._rng import substream
from acops.channel import (LinkParams, average_snr, capacity, db_to_linear, draw_fading,
                           draw_shadowing, gaussian_capacity_approx, linear_to_db,
                           mean_subcarrier_capacity, ofdm_capacity, ofdm_draw, ofdm_draw_batch,
                           OfdmLinkState, outage_prob_direct, tap_powers)


def test_average_snr_identity():
    assert average_snr(LinkParams()) == 1.0
    assert average_snr(LinkParams(distance=2.0)) == pytest.approx(0.125)


def test_link_params_validation():
    with pytest.raises(ValueError):
        LinkParams(distance=0.0)
    with pytest.raises(ValueError):
        LinkParams(path_loss_exponent=5.0)
    with pytest.raises(ValueError):
        average_snr(LinkParams(), shadow_draw=0.0)


def test_shadowing_median():
    s = draw_shadowing(8.0, substream(1, "t", "shadow"), 1_000_000)
    ratio = average_snr(LinkParams(), shadow_draw=s) / average_snr(LinkParams())
    assert np.median(ratio) == pytest.approx(1.0, rel=0.02)


def test_fading_moments():
    g = draw_fading(1.0, substream(1, "t", "fade"), 1_000_000)
    assert 0.997 <= g.mean() <= 1.003
    assert abs(np.mean(g < math.log(2)) - 0.5) < 0.002
    with pytest.raises(ValueError):
        draw_fading(0.0, substream(1, "t"), 3)


def test_fading_deterministic():
    a = draw_fading(2.0, substream(9, "x"), 100)
    b = draw_fading(2.0, substream(9, "x"), 100)
    assert np.array_equal(a, b)


def test_capacity_values():
    assert capacity(0.0) == 0.0
    assert capacity(1.0) == 1.0
    assert capacity(15.0) == 4.0
    assert capacity(15.0, half_duplex_factor=0.5) == 2.0
    with pytest.raises(ValueError):
        capacity(-0.1)


def test_outage_values():
    assert outage_prob_direct(0.0, 1.0) == 0.0
    assert outage_prob_direct(10.0, 1e12) == pytest.approx(0.0, abs=1e-8)
    g = draw_fading(1.0, substream(1, "t", "outage"), 1_000_000)
    emp = np.mean(capacity(g) < 1.0)
    assert outage_prob_direct(1.0, 1.0) == pytest.approx(0.632121, abs=1e-6)
    assert abs(emp - 0.632121) < 0.002


@given(st.floats(0, 20), st.floats(0, 20), st.floats(1e-3, 1e4))
def test_outage_monotone_in_rate(d1, d2, g):
    lo, hi = sorted((d1, d2))
    p_lo, p_hi = outage_prob_direct(lo, g), outage_prob_direct(hi, g)
    assert 0.0 <= p_lo <= p_hi <= 1.0


@given(st.floats(-60, 60))
def test_db_roundtrip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-9)


def test_tap_powers():
    p = tap_powers(8)
    assert p.sum() == pytest.approx(1.0)
    assert np.all(np.diff(p) < 0)


def test_ofdm_flat_single_tap():
    st_ = ofdm_draw(1.0, 64, 1, substream(1, "t", "flat"))
    assert np.allclose(st_.subcarrier_snrs, st_.subcarrier_snrs[0])


def test_ofdm_marginal_mean():
    g = ofdm_draw_batch(1.0, 128, 8, substream(1, "t", "ofdm"), 100_000)
    assert g.mean(axis=0) == pytest.approx(np.ones(128), rel=0.02)
    assert g.mean() == pytest.approx(1.0, rel=0.01)


def test_ofdm_validation():
    with pytest.raises(ValueError):
        ofdm_draw(1.0, 4, 8, substream(1, "t"))


def test_ofdm_capacity():
    assert ofdm_capacity(OfdmLinkState(np.zeros(8), 1, 1.0)) == 0.0
    s = OfdmLinkState(np.array([1.0, 3.0, 0.0]), 1, 1.0)
    assert ofdm_capacity(s, [0]) == 1.0
    assert ofdm_capacity(s) == 3.0
    with pytest.raises(IndexError):
        ofdm_capacity(s, [3])


def test_mean_subcarrier_capacity():
    assert mean_subcarrier_capacity(1.0) == pytest.approx(0.8603, abs=1e-4)
    g = draw_fading(3.0, substream(1, "t", "mu"), 1_000_000)
    assert mean_subcarrier_capacity(3.0) == pytest.approx(np.log2(1 + g).mean(), rel=3e-3)


def test_gaussian_approx_mean_vs_samples():
    rng = substream(1, "t", "sum")
    g = ofdm_draw_batch(1.0, 128, 8, rng, 100_000)
    total = np.log2(1 + g).sum(axis=1)
    mu, var = gaussian_capacity_approx(128, 1.0, 8, samples=g)
    assert total.mean() == pytest.approx(mu, rel=0.005)
    assert var == pytest.approx(total.var(ddof=1), rel=1e-9)


def test_gaussian_approx_long_blocks_add():
    g = ofdm_draw_batch(1.0, 128, 8, substream(1, "t", "var"), 20_000)
    _, v128 = gaussian_capacity_approx(128, 1.0, 8, samples=g)
    _, v256 = gaussian_capacity_approx(256, 1.0, 8, samples=g)
    assert v256 == pytest.approx(2 * v128)
