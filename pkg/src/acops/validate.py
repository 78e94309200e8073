"""Fast self-check: frozen oracles and invariants, runnable as ``acops validate``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import integrate

from acops._rng import substream
from acops.analytic import SymmetricGroupParams, outage_single_bound, revenue_single_exact
from acops.auction import AuctionConfig, simulate_revenue
from acops.channel import capacity, mean_subcarrier_capacity, outage_prob_direct
from acops.expint import e1, ei
from acops.netsim import (FeedbackAccount, NetworkConfig, calibrate_direct_snr, outage_point,
                          run_sequential)
from acops.valuation import (BundleValueModel, PrivateValueModel, bundle_pdf, positive_value_prob,
                             pv_pdf)

# high-precision reference values (30 significant digits, truncated)
E1_TABLE = {1e-3: 6.3315393641361493112, 0.5: 0.55977359477616081175, 1.0: 0.21938393439552027368,
            2.5: 0.024914917870269735496, 10.0: 4.1569689296853242774e-6,
            50.0: 3.7832640295504590187e-24}
EI_TABLE = {-2.0: -0.048900510708061119567, 0.5: 0.45421990486317357992, 3.0: 9.933832570625416558}


def _expint():
    worst = max(abs(e1(x) / v - 1) for x, v in E1_TABLE.items())
    worst = max(worst, max(abs(ei(x) / v - 1) for x, v in EI_TABLE.items()))
    return worst < 1e-10, f"max rel err {worst:.2e}"


def _outage_mc():
    rng = substream(1, "validate", "outage")
    g = rng.exponential(1.0, 200_000)
    p = outage_prob_direct(1.0, 1.0)
    emp = float(np.mean(capacity(g) < 1.0))
    sd = math.sqrt(p * (1 - p) / g.size)
    return abs(emp - p) < 4 * sd, f"closed {p:.5f} empirical {emp:.5f}"


def _normalisation():
    m = PrivateValueModel(2.0, 1.0)
    a = integrate.quad(lambda x: pv_pdf(x, m), -np.inf, 0)[0] + integrate.quad(lambda x: pv_pdf(x, m), 0, np.inf)[0]
    b = integrate.quad(lambda y: bundle_pdf(y, BundleValueModel(1.5, 6)), 0, np.inf)[0]
    return abs(a - 1) < 1e-6 and abs(b - 1) < 1e-6, f"pv {a:.9f} bundle {b:.9f}"


def _positive_prob():
    m = PrivateValueModel(3.0, 1.0)
    x = m.sample(substream(1, "validate", "A"), 200_000)
    emp = float(np.mean(x > 0))
    a = positive_value_prob(m)
    return abs(emp - a) < 4 * math.sqrt(a * (1 - a) / x.size), f"A {a:.4f} empirical {emp:.4f}"


def _revenue():
    p = SymmetricGroupParams(1.0, 1.0, 1.0, 5)
    exact = revenue_single_exact(p)
    est = simulate_revenue(p.value_model, 5, AuctionConfig(), 200_000, seed=3)
    return abs(est.mean - exact) < 4 * est.stderr, f"exact {exact:.5f} mc {est.mean:.5f}"


def _revenue_equivalence():
    m = PrivateValueModel(1.0, 1.0)
    a = simulate_revenue(m, 5, AuctionConfig(pricing_rule="first_price"), 200_000, seed=4)
    b = simulate_revenue(m, 5, AuctionConfig(), 200_000, seed=5)
    z = (a.mean - b.mean) / math.hypot(a.stderr, b.stderr)
    return abs(z) < 4, f"z {z:.2f}"


def _frozen_values():
    checks = [
        (mean_subcarrier_capacity(1.0), 0.8603),
        (outage_single_bound(1.0, SymmetricGroupParams(1.0, 1.0, 1.0, 5)), 0.5478506),
        (FeedbackAccount("acops_single", 5).total_bits, 100.0),
        (FeedbackAccount("central_single", 5).total_bits, 1250.0),
    ]
    ok = all(abs(a - b) < 1e-4 for a, b in checks)
    return ok, ", ".join(f"{a:.6g}" for a, _ in checks)


def _bound_direction():
    # reference sweep end point: 7 dB direct, 10 dB helper link, D = 10
    cfg = NetworkConfig(n_users=5, desired_rate=10.0, direct_snr=10 ** 0.7, helper_link_snr=10.0,
                        trials=20_000, seed=6)
    sim = outage_point(cfg, ("acops_single",))["acops_single"]
    bound = outage_single_bound(10.0, SymmetricGroupParams(10.0, 10 ** 0.7, 1.0, 5))
    return sim["mean_outage"] + 3 * sim["stderr"] >= bound, f"sim {sim['mean_outage']:.4f} bound {bound:.4f}"


def _sequential():
    g = calibrate_direct_snr(6.0, 0.7)
    cfg = NetworkConfig(n_users=6, desired_rate=6.0, direct_snr=g, helper_link_snr=1000.0, seed=7)
    res = run_sequential(cfg, ["conservative", "aggressive", "no_help"] * 2, 30, 5000, 20)
    ok = res.conservation_error == 0 and res.min_budget >= 0 and res.max_bid_excess <= 0
    return ok, f"conservation err {res.conservation_error} min budget {res.min_budget}"


def _threads():
    cfg = NetworkConfig(trials=40_000, desired_rate=2.0, seed=8)
    a = outage_point(cfg, threads=1)
    b = outage_point(cfg, threads=3)
    return a == b, "thread count does not change results"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "exponential integrals": _expint,
    "direct outage vs sampling": _outage_mc,
    "density normalisation": _normalisation,
    "positive value probability": _positive_prob,
    "second-price revenue": _revenue,
    "revenue equivalence": _revenue_equivalence,
    "frozen reference values": _frozen_values,
    "outage bound direction": _bound_direction,
    "budget bookkeeping": _sequential,
    "thread independence": _threads,
}


def run_all(verbose: bool = False) -> bool:
    ok_all = True
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= bool(ok)
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok_all
