"""Monte Carlo network experiments: partner selection, outage, signalling, budgets.

A group has ``N`` weak users and one potential helper. Every trial draws fresh
Rayleigh channels; users whose direct link cannot carry the desired rate
broadcast a request, and the selection policy picks who receives the helper's
surplus rate. All policies in a trial see the same channel draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from acops._rng import DEFAULT_SEED, run_chunked, substream
from acops.auction import resolve_batch
from acops.bundle import _resolve_bundles, bundle_values, partition_uniform
from acops.channel import LN2, ofdm_draw_batch

SINGLE_POLICIES = ("no_cooperation", "random_selection", "max_snr", "acops_single",
                   "central_max_min", "central_opportunistic")
BUNDLE_POLICIES = ("no_cooperation", "acops_bundle", "central_max_min")
POLICIES = SINGLE_POLICIES + ("acops_bundle",)
STRATEGIES = ("conservative", "aggressive", "no_help")
CSV_COLUMNS = ("grid", "policy", "mean_outage", "ci_low", "ci_high", "revenue", "bits")
Z95 = 1.959963984540054


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OfdmConfig:
    num_subcarriers: int = 128
    num_taps: int = 8

    def __post_init__(self):
        if self.num_subcarriers < 1 or not 1 <= self.num_taps <= self.num_subcarriers:
            raise ConfigError("ofdm needs num_subcarriers >= 1 and 1 <= num_taps <= num_subcarriers")


@dataclass(frozen=True)
class NetworkConfig:
    """Group-level parameters. SNRs are linear; rates in bits/s/Hz.

    ``helper_surplus=None`` draws the surplus each trial as the helper's spare
    capacity ``C(gamma_PH,BS) - helper_rate`` floored at 0.
    """

    n_users: int = 5
    desired_rate: float = 10.0
    direct_snr: float | tuple[float, ...] = 1.0
    helper_link_snr: float | tuple[float, ...] = 10.0
    helper_bs_snr: float = 100.0
    helper_rate: float = 0.0
    helper_surplus: float | None = None
    num_partners: int = 1
    half_duplex_factor: float = 1.0
    ofdm: OfdmConfig | None = None
    trials: int = 10_000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_users < 1:
            raise ConfigError("n_users: need N >= 1")
        if self.desired_rate < 0:
            raise ConfigError("desired_rate: need D >= 0")
        for name in ("direct_snr", "helper_link_snr"):
            v = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if v.size not in (1, self.n_users) or np.any(v <= 0):
                raise ConfigError(f"{name}: need one positive value or one per user")
        if not self.helper_bs_snr > 0:
            raise ConfigError("helper_bs_snr: need > 0")
        if self.helper_rate < 0:
            raise ConfigError("helper_rate: need >= 0")
        if self.helper_surplus is not None and self.helper_surplus < 0:
            raise ConfigError("helper_surplus: need R_c >= 0")
        if not 1 <= self.num_partners <= self.n_users:
            raise ConfigError("num_partners: need 1 <= r <= N")
        if self.half_duplex_factor not in (0.5, 1.0):
            raise ConfigError("half_duplex_factor: need 0.5 or 1.0")
        if self.trials < 1:
            raise ConfigError("trials: need >= 1")

    def per_user(self, name: str) -> np.ndarray:
        return np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (self.n_users,))


@dataclass
class FeedbackAccount:
    policy: str
    n_users: int
    n_bidders: int | None = None
    num_subcarriers: int = 128
    num_bundles: int | None = None
    bitwidth_q: float = 10.0
    bitwidth_b: float = 10.0
    bitwidth_gamma: float = 10.0
    total_bits: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.n_bidders is None:
            self.n_bidders = self.n_users
        if self.num_bundles is None:
            self.num_bundles = self.n_users
        if min(self.n_users, self.n_bidders, self.num_subcarriers, self.num_bundles) < 1:
            raise ValueError("counts must be positive")
        self.total_bits = feedback_overhead(self)


@dataclass
class TrialResult:
    achieved_rate: np.ndarray
    outage: np.ndarray
    winner: np.ndarray
    payment: float
    auction_held: bool


@dataclass
class SequentialResult:
    stages: int
    strategies: tuple[str, ...]
    cumulative_outage: dict[str, np.ndarray]      # strategy -> (stages,)
    no_coop_outage: float
    min_budget: float
    max_bid_excess: float
    conservation_error: float


# -- single-carrier trials ------------------------------------------------------

def _cap(g, hd=1.0):
    return hd * np.log2(1.0 + g)


def _draw_single(config: NetworkConfig, rng: np.random.Generator, n: int):
    N = config.n_users
    g_bs = rng.exponential(1.0, (n, N)) * config.per_user("direct_snr")
    g_ph = rng.exponential(1.0, (n, N)) * config.per_user("helper_link_snr")
    g_hb = rng.exponential(config.helper_bs_snr, n)
    pick = rng.random((n, N))   # tie-break / random selection keys
    return g_bs, g_ph, g_hb, pick


def _select_single(policy: str, config, rate_bs, rate_ph, value, g_ph,
                   requester, surplus, pick, rng):
    """Index of the assisted user per trial (-1 none) and the helper's revenue."""
    n, N = rate_bs.shape
    can_help = surplus > 0
    n_req = requester.sum(axis=1)
    active = can_help & (n_req > 0)
    revenue = np.zeros(n)
    if policy == "no_cooperation":
        chosen = np.full(n, -1)
    elif policy == "random_selection":
        chosen = np.argmax(np.where(requester, pick, -1.0), axis=1)
    elif policy == "max_snr":
        chosen = np.argmax(np.where(requester, g_ph, -1.0), axis=1)
    elif policy == "acops_single":
        bids = np.where(requester, np.maximum(value, 0.0), 0.0)
        chosen, revenue = resolve_batch(bids, rng)
        # fewer than two requests: no contention, a lone positive bidder is served at price 0
        revenue = np.where(n_req >= 2, revenue, 0.0)
    elif policy == "central_max_min":
        chosen = _central_single(rate_bs, rate_ph, requester, pick, maxmin=True)
    elif policy == "central_opportunistic":
        chosen = _central_single(rate_bs, rate_ph, requester, pick, maxmin=False)
    else:
        raise ConfigError(f"unknown single-partner policy {policy!r}")
    chosen = np.where(active, chosen, -1)
    revenue = np.where(chosen >= 0, revenue, 0.0)
    return chosen, revenue


def select_partner(policy: str, rate_bs, rate_ph, value, g_ph, requester, surplus,
                   rng: np.random.Generator, pick=None):
    """Apply one selection policy to given channel states.

    Arrays are (trials, users) except ``surplus`` (trials,). Returns the
    assisted user per trial (-1 for none) and the helper's revenue.
    """
    rate_bs = np.atleast_2d(np.asarray(rate_bs, dtype=float))
    shape = rate_bs.shape
    arr = [np.broadcast_to(np.asarray(a, dtype=float), shape) for a in (rate_ph, value, g_ph)]
    requester = np.broadcast_to(np.asarray(requester, dtype=bool), shape)
    surplus = np.broadcast_to(np.asarray(surplus, dtype=float), shape[:1])
    pick = rng.random(shape) if pick is None else np.asarray(pick, dtype=float)
    return _select_single(policy, None, rate_bs, arr[0], arr[1], arr[2], requester, surplus, pick, rng)


def _central_single(rate_bs, rate_ph, requester, pick, maxmin: bool):
    # score every candidate by the network objective after assisting it
    n, N = rate_bs.shape
    total = rate_bs.sum(axis=1)
    scores = np.full((n, N), -np.inf)
    for j in range(N):
        boosted = rate_bs.copy()
        boosted[:, j] += rate_ph[:, j]
        if maxmin:
            # max-min, ties resolved by the sum rate
            s = boosted.min(axis=1) * 1e6 + boosted.sum(axis=1) * 1e-6
        else:
            s = total + rate_ph[:, j]
        scores[:, j] = np.where(requester[:, j], s, -np.inf)
    best = scores.max(axis=1, keepdims=True)
    tied = np.isclose(scores, best, rtol=0, atol=1e-12) & np.isfinite(scores)
    return np.argmax(np.where(tied, pick, -1.0), axis=1)


def _single_chunk(config: NetworkConfig, policies: Sequence[str], rng: np.random.Generator, n: int):
    g_bs, g_ph, g_hb, pick = _draw_single(config, rng, n)
    hd = config.half_duplex_factor
    D = config.desired_rate
    rate_bs = _cap(g_bs)
    if config.helper_surplus is None:
        surplus = np.maximum(_cap(g_hb) - config.helper_rate, 0.0)
    else:
        surplus = np.full(n, float(config.helper_surplus))
    rate_ph = np.minimum(_cap(g_ph, hd), surplus[:, None])
    requester = rate_bs < D
    # only requesters (positive shortfall) ever bid; others get a neutral divisor
    shortfall = np.where(requester, D - rate_bs, 1.0)
    # value = g_ph / alpha - g_bs with alpha = q / R_c
    value = g_ph * surplus[:, None] / shortfall - g_bs
    out = {}
    for policy in policies:
        chosen, revenue = _select_single(policy, config, rate_bs, rate_ph, value, g_ph,
                                         requester, surplus, pick, rng)
        achieved = rate_bs.copy()
        rows = np.nonzero(chosen >= 0)[0]
        achieved[rows, chosen[rows]] += rate_ph[rows, chosen[rows]]
        per_trial = (achieved < D).mean(axis=1)
        out[policy] = (per_trial.sum(), np.square(per_trial).sum(), revenue.sum())
    return out


def run_trial(config: NetworkConfig, policy: str, rng: np.random.Generator) -> TrialResult:
    """One group realisation under ``policy``.

    Users whose direct rate misses the target request help. The chosen
    partner's rate becomes direct rate plus helper rate, the latter capped
    by the helper's surplus.
    """
    if policy == "acops_bundle":
        return _bundle_trial(config, rng)
    g_bs, g_ph, g_hb, pick = _draw_single(config, rng, 1)
    D = config.desired_rate
    rate_bs = _cap(g_bs)
    surplus = (np.maximum(_cap(g_hb) - config.helper_rate, 0.0) if config.helper_surplus is None
               else np.array([float(config.helper_surplus)]))
    rate_ph = np.minimum(_cap(g_ph, config.half_duplex_factor), surplus[:, None])
    requester = rate_bs < D
    value = g_ph * surplus[:, None] / np.where(requester, D - rate_bs, 1.0) - g_bs
    chosen, revenue = _select_single(policy, config, rate_bs, rate_ph, value, g_ph,
                                     requester, surplus, pick, rng)
    achieved = rate_bs[0].copy()
    winner = np.zeros(config.n_users, dtype=bool)
    if chosen[0] >= 0:
        achieved[chosen[0]] += rate_ph[0, chosen[0]]
        winner[chosen[0]] = True
    held = policy == "acops_single" and requester.sum() >= 2 and surplus[0] > 0
    return TrialResult(achieved, achieved < D, winner, float(revenue[0]), bool(held))


def _summarise(sum_, sumsq, trials):
    mean = sum_ / trials
    var = max(sumsq / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    half = Z95 * math.sqrt(var / trials)
    return mean, max(mean - half, 0.0), min(mean + half, 1.0), math.sqrt(var / trials)


def outage_point(config: NetworkConfig, policies: Sequence[str] = SINGLE_POLICIES,
                 tag: str = "single", threads: int = 1) -> dict[str, dict[str, float]]:
    """Mean weak-user outage (and ACOPS revenue) for each policy at one setting."""
    for p in policies:
        if p not in SINGLE_POLICIES:
            raise ConfigError(f"unknown single-partner policy {p!r}")
    parts = run_chunked(lambda rng, n: _single_chunk(config, policies, rng, n),
                        config.trials, config.seed, tag, threads)
    res = {}
    for p in policies:
        s = sum(x[p][0] for x in parts)
        s2 = sum(x[p][1] for x in parts)
        rev = sum(x[p][2] for x in parts) / config.trials
        mean, lo, hi, se = _summarise(s, s2, config.trials)
        res[p] = {"mean_outage": mean, "ci_low": lo, "ci_high": hi, "stderr": se, "revenue": rev}
    return res


def run_montecarlo(config: NetworkConfig, sweep_param: str, sweep_values: Iterable[float],
                   policies: Sequence[str] = SINGLE_POLICIES, threads: int = 1) -> list[dict]:
    """Outage curve over one swept config field; one CSV row per (grid, policy)."""
    rows = []
    for i, v in enumerate(sweep_values):
        try:
            cfg = replace(config, **{sweep_param: v})
        except TypeError as exc:
            raise ConfigError(f"cannot sweep unknown field {sweep_param!r}") from exc
        point = outage_point(cfg, policies, tag=f"single/{sweep_param}/{i}", threads=threads)
        for p in policies:
            r = point[p]
            rows.append({"grid": v, "policy": p, "mean_outage": r["mean_outage"],
                         "ci_low": r["ci_low"], "ci_high": r["ci_high"],
                         "revenue": r["revenue"] if p == "acops_single" else None, "bits": None,
                         "stderr": r["stderr"]})
    return rows


# -- OFDM bundled trials -------------------------------------------------------------

def _draw_ofdm(config: NetworkConfig, rng: np.random.Generator, n: int):
    ofdm = config.ofdm or OfdmConfig()
    K, L, N = ofdm.num_subcarriers, ofdm.num_taps, config.n_users
    g_bs = ofdm_draw_batch(1.0, K, L, rng, (n, N)) * config.per_user("direct_snr")[:, None]
    g_ph = ofdm_draw_batch(1.0, K, L, rng, (n, N)) * config.per_user("helper_link_snr")[:, None]
    pick = rng.random((n, N))
    return g_bs, g_ph, pick


def _bundle_outcomes(config: NetworkConfig, g_bs, g_ph, pick, rates, policies,
                     rng: np.random.Generator, one_bundle_per_bidder: bool):
    n, N, K = g_bs.shape
    hd = config.half_duplex_factor
    part = partition_uniform(K, config.num_partners)
    rate_bs = _cap(g_bs).sum(axis=2)
    bundle_rate = bundle_values(_cap(g_ph, hd), part)            # (n, N, bundles)
    values = bundle_values(g_ph - g_bs, part)
    out = {}
    for d_idx, D in enumerate(rates):
        requester = rate_bs < D
        for policy in policies:
            gain = np.zeros((n, N))
            revenue = np.zeros(n)
            if policy == "acops_bundle":
                bids = np.where(requester[:, :, None], np.maximum(values, 0.0), 0.0)
                winners, pays = _resolve_bundles(bids, rng, one_bundle_per_bidder)
                for k in range(part.num_bundles):
                    rows = np.nonzero(winners[:, k] >= 0)[0]
                    gain[rows, winners[rows, k]] += bundle_rate[rows, winners[rows, k], k]
                revenue = np.where(requester.sum(axis=1) >= 2, pays.sum(axis=1), 0.0)
            elif policy == "central_max_min":
                gain = _central_bundles(rate_bs, bundle_rate, requester, pick)
            elif policy != "no_cooperation":
                raise ConfigError(f"unknown bundle policy {policy!r}")
            per_trial = ((rate_bs + gain) < D).mean(axis=1)
            out[(d_idx, policy)] = (per_trial.sum(), np.square(per_trial).sum(), revenue.sum())
    return out


def _central_bundles(rate_bs, bundle_rate, requester, pick):
    # the controller repeatedly hands the lowest-rate requester its best remaining bundle
    n, N, K = bundle_rate.shape
    current = rate_bs.copy()
    gain = np.zeros((n, N))
    free = np.ones((n, K), dtype=bool)
    rows = np.arange(n)
    for _ in range(K):
        cand = np.where(requester, current + pick * 1e-9, np.inf)
        user = np.argmin(cand, axis=1)
        ok = np.isfinite(cand[rows, user])
        options = np.where(free, bundle_rate[rows, user, :], -np.inf)
        k = np.argmax(options, axis=1)
        ok &= np.isfinite(options[rows, k])
        r = rows[ok]
        gain[r, user[ok]] += bundle_rate[r, user[ok], k[ok]]
        current[r, user[ok]] += bundle_rate[r, user[ok], k[ok]]
        free[r, k[ok]] = False
    return gain


def _bundle_trial(config: NetworkConfig, rng: np.random.Generator) -> TrialResult:
    g_bs, g_ph, pick = _draw_ofdm(config, rng, 1)
    part = partition_uniform(g_bs.shape[2], config.num_partners)
    D = config.desired_rate
    rate_bs = _cap(g_bs).sum(axis=2)[0]
    requester = rate_bs < D
    bids = np.where(requester[:, None], np.maximum(bundle_values((g_ph - g_bs)[0], part), 0.0), 0.0)
    winners, pays = _resolve_bundles(bids[None], rng, False)
    bundle_rate = bundle_values(_cap(g_ph[0], config.half_duplex_factor), part)
    achieved = rate_bs.copy()
    winner = np.zeros(config.n_users, dtype=bool)
    for k, w in enumerate(winners[0]):
        if w >= 0:
            achieved[w] += bundle_rate[w, k]
            winner[w] = True
    held = requester.sum() >= 2
    return TrialResult(achieved, achieved < D, winner, float(pays.sum()) if held else 0.0, bool(held))


def run_bundle_experiment(config: NetworkConfig, rates: Sequence[float], r: int | None = None,
                          policies: Sequence[str] = BUNDLE_POLICIES,
                          one_bundle_per_bidder: bool = True, threads: int = 1) -> list[dict]:
    """Outage of bundled ACOPS, centralised multiple-partner and no cooperation.

    The helper's tones are split uniformly into ``r`` bundles. By default a
    user wins at most one bundle, so ``r`` is the number of partners served.
    """
    if config.ofdm is None:
        raise ConfigError("ofdm: bundle experiments need an ofdm section")
    if r is not None:
        config = replace(config, num_partners=r)
    rates = list(rates)

    def chunk(rng, n):
        g_bs, g_ph, pick = _draw_ofdm(config, rng, n)
        return _bundle_outcomes(config, g_bs, g_ph, pick, rates, policies, rng, one_bundle_per_bidder)

    parts = run_chunked(chunk, config.trials, config.seed, f"bundle/{config.num_partners}",
                        threads, chunk=512)
    rows = []
    for d_idx, D in enumerate(rates):
        for p in policies:
            s = sum(x[(d_idx, p)][0] for x in parts)
            s2 = sum(x[(d_idx, p)][1] for x in parts)
            rev = sum(x[(d_idx, p)][2] for x in parts) / config.trials
            mean, lo, hi, se = _summarise(s, s2, config.trials)
            rows.append({"grid": D, "policy": p, "mean_outage": mean, "ci_low": lo, "ci_high": hi,
                         "revenue": rev if p == "acops_bundle" else None, "bits": None,
                         "stderr": se})
    return rows


# -- signalling overhead -------------------------------------------------------------

def feedback_overhead(account: FeedbackAccount) -> float:
    """Total feedback bits for one selection round.

    Each reported quantity occupies its configured bit width, i.e. its value
    range is ``2**bitwidth``. The factorial term is evaluated in log space.
    """
    N, Na = account.n_users, account.n_bidders
    q, b, g = account.bitwidth_q, account.bitwidth_b, account.bitwidth_gamma
    K_sub, K = account.num_subcarriers, account.num_bundles
    if N <= 170:
        n_fact = float(math.factorial(N))
    else:
        # beyond 170! the bit count no longer fits a float
        try:
            n_fact = math.exp(math.lgamma(N + 1))
        except OverflowError:
            n_fact = math.inf
    central_single = N * g + n_fact * g
    if account.policy == "acops_single":
        return N * q + Na * b
    if account.policy == "central_single":
        return central_single
    if account.policy == "acops_naive":
        return N * q + math.log2(Na) + b + math.log2(K_sub)
    if account.policy == "acops_bundle":
        return N * q + math.log2(Na) + b + math.log2(K)
    if account.policy == "central_multiple":
        return K_sub * central_single
    raise ValueError(f"unknown feedback policy {account.policy!r}")


FEEDBACK_POLICIES = ("acops_single", "central_single", "acops_naive", "acops_bundle", "central_multiple")


# -- sequential budget game ---------------------------------------------------------------

def calibrate_direct_snr(rate: float, target_outage: float) -> float:
    """Mean direct SNR at which the no-cooperation outage equals ``target_outage``."""
    if not 0 < target_outage < 1:
        raise ValueError("target_outage must lie in (0, 1)")
    return math.expm1(rate * LN2) / -math.log1p(-target_outage)


def run_sequential(config: NetworkConfig, strategies: Sequence[str], num_stages: int = 100,
                   initial_budget: float = 5000.0, replications: int = 100,
                   threads: int = 1) -> SequentialResult:
    """Repeated single-partner auctions with carried-over budgets.

    Each stage every user draws a fresh direct link; users that can carry the
    target rate are strong. The strong user with the most spare rate helps,
    unless all strong users refuse (``no_help``). Weak users bid
    ``min(max(x, 0), w)`` (conservative and no_help) or their whole budget
    ``w`` (aggressive). The winner pays the second-highest bid to the helper.
    Budgets count whole tokens; value-based bids are rounded down.
    """
    N = config.n_users
    strategies = tuple(strategies)
    if len(strategies) != N:
        raise ConfigError("strategies: need one per user")
    for s in strategies:
        if s not in STRATEGIES:
            raise ConfigError(f"strategies: unknown strategy {s!r}")
    if num_stages < 1:
        raise ConfigError("num_stages: need >= 1")
    if initial_budget < 0 or initial_budget != int(initial_budget):
        raise ConfigError("initial_budget: need a whole number w0 >= 0")
    strat = np.array(strategies)
    helps = strat != "no_help"
    aggressive = strat == "aggressive"
    D = config.desired_rate
    g_bs_bar = config.per_user("direct_snr")
    g_ph_bar = config.per_user("helper_link_snr")
    hd = config.half_duplex_factor

    def replicate(rng, n):
        # n replications advanced in lock-step
        w = np.full((n, N), float(initial_budget))
        outage_count = np.zeros((n, N))
        cum = np.zeros((num_stages, N))
        direct_out = 0.0
        min_budget = math.inf
        max_excess = -math.inf
        cons_err = 0.0
        total0 = w.sum(axis=1)
        rows = np.arange(n)
        for k in range(num_stages):
            g_bs = rng.exponential(1.0, (n, N)) * g_bs_bar
            g_ph = rng.exponential(1.0, (n, N)) * g_ph_bar
            rate_bs = _cap(g_bs)
            strong = rate_bs >= D
            weak = ~strong
            direct_out += weak.sum()
            # helper: the willing strong user with the largest spare rate
            spare = np.where(strong & helps, rate_bs - D, -np.inf)
            helper = np.argmax(spare, axis=1)
            has_helper = np.isfinite(spare[rows, helper])
            surplus = np.where(has_helper, np.maximum(spare[rows, helper], 0.0), 0.0)
            q = np.where(weak, D - rate_bs, 1.0)
            x = g_ph * surplus[:, None] / q - g_bs
            # tokens are whole units, so budget bookkeeping is exact
            bids = np.where(aggressive, w, np.floor(np.minimum(np.maximum(x, 0.0), w)))
            bids = np.where(weak, bids, 0.0)
            max_excess = max(max_excess, float((bids - w).max()))
            winners, pays = resolve_batch(bids, rng)
            n_req = weak.sum(axis=1)
            ok = has_helper & (surplus > 0) & (winners >= 0)
            pays = np.where(ok & (n_req >= 2), pays, 0.0)
            r = rows[ok]
            win = winners[ok]
            w[r, win] -= pays[ok]
            w[r, helper[ok]] += pays[ok]
            achieved = rate_bs.copy()
            achieved[r, win] += np.minimum(_cap(g_ph[r, win], hd), surplus[ok])
            outage_count += achieved < D
            cum[k] = outage_count.sum(axis=0) / (k + 1)
            min_budget = min(min_budget, float(w.min()))
            cons_err = max(cons_err, float(np.abs(w.sum(axis=1) - total0).max()))
        return cum, direct_out, min_budget, max_excess, cons_err

    parts = run_chunked(replicate, replications, config.seed, "sequential", threads, chunk=64)
    cum = sum(p[0] for p in parts) / replications
    by_strategy = {s: cum[:, strat == s].mean(axis=1) for s in STRATEGIES if np.any(strat == s)}
    return SequentialResult(
        stages=num_stages,
        strategies=strategies,
        cumulative_outage=by_strategy,
        no_coop_outage=sum(p[1] for p in parts) / (replications * num_stages * N),
        min_budget=min(p[2] for p in parts),
        max_bid_excess=max(p[3] for p in parts),
        conservation_error=max(p[4] for p in parts),
    )


def longevity_gap(model, n_users: int, stages: int = 20_000, seed: int = DEFAULT_SEED) -> float:
    """Empirical helper advantage from repeated symmetric auctions.

    Ratio of the seller's mean revenue per stage to a bidder's mean payment
    per won stage, i.e. the number of future wins one stage of selling pays for.
    """
    rng = substream(seed, "longevity", n_users)
    bids = np.maximum(model.sample(rng, (stages, n_users)), 0.0)
    winners, pays = resolve_batch(bids, rng)
    won = winners >= 0
    if not won.any():
        return 0.0
    return float(pays.mean() / pays[won].mean())
