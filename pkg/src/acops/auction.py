"""Single-object sealed-bid auctions for one helper's surplus rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from acops._rng import DEFAULT_SEED, run_chunked
from acops.valuation import PrivateValueModel, positive_value_prob

PRICING_RULES = ("first_price", "second_price")


@dataclass(frozen=True)
class BidderType:
    private_value: float
    rival_estimate: int = 0
    budget: float = math.inf

    def __post_init__(self):
        if self.rival_estimate < 0 or int(self.rival_estimate) != self.rival_estimate:
            raise ValueError("rival_estimate must be a non-negative integer")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")


@dataclass(frozen=True)
class AuctionConfig:
    pricing_rule: str = "second_price"
    reserve_price: float = 0.0
    tie_rule: str = "uniform_random"

    def __post_init__(self):
        if self.pricing_rule not in PRICING_RULES:
            raise ValueError(f"pricing_rule must be one of {PRICING_RULES}")
        if self.reserve_price != 0.0:
            raise ValueError("the helper's reserve price is fixed at 0")
        if self.tie_rule != "uniform_random":
            raise ValueError("only uniform_random tie breaking is supported")


@dataclass
class AuctionOutcome:
    winner_index: int | None
    payment: float
    payoffs: np.ndarray
    bids: np.ndarray


@dataclass(frozen=True)
class RevenueEstimate:
    mean: float
    stderr: float
    trials: int


def estimate_rivals(zeta: float, rng: np.random.Generator, size=None):
    """Poisson estimate of the number of competing bidders."""
    if zeta < 0:
        raise ValueError("zeta must be >= 0")
    return rng.poisson(zeta, size)


def best_response(x, rival_estimate=None):
    """Equilibrium second-price bid: the value itself, or 0 when it is not positive.

    The rival estimate does not enter.
    """
    out = np.maximum(np.asarray(x, dtype=float), 0.0)
    return float(out) if out.ndim == 0 else out


def budget_bid(x, budget):
    """Conservative bid under a budget: ``min(max(x, 0), w)``."""
    out = np.minimum(np.maximum(np.asarray(x, dtype=float), 0.0), budget)
    return float(out) if out.ndim == 0 else out


def _power_integral(x: np.ndarray, m: int, amp: float, rate: float) -> np.ndarray:
    # int_0^x (1 - amp e^{-rate t})^m dt by binomial expansion
    total = x.copy()
    for j in range(1, m + 1):
        coef = math.comb(m, j) * (-amp) ** j / (j * rate)
        total += coef * -np.expm1(-j * rate * x)
    return total


def first_price_bid(x, model: PrivateValueModel, n_bidders: int):
    """Symmetric first-price equilibrium bid with ``n_bidders`` in the group.

    Users with non-positive values abstain, so a bidder shades to the expected
    highest rival bid given that it is below its own value:
    ``x - int_0^x F^{N-1} / F^{N-1}(x)``.
    """
    if n_bidders < 1:
        raise ValueError("n_bidders must be >= 1")
    x = np.asarray(x, dtype=float)
    xp = np.maximum(x, 0.0)
    m = n_bidders - 1
    if m == 0:
        out = np.zeros_like(xp)
    else:
        amp = positive_value_prob(model)
        rate = model.alpha / model.gamma_bar_ph
        fm = (1.0 - amp * np.exp(-rate * xp)) ** m
        out = xp - _power_integral(xp, m, amp, rate) / fm
        out = np.where(x > 0, np.maximum(out, 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def resolve_batch(bids: np.ndarray, rng: np.random.Generator,
                  pricing_rule: str = "second_price") -> tuple[np.ndarray, np.ndarray]:
    """Winners and payments for a batch of independent auctions.

    ``bids`` has shape (trials, bidders). Winner -1 means no sale (no positive
    bid). Ties at the top are broken uniformly at random; random numbers are
    consumed only for tied rows.
    """
    bids = np.asarray(bids, dtype=float)
    if bids.ndim != 2 or bids.shape[1] == 0:
        raise ValueError("bids must have shape (trials, bidders) with at least one bidder")
    if np.any(bids < 0):
        raise ValueError("bids must be >= 0")
    n_bidders = bids.shape[1]
    top = bids.max(axis=1)
    sale = top > 0
    at_top = bids == top[:, None]
    winners = np.argmax(at_top, axis=1)
    tied = sale & (at_top.sum(axis=1) > 1)
    if np.any(tied):
        keys = rng.random((int(tied.sum()), n_bidders))
        keys[~at_top[tied]] = -1.0
        winners[tied] = np.argmax(keys, axis=1)
    if pricing_rule == "second_price":
        if n_bidders == 1:
            price = np.zeros(len(bids))
        else:
            price = np.partition(bids, n_bidders - 2, axis=1)[:, n_bidders - 2]
    elif pricing_rule == "first_price":
        price = top
    else:
        raise ValueError(f"unknown pricing rule {pricing_rule!r}")
    winners = np.where(sale, winners, -1)
    payments = np.where(sale, price, 0.0)
    return winners, payments


def run_auction(bids, config: AuctionConfig, values, rng: np.random.Generator) -> AuctionOutcome:
    """Run one sealed-bid auction and compute every bidder's realised payoff."""
    bids = np.asarray(bids, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if bids.size == 0:
        raise ValueError("need at least one bid")
    if values.shape != bids.shape:
        raise ValueError("bids and values must have the same length")
    winners, payments = resolve_batch(bids[None, :], rng, config.pricing_rule)
    w = int(winners[0])
    payoffs = np.zeros_like(bids)
    if w < 0:
        return AuctionOutcome(None, 0.0, payoffs, bids)
    pay = float(payments[0])
    payoffs[w] = values[w] - pay
    return AuctionOutcome(w, pay, payoffs, bids)


def _revenue_chunk(rng, n, model: PrivateValueModel, n_users: int, rule: str):
    x = model.sample(rng, (n, n_users))
    bids = best_response(x) if rule == "second_price" else first_price_bid(x, model, n_users)
    _, pay = resolve_batch(bids, rng, rule)
    return float(pay.sum()), float(np.square(pay).sum())


def simulate_revenue(model: PrivateValueModel, n_users: int, config: AuctionConfig | None = None,
                     trials: int = 100_000, seed: int = DEFAULT_SEED, threads: int = 1) -> RevenueEstimate:
    """Monte Carlo helper revenue with ``n_users`` weak users at equilibrium bids."""
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    config = config or AuctionConfig()
    parts = run_chunked(
        lambda rng, n: _revenue_chunk(rng, n, model, n_users, config.pricing_rule),
        trials, seed, f"revenue/{config.pricing_rule}/{n_users}", threads,
    )
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s / trials
    var = max(s2 / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    return RevenueEstimate(mean, math.sqrt(var / trials), trials)
