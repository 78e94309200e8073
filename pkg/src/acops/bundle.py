"""Multiple-object subcarrier auctions: naive, pure bundle and mixed bundle.

Every bundle is sold by its own second-price auction with zero reserve. The
naive format is the mixed format with singleton bundles and shares its code
path, so both consume the random stream identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from acops._rng import DEFAULT_SEED, run_chunked
from acops.auction import resolve_batch
from acops.valuation import PrivateValueModel


@dataclass
class BundlePartition:
    bundles: list[np.ndarray]
    total_subcarriers: int

    def __post_init__(self):
        self.bundles = [np.asarray(b, dtype=int) for b in self.bundles]
        if not self.bundles or any(b.size == 0 for b in self.bundles):
            raise ValueError("every bundle needs at least one subcarrier")
        flat = np.concatenate(self.bundles)
        if flat.size != self.total_subcarriers or not np.array_equal(
                np.sort(flat), np.arange(self.total_subcarriers)):
            raise ValueError("bundles must be disjoint and cover every subcarrier exactly once")

    @property
    def cardinalities(self) -> list[int]:
        return [int(b.size) for b in self.bundles]

    @property
    def num_bundles(self) -> int:
        return len(self.bundles)

    def membership(self) -> np.ndarray:
        """Bundle index of every subcarrier."""
        owner = np.empty(self.total_subcarriers, dtype=int)
        for k, b in enumerate(self.bundles):
            owner[b] = k
        return owner


@dataclass
class BundleBidMatrix:
    bids: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.bids = np.atleast_2d(np.asarray(self.bids, dtype=float))
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.bids.shape != self.values.shape:
            raise ValueError("bids and values must have the same shape")
        if np.any(self.bids < 0):
            raise ValueError("bids must be >= 0")


@dataclass
class BundleOutcome:
    winners: np.ndarray      # per bundle, -1 when unsold
    payments: np.ndarray     # per bundle
    payoffs: np.ndarray      # per bidder, summed over won bundles

    @property
    def revenue(self) -> float:
        return float(self.payments.sum())

    @property
    def distinct_winners(self) -> int:
        return int(np.unique(self.winners[self.winners >= 0]).size)


def partition_uniform(num_subcarriers: int, num_bidders: int, shuffled: bool = False,
                      rng: np.random.Generator | None = None) -> BundlePartition:
    """Split subcarriers into ``num_bidders`` bundles of (nearly) equal size.

    The first ``num_subcarriers % num_bidders`` bundles get one extra tone.
    Bundles are contiguous unless ``shuffled``.
    """
    if num_bidders < 1 or num_subcarriers < num_bidders:
        raise ValueError("need 1 <= num_bidders <= num_subcarriers")
    base, extra = divmod(num_subcarriers, num_bidders)
    sizes = [base + 1 if k < extra else base for k in range(num_bidders)]
    order = np.arange(num_subcarriers)
    if shuffled:
        if rng is None:
            raise ValueError("shuffled bundling needs an rng")
        order = rng.permutation(num_subcarriers)
    cuts = np.cumsum(sizes)[:-1]
    return BundlePartition(np.split(order, cuts), num_subcarriers)


def partition_balanced(per_subcarrier_values: np.ndarray, num_bundles: int) -> BundlePartition:
    """Greedy value-balancing baseline (not the uniform rule).

    Tones are taken in decreasing order of their best value and each goes to
    the bundle with the smallest running best-value total.
    """
    vals = np.atleast_2d(per_subcarrier_values)
    n_sub = vals.shape[1]
    if num_bundles < 1 or n_sub < num_bundles:
        raise ValueError("need 1 <= num_bundles <= num_subcarriers")
    weight = np.maximum(vals, 0.0).max(axis=0)
    order = np.argsort(-weight, kind="stable")
    load = np.zeros(num_bundles)
    members: list[list[int]] = [[] for _ in range(num_bundles)]
    for j, sc in enumerate(order):
        # seed every bundle with one tone first so none stays empty
        k = j if j < num_bundles else int(np.argmin(load))
        members[k].append(int(sc))
        load[k] += weight[sc]
    return BundlePartition([np.sort(m) for m in members], n_sub)


def bundle_values(per_subcarrier_values, partition: BundlePartition) -> np.ndarray:
    """Additive bundle values: sum of each bidder's tone values per bundle.

    Accepts shape (..., bidders, subcarriers) and returns (..., bidders, bundles).
    """
    vals = np.asarray(per_subcarrier_values, dtype=float)
    if vals.shape[-1] != partition.total_subcarriers:
        raise ValueError(
            f"expected {partition.total_subcarriers} subcarriers, got {vals.shape[-1]}")
    return np.stack([vals[..., b].sum(axis=-1) for b in partition.bundles], axis=-1)


def _resolve_bundles(bids: np.ndarray, rng: np.random.Generator,
                     one_bundle_per_bidder: bool) -> tuple[np.ndarray, np.ndarray]:
    # bids: (trials, bidders, bundles)
    trials, _, n_bundles = bids.shape
    if not one_bundle_per_bidder:
        flat = np.moveaxis(bids, 2, 1).reshape(trials * n_bundles, -1)
        w, p = resolve_batch(flat, rng)
        return w.reshape(trials, n_bundles), p.reshape(trials, n_bundles)
    winners = np.full((trials, n_bundles), -1)
    payments = np.zeros((trials, n_bundles))
    eligible = np.ones(bids.shape[:2], dtype=bool)
    for k in range(n_bundles):
        b = np.where(eligible, bids[:, :, k], 0.0)
        w, p = resolve_batch(b, rng)
        winners[:, k] = w
        payments[:, k] = p
        rows = np.nonzero(w >= 0)[0]
        eligible[rows, w[rows]] = False
    return winners, payments


def run_bundle_auction(bid_matrix: BundleBidMatrix, rng: np.random.Generator,
                       one_bundle_per_bidder: bool = False) -> BundleOutcome:
    """Sell every bundle by a separate second-price auction.

    A bidder may win several bundles. With ``one_bundle_per_bidder`` bundles
    are sold in index order and a winner is dropped from later bundles; the
    price is then the second-highest bid among the bidders still eligible.
    """
    bids = bid_matrix.bids
    if bids.shape[0] < 1:
        raise ValueError("need at least one bidder")
    winners, payments = _resolve_bundles(bids[None], rng, one_bundle_per_bidder)
    winners, payments = winners[0], payments[0]
    payoffs = np.zeros(bids.shape[0])
    for k, w in enumerate(winners):
        if w >= 0:
            payoffs[w] += bid_matrix.values[w, k] - payments[k]
    return BundleOutcome(winners, payments, payoffs)


def run_naive_auction(per_subcarrier_bids, rng: np.random.Generator, values=None) -> BundleOutcome:
    """Every subcarrier sold as its own object in one simultaneous auction."""
    bids = np.atleast_2d(np.asarray(per_subcarrier_bids, dtype=float))
    values = bids if values is None else values
    return run_bundle_auction(BundleBidMatrix(bids, values), rng)


def _formats_chunk(rng, n, model: PrivateValueModel, n_sub: int, n_bidders: int):
    x = model.sample(rng, (n, n_bidders, n_sub))
    out = {}
    layouts = {
        "naive": partition_uniform(n_sub, n_sub),
        "pure_bundle": partition_uniform(n_sub, 1),
        "mixed_bundle": partition_uniform(n_sub, min(n_bidders, n_sub)),
    }
    for name, part in layouts.items():
        bids = np.maximum(bundle_values(x, part), 0.0)
        _, pay = _resolve_bundles(bids, rng, False)
        rev = pay.sum(axis=1)
        out[name] = (float(rev.sum()), float(np.square(rev).sum()))
    return out


def compare_formats(model: PrivateValueModel, num_subcarriers: int, num_bidders: int,
                    trials: int = 20_000, seed: int = DEFAULT_SEED,
                    threads: int = 1) -> dict[str, tuple[float, float]]:
    """Mean revenue and standard error of each format on common value draws.

    Tone values are exact signed private values; bundle values are their sums
    and bids are clamped at zero.
    """
    if num_bidders < 1 or num_subcarriers < 1:
        raise ValueError("counts must be >= 1")
    parts = run_chunked(
        lambda rng, n: _formats_chunk(rng, n, model, num_subcarriers, num_bidders),
        trials, seed, f"formats/{num_subcarriers}/{num_bidders}", threads,
        chunk=max(1, 2_000_000 // (num_subcarriers * num_bidders)),
    )
    result = {}
    for name in parts[0]:
        s = sum(p[name][0] for p in parts)
        s2 = sum(p[name][1] for p in parts)
        mean = s / trials
        var = max(s2 / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
        result[name] = (mean, float(np.sqrt(var / trials)))
    return result
