import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from acops._rng import substream
from acops.bundle import (BundleBidMatrix, BundlePartition, bundle_values, compare_formats,
                          partition_balanced, partition_uniform, run_bundle_auction,
                          run_naive_auction)
from acops.valuation import PrivateValueModel


def test_partition_uniform_examples():
    assert partition_uniform(128, 4).cardinalities == [32] * 4
    assert partition_uniform(128, 5).cardinalities == [26, 26, 26, 25, 25]
    assert partition_uniform(5, 5).cardinalities == [1] * 5
    with pytest.raises(ValueError):
        partition_uniform(4, 5)


@given(st.integers(1, 300), st.integers(1, 40), st.booleans())
def test_partition_covers(k, n, shuffled):
    if n > k:
        return
    part = partition_uniform(k, n, shuffled, substream(1, "p"))
    assert sum(part.cardinalities) == k
    assert max(part.cardinalities) - min(part.cardinalities) <= 1
    assert np.array_equal(np.sort(np.concatenate(part.bundles)), np.arange(k))


def test_partition_rejects_overlap():
    with pytest.raises(ValueError):
        BundlePartition([[0, 1], [1, 2]], 3)


def test_bundle_values():
    x = substream(1, "bv").normal(size=(3, 6))
    part = partition_uniform(6, 2)
    y = bundle_values(x, part)
    assert np.allclose(y, np.stack([x[:, :3].sum(1), x[:, 3:].sum(1)], axis=1))
    assert np.array_equal(bundle_values(x, partition_uniform(6, 6)), x)
    assert np.all(bundle_values(np.zeros((2, 6)), part) == 0)
    with pytest.raises(ValueError):
        bundle_values(np.zeros((2, 5)), part)


def test_single_bidder_wins_all():
    out = run_bundle_auction(BundleBidMatrix([[1.0, 2.0, 3.0]], [[1.0, 2.0, 3.0]]), substream(1, "b"))
    assert out.winners.tolist() == [0, 0, 0] and out.revenue == 0.0
    out = run_naive_auction([[1.0, 2.0]], substream(1, "b"))
    assert out.winners.tolist() == [0, 0]


def test_distinct_leaders():
    bids = np.array([[5.0, 1.0, 0.0], [1.0, 5.0, 0.5], [0.0, 1.0, 5.0]])
    out = run_bundle_auction(BundleBidMatrix(bids, bids), substream(1, "b"))
    assert out.winners.tolist() == [0, 1, 2] and out.distinct_winners == 3
    assert out.payments.tolist() == [1.0, 1.0, 0.5]


def test_interleaved_naive():
    bids = np.array([[2.0, 1.0, 2.0, 1.0], [1.0, 2.0, 1.0, 2.0]])
    out = run_naive_auction(bids, substream(1, "b"))
    assert out.winners.tolist() == [0, 1, 0, 1]


def test_one_bundle_per_bidder():
    bids = np.array([[5.0, 5.0], [1.0, 2.0]])
    out = run_bundle_auction(BundleBidMatrix(bids, bids), substream(1, "b"), one_bundle_per_bidder=True)
    assert out.winners.tolist() == [0, 1]
    assert out.payments.tolist() == [1.0, 0.0]


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(0, 50)),
       st.integers(0, 2 ** 32 - 1))
def test_per_bundle_argmax(bids, seed):
    out = run_bundle_auction(BundleBidMatrix(bids, bids), np.random.default_rng(seed))
    for k in range(bids.shape[1]):
        col = bids[:, k]
        if col.max() <= 0:
            assert out.winners[k] == -1
        else:
            assert col[out.winners[k]] == col.max()
            second = np.sort(col)[-2] if len(col) > 1 else 0.0
            assert out.payments[k] == second


def test_partition_balanced():
    vals = substream(1, "bal").exponential(size=(4, 20))
    part = partition_balanced(vals, 4)
    assert part.num_bundles == 4 and sum(part.cardinalities) == 20


def test_naive_equals_singleton_mixed():
    bids = substream(2, "n").exponential(size=(4, 7))
    a = run_naive_auction(bids, substream(3, "same"))
    y = bundle_values(bids, partition_uniform(7, 7))
    b = run_bundle_auction(BundleBidMatrix(y, y), substream(3, "same"))
    assert np.array_equal(a.winners, b.winners) and a.revenue == b.revenue


def test_compare_formats_direction():
    m = PrivateValueModel(100.0, 1.0)
    two = compare_formats(m, 16, 2, trials=20_000)
    ten = compare_formats(m, 16, 10, trials=5_000)
    assert two["pure_bundle"][0] > two["naive"][0]
    assert ten["pure_bundle"][0] < ten["naive"][0]
