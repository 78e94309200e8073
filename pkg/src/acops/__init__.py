"""Auction-based cooperative partner selection: channel models, auctions, analysis and simulation."""

__version__ = "0.1.0"

from acops.channel import LinkParams, capacity, outage_prob_direct
from acops.valuation import BundleValueModel, PrivateValueModel
from acops.auction import AuctionConfig, run_auction, simulate_revenue
from acops.bundle import partition_uniform, run_bundle_auction
from acops.netsim import NetworkConfig, OfdmConfig, run_montecarlo, run_sequential

__all__ = [
    "__version__", "LinkParams", "capacity", "outage_prob_direct", "PrivateValueModel",
    "BundleValueModel", "AuctionConfig", "run_auction", "simulate_revenue", "partition_uniform",
    "run_bundle_auction", "NetworkConfig", "OfdmConfig", "run_montecarlo", "run_sequential",
]
