"""Link budget, Rayleigh fading draws, capacities and direct-link outage.

All SNRs are linear. dB conversion lives in :func:`db_to_linear` and is only
called when configuration is parsed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from acops.expint import scaled_e1

LN2 = math.log(2.0)


def db_to_linear(db):
    if np.ndim(db):
        return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(lin):
    if np.ndim(lin):
        return 10.0 * np.log10(np.asarray(lin, dtype=float))
    return 10.0 * math.log10(lin)


@dataclass(frozen=True)
class LinkParams:
    transmit_power: float = 1.0
    noise_density: float = 1.0
    bandwidth: float = 1.0
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    distance: float = 1.0
    path_loss_exponent: float = 3.0
    shadowing_sigma_db: float = 8.0
    half_duplex_factor: float = 1.0

    def __post_init__(self):
        for name in ("transmit_power", "noise_density", "bandwidth", "gain_tx", "gain_rx", "distance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 2.0 <= self.path_loss_exponent <= 4.0:
            raise ValueError("path_loss_exponent must lie in [2, 4]")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be >= 0")
        if self.half_duplex_factor not in (0.5, 1.0):
            raise ValueError("half_duplex_factor must be 0.5 or 1.0")


@dataclass(frozen=True)
class LinkState:
    gamma_bar: float
    gamma: float
    fading_coeff_sq: float

    def __post_init__(self):
        if not self.gamma_bar > 0 or self.gamma < 0:
            raise ValueError("need gamma_bar > 0 and gamma >= 0")


@dataclass
class OfdmLinkState:
    subcarrier_snrs: np.ndarray
    num_taps: int
    gamma_bar: float
    num_subcarriers: int = field(init=False)

    def __post_init__(self):
        self.subcarrier_snrs = np.asarray(self.subcarrier_snrs, dtype=float)
        self.num_subcarriers = self.subcarrier_snrs.shape[-1]
        if self.num_taps < 1 or np.any(self.subcarrier_snrs < 0):
            raise ValueError("invalid OFDM state")


def draw_shadowing(sigma_db: float, rng: np.random.Generator, size=None):
    """Log-normal shadowing factor with 0 dB median."""
    return 10.0 ** (sigma_db * rng.standard_normal(size) / 10.0)


def average_snr(params: LinkParams, shadow_draw=None, rng: np.random.Generator | None = None):
    """Average link SNR from the large-scale budget.

    ``shadow_draw`` is the multiplicative shadowing factor. When it is omitted
    and ``rng`` is given, one log-normal factor is drawn; with neither, no
    shadowing is applied.
    """
    if shadow_draw is None:
        shadow_draw = 1.0 if rng is None else draw_shadowing(params.shadowing_sigma_db, rng)
    if np.any(np.asarray(shadow_draw) <= 0):
        raise ValueError("shadowing factor must be > 0")
    snr = (
        params.transmit_power / (params.noise_density * params.bandwidth)
        * params.gain_tx * params.gain_rx * shadow_draw
        * params.distance ** (-params.path_loss_exponent)
    )
    return snr


def draw_fading(gamma_bar, rng: np.random.Generator, size=None):
    """Instantaneous SNR under Rayleigh fading: exponential with mean ``gamma_bar``."""
    if np.any(np.asarray(gamma_bar) <= 0):
        raise ValueError("gamma_bar must be > 0")
    return rng.exponential(gamma_bar, size)


def draw_link(gamma_bar: float, rng: np.random.Generator) -> LinkState:
    h_sq = rng.exponential(1.0)
    return LinkState(gamma_bar=gamma_bar, gamma=gamma_bar * h_sq, fading_coeff_sq=h_sq)


def capacity(gamma, half_duplex_factor: float = 1.0):
    """Shannon rate in bits/s/Hz, scaled by the duplexing factor."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("SNR must be >= 0")
    out = half_duplex_factor * np.log2(1.0 + g)
    return float(out) if out.ndim == 0 else out


def outage_prob_direct(rate, gamma_bar):
    """Probability that a Rayleigh link of mean SNR ``gamma_bar`` cannot carry ``rate``."""
    rate = np.asarray(rate, dtype=float)
    gamma_bar = np.asarray(gamma_bar, dtype=float)
    if np.any(rate < 0) or np.any(gamma_bar <= 0):
        raise ValueError("need rate >= 0 and gamma_bar > 0")
    out = -np.expm1(-np.expm1(rate * LN2) / gamma_bar)
    return float(out) if out.ndim == 0 else out


def tap_powers(num_taps: int) -> np.ndarray:
    """Exponentially decaying power-delay profile, normalised to unit power."""
    p = np.exp(-np.arange(num_taps) / num_taps)
    return p / p.sum()


def ofdm_draw_batch(gamma_bar: float, num_subcarriers: int, num_taps: int,
                    rng: np.random.Generator, size: int | tuple = ()) -> np.ndarray:
    """Per-subcarrier SNRs for ``size`` independent block-fading realisations.

    Returns an array of shape ``size + (num_subcarriers,)``.
    """
    if num_subcarriers < 1 or num_taps < 1 or num_taps > num_subcarriers:
        raise ValueError("need 1 <= num_taps <= num_subcarriers")
    if not gamma_bar > 0:
        raise ValueError("gamma_bar must be > 0")
    shape = (size,) if isinstance(size, int) else tuple(size)
    amp = np.sqrt(tap_powers(num_taps) / 2.0)
    taps = amp * (rng.standard_normal(shape + (num_taps,)) + 1j * rng.standard_normal(shape + (num_taps,)))
    freq = np.fft.fft(taps, n=num_subcarriers, axis=-1)
    return gamma_bar * (freq.real ** 2 + freq.imag ** 2)


def ofdm_draw(gamma_bar: float, num_subcarriers: int, num_taps: int,
              rng: np.random.Generator) -> OfdmLinkState:
    snrs = ofdm_draw_batch(gamma_bar, num_subcarriers, num_taps, rng)
    return OfdmLinkState(subcarrier_snrs=snrs, num_taps=num_taps, gamma_bar=gamma_bar)


def ofdm_capacity(state: OfdmLinkState, subset=None, half_duplex_factor: float = 1.0) -> float:
    snrs = state.subcarrier_snrs
    if subset is None:
        idx = np.arange(snrs.shape[-1])
    else:
        idx = np.asarray(subset, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= snrs.shape[-1]):
            raise IndexError("subcarrier index out of range")
    return float(np.sum(capacity(snrs[..., idx], half_duplex_factor)))


def mean_subcarrier_capacity(gamma_bar: float) -> float:
    """E[log2(1 + g)] for exponential g with mean ``gamma_bar``."""
    if not gamma_bar > 0:
        raise ValueError("gamma_bar must be > 0")
    # -e^{1/g} Ei(-1/g) == e^{1/g} E1(1/g)
    return scaled_e1(1.0 / gamma_bar) / LN2


def sum_capacity_variance(num_subcarriers: int, gamma_bar: float, num_taps: int,
                          samples: np.ndarray | None = None,
                          rng: np.random.Generator | None = None,
                          draws: int = 20000) -> float:
    """Empirical variance of the sum capacity over ``num_subcarriers`` tones.

    Blocks longer than one OFDM symbol (``samples.shape[-1]``) are treated as
    independent links, so their variances add.
    """
    if samples is None:
        if rng is None:
            raise ValueError("need samples or rng")
        width = max(num_taps, min(num_subcarriers, 128))
        samples = ofdm_draw_batch(gamma_bar, width, num_taps, rng, draws)
    caps = np.log2(1.0 + samples)
    width = caps.shape[-1]
    full, rem = divmod(num_subcarriers, width)
    var = 0.0
    if full:
        var += full * float(np.var(caps.sum(axis=-1), ddof=1))
    if rem:
        var += float(np.var(caps[..., :rem].sum(axis=-1), ddof=1))
    return var


def gaussian_capacity_approx(num_subcarriers: int, gamma_bar: float, num_taps: int = 8,
                             samples: np.ndarray | None = None,
                             rng: np.random.Generator | None = None,
                             draws: int = 20000) -> tuple[float, float]:
    """Normal approximation (mean, variance) of the OFDM sum capacity.

    The mean is exact; the variance is estimated from channel samples.
    """
    if num_subcarriers < 1:
        raise ValueError("num_subcarriers must be >= 1")
    mu = num_subcarriers * mean_subcarrier_capacity(gamma_bar)
    if not math.isfinite(mu):
        raise ArithmeticError(f"sum-capacity mean not finite for gamma_bar={gamma_bar}")
    var = sum_capacity_variance(num_subcarriers, gamma_bar, num_taps, samples, rng, draws)
    return mu, var
