"""Private values of weak users and their distributions.

A weak user's value for cooperation is its helper-link SNR weighted by the
rate ratio alpha, minus its direct-link SNR. With exponential SNRs the value
follows an asymmetric Laplace law; bundle values use the Erlang
approximation of the positive part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PrivateValueModel:
    gamma_bar_ph: float
    gamma_bar_bs: float
    alpha: float = 1.0
    lam: float = field(init=False)

    def __post_init__(self):
        if not (self.gamma_bar_ph > 0 and self.gamma_bar_bs > 0 and self.alpha > 0):
            raise ValueError("gamma_bar_ph, gamma_bar_bs and alpha must all be > 0")
        object.__setattr__(self, "lam", self.gamma_bar_ph + self.gamma_bar_bs)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        g_ph = rng.exponential(self.gamma_bar_ph, size)
        g_bs = rng.exponential(self.gamma_bar_bs, size)
        return private_value(g_ph, g_bs, self.alpha)


@dataclass(frozen=True)
class BundleValueModel:
    gamma_bar_ph: float
    cardinality: int = 1

    def __post_init__(self):
        if not self.gamma_bar_ph > 0 or int(self.cardinality) != self.cardinality or self.cardinality < 1:
            raise ValueError("need gamma_bar_ph > 0 and integer cardinality >= 1")

    @property
    def support_upper(self) -> float:
        c = self.cardinality
        return self.gamma_bar_ph * (c + 10.0 * math.sqrt(c) + 10.0)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return rng.gamma(self.cardinality, self.gamma_bar_ph, size)


def private_value(gamma_ph, gamma_bs, alpha=1.0):
    """``gamma_ph / alpha - gamma_bs``, in SNR units. May be negative."""
    if np.any(np.asarray(alpha) <= 0):
        raise ValueError("alpha must be > 0")
    out = np.asarray(gamma_ph, dtype=float) / alpha - np.asarray(gamma_bs, dtype=float)
    return float(out) if out.ndim == 0 else out


def _laplace_scales(model: PrivateValueModel) -> tuple[float, float, float]:
    # x = V - W with V ~ Exp(mean G_PH / alpha), W ~ Exp(mean G_BS)
    s_pos = model.gamma_bar_ph / model.alpha
    s_neg = model.gamma_bar_bs
    return s_pos, s_neg, s_pos + s_neg


def pv_pdf(x, model: PrivateValueModel):
    """Asymmetric Laplace density of the private value."""
    x = np.asarray(x, dtype=float)
    s_pos, s_neg, tot = _laplace_scales(model)
    out = np.where(x >= 0, np.exp(-np.maximum(x, 0.0) / s_pos), np.exp(np.minimum(x, 0.0) / s_neg)) / tot
    return float(out) if out.ndim == 0 else out


def pv_cdf(x, model: PrivateValueModel):
    x = np.asarray(x, dtype=float)
    s_pos, s_neg, tot = _laplace_scales(model)
    # written so both branches give exactly s_neg / tot at 0
    pos = s_neg / tot - (s_pos / tot) * np.expm1(-np.maximum(x, 0.0) / s_pos)
    neg = (s_neg / tot) * np.exp(np.minimum(x, 0.0) / s_neg)
    out = np.where(x >= 0, pos, neg)
    return float(out) if out.ndim == 0 else out


def positive_value_prob(model: PrivateValueModel) -> float:
    """Probability that a user's value is positive, i.e. that it bids."""
    s_pos, _, tot = _laplace_scales(model)
    return s_pos / tot


def bundle_pdf(y, model: BundleValueModel):
    """Erlang density of order ``cardinality`` and scale ``gamma_bar_ph``; 0 for y < 0."""
    y = np.asarray(y, dtype=float)
    n = model.cardinality
    g = model.gamma_bar_ph
    t = np.maximum(y, 0.0) / g
    if n == 1:
        logf = -t - math.log(g)
    else:
        with np.errstate(divide="ignore"):
            logf = (n - 1) * np.log(t) - t - math.log(g) - math.lgamma(n)
    out = np.where(y < 0, 0.0, np.exp(logf))
    return float(out) if out.ndim == 0 else out


def bundle_cdf(y, model: BundleValueModel):
    """Erlang cdf, ``1 - e^{-y/G} sum_{m<c} (y/G)^m / m!``, summed in log space."""
    y = np.asarray(y, dtype=float)
    t = np.maximum(y, 0.0) / model.gamma_bar_ph
    if model.cardinality == 1:
        out = -np.expm1(-t)
    else:
        with np.errstate(divide="ignore"):
            logt = np.log(t)
        tail = np.zeros_like(t)
        for m in range(model.cardinality):
            tail = tail + np.exp(m * logt - t - math.lgamma(m + 1)) if m else tail + np.exp(-t)
        out = 1.0 - tail
    out = np.clip(np.where(y <= 0, 0.0, out), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
