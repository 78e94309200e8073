"""Closed-form and quadrature results for single-partner and bundled auctions.

Each formula is evaluated as stated, including where it disagrees with the
exact order-statistics answer; :func:`revenue_single_exact` and the Monte
Carlo routines provide the ground truth to compare against.

Single-object and bundle results weight the number of actual bidders differently:
:func:`prob_na` is the unnormalised ``A**n`` and the bundle results use
``1/N``. Both are kept as written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, special

from acops.channel import LN2, gaussian_capacity_approx, outage_prob_direct
from acops.valuation import BundleValueModel, PrivateValueModel, bundle_cdf, bundle_pdf, pv_cdf


class NumericError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SymmetricGroupParams:
    gamma_bar_ph: float
    gamma_bar_bs: float
    alpha: float = 1.0
    n_users: int = 5
    positive_prob: float = field(init=False)

    def __post_init__(self):
        if not (self.gamma_bar_ph > 0 and self.gamma_bar_bs > 0 and self.alpha > 0):
            raise ValueError("SNRs and alpha must be > 0")
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        object.__setattr__(self, "positive_prob",
                           self.gamma_bar_ph / (self.gamma_bar_ph + self.gamma_bar_bs))

    @property
    def value_model(self) -> PrivateValueModel:
        return PrivateValueModel(self.gamma_bar_ph, self.gamma_bar_bs, self.alpha)


def _quad(fn: Callable[[float], float], lo: float, hi: float, points=None, tol: float = 1e-11) -> float:
    val, err, *rest = integrate.quad(fn, lo, hi, points=points, limit=500,
                                     epsabs=tol, epsrel=tol, full_output=1)
    if len(rest) > 1 and err > 1e-7 * max(1.0, abs(val)):
        raise NumericError(f"quadrature on [{lo}, {hi}] did not converge: est={val}, err={err}, "
                           f"msg={rest[1]!r}")
    return val


# -- single partner -------------------------------------------------------

def prob_na(n: int, params: SymmetricGroupParams) -> float:
    """Weight of ``n`` actual bidders: every one of them has a positive value."""
    if not 1 <= n <= params.n_users:
        raise ValueError(f"n must lie in [1, {params.n_users}]")
    return params.positive_prob ** n


def win_prob_single(params: SymmetricGroupParams) -> float:
    """sum_{n=1}^N A^{2n} / n. Exceeds 1 when A is close to 1 and N > 1."""
    a2 = params.positive_prob ** 2
    return sum(a2 ** n / n for n in range(1, params.n_users + 1))


def revenue_single_closed_form(params: SymmetricGroupParams) -> float:
    """Helper revenue by the binomial closed form for a symmetric group."""
    g = params.gamma_bar_ph
    lam = params.gamma_bar_ph + params.gamma_bar_bs
    total = 0.0
    for n in range(1, params.n_users + 1):
        inner = sum(math.comb(n - 2, k) / (n - k - 1) ** 2 for k in range(n - 1))
        try:
            term = (-1) ** (n - 2) * (g / lam) ** (2 * n) * g ** n / lam ** (n - 1) * inner
        except OverflowError as exc:
            raise NumericError(f"closed-form revenue overflows at n={n}") from exc
        if not math.isfinite(term):
            raise NumericError(f"closed-form revenue overflows at n={n}")
        total += term
    return total


def expected_second_highest(cdf: Callable[[np.ndarray], np.ndarray], n: int,
                            upper: float, points=None) -> float:
    """E[max(second-highest of n iid draws, 0)] by integrating its survival function."""
    if n < 2:
        return 0.0

    def surv(t):
        f = cdf(t)
        return 1.0 - f ** n - n * f ** (n - 1) * (1.0 - f)

    # callers pick `upper` where 1 - F is below ~1e-15, so the cut tail is negligible
    return _quad(surv, 0.0, upper, points=points)


def revenue_single_exact(params: SymmetricGroupParams) -> float:
    """Exact second-price revenue: the expected second-highest clamped value."""
    model = params.value_model
    upper = params.gamma_bar_ph / params.alpha * 60.0
    return expected_second_highest(lambda t: pv_cdf(t, model), params.n_users, upper,
                                   points=[params.gamma_bar_ph / params.alpha])


def outage_single_bound(rate: float, params: SymmetricGroupParams) -> float:
    """Outage lower bound for one weak user under single-partner auctions."""
    if rate < 0:
        raise ValueError("rate must be >= 0")
    psi = win_prob_single(params)
    direct = outage_prob_direct(rate, params.gamma_bar_bs)
    coop = outage_prob_direct(rate / 2.0, params.gamma_bar_ph)
    return direct * (1.0 - psi) + coop * psi


def helper_advantage_eta(params: SymmetricGroupParams, expected_payment_per_stage: float,
                         revenue: float | None = None) -> float:
    """Extra bidding stages financed by one stage of helping.

    ``revenue`` defaults to the closed-form single-object revenue.
    """
    if not expected_payment_per_stage > 0:
        raise ValueError("expected payment per stage must be > 0")
    rev = revenue_single_closed_form(params) if revenue is None else revenue
    return rev / expected_payment_per_stage


# -- bundles ----------------------------------------------------------------

def _bundle_grid(model: BundleValueModel):
    c = model.cardinality
    g = model.gamma_bar_ph
    return model.support_upper, [g * max(c - 1, 0.5)]


def expect_cdf_power(model: BundleValueModel, k: int) -> float:
    """E[G(Y)^k] for a bundle value Y with cdf G."""
    if k == 0:
        return 1.0
    upper, pts = _bundle_grid(model)
    body = _quad(lambda y: bundle_cdf(y, model) ** k * bundle_pdf(y, model), 0.0, upper, pts)
    return body + (1.0 - bundle_cdf(upper, model))


def expect_value_cdf_power(model: BundleValueModel, k: int) -> float:
    """E[Y G(Y)^k]."""
    upper, pts = _bundle_grid(model)
    body = _quad(lambda y: y * bundle_cdf(y, model) ** k * bundle_pdf(y, model), 0.0, upper, pts)
    c, g = model.cardinality, model.gamma_bar_ph
    tail = c * g * special.gammaincc(c + 1, upper / g)
    return body + tail


def revenue_bundle(bundle_models: Sequence[BundleValueModel], n_users: int) -> float:
    """Mixed-bundle revenue with ``Pr(N_a = n) = 1/N``.

    A lone bidder pays the zero reserve, so the ``n = 1`` term is 0.
    """
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    total = 0.0
    for model in bundle_models:
        for n in range(2, n_users + 1):
            total += expect_cdf_power(model, n - 1) * expect_value_cdf_power(model, n - 2) / n_users
    return total


def theta_win(model: BundleValueModel, n_users: int) -> float:
    """Probability that a given user wins a given bundle, ``Pr(N_a = n) = 1/N``."""
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    return sum(expect_cdf_power(model, n - 1) for n in range(1, n_users + 1)) / n_users


def outage_bundle_approx(rate, model: BundleValueModel, n_users: int, num_subcarriers: int,
                         first_bundle_size: int, gamma_bar: float, num_taps: int = 8,
                         rng: np.random.Generator | None = None, draws: int = 20000,
                         moments: tuple[tuple[float, float], tuple[float, float]] | None = None):
    """Gaussian-capacity outage approximation for a weak user in the bundled auction.

    ``moments`` may carry precomputed ``((mu, var) for K, (mu, var) for K + c1)``;
    otherwise the variances are estimated from fresh channel draws.
    """
    if moments is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        moments = (
            gaussian_capacity_approx(num_subcarriers, gamma_bar, num_taps, rng=rng, draws=draws),
            gaussian_capacity_approx(num_subcarriers + first_bundle_size, gamma_bar, num_taps,
                                     rng=rng, draws=draws),
        )
    (mu0, var0), (mu1, var1) = moments
    theta = theta_win(model, n_users)
    rate = np.asarray(rate, dtype=float)
    lose = 0.5 * (1.0 + special.erf((rate - mu0) / math.sqrt(2.0 * var0)))
    win = 0.5 * (1.0 + special.erf((rate - mu1) / math.sqrt(2.0 * var1)))
    out = lose * (1.0 - theta) + win * theta
    return float(out) if out.ndim == 0 else out


def bundle_superiority(n_bidders: int, num_objects: int, gamma_bar: float = 1.0) -> tuple[float, float]:
    """Both sides of the pure-bundle dominance condition.

    Left: expected second-highest bundle value, bundles Erlang of order
    ``num_objects``. Right: ``num_objects`` times the expected second-highest
    single-object value (the order-1 case of the same family).
    """
    if n_bidders < 2 or num_objects < 1:
        raise ValueError("need n_bidders >= 2 and num_objects >= 1")
    bundle = BundleValueModel(gamma_bar, num_objects)
    single = BundleValueModel(gamma_bar, 1)
    up_b, pts_b = _bundle_grid(bundle)
    lhs = expected_second_highest(lambda t: bundle_cdf(t, bundle), n_bidders,
                                  up_b + gamma_bar * 5 * math.log(n_bidders), pts_b)
    up_s, _ = _bundle_grid(single)
    rhs = num_objects * expected_second_highest(lambda t: bundle_cdf(t, single), n_bidders,
                                                up_s + gamma_bar * 5 * math.log(n_bidders))
    return lhs, rhs


def bundle_superiority_threshold(n_range: Iterable[int] = range(2, 11),
                                 num_objects: int | None = None,
                                 gamma_bar: float = 1.0) -> int:
    """Largest bidder count at which the pure bundle out-earns separate sales.

    ``num_objects=None`` sells as many objects as there are bidders.
    Returns 0 if dominance holds nowhere in ``n_range``.
    """
    n_range = sorted(n_range)
    if not n_range or n_range[0] < 2:
        raise ValueError("n_range must start at 2 or above")
    best = 0
    for n in n_range:
        lhs, rhs = bundle_superiority(n, n if num_objects is None else num_objects, gamma_bar)
        if lhs > rhs:
            best = n
    return best
