"""Exponential integral used by the OFDM sum-capacity mean."""

from __future__ import annotations

import math

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_MAX_ITER = 500


def _e1_series(x: float) -> float:
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -x / k
        inc = term / k
        total += inc
        if abs(inc) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _e1_cf_scaled(x: float) -> float:
    # modified Lentz for e^x E1(x) = 1/(x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def e1(x: float) -> float:
    """E1(x) = int_x^inf e^-t / t dt for x > 0."""
    if not x > 0:
        raise ValueError(f"E1 needs x > 0, got {x}")
    if x < 1.0:
        return _e1_series(x)
    return _e1_cf_scaled(x) * math.exp(-x)


def scaled_e1(x: float) -> float:
    """e^x E1(x); stays finite where e^x alone would overflow."""
    if not x > 0:
        raise ValueError(f"E1 needs x > 0, got {x}")
    if x < 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_cf_scaled(x)


def ei(x: float) -> float:
    """Ei(x) = int_-inf^x e^t / t dt (principal value for x > 0)."""
    if x == 0:
        raise ValueError("Ei is singular at 0")
    if x < 0:
        return -e1(-x)
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= x / k
        inc = term / k
        total += inc
        if inc < _EPS * total:
            break
    else:
        raise ArithmeticError(f"Ei series did not converge at x={x}")
    return EULER_GAMMA + math.log(x) + total
