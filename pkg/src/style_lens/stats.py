"""Small numerical statistics kit: regularized incomplete beta, Welch's
t-test with Satterthwaite degrees of freedom, and inclusive-interpolation
quantiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MAX_ITER = 500
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Lentz continued fraction for the incomplete beta (Numerical Recipes form)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            break
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), accurate to ~1e-10."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@dataclass(frozen=True)
class WelchResult:
    statistic: float
    df: float
    p_value: float  # two-sided
    n1: int
    n2: int


def welch_t_test(sample1, sample2) -> WelchResult:
    """Two-sample unequal-variance t-test (Satterthwaite df, two-sided p)."""
    x = np.asarray(sample1, dtype=float)
    y = np.asarray(sample2, dtype=float)
    n1, n2 = len(x), len(y)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least 2 observations")
    v1 = x.var(ddof=1) / n1
    v2 = y.var(ddof=1) / n2
    denom = v1 + v2
    if denom == 0.0:
        t = 0.0 if x.mean() == y.mean() else math.inf
        return WelchResult(statistic=t, df=float(n1 + n2 - 2),
                           p_value=1.0 if t == 0.0 else 0.0, n1=n1, n2=n2)
    t = (x.mean() - y.mean()) / math.sqrt(denom)
    df = denom**2 / (v1**2 / (n1 - 1) + v2**2 / (n2 - 1))
    p = betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return WelchResult(statistic=float(t), df=float(df), p_value=float(p), n1=n1, n2=n2)


def quantile_inclusive(values, q: float) -> float:
    """Quantile by inclusive linear interpolation on the sorted sample,
    i.e. position (n - 1) * q between order statistics."""
    v = np.sort(np.asarray(values, dtype=float))
    if len(v) == 0:
        raise ValueError("empty sample")
    pos = (len(v) - 1) * q
    lo = int(math.floor(pos))
    hi = int(math.ceil(pos))
    frac = pos - lo
    return float(v[lo] * (1.0 - frac) + v[hi] * frac)
