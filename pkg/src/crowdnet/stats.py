"""One-way between-groups ANOVA and the F-distribution support it needs.

The F upper-tail probability comes from the regularized incomplete beta
function, evaluated with the modified Lentz continued fraction (symmetry
switch at x = (a+1)/(a+b+2), 200-iteration cap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_BETA_TOL = 1e-10
_BETA_MAX_ITER = 200
_TINY = 1e-300


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    df_between: int
    df_within: int
    p_value: float
    group_means: tuple[float, ...]
    grand_mean: float
    degenerate: bool = False


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta integral (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
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
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    if x < 0.0 or x > 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def f_cdf(x: float, d1: int, d2: int) -> float:
    """Cumulative probability of the F(d1, d2) distribution at x >= 0."""
    if x < 0:
        raise ValueError("F statistic must be non-negative")
    if d1 < 1 or d2 < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x == 0.0:
        return 0.0
    t = d1 * x / (d1 * x + d2)
    return regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, t)


def one_way_anova(groups) -> AnovaResult:
    """Between-groups F test over two or more groups of observations.

    F = (SSB/df_between) / (SSW/df_within); the p-value is the F upper
    tail.  Zero within-group variance with a real between-group effect is
    reported as p = 0 with the ``degenerate`` flag set.
    """
    data = [[float(x) for x in grp] for grp in groups]
    k = len(data)
    if k < 2:
        raise ValueError("ANOVA requires at least two groups")
    sizes = [len(grp) for grp in data]
    if any(s == 0 for s in sizes):
        raise ValueError("ANOVA groups must be nonempty")
    n = sum(sizes)
    df_between = k - 1
    df_within = n - k
    if df_within < 1:
        raise ValueError("insufficient observations")

    group_means = [sum(grp) / len(grp) for grp in data]
    grand_mean = sum(sum(grp) for grp in data) / n
    ssb = sum(s * (gm - grand_mean) ** 2 for s, gm in zip(sizes, group_means))
    ssw = sum(
        sum((x - gm) ** 2 for x in grp) for grp, gm in zip(data, group_means)
    )

    if ssw == 0.0:
        if ssb == 0.0:
            return AnovaResult(0.0, df_between, df_within, 1.0,
                               tuple(group_means), grand_mean)
        return AnovaResult(math.inf, df_between, df_within, 0.0,
                           tuple(group_means), grand_mean, degenerate=True)
    f = (ssb / df_between) / (ssw / df_within)
    p = 1.0 - f_cdf(f, df_between, df_within)
    return AnovaResult(f, df_between, df_within, p, tuple(group_means), grand_mean)


def describe(values) -> tuple[float, float, int]:
    """(mean, population standard deviation, count) of a nonempty sequence."""
    data = [float(x) for x in values]
    if not data:
        raise ValueError("describe requires at least one value")
    n = len(data)
    mean = sum(data) / n
    var = sum((x - mean) ** 2 for x in data) / n
    return mean, math.sqrt(var), n
