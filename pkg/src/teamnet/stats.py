"""Pearson correlations with two-tailed Student-t significance.

The p-value comes from the exact t distribution via the regularized
incomplete beta function, evaluated with a continued fraction; no external
stats dependency.  Stars follow the usual convention: ** for p < 0.01,
* for 0.01 <= p < 0.05.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

_CF_MAX_ITER = 300
_CF_EPS = 1e-15
_CF_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_FPMIN:
        d = _CF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # The continued fraction converges fastest below the distribution mean.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample product-moment correlation coefficient."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    n = len(xs)
    if n < 3:
        raise ValueError("need at least 3 observations")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


def two_tailed_p(r: float, n: int) -> float:
    """Two-tailed significance of a correlation under the null of r = 0."""
    if n < 3:
        raise ValueError("need at least 3 observations")
    if not -1.0 <= r <= 1.0:
        raise ValueError("correlation outside [-1, 1]")
    if abs(r) == 1.0:
        return 0.0
    df = n - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return student_t_two_tailed(t, df)


def stars(p: float | None) -> str:
    if p is None:
        return ""
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass(frozen=True)
class CorrelationCell:
    """One pairwise result; p is None only on the diagonal."""

    r: float
    p: float | None
    n: int

    @property
    def stars(self) -> str:
        return stars(self.p)


@dataclass(frozen=True)
class CorrelationTable:
    """Upper-triangular pairwise correlations over named metric columns."""

    columns: tuple[str, ...]
    cells: Mapping[tuple[str, str], CorrelationCell]

    def cell(self, a: str, b: str) -> CorrelationCell:
        if (a, b) in self.cells:
            return self.cells[(a, b)]
        return self.cells[(b, a)]


def correlation_matrix(records: Sequence[Mapping[str, float | None]],
                       columns: Sequence[str]) -> CorrelationTable:
    """Pairwise Pearson r/p/n over the requested columns.

    Rows where either value of a pair is missing (None) are dropped for
    that pair only, so n can vary cell to cell.
    """
    if len(columns) < 2:
        raise ValueError("need >= 2 columns")
    if len(records) < 3:
        raise ValueError("need at least 3 rows")
    for column in columns:
        for record in records:
            if column not in record:
                raise ValueError(f"missing column: {column}")

    cells: dict[tuple[str, str], CorrelationCell] = {}
    for i, a in enumerate(columns):
        cells[(a, a)] = CorrelationCell(1.0, None, len(records))
        for b in columns[i + 1:]:
            pairs = [(rec[a], rec[b]) for rec in records
                     if rec[a] is not None and rec[b] is not None]
            xs = [float(x) for x, _ in pairs]
            ys = [float(y) for _, y in pairs]
            try:
                r = pearson(xs, ys)
                p = two_tailed_p(r, len(xs))
            except ValueError as exc:
                raise ValueError(f"{a} vs {b}: {exc}") from None
            cells[(a, b)] = CorrelationCell(r, p, len(xs))
    return CorrelationTable(tuple(columns), cells)
