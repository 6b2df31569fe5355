"""Asymptotic verification harness.

Compares exact partial sums of r_k(n) against their main terms at checkpoint
grids, fits empirical error exponents on log-log scales, and sweeps the
truncation level of the singular-series count formula against exact counts.
Partial sums are exact integers throughout; overflow switches accumulation to
arbitrary precision rather than wrapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import repcount, singular
from .constants import mean_square_constant, w_constant
from .errors import DomainError, InsufficientPointsError, TableTooShortError
from ._util import format_real

_SAFE_LIMIT = float(1 << 62)


@dataclass(frozen=True)
class Checkpoint:
    """Partial sum over 1 <= n <= x next to its main term."""

    x: int
    partial_sum: int
    main_term: float
    abs_err: float
    rel_err: float

    def __post_init__(self):
        if self.x < 1:
            raise DomainError(f"checkpoint x must be >= 1, got {self.x}")
        if self.partial_sum < 0:
            raise DomainError("partial_sum must be >= 0")
        if not self.main_term > 0.0:
            raise DomainError("main_term must be positive")
        if self.rel_err < 0.0 or self.abs_err < 0.0:
            raise DomainError("errors must be >= 0")


@dataclass(frozen=True)
class FitResult:
    """Ordinary least squares of log(abs_err) against log(x)."""

    slope: float
    intercept: float
    r_squared: float
    points_used: int

    def __post_init__(self):
        if self.points_used < 3:
            raise DomainError("a fit needs at least 3 points")
        if not 0.0 <= self.r_squared <= 1.0:
            raise DomainError("r_squared must lie in [0, 1]")


@dataclass(frozen=True)
class TruncationPoint:
    """One truncation level of the singular-series count formula."""

    Q: int
    bateman: float
    abs_err: float
    rel_err: float  # nan when the exact count is 0


@dataclass(frozen=True)
class TruncationSweep:
    n: int
    r3: int
    points: tuple[TruncationPoint, ...]


def geometric_checkpoints(limit: int, start: int = 100) -> list[int]:
    """Default grid: 1 and 3 times powers of ten from `start` up to `limit`."""
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    xs = []
    base = 1
    while base <= limit:
        for mult in (1, 3):
            v = base * mult
            if start <= v <= limit:
                xs.append(v)
        base *= 10
    if not xs:
        return [limit]
    if xs[-1] != limit:
        xs.append(limit)
    return xs


def _validate_grid(table: repcount.RepTable, checkpoints, order: int) -> list[int]:
    if table.order != order:
        raise DomainError(
            f"need a table of order {order}, got order {table.order}"
        )
    xs = [int(x) for x in checkpoints]
    if not xs:
        raise DomainError("checkpoint grid is empty")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("checkpoint grid must be strictly ascending")
    if xs[0] < 1:
        raise DomainError("checkpoints must be >= 1")
    if xs[-1] > table.limit:
        raise TableTooShortError(
            f"checkpoint {xs[-1]} exceeds table limit {table.limit}"
        )
    return xs


def _prefix_at(counts: np.ndarray, xs: list[int], square: bool) -> dict[int, int]:
    """Exact sums of counts[n] (or counts[n]^2) over 1 <= n <= x for each x.

    Fast path: int64 cumulative sums, taken only when a conservative bound
    shows no partial sum can reach the int64 ceiling. Otherwise Python-int
    accumulation, exact at any magnitude.
    """
    top = float(counts.max()) if counts.size else 0.0
    if square:
        bound = top * top * len(counts) * 1.01
    else:
        bound = float(np.sum(counts, dtype=np.float64)) * 1.01
    if bound < _SAFE_LIMIT:
        data = counts * counts if square else counts
        prefix = np.cumsum(data)
        base = int(data[0])
        return {x: int(prefix[x]) - base for x in xs}
    obj = counts.astype(object)
    if square:
        obj = obj * obj
    out: dict[int, int] = {}
    total = 0
    prev = 1
    for x in xs:
        total += int(obj[prev : x + 1].sum())
        out[x] = total
        prev = x + 1
    return out


def _series(table, xs, main_of, square: bool) -> list[Checkpoint]:
    sums = _prefix_at(table.counts, xs, square)
    cps = []
    for x in xs:
        main = main_of(x)
        ps = sums[x]
        abs_err = abs(ps - main)
        cps.append(
            Checkpoint(
                x=x,
                partial_sum=ps,
                main_term=main,
                abs_err=abs_err,
                rel_err=abs_err / main,
            )
        )
    return cps


def mean_value_series(table: repcount.RepTable, checkpoints) -> list[Checkpoint]:
    """Sum of r_3(n) over 1 <= n <= x against the main term (4/3) pi x^{3/2}."""
    xs = _validate_grid(table, checkpoints, order=3)
    return _series(table, xs, lambda x: (4.0 / 3.0) * math.pi * x**1.5, square=False)


def mean_square_series(table: repcount.RepTable, checkpoints) -> list[Checkpoint]:
    """Sum of r_3(n)^2 over 1 <= n <= x against C3 x^2."""
    xs = _validate_grid(table, checkpoints, order=3)
    c3 = mean_square_constant()
    return _series(table, xs, lambda x: c3 * float(x) ** 2, square=True)


def mean_square_general(N: int, table: repcount.RepTable, checkpoints) -> list[Checkpoint]:
    """Sum of r_N(n)^2 over 1 <= n <= x against W_N x^{N-1}, for N > 3."""
    if N <= 3:
        raise DomainError(f"mean_square_general requires N > 3, got {N}")
    xs = _validate_grid(table, checkpoints, order=N)
    wn = w_constant(N)
    return _series(table, xs, lambda x: wn * float(x) ** (N - 1), square=True)


def fit_error_exponent(checkpoints) -> FitResult:
    """OLS on (log x, log abs_err); zero-error points are skipped."""
    pts = [
        (math.log(c.x), math.log(c.abs_err)) for c in checkpoints if c.abs_err > 0.0
    ]
    if len(pts) < 3:
        raise InsufficientPointsError(
            f"need >= 3 checkpoints with positive error, got {len(pts)}"
        )
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    xm, ym = xs.mean(), ys.mean()
    sxx = float(np.sum((xs - xm) ** 2))
    if sxx == 0.0:
        raise InsufficientPointsError("checkpoints share a single x value")
    slope = float(np.sum((xs - xm) * (ys - ym))) / sxx
    intercept = ym - slope * xm
    sst = float(np.sum((ys - ym) ** 2))
    if sst == 0.0:
        r2 = 1.0
    else:
        ssr = float(np.sum((ys - intercept - slope * xs) ** 2))
        r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
    return FitResult(
        slope=slope, intercept=float(intercept), r_squared=r2, points_used=len(pts)
    )


def singular_truncation_sweep(n: int, Q_grid) -> TruncationSweep:
    """Truncated count formula 2 pi sqrt(n) S3(n, Q) against exact r_3(n)."""
    qs = sorted({int(Q) for Q in Q_grid})
    if not qs:
        raise DomainError("Q grid is empty")
    if qs[0] < 1:
        raise DomainError("all Q must be >= 1")
    r3 = repcount.r3_point(n)
    trunc = singular.singular_series(n, qs[-1])
    prefix = np.cumsum(trunc.terms)
    factor = singular.bateman_factor(n)
    points = []
    for Q in qs:
        val = float(factor * prefix[Q - 1])
        abs_err = abs(val - r3)
        rel_err = abs_err / r3 if r3 > 0 else math.nan
        points.append(TruncationPoint(Q=Q, bateman=val, abs_err=abs_err, rel_err=rel_err))
    return TruncationSweep(n=n, r3=r3, points=tuple(points))


SERIES_CSV_HEADER = "x,partial_sum,main_term,abs_err,rel_err"


def series_csv_lines(checkpoints) -> list[str]:
    lines = [SERIES_CSV_HEADER]
    for c in checkpoints:
        lines.append(
            f"{c.x},{c.partial_sum},{format_real(c.main_term)},"
            f"{format_real(c.abs_err)},{format_real(c.rel_err)}"
        )
    return lines


def checkpoint_dicts(checkpoints) -> list[dict]:
    return [
        {
            "x": c.x,
            "partial_sum": c.partial_sum,
            "main_term": c.main_term,
            "abs_err": c.abs_err,
            "rel_err": c.rel_err,
        }
        for c in checkpoints
    ]


def fit_dict(fit: FitResult | None) -> dict | None:
    if fit is None:
        return None
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "points_used": fit.points_used,
    }


SWEEP_CSV_HEADER = "Q,bateman,r3,abs_err,rel_err"


def sweep_csv_lines(sweep: TruncationSweep) -> list[str]:
    lines = [SWEEP_CSV_HEADER]
    for p in sweep.points:
        lines.append(
            f"{p.Q},{format_real(p.bateman)},{sweep.r3},"
            f"{format_real(p.abs_err)},{format_real(p.rel_err)}"
        )
    return lines
