"""Distances to the approximants, bound shapes, sweeps and rate fits.

Bound shapes drop the unspecified absolute constant (``C = 1``); the
quantity of interest is ``ratio = lhs / shape`` and how it behaves along a
sweep.  The ``explicit`` shapes keep their numeric leading constants (0.61, 3.21, ...).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .chain import default_jobs, exact_distribution
from .components import ChainParams, ekg_approx, expansion_approx, skellam_power
from .exceptions import InvalidMeasureError, UnsupportedBoundError
from .measure import (
    LOCAL,
    TV,
    LatticeMeasure,
    NormKind,
    TruncationBudget,
    convolve,
    convolve_power,
    cp_exponential,
    dirac,
    linear_combine,
    norm,
)

__all__ = [
    "SWEEP_FIELDS",
    "SweepRow",
    "TheoremId",
    "approximant",
    "bergstrom_check",
    "bergstrom_residual",
    "bound_shape",
    "distance",
    "metric_distance",
    "rate_fit",
    "rows_from_csv",
    "rows_to_csv",
    "rows_to_json",
    "smoothing_bound",
    "smoothing_check",
    "sweep",
]


class TheoremId(str, Enum):
    EKG = "ekg"
    SKELLAM = "skellam"
    EXPANSION = "expansion"
    EXPLICIT = "explicit"
    LRINTERP = "lrinterp"


def distance(F: LatticeMeasure, G: LatticeMeasure, kind: NormKind = TV) -> float:
    """``norm(F - G, kind)``."""
    return norm(F - G, kind)


def metric_distance(F: LatticeMeasure, G: LatticeMeasure, metric: str) -> float:
    """Probability metrics: ``d_tv`` is half the TV norm; ``d_loc`` and ``d_w`` equal their norms."""
    if metric == "tv":
        return 0.5 * norm(F - G, TV)
    if metric == "local":
        return norm(F - G, LOCAL)
    if metric == "wasserstein":
        return norm(F - G, NormKind("wasserstein"))
    raise ValueError(f"unknown metric {metric!r}")


def bound_shape(theorem: TheoremId | str, kind: NormKind, cp: ChainParams, n: int, r: float | None = None) -> float:
    """Right-hand side of the error bound for ``theorem`` in the ``kind`` norm.

    Unknown constants are set to 1.  For ``lrinterp`` the exponent ``r`` comes
    from ``kind`` (``lr:r`` or ``caplr:r``) unless given explicitly.
    """
    theorem = TheoremId(theorem)
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = cp.alpha, cp.beta
    g = abs(a - b) / b
    h = (a - b) ** 2 / b ** 2
    nb = n * b
    k = kind.kind
    if theorem is TheoremId.SKELLAM:
        shapes = {"tv": 1 / n, "local": 1 / (n * math.sqrt(nb)), "wasserstein": math.sqrt(b / n)}
        if k in shapes:
            return shapes[k] * (1 + g)
    elif theorem is TheoremId.EXPANSION:
        shapes = {"tv": 1 / n ** 2, "local": 1 / (n ** 2 * math.sqrt(nb)), "wasserstein": math.sqrt(b / n) / n}
        if k in shapes:
            return shapes[k] * (1 + h)
    elif theorem is TheoremId.EXPLICIT:
        if k == "tv":
            return 0.61 / n * (1 + 3.21 * g)
        if k == "local":
            return 0.6 / (n * math.sqrt(nb)) * (1 + 3 * g)
        if k == "wasserstein":
            return 0.5 * math.sqrt(b / n) * (1 + 3.9 * g)
    elif theorem is TheoremId.EKG:
        shapes = {
            "tv": min(1 / n, b),
            "local": min(n ** -1.5 * b ** -0.5, b),
            "wasserstein": min(math.sqrt(b / n), b),
        }
        if k in shapes:
            return shapes[k]
    elif theorem is TheoremId.LRINTERP:
        # tv and wasserstein are the r = 1 cases; local is the r -> infinity limit of l_r
        if k == "tv":
            k, r = "lr", 1.0
        elif k == "wasserstein":
            k, r = "caplr", 1.0
        elif k == "local":
            return n ** -1.5 * b ** -0.5 * (1 + g)
        if k in ("lr", "caplr"):
            r = kind.r if r is None else float(r)
            if k == "lr":
                return n ** (-(3 * r - 1) / (2 * r)) * b ** (-(r - 1) / (2 * r)) * (1 + g)
            # interpolating TV and Wasserstein gives a decaying exponent in n
            return n ** (-(2 * r - 1) / (2 * r)) * b ** (1 / (2 * r)) * (1 + g)
    raise UnsupportedBoundError(f"no {theorem.value} bound for the {kind} norm")


def approximant(theorem: TheoremId | str, cp: ChainParams, n: int, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """The measure a theorem compares F_n against."""
    theorem = TheoremId(theorem)
    if theorem is TheoremId.EKG:
        return ekg_approx(cp, n, tb)
    if theorem is TheoremId.EXPANSION:
        return expansion_approx(cp, n, tb)
    return skellam_power(cp, n, tb)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    alpha: float
    beta: float
    p1: float
    p2: float
    p3: float
    n: int
    metric: str
    approximant: str
    lhs: float
    shape: float
    ratio: float
    truncation: float
    error: str | None = None


SWEEP_FIELDS = [f.name for f in fields(SweepRow) if f.name != "error"]


def _sweep_point(args) -> list[SweepRow]:
    cp, n, theorem, metrics, budget = args
    base = dict(alpha=cp.alpha, beta=cp.beta, p1=cp.p1, p2=cp.p2, p3=cp.p3, n=n, approximant=theorem.value)
    nan = math.nan
    try:
        tb = TruncationBudget(budget)
        diff = exact_distribution(cp, n) - approximant(theorem, cp, n, tb)
    except Exception as exc:  # recorded per row
        return [SweepRow(metric=str(m), lhs=nan, shape=nan, ratio=nan, truncation=nan, error=repr(exc), **base)
                for m in metrics]
    rows = []
    for m in metrics:
        try:
            lhs = norm(diff, m)
            shape = bound_shape(theorem, m, cp, n)
            rows.append(SweepRow(metric=str(m), lhs=lhs, shape=shape, ratio=lhs / shape,
                                 truncation=tb.accumulated, **base))
        except Exception as exc:
            rows.append(SweepRow(metric=str(m), lhs=nan, shape=nan, ratio=nan,
                                 truncation=tb.accumulated, error=repr(exc), **base))
    return rows


def sweep(
    grid: Sequence[tuple[ChainParams, int]],
    theorem: TheoremId | str,
    metrics: Sequence[NormKind],
    jobs: int | None = None,
    budget: float = 1e-12,
) -> list[SweepRow]:
    """One row per (grid point, metric), in grid order then metric order.

    Failures are recorded in the row's ``error`` field instead of aborting.
    ``jobs > 1`` evaluates grid points in worker processes.
    """
    if not grid:
        raise ValueError("empty grid")
    theorem = TheoremId(theorem)
    tasks = [(cp, int(n), theorem, list(metrics), budget) for cp, n in grid]
    jobs = default_jobs(jobs)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_point, tasks))
    else:
        chunks = [_sweep_point(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_FIELDS)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(row, f) for f in SWEEP_FIELDS)])
    return buf.getvalue()


def rows_to_json(rows: Sequence[SweepRow]) -> str:
    out = []
    for row in rows:
        d = {f: getattr(row, f) for f in SWEEP_FIELDS}
        for f, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                d[f] = None
        out.append(d)
    return json.dumps(out)


def rows_from_csv(text: str) -> list[SweepRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        d = {f: rec[f] for f in SWEEP_FIELDS}
        kw = {f: float(v) for f, v in d.items() if f not in ("n", "metric", "approximant")}
        rows.append(SweepRow(n=int(d["n"]), metric=d["metric"], approximant=d["approximant"], **kw))
    return rows


def rate_fit(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares line through ``(log n, log value)``; returns (slope, intercept)."""
    if len(points) < 3:
        raise ValueError("rate_fit needs at least 3 points")
    n = np.array([p[0] for p in points], dtype=float)
    v = np.array([p[1] for p in points], dtype=float)
    if np.any(~(v > 0)) or np.any(~(n > 0)):
        raise ValueError("rate_fit needs positive n and values")
    slope, intercept = np.polyfit(np.log(n), np.log(v), 1)
    return float(slope), float(intercept)


# ---------------------------------------------------------------------------
# smoothing inequalities


class SmoothingResult(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def smoothing_bound(t: float, j: int, kind: str) -> float:
    if kind == "tv":
        if j == 1:
            return math.sqrt(2 / (math.e * t))
        if j == 2:
            return 3 / (math.e * t)
        return math.sqrt(math.factorial(j)) * t ** (-j / 2)
    if kind == "local":
        return 2 * ((j + 0.5) / (t * math.e)) ** (j + 0.5)
    raise ValueError("kind must be 'tv' or 'local'")


def smoothing_check(F: LatticeMeasure, t: float, j: int, kind: str = "tv",
                    tb: TruncationBudget | None = None) -> SmoothingResult:
    """Compare ``||(F - I)^{*j} * exp{t (F - I)}||`` with its smoothing bound.

    ``kind='local'`` needs ``F`` symmetric with no mass at 0.
    """
    if not t > 0 or j < 1:
        raise ValueError("need t > 0 and j >= 1")
    if kind not in ("tv", "local"):
        raise ValueError("kind must be 'tv' or 'local'")
    if F.is_zero or np.any(F.weights < 0) or abs(F.mass - 1) > 1e-12:
        raise InvalidMeasureError("F must be a probability measure")
    if kind == "local":
        lo, hi = F.support
        if F[0] != 0 or lo != -hi or not np.allclose(F.weights, F.weights[::-1], rtol=0, atol=1e-15):
            raise InvalidMeasureError("local smoothing needs F symmetric on Z \\ {0}")
    diff = linear_combine(1.0, F, -1.0, dirac(0))
    X = convolve(convolve_power(diff, j), cp_exponential(t, F, tb))
    lhs = norm(X, TV if kind == "tv" else LOCAL)
    rhs = smoothing_bound(t, j, kind)
    return SmoothingResult(lhs, rhs, lhs <= rhs + 1e-12)


# ---------------------------------------------------------------------------
# Bergstrom identity

BERGSTROM_MAX_SUPPORT = 32
BERGSTROM_MAX_N = 20


class BergstromResult(NamedTuple):
    residual: float
    scale: float
    ok: bool


def _bergstrom_terms(V: LatticeMeasure, M: LatticeMeasure, n: int, k: int):
    """Summands of the right side of V^n - M^n = sum_{m<=k} ... + (V-M)^{k+1} * sum ..."""
    if len(V) > BERGSTROM_MAX_SUPPORT or len(M) > BERGSTROM_MAX_SUPPORT or n > BERGSTROM_MAX_N:
        raise ValueError(f"size guard: supports <= {BERGSTROM_MAX_SUPPORT}, n <= {BERGSTROM_MAX_N}")
    if n < 1 or not 0 <= k < n:
        raise ValueError("need n >= 1 and 0 <= k < n")
    diff = V - M
    Vp = [dirac(0)]
    Mp = [dirac(0)]
    for _ in range(n):
        Vp.append(convolve(Vp[-1], V))
        Mp.append(convolve(Mp[-1], M))
    terms = []
    for m in range(1, k + 1):
        terms.append(math.comb(n, m) * convolve(convolve_power(diff, m), Mp[n - m]))
    head = convolve_power(diff, k + 1)
    for m in range(k, n):
        terms.append(math.comb(m, k) * convolve(head, convolve(Vp[n - 1 - m], Mp[m - k])))
    return Vp[n], Mp[n], terms


def bergstrom_check(V: LatticeMeasure, M: LatticeMeasure, n: int, k: int) -> BergstromResult:
    """Residual of the Bergstrom expansion, its scale (largest term TV norm) and pass flag."""
    Vn, Mn, terms = _bergstrom_terms(V, M, n, k)
    rhs = LatticeMeasure(0, [])
    for term in terms:
        rhs = rhs + term
    residual = norm((Vn - Mn) - rhs, TV)
    scale = max([norm(Vn, TV), norm(Mn, TV)] + [norm(x, TV) for x in terms])
    return BergstromResult(residual, scale, residual <= 1e-12 * max(scale, 1e-300))


def bergstrom_residual(V: LatticeMeasure, M: LatticeMeasure, n: int, k: int) -> float:
    """TV norm of ``V^n - M^n`` minus the Bergstrom right side, summed term by term."""
    return bergstrom_check(V, M, n, k).residual
