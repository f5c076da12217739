"""Finite signed measures on the integer lattice.

A measure is stored densely: an integer ``offset`` (the location of the first
stored weight) and a float64 array ``weights``.  Canonical form trims exact
zeros at both ends; the zero measure has an empty weight array.

Series and exponentials of measures are infinite sums.  Every operation that
has to cut one off takes a :class:`TruncationBudget`, discards at most
``budget`` of l1 mass per call and records what it discarded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exceptions import DivergentSeriesError, InvalidMeasureError, NonzeroMassError

__all__ = [
    "LatticeMeasure",
    "NormKind",
    "LOCAL",
    "TV",
    "WASSERSTEIN",
    "TruncationBudget",
    "binomial_half_series",
    "ch_fn",
    "convolve",
    "convolve_power",
    "cp_exponential",
    "diff_conv",
    "dirac",
    "linear_combine",
    "neumann_series",
    "norm",
    "truncate",
    "zero",
]

DEFAULT_BUDGET = 1e-12
# relative tolerance on |total mass| for Wasserstein-type norms
ZERO_MASS_RTOL = 1e-9


class LatticeMeasure:
    """Signed measure with finite support on Z.

    Instances are immutable.  ``M[k]`` returns the weight at ``k`` (zero off
    the stored range).  Arithmetic follows measure notation: ``M + V``,
    ``c * M``, ``M * V`` (convolution when both are measures) and ``M ** k``
    (convolution power).
    """

    __slots__ = ("offset", "weights")

    def __init__(self, offset: int, weights: Iterable[float]):
        w = np.array(weights, dtype=np.float64).ravel()
        if w.size and not np.all(np.isfinite(w)):
            raise InvalidMeasureError("weights must be finite")
        nz = np.flatnonzero(w)
        if nz.size == 0:
            offset, w = 0, w[:0]
        else:
            offset, w = int(offset) + int(nz[0]), w[nz[0]:nz[-1] + 1].copy()
        w.setflags(write=False)
        object.__setattr__(self, "offset", int(offset))
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError("LatticeMeasure is immutable")

    def __reduce__(self):
        return (LatticeMeasure, (self.offset, np.asarray(self.weights)))

    # -- inspection -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.weights.size == 0

    @property
    def support(self) -> tuple[int, int]:
        """Inclusive (first, last) stored points; (0, -1) for the zero measure."""
        return self.offset, self.offset + self.weights.size - 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.weights.size)

    @property
    def mass(self) -> float:
        return float(math.fsum(self.weights))

    def __len__(self) -> int:
        return self.weights.size

    def __getitem__(self, k: int) -> float:
        i = int(k) - self.offset
        if 0 <= i < self.weights.size:
            return float(self.weights[i])
        return 0.0

    def dense(self, lo: int, hi: int) -> np.ndarray:
        """Weights at lo, lo+1, ..., hi (inclusive) as a new array."""
        out = np.zeros(hi - lo + 1)
        a, b = max(lo, self.offset), min(hi, self.offset + self.weights.size - 1)
        if a <= b:
            out[a - lo:b - lo + 1] = self.weights[a - self.offset:b - self.offset + 1]
        return out

    def __repr__(self) -> str:
        if self.is_zero:
            return "LatticeMeasure(zero)"
        if self.weights.size <= 8:
            body = ", ".join(f"{k}: {w:.6g}" for k, w in zip(self.points, self.weights))
            return f"LatticeMeasure({{{body}}})"
        lo, hi = self.support
        return f"LatticeMeasure(support=[{lo}, {hi}], mass={self.mass:.6g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeMeasure):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.weights, other.weights)

    __hash__ = None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, LatticeMeasure):
            return linear_combine(1.0, self, 1.0, other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, LatticeMeasure):
            return linear_combine(1.0, self, -1.0, other)
        return NotImplemented

    def __neg__(self):
        return LatticeMeasure(self.offset, -self.weights)

    def __mul__(self, other):
        if isinstance(other, LatticeMeasure):
            return convolve(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return LatticeMeasure(self.offset, float(other) * self.weights)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, float, np.floating, np.integer)):
            return LatticeMeasure(self.offset, self.weights / float(c))
        return NotImplemented

    def __pow__(self, k: int):
        return convolve_power(self, k)

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {"offset": self.offset, "weights": [float(x) for x in self.weights]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeMeasure":
        try:
            offset = d["offset"]
            weights = d["weights"]
        except (KeyError, TypeError) as exc:
            raise InvalidMeasureError("expected {'offset': int, 'weights': [...]}") from exc
        if isinstance(offset, bool) or not isinstance(offset, int):
            raise InvalidMeasureError("offset must be an integer")
        return cls(offset, weights)

    @classmethod
    def from_json(cls, text: str) -> "LatticeMeasure":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_mapping(cls, pmf: dict) -> "LatticeMeasure":
        """Build from ``{point: weight}``."""
        if not pmf:
            return zero()
        lo, hi = min(pmf), max(pmf)
        w = np.zeros(hi - lo + 1)
        for k, v in pmf.items():
            w[k - lo] += v
        return cls(lo, w)


@dataclass
class TruncationBudget:
    """Allowed discarded l1 mass per operation, and the running total.

    Each operation that truncates calls :meth:`grant` once and may then
    discard up to the granted amount, reporting it through :meth:`spend`.
    """

    budget: float = DEFAULT_BUDGET
    accumulated: float = 0.0
    granted: float = 0.0

    def __post_init__(self):
        if not self.budget >= 0:
            raise ValueError("budget must be >= 0")

    def grant(self) -> float:
        self.granted += self.budget
        return self.budget

    def spend(self, amount: float) -> None:
        self.accumulated += float(amount)


def _budget(tb: TruncationBudget | None) -> TruncationBudget:
    return TruncationBudget() if tb is None else tb


@dataclass(frozen=True)
class NormKind:
    """Which norm to evaluate: local, tv, wasserstein, lr (l_r) or caplr (L_r)."""

    kind: str
    r: float | None = None

    def __post_init__(self):
        if self.kind not in ("local", "tv", "wasserstein", "lr", "caplr"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind in ("lr", "caplr"):
            if self.r is None or not self.r >= 1:
                raise ValueError("l_r / L_r norms need r >= 1")
        elif self.r is not None:
            raise ValueError(f"{self.kind} norm takes no r")

    @classmethod
    def lr(cls, r: float) -> "NormKind":
        return cls("lr", float(r))

    @classmethod
    def cap_lr(cls, r: float) -> "NormKind":
        return cls("caplr", float(r))

    @property
    def needs_zero_mass(self) -> bool:
        return self.kind in ("wasserstein", "caplr")

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        """Parse ``tv``, ``local``, ``wasserstein`` (or ``w``), ``lr:2``, ``caplr:1.5``."""
        t = text.strip().lower()
        if t == "w":
            t = "wasserstein"
        if ":" in t:
            name, _, r = t.partition(":")
            return cls(name, float(r))
        return cls(t)

    def __str__(self) -> str:
        if self.r is None:
            return self.kind
        return f"{self.kind}:{self.r:g}"


LOCAL = NormKind("local")
TV = NormKind("tv")
WASSERSTEIN = NormKind("wasserstein")


# ---------------------------------------------------------------------------
# construction and linear structure


def zero() -> LatticeMeasure:
    return LatticeMeasure(0, [])


def dirac(a: int = 0) -> LatticeMeasure:
    """Point mass at ``a``; ``dirac(0)`` is the convolution identity."""
    return LatticeMeasure(a, [1.0])


def linear_combine(c1: float, M: LatticeMeasure, c2: float, V: LatticeMeasure) -> LatticeMeasure:
    """Pointwise ``c1*M + c2*V``."""
    parts = [(c, X) for c, X in ((c1, M), (c2, V)) if c != 0 and not X.is_zero]
    if not parts:
        return zero()
    lo = min(X.offset for _, X in parts)
    hi = max(X.offset + len(X) for _, X in parts)
    out = np.zeros(hi - lo)
    for c, X in parts:
        out[X.offset - lo:X.offset - lo + len(X)] += c * X.weights
    return LatticeMeasure(lo, out)


def _sum_measures(terms: list[tuple[float, LatticeMeasure]]) -> LatticeMeasure:
    terms = [(c, X) for c, X in terms if c != 0 and not X.is_zero]
    if not terms:
        return zero()
    lo = min(X.offset for _, X in terms)
    hi = max(X.offset + len(X) for _, X in terms)
    out = np.zeros(hi - lo)
    for c, X in terms:
        out[X.offset - lo:X.offset - lo + len(X)] += c * X.weights
    return LatticeMeasure(lo, out)


def convolve(M: LatticeMeasure, V: LatticeMeasure) -> LatticeMeasure:
    """Exact discrete convolution (direct summation)."""
    if M.is_zero or V.is_zero:
        return zero()
    return LatticeMeasure(M.offset + V.offset, np.convolve(M.weights, V.weights))


def convolve_power(M: LatticeMeasure, k: int) -> LatticeMeasure:
    """k-fold convolution by repeated squaring; ``k == 0`` gives ``dirac(0)``."""
    if k < 0 or int(k) != k:
        raise ValueError("convolution power needs a nonnegative integer")
    k = int(k)
    result = dirac(0)
    base = M
    while k:
        if k & 1:
            result = convolve(result, base)
        k >>= 1
        if k:
            base = convolve(base, base)
    return result


def diff_conv(M: LatticeMeasure, direction: int) -> LatticeMeasure:
    """``(I_direction - I) * M`` by shifted subtraction.

    For ``direction=+1`` the weight at k is ``M{k-1} - M{k}``, for ``-1`` it is
    ``M{k+1} - M{k}``.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if M.is_zero:
        return zero()
    w = M.weights
    a = np.concatenate(([0.0], w))
    b = np.concatenate((w, [0.0]))
    if direction == 1:
        return LatticeMeasure(M.offset, a - b)
    return LatticeMeasure(M.offset - 1, b - a)


# ---------------------------------------------------------------------------
# truncation


def _trim_ends(w: np.ndarray, eps: float) -> tuple[int, int, float]:
    """Greedily drop the smaller end weight while the dropped l1 mass stays <= eps.

    Returns (start, stop, dropped) such that ``w[start:stop]`` is kept.
    """
    a = np.abs(w)
    i, j = 0, a.size - 1
    dropped = 0.0
    while i <= j:
        if a[i] <= a[j]:
            if dropped + a[i] > eps:
                break
            dropped += a[i]
            i += 1
        else:
            if dropped + a[j] > eps:
                break
            dropped += a[j]
            j -= 1
    return i, j + 1, dropped


def _trim(M: LatticeMeasure, eps: float) -> tuple[LatticeMeasure, float]:
    if M.is_zero or eps <= 0:
        return M, 0.0
    i, j, dropped = _trim_ends(M.weights, eps)
    if i == 0 and j == len(M):
        return M, 0.0
    return LatticeMeasure(M.offset + i, M.weights[i:j]), dropped


def truncate(M: LatticeMeasure, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """Drop the smallest-|weight| end entries, total dropped mass <= tb.budget."""
    tb = _budget(tb)
    out, dropped = _trim(M, tb.grant())
    tb.spend(dropped)
    return out


# ---------------------------------------------------------------------------
# norms and transforms


def norm(M: LatticeMeasure, kind: NormKind = TV) -> float:
    """Local, total variation, Wasserstein, l_r or L_r norm of ``M``.

    Wasserstein and L_r sum the (absolute) partial sums ``M{(-inf, k]}`` and
    are finite only for measures of zero total mass.
    """
    if M.is_zero:
        return 0.0
    w = M.weights
    k = kind.kind
    if k == "tv":
        return float(math.fsum(np.abs(w)))
    if k == "local":
        return float(np.max(np.abs(w)))
    if k == "lr":
        if kind.r == 1:
            return float(math.fsum(np.abs(w)))
        return float(np.sum(np.abs(w) ** kind.r) ** (1.0 / kind.r))
    tv = float(math.fsum(np.abs(w)))
    mass = M.mass
    if abs(mass) > ZERO_MASS_RTOL * max(1.0, tv):
        raise NonzeroMassError(f"{kind} norm needs zero total mass, got {mass:.3e}")
    # partial sums past the last point equal the (rounding-level) total mass
    partial = np.abs(np.cumsum(w)[:-1])
    if k == "wasserstein" or kind.r == 1:
        return float(math.fsum(partial))
    return float(np.sum(partial ** kind.r) ** (1.0 / kind.r))


def ch_fn(M: LatticeMeasure, t):
    """Fourier transform ``sum_k exp(i t k) M{k}`` at scalar or array ``t``."""
    t_arr = np.asarray(t, dtype=np.float64)
    if M.is_zero:
        out = np.zeros(t_arr.shape, dtype=complex)
    else:
        out = np.exp(1j * np.multiply.outer(t_arr, M.points)) @ M.weights
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# series and exponentials


def _check_ratio(q: float, what: str) -> None:
    if not q < 1:
        raise DivergentSeriesError(f"{what}: ratio norm {q:.4g} >= 1, series diverges")


MAX_SERIES_TERMS = 100_000


def _terms_for_tail(q: float, eps: float) -> int:
    """Smallest J with q**(J+1)/(1-q) <= eps."""
    if q == 0:
        return 0
    if eps <= 0:
        raise ValueError("a nonzero series needs a positive truncation budget")
    J = math.ceil(math.log(eps * (1 - q)) / math.log(q) - 1)
    if J > MAX_SERIES_TERMS:
        raise DivergentSeriesError(f"ratio norm {q:.17g} needs {J} terms; too close to 1")
    J = max(J, 0)
    while q ** (J + 1) / (1 - q) > eps:
        J += 1
    return J


def neumann_series(M: LatticeMeasure, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """Geometric series ``sum_{j>=0} M^{*j}`` for ``||M||_TV < 1``."""
    tb = _budget(tb)
    q = norm(M, TV)
    _check_ratio(q, "neumann_series")
    eps = tb.grant()
    J = _terms_for_tail(q, eps)
    terms = [(1.0, dirac(0))]
    power = dirac(0)
    for _ in range(J):
        power = convolve(power, M)
        terms.append((1.0, power))
    tb.spend(q ** (J + 1) / (1 - q) if q else 0.0)
    return _sum_measures(terms)


def binomial_half_series(s: float, M: LatticeMeasure, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """``sum_j binom(s, j) M^{*j}`` for ``s = +1/2`` or ``-1/2``, i.e. ``(I+M)^{*s}``."""
    if s not in (0.5, -0.5):
        raise ValueError("s must be +1/2 or -1/2")
    tb = _budget(tb)
    q = norm(M, TV)
    _check_ratio(q, "binomial_half_series")
    eps = tb.grant()
    # |binom(+-1/2, j)| <= 1, so the tail is dominated by a geometric series
    J = _terms_for_tail(q, eps)
    terms = [(1.0, dirac(0))]
    power = dirac(0)
    coef = 1.0
    for j in range(J):
        coef *= (s - j) / (j + 1)
        power = convolve(power, M)
        terms.append((coef, power))
    tb.spend(q ** (J + 1) / (1 - q) if q else 0.0)
    return _sum_measures(terms)


def _poisson_mixture(u: float, Q: LatticeMeasure, eps: float) -> tuple[LatticeMeasure, float]:
    """``exp(-u) * sum_k u^k Q^{*k} / k!`` with the dropped tail mass <= eps.

    Requires u * mass(Q) <= ~1 so that a handful of terms suffice; every term is
    nonnegative.
    """
    m = Q.mass
    um = u * m
    terms = [(math.exp(-u), dirac(0))]
    coef = math.exp(-u)
    power = dirac(0)
    k = 0
    while True:
        # mass of the remaining tail, dominated geometrically once k + 2 > um
        nxt = coef * um / (k + 1)
        ratio = um / (k + 2)
        tail = nxt / (1 - ratio) if ratio < 1 else math.inf
        if tail <= eps:
            return _sum_measures(terms), tail
        k += 1
        coef *= u / k
        power = convolve(power, Q)
        terms.append((coef, power))
        # Poisson weights decay superexponentially; this cannot loop for long
        if k > 10_000:
            raise RuntimeError("Poisson mixture failed to converge")


def cp_exponential(t: float, Q: LatticeMeasure, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """Compound Poisson exponential ``exp{t (Q - I)}`` for nonnegative ``Q``.

    For ``t <= 1`` this is the Poisson mixture ``e^{-t} sum_k t^k Q^{*k}/k!``.
    Otherwise the mixture is formed at ``t / 2**s`` (``s`` the smallest integer
    with ``t / 2**s <= 1``) and squared ``s`` times.  All intermediates are
    nonnegative.  The tail dropped at each stage is scaled down by the
    factor that later squarings can amplify it by, so the l1 distance to the
    exact measure stays within one budget.
    """
    if not t >= 0 or not math.isfinite(t):
        raise InvalidMeasureError(f"cp_exponential needs finite t >= 0, got {t}")
    if np.any(Q.weights < 0):
        raise InvalidMeasureError("compounding measure must be nonnegative")
    tb = _budget(tb)
    eps = tb.grant()
    if t == 0:
        return dirac(0)
    if Q.is_zero:
        return math.exp(-t) * dirac(0)

    s = 0 if t <= 1 else math.ceil(math.log2(t))
    while t / 2 ** s > 1:
        s += 1
    u = t / 2 ** s
    m = Q.mass
    # exact masses of the stage measures and the error amplification of later squarings
    stage_mass = [math.exp(u * 2 ** j * (m - 1)) for j in range(s + 1)]
    amplify = [1.0] * (s + 1)
    for j in range(s - 1, -1, -1):
        amplify[j] = amplify[j + 1] * 2 * stage_mass[j]
    share = eps / (s + 1)

    P, tail = _poisson_mixture(u, Q, share / (2 * amplify[0]))
    P, dropped = _trim(P, share / (2 * amplify[0]))
    spent = (tail + dropped) * amplify[0]
    for j in range(1, s + 1):
        P = convolve(P, P)
        P, dropped = _trim(P, share / amplify[j])
        spent += dropped * amplify[j]
    tb.spend(spent)
    return P
