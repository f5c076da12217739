"""Skellam laws and the named measures of the three-state symmetric chain.

Notation: ``L = (I_{-1} + I_1)/2``, ``U = L - I`` and ``b = 1 - 2*alpha + 2*beta``.
The Skellam approximant is ``D = exp{lam (I_1 - I + I_{-1} - I)}`` with
``lam = beta / b``.  See the README for the formula behind every
:class:`ComponentName`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import BesselRangeError, DivergentSeriesError, ParameterError
from .measure import (
    LatticeMeasure,
    TruncationBudget,
    binomial_half_series,
    convolve,
    convolve_power,
    cp_exponential,
    dirac,
    linear_combine,
    neumann_series,
)

__all__ = [
    "AB_LIMIT",
    "BESSEL_MAX_ARG",
    "ChainParams",
    "ComponentName",
    "SkellamParams",
    "bessel_i",
    "build_component",
    "delta_coefficient",
    "expansion_approx",
    "skellam_measure",
    "skellam_pmf",
    "skellam_power",
    "theorem1_approx",
    "ekg_approx",
    "iid_power",
]

AB_LIMIT = 1.0 / 30.0
BESSEL_MAX_ARG = 60.0
_AB_SLACK = 1e-15


@dataclass(frozen=True)
class ChainParams:
    """Transition weights and initial law of the three-state chain.

    From ``a1`` and ``a3`` the chain moves to ``a1``/``a3`` with probability
    ``alpha`` each and to ``a2`` with ``1 - 2*alpha``; from ``a2`` the outer
    states get ``beta`` each.  ``p1, p2, p3`` is the law of the initial state.

    ``strict=True`` enforces ``0 <= alpha <= 1/30`` and ``0 < beta <= 1/30``.
    With ``strict=False`` any ``alpha`` in ``[0, 1/2)`` and ``beta`` in
    ``(0, 1/2)`` is accepted with a warning.
    """

    alpha: float
    beta: float
    p1: float = 1.0 / 3.0
    p2: float = 1.0 / 3.0
    p3: float = 1.0 / 3.0
    strict: bool = True

    def __post_init__(self):
        a, b = self.alpha, self.beta
        ps = (self.p1, self.p2, self.p3)
        if not all(math.isfinite(x) for x in (a, b) + ps):
            raise ParameterError("chain parameters must be finite")
        if min(ps) < 0 or abs(sum(ps) - 1) > 1e-12:
            raise ParameterError("initial probabilities p1, p2, p3 must be >= 0 and sum to 1")
        in_ab = 0 <= a <= AB_LIMIT + _AB_SLACK and 0 < b <= AB_LIMIT + _AB_SLACK
        if self.strict and not in_ab:
            raise ParameterError(
                f"alpha={a}, beta={b} violate 0 <= alpha <= 1/30, 0 < beta <= 1/30 "
                "(use exploratory mode to go beyond)"
            )
        if not self.strict:
            if not (0 <= a < 0.5 and 0 < b < 0.5):
                raise ParameterError("exploratory mode needs 0 <= alpha < 1/2 and 0 < beta < 1/2")
            if not in_ab:
                warnings.warn(
                    f"alpha={a}, beta={b} outside 0 <= alpha, beta <= 1/30; "
                    "approximation bounds are not guaranteed",
                    stacklevel=3,
                )

    @property
    def b(self) -> float:
        """``1 - 2*alpha + 2*beta``."""
        return 1 - 2 * self.alpha + 2 * self.beta

    @property
    def lam(self) -> float:
        """Per-step Skellam intensity ``beta / (1 - 2*alpha + 2*beta)``."""
        return self.beta / self.b

    @property
    def stationary_p2(self) -> float:
        """Stationary probability of the middle state ``a2``."""
        return (1 - 2 * self.alpha) / self.b

    def transition_matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, 1 - 2 * a, a], [b, 1 - 2 * b, b], [a, 1 - 2 * a, a]])

    @property
    def initial(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3])


@dataclass(frozen=True)
class SkellamParams:
    """Intensities of the two independent Poisson variables whose difference is taken."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        for v in (self.lambda1, self.lambda2):
            if not (math.isfinite(v) and v >= 0):
                raise ParameterError("Skellam intensities must be finite and >= 0")


class ComponentName(str, Enum):
    L = "l"
    U = "u"
    H = "h"
    E = "e"
    K = "k"
    DELTA = "delta"
    LAMBDA1 = "lambda1"
    LAMBDA2 = "lambda2"
    W1 = "w1"
    W2 = "w2"
    P1 = "p1"
    P2 = "p2"
    G = "g"
    D = "d"
    A0 = "a0"
    A1 = "a1"
    A2 = "a2"


# ---------------------------------------------------------------------------
# Bessel and Skellam


def _log_bessel_i(k: int, x: float) -> float:
    """log I_k(x) from the power series, summed as ratios to the first term."""
    if x == 0:
        return 0.0 if k == 0 else -math.inf
    y = x * x / 4
    total, term, m = 1.0, 1.0, 0
    while True:
        term *= y / ((m + 1) * (m + 1 + k))
        m += 1
        total += term
        # terms decrease once m exceeds sqrt(y); stop at 1e-17 relative
        if m * m > y and term < 1e-17 * total:
            break
    return k * math.log(x / 2) - math.lgamma(k + 1) + math.log(total)


def bessel_i(k: int, x: float) -> float:
    """Modified Bessel function of the first kind ``I_k(x)`` for ``0 <= x <= 60``."""
    if k < 0 or int(k) != k:
        raise ValueError("order must be a nonnegative integer")
    if not 0 <= x <= BESSEL_MAX_ARG:
        raise BesselRangeError(
            f"x={x} outside [0, {BESSEL_MAX_ARG}]; use the exponential construction "
            "(skellam_measure) instead"
        )
    return math.exp(_log_bessel_i(int(k), float(x)))


def _poisson_logpmf(lam: float, k: int) -> float:
    if k < 0:
        return -math.inf
    if lam == 0:
        return 0.0 if k == 0 else -math.inf
    return -lam + k * math.log(lam) - math.lgamma(k + 1)


def skellam_pmf(p: SkellamParams, k: int) -> float:
    """``P(pi_1 - pi_2 = k)`` through the Bessel representation, in log space."""
    l1, l2 = p.lambda1, p.lambda2
    k = int(k)
    if l2 == 0:
        return math.exp(_poisson_logpmf(l1, k))
    if l1 == 0:
        return math.exp(_poisson_logpmf(l2, -k))
    x = 2 * math.sqrt(l1 * l2)
    if x > BESSEL_MAX_ARG:
        return skellam_measure(p)[k]
    logp = -l1 - l2 + 0.5 * k * (math.log(l1) - math.log(l2)) + _log_bessel_i(abs(k), x)
    return math.exp(logp)


def skellam_measure(p: SkellamParams, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """``exp{l1 (I_1 - I) + l2 (I_{-1} - I)}`` built as a compound Poisson exponential."""
    total = p.lambda1 + p.lambda2
    if total == 0:
        return dirac(0)
    Q = LatticeMeasure(-1, [p.lambda2 / total, 0.0, p.lambda1 / total])
    return cp_exponential(total, Q, tb)


def skellam_power(cp: ChainParams, n: int, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """``D^{*n}``: symmetric Skellam law with intensity ``n*lam`` on each side."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return cp_exponential(2 * n * cp.lam, _L, tb)


# ---------------------------------------------------------------------------
# named components

_L = LatticeMeasure(-1, [0.5, 0.0, 0.5])
_I = dirac(0)
_U = linear_combine(1.0, _L, -1.0, _I)


def delta_coefficient(cp: ChainParams) -> float:
    """Scalar multiplying ``U^{*2}`` in the leading part of ``A0``."""
    a, b, B = cp.alpha, cp.beta, cp.b
    return -2 * b * b / B ** 2 * ((1 + 2 * a) / (1 - 2 * a) + 2 / B)


class _Builder:
    """Memoizing assembler for the blocks of one parameter point."""

    def __init__(self, cp: ChainParams, tb: TruncationBudget, k_variant: str, p_variant: str):
        if k_variant not in ("display", "proof"):
            raise ValueError("k_variant must be 'display' or 'proof'")
        if p_variant not in ("display", "stationary"):
            raise ValueError("p_variant must be 'display' or 'stationary'")
        self.cp, self.tb = cp, tb
        self.k_variant, self.p_variant = k_variant, p_variant
        self.cache: dict[str, LatticeMeasure] = {}

    def get(self, name: str) -> LatticeMeasure:
        if name not in self.cache:
            try:
                self.cache[name] = getattr(self, "_" + name)()
            except DivergentSeriesError as exc:
                raise DivergentSeriesError(f"block {name}: {exc}") from exc
        return self.cache[name]

    # geometric series sum_j (2 alpha U / b)^j, i.e. b (b - 2 alpha U)^{-1}
    def _geom_u(self):
        cp = self.cp
        return neumann_series((2 * cp.alpha / cp.b) * _U, self.tb)

    def _l(self):
        return _L

    def _u(self):
        return _U

    def _h(self):
        a = self.cp.alpha
        return (1 - 2 * a) * convolve(_L, neumann_series((2 * a) * _L, self.tb))

    def _e(self):
        a, p2 = self.cp.alpha, self.cp.p2
        c = 2 * a * p2 / (1 - 2 * a)
        return linear_combine(1 - c, _I, c, _L)

    def _k(self):
        a, b = self.cp.alpha, self.cp.beta
        if self.k_variant == "proof":
            return self.get("geom_u")
        pre = (1 - 2 * (a - b)) / (1 + 2 * b)
        return pre * neumann_series((2 * a / (1 + 2 * b)) * _L, self.tb)

    def _g(self):
        cp = self.cp
        return cp_exponential(2 * cp.beta * (1 - 2 * cp.alpha) / cp.b, self.get("h"), self.tb)

    def _d(self):
        return skellam_power(self.cp, 1, self.tb)

    def _delta(self):
        cp = self.cp
        N = self.get("geom_u")
        return (8 * cp.beta / cp.b ** 2) * convolve(_U, convolve(N, N))

    def _sqrt_delta(self):
        return binomial_half_series(0.5, self.get("delta"), self.tb)

    def _rsqrt_delta(self):
        return binomial_half_series(-0.5, self.get("delta"), self.tb)

    def _lambda(self, sign):
        cp = self.cp
        a = cp.alpha
        base = linear_combine(1 + 2 * a - 2 * cp.beta, _I, 2 * a, _U)
        root = convolve(linear_combine(cp.b, _I, -2 * a, _U), self.get("sqrt_delta"))
        return 0.5 * linear_combine(1.0, base, sign, root)

    def _lambda1(self):
        return self._lambda(1.0)

    def _lambda2(self):
        return self._lambda(-1.0)

    def _w(self, sign):
        cp = self.cp
        lead = linear_combine(1.0, _I, 2 * cp.alpha / cp.b, _U)
        prod = convolve(convolve(lead, self.get("geom_u")), self.get("rsqrt_delta"))
        return 0.5 * linear_combine(1.0, _I, sign, prod)

    def _w1(self):
        return self._w(1.0)

    def _w2(self):
        return self._w(-1.0)

    def _p(self, lam_name):
        cp = self.cp
        a = cp.alpha
        pi2 = cp.p2 if self.p_variant == "display" else cp.stationary_p2
        inner = linear_combine(1.0, self.get(lam_name), -1.0, linear_combine(1.0, _I, 2 * a, _U))
        return (pi2 / (1 - 2 * a)) * inner

    def _p1(self):
        return self._p("lambda1")

    def _p2(self):
        return self._p("lambda2")

    def _a0(self):
        cp = self.cp
        a, b, B = cp.alpha, cp.beta, cp.b
        coef = -2 * b * b * (1 - 2 * a) / B ** 2
        mix = linear_combine(1 + 2 * a, _I, 2 * (1 - 2 * a) / B, self.get("k"))
        hm = linear_combine(1.0, self.get("h"), -1.0, _I)
        return coef * convolve(mix, convolve(hm, hm))

    def _a1(self):
        cp = self.cp
        coef = 2 * (cp.alpha - cp.beta) / cp.b * ((1 - 2 * cp.alpha) / cp.b - cp.p2)
        return coef * _U

    def _a2(self):
        cp = self.cp
        a, b, B = cp.alpha, cp.beta, cp.b
        coef = 2 * b / B ** 2 * (2 * (a - b) * (1 - 2 * a) / B - b)
        return coef * convolve(_U, _U)


def build_component(
    cp: ChainParams,
    name: ComponentName | str,
    tb: TruncationBudget | None = None,
    *,
    k_variant: str = "display",
    p_variant: str = "display",
) -> LatticeMeasure:
    """Assemble a named measure from its defining series and products.

    ``k_variant='proof'`` builds ``K`` as ``sum_j (2 alpha U / b)^{*j}`` instead
    of the L-power form (the two agree as measures).  ``p_variant='stationary'``
    uses the stationary middle-state probability in the ``P1, P2`` prefactor
    instead of ``p2``.
    """
    name = ComponentName(name.lower() if isinstance(name, str) else name)
    tb = TruncationBudget() if tb is None else tb
    return _Builder(cp, tb, k_variant, p_variant).get(name.value)


def build_components(cp, names, tb=None, **variants) -> dict[ComponentName, LatticeMeasure]:
    """Several components sharing intermediate blocks."""
    tb = TruncationBudget() if tb is None else tb
    builder = _Builder(cp, tb, variants.get("k_variant", "display"), variants.get("p_variant", "display"))
    return {ComponentName(n): builder.get(ComponentName(n).value) for n in names}


def ekg_approx(
    cp: ChainParams, n: int, tb: TruncationBudget | None = None, *, k_variant: str = "display"
) -> LatticeMeasure:
    """``E * K * G^{*n}`` with ``G^{*n}`` formed directly as one exponential."""
    if n < 0:
        raise ValueError("n must be >= 0")
    tb = TruncationBudget() if tb is None else tb
    builder = _Builder(cp, tb, k_variant, "display")
    rate = n * 2 * cp.beta * (1 - 2 * cp.alpha) / cp.b
    Gn = cp_exponential(rate, builder.get("h"), tb)
    return convolve(convolve(builder.get("e"), builder.get("k")), Gn)


# alternate name for the same approximant
theorem1_approx = ekg_approx


def expansion_approx(cp: ChainParams, n: int, tb: TruncationBudget | None = None) -> LatticeMeasure:
    """``D^{*n} * (I + A1 + n A2)``, the first-order corrected Skellam approximant."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tb = TruncationBudget() if tb is None else tb
    builder = _Builder(cp, tb, "display", "display")
    corr = linear_combine(1.0, linear_combine(1.0, _I, 1.0, builder.get("a1")), float(n), builder.get("a2"))
    return convolve(skellam_power(cp, n, tb), corr)


def iid_power(p: float, n: int) -> LatticeMeasure:
    """Law of a sum of n iid variables on {-1, 0, 1} with P(+-1) = p."""
    return convolve_power(LatticeMeasure(-1, [p, 1 - 2 * p, p]), n)
