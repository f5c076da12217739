"""Exact and simulated laws of S_n = f(xi_1) + ... + f(xi_n) for the three-state chain.

``f(a1) = -1``, ``f(a2) = 0``, ``f(a3) = 1``.  The initial state xi_0 is drawn
from ``(p1, p2, p3)`` and contributes nothing to the sum.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .components import ChainParams, build_components
from .measure import (
    TV,
    LatticeMeasure,
    TruncationBudget,
    binomial_half_series,
    convolve,
    convolve_power,
    dirac,
    linear_combine,
    neumann_series,
    norm,
)

__all__ = [
    "DECOMPOSITION_VARIANTS",
    "MC_SHARD_SIZE",
    "decomposition_residual",
    "decomposition_residuals",
    "exact_distribution",
    "monte_carlo_distribution",
    "transfer_weights",
]

STEP = np.array([-1, 0, 1])
MC_SHARD_SIZE = 1 << 16


def exact_distribution(cp: ChainParams, n: int) -> LatticeMeasure:
    """F_n by forward dynamic programming over (state, partial sum)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return dirac(0)
    P = cp.transition_matrix()
    # v[s, k + n] = P(xi_i = s, S_i = k)
    v = np.zeros((3, 2 * n + 1))
    v[:, n] = cp.initial
    for i in range(1, n + 1):
        # support of v_{i-1} is [-(i-1), i-1]
        lo, hi = n - i + 1, n + i
        arrived = P.T @ v[:, lo:hi]
        v = np.zeros_like(v)
        # landing in state s adds f(s) to the running sum
        v[0, lo - 1:hi - 1] = arrived[0]
        v[1, lo:hi] = arrived[1]
        v[2, lo + 1:hi + 1] = arrived[2]
    return LatticeMeasure(-n, v.sum(axis=0))


def monte_carlo_distribution(cp: ChainParams, n: int, samples: int, seed: int, jobs: int = 1) -> LatticeMeasure:
    """Empirical law of S_n from ``samples`` simulated paths.

    Randomness comes from numpy's Philox4x64 counter-based generator.  Samples
    are split into shards of ``MC_SHARD_SIZE`` paths; shard ``i`` uses the
    Philox stream with key ``seed`` advanced by ``i`` jumps.  The result does
    not depend on ``jobs``.
    """
    if n < 1 or samples < 1:
        raise ValueError("n and samples must be positive")
    sizes = [MC_SHARD_SIZE] * (samples // MC_SHARD_SIZE)
    if samples % MC_SHARD_SIZE:
        sizes.append(samples % MC_SHARD_SIZE)

    def shard(i: int) -> np.ndarray:
        bitgen = np.random.Philox(key=seed & (2 ** 64 - 1))
        if i:
            bitgen = bitgen.jumped(i)
        return _simulate(cp, n, sizes[i], np.random.Generator(bitgen))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(shard, range(len(sizes))))
    else:
        counts = [shard(i) for i in range(len(sizes))]
    total = np.sum(counts, axis=0)
    return LatticeMeasure(-n, total / samples)


def _simulate(cp: ChainParams, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    u0 = rng.random(size)
    c = np.cumsum(cp.initial)
    state = np.searchsorted(c[:2], u0, side="right")  # 0, 1, 2 for a1, a2, a3
    s = np.zeros(size, dtype=np.int64)
    for _ in range(n):
        u = rng.random(size)
        w = np.where(state == 1, cp.beta, cp.alpha)
        state = np.where(u < w, 0, np.where(u < 2 * w, 2, 1))
        s += STEP[state]
    return np.bincount(s + n, minlength=2 * n + 1)


def transfer_weights(cp: ChainParams, tb: TruncationBudget | None = None):
    """Coefficient measures (C1, C2) with F_n = C1 * Lambda1^n + C2 * Lambda2^n.

    Lumping a1 and a3 gives a 2x2 transfer matrix of measures; its spectral
    projectors yield ``C1 = (F_1 - Lambda2) / (Lambda1 - Lambda2)`` and
    ``C2 = (Lambda1 - F_1) / (Lambda1 - Lambda2)``, where
    ``Lambda1 - Lambda2 = (b I - 2 alpha U) * (I + Delta)^{1/2}``.
    """
    tb = TruncationBudget() if tb is None else tb
    blocks = build_components(cp, ["lambda1", "lambda2", "delta", "u"], tb)
    U = blocks["u"]
    inv_gap = convolve(
        (1 / cp.b) * neumann_series((2 * cp.alpha / cp.b) * U, tb),
        binomial_half_series(-0.5, blocks["delta"], tb),
    )
    F1 = exact_distribution(cp, 1)
    C1 = convolve(F1 - blocks["lambda2"], inv_gap)
    C2 = convolve(blocks["lambda1"] - F1, inv_gap)
    return C1, C2


DECOMPOSITION_VARIANTS = ("display", "stationary", "transfer")


def _decomposition(cp: ChainParams, n: int, variant: str, tb: TruncationBudget) -> LatticeMeasure:
    if variant == "transfer":
        C1, C2 = transfer_weights(cp, tb)
        b = build_components(cp, ["lambda1", "lambda2"], tb)
        return linear_combine(
            1.0, convolve(C1, convolve_power(b["lambda1"], n)),
            1.0, convolve(C2, convolve_power(b["lambda2"], n)),
        )
    names = ["p1", "p2", "lambda1", "lambda2", "w1", "w2"]
    b = build_components(cp, names, tb, p_variant=variant)
    first = convolve(convolve(b["p1"], convolve_power(b["lambda1"], n)), b["w1"])
    second = convolve(convolve(b["p2"], convolve_power(b["lambda2"], n)), b["w2"])
    return first + second


def decomposition_residual(
    cp: ChainParams, n: int, variant: str = "display", tb: TruncationBudget | None = None
) -> float:
    """``||F_n - (P1 * Lambda1^n * W1 + P2 * Lambda2^n * W2)||_TV`` for one reading.

    ``variant`` selects the ``P`` prefactor: ``display`` (initial ``p2``),
    ``stationary`` (stationary probability of ``a2``) or ``transfer`` (the
    products ``P_i * W_i`` replaced by the exact spectral weights of
    :func:`transfer_weights`).  A diagnostic; nothing is asserted here.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if variant not in DECOMPOSITION_VARIANTS:
        raise ValueError(f"variant must be one of {DECOMPOSITION_VARIANTS}")
    tb = TruncationBudget() if tb is None else tb
    return norm(exact_distribution(cp, n) - _decomposition(cp, n, variant, tb), TV)


def decomposition_residuals(cp: ChainParams, n: int, tb: TruncationBudget | None = None) -> dict[str, float]:
    return {v: decomposition_residual(cp, n, v, tb) for v in DECOMPOSITION_VARIANTS}


def default_jobs(jobs: int | None = None) -> int:
    env = os.environ.get("SKELLAM_MARKOV_JOBS")
    if env:
        return max(1, int(env))
    return max(1, jobs or 1)
