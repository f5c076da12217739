"""Randomized and grid check suites shared by the CLI and the test-suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import bergstrom_check, smoothing_bound, smoothing_check
from .chain import DECOMPOSITION_VARIANTS, decomposition_residual
from .components import (
    AB_LIMIT,
    ChainParams,
    SkellamParams,
    build_components,
    skellam_measure,
    skellam_pmf,
    skellam_power,
)
from .measure import (
    LOCAL,
    WASSERSTEIN,
    LatticeMeasure,
    NormKind,
    TruncationBudget,
    ch_fn,
    convolve,
    convolve_power,
    cp_exponential,
    diff_conv,
    dirac,
    linear_combine,
    norm,
)

SUITES = ("norms", "smoothing", "bergstrom", "decomposition", "skellam-oracle")


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0
    worst: float = -math.inf  # largest observed lhs - rhs (or residual)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, excess: float = 0.0) -> None:
        self.cases += 1
        self.failures += not ok
        self.worst = max(self.worst, excess)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.notes.items())
        return f"{status} {self.name}: {self.cases} cases, {self.failures} failures, worst={self.worst:.3g}{extra}"


def random_measure(rng: np.random.Generator, max_len: int = 64, zero_mass: bool = False,
                   low: float = -1.0, high: float = 1.0) -> LatticeMeasure:
    size = int(rng.integers(2 if zero_mass else 1, max_len + 1))
    w = rng.uniform(low, high, size)
    if zero_mass:
        w -= w.mean()
    return LatticeMeasure(int(rng.integers(-10, 11)), w)


def random_probability(rng: np.random.Generator, max_len: int = 8) -> LatticeMeasure:
    size = int(rng.integers(1, max_len + 1))
    w = rng.dirichlet(np.ones(size))
    w /= math.fsum(w)
    return LatticeMeasure(int(rng.integers(-4, 5)), w)


def random_symmetric(rng: np.random.Generator, max_half: int = 5) -> LatticeMeasure:
    """Symmetric probability on Z \\ {0}."""
    m = int(rng.integers(1, max_half + 1))
    half = rng.dirichlet(np.ones(m)) / 2
    w = np.concatenate((half[::-1], [0.0], half))
    return LatticeMeasure(-m, w)


# ---------------------------------------------------------------------------


def norms_suite(cases: int = 100, seed: int = 0) -> list[CheckResult]:
    """Norm relations, interpolation inequalities and exact identities on random measures."""
    rng = np.random.default_rng(seed)
    names = ["tv-submultiplicative", "wasserstein-product", "difference-norms", "interpolation", "exp-additivity", "second-difference", "ch_fn-cp"]
    res = {n: CheckResult(n) for n in names}
    L = LatticeMeasure(-1, [0.5, 0.0, 0.5])
    U = L - dirac(0)
    step = LatticeMeasure(0, [-1.0, 1.0])  # I_1 - I
    grid = np.linspace(-math.pi, math.pi, 16)
    for _ in range(cases):
        M, V = random_measure(rng), random_measure(rng)
        tvM, tvV = norm(M), norm(V)
        ex = norm(M * V) - tvM * tvV
        ex2 = norm(M, LOCAL) - tvM
        res["tv-submultiplicative"].record(ex <= 1e-12 * max(1, tvM * tvV) and ex2 <= 1e-12, max(ex, ex2))

        Z = random_measure(rng, zero_mass=True)
        wZ = norm(Z, WASSERSTEIN)
        ex = norm(Z * V, WASSERSTEIN) - wZ * tvV
        res["wasserstein-product"].record(ex <= 1e-12 * max(1, wZ * tvV), ex)

        d = diff_conv(M, 1)
        ex1 = norm(M, LOCAL) - norm(d)
        ex2 = abs(tvM - norm(d, WASSERSTEIN))
        res["difference-norms"].record(ex1 <= 1e-12 and ex2 <= 1e-12 * max(1, tvM), max(ex1, ex2))

        tvZ, locZ = norm(Z), norm(Z, LOCAL)
        worst = -math.inf
        for r in (1.5, 2.0, 3.0):
            worst = max(worst, norm(Z, NormKind.lr(r)) - locZ ** ((r - 1) / r) * tvZ ** (1 / r))
            worst = max(worst, norm(Z, NormKind.cap_lr(r)) - tvZ ** ((r - 1) / r) * wZ ** (1 / r))
        res["interpolation"].record(worst <= 1e-12, worst)

        F = random_probability(rng)
        u1, u2 = rng.uniform(0, 5, 2)
        tb = TruncationBudget(1e-14)
        lhs = cp_exponential(u1, F, tb) * cp_exponential(u2, F, tb)
        gap = norm(lhs - cp_exponential(u1 + u2, F, tb))
        res["exp-additivity"].record(gap <= 1e-12, gap)

        t = float(u1 + u2)
        E = cp_exponential(t, F, tb)
        gap = float(np.max(np.abs(ch_fn(E, grid) - np.exp(t * (ch_fn(F, grid) - 1)))))
        res["ch_fn-cp"].record(gap <= 1e-10, gap)

    gap = norm(0.5 * convolve(convolve_power(step, 2), dirac(-1)) - U)
    res["second-difference"].record(gap <= 1e-15, gap)
    return list(res.values())


def smoothing_lhs(F: LatticeMeasure, t: float, j: int, kind: str) -> float:
    return smoothing_check(F, t, j, kind).lhs


def smoothing_suite(cases: int = 200, seed: int = 0) -> list[CheckResult]:
    """The three total-variation smoothing bounds and the local bound."""
    rng = np.random.default_rng(seed)
    out = []
    for name, kind, js in [("tv-j1", "tv", [1]), ("tv-j2", "tv", [2]),
                           ("tv-general", "tv", [1, 2, 3, 4]), ("local", "local", [1, 2, 3, 4])]:
        res = CheckResult(name)
        for _ in range(cases):
            F = random_symmetric(rng) if kind == "local" else random_probability(rng)
            t = float(math.exp(rng.uniform(math.log(0.05), math.log(100.0))))
            j = int(rng.choice(js))
            lhs = smoothing_lhs(F, t, j, kind)
            if name == "tv-general":
                rhs = math.sqrt(math.factorial(j)) * t ** (-j / 2)
            else:
                rhs = smoothing_bound(t, j, kind)
            res.record(lhs <= rhs + 1e-12, lhs - rhs)
        out.append(res)
    return out


def bergstrom_suite(cases: int = 50, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    res = CheckResult("bergstrom")
    worst = 0.0
    for _ in range(cases):
        V = random_measure(rng, max_len=8, low=-0.5, high=0.5)
        M = random_measure(rng, max_len=8, low=-0.5, high=0.5)
        n = int(rng.integers(1, 21))
        k = int(rng.integers(0, min(3, n - 1) + 1))
        r = bergstrom_check(V, M, n, k)
        rel = r.residual / r.scale if r.scale else 0.0
        worst = max(worst, rel)
        res.record(r.ok, rel)
    res.notes["max_relative_residual"] = f"{worst:.3g}"
    return [res]


def ab_grid(size: int = 10) -> list[ChainParams]:
    alphas = np.linspace(0.0, AB_LIMIT, size)
    betas = np.linspace(AB_LIMIT / size, AB_LIMIT, size)
    return [ChainParams(float(a), float(b)) for a in alphas for b in betas]


DIAGNOSTIC_POINTS = [
    (ChainParams(0.03, 0.01, 0.2, 0.5, 0.3), 5),
    (ChainParams(0.02, 0.02), 10),
    (ChainParams(1 / 30, 1 / 40, 0.5, 0.0, 0.5), 20),
]


def decomposition_suite(grid_size: int = 10) -> tuple[list[CheckResult], list[dict]]:
    """Component sanity checks plus per-variant decomposition residuals (reported only)."""
    delta = CheckResult("delta-norm<=0.62")
    reassembly = CheckResult("reassembly")
    k_forms = CheckResult("K-forms-agree")
    lam2 = CheckResult("lambda2-decay")
    h_fourier = CheckResult("H-fourier")
    grid_t = np.linspace(-math.pi, math.pi, 16)
    max_delta = 0.0
    for cp in ab_grid(grid_size):
        tb = TruncationBudget()
        b = build_components(cp, ["delta", "lambda1", "lambda2", "w1", "w2", "u", "h"], tb)
        dn = norm(b["delta"])
        delta.record(dn <= 0.62, dn - 0.62)
        max_delta = max(max_delta, dn)
        target = linear_combine(1 + 2 * cp.alpha - 2 * cp.beta, dirac(0), 2 * cp.alpha, b["u"])
        g1 = norm(b["lambda1"] + b["lambda2"] - target)
        g2 = norm(b["w1"] + b["w2"] - dirac(0))
        reassembly.record(max(g1, g2) <= 1e-12, max(g1, g2))
        # both forms at a tighter budget so truncation stays well below the tolerance
        kd = build_components(cp, ["k"], TruncationBudget(1e-15))["k"]
        kp = build_components(cp, ["k"], TruncationBudget(1e-15), k_variant="proof")["k"]
        gk = norm(kd - kp)
        k_forms.record(gk <= 1e-12, gk)
        Lh = np.cos(grid_t)
        a = cp.alpha
        gh = float(np.max(np.abs(ch_fn(b["h"], grid_t) - (1 - 2 * a) * Lh / (1 - 2 * a * Lh))))
        h_fourier.record(gh <= 1e-10, gh)
        power = dirac(0)
        worst = -math.inf
        for n in range(1, 21):
            power = power * b["lambda2"]
            worst = max(worst, norm(power) - (15.5 * abs(cp.alpha - cp.beta) * 0.2 ** n + 1e-10))
        lam2.record(worst <= 0, worst)
    delta.notes["max"] = f"{max_delta:.4f}"

    report = []
    for cp, n in DIAGNOSTIC_POINTS:
        row = {"alpha": cp.alpha, "beta": cp.beta, "p": (cp.p1, cp.p2, cp.p3), "n": n}
        for v in DECOMPOSITION_VARIANTS:
            row[v] = decomposition_residual(cp, n, v)
        report.append(row)
    return [delta, reassembly, k_forms, lam2, h_fourier], report


LAMBDAS = (0.5, 1.0, 5.0, 10.0)


def poisson_convolution_pmf(l1: float, l2: float, k: int) -> float:
    """sum_j Pois(l1)(j + k) * Pois(l2)(j), summed until the terms vanish."""
    total = 0.0
    j = max(0, -k)
    top = int(l1 + l2 + 60 + 10 * math.sqrt(l1 + l2)) + abs(k)
    terms = []
    for j in range(j, top):
        lp = -l1 + (j + k) * math.log(l1) - math.lgamma(j + k + 1) - l2 + j * math.log(l2) - math.lgamma(j + 1)
        terms.append(math.exp(lp))
    total = math.fsum(terms)
    return total


def skellam_oracle_suite() -> list[CheckResult]:
    pmf = CheckResult("bessel-vs-poisson-sum")
    for l1 in LAMBDAS:
        for l2 in LAMBDAS:
            for k in range(-30, 31):
                got = skellam_pmf(SkellamParams(l1, l2), k)
                want = poisson_convolution_pmf(l1, l2, k)
                rel = abs(got - want) / want
                pmf.record(rel <= 1e-12, rel)
    cons = CheckResult("bessel-vs-exponential")
    for lam in LAMBDAS:
        p = SkellamParams(lam, lam)
        M = skellam_measure(p)
        lo, hi = M.support
        lo, hi = min(lo, -40), max(hi, 40)
        bessel = LatticeMeasure(lo, [skellam_pmf(p, k) for k in range(lo, hi + 1)])
        gap = norm(M - bessel)
        cons.record(gap <= 1e-12, gap)
    for n in (1, 10, 100, 500):
        cp = ChainParams(0.02, 0.02)
        lam = n * cp.lam
        D = skellam_power(cp, n)
        lo, hi = D.support
        bessel = LatticeMeasure(lo, [skellam_pmf(SkellamParams(lam, lam), k) for k in range(lo, hi + 1)])
        gap = norm(D - bessel)
        cons.record(gap <= 1e-12, gap)
    return [pmf, cons]


def run_suite(name: str, cases: int | None = None, seed: int = 0) -> tuple[list[CheckResult], list[dict]]:
    """Run a named suite; returns the check results and any diagnostic report rows."""
    if name == "norms":
        return norms_suite(cases or 100, seed), []
    if name == "smoothing":
        return smoothing_suite(cases or 200, seed), []
    if name == "bergstrom":
        return bergstrom_suite(cases or 50, seed), []
    if name == "decomposition":
        return decomposition_suite()
    if name == "skellam-oracle":
        return skellam_oracle_suite(), []
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
