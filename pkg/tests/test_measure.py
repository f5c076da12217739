import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skellam_markov import (
    LOCAL,
    TV,
    WASSERSTEIN,
    DivergentSeriesError,
    InvalidMeasureError,
    LatticeMeasure,
    NonzeroMassError,
    NormKind,
    TruncationBudget,
    binomial_half_series,
    ch_fn,
    convolve,
    convolve_power,
    cp_exponential,
    diff_conv,
    dirac,
    linear_combine,
    neumann_series,
    norm,
    truncate,
    zero,
)

from .conftest import measures, probabilities

L = LatticeMeasure(-1, [0.5, 0.0, 0.5])
I = dirac(0)


def poisson_pmf(lam, k):
    return math.exp(-lam) * lam ** k / math.factorial(k)


def poisson(lam):
    return cp_exponential(lam, dirac(1), TruncationBudget(1e-15))


# -- construction -----------------------------------------------------------

def test_dirac_and_canonical_form():
    assert dirac(0).weights.tolist() == [1.0] and dirac(0).offset == 0
    assert norm(dirac(5), TV) == 1
    assert convolve(dirac(3), dirac(-3)) == dirac(0)
    M = LatticeMeasure(-3, [0.0, 0.0, 1.5, 0.0, -2.0, 0.0])
    assert M.offset == -1 and M.weights.tolist() == [1.5, 0.0, -2.0]
    assert LatticeMeasure(7, [0.0, 0.0]) == zero()
    assert zero().is_zero and norm(zero(), WASSERSTEIN) == 0


def test_measure_is_immutable():
    M = dirac(2)
    with pytest.raises(AttributeError):
        M.offset = 3
    with pytest.raises(ValueError):
        M.weights[0] = 2.0


def test_linear_combine():
    U = linear_combine(1, L, -1, I)
    assert U.offset == -1 and U.weights.tolist() == [0.5, -1.0, 0.5]
    assert norm(U, TV) == 2
    assert linear_combine(0, L, 0, U).is_zero


@given(measures(), st.floats(-3, 3))
def test_canonical_closure(M, c):
    X = c * M
    assert X == LatticeMeasure(X.offset, X.weights)
    if not X.is_zero:
        assert X.weights[0] != 0 and X.weights[-1] != 0


def test_getitem_and_dense():
    M = LatticeMeasure(-1, [1.0, 2.0, 3.0])
    assert M[-1] == 1.0 and M[1] == 3.0 and M[5] == 0.0
    assert M.dense(-2, 2).tolist() == [0.0, 1.0, 2.0, 3.0, 0.0]


# -- convolution ------------------------------------------------------------

def test_convolve_examples():
    assert convolve(dirac(1), dirac(1)) == dirac(2)
    # enumerate the four products of L with itself
    expected = {}
    for a, wa in ((-1, 0.5), (1, 0.5)):
        for b, wb in ((-1, 0.5), (1, 0.5)):
            expected[a + b] = expected.get(a + b, 0) + wa * wb
    assert convolve(L, L) == LatticeMeasure.from_mapping(expected)
    assert expected == {-2: 0.25, 0: 0.5, 2: 0.25}


def test_convolve_fourier_homomorphism(rng):
    for _ in range(20):
        M = LatticeMeasure(int(rng.integers(-5, 5)), rng.uniform(-1, 1, 10))
        V = LatticeMeasure(int(rng.integers(-5, 5)), rng.uniform(-1, 1, 7))
        assert abs(ch_fn(convolve(M, V), 0.7) - ch_fn(M, 0.7) * ch_fn(V, 0.7)) <= 1e-12


def test_convolve_power():
    assert convolve_power(L, 0) == dirac(0)
    step = linear_combine(1, dirac(1), -1, dirac(0))
    assert convolve_power(step, 2) == LatticeMeasure(0, [1.0, -2.0, 1.0])
    U = L - I
    assert norm(0.5 * convolve(convolve_power(step, 2), dirac(-1)) - U) == 0
    # repeated squaring agrees with repeated multiplication
    M = LatticeMeasure(-1, [0.2, 0.5, 0.3])
    slow = dirac(0)
    for _ in range(13):
        slow = slow * M
    assert norm(convolve_power(M, 13) - slow) < 1e-14
    with pytest.raises(ValueError):
        convolve_power(M, -1)


@given(measures(), measures(), measures())
def test_convolution_commutative_associative(A, B, C):
    scale = max(1.0, norm(A) * norm(B) * norm(C))
    assert norm(A * B - B * A) <= 1e-12 * scale
    assert norm((A * B) * C - A * (B * C)) <= 1e-12 * scale


@given(measures(), measures())
def test_mass_multiplicative_and_norm_relations(M, V):
    P = M * V
    assert abs(P.mass - M.mass * V.mass) <= 1e-12 * max(1.0, norm(M) * norm(V))
    assert norm(P) <= norm(M) * norm(V) * (1 + 1e-12) + 1e-300
    assert norm(M, LOCAL) <= norm(M)


@given(measures(zero_mass=True), measures())
def test_wasserstein_submultiplicative(Z, V):
    assert norm(Z * V, WASSERSTEIN) <= norm(Z, WASSERSTEIN) * norm(V) + 1e-12 * max(1, norm(Z) * norm(V))


# -- differences ------------------------------------------------------------

def test_diff_conv_identity():
    assert diff_conv(dirac(0), 1) == LatticeMeasure(0, [-1.0, 1.0])
    assert diff_conv(dirac(0), -1) == LatticeMeasure(-1, [1.0, -1.0])


@given(measures())
def test_diff_conv_matches_definition(M):
    for d in (1, -1):
        D = diff_conv(M, d)
        full = convolve(linear_combine(1, dirac(d), -1, dirac(0)), M)
        assert norm(D - full) == 0
        lo, hi = M.support
        for k in range(lo - 1, hi + 2):
            assert D[k] == M[k - d] - M[k]
        assert abs(D.mass) <= 1e-12 * max(1, norm(M))


@given(measures())
def test_loc_w_tv_relations(M):
    d = diff_conv(M, 1)
    assert norm(M, LOCAL) <= norm(d) + 1e-12
    assert abs(norm(M) - norm(d, WASSERSTEIN)) <= 1e-12 * max(1, norm(M))


# -- norms ------------------------------------------------------------------

def test_norm_examples():
    P4 = poisson(4)
    assert norm(P4, TV) == pytest.approx(1, abs=1e-14)
    # pmf maximum of Poisson(4) is attained at 3 and 4
    assert norm(P4, LOCAL) == pytest.approx(poisson_pmf(4, 4), rel=1e-13)
    assert poisson_pmf(4, 4) == pytest.approx(0.1953668, abs=1e-7)


def test_norm_lr_and_wasserstein_by_hand():
    M = LatticeMeasure(0, [1.0, -3.0, 2.0])
    assert norm(M, NormKind.lr(1)) == 6
    assert norm(M, NormKind.lr(2)) == pytest.approx(math.sqrt(14))
    # partial sums 1, -2, 0
    assert norm(M, WASSERSTEIN) == 3
    assert norm(M, NormKind.cap_lr(2)) == pytest.approx(math.sqrt(5))
    with pytest.raises(NonzeroMassError):
        norm(dirac(0), WASSERSTEIN)
    with pytest.raises(ValueError):
        NormKind.lr(0.5)


def test_normkind_parse_roundtrip():
    for text in ("tv", "local", "wasserstein", "lr:2", "caplr:1.5"):
        assert str(NormKind.parse(text)) == text
    assert NormKind.parse("w") == WASSERSTEIN


@given(measures(zero_mass=True), st.sampled_from([1.5, 2.0, 3.0]))
def test_interpolation_inequalities(Z, r):
    tv, loc, w = norm(Z), norm(Z, LOCAL), norm(Z, WASSERSTEIN)
    assert norm(Z, NormKind.lr(r)) <= loc ** ((r - 1) / r) * tv ** (1 / r) + 1e-12
    assert norm(Z, NormKind.cap_lr(r)) <= tv ** ((r - 1) / r) * w ** (1 / r) + 1e-12


# -- characteristic function -------------------------------------------------

def test_ch_fn_examples():
    t = np.linspace(-3, 3, 7)
    assert np.allclose(ch_fn(dirac(0), t), 1)
    assert ch_fn(dirac(1), math.pi) == pytest.approx(-1)
    v = ch_fn(L, t)
    assert np.allclose(v.real, np.cos(t), atol=1e-15) and np.allclose(v.imag, 0, atol=1e-15)


# -- truncation -------------------------------------------------------------

def test_truncate_zero_budget_is_identity():
    M = poisson(3)
    assert truncate(M, TruncationBudget(0)) == M


def test_truncate_poisson_tail():
    P1 = poisson(1)
    tb = TruncationBudget(1e-3)
    T = truncate(P1, tb)
    # oracle: smallest K with sum_{k>K} pmf <= 1e-3
    K = 0
    while 1 - math.fsum(poisson_pmf(1, k) for k in range(K + 1)) > 1e-3:
        K += 1
    assert T.support == (0, K)
    assert tb.accumulated <= 1e-3 and tb.accumulated == pytest.approx(norm(P1 - T))


@given(measures(), st.floats(0, 0.5))
def test_truncate_contract(M, b):
    tb = TruncationBudget(b)
    T = truncate(M, tb)
    assert norm(M - T) <= b + 1e-15
    assert tb.accumulated <= tb.granted + 1e-15


# -- series -----------------------------------------------------------------

def test_neumann_series():
    assert neumann_series(zero()) == dirac(0)
    assert neumann_series(0.3 * dirac(0)).weights[0] == pytest.approx(1 / 0.7, rel=1e-13)
    alpha, beta = 0.03, 0.02
    S = neumann_series((2 * alpha / (1 + 2 * beta)) * L)
    assert S.mass == pytest.approx(1 / (1 - 0.06 / 1.04), rel=1e-12)
    with pytest.raises(DivergentSeriesError):
        neumann_series(L)


def test_neumann_series_inverts(rng):
    M = LatticeMeasure(-2, rng.uniform(-1, 1, 5))
    M = (0.6 / norm(M)) * M
    S = neumann_series(M, TruncationBudget(1e-14))
    # (I - M) * S = I
    assert norm(convolve(I - M, S) - I) <= 1e-13


def test_binomial_half_series():
    assert binomial_half_series(0.5, zero()) == dirac(0)
    S = binomial_half_series(0.5, 0.4 * dirac(0))
    # scalar oracle: sqrt(1 + q) summed as a binomial series independently
    assert S.weights[0] == pytest.approx(math.sqrt(1.4), rel=1e-12)
    R = binomial_half_series(-0.5, 0.4 * dirac(0))
    assert R.weights[0] == pytest.approx(1 / math.sqrt(1.4), rel=1e-12)
    with pytest.raises(DivergentSeriesError):
        binomial_half_series(0.5, 1.2 * dirac(0))


def test_binomial_half_series_squares(rng):
    for _ in range(10):
        M = LatticeMeasure(int(rng.integers(-3, 3)), rng.uniform(-1, 1, 6))
        M = (rng.uniform(0.05, 0.62) / norm(M)) * M
        tb = TruncationBudget()
        S = binomial_half_series(0.5, M, tb)
        assert norm(S * S - (I + M)) <= 4 * tb.budget
        R = binomial_half_series(-0.5, M, tb)
        assert norm(R * R * (I + M) - I) <= 1e-11


# -- compound Poisson exponential ---------------------------------------------

def test_cp_exponential_basic():
    assert cp_exponential(0, L) == dirac(0)
    P = cp_exponential(1, dirac(1))
    assert P[0] == pytest.approx(math.exp(-1), rel=1e-14)
    assert math.exp(-1) == pytest.approx(0.3678794, abs=1e-7)
    for k in range(12):
        assert P[k] == pytest.approx(poisson_pmf(1, k), rel=1e-12)
    with pytest.raises(InvalidMeasureError):
        cp_exponential(1, L - I)
    with pytest.raises(InvalidMeasureError):
        cp_exponential(-1, L)


@pytest.mark.parametrize("lam", [0.3, 4.0, 37.5, 400.0])
def test_cp_exponential_matches_poisson_pmf(lam):
    tb = TruncationBudget()
    P = cp_exponential(lam, dirac(1), tb)
    lo, hi = P.support
    oracle = LatticeMeasure(0, [math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1)) for k in range(hi + 50)])
    assert norm(P - oracle) <= 1e-12 + 1e-13 * lam
    assert 0 <= tb.accumulated <= tb.budget
    assert abs(P.mass - 1) <= tb.budget + 1e-13


def test_cp_exponential_additivity():
    F = LatticeMeasure(-1, [0.2, 0.1, 0.3, 0.4])
    tb = TruncationBudget(1e-14)
    half = cp_exponential(0.5, F, tb)
    assert norm(half * half - cp_exponential(1.0, F, tb)) <= 1e-12
    a, b = cp_exponential(3.2, F, tb), cp_exponential(11.7, F, tb)
    assert norm(a * b - cp_exponential(14.9, F, tb)) <= 1e-12


@given(probabilities(), st.floats(0.01, 60))
def test_cp_exponential_fourier(F, t):
    grid = np.linspace(-math.pi, math.pi, 16)
    E = cp_exponential(t, F)
    assert np.max(np.abs(ch_fn(E, grid) - np.exp(t * (ch_fn(F, grid) - F.mass)))) <= 1e-10
    assert np.all(E.weights >= 0)


def test_cp_exponential_submass_compounding():
    # Q with mass 0.5: exp{t(Q - I)} has mass exp(-t/2)
    Q = LatticeMeasure(1, [0.25, 0.25])
    E = cp_exponential(6.0, Q)
    assert E.mass == pytest.approx(math.exp(-3.0), rel=1e-12)


# -- serialization ----------------------------------------------------------

@given(measures())
def test_json_roundtrip(M):
    assert LatticeMeasure.from_json(M.to_json()) == M


def test_json_rejects_bad_input():
    with pytest.raises(InvalidMeasureError):
        LatticeMeasure.from_json('{"weights": [1]}')
    with pytest.raises(InvalidMeasureError):
        LatticeMeasure.from_json('{"offset": 1.5, "weights": [1]}')
