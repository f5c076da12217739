"""Skellam and compound Poisson approximation of sums of a symmetric three-state Markov chain.

Signed measures on Z with exact convolution calculus, the named approximating
measures, the exact law of the chain's additive functional, and a harness
that measures approximation errors against their bound shapes.
"""

from .bounds import (
    SweepRow,
    TheoremId,
    bergstrom_check,
    bergstrom_residual,
    bound_shape,
    distance,
    rate_fit,
    smoothing_check,
    sweep,
)
from .chain import (
    decomposition_residual,
    decomposition_residuals,
    exact_distribution,
    monte_carlo_distribution,
    transfer_weights,
)
from .components import (
    ChainParams,
    ComponentName,
    SkellamParams,
    bessel_i,
    build_component,
    build_components,
    delta_coefficient,
    ekg_approx,
    expansion_approx,
    iid_power,
    skellam_measure,
    skellam_pmf,
    skellam_power,
    theorem1_approx,
)
from .exceptions import (
    BesselRangeError,
    DivergentSeriesError,
    InvalidMeasureError,
    NonzeroMassError,
    ParameterError,
    UnsupportedBoundError,
)
from .measure import (
    LOCAL,
    TV,
    WASSERSTEIN,
    LatticeMeasure,
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

__version__ = "0.1.0"
