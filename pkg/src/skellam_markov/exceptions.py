"""Exception types raised by the library."""


class InvalidMeasureError(ValueError):
    """An operation received a measure outside its admissible class."""


class DivergentSeriesError(ArithmeticError):
    """A power series of measures was asked to sum with ratio >= 1."""


class NonzeroMassError(ValueError):
    """Wasserstein-type norm requested for a measure with nonzero total mass."""


class BesselRangeError(ValueError):
    """Argument lies outside the range of the reference Bessel series."""


class ParameterError(ValueError):
    """Chain or distribution parameters violate their constraints."""


class UnsupportedBoundError(ValueError):
    """No bound shape is defined for the requested theorem/metric pair."""
