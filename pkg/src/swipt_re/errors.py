"""Exception hierarchy shared by every module of the package."""


class SwiptError(Exception):
    """Base class for all errors raised by :mod:`swipt_re`."""


class DimensionError(SwiptError, ValueError):
    """Matrix shapes do not conform."""


class NonFiniteError(SwiptError, ValueError):
    """Input contains NaN or infinite entries."""


class NotPSDError(SwiptError, ValueError):
    """A covariance is not Hermitian positive semi-definite within tolerance."""


class InfeasibleError(SwiptError, ValueError):
    """The requested harvested-power target cannot be met under the budget."""


class DualInfeasibleError(SwiptError, ValueError):
    """Dual point outside the open cone mu > lambda * g1."""


class ConfigError(SwiptError, ValueError):
    """Scenario configuration could not be parsed or validated."""
