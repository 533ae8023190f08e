"""Exception types raised by oddsgen."""


class DomainError(ValueError):
    """A parameter or argument lies outside its admissible domain."""


class BoundaryDegeneracyError(ValueError):
    """A fitted cdf evaluates to exactly 0 or 1 at an observation."""


class IntegrationError(RuntimeError):
    """Numerical integration diverged or exhausted its subdivision budget."""


class DataError(ValueError):
    """Input data could not be parsed or is unusable."""


class ConfigError(ValueError):
    """A fitting, simulation or command configuration is invalid."""
