"""Exception types raised across the package."""


class NGTMSTError(Exception):
    """Base class for all package errors."""


class DomainError(NGTMSTError, ValueError):
    """A parameter lies outside its physical domain."""


class OrderTooLarge(NGTMSTError, ValueError):
    """Derivative order exceeds the configured cap."""


class SingularCovariance(NGTMSTError, ValueError):
    """Covariance matrix is not positive definite."""


class NegligibleProbability(NGTMSTError, ArithmeticError):
    """Heralding branch has (numerically) zero probability."""


class TailTooLarge(NGTMSTError, ArithmeticError):
    """Fock-space truncation discards more weight than allowed."""


class NoMinimumInRange(NGTMSTError, ValueError):
    """Objective is monotone over the search interval."""


class ConfigError(NGTMSTError, ValueError):
    """Invalid sweep configuration."""
