"""Exception hierarchy shared across the package."""


class SecrecyError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SecrecyError, ValueError):
    """Invalid or incomplete configuration (spec files, CLI flags)."""

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class DomainError(SecrecyError, ValueError):
    """A numerical argument lies outside the domain of an operation."""


class DegenerateAlphaError(DomainError):
    """The average-to-peak ratio has no truncated-exponential solution.

    Raised for alpha == 0.5 (use the uniform law instead) and alpha == 1
    (the input collapses to a point mass at the peak).
    """


class NoSecureLedError(DomainError):
    """Every LED has a non-positive secrecy margin."""
