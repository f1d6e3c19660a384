"""Exception hierarchy."""


class VolterraError(Exception):
    """Base class for all package errors."""


class DomainError(VolterraError, ValueError):
    """An argument lies outside the domain where the requested quantity exists."""


class RegimeError(VolterraError):
    """The kernel's dynamical regime is incompatible with the requested operation."""


class ConfigError(VolterraError):
    """An experiment configuration is malformed or self-inconsistent."""
