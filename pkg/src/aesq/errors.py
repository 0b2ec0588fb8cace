"""Exception hierarchy shared by all subpackages."""


class AesqError(Exception):
    """Base class for all package errors."""


class CapacityError(AesqError):
    """A computation would exceed the configured resource bound."""


class DomainError(AesqError):
    """An argument lies outside the mathematical domain of an operation."""


class ToleranceError(AesqError):
    """A numerical routine cannot meet the requested tolerance."""


class ConsistencyError(AesqError):
    """An internal exactness check failed (e.g. a value that must be real is not)."""


class InfeasibleParametersError(AesqError):
    """A parameter choice violates a feasibility condition."""
