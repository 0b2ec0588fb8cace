"""Almost-equal squares of primes: sieve constants, local factors,
representation counting, and decomposition verification."""

__version__ = "0.1.0"
