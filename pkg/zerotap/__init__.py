"""zerotap - coefficients, maximum modulus and zero distribution of polynomial families."""

__version__ = "0.1.0"
