"""besum: exact-arithmetic laboratory for bounded exponential sums."""

__version__ = "0.1.0"
