"""declog: bounded correctness/completeness checking and declarative diagnosis
for definite clause programs."""

__version__ = "0.1.0"
