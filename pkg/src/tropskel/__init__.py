"""Exact divisor theory on metric graphs and certified piecewise-linear embeddings."""

__version__ = "0.1.0"
