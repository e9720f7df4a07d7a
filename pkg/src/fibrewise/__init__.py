"""Exact fibrewise compactifications, graph path spaces and regulated limits."""

__version__ = "0.1.0"
