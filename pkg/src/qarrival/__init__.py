"""Two-time arrival quasi-probabilities for a free particle."""

__version__ = "0.1.0"
