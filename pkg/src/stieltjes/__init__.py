"""Stieltjes transform inversion and free additive convolution."""
__version__ = "0.1.0"
