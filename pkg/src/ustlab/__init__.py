"""Monte Carlo laboratory for loop-erased walks, spanning trees, and CRT distances."""

__version__ = "0.1.0"
