"""Toeplitz operators, Berezin transforms and compactness diagnostics on the Bergman space."""
__version__ = "0.1.0"
