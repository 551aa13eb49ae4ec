"""Exact inference for Whittle-Matérn Gaussian fields on compact metric graphs."""

from graph_matern.version import __version__

__all__ = ["__version__"]
