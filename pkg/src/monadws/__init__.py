"""Exact verification of linear monads and stable bundles on hypersurface 3-folds."""

__version__ = "0.1.0"
