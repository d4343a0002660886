"""cocyclelab: numerics for one-frequency analytic quasi-periodic cocycles."""

from . import arithmetic, errors

__all__ = ["arithmetic", "errors"]
__version__ = "0.1.0"
