"""Linear-sieve factorization machinery and desk-scale equidistribution lab."""
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
