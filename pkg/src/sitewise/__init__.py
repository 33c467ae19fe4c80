"""sitewise: learning-based multi-criteria site suitability engine."""

from ._kernels import USING_NUMBA

__version__ = "0.1.0"
__all__ = ["USING_NUMBA", "__version__"]
