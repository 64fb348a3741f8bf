"""Concurrence of superposed bipartite pure states and bounds on it."""
from .bounds import BoundReport, Theorem, theorem1_bounds, theorem2_bounds, theorem3_bounds
from .states import PureState, SuperpositionInput, concurrence, from_vector

__all__ = [
    "BoundReport", "PureState", "SuperpositionInput", "Theorem",
    "concurrence", "from_vector",
    "theorem1_bounds", "theorem2_bounds", "theorem3_bounds",
]
__version__ = "0.1.0"
