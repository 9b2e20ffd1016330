"""Multi-agent materials discovery loop over a nanohelix design space."""
from prim.space import NANOHELIX, ParameterDim, ParameterSpace, default_nanohelix_space, distance

__version__ = "0.1.0"

__all__ = ["NANOHELIX", "ParameterDim", "ParameterSpace", "default_nanohelix_space", "distance"]
