from prim.virtlab.client import (LabClient, MalformedResponse, RemoteRejection, Unreachable,
                                 client_evaluate)
from prim.virtlab.server import BindFailure, LabServer, serve
from prim.virtlab.surrogate import (DECOY, PEAK, InProcessLab, NonFinite, SurrogateConfig,
                                    evaluate_g_factor, g_of_normalized)

# Reference optimum over the 8 x 9**8 lattice (tests/oracles/grid_optimum.py).
GRID_OPTIMUM = 1.0187135917234231

__all__ = [
    "BindFailure", "DECOY", "GRID_OPTIMUM", "InProcessLab", "LabClient", "LabServer",
    "MalformedResponse", "NonFinite", "PEAK", "RemoteRejection", "SurrogateConfig",
    "Unreachable", "client_evaluate", "evaluate_g_factor", "g_of_normalized", "serve",
]
