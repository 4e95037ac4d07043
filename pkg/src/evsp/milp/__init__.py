from .formulations import (
    EVSP1,
    EVSP1S,
    EVSP2,
    EVSP2S,
    FORMULATIONS,
    K,
    build,
    build_evsp1,
    build_evsp1s,
    build_evsp2,
    build_evsp2s,
    canonical_kind,
)
from .linear import FULL_LP, NONE, PARTIAL, Constraint, LinearModel, ModelError, Variable, relax

__all__ = [
    "EVSP1", "EVSP1S", "EVSP2", "EVSP2S", "FORMULATIONS", "K",
    "build", "build_evsp1", "build_evsp1s", "build_evsp2", "build_evsp2s", "canonical_kind",
    "FULL_LP", "NONE", "PARTIAL", "Constraint", "LinearModel", "ModelError", "Variable", "relax",
]
