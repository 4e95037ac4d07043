from .bridge import (
    ERROR,
    FEASIBLE,
    INFEASIBLE,
    NO_SOLUTION,
    OPTIMAL,
    SolveOutcome,
    SolverConfig,
    find_cbc,
    gap,
    highs_available,
    solve,
)
from .lpfile import model_to_lp, read_model_file, write_model_file

__all__ = [
    "ERROR", "FEASIBLE", "INFEASIBLE", "NO_SOLUTION", "OPTIMAL", "SolveOutcome", "SolverConfig",
    "find_cbc", "gap", "highs_available", "solve", "model_to_lp", "read_model_file", "write_model_file",
]
from .extract import ExtractionError, extract_plan, plan_to_values  # noqa: E402

__all__ += ["ExtractionError", "extract_plan", "plan_to_values"]
