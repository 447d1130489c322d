"""Two-objective redundancy allocation: chromosome, NSGA-II and exact enumeration."""

from .chromosome import (
    Allocation,
    Evaluation,
    ParetoPoint,
    SlotLayout,
    decode,
    encode,
    evaluate,
    repair,
)
from .enumeration import (
    SearchSpaceTooLarge,
    exhaustive_enumerate,
    per_robot_count,
    pooled_count,
    search_space_size,
)
from .nsga2 import GAConfig, NoFeasibleSolution, crossover, mutate, nsga2_optimize, tournament_select
from .pareto import crowding_distance, dominates, fast_non_dominated_sort, hypervolume, pareto_indices

__all__ = [
    "Allocation",
    "Evaluation",
    "GAConfig",
    "NoFeasibleSolution",
    "ParetoPoint",
    "SearchSpaceTooLarge",
    "SlotLayout",
    "crossover",
    "crowding_distance",
    "decode",
    "dominates",
    "encode",
    "evaluate",
    "exhaustive_enumerate",
    "fast_non_dominated_sort",
    "hypervolume",
    "mutate",
    "nsga2_optimize",
    "pareto_indices",
    "per_robot_count",
    "pooled_count",
    "repair",
    "search_space_size",
    "tournament_select",
]
