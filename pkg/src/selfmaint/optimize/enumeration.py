"""Exact Pareto fronts by exhaustive enumeration, for small instances."""

from __future__ import annotations

import itertools
import math
import os
from typing import Iterable, Mapping

from ..model import TeamScenario
from .chromosome import Allocation, ParetoPoint, SlotLayout, evaluate, is_feasible
from .pareto import pareto_indices

DEFAULT_CEILING = 10**7
CEILING_ENV = "SELFMAINT_ENUM_CEILING"


class SearchSpaceTooLarge(RuntimeError):
    def __init__(self, size: int, ceiling: int):
        super().__init__(f"search space of {size} allocations exceeds ceiling {ceiling}")
        self.size = size
        self.ceiling = ceiling


def default_ceiling() -> int:
    value = os.environ.get(CEILING_ENV)
    return int(float(value)) if value else DEFAULT_CEILING


def pooled_count(maxima: Iterable[int]) -> int:
    """Number of cost/reliability evaluations: product of per-type maxima."""
    return math.prod(maxima)


def per_robot_count(maxima: Mapping[tuple[int, int], int]) -> int:
    """Evaluation count when every robot has its own per-type maximum."""
    return math.prod(maxima.values())


def search_space_size(scenario: TeamScenario) -> int:
    """Number of distinct chromosomes: product of admissible values per gene."""
    return SlotLayout(scenario).search_space_size()


def _robot_blocks(layout: SlotLayout) -> list[list[tuple[int, ...]]]:
    # gene order inside one robot's slots is irrelevant, so multisets suffice
    blocks = []
    for sl in layout.slices:
        width = sl.stop - sl.start
        values = layout.choices[sl.start] if width else (0,)
        combos = itertools.combinations_with_replacement(sorted(values, key=lambda v: (v == 0, v)), width)
        blocks.append([tuple(c) for c in combos])
    return blocks


def exhaustive_enumerate(
    scenario: TeamScenario, ceiling: int | None = None, t: float | None = None
) -> list[ParetoPoint]:
    """Exact reliability/cost front over every feasible allocation.

    Raises SearchSpaceTooLarge, carrying the chromosome count, when that count
    exceeds ``ceiling``.
    """
    ceiling = default_ceiling() if ceiling is None else ceiling
    layout = SlotLayout(scenario)
    size = layout.search_space_size()
    if size > ceiling:
        raise SearchSpaceTooLarge(size, ceiling)
    genes_list: list[tuple[int, ...]] = []
    objectives: list[tuple[float, float]] = []
    for parts in itertools.product(*_robot_blocks(layout)):
        genes = tuple(g for block in parts for g in block)
        if not is_feasible(genes, scenario, layout):
            continue
        ev = evaluate(genes, scenario, t, layout)
        genes_list.append(genes)
        objectives.append((ev.reliability, ev.cost))
    best: dict[tuple[float, float], tuple[int, ...]] = {}
    for idx in pareto_indices(objectives):
        pair = objectives[idx]
        if pair not in best or genes_list[idx] < best[pair]:
            best[pair] = genes_list[idx]
    points = [ParetoPoint(r, c, Allocation(g)) for (r, c), g in best.items()]
    points.sort(key=lambda p: (-p.reliability, p.cost, p.allocation.genes))
    return points
