"""Spare-slot chromosome: layout, decoding, repair and objective evaluation.

One gene per free spare slot, robots in instance order. Gene ``0`` leaves the
slot empty; any other value is the catalog id of the spare stored there.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..costs import acquisition_cost
from ..model import ConfigurationError, RedundancyMap, TeamScenario
from ..reliability import team_reliability


@dataclass(frozen=True)
class Allocation:
    genes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "genes", tuple(int(g) for g in self.genes))

    def __len__(self) -> int:
        return len(self.genes)


@dataclass(frozen=True)
class ParetoPoint:
    reliability: float
    cost: float
    allocation: Allocation


@dataclass(frozen=True)
class Evaluation:
    reliability: float
    cost: float
    feasible: bool = True


class SlotLayout:
    """Gene-to-robot mapping and per-gene admissible values for a scenario."""

    def __init__(self, scenario: TeamScenario):
        self.scenario = scenario
        self.robot_of_gene: list[int] = []
        self.slices: list[slice] = []
        for j, bp in scenario.instances():
            start = len(self.robot_of_gene)
            self.robot_of_gene.extend([j] * bp.free_slots)
            self.slices.append(slice(start, len(self.robot_of_gene)))
        self.module_ids = tuple(sorted(m.id for m in scenario.catalog))
        self.choices = tuple((0,) + self.module_ids for _ in self.robot_of_gene)

    def __len__(self) -> int:
        return len(self.robot_of_gene)

    def search_space_size(self) -> int:
        size = 1
        for c in self.choices:
            size *= len(c)
        return size


def _layout(scenario: TeamScenario, layout: SlotLayout | None) -> SlotLayout:
    return SlotLayout(scenario) if layout is None else layout


def storage_of(
    allocation: Allocation | Sequence[int],
    scenario: TeamScenario,
    layout: SlotLayout | None = None,
) -> dict[tuple[int, int], int]:
    layout = _layout(scenario, layout)
    genes = allocation.genes if isinstance(allocation, Allocation) else tuple(allocation)
    if len(genes) != len(layout):
        raise ConfigurationError(
            f"allocation has {len(genes)} genes, scenario has {len(layout)} free slots"
        )
    known = set(layout.module_ids)
    storage: Counter = Counter()
    for j, g in zip(layout.robot_of_gene, genes):
        if g == 0:
            continue
        if g not in known:
            raise ConfigurationError(f"gene references unknown module id {g}")
        storage[(j, g)] += 1
    return dict(storage)


def decode(
    allocation: Allocation | Sequence[int],
    scenario: TeamScenario,
    layout: SlotLayout | None = None,
) -> RedundancyMap:
    """Per-robot spare counts of an allocation, pooled per the scenario's storage mode."""
    return RedundancyMap.from_storage(scenario, storage_of(allocation, scenario, layout))


def encode(
    storage: Mapping[tuple[int, int], int],
    scenario: TeamScenario,
    layout: SlotLayout | None = None,
) -> Allocation:
    """Canonical chromosome for per-robot spare counts: ids ascending, empties last."""
    layout = _layout(scenario, layout)
    genes = [0] * len(layout)
    for j, sl in enumerate(layout.slices):
        ids = sorted(
            i for (r, i), n in storage.items() if r == j for _ in range(n)
        )
        width = sl.stop - sl.start
        if len(ids) > width:
            raise ConfigurationError(f"robot {j}: {len(ids)} spares exceed {width} free slots")
        genes[sl.start : sl.start + len(ids)] = ids
    if sum(storage.values()) != sum(1 for g in genes if g):
        raise ConfigurationError("storage references unknown robots")
    return Allocation(genes)


def canonical(genes: Sequence[int], layout: SlotLayout) -> tuple[int, ...]:
    """Gene order within one robot's slots does not matter; sort it away."""
    out: list[int] = []
    for sl in layout.slices:
        block = sorted(g for g in genes[sl] if g)
        out.extend(block + [0] * (sl.stop - sl.start - len(block)))
    return tuple(out)


def is_feasible(genes: Sequence[int], scenario: TeamScenario, layout: SlotLayout) -> bool:
    return tuple(genes) == repair(genes, scenario, layout)


def repair(genes: Sequence[int], scenario: TeamScenario, layout: SlotLayout) -> tuple[int, ...]:
    """Reset genes that exceed a per-robot, per-type storage limit, left to right."""
    instances = scenario.instances()
    out = list(genes)
    used: Counter = Counter()
    for g_idx, (j, g) in enumerate(zip(layout.robot_of_gene, genes)):
        if g == 0:
            continue
        limit = scenario.storage_limit(instances[j][1], g)
        if limit is not None and used[(j, g)] >= limit:
            out[g_idx] = 0
        else:
            used[(j, g)] += 1
    return tuple(out)


def evaluate(
    allocation: Allocation | Sequence[int],
    scenario: TeamScenario,
    t: float | None = None,
    layout: SlotLayout | None = None,
) -> Evaluation:
    """Team reliability at ``t`` and acquisition cost of an allocation.

    Allocations that break a per-type storage limit are reported infeasible
    rather than raising.
    """
    layout = _layout(scenario, layout)
    genes = allocation.genes if isinstance(allocation, Allocation) else tuple(allocation)
    redundancy = decode(genes, scenario, layout)
    reliability = team_reliability(scenario, redundancy, t)
    cost = acquisition_cost(scenario.modules, redundancy)
    return Evaluation(reliability, cost, is_feasible(genes, scenario, layout))
