"""Acquisition, corrective-maintenance and running costs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import ConfigurationError, DomainError, RedundancyMap, TeamScenario


@dataclass(frozen=True)
class CostBreakdown:
    acquisition: float
    cm_rate: float
    continuous_rate: float
    per_module: dict[int, tuple[int, float]] = field(default_factory=dict)


def mttf(rate: float) -> float:
    """Mean time to failure of an exponential lifetime, in months."""
    if not rate > 0:
        raise DomainError(f"failure rate must be > 0, got {rate}")
    return 1.0 / rate


def cm_cost_rate(rate: float, maintenance_cost: float) -> float:
    """Long-run corrective-maintenance cost per month of one module position."""
    if not rate > 0:
        raise DomainError(f"failure rate must be > 0, got {rate}")
    if maintenance_cost < 0:
        raise DomainError("maintenance cost must be non-negative")
    return rate * maintenance_cost


def _catalog_map(catalog) -> dict:
    return catalog if isinstance(catalog, dict) else {m.id: m for m in catalog}


def acquisition_cost(catalog, redundancy: RedundancyMap) -> float:
    """Price of every active module and every stored spare in the team."""
    modules = _catalog_map(catalog)
    total = 0.0
    for i, n in sorted(redundancy.module_counts().items()):
        if i not in modules:
            raise ConfigurationError(f"unknown module id {i}")
        total += modules[i].cost * n
    return total


def continuous_running_cost(
    catalog, team_size: int, active_set: Iterable[int], reading: str = "literal"
) -> float:
    """Time-averaged running cost ``L * sum(c_i / rate_i)`` over ``active_set``.

    The ``"literal"`` reading divides cost by failure rate, which has units of
    currency times months, not currency per month. ``reading="rate"`` gives the
    replacement-cost rate ``L * sum(c_i * rate_i)`` instead.
    """
    if reading not in ("literal", "rate"):
        raise ValueError(f"unknown reading {reading!r}")
    if team_size < 0:
        raise DomainError("team size must be non-negative")
    modules = _catalog_map(catalog)
    total = 0.0
    for i in active_set:
        spec = modules.get(i)
        if spec is None:
            raise ConfigurationError(f"unknown module id {i}")
        if not spec.failure_rate > 0:
            raise DomainError(f"module {i}: failure rate must be > 0")
        if reading == "literal":
            total += spec.cost / spec.failure_rate
        else:
            total += spec.cost * spec.failure_rate
    return team_size * total


def cost_breakdown(
    scenario: TeamScenario, redundancy: RedundancyMap, reading: str = "literal"
) -> CostBreakdown:
    modules = scenario.modules
    counts = redundancy.module_counts()
    per_module = {i: (n, modules[i].cost * n) for i, n in sorted(counts.items())}
    cm = sum(
        cm_cost_rate(modules[i].failure_rate, modules[i].maintenance_cost)
        for _, bp in scenario.instances()
        for i in bp.active_modules
    )
    # heterogeneous teams: one running-cost term per robot type
    continuous = sum(
        continuous_running_cost(modules, n, bp.active_modules, reading)
        for bp, n in zip(scenario.blueprints, scenario.counts)
    )
    return CostBreakdown(
        acquisition=acquisition_cost(modules, redundancy),
        cm_rate=cm,
        continuous_rate=continuous,
        per_module=per_module,
    )
