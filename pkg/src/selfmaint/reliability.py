"""Closed-form reliability of modules, robots and teams under cold standby.

Lifetimes are exponential; a failed active module is replaced by an inert
spare with probability ``p`` (combined detection and switching reliability).
Because a switched-in spare starts fresh, failures of one module position form
a homogeneous Poisson process and the position survives to ``t`` if there are
no failures, or if there are at most ``spares`` failures and switching works.
"""

from __future__ import annotations

import enum
import math
from typing import Mapping, Sequence

from .model import (
    ConfigurationError,
    ConstraintError,
    DomainError,
    ModuleTypeSpec,
    RedundancyMap,
    Requirement,
    RobotBlueprint,
    Role,
    TeamScenario,
)


class Capability(str, enum.Enum):
    PRIMARY = "primary"
    REPORT = "report"
    MOVE_MANIPULATE = "move_manipulate"
    MANIPULATE = "manipulate"


CAPABILITY_ROLES: dict[Capability, tuple[Role, ...]] = {
    Capability.PRIMARY: tuple(Role),
    Capability.REPORT: (Role.COMMUNICATION, Role.PROCESSOR),
    Capability.MOVE_MANIPULATE: (Role.PLATFORM, Role.BATTERY, Role.PROCESSOR),
    Capability.MANIPULATE: (Role.BATTERY, Role.MANIPULATOR),
}


def _check_args(rate: float, t: float, spares: int, p: float = 1.0) -> None:
    if not rate > 0:
        raise DomainError(f"failure rate must be > 0, got {rate}")
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    if spares < 0:
        raise DomainError(f"spare count must be non-negative, got {spares}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"switching probability {p} outside [0, 1]")


def module_reliability(rate: float, t: float, spares: int, p: float) -> float:
    """Survival probability of one module position with ``spares`` cold spares.

    Returns ``exp(-rate*t) + p * sum_{k=1}^{spares} exp(-rate*t) (rate*t)^k / k!``.
    The Poisson terms are accumulated recursively so large spare counts do not
    overflow a factorial.
    """
    _check_args(rate, t, spares, p)
    x = rate * t
    term = math.exp(-x)
    head = term
    tail = 0.0
    for k in range(1, spares + 1):
        term *= x / k
        tail += term
    return min(1.0, head + p * tail)


def perfect_switch_reliability(rate: float, t: float, spares: int) -> float:
    """Cold-standby survival with switching that never fails."""
    return module_reliability(rate, t, spares, 1.0)


def _modules(catalog: Sequence[ModuleTypeSpec] | Mapping[int, ModuleTypeSpec]) -> dict:
    if isinstance(catalog, Mapping):
        return dict(catalog)
    return {m.id: m for m in catalog}


def module_reliabilities(
    blueprint: RobotBlueprint,
    redundancy: RedundancyMap,
    catalog,
    t: float,
    robot: int,
    assisted: bool = False,
) -> dict[int, float]:
    """Per-module survival probabilities of robot instance ``robot``."""
    modules = _modules(catalog)
    if robot >= redundancy.robots:
        raise ConfigurationError(f"redundancy map has no robot {robot}")
    if tuple(blueprint.active_modules) != redundancy.active[robot]:
        raise ConfigurationError(f"robot {robot}: redundancy map does not match blueprint")
    out = {}
    for i in blueprint.active_modules:
        spec = modules.get(i)
        if spec is None:
            raise ConfigurationError(f"unknown module id {i}")
        p = spec.detect_switch_other if assisted else spec.detect_switch_self
        out[i] = module_reliability(spec.failure_rate, t, redundancy.spares(robot, i), p)
    return out


def robot_reliability(
    blueprint: RobotBlueprint,
    redundancy: RedundancyMap,
    catalog,
    t: float,
    robot: int = 0,
) -> float:
    """Probability that every active module of one robot survives to ``t``."""
    return math.prod(module_reliabilities(blueprint, redundancy, catalog, t, robot).values())


def capability_reliability(
    blueprint: RobotBlueprint,
    redundancy: RedundancyMap,
    catalog,
    t: float,
    capability: Capability | str,
    robot: int = 0,
) -> float:
    """Reliability of the module chain that one capability depends on.

    Raises ConfigurationError if the robot carries no module of a needed role.
    """
    capability = Capability(capability)
    modules = _modules(catalog)
    per_module = module_reliabilities(blueprint, redundancy, modules, t, robot)
    roles = CAPABILITY_ROLES[capability]
    value = 1.0
    for role in roles:
        ids = [i for i in per_module if modules[i].role == role]
        if not ids:
            raise ConfigurationError(
                f"robot type {blueprint.type_index} has no {role.value} module"
                f" required for {capability.value}"
            )
        value *= math.prod(per_module[i] for i in ids)
    return value


def at_least(reliabilities: Sequence[float], needed: int) -> float:
    """P(at least ``needed`` of independent robots survive)."""
    n = len(reliabilities)
    if not 0 <= needed <= n:
        raise DomainError(f"threshold {needed} outside [0, {n}]")
    if n and all(r == reliabilities[0] for r in reliabilities):
        r = reliabilities[0]
        if needed == n:
            return r**n
        if needed == 1:
            return 1.0 - (1.0 - r) ** n
        return math.fsum(
            math.comb(n, k) * r**k * (1.0 - r) ** (n - k) for k in range(needed, n + 1)
        )
    if needed == n:
        return math.prod(reliabilities)
    if needed == 1:
        return 1.0 - math.prod(1.0 - r for r in reliabilities)
    # Poisson-binomial distribution of the survivor count
    dist = [1.0]
    for r in reliabilities:
        nxt = [0.0] * (len(dist) + 1)
        for k, q in enumerate(dist):
            nxt[k] += q * (1.0 - r)
            nxt[k + 1] += q * r
        dist = nxt
    return min(1.0, math.fsum(dist[needed:]))


def combine(requirement: Requirement, groups: Sequence[Sequence[float]]) -> float:
    """Team reliability from per-type lists of independent robot reliabilities."""
    counts = tuple(len(g) for g in groups)
    needed = requirement.needed(counts)
    return math.prod(at_least(list(g), m) for g, m in zip(groups, needed))


def robot_reliabilities(
    scenario: TeamScenario, redundancy: RedundancyMap, t: float | None = None
) -> list[float]:
    t = scenario.horizon if t is None else t
    if redundancy.robots != scenario.team_size:
        raise ConfigurationError(
            f"redundancy map covers {redundancy.robots} robots, team has {scenario.team_size}"
        )
    modules = scenario.modules
    return [
        robot_reliability(bp, redundancy, modules, t, robot=j)
        for j, bp in scenario.instances()
    ]


def _group(scenario: TeamScenario, values: Sequence[float]) -> list[list[float]]:
    groups: list[list[float]] = [[] for _ in scenario.blueprints]
    for v, r in zip(scenario.instance_type(), values):
        groups[v].append(r)
    return groups


def team_reliability(
    scenario: TeamScenario,
    redundancy: RedundancyMap,
    t: float | None = None,
    requirement: Requirement | None = None,
) -> float:
    """Team survival probability at ``t`` (defaults to the scenario horizon).

    With a pooled redundancy map every active module sees the team total of
    its type, so competition for the same pooled spare is ignored; with a
    per-robot map the result is exact.
    """
    requirement = scenario.requirement if requirement is None else requirement
    values = robot_reliabilities(scenario, redundancy, t)
    return combine(requirement, _group(scenario, values))


def check_storage(scenario: TeamScenario, storage: Mapping[tuple[int, int], int]) -> None:
    """Raise ConstraintError if own-storage spare counts break any declared limit."""
    instances = scenario.instances()
    known = {m.id for m in scenario.catalog}
    per_robot: dict[int, int] = {}
    for (j, i), w in storage.items():
        if not 0 <= j < len(instances):
            raise ConstraintError(f"storage given for unknown robot {j}")
        if i not in known:
            raise ConfigurationError(f"unknown module id {i}")
        if w < 0:
            raise ConstraintError(f"robot {j}: negative storage of module {i}")
        bp = instances[j][1]
        limit = scenario.storage_limit(bp, i)
        if limit is not None and w > limit:
            raise ConstraintError(f"robot {j}: {w} spares of module {i} exceed limit {limit}")
        per_robot[j] = per_robot.get(j, 0) + w
    for j, total in per_robot.items():
        cap = instances[j][1].free_slots
        if total > cap:
            raise ConstraintError(f"robot {j}: {total} stored spares exceed {cap} free slots")


def team_reliability_own_storage(
    scenario: TeamScenario,
    storage: Mapping[tuple[int, int], int],
    t: float | None = None,
    literal: bool = False,
) -> float:
    """Team reliability when each robot may only use spares from its own storage.

    Module positions use the assisted switching probability. By default robots
    are series chains combined by the scenario's requirement. ``literal=True``
    instead treats the modules of each robot as a parallel group and requires
    every robot's group to survive, as the printed own-storage team formula
    reads; it is kept for comparison only.
    """
    check_storage(scenario, storage)
    t = scenario.horizon if t is None else t
    redundancy = RedundancyMap.from_storage(scenario, storage, pooled=False)
    modules = scenario.modules
    per_robot = [
        module_reliabilities(bp, redundancy, modules, t, robot=j, assisted=True)
        for j, bp in scenario.instances()
    ]
    if literal:
        return math.prod(
            1.0 - math.prod(1.0 - r for r in rel.values()) for rel in per_robot if rel
        )
    values = [math.prod(rel.values()) for rel in per_robot]
    return combine(scenario.requirement, _group(scenario, values))
