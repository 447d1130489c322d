"""Monte-Carlo simulation of module failures, cold-standby switching and team survival.

Switching succeeds instantly or not at all. By default a module position's
switching mechanism either works for the whole mission (probability ``p``,
drawn at its first failure) or not at all, which is the model behind the
closed-form module reliability. ``switch_model="per_event"`` instead draws an
independent success for every failure.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .model import (
    DomainError,
    MaintenanceClass,
    RedundancyMap,
    Role,
    StorageMode,
    TeamScenario,
)

CHUNK = 8192


@dataclass(frozen=True)
class SimConfig:
    trials: int = 10_000
    rng_seed: int = 0
    horizon: float | None = None
    storage_mode: StorageMode = StorageMode.SHARED
    switch_model: str = "mechanism"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.horizon is not None and self.horizon < 0:
            raise DomainError("horizon must be non-negative")
        object.__setattr__(self, "storage_mode", StorageMode(self.storage_mode))
        if self.switch_model not in ("mechanism", "per_event"):
            raise ValueError(f"unknown switch model {self.switch_model!r}")


@dataclass
class TrialOutcome:
    survived: bool
    horizon: float
    failure_times: list[tuple[float, int, int, MaintenanceClass]] = field(default_factory=list)
    replacements: dict[int, int] = field(default_factory=dict)
    first_system_failure: float | None = None
    robots_up: list[bool] = field(default_factory=list)
    consumed: dict[tuple[int, int], int] = field(default_factory=dict)


def _horizon(scenario: TeamScenario, sim: SimConfig) -> float:
    return scenario.horizon if sim.horizon is None else sim.horizon


def _switch_prob(spec, mode: StorageMode) -> float:
    # own storage: spares are fetched with a team mate's help
    return spec.detect_switch_other if mode is StorageMode.PER_ROBOT else spec.detect_switch_self


def _requirement_met(scenario: TeamScenario, up: Sequence[bool]) -> bool:
    needed = scenario.requirement.needed(scenario.counts)
    alive = [0] * len(scenario.blueprints)
    for v, ok in zip(scenario.instance_type(), up):
        alive[v] += ok
    return all(a >= m for a, m in zip(alive, needed))


def simulate_trial(
    scenario: TeamScenario,
    redundancy: RedundancyMap,
    sim: SimConfig,
    rng: np.random.Generator,
) -> TrialOutcome:
    """One discrete-event run of the whole team up to the horizon."""
    horizon = _horizon(scenario, sim)
    modules = scenario.modules
    mode = sim.storage_mode
    if mode is StorageMode.SHARED:
        pool = {i: redundancy.pool_total(i) for i in modules}
    else:
        own = dict(redundancy.stored)

    events: list[tuple[float, int, int]] = []
    for j, active in enumerate(redundancy.active):
        for i in active:
            heapq.heappush(events, (rng.exponential(1.0 / modules[i].failure_rate), j, i))

    up = [True] * redundancy.robots
    mechanism: dict[tuple[int, int], bool] = {}
    out = TrialOutcome(survived=True, horizon=horizon)
    while events and events[0][0] <= horizon:
        time, j, i = heapq.heappop(events)
        if not up[j]:
            continue
        out.failure_times.append((time, j, i, MaintenanceClass.CM))
        if mode is StorageMode.SHARED:
            available = pool[i] > 0
        else:
            available = own.get((j, i), 0) > 0
        ok = False
        if available:
            p = _switch_prob(modules[i], mode)
            if sim.switch_model == "per_event":
                ok = rng.random() < p
            else:
                if (j, i) not in mechanism:
                    mechanism[(j, i)] = rng.random() < p
                ok = mechanism[(j, i)]
        if ok:
            if mode is StorageMode.SHARED:
                pool[i] -= 1
            else:
                own[(j, i)] -= 1
            out.replacements[i] = out.replacements.get(i, 0) + 1
            out.consumed[(j, i)] = out.consumed.get((j, i), 0) + 1
            heapq.heappush(events, (time + rng.exponential(1.0 / modules[i].failure_rate), j, i))
        else:
            up[j] = False
            if out.first_system_failure is None and not _requirement_met(scenario, up):
                out.first_system_failure = time
    out.robots_up = up
    out.survived = _requirement_met(scenario, up)
    return out


def _streams(seed: int, trials: int) -> Iterable[tuple[np.random.Generator, int]]:
    """Independent generator per fixed-size chunk of trials."""
    chunks = math.ceil(trials / CHUNK)
    for k, child in enumerate(np.random.SeedSequence(seed).spawn(chunks)):
        yield np.random.default_rng(child), min(CHUNK, trials - k * CHUNK)


def run_trials(
    scenario: TeamScenario, redundancy: RedundancyMap, sim: SimConfig
) -> list[TrialOutcome]:
    out = []
    for rng, n in _streams(sim.rng_seed, sim.trials):
        out.extend(simulate_trial(scenario, redundancy, sim, rng) for _ in range(n))
    return out


def _independent_positions(redundancy: RedundancyMap, mode: StorageMode) -> bool:
    """True when no two module positions can draw on the same spares."""
    if mode is StorageMode.PER_ROBOT:
        return True
    users: dict[int, int] = {}
    for active in redundancy.active:
        for i in active:
            users[i] = users.get(i, 0) + 1
    return all(users.get(i, 0) <= 1 for (_, i) in redundancy.stored)


def _vectorised_survival(
    scenario: TeamScenario,
    redundancy: RedundancyMap,
    sim: SimConfig,
    rng: np.random.Generator,
    n: int,
    horizon: float,
) -> np.ndarray:
    modules = scenario.modules
    robots_up = np.ones((n, redundancy.robots), dtype=bool)
    for j, active in enumerate(redundancy.active):
        for i in active:
            spec = modules[i]
            if sim.storage_mode is StorageMode.SHARED:
                spares = redundancy.pool_total(i)
            else:
                spares = redundancy.own(j, i)
            lifetimes = rng.exponential(1.0 / spec.failure_rate, size=(n, spares + 1))
            failures = (np.cumsum(lifetimes, axis=1) <= horizon).sum(axis=1)
            p = _switch_prob(spec, sim.storage_mode)
            if sim.switch_model == "per_event":
                draws = rng.random((n, max(spares, 1))) < p
                ok = np.cumprod(draws, axis=1)
                switched = np.where(failures > 0, ok[np.arange(n), np.clip(failures, 1, max(spares, 1)) - 1], True)
            else:
                switched = (failures == 0) | (rng.random(n) < p)
            robots_up[:, j] &= (failures <= spares) & switched.astype(bool)
    needed = scenario.requirement.needed(scenario.counts)
    types = np.array(scenario.instance_type())
    ok = np.ones(n, dtype=bool)
    for v, m in enumerate(needed):
        ok &= robots_up[:, types == v].sum(axis=1) >= m
    return ok


def estimate_reliability(
    scenario: TeamScenario,
    redundancy: RedundancyMap,
    sim: SimConfig,
    vectorise: bool | None = None,
) -> tuple[float, float]:
    """Survival fraction over ``sim.trials`` runs and its binomial standard error.

    When no two module positions compete for the same spares the positions
    are independent and whole chunks of trials are simulated with array
    operations; otherwise every trial runs through the event queue.
    """
    horizon = _horizon(scenario, sim)
    if vectorise is None:
        vectorise = _independent_positions(redundancy, sim.storage_mode)
    survived = 0
    for rng, n in _streams(sim.rng_seed, sim.trials):
        if vectorise:
            survived += int(_vectorised_survival(scenario, redundancy, sim, rng, n, horizon).sum())
        else:
            survived += sum(
                simulate_trial(scenario, redundancy, sim, rng).survived for _ in range(n)
            )
    est = survived / sim.trials
    return est, math.sqrt(est * (1.0 - est) / sim.trials)


def cost_trace(outcomes: Sequence[TrialOutcome], catalog) -> float:
    """Corrective-maintenance spend per month, averaged over trials."""
    if not outcomes:
        raise ValueError("no trial outcomes")
    horizon = outcomes[0].horizon
    if horizon <= 0:
        raise DomainError("horizon must be positive to form a cost rate")
    modules = catalog if isinstance(catalog, dict) else {m.id: m for m in catalog}
    spend = math.fsum(
        n * modules[i].maintenance_cost for o in outcomes for i, n in o.replacements.items()
    )
    return spend / len(outcomes) / horizon


# --- robustness level -------------------------------------------------------------------


@dataclass(frozen=True)
class RobotState:
    """Roles whose modules are all functioning on one robot."""

    functioning: frozenset[Role]

    def has(self, *roles: Role) -> bool:
        return all(r in self.functioning for r in roles)

    @property
    def broadcasting(self) -> bool:
        return self.has(Role.COMMUNICATION, Role.PROCESSOR)


SELF_REPAIR = (Role.MANIPULATOR, Role.BATTERY, Role.PROCESSOR)
ASSIST = (Role.PLATFORM, Role.BATTERY, Role.PROCESSOR, Role.MANIPULATOR)


def repair_feasible(
    helper_state: RobotState | None,
    target_state: RobotState,
    observers: Iterable[RobotState] = (),
) -> bool:
    """Whether a failed module on the target robot can be swapped.

    ``helper_state=None`` asks about self-repair. An assisting robot must be
    able to move and manipulate, and the target's failure must be noticed:
    either the target still broadcasts its liveliness signal, or the silence
    is heard by the helper or by one of ``observers``.
    """
    if helper_state is None:
        return target_state.has(*SELF_REPAIR)
    if not helper_state.has(*ASSIST):
        return False
    return (
        target_state.broadcasting
        or helper_state.broadcasting
        or any(o.broadcasting for o in observers)
    )


def _state(scenario: TeamScenario, active: Sequence[int], failed: set[int]) -> RobotState:
    roles: dict[Role, bool] = {}
    for i in active:
        role = scenario.module(i).role
        roles[role] = roles.get(role, True) and i not in failed
    return RobotState(frozenset(r for r, ok in roles.items() if ok))


def recoverable(
    scenario: TeamScenario,
    redundancy: RedundancyMap,
    failed: Iterable[tuple[int, int]],
    storage_mode: StorageMode = StorageMode.SHARED,
    min_switch_probability: float = 1.0,
) -> bool:
    """Can the team identify and replace every module in ``failed``?

    Failures are simultaneous. Repairs are applied one at a time to the
    post-failure team until nothing more can be fixed, so a repaired
    manipulator may enable further repairs. A repair route counts only if its
    switching probability reaches ``min_switch_probability``.
    """
    pending = {(j, i) for j, i in failed}
    broken: dict[int, set[int]] = {j: set() for j in range(redundancy.robots)}
    for j, i in pending:
        broken[j].add(i)
    if storage_mode is StorageMode.SHARED:
        pool = {i: redundancy.pool_total(i) for i in {i for _, i in pending}}
    else:
        own = dict(redundancy.stored)

    def states() -> list[RobotState]:
        return [_state(scenario, redundancy.active[j], broken[j]) for j in range(redundancy.robots)]

    progress = True
    while pending and progress:
        progress = False
        current = states()
        for j, i in sorted(pending):
            if storage_mode is StorageMode.SHARED:
                have = pool[i] > 0
            else:
                have = own.get((j, i), 0) > 0
            if not have:
                continue
            spec = scenario.module(i)
            target = current[j]
            routes = spec.detect_switch_self >= min_switch_probability and repair_feasible(
                None, target
            )
            if not routes and spec.detect_switch_other >= min_switch_probability:
                others = [s for h, s in enumerate(current) if h != j]
                routes = any(
                    repair_feasible(helper, target, others[:k] + others[k + 1 :])
                    for k, helper in enumerate(others)
                )
            if routes:
                if storage_mode is StorageMode.SHARED:
                    pool[i] -= 1
                else:
                    own[(j, i)] -= 1
                pending.discard((j, i))
                broken[j].discard(i)
                progress = True
                break
    return not pending


def estimate_robustness_level(
    scenario: TeamScenario,
    redundancy: RedundancyMap,
    sim: SimConfig | None = None,
    ceiling: int = 20_000,
    samples: int = 2_000,
    min_switch_probability: float = 1.0,
) -> int:
    """Largest k such that every set of at most k simultaneous failures is recoverable.

    All failure sets of a size are checked when there are at most ``ceiling``
    of them; otherwise ``samples`` random sets of that size are drawn.
    """
    sim = SimConfig(trials=1) if sim is None else sim
    rng = np.random.default_rng(sim.rng_seed)
    positions = [(j, i) for j, active in enumerate(redundancy.active) for i in active]
    for k in range(1, len(positions) + 1):
        if math.comb(len(positions), k) <= ceiling:
            sets: Iterable = itertools.combinations(positions, k)
        else:
            sets = (
                [positions[x] for x in rng.choice(len(positions), size=k, replace=False)]
                for _ in range(samples)
            )
        for failed in sets:
            if not recoverable(
                scenario, redundancy, failed, sim.storage_mode, min_switch_probability
            ):
                return k - 1
    return len(positions)
