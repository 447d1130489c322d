"""Domain types for teams of modular self-maintaining robots."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping


class ConfigurationError(ValueError):
    """Inconsistent scenario, blueprint, or redundancy description."""


class DomainError(ValueError):
    """Numeric argument outside its mathematical domain."""


class ConstraintError(ValueError):
    """Spare storage violates a declared storage limit."""


class Role(str, enum.Enum):
    PLATFORM = "platform"
    BATTERY = "battery"
    PROCESSOR = "processor"
    MANIPULATOR = "manipulator"
    COMMUNICATION = "communication"
    ACTIVE_PROTECTION = "active_protection"


class MaintenanceClass(str, enum.Enum):
    """Maintenance event tags. Only corrective maintenance carries a cost model."""

    CM = "corrective"
    PM = "preventive"
    FFM = "failure_finding"


class StorageMode(str, enum.Enum):
    SHARED = "shared"
    PER_ROBOT = "per_robot"


@dataclass(frozen=True)
class ModuleTypeSpec:
    """One catalog entry.

    ``failure_rate`` is in failures per month; ``detect_switch_self`` and
    ``detect_switch_other`` are the probabilities that a failure is detected and
    a spare switched in by the robot itself or with the help of a team mate.
    """

    id: int
    role: Role
    failure_rate: float
    cost: float
    detect_switch_self: float = 1.0
    detect_switch_other: float = 1.0
    maintenance_cost: float = 0.0

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ConfigurationError(f"module id must be positive, got {self.id}")
        if not self.failure_rate > 0:
            raise DomainError(f"module {self.id}: failure_rate must be > 0")
        if self.cost < 0 or self.maintenance_cost < 0:
            raise DomainError(f"module {self.id}: costs must be non-negative")
        for name in ("detect_switch_self", "detect_switch_other"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"module {self.id}: {name}={value} outside [0, 1]")


@dataclass(frozen=True)
class RobotBlueprint:
    type_index: int
    active_modules: tuple[int, ...]
    free_slots: int
    slot_capacity: int
    per_type_limits: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "active_modules", tuple(self.active_modules))
        object.__setattr__(self, "per_type_limits", dict(self.per_type_limits))
        if self.free_slots < 0:
            raise ConfigurationError(f"robot type {self.type_index}: negative free_slots")
        if len(self.active_modules) + self.free_slots > self.slot_capacity:
            raise ConfigurationError(
                f"robot type {self.type_index}: {len(self.active_modules)} active modules"
                f" + {self.free_slots} free slots exceed capacity {self.slot_capacity}"
            )
        if len(set(self.active_modules)) != len(self.active_modules):
            raise ConfigurationError(f"robot type {self.type_index}: duplicate active module id")
        if any(v < 0 for v in self.per_type_limits.values()):
            raise ConfigurationError(f"robot type {self.type_index}: negative per-type limit")


@dataclass(frozen=True)
class Requirement:
    """Team survival criterion: ``full``, ``minimal`` or ``partial``.

    For ``partial`` the ``thresholds`` give, per robot type, how many robots of
    that type must survive.
    """

    kind: str = "minimal"
    thresholds: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("full", "minimal", "partial"):
            raise ConfigurationError(f"unknown requirement kind {self.kind!r}")
        if self.kind == "partial":
            if self.thresholds is None:
                raise ConfigurationError("partial requirement needs thresholds")
            object.__setattr__(self, "thresholds", tuple(self.thresholds))

    @classmethod
    def full(cls) -> Requirement:
        return cls("full")

    @classmethod
    def minimal(cls) -> Requirement:
        return cls("minimal")

    @classmethod
    def partial(cls, thresholds: Iterable[int]) -> Requirement:
        return cls("partial", tuple(thresholds))

    def needed(self, counts: tuple[int, ...]) -> tuple[int, ...]:
        """Number of surviving robots required for each type."""
        if self.kind == "full":
            return tuple(counts)
        if self.kind == "minimal":
            return tuple(1 for _ in counts)
        assert self.thresholds is not None
        if len(self.thresholds) != len(counts):
            raise ConfigurationError("partial thresholds must match the number of robot types")
        for m, v in zip(self.thresholds, counts):
            if not 1 <= m <= v:
                raise DomainError(f"partial threshold {m} outside [1, {v}]")
        return self.thresholds


@dataclass(frozen=True)
class TeamScenario:
    catalog: tuple[ModuleTypeSpec, ...]
    blueprints: tuple[RobotBlueprint, ...]
    counts: tuple[int, ...]
    horizon: float
    requirement: Requirement = field(default_factory=Requirement)
    storage: StorageMode = StorageMode.SHARED
    # module id -> max spares any single robot may store
    limits: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "catalog", tuple(self.catalog))
        object.__setattr__(self, "blueprints", tuple(self.blueprints))
        object.__setattr__(self, "counts", tuple(self.counts))
        object.__setattr__(self, "storage", StorageMode(self.storage))
        object.__setattr__(self, "limits", dict(self.limits))
        ids = [m.id for m in self.catalog]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("duplicate module id in catalog")
        if len(self.counts) != len(self.blueprints):
            raise ConfigurationError("counts must have one entry per blueprint")
        if any(c < 1 for c in self.counts):
            raise ConfigurationError("robot counts must be positive")
        if self.horizon < 0:
            raise DomainError("horizon must be non-negative")
        known = set(ids)
        for bp in self.blueprints:
            missing = [i for i in bp.active_modules if i not in known]
            if missing:
                raise ConfigurationError(
                    f"robot type {bp.type_index}: unknown module ids {missing}"
                )
        # validates partial thresholds eagerly
        self.requirement.needed(self.counts)

    @property
    def modules(self) -> dict[int, ModuleTypeSpec]:
        return {m.id: m for m in self.catalog}

    def module(self, module_id: int) -> ModuleTypeSpec:
        for m in self.catalog:
            if m.id == module_id:
                return m
        raise ConfigurationError(f"unknown module id {module_id}")

    @property
    def team_size(self) -> int:
        return sum(self.counts)

    def instances(self) -> list[tuple[int, RobotBlueprint]]:
        """Robot instances ``(j, blueprint)`` in blueprint order, j counting from 0."""
        out = []
        for bp, n in zip(self.blueprints, self.counts):
            base = len(out)
            out.extend((base + k, bp) for k in range(n))
        return out

    def instance_type(self) -> list[int]:
        """Blueprint position of every robot instance."""
        return [v for v, n in enumerate(self.counts) for _ in range(n)]

    def storage_limit(self, blueprint: RobotBlueprint, module_id: int) -> int | None:
        limits = [
            d[module_id] for d in (blueprint.per_type_limits, self.limits) if module_id in d
        ]
        return min(limits) if limits else None

    def with_horizon(self, horizon: float) -> TeamScenario:
        return replace(self, horizon=horizon)


@dataclass(frozen=True)
class RedundancyMap:
    """Active modules and stored cold-standby spares of every robot instance.

    ``stored[(j, i)]`` is the number of type-``i`` spares kept by robot ``j``.
    With ``pooled`` set, every active module of type ``i`` draws on the team
    total ``m_i`` rather than on its own robot's storage.
    """

    active: tuple[tuple[int, ...], ...]
    stored: Mapping[tuple[int, int], int] = field(default_factory=dict)
    pooled: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "active", tuple(tuple(a) for a in self.active))
        stored = {k: int(v) for k, v in dict(self.stored).items() if v}
        for (j, _), v in stored.items():
            if v < 0:
                raise ConfigurationError("negative spare count")
            if not 0 <= j < len(self.active):
                raise ConfigurationError(f"spares stored on unknown robot {j}")
        object.__setattr__(self, "stored", stored)

    @classmethod
    def bare(cls, scenario: TeamScenario) -> RedundancyMap:
        return cls.from_storage(scenario, {})

    @classmethod
    def from_storage(
        cls,
        scenario: TeamScenario,
        storage: Mapping[tuple[int, int], int],
        pooled: bool | None = None,
    ) -> RedundancyMap:
        if pooled is None:
            pooled = scenario.storage is StorageMode.SHARED
        active = tuple(bp.active_modules for _, bp in scenario.instances())
        return cls(active, storage, pooled)

    @property
    def robots(self) -> int:
        return len(self.active)

    def pool_total(self, module_id: int) -> int:
        """Total stored spares of one type over the whole team."""
        return sum(v for (_, i), v in self.stored.items() if i == module_id)

    def own(self, robot: int, module_id: int) -> int:
        return self.stored.get((robot, module_id), 0)

    def spares(self, robot: int, module_id: int) -> int:
        """Spares available to robot ``robot``'s module ``module_id``."""
        if module_id not in self.active[robot]:
            raise ConfigurationError(f"robot {robot} has no active module {module_id}")
        return self.pool_total(module_id) if self.pooled else self.own(robot, module_id)

    def total_count(self, robot: int, module_id: int) -> int:
        """Active module plus its available spares."""
        return 1 + self.spares(robot, module_id)

    def module_counts(self) -> Counter:
        """Team-wide count of every module type, actives and spares together."""
        counts: Counter = Counter()
        for modules in self.active:
            counts.update(modules)
        for (_, i), v in self.stored.items():
            counts[i] += v
        return counts

    def robot_storage(self, robot: int) -> dict[int, int]:
        return {i: v for (j, i), v in self.stored.items() if j == robot}

    def key(self) -> tuple:
        return (self.active, tuple(sorted(self.stored.items())), self.pooled)
