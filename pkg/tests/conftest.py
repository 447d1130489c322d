import pytest

from selfmaint.model import (
    ModuleTypeSpec,
    Requirement,
    RobotBlueprint,
    Role,
    StorageMode,
    TeamScenario,
)
from selfmaint.scenario_io import reference_fleet


def spec(i, role, rate, cost=100.0, ps=1.0, po=1.0, gamma=0.0):
    return ModuleTypeSpec(i, Role(role), rate, cost, ps, po, gamma)


@pytest.fixture
def fleet():
    return reference_fleet(60.0)


@pytest.fixture
def full_robot_catalog():
    """Six module types, one per role."""
    return [
        spec(1, "platform", 0.0031, 2000),
        spec(2, "battery", 0.0050, 200),
        spec(3, "processor", 0.0034, 400),
        spec(4, "manipulator", 0.0021, 300),
        spec(5, "communication", 0.0012, 1600),
        spec(6, "active_protection", 0.0076, 800),
    ]


@pytest.fixture
def two_full_robots(full_robot_catalog):
    bp = RobotBlueprint(1, (1, 2, 3, 4, 5, 6), free_slots=6, slot_capacity=12)
    return TeamScenario(
        full_robot_catalog, [bp], [2], 60.0, Requirement.minimal(), StorageMode.PER_ROBOT
    )


@pytest.fixture
def small_instance():
    """Two robots, two module types, three spare slots in total."""
    catalog = [spec(1, "platform", 0.02, 500), spec(2, "battery", 0.05, 120)]
    robots = [
        RobotBlueprint(1, (1, 2), free_slots=2, slot_capacity=4),
        RobotBlueprint(2, (1,), free_slots=1, slot_capacity=2),
    ]
    return TeamScenario(catalog, robots, [1, 1], 24.0, Requirement.minimal())


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
