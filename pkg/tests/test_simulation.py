import math

import numpy as np
import pytest

from selfmaint.model import (
    DomainError,
    RedundancyMap,
    Requirement,
    RobotBlueprint,
    Role,
    StorageMode,
    TeamScenario,
)
from selfmaint.reliability import module_reliability, team_reliability, team_reliability_own_storage
from selfmaint.simulation import (
    RobotState,
    SimConfig,
    TrialOutcome,
    cost_trace,
    estimate_reliability,
    estimate_robustness_level,
    recoverable,
    repair_feasible,
    run_trials,
    simulate_trial,
)

from conftest import spec

ALL = frozenset(Role)


def one_module(rate=0.05, p=1.0, horizon=20.0, gamma=10.0):
    catalog = [spec(1, "platform", rate, ps=p, po=p, gamma=gamma)]
    return TeamScenario(catalog, [RobotBlueprint(1, (1,), 3, 4)], [1], horizon)


# -- single trials ---------------------------------------------------------------------


def test_zero_horizon_always_survives(two_full_robots):
    sc = two_full_robots.with_horizon(0.0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert simulate_trial(sc, RedundancyMap.bare(sc), SimConfig(trials=1), rng).survived


def test_no_spares_long_horizon_fails(two_full_robots):
    sc = two_full_robots.with_horizon(5_000.0)
    est, _ = estimate_reliability(sc, RedundancyMap.bare(sc), SimConfig(trials=2000))
    assert est == 0.0


def test_trial_bookkeeping(fleet):
    red = RedundancyMap.from_storage(fleet, {(0, 1): 2, (4, 16): 1, (5, 7): 1})
    rng = np.random.default_rng(7)
    for _ in range(300):
        out = simulate_trial(fleet.with_horizon(200.0), red, SimConfig(trials=1), rng)
        times = [f[0] for f in out.failure_times]
        assert all(a < b for a, b in zip(times, times[1:]))
        for i, n in out.replacements.items():
            assert n <= red.pool_total(i)
        if not out.survived:
            assert out.first_system_failure is not None


def test_per_robot_storage_conservation(two_full_robots):
    sc = two_full_robots.with_horizon(300.0)
    red = RedundancyMap.from_storage(sc, {(0, 6): 2, (1, 2): 1})
    rng = np.random.default_rng(3)
    sim = SimConfig(trials=1, storage_mode="per_robot")
    for _ in range(300):
        out = simulate_trial(sc, red, sim, rng)
        for key, n in out.consumed.items():
            assert n <= red.stored.get(key, 0)


def test_fixed_seed_reproduces_outcomes(fleet):
    red = RedundancyMap.from_storage(fleet, {(0, 1): 1})
    sim = SimConfig(trials=50, rng_seed=42)
    a = run_trials(fleet, red, sim)
    b = run_trials(fleet, red, sim)
    assert [o.failure_times for o in a] == [o.failure_times for o in b]


# -- estimates against closed forms ----------------------------------------------------


def test_single_module_matches_poisson_cdf():
    sc = one_module()
    red = RedundancyMap.from_storage(sc, {(0, 1): 2})
    est, se = estimate_reliability(sc, red, SimConfig(trials=100_000, rng_seed=1), vectorise=False)
    assert abs(est - module_reliability(0.05, 20.0, 2, 1.0)) < 3 * se


@pytest.mark.parametrize("p", [0.0, 0.5, 1.0])
def test_mechanism_switching_matches_closed_form(p):
    sc = one_module(p=p, rate=0.08)
    red = RedundancyMap.from_storage(sc, {(0, 1): 3})
    sim = SimConfig(trials=100_000, rng_seed=4)
    est, se = estimate_reliability(sc, red, sim)
    assert abs(est - module_reliability(0.08, 20.0, 3, p)) < 3 * max(se, 1e-3)


def test_per_event_switching_is_lower():
    sc = one_module(p=0.5, rate=0.08)
    red = RedundancyMap.from_storage(sc, {(0, 1): 3})
    x = 0.08 * 20
    exact = sum(math.exp(-x) * x**k / math.factorial(k) * 0.5**k for k in range(4))
    sim = SimConfig(trials=100_000, rng_seed=5, switch_model="per_event")
    for vec in (True, False):
        est, se = estimate_reliability(sc, red, sim, vectorise=vec)
        assert abs(est - exact) < 3 * se


def test_event_queue_and_vectorised_paths_agree(two_full_robots):
    sc = two_full_robots.with_horizon(90.0)
    red = RedundancyMap.from_storage(sc, {(0, 6): 1, (1, 2): 2, (1, 6): 1})
    sim = SimConfig(trials=40_000, rng_seed=8, storage_mode="per_robot")
    a, sa = estimate_reliability(sc, red, sim, vectorise=True)
    b, sb = estimate_reliability(sc, red, sim, vectorise=False)
    assert abs(a - b) < 4 * math.hypot(sa, sb)
    exact = team_reliability_own_storage(sc, red.stored)
    assert abs(a - exact) < 3 * sa


def test_tiny_rates_always_survive(two_full_robots):
    catalog = [spec(m.id, m.role.value, 1e-12) for m in two_full_robots.catalog]
    sc = TeamScenario(catalog, two_full_robots.blueprints, [2], 100.0)
    est, se = estimate_reliability(sc, RedundancyMap.bare(sc), SimConfig(trials=1000))
    assert (est, se) == (1.0, 0.0)


def test_estimate_is_deterministic(fleet):
    red = RedundancyMap.from_storage(fleet, {(0, 1): 1})
    sim = SimConfig(trials=3000, rng_seed=12)
    assert estimate_reliability(fleet, red, sim) == estimate_reliability(fleet, red, sim)


def test_pooling_dominates_own_storage(two_full_robots):
    sc = two_full_robots.with_horizon(150.0)
    storage = {(0, 6): 1, (1, 6): 1, (0, 2): 1, (1, 2): 1}
    red = RedundancyMap.from_storage(sc, storage)
    shared, s1 = estimate_reliability(sc, red, SimConfig(trials=20_000, rng_seed=3))
    own, s2 = estimate_reliability(
        sc, red, SimConfig(trials=20_000, rng_seed=3, storage_mode="per_robot")
    )
    assert shared >= own - 2 * math.hypot(s1, s2)
    assert shared > own


def test_pooled_closed_form_is_optimistic(fleet):
    # several robots draw on one pool; the closed form ignores the competition
    red = RedundancyMap.from_storage(fleet, {(0, 1): 2})
    sc = fleet.with_horizon(120.0)
    est, se = estimate_reliability(sc, red, SimConfig(trials=20_000, rng_seed=6))
    assert est <= team_reliability(sc, red) + 3 * se


# -- cost trace ------------------------------------------------------------------------


def test_cost_trace_matches_rate():
    sc = one_module(rate=0.1, horizon=500.0, gamma=40.0)
    red = RedundancyMap(((1,),), {(0, 1): 400})
    outcomes = run_trials(sc, red, SimConfig(trials=400, rng_seed=2))
    assert cost_trace(outcomes, sc.catalog) == pytest.approx(0.1 * 40.0, rel=0.03)


def test_cost_trace_linear_and_zero():
    outcome = TrialOutcome(True, 10.0, replacements={1: 3})
    cheap = [spec(1, "platform", 0.1, gamma=5.0)]
    dear = [spec(1, "platform", 0.1, gamma=10.0)]
    free = [spec(1, "platform", 0.1, gamma=0.0)]
    assert cost_trace([outcome], dear) == 2 * cost_trace([outcome], cheap)
    assert cost_trace([outcome], free) == 0.0
    with pytest.raises(DomainError):
        cost_trace([TrialOutcome(True, 0.0)], cheap)


# -- repair feasibility and robustness level -------------------------------------------


def test_full_helper_repairs_anything():
    helper = RobotState(ALL)
    for target in (RobotState(frozenset()), RobotState(ALL - {Role.MANIPULATOR})):
        assert repair_feasible(helper, target)


def test_no_manipulator_anywhere():
    no_manip = RobotState(ALL - {Role.MANIPULATOR})
    assert not repair_feasible(None, no_manip)
    assert not repair_feasible(no_manip, no_manip)


def test_silent_target_detected_by_team_mate():
    silent = RobotState(ALL - {Role.COMMUNICATION})
    deaf_helper = RobotState(frozenset({Role.PLATFORM, Role.BATTERY, Role.PROCESSOR, Role.MANIPULATOR}))
    observer = RobotState(frozenset({Role.COMMUNICATION, Role.PROCESSOR}))
    assert not repair_feasible(deaf_helper, silent)
    assert repair_feasible(deaf_helper, silent, [observer])


def test_zero_spares_gives_level_zero(two_full_robots, fleet):
    for sc in (two_full_robots, fleet):
        assert estimate_robustness_level(sc, RedundancyMap.bare(sc)) == 0


def test_lone_manipulator_failure_unrecoverable(full_robot_catalog):
    bp = RobotBlueprint(1, (1, 2, 3, 4, 5, 6), 6, 12)
    sc = TeamScenario(full_robot_catalog, [bp], [1], 10.0)
    red = RedundancyMap.from_storage(sc, {(0, i): 1 for i in range(1, 7)})
    assert not recoverable(sc, red, [(0, 4)])
    assert recoverable(sc, red, [(0, 2)]) is False  # battery is needed for self-repair too
    assert recoverable(sc, red, [(0, 6)])
    # a second robot with a manipulator makes the swap possible
    team = TeamScenario(full_robot_catalog, [bp], [2], 10.0)
    red2 = RedundancyMap.from_storage(team, {(0, 4): 1})
    assert recoverable(team, red2, [(0, 4)])


def test_mutual_spare_coverage_gives_level_one(two_full_robots):
    sc = two_full_robots
    storage = {(j, i): 1 for j in range(2) for i in range(1, 7)}
    red = RedundancyMap.from_storage(sc, storage)
    positions = [(j, i) for j in range(2) for i in range(1, 7)]
    assert all(recoverable(sc, red, [pos], StorageMode.PER_ROBOT) for pos in positions)
    k = estimate_robustness_level(sc, red, SimConfig(trials=1, storage_mode="per_robot"))
    assert k >= 1


def test_robustness_level_monotone(two_full_robots, full_robot_catalog):
    sc = two_full_robots
    levels = []
    for spares in range(3):
        storage = {(j, i): spares for j in range(2) for i in range(1, 7)}
        red = RedundancyMap.from_storage(sc, storage)
        levels.append(estimate_robustness_level(sc, red, SimConfig(trials=1, storage_mode="per_robot")))
    assert levels == sorted(levels)
    weak = [spec(m.id, m.role.value, m.failure_rate, ps=0.9, po=0.9) for m in full_robot_catalog]
    sc_weak = TeamScenario(weak, sc.blueprints, [2], 60.0)
    red = RedundancyMap.from_storage(sc_weak, {(j, i): 1 for j in range(2) for i in range(1, 7)})
    assert estimate_robustness_level(sc_weak, red) <= estimate_robustness_level(
        sc, RedundancyMap.from_storage(sc, red.stored)
    )
