import numpy as np
import pytest

from selfmaint.costs import (
    acquisition_cost,
    cm_cost_rate,
    continuous_running_cost,
    cost_breakdown,
    mttf,
)
from selfmaint.model import DomainError, RedundancyMap, RobotBlueprint, TeamScenario
from selfmaint.simulation import SimConfig, cost_trace, run_trials

from conftest import spec


def test_mttf_values():
    assert mttf(0.0031) == pytest.approx(322.58, abs=0.01)
    assert mttf(1.0) == 1.0


def test_mttf_against_sampled_lifetimes():
    rng = np.random.default_rng(11)
    samples = rng.exponential(1 / 0.0031, 100_000)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - mttf(0.0031)) < 3 * se


@pytest.mark.parametrize("rate", [0.0, -1.0])
def test_mttf_domain(rate):
    with pytest.raises(DomainError):
        mttf(rate)


def test_cm_cost_rate():
    assert cm_cost_rate(0.005, 230) == pytest.approx(1.15)
    assert cm_cost_rate(0.3, 0) == 0
    with pytest.raises(DomainError):
        cm_cost_rate(0.1, -1)
    with pytest.raises(DomainError):
        cm_cost_rate(0.0, 1)


def test_cm_cost_rate_against_simulated_replacements():
    catalog = [spec(1, "battery", 0.05, gamma=230)]
    sc = TeamScenario(catalog, [RobotBlueprint(1, (1,), 1, 2)], [1], 400.0)
    red = RedundancyMap.from_storage(sc, {(0, 1): 1})
    # plenty of spares in the shared pool
    red = RedundancyMap(red.active, {(0, 1): 200})
    outcomes = run_trials(sc, red, SimConfig(trials=500, rng_seed=2))
    rate = cost_trace(outcomes, catalog)
    assert rate == pytest.approx(cm_cost_rate(0.05, 230), rel=0.03)


def test_acquisition_cost_robot_one(fleet):
    red = RedundancyMap.bare(fleet)
    robot_one = RedundancyMap((red.active[0],))
    assert acquisition_cost(fleet.catalog, robot_one) == 2900
    assert acquisition_cost(fleet.catalog, RedundancyMap(())) == 0


def test_acquisition_adds_spare_price(fleet):
    bare = RedundancyMap.bare(fleet)
    one = RedundancyMap.from_storage(fleet, {(2, 13): 1})
    assert acquisition_cost(fleet.catalog, one) - acquisition_cost(fleet.catalog, bare) == 1600


def test_acquisition_additive_over_disjoint_maps(fleet):
    a = RedundancyMap.from_storage(fleet, {(0, 4): 1})
    b = RedundancyMap.from_storage(fleet, {(3, 16): 2})
    both = RedundancyMap.from_storage(fleet, {(0, 4): 1, (3, 16): 2})
    bare = acquisition_cost(fleet.catalog, RedundancyMap.bare(fleet))
    assert acquisition_cost(fleet.catalog, both) - bare == pytest.approx(
        (acquisition_cost(fleet.catalog, a) - bare) + (acquisition_cost(fleet.catalog, b) - bare)
    )


def test_continuous_running_cost():
    catalog = [spec(1, "platform", 0.0031, 2000)]
    assert continuous_running_cost(catalog, 1, [1]) == pytest.approx(645161.29, abs=0.01)
    assert continuous_running_cost(catalog, 0, [1]) == 0
    assert continuous_running_cost(catalog, 4, [1]) == pytest.approx(
        2 * continuous_running_cost(catalog, 2, [1])
    )
    assert continuous_running_cost(catalog, 1, [1], reading="rate") == pytest.approx(6.2)


def test_breakdown(fleet):
    red = RedundancyMap.from_storage(fleet, {(0, 1): 1})
    costs = cost_breakdown(fleet, red)
    assert costs.acquisition == sum(sub for _, sub in costs.per_module.values())
    assert costs.per_module[1] == (5, 10000.0)
    assert costs.cm_rate > 0 and costs.continuous_rate > 0
