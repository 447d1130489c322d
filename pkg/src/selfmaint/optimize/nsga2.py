"""NSGA-II over the spare-slot chromosome."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..model import TeamScenario
from .chromosome import (
    Allocation,
    Evaluation,
    ParetoPoint,
    SlotLayout,
    canonical,
    evaluate,
    repair,
)
from .pareto import (
    crowding_distance,
    dominates,
    fast_non_dominated_sort,
    hypervolume,
    pareto_indices,
)

log = logging.getLogger(__name__)


class NoFeasibleSolution(RuntimeError):
    """No allocation of the scenario satisfies its storage limits."""


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    generations: int = 200
    crossover_rate: float = 0.9
    # None means 1 / chromosome length
    mutation_rate: float | None = None
    tournament_size: int = 2
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be even and at least 4")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        for name in ("crossover_rate", "mutation_rate"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.tournament_size != 2:
            raise ValueError("only binary tournaments are supported")


def tournament_select(
    ranks: Sequence[int], distances: Sequence[float], rng: np.random.Generator
) -> int:
    """Binary tournament: lower rank wins, then larger crowding distance, then a coin flip."""
    n = len(ranks)
    a, b = int(rng.integers(n)), int(rng.integers(n))
    if ranks[a] != ranks[b]:
        return a if ranks[a] < ranks[b] else b
    if distances[a] != distances[b]:
        return a if distances[a] > distances[b] else b
    return a if rng.random() < 0.5 else b


def crossover(
    a: Allocation, b: Allocation, rng: np.random.Generator, rate: float = 1.0
) -> tuple[Allocation, Allocation]:
    """Uniform crossover, applied with probability ``rate``."""
    if len(a) != len(b):
        raise ValueError("parents must have equal gene lengths")
    if rate <= 0.0 or rng.random() >= rate:
        return a, b
    mask = rng.random(len(a)) < 0.5
    ga, gb = np.array(a.genes, dtype=int), np.array(b.genes, dtype=int)
    return (
        Allocation(np.where(mask, ga, gb).tolist()),
        Allocation(np.where(mask, gb, ga).tolist()),
    )


def mutate(
    a: Allocation,
    rate: float,
    rng: np.random.Generator,
    choices: Sequence[Sequence[int]],
) -> Allocation:
    """Redraw each gene with probability ``rate`` from its admissible values."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("mutation rate must lie in [0, 1]")
    hits = rng.random(len(a)) < rate
    if not hits.any():
        return a
    genes = list(a.genes)
    for g in np.flatnonzero(hits):
        options = choices[g]
        genes[g] = int(options[rng.integers(len(options))])
    return Allocation(genes)


def _random_genes(layout: SlotLayout, rng: np.random.Generator) -> list[int]:
    # per-individual fill level spreads the initial population over the cost range
    fill = rng.random()
    genes = []
    for options in layout.choices:
        if rng.random() < fill:
            genes.append(int(options[1 + rng.integers(len(options) - 1)]))
        else:
            genes.append(0)
    return genes


class _Evaluator:
    """Memoised objective evaluation keyed by canonical gene vector."""

    def __init__(self, scenario: TeamScenario, t: float | None, layout: SlotLayout):
        self.scenario = scenario
        self.t = t
        self.layout = layout
        self.cache: dict[tuple[int, ...], Evaluation] = {}

    def __call__(self, genes: tuple[int, ...]) -> Evaluation:
        key = canonical(genes, self.layout)
        ev = self.cache.get(key)
        if ev is None:
            ev = evaluate(key, self.scenario, self.t, self.layout)
            self.cache[key] = ev
        return ev

    def max_cost(self) -> float:
        base = evaluate((0,) * len(self.layout), self.scenario, self.t, self.layout).cost
        priciest = max(m.cost for m in self.scenario.catalog)
        return base + priciest * len(self.layout)


def _rank_and_crowd(objectives: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[list[int]]]:
    fronts = fast_non_dominated_sort(objectives)
    ranks = np.empty(len(objectives), dtype=int)
    dist = np.empty(len(objectives))
    for k, front in enumerate(fronts):
        ranks[front] = k
        dist[front] = crowding_distance(objectives[front])
    return ranks, dist, fronts


def _truncate(
    objectives: np.ndarray, pools: Sequence[list[int]], size: int, protected: set[int]
) -> list[int]:
    chosen: list[int] = []
    for pool in pools:
        if len(chosen) >= size or not pool:
            continue
        sub = objectives[pool]
        for front in fast_non_dominated_sort(sub):
            members = [pool[i] for i in front]
            if len(chosen) + len(members) <= size:
                chosen.extend(members)
                continue
            d = crowding_distance(sub[front])
            order = sorted(
                range(len(front)),
                key=lambda i: (members[i] not in protected, -d[i], members[i]),
            )
            chosen.extend(members[i] for i in order[: size - len(chosen)])
            break
    return chosen


def _front_hv(objectives: np.ndarray, ref_cost: float) -> float:
    return hypervolume(objectives[pareto_indices(objectives)], ref_cost)


def _survivors(
    objectives: np.ndarray, keys: list[tuple], size: int, parents: int, ref_cost: float
) -> list[int]:
    """Elitist truncation of parents plus offspring down to ``size``.

    Duplicate chromosomes only fill leftover places. Crowding distance breaks
    ties in the overflowing front, unless that would shrink the hypervolume
    of the parents' first front; then the points covering that front are
    kept first.
    """
    first: dict[tuple, int] = {}
    unique, dupes = [], []
    for idx, k in enumerate(keys):
        if k in first:
            dupes.append(idx)
        else:
            first[k] = idx
            unique.append(idx)

    chosen = _truncate(objectives, (unique, dupes), size, set())
    if _front_hv(objectives[chosen], ref_cost) >= _front_hv(objectives[:parents], ref_cost):
        return chosen

    top = set(pareto_indices(objectives))
    protected: set[int] = set()
    for p in pareto_indices(objectives[:parents]):
        if p in top:
            protected.add(first[keys[p]])
            continue
        for q in sorted(top):
            if dominates(objectives[q], objectives[p]):
                protected.add(first[keys[q]])
                break
    return _truncate(objectives, (unique, dupes), size, protected)


def _front_points(
    genes: list[tuple[int, ...]], evals: list[Evaluation], layout: SlotLayout
) -> list[ParetoPoint]:
    objectives = np.array([(e.reliability, e.cost) for e in evals]).reshape(-1, 2)
    best: dict[tuple[float, float], tuple[int, ...]] = {}
    for idx in pareto_indices(objectives):
        pair = (evals[idx].reliability, evals[idx].cost)
        key = canonical(genes[idx], layout)
        if pair not in best or key < best[pair]:
            best[pair] = key
    points = [ParetoPoint(r, c, Allocation(g)) for (r, c), g in best.items()]
    points.sort(key=lambda p: (-p.reliability, p.cost, p.allocation.genes))
    return points


def nsga2_optimize(
    scenario: TeamScenario,
    ga: GAConfig = GAConfig(),
    t: float | None = None,
    on_generation: Callable[[int, list[ParetoPoint], float], None] | None = None,
) -> list[ParetoPoint]:
    """Approximate the reliability/cost Pareto front of spare allocations.

    Returns the non-dominated set of the final population, one point per
    distinct objective pair, sorted by descending reliability. The run is fully
    determined by ``ga.rng_seed``. ``on_generation`` receives the generation
    number, the current first front and its hypervolume.
    """
    layout = SlotLayout(scenario)
    rng = np.random.default_rng(ga.rng_seed)
    evaluator = _Evaluator(scenario, t, layout)
    n = ga.population_size
    mutation_rate = ga.mutation_rate
    if mutation_rate is None:
        mutation_rate = 1.0 / len(layout) if len(layout) else 0.0
    ref_cost = evaluator.max_cost() + 1.0

    population = [tuple([0] * len(layout))]
    while len(population) < n:
        population.append(repair(_random_genes(layout, rng), scenario, layout))
    evals = [evaluator(g) for g in population]

    def report(gen: int) -> None:
        if on_generation is None:
            return
        front = _front_points(population, evals, layout)
        hv = hypervolume([(p.reliability, p.cost) for p in front], ref_cost)
        on_generation(gen, front, hv)

    report(0)
    for gen in range(1, ga.generations + 1):
        objectives = np.array([(e.reliability, e.cost) for e in evals])
        ranks, dist, _ = _rank_and_crowd(objectives)
        offspring: list[tuple[int, ...]] = []
        while len(offspring) < n:
            a = Allocation(population[tournament_select(ranks, dist, rng)])
            b = Allocation(population[tournament_select(ranks, dist, rng)])
            for child in crossover(a, b, rng, ga.crossover_rate):
                child = mutate(child, mutation_rate, rng, layout.choices)
                offspring.append(repair(child.genes, scenario, layout))
        merged = population + offspring
        merged_evals = evals + [evaluator(g) for g in offspring]
        objectives = np.array([(e.reliability, e.cost) for e in merged_evals])
        keys = [canonical(g, layout) for g in merged]
        keep = _survivors(objectives, keys, n, len(population), ref_cost)
        population = [merged[i] for i in keep]
        evals = [merged_evals[i] for i in keep]
        report(gen)
        log.debug("generation %d: %d distinct evaluations", gen, len(evaluator.cache))

    feasible = [i for i, e in enumerate(evals) if e.feasible]
    if not feasible:
        raise NoFeasibleSolution("no allocation satisfies the storage limits")
    return _front_points(
        [population[i] for i in feasible], [evals[i] for i in feasible], layout
    )
