"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 infeasible, 4 refused by the
enumeration ceiling, 5 simulation disagrees with the closed form (|z| > 5).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .costs import cost_breakdown
from .model import ConfigurationError, RedundancyMap, Requirement, StorageMode, TeamScenario
from .optimize import (
    Allocation,
    GAConfig,
    NoFeasibleSolution,
    ParetoPoint,
    SearchSpaceTooLarge,
    SlotLayout,
    decode,
    exhaustive_enumerate,
    nsga2_optimize,
    search_space_size,
)
from .optimize.chromosome import is_feasible, storage_of
from .optimize.enumeration import default_ceiling
from .reliability import (
    Capability,
    capability_reliability,
    robot_reliabilities,
    team_reliability,
    team_reliability_own_storage,
)
from .scenario_io import ScenarioFileError, load_scenario
from .simulation import SimConfig, estimate_reliability

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_CEILING, EXIT_DISAGREE = 0, 2, 3, 4, 5
CSV_HEADER = ("reliability", "cost", "genes")


class InputError(Exception):
    pass


class Infeasible(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.9f}"


def parse_allocation(spec: str | None, scenario: TeamScenario) -> Allocation:
    """Inline ``"1,0,13"`` / ``"1 0 13"``, a JSON list, or a path to either."""
    n = len(SlotLayout(scenario))
    if spec is None:
        return Allocation([0] * n)
    text = spec
    path = Path(spec)
    if path.exists():
        text = path.read_text()
    text = text.strip()
    try:
        if text.startswith("["):
            genes = [int(g) for g in json.loads(text)]
        else:
            genes = [int(g) for g in text.replace(",", " ").split()]
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"allocation: cannot parse {spec!r}") from exc
    if len(genes) != n:
        raise InputError(f"allocation: {len(genes)} genes given, scenario has {n} free slots")
    return Allocation(genes)


def _redundancy(scenario: TeamScenario, allocation: Allocation) -> RedundancyMap:
    try:
        redundancy = decode(allocation, scenario)
    except ConfigurationError as exc:
        raise InputError(f"allocation: {exc}") from exc
    if not is_feasible(allocation.genes, scenario, SlotLayout(scenario)):
        raise Infeasible("allocation breaks a per-type storage limit")
    return redundancy


def write_front(points: Sequence[ParetoPoint], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in sorted(points, key=lambda p: (-p.reliability, p.cost, p.allocation.genes)):
        writer.writerow([fmt(p.reliability), fmt(p.cost), " ".join(map(str, p.allocation.genes))])


def read_front(path_or_text) -> list[tuple[float, float, tuple[int, ...]]]:
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        (float(r["reliability"]), float(r["cost"]), tuple(int(g) for g in r["genes"].split()))
        for r in rows
    ]


def _emit_front(points: Sequence[ParetoPoint], out: str | None) -> None:
    buf = io.StringIO()
    write_front(points, buf)
    if out is None or out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())


def cmd_evaluate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    t = scenario.horizon if args.time is None else args.time
    allocation = parse_allocation(args.allocation, scenario)
    redundancy = _redundancy(scenario, allocation)
    lines = [f"time_months {fmt(t)}", f"storage {scenario.storage.value}"]
    lines.append(f"objective_reliability {fmt(team_reliability(scenario, redundancy, t))}")
    for kind in ("full", "minimal"):
        value = team_reliability(scenario, redundancy, t, Requirement(kind))
        lines.append(f"reliability_{kind} {fmt(value)}")
    if scenario.requirement.kind == "partial":
        lines.append(f"reliability_partial {fmt(team_reliability(scenario, redundancy, t))}")
    own = team_reliability_own_storage(scenario, storage_of(allocation, scenario), t)
    lines.append(f"reliability_own_storage {fmt(own)}")
    modules = scenario.modules
    for (j, bp), r in zip(scenario.instances(), robot_reliabilities(scenario, redundancy, t)):
        lines.append(f"robot {j + 1} type {bp.type_index} reliability {fmt(r)}")
        for cap in Capability:
            try:
                value = fmt(capability_reliability(bp, redundancy, modules, t, cap, robot=j))
            except ConfigurationError:
                value = "role absent"
            lines.append(f"robot {j + 1} capability {cap.value} {value}")
    costs = cost_breakdown(scenario, redundancy)
    lines.append(f"cost_acquisition {fmt(costs.acquisition)}")
    lines.append(f"cost_cm_rate {fmt(costs.cm_rate)}")
    lines.append(f"cost_continuous_literal {fmt(costs.continuous_rate)}")
    for i, (n, subtotal) in costs.per_module.items():
        lines.append(f"module {i} count {n} subtotal {fmt(subtotal)}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    ga = GAConfig(
        population_size=args.pop,
        generations=args.gens,
        rng_seed=args.seed,
        mutation_rate=args.mutation,
        crossover_rate=args.crossover,
    )
    try:
        front = nsga2_optimize(scenario, ga, args.time)
    except NoFeasibleSolution as exc:
        raise Infeasible(str(exc)) from exc
    _emit_front(front, args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    t = scenario.horizon if args.time is None else args.time
    allocation = parse_allocation(args.allocation, scenario)
    redundancy = _redundancy(scenario, allocation)
    mode = StorageMode(args.storage) if args.storage else scenario.storage
    sim = SimConfig(trials=args.trials, rng_seed=args.seed, horizon=t, storage_mode=mode)
    est, se = estimate_reliability(scenario, redundancy, sim)
    if mode is StorageMode.PER_ROBOT:
        analytic = team_reliability_own_storage(scenario, storage_of(allocation, scenario), t)
    else:
        analytic = team_reliability(scenario, RedundancyMap.from_storage(
            scenario, redundancy.stored, pooled=True), t)
    if se > 0:
        z = (est - analytic) / se
    else:
        z = 0.0 if math.isclose(est, analytic, abs_tol=1e-12) else math.inf
    print(f"time_months {fmt(t)}")
    print(f"storage {mode.value}")
    print(f"trials {args.trials}")
    print(f"estimate {fmt(est)}")
    print(f"std_error {fmt(se)}")
    print(f"analytic {fmt(analytic)}")
    print(f"z_score {fmt(z)}")
    return EXIT_DISAGREE if abs(z) > 5 else EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    ceiling = default_ceiling() if args.ceiling is None else int(args.ceiling)
    size = search_space_size(scenario)
    print(f"search_space {size}", file=sys.stderr if args.out in (None, "-") else sys.stdout)
    try:
        front = exhaustive_enumerate(scenario, ceiling, args.time)
    except SearchSpaceTooLarge:
        print(f"refused: search space {size} exceeds ceiling {ceiling}", file=sys.stderr)
        return EXIT_CEILING
    _emit_front(front, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfmaint",
        description="Reliability, maintenance cost and spare allocation for self-maintaining robot teams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", help="scenario JSON file, or 'paper_example'")
        p.add_argument("--time", type=float, default=None, help="mission time in months")

    p = sub.add_parser("evaluate", help="reliability and cost of one allocation")
    common(p)
    p.add_argument("--allocation", help="genes inline ('1,0,13') or a file path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="NSGA-II Pareto front as CSV")
    common(p)
    p.add_argument("--pop", type=int, default=100, help="population size (even, >= 4)")
    p.add_argument("--gens", type=int, default=200, help="number of generations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutation", type=float, default=None, help="per-gene rate (default 1/genes)")
    p.add_argument("--crossover", type=float, default=0.9, help="uniform crossover probability")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate next to the closed form")
    common(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allocation", help="genes inline ('1,0,13') or a file path")
    p.add_argument("--storage", choices=[m.value for m in StorageMode],
                   help="override the scenario's storage mode")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", help="exact Pareto front by enumeration")
    common(p)
    p.add_argument("--ceiling", type=float, default=None,
                   help="largest search space to enumerate (default 1e7 or $SELFMAINT_ENUM_CEILING)")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioFileError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
