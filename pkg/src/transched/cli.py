"""Batch command-line front end.

Subcommands take JSON documents (schemas below), run the requested solver or
structure, and write a JSON result document to ``--out`` or stdout.  All
deterministic payloads are byte-stable for a fixed input and seed; wall-clock
measurements are kept out of them (``bench`` reports timing separately on
stderr or via ``--times``).

Exit codes: 0 success, 2 malformed input, 3 state budget exceeded, 1 other
errors.  Failures emit a machine-readable ``{"error": {...}}`` object on
stderr.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass, field
from random import Random
from typing import Any, Callable, Optional, Sequence, TextIO

import jsonschema

from . import knapsack as kp
from . import mincost as mc
from .algebras import algebra_names, make_algebra
from .blockpartition import BlockArray
from .errors import BudgetExceededError, DivisibilityError, UnsupportedCombinationError
from .reservation import ReservationRequest, SlotProfile


class InputError(ValueError):
    """Malformed input document; ``path`` points at the offending field."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


# ---------------------------------------------------------------------------
# Schemas.
# ---------------------------------------------------------------------------

KNAPSACK_SCHEMA = {
    "type": "object",
    "required": ["items", "paths"],
    "additionalProperties": False,
    "properties": {
        "items": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "size", "profit"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "size": {"type": "integer", "minimum": 1},
                    "profit": {"type": "integer", "minimum": 1},
                },
            },
        },
        "paths": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "capacity"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "capacity": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}

MINCOST_SCHEMA = {
    "type": "object",
    "required": ["n", "default_costs", "providers"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "default_costs": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "providers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "cost_per_slot", "t1", "t2", "tmax"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "cost_per_slot": {"type": "integer", "minimum": 0},
                    "t1": {"type": "integer", "minimum": 0},
                    "t2": {"type": "integer", "minimum": 0},
                    "tmax": {"type": "integer", "minimum": 1},
                },
            },
        },
    },
}

BP_TRACE_SCHEMA = {
    "type": "object",
    "required": ["n", "algebra", "initial", "ops"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "algebra": {"type": "string"},
        "dirty": {"type": "boolean"},
        "initial": {"type": "array"},
        "ops": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["op"],
                "properties": {
                    "op": {
                        "enum": [
                            "range_update",
                            "point_update",
                            "range_query",
                            "point_query",
                        ]
                    },
                    "a": {"type": "integer", "minimum": 0},
                    "b": {"type": "integer", "minimum": 0},
                    "i": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}

RESERVE_ADMIT_SCHEMA = {
    "type": "object",
    "required": ["id", "amount", "earliest_start", "latest_finish", "duration"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string"},
        "amount": {"type": "integer", "minimum": 1},
        "earliest_start": {"type": "integer", "minimum": 0},
        "latest_finish": {"type": "integer", "minimum": 0},
        "duration": {"type": "integer", "minimum": 1},
    },
}

RESERVE_RELEASE_SCHEMA = {
    "type": "object",
    "required": ["release"],
    "additionalProperties": False,
    "properties": {"release": {"type": "string"}},
}


def _validate(doc: Any, schema: dict, where: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{where}: {exc.message}", path=exc.json_path) from None


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _emit(doc: Any, out: Optional[str]) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# knapsack / mincost documents.
# ---------------------------------------------------------------------------


def parse_knapsack_instance(doc: Any) -> kp.KnapsackInstance:
    _validate(doc, KNAPSACK_SCHEMA, "knapsack instance")
    try:
        return kp.KnapsackInstance(
            items=tuple(kp.Item(d["id"], d["size"], d["profit"]) for d in doc["items"]),
            paths=tuple(kp.Path(d["id"], d["capacity"]) for d in doc["paths"]),
        )
    except DivisibilityError as exc:
        raise InputError(str(exc), path="$.items") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def solution_document(instance: kp.KnapsackInstance, sol: kp.Solution) -> dict:
    assignments = [
        {"item": item, "path": sol.assignment[item], "start": sol.schedule[item]}
        for item in sorted(sol.assignment)
    ]
    rejected = sorted(it.id for it in instance.items if it.id not in sol.assignment)
    return {
        "total_profit": sol.total_profit,
        "assignments": assignments,
        "rejected": rejected,
    }


KNAPSACK_ALGOS = ("heuristic", "greedy1", "exact",
                  *(f"firstfit:{c}" for c in kp.FIRST_FIT_CRITERIA))


def run_knapsack(instance: kp.KnapsackInstance, algo: str) -> dict:
    if algo == "heuristic":
        return solution_document(instance, kp.solve_heuristic(instance))
    if algo == "greedy1":
        return solution_document(instance, kp.solve_greedy1(instance))
    if algo == "exact":
        return {"total_profit": kp.solve_exact_dp(instance)}
    if algo.startswith("firstfit:"):
        return solution_document(
            instance, kp.solve_sorted_first_fit(instance, algo.split(":", 1)[1])
        )
    raise InputError(f"unknown algorithm {algo!r}; choose from {KNAPSACK_ALGOS}")


def parse_mincost_instance(doc: Any) -> mc.MinCostInstance:
    _validate(doc, MINCOST_SCHEMA, "mincost instance")
    try:
        return mc.MinCostInstance(
            n=doc["n"],
            default_costs=tuple(doc["default_costs"]),
            providers=tuple(
                mc.Provider(d["id"], d["cost_per_slot"], d["t1"], d["t2"], d["tmax"])
                for d in doc["providers"]
            ),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def plan_document(plan: mc.CostPlan) -> dict:
    return {
        "total_cost": plan.total_cost,
        "leases": [
            {"provider": l.provider, "from": l.start, "to": l.end} for l in plan.leases
        ],
        "default_slots": list(plan.default_slots),
    }


# ---------------------------------------------------------------------------
# block-partition trace replay.
# ---------------------------------------------------------------------------


def replay_trace(doc: Any) -> dict:
    _validate(doc, BP_TRACE_SCHEMA, "trace")
    if len(doc["initial"]) != doc["n"]:
        raise InputError(
            f"initial has {len(doc['initial'])} values, expected n={doc['n']}",
            path="$.initial",
        )
    try:
        algebra = make_algebra(doc["algebra"])
    except (UnsupportedCombinationError, ValueError) as exc:
        raise InputError(str(exc), path="$.algebra") from None
    try:
        arr = BlockArray(
            doc["initial"], algebra, k=doc.get("k"), dirty_mode=doc.get("dirty", False)
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None

    results: list[Any] = []
    for pos, op in enumerate(doc["ops"]):
        where = f"$.ops[{pos}]"
        kind = op["op"]
        try:
            if kind == "point_update":
                _need(op, ("u", "i"), where)
                arr.point_update(op["u"], op["i"])
            elif kind == "range_update":
                _need(op, ("u", "a", "b"), where)
                arr.range_update(op["u"], op["a"], op["b"])
            elif kind == "point_query":
                _need(op, ("i",), where)
                results.append(arr.point_query(op["i"]))
            else:
                _need(op, ("a", "b"), where)
                results.append(arr.range_query(op["a"], op["b"]))
        except IndexError as exc:
            raise InputError(str(exc), path=where) from None
    return {"results": [list(r) if isinstance(r, tuple) else r for r in results]}


def _need(op: dict, keys: Sequence[str], where: str) -> None:
    for key in keys:
        if key not in op:
            raise InputError(f"{op['op']} needs field {key!r}", path=f"{where}.{key}")


# ---------------------------------------------------------------------------
# reservation log replay.
# ---------------------------------------------------------------------------


def replay_requests(profile: SlotProfile, lines: Sequence[str]) -> list[dict]:
    decisions: list[dict] = []
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        where = f"line {lineno}"
        try:
            entry = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{where}: not valid JSON: {exc}") from None
        if isinstance(entry, dict) and "release" in entry:
            _validate(entry, RESERVE_RELEASE_SCHEMA, where)
            try:
                profile.release(entry["release"])
            except KeyError as exc:
                raise InputError(f"{where}: {exc.args[0]}") from None
            decisions.append({"id": entry["release"], "released": True})
            continue
        _validate(entry, RESERVE_ADMIT_SCHEMA, where)
        try:
            request = ReservationRequest(
                id=entry["id"],
                amount=entry["amount"],
                earliest_start=entry["earliest_start"],
                latest_finish=entry["latest_finish"],
                duration=entry["duration"],
            )
            decision = profile.admit(request)
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from None
        decisions.append(
            {"id": decision.id, "accepted": decision.accepted, "start": decision.start}
        )
    return decisions


# ---------------------------------------------------------------------------
# benchmark harness.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchConfig:
    instances: int
    max_items: int = 12
    max_paths: int = 3
    seed: int = 0
    oracle: bool = False
    bases: tuple[int, ...] = (2, 3)
    max_size: int = 16
    max_profit: int = 100
    max_capacity: int = 40
    first_fit_criterion: str = "profit_per_size"

    def as_dict(self) -> dict:
        return {
            "instances": self.instances,
            "max_items": self.max_items,
            "max_paths": self.max_paths,
            "seed": self.seed,
            "oracle": self.oracle,
            "bases": list(self.bases),
            "max_size": self.max_size,
            "max_profit": self.max_profit,
            "max_capacity": self.max_capacity,
            "first_fit_criterion": self.first_fit_criterion,
        }


def generate_instances(config: BenchConfig) -> list[tuple[str, kp.KnapsackInstance]]:
    """Seeded random instances whose sizes are powers of one base per instance."""
    rng = Random(config.seed)
    out = []
    for idx in range(config.instances):
        base = rng.choice(config.bases)
        max_exp = 0
        while base ** (max_exp + 1) <= config.max_size:
            max_exp += 1
        n_items = rng.randint(1, config.max_items)
        items = tuple(
            kp.Item(
                id=f"f{j}",
                size=base ** rng.randint(0, max_exp),
                profit=rng.randint(1, config.max_profit),
            )
            for j in range(n_items)
        )
        paths = tuple(
            kp.Path(id=f"p{j}", capacity=rng.randint(1, config.max_capacity))
            for j in range(rng.randint(1, config.max_paths))
        )
        out.append((f"i{idx:04d}", kp.KnapsackInstance(items=items, paths=paths)))
    return out


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list[dict] = field(default_factory=list)
    times: list[dict] = field(default_factory=list)

    def summary(self) -> dict:
        algos = ["heuristic", "greedy1", "firstfit"]
        out: dict[str, Any] = {"instances": len(self.rows)}
        if not self.rows:
            return out
        out["mean_profit"] = {
            algo: statistics.mean(r["profits"][algo] for r in self.rows)
            for algo in algos
        }
        if self.config.oracle:
            rate = {}
            ratio = {}
            for algo in algos:
                hits = sum(
                    1 for r in self.rows if r["profits"][algo] == r["optimal"]
                )
                rate[algo] = hits / len(self.rows)
                ratio[algo] = statistics.mean(
                    (r["profits"][algo] / r["optimal"]) if r["optimal"] else 1.0
                    for r in self.rows
                )
            out["optimality_rate"] = rate
            out["mean_profit_ratio"] = ratio
        return out

    def payload(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "rows": self.rows,
            "summary": self.summary(),
        }

    def timing(self) -> dict:
        mean_time = {}
        if self.times:
            for algo in self.times[0]["seconds"]:
                mean_time[algo] = statistics.mean(t["seconds"][algo] for t in self.times)
        return {"rows": self.times, "mean_seconds": mean_time}


def bench(config: BenchConfig) -> BenchReport:
    """Run the solver comparison over seeded random instances.

    Profits land in the deterministic payload; wall times are collected
    apart so two runs of the same config produce identical payload bytes.
    """
    report = BenchReport(config=config)
    solvers: dict[str, Callable[[kp.KnapsackInstance], int]] = {
        "heuristic": lambda inst: kp.solve_heuristic(inst).total_profit,
        "greedy1": lambda inst: kp.solve_greedy1(inst).total_profit,
        "firstfit": lambda inst: kp.solve_sorted_first_fit(
            inst, config.first_fit_criterion
        ).total_profit,
    }
    for instance_id, instance in generate_instances(config):
        profits = {}
        seconds = {}
        for algo, solver in solvers.items():
            t0 = time.perf_counter()
            profits[algo] = solver(instance)
            seconds[algo] = time.perf_counter() - t0
        row = {"instance": instance_id, "profits": profits}
        if config.oracle:
            t0 = time.perf_counter()
            row["optimal"] = kp.solve_exact_dp(instance)
            seconds["exact"] = time.perf_counter() - t0
        report.rows.append(row)
        report.times.append({"instance": instance_id, "seconds": seconds})
    return report


# ---------------------------------------------------------------------------
# argument parsing and dispatch.
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transched", description="transfer-scheduling batch solvers"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("knapsack", help="divisible-size multiple knapsack solvers")
    p.add_argument("--algo", required=True, choices=KNAPSACK_ALGOS)
    p.add_argument("--input", required=True)
    p.add_argument("--out")

    p = sub.add_parser("mincost", help="minimum-cost provider leasing")
    p.add_argument("--input", required=True)
    p.add_argument("--out")

    p = sub.add_parser("bp", help="replay a block-partition operation trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--out")

    p = sub.add_parser("reserve", help="replay a reservation request log")
    p.add_argument("--slots", required=True, type=int)
    p.add_argument("--capacity", required=True, type=int)
    p.add_argument("--requests", required=True)
    p.add_argument("--out")

    p = sub.add_parser("bench", help="compare the knapsack solvers on random instances")
    p.add_argument("--instances", required=True, type=int)
    p.add_argument("--max-items", type=int, default=12)
    p.add_argument("--max-paths", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--out")
    p.add_argument("--times", help="write timing JSON here instead of stderr")
    return parser


def _dispatch(args: argparse.Namespace) -> None:
    if args.command == "knapsack":
        instance = parse_knapsack_instance(_load_json(args.input))
        _emit(run_knapsack(instance, args.algo), args.out)
    elif args.command == "mincost":
        instance = parse_mincost_instance(_load_json(args.input))
        _emit(plan_document(mc.solve_min_cost(instance)), args.out)
    elif args.command == "bp":
        _emit(replay_trace(_load_json(args.trace)), args.out)
    elif args.command == "reserve":
        if args.slots < 1 or args.capacity < 0:
            raise InputError("need --slots >= 1 and --capacity >= 0")
        profile = SlotProfile(n_slots=args.slots, capacity=args.capacity)
        try:
            with open(args.requests, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise InputError(f"cannot read {args.requests}: {exc}") from None
        decisions = replay_requests(profile, lines)
        text = "".join(json.dumps(d, sort_keys=True) + "\n" for d in decisions)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    elif args.command == "bench":
        config = BenchConfig(
            instances=args.instances,
            max_items=args.max_items,
            max_paths=args.max_paths,
            seed=args.seed,
            oracle=args.oracle,
        )
        report = bench(config)
        _emit(report.payload(), args.out)
        timing_text = json.dumps(report.timing(), sort_keys=True, indent=2) + "\n"
        if args.times:
            with open(args.times, "w", encoding="utf-8") as fh:
                fh.write(timing_text)
        else:
            sys.stderr.write(timing_text)


def _error_object(exc: Exception, path: Optional[str] = None) -> dict:
    return {"error": {"message": str(exc), "path": path}}


def main(argv: Optional[Sequence[str]] = None, stderr: TextIO = None) -> int:
    stderr = stderr or sys.stderr
    args = _build_parser().parse_args(argv)
    try:
        _dispatch(args)
    except InputError as exc:
        json.dump(_error_object(exc, exc.path), stderr)
        stderr.write("\n")
        return 2
    except BudgetExceededError as exc:
        json.dump(_error_object(exc), stderr)
        stderr.write("\n")
        return 3
    except Exception as exc:  # keep failures machine readable
        json.dump(_error_object(exc), stderr)
        stderr.write("\n")
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(main())
