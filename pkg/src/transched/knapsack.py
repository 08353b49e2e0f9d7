"""Maximum-profit scheduling of divisible-size transfers on capacity-limited paths.

Items have integer sizes that form a divisibility chain (every size divides
every larger size) and must be packed into paths, each available for a
limited number of time units.  This is the multiple knapsack problem
restricted to divisible item sizes.

Solvers provided:

* :func:`solve_heuristic` -- first fit by decreasing size followed by an
  improvement loop that swaps single placed items for better subsets of
  leftovers.
* :func:`solve_greedy1` -- fill one knapsack optimally at a time.
* :func:`solve_sorted_first_fit` -- classic sorted first-fit baselines.
* :func:`solve_exact_dp` -- exact multidimensional DP, intended as a
  desk-scale oracle.

All solvers are pure functions of their inputs and deterministic; instances
and solutions are safe to share across threads once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import BudgetExceededError, DivisibilityError

FIRST_FIT_CRITERIA = ("profit", "profit_per_size", "size_desc")

#: placement marker for an item that was swapped out by the improvement loop
REPLACED = -1

DEFAULT_STATE_BUDGET = 10_000_000


@dataclass(frozen=True)
class Item:
    id: str
    size: int
    profit: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"item {self.id!r}: size must be >= 1, got {self.size}")
        if self.profit < 1:
            raise ValueError(f"item {self.id!r}: profit must be >= 1, got {self.profit}")


@dataclass(frozen=True)
class Path:
    id: str
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 0:
            raise ValueError(f"path {self.id!r}: capacity must be >= 0, got {self.capacity}")


@dataclass(frozen=True)
class KnapsackInstance:
    """Items plus paths.  Validates the divisibility chain on construction."""

    items: tuple[Item, ...]
    paths: tuple[Path, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise ValueError("instance needs at least one path")
        seen: set[str] = set()
        for it in self.items:
            if it.id in seen:
                raise ValueError(f"duplicate item id {it.id!r}")
            seen.add(it.id)
        seen.clear()
        for p in self.paths:
            if p.id in seen:
                raise ValueError(f"duplicate path id {p.id!r}")
            seen.add(p.id)
        sizes = sorted({it.size for it in self.items})
        for small, big in zip(sizes, sizes[1:]):
            if big % small:
                raise DivisibilityError(
                    f"item sizes must form a divisibility chain: {small} does not divide {big}"
                )

    def item_by_id(self, item_id: str) -> Item:
        for it in self.items:
            if it.id == item_id:
                return it
        raise KeyError(item_id)


@dataclass(frozen=True)
class Solution:
    """Accepted items with their path assignment and start times.

    ``assignment`` maps item id to path id; items absent from it were
    rejected.  ``schedule`` maps each accepted item id to the start of its
    half-open transfer interval ``[start, start + size)``.
    """

    assignment: dict[str, str]
    schedule: dict[str, int]
    total_profit: int


@dataclass(frozen=True)
class ValidationReport:
    feasible: bool
    violations: tuple[str, ...]


def validate_solution(instance: KnapsackInstance, solution: Solution) -> ValidationReport:
    """Check a solution for feasibility against its instance.

    Verifies per-path capacity, interval containment and disjointness, and
    the profit arithmetic.  Violations are returned as data; nothing raises
    and nothing is mutated.
    """
    problems: list[str] = []
    items = {it.id: it for it in instance.items}
    paths = {p.id: p for p in instance.paths}

    for item_id, path_id in solution.assignment.items():
        if item_id not in items:
            problems.append(f"assignment references unknown item {item_id!r}")
        if path_id not in paths:
            problems.append(f"assignment references unknown path {path_id!r}")
    if set(solution.schedule) != set(solution.assignment):
        problems.append("schedule keys do not match assignment keys")

    per_path: dict[str, list[tuple[int, int, str]]] = {}
    for item_id, path_id in solution.assignment.items():
        if item_id not in items or path_id not in paths:
            continue
        size = items[item_id].size
        start = solution.schedule.get(item_id, 0)
        per_path.setdefault(path_id, []).append((start, start + size, item_id))

    for path_id, intervals in per_path.items():
        cap = paths[path_id].capacity
        total = sum(end - start for start, end, _ in intervals)
        if total > cap:
            problems.append(f"path {path_id!r}: assigned size {total} exceeds capacity {cap}")
        for start, end, item_id in intervals:
            if start < 0 or end > cap:
                problems.append(
                    f"item {item_id!r}: interval [{start}, {end}) outside [0, {cap}] on path {path_id!r}"
                )
        intervals.sort()
        for (s1, e1, a), (s2, e2, b) in zip(intervals, intervals[1:]):
            if s2 < e1:
                problems.append(f"items {a!r} and {b!r} overlap on path {path_id!r}")

    expected = sum(items[i].profit for i in solution.assignment if i in items)
    if solution.total_profit != expected:
        problems.append(
            f"total_profit {solution.total_profit} != sum of assigned profits {expected}"
        )
    return ValidationReport(feasible=not problems, violations=tuple(problems))


def _build_solution(
    instance: KnapsackInstance,
    paths: Sequence[Path],
    assignment: dict[str, int],
) -> Solution:
    """Turn an item-id -> path-index map into a Solution with a packed schedule.

    Accepted items are packed back to back from time 0 on each path, larger
    items first (ties: higher profit, then id) so output is deterministic.
    """
    items = {it.id: it for it in instance.items}
    by_path: dict[int, list[Item]] = {}
    for item_id, path_idx in assignment.items():
        by_path.setdefault(path_idx, []).append(items[item_id])

    out_assignment: dict[str, str] = {}
    schedule: dict[str, int] = {}
    total = 0
    for path_idx in sorted(by_path):
        path = paths[path_idx]
        placed = sorted(by_path[path_idx], key=lambda it: (-it.size, -it.profit, it.id))
        cursor = 0
        for it in placed:
            out_assignment[it.id] = path.id
            schedule[it.id] = cursor
            cursor += it.size
            total += it.profit
    return Solution(assignment=out_assignment, schedule=schedule, total_profit=total)


# ---------------------------------------------------------------------------
# Heuristic solver: first fit by decreasing group size + improvement loop.
# ---------------------------------------------------------------------------


@dataclass
class HeuristicState:
    """Mutable state of the improvement heuristic.

    Items are grouped by size (groups ordered by strictly decreasing size);
    within a group members are ordered by decreasing profit, then id.
    ``placement[g][r]`` is ``None`` while item ``(g, r)`` sits outside every
    knapsack, a path index once placed, or ``REPLACED`` after the improvement
    loop swapped it out (replaced items are never reconsidered).

    Uninserted items are kept in a per-group doubly linked list so that the
    highest-profit leftovers of each group can be walked and removed in O(1).
    """

    instance: KnapsackInstance
    paths: tuple[Path, ...]
    group_sizes: list[int]
    members: list[list[Item]]
    placement: list[list[Optional[int]]]
    remaining: list[int]
    head: list[Optional[int]]
    nxt: list[list[Optional[int]]]
    prv: list[list[Optional[int]]]
    stage_one_keys: frozenset[tuple[int, int]] = frozenset()
    stage_one_count: int = 0
    improvement_iterations: int = 0
    iteration_log: list[tuple[int, int]] = field(default_factory=list)

    def _remove_free(self, g: int, r: int) -> None:
        before, after = self.prv[g][r], self.nxt[g][r]
        if before is None:
            self.head[g] = after
        else:
            self.nxt[g][before] = after
        if after is not None:
            self.prv[g][after] = before
        self.nxt[g][r] = self.prv[g][r] = None

    def inserted(self) -> Iterator[tuple[int, int]]:
        for g, row in enumerate(self.placement):
            for r, where in enumerate(row):
                if where is not None and where >= 0:
                    yield (g, r)

    def max_inserted_size(self) -> Optional[int]:
        best = None
        for g, _ in self.inserted():
            sz = self.group_sizes[g]
            if best is None or sz > best:
                best = sz
        return best

    def to_solution(self) -> Solution:
        assignment = {
            self.members[g][r].id: where
            for g, row in enumerate(self.placement)
            for r, where in enumerate(row)
            if where is not None and where >= 0
        }
        return _build_solution(self.instance, self.paths, assignment)


@dataclass(frozen=True)
class Replacement:
    """One improvement step: drop ``replaced`` and place ``subset`` in its stead."""

    replaced: Item
    replaced_key: tuple[int, int]
    subset: tuple[Item, ...]
    subset_keys: tuple[tuple[int, int], ...]
    gain: int
    smax: int
    candidate_count: int


def stage_one(
    instance: KnapsackInstance, paths: Optional[Sequence[Path]] = None
) -> HeuristicState:
    """First-fit insertion pass.

    Items are visited by decreasing group size, within a group by decreasing
    profit, and each goes into the first path with enough remaining capacity.
    Because the sizes are divisible, the set of (group, rank) keys inserted
    here does not depend on which feasible path receives each item.
    """
    chosen_paths = tuple(paths) if paths is not None else instance.paths
    order: dict[int, list[Item]] = {}
    for it in instance.items:
        order.setdefault(it.size, []).append(it)
    group_sizes = sorted(order, reverse=True)
    members = [sorted(order[sz], key=lambda it: (-it.profit, it.id)) for sz in group_sizes]

    placement: list[list[Optional[int]]] = [[None] * len(m) for m in members]
    head: list[Optional[int]] = []
    nxt: list[list[Optional[int]]] = []
    prv: list[list[Optional[int]]] = []
    for m in members:
        count = len(m)
        head.append(0 if count else None)
        nxt.append([r + 1 if r + 1 < count else None for r in range(count)])
        prv.append([r - 1 if r > 0 else None for r in range(count)])

    state = HeuristicState(
        instance=instance,
        paths=chosen_paths,
        group_sizes=group_sizes,
        members=members,
        placement=placement,
        remaining=[p.capacity for p in chosen_paths],
        head=head,
        nxt=nxt,
        prv=prv,
    )

    inserted_keys: set[tuple[int, int]] = set()
    for g, group in enumerate(members):
        size = group_sizes[g]
        for r in range(len(group)):
            for p, left in enumerate(state.remaining):
                if left >= size:
                    state.remaining[p] = left - size
                    state.placement[g][r] = p
                    state._remove_free(g, r)
                    inserted_keys.add((g, r))
                    break
    state.stage_one_keys = frozenset(inserted_keys)
    state.stage_one_count = len(inserted_keys)
    return state


def find_best_replacement(state: HeuristicState) -> Optional[Replacement]:
    """Search for the most profitable single-item-for-subset swap.

    Gathers, per group strictly smaller than the largest placed size, the
    best still-uninserted members (at most ``smax // group_size`` of them),
    solves a 0/1 knapsack over those candidates for every capacity up to
    ``smax``, and returns the placed item whose profit is most exceeded by
    the optimal candidate subset fitting in its size.  Returns ``None`` when
    no swap has positive gain.
    """
    inserted = list(state.inserted())
    if not inserted:
        return None
    smax = max(state.group_sizes[g] for g, _ in inserted)

    cand: list[tuple[int, int]] = []
    for g in range(len(state.group_sizes) - 1, -1, -1):
        size = state.group_sizes[g]
        if size >= smax:
            break
        budget = smax // size
        r = state.head[g]
        taken = 0
        while r is not None and taken < budget:
            cand.append((g, r))
            taken += 1
            r = state.nxt[g][r]

    # 0/1 knapsack over candidates, full table kept for the backtrace.
    table = [[0] * (smax + 1)]
    for g, r in cand:
        size = state.group_sizes[g]
        profit = state.members[g][r].profit
        prev = table[-1]
        row = prev.copy()
        for cap in range(size, smax + 1):
            alt = prev[cap - size] + profit
            if alt > row[cap]:
                row[cap] = alt
        table.append(row)
    best_row = table[-1]

    best_key: Optional[tuple[int, int, int, int]] = None
    for g, r in inserted:
        gain = best_row[state.group_sizes[g]] - state.members[g][r].profit
        key = (-gain, state.members[g][r].profit, g, r)
        if best_key is None or key < best_key:
            best_key = key
    assert best_key is not None
    gain = -best_key[0]
    if gain <= 0:
        return None
    g_r, r_r = best_key[2], best_key[3]

    # Backtrace the optimal subset for the replaced item's size, preferring
    # to skip later candidates on ties so the subset is deterministic.
    subset_keys: list[tuple[int, int]] = []
    cap = state.group_sizes[g_r]
    for idx in range(len(cand), 0, -1):
        if table[idx][cap] != table[idx - 1][cap]:
            g, r = cand[idx - 1]
            subset_keys.append((g, r))
            cap -= state.group_sizes[g]
    subset_keys.reverse()

    return Replacement(
        replaced=state.members[g_r][r_r],
        replaced_key=(g_r, r_r),
        subset=tuple(state.members[g][r] for g, r in subset_keys),
        subset_keys=tuple(subset_keys),
        gain=gain,
        smax=smax,
        candidate_count=len(cand),
    )


def apply_replacement(state: HeuristicState, rep: Replacement) -> None:
    """Commit a swap: mark the loser replaced, place the subset in its path."""
    g_r, r_r = rep.replaced_key
    target = state.placement[g_r][r_r]
    assert target is not None and target >= 0, "replaced item must currently be placed"
    state.placement[g_r][r_r] = REPLACED
    for g, r in rep.subset_keys:
        state.placement[g][r] = target
        state._remove_free(g, r)
    state.improvement_iterations += 1
    state.iteration_log.append((rep.smax, rep.candidate_count))


def run_improvement(state: HeuristicState) -> HeuristicState:
    while (rep := find_best_replacement(state)) is not None:
        apply_replacement(state, rep)
    return state


def solve_heuristic(instance: KnapsackInstance) -> Solution:
    """First fit by decreasing size, then iterated single-item replacement."""
    state = stage_one(instance)
    run_improvement(state)
    return state.to_solution()


# ---------------------------------------------------------------------------
# Baselines.
# ---------------------------------------------------------------------------


def single_knapsack_fill(
    items: Sequence[Item], capacity: int
) -> tuple[set[str], int]:
    """Optimal 0/1 fill of one knapsack via a capacity-indexed DP.

    Items are processed in id order and the backtrace prefers skipping
    later items on ties, so the returned id set is deterministic.
    """
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    order = sorted(items, key=lambda it: it.id)
    table = [[0] * (capacity + 1)]
    for it in order:
        prev = table[-1]
        row = prev.copy()
        for cap in range(it.size, capacity + 1):
            alt = prev[cap - it.size] + it.profit
            if alt > row[cap]:
                row[cap] = alt
        table.append(row)

    chosen: set[str] = set()
    cap = capacity
    for idx in range(len(order), 0, -1):
        if table[idx][cap] != table[idx - 1][cap]:
            chosen.add(order[idx - 1].id)
            cap -= order[idx - 1].size
    return chosen, table[-1][capacity]


def solve_greedy1(instance: KnapsackInstance) -> Solution:
    """Fill knapsacks one at a time, each optimally against the leftovers.

    Paths are processed in decreasing capacity order (ties by id): the
    largest knapsack benefits most from an optimal fill.
    """
    order = sorted(
        range(len(instance.paths)),
        key=lambda j: (-instance.paths[j].capacity, instance.paths[j].id),
    )
    remaining = list(instance.items)
    assignment: dict[str, int] = {}
    for j in order:
        if not remaining:
            break
        chosen, _ = single_knapsack_fill(remaining, instance.paths[j].capacity)
        for item_id in chosen:
            assignment[item_id] = j
        remaining = [it for it in remaining if it.id not in chosen]
    return _build_solution(instance, instance.paths, assignment)


def solve_sorted_first_fit(instance: KnapsackInstance, criterion: str) -> Solution:
    """Sort items by a criterion, then place each in the first path that fits."""
    if criterion not in FIRST_FIT_CRITERIA:
        raise ValueError(f"criterion must be one of {FIRST_FIT_CRITERIA}, got {criterion!r}")
    if criterion == "profit":
        keyfunc = lambda it: (-it.profit, it.id)
    elif criterion == "profit_per_size":
        keyfunc = lambda it: (-Fraction(it.profit, it.size), -it.profit, it.id)
    else:  # size_desc
        keyfunc = lambda it: (-it.size, -it.profit, it.id)

    remaining = [p.capacity for p in instance.paths]
    assignment: dict[str, int] = {}
    for it in sorted(instance.items, key=keyfunc):
        for p, left in enumerate(remaining):
            if left >= it.size:
                remaining[p] = left - it.size
                assignment[it.id] = p
                break
    return _build_solution(instance, instance.paths, assignment)


# ---------------------------------------------------------------------------
# Exact oracle.
# ---------------------------------------------------------------------------


def solve_exact_dp(
    instance: KnapsackInstance, state_budget: int = DEFAULT_STATE_BUDGET
) -> int:
    """Exact optimum via a DP with one capacity axis per path.

    The state space has prod(capacity_j + 1) cells; instances above
    ``state_budget`` are refused rather than approximated.  Returns the
    optimal total profit only.
    """
    dims = tuple(p.capacity + 1 for p in instance.paths)
    states = math.prod(dims)
    if states > state_budget:
        raise BudgetExceededError(
            f"exact DP needs {states} states, over the budget of {state_budget}"
        )
    best = np.zeros(dims, dtype=np.int64)
    k = len(dims)
    for it in instance.items:
        nxt = best.copy()
        for axis in range(k):
            if dims[axis] <= it.size:
                continue
            dst = [slice(None)] * k
            src = [slice(None)] * k
            dst[axis] = slice(it.size, None)
            src[axis] = slice(0, dims[axis] - it.size)
            np.maximum(
                nxt[tuple(dst)], best[tuple(src)] + it.profit, out=nxt[tuple(dst)]
            )
        best = nxt
    return int(best[tuple(d - 1 for d in dims)])
