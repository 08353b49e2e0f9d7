"""Shared oracles and generators for the test suite.

The oracles here are deliberately primitive: exhaustive enumeration for the
knapsack, quadratic scans for segment sums, per-slot replay for reservations.
They never share code paths with the solvers they check.
"""

from __future__ import annotations

import itertools
from random import Random
from typing import Sequence

from transched import (
    BlockArray,
    Item,
    KnapsackInstance,
    MinCostInstance,
    NaiveArray,
    Path,
    Provider,
    SegTuple,
    make_algebra,
)

# ---------------------------------------------------------------------------
# knapsack
# ---------------------------------------------------------------------------


def enumerate_knapsack_optimal(instance: KnapsackInstance) -> int:
    """Try every item-to-path assignment (including rejection). n <= 8 only."""
    items, paths = instance.items, instance.paths
    assert len(items) <= 8, "enumeration oracle is exponential"
    best = 0
    for choice in itertools.product(range(len(paths) + 1), repeat=len(items)):
        loads = [0] * len(paths)
        profit = 0
        feasible = True
        for it, where in zip(items, choice):
            if where == 0:
                continue
            loads[where - 1] += it.size
            if loads[where - 1] > paths[where - 1].capacity:
                feasible = False
                break
            profit += it.profit
        if feasible and profit > best:
            best = profit
    return best


def random_divisible_instance(
    rng: Random,
    max_items: int = 12,
    max_paths: int = 3,
    bases: Sequence[int] = (2, 3),
    max_size: int = 16,
    max_profit: int = 100,
    max_capacity: int = 40,
    min_items: int = 0,
) -> KnapsackInstance:
    base = rng.choice(list(bases))
    max_exp = 0
    while base ** (max_exp + 1) <= max_size:
        max_exp += 1
    n = rng.randint(min_items, max_items)
    items = tuple(
        Item(f"f{j}", base ** rng.randint(0, max_exp), rng.randint(1, max_profit))
        for j in range(n)
    )
    paths = tuple(
        Path(f"p{j}", rng.randint(0, max_capacity))
        for j in range(rng.randint(1, max_paths))
    )
    return KnapsackInstance(items=items, paths=paths)


# ---------------------------------------------------------------------------
# mincost
# ---------------------------------------------------------------------------


def random_mincost_instance(
    rng: Random, max_n: int = 12, max_k: int = 4, max_cost: int = 9
) -> MinCostInstance:
    n = rng.randint(1, max_n)
    defaults = tuple(rng.randint(0, max_cost) for _ in range(n))
    providers = []
    for j in range(rng.randint(0, max_k)):
        t1 = rng.randint(0, n)
        t2 = rng.randint(t1, n)
        span = max(1, t2 - t1)
        tmax = rng.randint(span, span + n)
        providers.append(Provider(f"q{j}", rng.randint(0, max_cost), t1, t2, tmax))
    return MinCostInstance(n=n, default_costs=defaults, providers=tuple(providers))


# ---------------------------------------------------------------------------
# segment sums
# ---------------------------------------------------------------------------


def maxseg_quadratic(cells: Sequence[int]) -> SegTuple:
    """The four sums straight from their definitions, via all O(len^2) segments."""
    n = len(cells)
    prefix = [0]
    for cv in cells:
        prefix.append(prefix[-1] + cv)
    total = prefix[n]
    maxl = max(prefix[q] for q in range(0, n + 1))  # prefix may be empty
    maxr = max(total - prefix[q] for q in range(0, n + 1))
    best = 0
    for lo in range(n):
        for hi in range(lo, n):
            best = max(best, prefix[hi + 1] - prefix[lo])
    return SegTuple(total, maxl, maxr, best)


def check_seg_invariants(t) -> None:
    total, maxl, maxr, maxs = t[0], t[1], t[2], t[3]
    assert maxl >= 0 and maxr >= 0
    assert maxs >= maxl and maxs >= maxr
    assert total <= maxl and total <= maxr


# ---------------------------------------------------------------------------
# block-partition differential driver
# ---------------------------------------------------------------------------

# raw update parameter generator per algebra
_UPDATE_DOMAIN = {
    "sum_add": lambda rng: rng.randint(-50, 50),
    "min_add": lambda rng: rng.randint(-50, 50),
    "max_add": lambda rng: rng.randint(-50, 50),
    "product_mul": lambda rng: rng.randint(-2, 2),
    "min_mul": lambda rng: rng.randint(0, 3),  # negative factors reorder minima
    "sum_mul": lambda rng: rng.randint(-2, 2),
    "set_last_writer": lambda rng: rng.randint(-100, 100),
    "maxseg": lambda rng: rng.randint(-20, 20),
    "set_maxseg": lambda rng: rng.randint(-20, 20),
}


def random_update(rng: Random, name: str):
    if name.startswith("bit_"):
        return rng.randint(0, 1)
    return _UPDATE_DOMAIN[name](rng)


def random_initial(rng: Random, name: str):
    if name.startswith("bit_"):
        return rng.randint(0, 1)
    return rng.randint(-20, 20)


def run_differential(
    name: str,
    n: int,
    k: int,
    nops: int,
    seed: int,
    cost_bound: bool = True,
) -> int:
    """Replay one random trace on the structure (plain and dirty) and the oracle.

    Every query is compared across all three; the decoded cell views are
    compared at the end.  Returns the number of operations run.
    """
    rng = Random(seed)
    algebra = make_algebra(name)
    init = [random_initial(rng, name) for _ in range(n)]
    arr = BlockArray(init, make_algebra(name), k=k)
    dirty = BlockArray(init, make_algebra(name), k=k, dirty_mode=True)
    naive = NaiveArray(init, make_algebra(name))
    bound = 2 * k + (n + k - 1) // k + 4
    seg_like = name in ("maxseg", "set_maxseg")

    for _ in range(nops):
        a = rng.randint(0, n - 1)
        b = rng.randint(0, n - 1)
        if a > b:
            a, b = b, a
        roll = rng.random()
        if roll < 0.35 and algebra.range_updates:
            u = random_update(rng, name)
            arr.range_update(u, a, b)
            if cost_bound:
                assert arr.last_op_cost <= bound, (name, n, k, arr.last_op_cost, bound)
            dirty.range_update(u, a, b)
            naive.range_update(u, a, b)
        elif roll < 0.5:
            u = random_update(rng, name)
            i = rng.randint(0, n - 1)
            arr.point_update(u, i)
            if cost_bound:
                assert arr.last_op_cost <= bound
            dirty.point_update(u, i)
            naive.point_update(u, i)
        elif roll < 0.85:
            got = arr.range_query(a, b)
            if cost_bound:
                assert arr.last_op_cost <= bound
            got_dirty = dirty.range_query(a, b)
            want = naive.range_query(a, b)
            assert got == want, (name, n, k, a, b, got, want)
            assert got_dirty == want, (name, n, k, a, b, got_dirty, want)
            if seg_like:
                check_seg_invariants(got)
        else:
            i = rng.randint(0, n - 1)
            got = arr.point_query(i)
            got_dirty = dirty.point_query(i)
            want = naive.point_query(i)
            assert got == want, (name, n, k, i, got, want)
            assert got_dirty == want

    for i in range(n):
        want = naive.point_query(i)
        assert arr.point_query(i) == want
        assert dirty.point_query(i) == want
    if seg_like:
        for value in arr.cells:
            check_seg_invariants(value)
        for value in arr.qagg:
            if value is not None:
                check_seg_invariants(value)
    return nops


def grid_block_sizes(n: int) -> list[int]:
    import math

    ks = {1, math.isqrt(n - 1) + 1 if n > 1 else 1, n}
    return sorted(ks)
