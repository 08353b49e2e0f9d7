"""Minimum-cost transfer of a sequence of unit-time files via leased providers.

File ``i`` (1-based) occupies the time interval ``[i-1, i]`` and can be sent
over a default link for ``default_costs[i-1]``, or inside an interval leased
from a provider.  A lease ``[p, j]`` from provider ``i`` costs
``(j - p) * cost_per_slot``, must contain the provider's mandatory window
``[t1, t2]``, may span at most ``tmax`` slots, and leases of different
providers must not overlap (files cannot be transferred twice).

``solve_min_cost`` runs in O(k * n) using a per-provider suffix-minimum
array over lease start points; ``solve_min_cost_quadratic`` is the O(k * n^2)
cross-check that evaluates the inner minimum directly;
``brute_force_min_cost`` is the exhaustive oracle for desk-size instances.

All functions are pure; instances may be solved from many threads at once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceededError

log = logging.getLogger(__name__)

#: infinity sentinel: larger than any reachable cost, small enough that the
#: additions performed by the recurrences cannot overflow int64
INF = 1 << 61


@dataclass(frozen=True)
class Provider:
    id: str
    cost_per_slot: int
    t1: int
    t2: int
    tmax: int

    def __post_init__(self) -> None:
        if self.cost_per_slot < 0:
            raise ValueError(f"provider {self.id!r}: cost_per_slot must be >= 0")
        if not 0 <= self.t1 <= self.t2:
            raise ValueError(f"provider {self.id!r}: need 0 <= t1 <= t2")
        if self.tmax < 1:
            raise ValueError(f"provider {self.id!r}: tmax must be >= 1")
        if self.t2 - self.t1 > self.tmax:
            raise ValueError(
                f"provider {self.id!r}: mandatory window [{self.t1}, {self.t2}] "
                f"longer than tmax={self.tmax}"
            )


@dataclass(frozen=True)
class MinCostInstance:
    n: int
    default_costs: tuple[int, ...]
    providers: tuple[Provider, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "default_costs", tuple(self.default_costs))
        object.__setattr__(self, "providers", tuple(self.providers))
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if len(self.default_costs) != self.n:
            raise ValueError(
                f"default_costs has {len(self.default_costs)} entries, expected n={self.n}"
            )
        if any(c < 0 for c in self.default_costs):
            raise ValueError("default costs must be >= 0")
        seen: set[str] = set()
        for p in self.providers:
            if p.id in seen:
                raise ValueError(f"duplicate provider id {p.id!r}")
            seen.add(p.id)


@dataclass(frozen=True)
class Lease:
    """A paid interval [start, end] of time slots covering files start+1 .. end."""

    provider: str
    start: int
    end: int


@dataclass(frozen=True)
class CostPlan:
    total_cost: int
    leases: tuple[Lease, ...]
    default_slots: tuple[int, ...]  # 1-based file indices sent via the default link


def plan_cost(instance: MinCostInstance, plan: CostPlan) -> int:
    """Recompute a plan's cost from scratch (used by tests and the CLI)."""
    providers = {p.id: p for p in instance.providers}
    total = sum(instance.default_costs[i - 1] for i in plan.default_slots)
    for lease in plan.leases:
        total += (lease.end - lease.start) * providers[lease.provider].cost_per_slot
    return total


def _usable_sorted(instance: MinCostInstance) -> list[Provider]:
    """Drop providers whose mandatory window does not fit the horizon, sort by t2."""
    usable = []
    for p in instance.providers:
        if p.t2 > instance.n:
            log.warning(
                "provider %r skipped: mandatory window end %d is past the horizon %d",
                p.id, p.t2, instance.n,
            )
        else:
            usable.append(p)
    usable.sort(key=lambda p: (p.t2, p.t1, p.id))
    return usable


def compute_minp(prev_row: Sequence[int], provider: Provider) -> list[int]:
    """Best cost of starting a lease at or after slot q, including back-pay.

    Returns ``out`` of length ``t1 + 1`` where for q in
    ``[max(0, t2 - tmax), t1]``::

        out[q] = min over q <= p <= t1 of prev_row[p] + (t1 - p) * cost

    computed backwards from the single-term base at ``q = t1``.  Entries
    below the computed span are left at :data:`INF`.  Values of ``prev_row``
    at or above :data:`INF` are treated as unreachable and propagate as INF.
    """
    t1, cost = provider.t1, provider.cost_per_slot
    if t1 >= len(prev_row):
        raise ValueError("prev_row too short for the provider's window")
    q_low = max(0, provider.t2 - provider.tmax)
    out = [INF] * (t1 + 1)
    out[t1] = min(prev_row[t1], INF)
    for q in range(t1 - 1, q_low - 1, -1):
        cand = INF if prev_row[q] >= INF else prev_row[q] + (t1 - q) * cost
        out[q] = min(out[q + 1], cand)
    return out


def _advance_row(prev: np.ndarray, prov: Provider, prefix: np.ndarray,
                 n: int) -> np.ndarray:
    """One DP row: fold provider ``prov`` into ``prev`` (both length n+1).

    Branches, cheapest wins: reuse the previous row (provider unused); send
    the current file over the default link; or end a lease from ``prov`` at
    the current slot.  The lease branch uses a vectorized suffix-minimum over
    start points; the default branch is closed over the whole row at the end
    (a running minimum of ``value - prefix``), which equals applying the
    sequential recurrence left to right.
    """
    base = prev.copy()
    t1, t2, tmax, cost = prov.t1, prov.t2, prov.tmax, prov.cost_per_slot
    j_hi = min(n, t1 + tmax)
    if t2 <= j_hi:
        starts = prev[: t1 + 1] + (t1 - np.arange(t1 + 1, dtype=np.int64)) * cost
        minp = np.minimum.accumulate(starts[::-1])[::-1]
        ends = np.arange(t2, j_hi + 1, dtype=np.int64)
        q = np.maximum(ends - tmax, 0)
        lease = (ends - t1) * cost + minp[q]
        np.minimum(base[t2 : j_hi + 1], lease, out=base[t2 : j_hi + 1])
    return prefix + np.minimum.accumulate(base - prefix)


class _RowLadder:
    """Forward DP rows with sqrt(k) checkpointing for a memory-lean backtrace."""

    def __init__(self, instance: MinCostInstance, providers: list[Provider]):
        self.providers = providers
        self.n = instance.n
        defaults = np.asarray(instance.default_costs, dtype=np.int64)
        self.prefix = np.concatenate(([0], np.cumsum(defaults, dtype=np.int64)))
        self.stride = max(1, int(len(providers) ** 0.5))
        self.checkpoints: dict[int, np.ndarray] = {0: self.prefix.copy()}
        self._cache: dict[int, np.ndarray] = {}
        cur = self.checkpoints[0]
        for i, prov in enumerate(providers, start=1):
            cur = _advance_row(cur, prov, self.prefix, self.n)
            if i % self.stride == 0 or i == len(providers):
                self.checkpoints[i] = cur
        self.final = cur

    def row(self, i: int) -> np.ndarray:
        if i in self.checkpoints:
            return self.checkpoints[i]
        if i not in self._cache:
            lo = (i // self.stride) * self.stride
            cur = self.checkpoints[lo]
            self._cache = {lo: cur}
            for t in range(lo + 1, i + 1):
                cur = _advance_row(cur, self.providers[t - 1], self.prefix, self.n)
                self._cache[t] = cur
        return self._cache[i]


def _reconstruct(
    row_of: Callable[[int], np.ndarray],
    providers: list[Provider],
    instance: MinCostInstance,
) -> CostPlan:
    """Value-based backtrace shared by the linear and quadratic solvers.

    At each cell the branches are tested in the fixed order "skip provider",
    "default link", "lease ends here"; among lease start points the largest
    (shortest lease) is taken.  Both solvers compute identical row values, so
    this yields identical plans for both.
    """
    defaults = instance.default_costs
    leases: list[Lease] = []
    default_slots: list[int] = []
    i, j = len(providers), instance.n
    row_i = row_of(i)
    while j > 0 or i > 0:
        if i == 0:
            default_slots.extend(range(j, 0, -1))
            break
        prov = providers[i - 1]
        row_prev = row_of(i - 1)
        here = int(row_i[j])
        if here == int(row_prev[j]):
            i -= 1
            row_i = row_prev
        elif j > 0 and here == int(row_i[j - 1]) + defaults[j - 1]:
            default_slots.append(j)
            j -= 1
        else:
            cost = prov.cost_per_slot
            p_lo = max(0, j - prov.tmax)
            span = row_prev[p_lo : prov.t1 + 1] + (
                prov.t1 - np.arange(p_lo, prov.t1 + 1, dtype=np.int64)
            ) * cost
            target = here - (j - prov.t1) * cost
            hits = np.nonzero(span == target)[0]
            if hits.size == 0:
                raise RuntimeError("backtrace failed to locate a lease start")
            p = p_lo + int(hits[-1])
            leases.append(Lease(provider=prov.id, start=p, end=j))
            i -= 1
            j = p
            row_i = row_prev
    default_slots.sort()
    leases.reverse()
    total = int(row_of(len(providers))[instance.n])
    return CostPlan(total_cost=total, leases=tuple(leases),
                    default_slots=tuple(default_slots))


def solve_min_cost(instance: MinCostInstance) -> CostPlan:
    """O(k * n) optimal plan.

    The no-provider base row is the running sum of default costs (with zero
    providers the only option is the default link for every file).
    """
    providers = _usable_sorted(instance)
    ladder = _RowLadder(instance, providers)
    return _reconstruct(ladder.row, providers, instance)


def solve_min_cost_quadratic(instance: MinCostInstance) -> CostPlan:
    """O(k * n^2) reference: the lease-start minimum is evaluated per cell."""
    providers = _usable_sorted(instance)
    n = instance.n
    defaults = instance.default_costs
    rows = [np.concatenate(([0], np.cumsum(np.asarray(defaults, dtype=np.int64))))]
    for prov in providers:
        prev = rows[-1]
        base = prev.copy()
        t1, t2, tmax, cost = prov.t1, prov.t2, prov.tmax, prov.cost_per_slot
        starts = prev[: t1 + 1] + (t1 - np.arange(t1 + 1, dtype=np.int64)) * cost
        for j in range(t2, min(n, t1 + tmax) + 1):
            p_lo = max(0, j - tmax)
            lease = (j - t1) * cost + int(starts[p_lo:].min())
            if lease < base[j]:
                base[j] = lease
        out = base.copy()
        for j in range(1, n + 1):  # sequential default-link recurrence
            alt = out[j - 1] + defaults[j - 1]
            if alt < out[j]:
                out[j] = alt
        rows.append(out)
    return _reconstruct(lambda i: rows[i], providers, instance)


def brute_force_min_cost(instance: MinCostInstance, max_providers: int = 5,
                         max_files: int = 14) -> int:
    """Exhaustive oracle: every provider is unused or gets one lease.

    Recursion over providers with a covered-file bitmask to reject
    overlapping leases.  Refuses instances beyond the configured bounds.
    """
    k, n = len(instance.providers), instance.n
    if k > max_providers or n > max_files:
        raise BudgetExceededError(
            f"brute force limited to {max_providers} providers / {max_files} files, "
            f"got k={k}, n={n}"
        )
    options: list[list[tuple[int, int, int]]] = []
    for prov in instance.providers:
        opts = []
        for p in range(0, prov.t1 + 1):
            for j in range(max(prov.t2, p + 1), min(n, prov.t1 + prov.tmax) + 1):
                if j - p <= prov.tmax:
                    mask = ((1 << j) - 1) ^ ((1 << p) - 1)
                    opts.append((mask, (j - p) * prov.cost_per_slot, p))
        options.append(opts)

    all_defaults = sum(instance.default_costs)
    best = all_defaults

    def covered_defaults(mask: int) -> int:
        saved = 0
        for idx in range(n):
            if mask >> idx & 1:
                saved += instance.default_costs[idx]
        return saved

    def recurse(idx: int, mask: int, lease_cost: int) -> None:
        nonlocal best
        if idx == k:
            total = lease_cost + all_defaults - covered_defaults(mask)
            if total < best:
                best = total
            return
        recurse(idx + 1, mask, lease_cost)  # provider unused
        for opt_mask, opt_cost, _ in options[idx]:
            if mask & opt_mask:
                continue
            recurse(idx + 1, mask | opt_mask, lease_cost + opt_cost)

    recurse(0, 0, 0)
    return best
