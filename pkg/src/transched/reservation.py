"""Online admission of time-slotted bandwidth reservations.

A :class:`SlotProfile` tracks per-slot usage in a block-partitioned array
with range-add updates and range-max queries, so checking a candidate window
costs O(sqrt(n)) instead of O(window).  Requests are admitted at the earliest
feasible start inside their window, or rejected without touching any state.

One profile is single-writer; serialize a request log before feeding it in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .algebras import make_algebra
from .blockpartition import BlockArray


@dataclass(frozen=True)
class ReservationRequest:
    id: str
    amount: int
    earliest_start: int
    latest_finish: int
    duration: int

    def __post_init__(self) -> None:
        if self.amount < 1:
            raise ValueError(f"request {self.id!r}: amount must be >= 1")
        if self.duration < 1:
            raise ValueError(f"request {self.id!r}: duration must be >= 1")
        if self.earliest_start < 0:
            raise ValueError(f"request {self.id!r}: earliest_start must be >= 0")
        if self.earliest_start + self.duration > self.latest_finish:
            raise ValueError(
                f"request {self.id!r}: window [{self.earliest_start}, {self.latest_finish}) "
                f"cannot hold duration {self.duration}"
            )


@dataclass(frozen=True)
class Decision:
    id: str
    accepted: bool
    start: Optional[int]


class SlotProfile:
    """Per-slot usage ledger with capacity-checked admission."""

    def __init__(self, n_slots: int, capacity: int):
        if n_slots < 1:
            raise ValueError("n_slots must be >= 1")
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.n_slots = n_slots
        self.capacity = capacity
        self.usage = BlockArray([0] * n_slots, make_algebra("max_add"))
        self.active: dict[str, tuple[int, int, int]] = {}  # id -> (start, duration, amount)

    def admit(self, request: ReservationRequest) -> Decision:
        """Accept at the earliest start whose window stays under capacity.

        A malformed request (window past the horizon, duplicate id) raises;
        an unsatisfiable one is rejected with the profile untouched.
        """
        if request.latest_finish > self.n_slots:
            raise ValueError(
                f"request {request.id!r}: latest_finish {request.latest_finish} "
                f"exceeds the horizon {self.n_slots}"
            )
        if request.id in self.active:
            raise ValueError(f"request id {request.id!r} is already active")
        for start in range(request.earliest_start,
                           request.latest_finish - request.duration + 1):
            peak = self.usage.range_query_pure(start, start + request.duration - 1)
            if peak + request.amount <= self.capacity:
                self.usage.range_update(request.amount, start,
                                        start + request.duration - 1)
                self.active[request.id] = (start, request.duration, request.amount)
                return Decision(id=request.id, accepted=True, start=start)
        return Decision(id=request.id, accepted=False, start=None)

    def release(self, reservation_id: str) -> None:
        """Return a reservation's amount to the pool; unknown or repeated ids raise."""
        try:
            start, duration, amount = self.active.pop(reservation_id)
        except KeyError:
            raise KeyError(
                f"unknown or already released reservation {reservation_id!r}"
            ) from None
        self.usage.range_update(-amount, start, start + duration - 1)

    def usage_query(self, a: int, b: int) -> int:
        """Maximum usage over slots [a, b]."""
        return self.usage.range_query_pure(a, b)
