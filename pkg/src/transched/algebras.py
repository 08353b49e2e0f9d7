"""Pluggable update/query algebras for the block-partitioned array.

An :class:`Algebra` bundles:

* ``ufunc(u, x)`` -- apply an update to a stored value, or merge two pending
  updates.  Must be commutative on update pairs so deferred block updates can
  be applied in any order (for timestamped algebras this holds because every
  update carries a distinct, increasing stamp).
* ``qfunc(x, y)`` -- associative combine of two query values.
* ``mop(u, a, b)`` -- the effect of applying ``u`` to every cell of ``[a, b]``
  expressed as a value that ``ufunc`` can fold into the cached block
  aggregate.  ``None`` for point-update-only algebras.

The "uninitialized" marker is ``None``; the engine short-circuits it before
either function is called, so the functions themselves never see it.

Each catalog entry also carries *naive* semantics (direct per-cell update, and
a query computed straight from its definition).  :class:`NaiveArray` replays
operations with those, providing the differential oracle the structure is
tested against.  The naive side never touches blocks, pending aggregates or
``mop``.

Overflow note: all shipped algebras work on exact Python integers here;
``product_mul`` and the ``u**(b-a+1)`` block rule grow values fastest, and
keeping results in a bounded range is the caller's contract.
``min_mul`` additionally requires non-negative multipliers (a negative factor
would reorder minima and break the block rule).
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Callable, NamedTuple, Optional, Sequence

from .errors import UnsupportedCombinationError


class BitTuple(NamedTuple):
    """Counts of conceptual 0s and 1s in an aggregated range of bit cells."""

    cnt0: int
    cnt1: int


class TimestampedValue(NamedTuple):
    w: int
    t: int


class SegTuple(NamedTuple):
    """Range summary for maximum-sum segment queries.

    ``totalsum`` is the plain sum; ``maxlsum``/``maxrsum`` are the best
    prefix/suffix sums; ``maxsum`` the best segment sum.  The empty
    prefix/suffix/segment counts, so the last three are never negative.
    """

    totalsum: int
    maxlsum: int
    maxrsum: int
    maxsum: int


class SetSegTuple(NamedTuple):
    totalsum: int
    maxlsum: int
    maxrsum: int
    maxsum: int
    t: int


_identity = lambda v: v


@dataclass(frozen=True)
class Algebra:
    name: str
    ufunc: Callable[[Any, Any], Any]
    qfunc: Callable[[Any, Any], Any]
    mop: Optional[Callable[[Any, int, int], Any]]
    encode_cell: Callable[[Any], Any] = _identity
    # encode_update(raw) for plain algebras, encode_update(raw, stamp) for
    # timestamped ones; the structure supplies the stamp.
    encode_update: Callable[..., Any] = _identity
    decode_point: Callable[[Any], Any] = _identity
    decode_query: Callable[[Any], Any] = _identity
    timestamped: bool = False
    range_updates: bool = True
    naive_update: Callable[[Any, Any], Any] = lambda cv, u: u
    naive_query: Callable[[Sequence[Any]], Any] = lambda cells: None
    # used instead of naive_query when recency matters (set_last_writer)
    naive_query_stamped: Optional[Callable[[Sequence[Any], Sequence[int]], Any]] = None


# -- plain numeric algebras --------------------------------------------------

_add = operator.add
_mul = operator.mul


def sum_add() -> Algebra:
    """Addition updates with sum queries."""
    return Algebra(
        name="sum_add",
        ufunc=_add,
        qfunc=_add,
        mop=lambda u, a, b: u * (b - a + 1),
        naive_update=lambda cv, u: cv + u,
        naive_query=sum,
    )


def min_add() -> Algebra:
    """Addition updates with minimum queries."""
    return Algebra(
        name="min_add",
        ufunc=_add,
        qfunc=min,
        mop=lambda u, a, b: u,
        naive_update=lambda cv, u: cv + u,
        naive_query=min,
    )


def max_add() -> Algebra:
    """Addition updates with maximum queries."""
    return Algebra(
        name="max_add",
        ufunc=_add,
        qfunc=max,
        mop=lambda u, a, b: u,
        naive_update=lambda cv, u: cv + u,
        naive_query=max,
    )


def product_mul() -> Algebra:
    """Multiplication updates with product queries."""
    return Algebra(
        name="product_mul",
        ufunc=_mul,
        qfunc=_mul,
        mop=lambda u, a, b: u ** (b - a + 1),
        naive_update=lambda cv, u: cv * u,
        naive_query=lambda cells: reduce(_mul, cells, 1),
    )


def min_mul() -> Algebra:
    """Multiplication updates (factors must be >= 0) with minimum queries."""
    return Algebra(
        name="min_mul",
        ufunc=_mul,
        qfunc=min,
        mop=lambda u, a, b: u,
        naive_update=lambda cv, u: cv * u,
        naive_query=min,
    )


def sum_mul() -> Algebra:
    """Multiplication updates with sum queries."""
    return Algebra(
        name="sum_mul",
        ufunc=_mul,
        qfunc=_add,
        mop=lambda u, a, b: u,
        naive_update=lambda cv, u: cv * u,
        naive_query=sum,
    )


# -- bit algebras over (cnt0, cnt1) tuples -----------------------------------

BIT_FUNCS = ("and", "or", "xor")

_RAW_BIT = {
    "and": lambda cv, u: cv & u,
    "or": lambda cv, u: cv | u,
    "xor": lambda cv, u: cv ^ u,
}

_RAW_FOLD = {
    "and": lambda bits: int(all(bits)),
    "or": lambda bits: int(any(bits)),
    "xor": lambda bits: reduce(operator.xor, bits),
}

_DECODE_BIT = {
    "and": lambda v: int(v.cnt0 == 0),
    "or": lambda v: int(v.cnt1 > 0),
    "xor": lambda v: v.cnt1 & 1,
}


def _encode_bit(cv: Any) -> BitTuple:
    if cv not in (0, 1):
        raise ValueError(f"bit cells must be 0 or 1, got {cv!r}")
    return BitTuple(1 - cv, cv)


def _bit_apply(update_func: str) -> Callable[[BitTuple, BitTuple], BitTuple]:
    # The update parameter is itself a one-cell tuple (1-u, u), so the same
    # function serves both update-on-value and update-on-update merging.
    def apply(x: BitTuple, y: BitTuple) -> BitTuple:
        u = x.cnt1
        if update_func == "and" and u == 0:
            return BitTuple(y.cnt0 + y.cnt1, 0)
        if update_func == "or" and u == 1:
            return BitTuple(0, y.cnt0 + y.cnt1)
        if update_func == "xor" and u == 1:
            return BitTuple(y.cnt1, y.cnt0)
        return y

    return apply


def bit(update: str, query: str) -> Algebra:
    """Bit-valued cells with any of and/or/xor for updates and queries.

    Values are (cnt0, cnt1) count tuples, which makes every pairing work:
    a query only needs how many 0s and 1s the range holds, and each update
    transforms those counts directly.
    """
    if update not in BIT_FUNCS or query not in BIT_FUNCS:
        raise ValueError(f"bit functions must be in {BIT_FUNCS}")
    raw_update = _RAW_BIT[update]
    return Algebra(
        name=f"bit_{update}_{query}",
        ufunc=_bit_apply(update),
        qfunc=lambda x, y: BitTuple(x.cnt0 + y.cnt0, x.cnt1 + y.cnt1),
        mop=lambda u, a, b: u,
        encode_cell=_encode_bit,
        encode_update=_encode_bit,
        decode_point=lambda v: v.cnt1,
        decode_query=_DECODE_BIT[query],
        naive_update=raw_update,
        naive_query=_RAW_FOLD[query],
    )


# -- timestamped set algebras ------------------------------------------------


def _newer(x, y):
    # strict ">" keeps the right argument on equal stamps; stamps are only
    # equal for never-updated cells, so a fold still returns the rightmost.
    return x if x.t > y.t else y


def set_last_writer() -> Algebra:
    """Range-set updates; a point query returns the latest value written there.

    A range query is also defined: it returns the most recently written value
    in the range (rightmost initial cell if nothing was written).
    """

    def last(values: Sequence[int], stamps: Sequence[int]) -> int:
        best = 0
        for idx in range(1, len(stamps)):
            if stamps[idx] >= stamps[best]:
                best = idx
        return values[best]

    return Algebra(
        name="set_last_writer",
        ufunc=_newer,
        qfunc=_newer,
        mop=lambda u, a, b: u,
        encode_cell=lambda w: TimestampedValue(w, 0),
        encode_update=lambda w, stamp: TimestampedValue(w, stamp),
        decode_point=lambda v: v.w,
        decode_query=lambda v: v.w,
        timestamped=True,
        naive_query_stamped=last,
    )


# -- maximum-sum segment algebras --------------------------------------------


def _seg_cell(cv: int) -> SegTuple:
    if cv < 0:
        return SegTuple(cv, 0, 0, 0)
    return SegTuple(cv, cv, cv, cv)


def _seg_combine(x: SegTuple, y: SegTuple) -> SegTuple:
    return SegTuple(
        x.totalsum + y.totalsum,
        max(x.maxlsum, x.totalsum + y.maxlsum),
        max(y.maxrsum, y.totalsum + x.maxrsum),
        max(x.maxsum, y.maxsum, x.maxrsum + y.maxlsum),
    )


def _seg_scan(cells: Sequence[int]) -> SegTuple:
    """Linear-time evaluation of the four sums straight from their definitions."""
    total = 0
    maxl = 0
    prefix = 0
    for cv in cells:
        prefix += cv
        if prefix > maxl:
            maxl = prefix
    maxr = 0
    suffix = 0
    for cv in reversed(cells):
        suffix += cv
        if suffix > maxr:
            maxr = suffix
    best = 0
    run = 0
    for cv in cells:
        run += cv
        if run < 0:
            run = 0
        elif run > best:
            best = run
    for cv in cells:
        total += cv
    return SegTuple(total, maxl, maxr, best)


def maxseg() -> Algebra:
    """Point value-set updates with range maximum-sum segment queries."""
    return Algebra(
        name="maxseg",
        ufunc=lambda u, v: _seg_cell(u),
        qfunc=_seg_combine,
        mop=None,
        encode_cell=_seg_cell,
        decode_point=lambda v: v.totalsum,
        decode_query=lambda v: v,
        range_updates=False,
        naive_query=_seg_scan,
    )


def set_maxseg() -> Algebra:
    """Range-set updates with range maximum-sum segment queries.

    Cells carry a write stamp so a newer range set wins over older values.
    The block rule multiplies all four sums by the range length: the one-cell
    encoding already clamps the prefix/suffix/segment sums of a negative
    value to zero, so scaling it describes a constant run exactly.
    """

    def combine(x: SetSegTuple, y: SetSegTuple) -> SetSegTuple:
        return SetSegTuple(
            x.totalsum + y.totalsum,
            max(x.maxlsum, x.totalsum + y.maxlsum),
            max(y.maxrsum, y.totalsum + x.maxrsum),
            max(x.maxsum, y.maxsum, x.maxrsum + y.maxlsum),
            max(x.t, y.t),
        )

    def run_of(u: SetSegTuple, a: int, b: int) -> SetSegTuple:
        m = b - a + 1
        return SetSegTuple(m * u.totalsum, m * u.maxlsum, m * u.maxrsum,
                           m * u.maxsum, u.t)

    def encode(w: int, stamp: int = 0) -> SetSegTuple:
        s = _seg_cell(w)
        return SetSegTuple(s.totalsum, s.maxlsum, s.maxrsum, s.maxsum, stamp)

    return Algebra(
        name="set_maxseg",
        ufunc=_newer,
        qfunc=combine,
        mop=run_of,
        encode_cell=lambda w: encode(w, 0),
        encode_update=encode,
        decode_point=lambda v: v.totalsum,
        decode_query=lambda v: SegTuple(v.totalsum, v.maxlsum, v.maxrsum, v.maxsum),
        timestamped=True,
        naive_query=_seg_scan,
    )


# -- catalog -----------------------------------------------------------------

_REGISTRY: dict[str, Callable[[], Algebra]] = {
    "sum_add": sum_add,
    "min_add": min_add,
    "max_add": max_add,
    "product_mul": product_mul,
    "min_mul": min_mul,
    "sum_mul": sum_mul,
    "set_last_writer": set_last_writer,
    "maxseg": maxseg,
    "set_maxseg": set_maxseg,
}
for _u in BIT_FUNCS:
    for _q in BIT_FUNCS:
        _REGISTRY[f"bit_{_u}_{_q}"] = (lambda u=_u, q=_q: bit(u, q))

#: pairings with no O(1) full-block rule; requesting them is an explicit error
_UNSUPPORTED = {
    "maxseg_add": "range addition updates cannot be paired with maximum-sum "
    "segment queries: no full-block rule exists for that combination",
}


def algebra_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def make_algebra(name: str) -> Algebra:
    if name in _UNSUPPORTED:
        raise UnsupportedCombinationError(_UNSUPPORTED[name])
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown algebra {name!r}; available: {', '.join(algebra_names())}"
        ) from None
    return factory()


# -- naive differential oracle -----------------------------------------------


class NaiveArray:
    """Cell-by-cell replay of the same operations, straight from definitions.

    Updates touch every cell of their range individually; queries are computed
    directly on the conceptual values (no blocks, no pending aggregates).  A
    write counter mirrors the structure's timestamps so recency-based queries
    agree on ties.
    """

    def __init__(self, values: Sequence[Any], algebra: Algebra):
        self.algebra = algebra
        self.cells = list(values)
        self.stamps = [0] * len(self.cells)
        self._writes = 0

    def point_update(self, u: Any, i: int) -> None:
        self._writes += 1
        self.cells[i] = self.algebra.naive_update(self.cells[i], u)
        self.stamps[i] = self._writes

    def range_update(self, u: Any, a: int, b: int) -> None:
        self._writes += 1
        for p in range(a, b + 1):
            self.cells[p] = self.algebra.naive_update(self.cells[p], u)
            self.stamps[p] = self._writes

    def point_query(self, i: int) -> Any:
        return self.cells[i]

    def range_query(self, a: int, b: int) -> Any:
        if self.algebra.naive_query_stamped is not None:
            return self.algebra.naive_query_stamped(
                self.cells[a : b + 1], self.stamps[a : b + 1]
            )
        return self.algebra.naive_query(self.cells[a : b + 1])
