"""Block-partitioned (sqrt-decomposition) array with pluggable algebras.

The ``n`` cells are split into contiguous blocks of ``k`` cells (the last
block may be shorter), so a range update or query costs O(k + n/k): the two
edge blocks are handled cell by cell, every fully covered inner block in
O(1) through two per-block aggregates:

* ``uagg[B]`` -- the pending merge of updates that covered all of block B.
  Reset to uninitialized whenever the block is touched partially.
* ``qagg[B]`` -- the cached query value over B's cells *including* the
  pending ``uagg``.

With the optional dirty flag, partial and point updates only mark the block
and the cached query value is rebuilt lazily on the next full-block query.

A :class:`BlockArray` is single-writer.  Once fully materialized it may be
read concurrently; instances can be handed between threads.

``SumAddFastArray`` is a vectorized specialization of the same layout for
integer addition updates with sum queries, for traces where the generic
callable-per-cell engine is too slow.
"""

from __future__ import annotations

import math
from typing import Any, Optional, Sequence

import numpy as np

from .algebras import Algebra

__all__ = ["BlockArray", "SumAddFastArray"]


class BlockArray:
    """Generic sqrt-decomposition array over an :class:`~transched.algebras.Algebra`."""

    def __init__(
        self,
        values: Sequence[Any],
        algebra: Algebra,
        k: Optional[int] = None,
        dirty_mode: bool = False,
    ):
        values = list(values)
        self.n = len(values)
        if self.n == 0:
            raise ValueError("values must be non-empty")
        if k is None:
            k = math.isqrt(self.n - 1) + 1  # ceil(sqrt(n))
        if not 1 <= k <= self.n:
            raise ValueError(f"block size must satisfy 1 <= k <= n, got k={k}, n={self.n}")
        self.k = k
        self.algebra = algebra
        self.dirty_mode = dirty_mode
        self._stamp = 0
        self._op_cell_blocks: dict[int, int] = {}
        self._op_blocks = 0
        self.cells = [algebra.encode_cell(v) for v in values]
        nblocks = (self.n + k - 1) // k
        self.left = [b * k for b in range(nblocks)]
        self.right = [min(self.n, (b + 1) * k) - 1 for b in range(nblocks)]
        self.uagg: list[Any] = [None] * nblocks
        self.qagg = [
            self.range_query_points(self.left[b], self.right[b]) for b in range(nblocks)
        ]
        self.dirty = [False] * nblocks

    # -- plumbing ------------------------------------------------------------

    @property
    def num_blocks(self) -> int:
        return len(self.left)

    def timestamp(self) -> int:
        """Strictly increasing stamps; initial cells share the genesis stamp 0."""
        self._stamp += 1
        return self._stamp

    def _prepare_update(self, u: Any) -> Any:
        if self.algebra.timestamped:
            return self.algebra.encode_update(u, self.timestamp())
        return self.algebra.encode_update(u)

    def _ufunc(self, x: Any, y: Any) -> Any:
        if x is None:
            return y
        if y is None:
            return x
        return self.algebra.ufunc(x, y)

    def _qfunc(self, x: Any, y: Any) -> Any:
        if x is None:
            return y
        if y is None:
            return x
        return self.algebra.qfunc(x, y)

    def _block_of(self, i: int) -> int:
        return i // self.k

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"cell index {i} out of range [0, {self.n})")

    def _check_range(self, a: int, b: int) -> None:
        if not 0 <= a <= b < self.n:
            raise IndexError(f"range [{a}, {b}] invalid for {self.n} cells")

    # touched-work accounting: cells of a block count once per public
    # operation no matter how often the block's cells are revisited
    def _reset_cost(self) -> None:
        self._op_cell_blocks = {}
        self._op_blocks = 0

    def _touch_cells(self, block: int, count: int) -> None:
        prev = self._op_cell_blocks.get(block, 0)
        if count > prev:
            self._op_cell_blocks[block] = count

    @property
    def last_op_cost(self) -> int:
        """Touched cells + O(1) block visits of the most recent public op."""
        return sum(self._op_cell_blocks.values()) + self._op_blocks

    def _materialize(self, block: int) -> None:
        """Push a pending whole-block update into the cells."""
        pending = self.uagg[block]
        if pending is None:
            return
        lo, hi = self.left[block], self.right[block]
        self._touch_cells(block, hi - lo + 1)
        cells = self.cells
        ufunc = self.algebra.ufunc
        for p in range(lo, hi + 1):
            cells[p] = ufunc(pending, cells[p])
        self.uagg[block] = None

    def _refold(self, block: int) -> None:
        self._touch_cells(block, self.right[block] - self.left[block] + 1)
        self.qagg[block] = self.range_query_points(self.left[block], self.right[block])

    # -- cell-level routines ---------------------------------------------------

    def range_update_points(self, u: Any, a: int, b: int) -> None:
        """Apply an (already encoded) update to each cell of [a, b].

        Low-level: block aggregates are left to the caller.  ``a > b`` is a
        no-op; the range must not cross a block boundary.
        """
        if a > b:
            return
        self._check_range(a, b)
        if self._block_of(a) != self._block_of(b):
            raise IndexError(f"[{a}, {b}] crosses a block boundary")
        if u is None:
            return
        self._touch_cells(self._block_of(a), b - a + 1)
        cells = self.cells
        ufunc = self.algebra.ufunc
        for p in range(a, b + 1):
            cells[p] = ufunc(u, cells[p])

    def range_query_points(self, a: int, b: int) -> Any:
        """Fold the raw cells of [a, b]; an empty range yields uninitialized."""
        if a > b:
            return None
        self._check_range(a, b)
        if self._block_of(a) != self._block_of(b):
            raise IndexError(f"[{a}, {b}] crosses a block boundary")
        self._touch_cells(self._block_of(a), b - a + 1)
        cells = self.cells
        out = cells[a]
        qfunc = self.algebra.qfunc
        for p in range(a + 1, b + 1):
            out = qfunc(out, cells[p])
        return out

    # -- block-level routines --------------------------------------------------

    def range_update_partial_block(self, block: int, u: Any, a: int, b: int) -> None:
        if self.dirty_mode:
            self.range_update_points(u, a, b)
            self.dirty[block] = True
            return
        self._materialize(block)
        self.range_update_points(u, a, b)
        self._refold(block)

    def range_update_full_block(self, block: int, u: Any) -> None:
        self._op_blocks += 1
        self.uagg[block] = self._ufunc(u, self.uagg[block])
        assert self.algebra.mop is not None
        grown = self.algebra.mop(u, self.left[block], self.right[block])
        self.qagg[block] = self._ufunc(grown, self.qagg[block])

    def range_query_partial_block(self, block: int, a: int, b: int) -> Any:
        self._materialize(block)
        return self.range_query_points(a, b)

    def range_query_full_block(self, block: int) -> Any:
        self._op_blocks += 1
        if self.dirty_mode and self.dirty[block]:
            self._materialize(block)
            self._refold(block)
            self.dirty[block] = False
        return self.qagg[block]

    # -- public operations -------------------------------------------------------

    def point_update(self, u: Any, i: int) -> None:
        self._check_index(i)
        self._reset_cost()
        u = self._prepare_update(u)
        block = self._block_of(i)
        if self.dirty_mode:
            self._touch_cells(block, 1)
            self.cells[i] = self._ufunc(u, self.cells[i])
            self.dirty[block] = True
            return
        # A pending whole-block update must reach the cells first, otherwise
        # the refreshed block aggregate would silently drop it.
        self._materialize(block)
        self._touch_cells(block, 1)
        self.cells[i] = self._ufunc(u, self.cells[i])
        self._refold(block)

    def point_query(self, i: int) -> Any:
        self._check_index(i)
        self._reset_cost()
        block = self._block_of(i)
        self._touch_cells(block, 1)
        self._op_blocks += 1
        return self.algebra.decode_point(self._ufunc(self.uagg[block], self.cells[i]))

    def range_update(self, u: Any, a: int, b: int) -> None:
        self._check_range(a, b)
        if not self.algebra.range_updates:
            raise UnsupportedOperation(
                f"algebra {self.algebra.name!r} supports point updates only"
            )
        self._reset_cost()
        u = self._prepare_update(u)
        ba, bb = self._block_of(a), self._block_of(b)
        if ba == bb:
            if a == self.left[ba] and b == self.right[ba]:
                self.range_update_full_block(ba, u)
            else:
                self.range_update_partial_block(ba, u, a, b)
            return
        self.range_update_partial_block(ba, u, a, self.right[ba])
        self.range_update_partial_block(bb, u, self.left[bb], b)
        for block in range(ba + 1, bb):
            self.range_update_full_block(block, u)

    def range_query(self, a: int, b: int) -> Any:
        self._check_range(a, b)
        self._reset_cost()
        ba, bb = self._block_of(a), self._block_of(b)
        if ba == bb:
            return self.algebra.decode_query(self.range_query_partial_block(ba, a, b))
        qa = self.range_query_partial_block(ba, a, self.right[ba])
        qb = self.range_query_partial_block(bb, self.left[bb], b)
        q = None
        for block in range(ba + 1, bb):
            q = self._qfunc(q, self.range_query_full_block(block))
        return self.algebra.decode_query(self._qfunc(qa, self._qfunc(q, qb)))

    def range_query_pure(self, a: int, b: int) -> Any:
        """Like :meth:`range_query` but without lazy pushes: no state changes."""
        self._check_range(a, b)
        self._reset_cost()
        ba, bb = self._block_of(a), self._block_of(b)

        def fold_cells(block: int, lo: int, hi: int) -> Any:
            self._touch_cells(block, hi - lo + 1)
            pending = self.uagg[block]
            out = None
            for p in range(lo, hi + 1):
                out = self._qfunc(out, self._ufunc(pending, self.cells[p]))
            return out

        def block_value(block: int) -> Any:
            self._op_blocks += 1
            if self.dirty_mode and self.dirty[block]:
                return fold_cells(block, self.left[block], self.right[block])
            return self.qagg[block]

        if ba == bb:
            return self.algebra.decode_query(fold_cells(ba, a, b))
        q = fold_cells(ba, a, self.right[ba])
        for block in range(ba + 1, bb):
            q = self._qfunc(q, block_value(block))
        q = self._qfunc(q, fold_cells(bb, self.left[bb], b))
        return self.algebra.decode_query(q)

    def snapshot(self) -> list[Any]:
        """Decoded per-cell view; does not mutate."""
        return [self.point_query(i) for i in range(self.n)]


class UnsupportedOperation(RuntimeError):
    """Operation not available for the structure's algebra."""


class SumAddFastArray:
    """Vectorized block-partitioned array for addition updates / sum queries.

    Same block layout and the same O(k + n/k) operation shape as
    :class:`BlockArray` with the ``sum_add`` algebra, but cells and block
    aggregates live in int64 numpy arrays and every step is a slice
    operation.  Because addition commutes, a partial update never needs to
    materialize the pending block value: cells exclude ``uagg`` while
    ``qagg`` always includes it.

    Values are int64; keeping sums in range is the caller's contract.
    """

    def __init__(self, values: Sequence[int], k: Optional[int] = None):
        self.n = len(values)
        if self.n == 0:
            raise ValueError("values must be non-empty")
        if k is None:
            k = math.isqrt(self.n - 1) + 1
        if not 1 <= k <= self.n:
            raise ValueError(f"block size must satisfy 1 <= k <= n, got k={k}, n={self.n}")
        self.k = k
        self.cells = np.asarray(values, dtype=np.int64).copy()
        nblocks = (self.n + k - 1) // k
        self.left = np.arange(nblocks, dtype=np.int64) * k
        self.right = np.minimum(self.left + k, self.n) - 1
        self.sizes = self.right - self.left + 1
        self.uagg = np.zeros(nblocks, dtype=np.int64)
        self.qagg = np.add.reduceat(self.cells, self.left)
        self._op_cells = 0
        self._op_blocks = 0

    @property
    def num_blocks(self) -> int:
        return len(self.left)

    @property
    def last_op_cost(self) -> int:
        return self._op_cells + self._op_blocks

    def _check_range(self, a: int, b: int) -> None:
        if not 0 <= a <= b < self.n:
            raise IndexError(f"range [{a}, {b}] invalid for {self.n} cells")

    def point_update(self, u: int, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"cell index {i} out of range [0, {self.n})")
        self._op_cells, self._op_blocks = 1, 1
        self.cells[i] += u
        self.qagg[i // self.k] += u

    def point_query(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"cell index {i} out of range [0, {self.n})")
        self._op_cells, self._op_blocks = 1, 1
        return int(self.cells[i] + self.uagg[i // self.k])

    def range_update(self, u: int, a: int, b: int) -> None:
        self._check_range(a, b)
        self._op_cells = self._op_blocks = 0
        k = self.k
        ba, bb = a // k, b // k
        if ba == bb:
            if a == self.left[ba] and b == self.right[ba]:
                self.uagg[ba] += u
                self.qagg[ba] += u * (b - a + 1)
                self._op_blocks = 1
            else:
                self.cells[a : b + 1] += u
                self.qagg[ba] += u * (b - a + 1)
                self._op_cells = b - a + 1
            return
        lo_edge = int(self.right[ba])
        hi_edge = int(self.left[bb])
        self.cells[a : lo_edge + 1] += u
        self.qagg[ba] += u * (lo_edge - a + 1)
        self.cells[hi_edge : b + 1] += u
        self.qagg[bb] += u * (b - hi_edge + 1)
        self._op_cells = (lo_edge - a + 1) + (b - hi_edge + 1)
        if bb - ba > 1:
            # inner blocks all have exactly k cells: the (possibly short)
            # last block is block bb at the innermost, never strictly inside
            self.uagg[ba + 1 : bb] += u
            self.qagg[ba + 1 : bb] += u * k
            self._op_blocks = bb - ba - 1

    def range_query(self, a: int, b: int) -> int:
        self._check_range(a, b)
        self._op_cells = self._op_blocks = 0
        k = self.k
        ba, bb = a // k, b // k
        if ba == bb:
            self._op_cells = b - a + 1
            return int(self.cells[a : b + 1].sum() + self.uagg[ba] * (b - a + 1))
        lo_edge = int(self.right[ba])
        hi_edge = int(self.left[bb])
        total = int(self.cells[a : lo_edge + 1].sum()) + int(self.uagg[ba]) * (
            lo_edge - a + 1
        )
        total += int(self.cells[hi_edge : b + 1].sum()) + int(self.uagg[bb]) * (
            b - hi_edge + 1
        )
        self._op_cells = (lo_edge - a + 1) + (b - hi_edge + 1)
        if bb - ba > 1:
            total += int(self.qagg[ba + 1 : bb].sum())
            self._op_blocks = bb - ba - 1
        return total

    def snapshot(self) -> list[int]:
        out = self.cells + np.repeat(self.uagg, self.sizes)
        return [int(v) for v in out]
