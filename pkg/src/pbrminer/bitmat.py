"""
Vertical bit-vectors, word-level AND/popcount kernels, projected bit
regions (PBR) and the node arena used by the fused count-and-project pass.

A region is one machine word of ``width`` bits; bit ``j`` of an item's
vector is transaction ``j``. Head bit-vectors are stored *compacted*: a node
keeps only its nonzero words, aligned with its PBR index array, so
``head_words[i]`` is region ``pbr[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import TransactionDataset

WORD_DTYPES = {1: np.uint8, 8: np.uint8, 16: np.uint16, 32: np.uint32, 64: np.uint64}
INDEX_DTYPE = np.intp
MIN_ARENA = 1024


def num_words(num_transactions: int, width: int) -> int:
    return -(-num_transactions // width)


def _check_width(width: int):
    if width not in WORD_DTYPES:
        raise ValueError(f"unsupported word width {width}; choose from {sorted(WORD_DTYPES)}")


@dataclass(frozen=True)
class BitVector:
    words: np.ndarray
    num_transactions: int
    width: int = 64

    def support(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def bits(self) -> np.ndarray:
        """Unpacked 0/1 array of length ``num_transactions``."""
        if self.width == 1:
            return self.words.astype(np.uint8)
        shifts = np.arange(self.width, dtype=self.words.dtype)
        bits = (self.words[:, None] >> shifts) & 1
        return bits.reshape(-1)[: self.num_transactions].astype(np.uint8)


@dataclass(frozen=True)
class VerticalBitMatrix:
    """One bit-vector row per item; ``words`` has shape (num_items, num_words)."""

    words: np.ndarray
    num_transactions: int
    width: int = 64

    @property
    def num_items(self) -> int:
        return self.words.shape[0]

    @property
    def num_words(self) -> int:
        return self.words.shape[1]

    def row(self, item: int) -> BitVector:
        return BitVector(self.words[item], self.num_transactions, self.width)

    def supports(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)


def build_matrix(ds: TransactionDataset, width: int = 64) -> VerticalBitMatrix:
    _check_width(width)
    dtype = WORD_DTYPES[width]
    nw = num_words(ds.num_transactions, width)
    words = np.zeros((ds.num_items, nw), dtype=dtype)
    lengths = [len(t) for t in ds.transactions]
    if sum(lengths):
        items = np.fromiter((i for t in ds.transactions for i in t), dtype=np.intp,
                            count=sum(lengths))
        tids = np.repeat(np.arange(ds.num_transactions, dtype=np.intp), lengths)
        if width == 1:
            words[items, tids] = 1
        else:
            bits = (np.ones(1, dtype=dtype) << (tids % width).astype(dtype))
            # one item occurs at most once per transaction, so OR == add per word
            np.bitwise_or.at(words, (items, tids // width), bits)
    words.setflags(write=False)
    return VerticalBitMatrix(words, ds.num_transactions, width)


def _words(v) -> np.ndarray:
    return v.words if isinstance(v, BitVector) else v


def root_pbr(item) -> np.ndarray:
    """Indexes of all nonzero words of an item's vector."""
    return np.flatnonzero(_words(item)).astype(INDEX_DTYPE)


def check_pbr(pbr: np.ndarray, head_words: np.ndarray, nwords: int) -> None:
    """Raise ``AssertionError`` unless ``pbr`` is a valid region list for ``head_words``."""
    assert pbr.ndim == 1 and len(pbr) == len(head_words)
    if len(pbr):
        assert pbr[0] >= 0 and pbr[-1] < nwords
        assert np.all(np.diff(pbr) > 0)
        assert np.all(head_words != 0)


def count_and(head_words: np.ndarray, item, pbr: np.ndarray) -> int:
    """Support of head ∪ {item}: popcount of head AND item over the head's regions."""
    return int(np.bitwise_count(_words(item)[pbr] & head_words).sum())


class ArenaFull(Exception):
    """Not enough room left in the arena for a fused child allocation."""


class Projection(NamedTuple):
    words: np.ndarray
    pbr: np.ndarray
    support: int


class NodeArena:
    """
    Two heaps (words, region indexes) used as a stack.

    Allocation is LIFO and mirrors the depth-first walk: take a
    :meth:`mark` on entering a node, :meth:`release` it on leaving.

    A fixed arena raises :class:`ArenaFull` when a request does not fit. A
    growable one doubles its heaps instead; views handed out earlier keep
    the old buffers alive, so they stay valid.
    """

    def __init__(self, capacity: int, dtype=np.uint64, growable: bool = False):
        self.capacity = int(capacity)
        self.growable = growable
        self.word_heap = np.zeros(self.capacity, dtype=dtype)
        self.index_heap = np.zeros(self.capacity, dtype=INDEX_DTYPE)
        self.top = 0
        self.high_water = 0
        self.grows = 0

    @classmethod
    def for_matrix(cls, matrix: VerticalBitMatrix, capacity: int | None = None):
        """Growable arena starting at two slots per transaction, or a fixed one of ``capacity``."""
        if capacity is None:
            return cls(max(2 * matrix.num_transactions, MIN_ARENA), matrix.words.dtype,
                       growable=True)
        return cls(capacity, matrix.words.dtype)

    @property
    def remaining(self) -> int:
        return self.capacity - self.top

    def fits(self, n: int) -> bool:
        return self.growable or n <= self.capacity - self.top

    def mark(self) -> int:
        return self.top

    def release(self, mark: int) -> None:
        if not 0 <= mark <= self.top:
            raise ValueError(f"release({mark}) out of stack order (top={self.top})")
        self.top = mark

    def _grow(self, need: int):
        cap = max(2 * self.capacity, need)
        words = np.zeros(cap, dtype=self.word_heap.dtype)
        index = np.zeros(cap, dtype=INDEX_DTYPE)
        words[: self.top] = self.word_heap[: self.top]
        index[: self.top] = self.index_heap[: self.top]
        self.word_heap, self.index_heap, self.capacity = words, index, cap
        self.grows += 1

    def alloc(self, words: np.ndarray, index: np.ndarray):
        """Copy a child's words and region indexes onto the heaps; returns heap views."""
        n = len(words)
        if n > self.capacity - self.top:
            if not self.growable:
                raise ArenaFull(n)
            self._grow(self.top + n)
        lo, hi = self.top, self.top + n
        self.word_heap[lo:hi] = words
        self.index_heap[lo:hi] = index
        self.top = hi
        if hi > self.high_water:
            self.high_water = hi
        return self.word_heap[lo:hi], self.index_heap[lo:hi]


def project(head_words: np.ndarray, item, pbr: np.ndarray, arena: NodeArena) -> Projection:
    """
    Fused pass: AND head with item over ``pbr`` once, counting the support
    and writing the nonzero results and their region indexes to ``arena``.

    Raises :class:`ArenaFull` when the arena cannot take the child; callers
    then fall back to :func:`count_and` plus :func:`project_pass`.
    """
    r = _words(item)[pbr] & head_words
    nz = r != 0
    n = int(np.count_nonzero(nz))
    if not arena.fits(n):
        raise ArenaFull(n)
    words, index = arena.alloc(r[nz], pbr[nz])
    return Projection(words, index, int(np.bitwise_count(words).sum()))


def project_pass(head_words: np.ndarray, item, pbr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projection without counting, into freshly allocated arrays."""
    r = _words(item)[pbr] & head_words
    nz = r != 0
    return r[nz], pbr[nz]
