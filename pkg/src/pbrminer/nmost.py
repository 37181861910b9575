"""
N-most interesting itemsets: for every length k in 1..kmax, all k-itemsets
whose support reaches that of the N-th most frequent k-itemset.

No minimum support is given; per-length thresholds start at zero and rise
as the collector fills.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .bitmat import NodeArena, build_matrix
from .dataset import TransactionDataset, item_supports, remap_for_density
from .search import (Counters, Itemset, SearchContext, SearchNode, build_pair_table,
                     normalize_order)


class TopList:
    """
    Bounded best-``capacity`` list that keeps ties at the boundary.

    ``threshold`` is 0 until ``capacity`` entries have been seen, then the
    ``capacity``-th largest support seen so far; entries below it are
    evicted. Offers below the threshold are ignored.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.threshold = 0
        self._top: list[int] = []
        self._buckets: dict[int, list] = {}
        self._keys: list[int] = []

    def __len__(self):
        return sum(len(b) for b in self._buckets.values())

    def offer(self, itemset, support: int) -> bool:
        """Insert; returns True when the threshold rose."""
        if support < self.threshold or support < 1:
            return False
        bucket = self._buckets.get(support)
        if bucket is None:
            bucket = self._buckets[support] = []
            heapq.heappush(self._keys, support)
        bucket.append(itemset)
        top = self._top
        if len(top) < self.capacity:
            heapq.heappush(top, support)
        elif support > top[0]:
            heapq.heapreplace(top, support)
        if len(top) == self.capacity and top[0] > self.threshold:
            self.threshold = top[0]
            self._evict()
            return True
        return False

    def raise_to(self, value: int) -> bool:
        """Raise the threshold from outside knowledge (it never drops)."""
        if value <= self.threshold:
            return False
        self.threshold = value
        self._evict()
        return True

    def _evict(self):
        keys = self._keys
        while keys and keys[0] < self.threshold:
            del self._buckets[heapq.heappop(keys)]

    def bucket(self, support: int) -> list:
        return self._buckets.get(support, [])

    def entries(self) -> list[tuple]:
        return [(it, s) for s, b in self._buckets.items() for it in b]


class ThresholdVector:
    """Per-length thresholds ``xi_k`` (k = 1..kmax) and their running minimum ``xi``."""

    def __init__(self, kmax: int):
        self.kmax = kmax
        self.xi_k = [0] * (kmax + 1)   # slot 0 unused
        self.history: list[tuple[int, int, int]] = []

    @property
    def xi(self) -> int:
        return min(self.xi_k[1:])

    def __getitem__(self, k: int) -> int:
        return self.xi_k[k]

    def set(self, k: int, value: int):
        if value < self.xi_k[k]:
            raise ValueError(f"threshold for length {k} cannot drop ({self.xi_k[k]} -> {value})")
        if value != self.xi_k[k]:
            self.xi_k[k] = value
            self.history.append((k, value, self.xi))


def effective_bound(depth: int, tv, kmax: int) -> int:
    """
    Weakest threshold any itemset below a node of head length ``depth`` must
    meet: min of ``xi_j`` over j in depth+1..kmax.

    ``tv`` is a :class:`ThresholdVector` or a plain sequence ``(xi_1, xi_2, ...)``.
    """
    if depth >= kmax:
        raise ValueError("depth must be below kmax")
    if isinstance(tv, ThresholdVector):
        return min(tv.xi_k[depth + 1: kmax + 1])
    return min(tv[depth: kmax])


class TopNCollector:
    """One :class:`TopList` per length, wired to a :class:`ThresholdVector`."""

    def __init__(self, n: int, kmax: int):
        self.n = n
        self.kmax = kmax
        self.lists = {k: TopList(n) for k in range(1, kmax + 1)}
        self.thresholds = ThresholdVector(kmax)

    def offer(self, itemset, support: int, k: int) -> ThresholdVector:
        lst = self.lists[k]
        if lst.offer(itemset, support):
            self.thresholds.set(k, lst.threshold)
        return self.thresholds

    def raise_to(self, k: int, value: int):
        if self.lists[k].raise_to(value):
            self.thresholds.set(k, value)

    def results(self) -> dict[int, list[Itemset]]:
        out = {}
        for k, lst in self.lists.items():
            rows = [Itemset(it, s) for it, s in lst.entries()]
            rows.sort(key=lambda r: (-r.support, r.items))
            out[k] = rows
        return out


@dataclass
class NMostConfig:
    n: int
    kmax: int
    order: str = "dec"
    pair_prune: bool = True
    fused: bool = True
    word_width: int = 64
    arena_capacity: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("N must be >= 1")
        if self.kmax < 1:
            raise ValueError("kmax must be >= 1")
        self.order = normalize_order(self.order)


@dataclass
class NMostResult:
    by_length: dict[int, list[Itemset]]
    thresholds: list[int]
    history: list[tuple[int, int, int]]
    counters: Counters
    wall_time: float = 0.0
    stats: dict = field(default_factory=dict)

    def itemsets(self) -> list[Itemset]:
        """All results: length ascending, support descending, items lexicographic."""
        return [it for k in sorted(self.by_length) for it in self.by_length[k]]

    def as_dict(self) -> dict[int, dict[tuple, int]]:
        return {k: {it.items: it.support for it in rows}
                for k, rows in self.by_length.items() if rows}


class NMostMiner:
    """
    One N-most run. Not reusable; construct a fresh miner per run.
    """

    def __init__(self, ds: TransactionDataset, cfg: NMostConfig):
        self.ds = ds
        self.cfg = cfg
        self.collector = TopNCollector(cfg.n, cfg.kmax)
        self.counters = Counters()

    def run(self) -> NMostResult:
        t0 = time.perf_counter()
        cfg, ds = self.cfg, self.ds
        coll = self.collector
        sup = item_supports(ds)
        for i in np.flatnonzero(sup > 0).tolist():
            coll.offer((i,), int(sup[i]), 1)

        floor = max(1, effective_bound(0, coll.thresholds, cfg.kmax))
        dense, kept = remap_for_density(ds, floor)
        self._kept = kept.tolist()
        matrix = build_matrix(dense, cfg.word_width)

        table = None
        if cfg.pair_prune and cfg.kmax >= 2 and matrix.num_items > 1:
            table = build_pair_table(matrix, counters=self.counters)
            self._seed_pairs(table.table)
        arena = NodeArena.for_matrix(matrix, cfg.arena_capacity)
        self.ctx = SearchContext(matrix, order=cfg.order, pair_table=table,
                                 fused=cfg.fused, arena=arena, counters=self.counters)
        if cfg.kmax >= 2:
            self._visit(self.ctx.root())

        tv = coll.thresholds
        return NMostResult(
            by_length=coll.results(),
            thresholds=tv.xi_k[1:],
            history=list(tv.history),
            counters=self.counters,
            wall_time=time.perf_counter() - t0,
            stats={"items_retained": matrix.num_items,
                   "transactions_retained": matrix.num_transactions,
                   "remap_floor": floor,
                   "arena_high_water": arena.high_water,
                   "arena_capacity": arena.capacity},
        )

    def _seed_pairs(self, table: np.ndarray):
        # the N-th largest exact pair support is a valid floor for length 2
        iu = np.triu_indices(table.shape[0], k=1)
        pairs = table[iu]
        n = self.cfg.n
        if len(pairs) >= n:
            nth = int(np.partition(pairs, len(pairs) - n)[len(pairs) - n])
            if nth > 0:
                self.collector.raise_to(2, nth)

    def _emit(self, head, x, support, k):
        kept = self._kept
        items = tuple(sorted([kept[i] for i in head] + [kept[x]]))
        self.collector.offer(items, support, k)

    def _visit(self, node: SearchNode):
        ctx = self.ctx
        kmax = self.cfg.kmax
        xi = self.collector.thresholds.xi_k
        d = node.depth
        cands = np.asarray(node.tail, dtype=np.intp)
        if not len(cands):
            return
        reach = min(kmax, d + len(cands))
        bound = max(1, min(xi[d + 1: reach + 1]))
        cands = ctx.prune_pairs(node, cands, bound)
        sup, rows = ctx.count(node, cands)

        if d > 0:
            hits = np.flatnonzero(sup >= max(1, xi[d + 1]))
            for j in hits.tolist():
                self._emit(node.head, int(cands[j]), int(sup[j]), d + 1)
        if d + 1 >= kmax:
            return

        bound = max(1, min(xi[d + 1: reach + 1]))
        keep = np.flatnonzero(sup >= bound)
        cands, sup = cands[keep], sup[keep]
        if rows is not None:
            rows = rows[keep]
        perm = ctx.set_tail(node, cands, sup)
        tail_sup = node.tail_support
        m = len(tail_sup)

        def child_bound(pos):
            rest = m - pos - 1
            if rest <= 0:
                return None
            return max(1, min(xi[d + 2: min(kmax, d + 1 + rest) + 1]))

        mark = ctx.arena.mark()
        if rows is not None:
            which = [perm[p] for p in range(m)
                     if (b := child_bound(p)) is not None and tail_sup[p] >= b]
            ctx.stash(node, cands, rows, which)
        for pos in range(m):
            b = child_bound(pos)
            if b is None or tail_sup[pos] < b:
                continue
            self._visit(ctx.expand(node, pos))
        ctx.arena.release(mark)


def mine_nmost(ds: TransactionDataset, cfg: NMostConfig | None = None, **kwargs) -> NMostResult:
    """
    Mine the N-most interesting itemsets of every length up to ``kmax``.

    Either pass an :class:`NMostConfig` or its fields as keywords, e.g.
    ``mine_nmost(ds, n=10, kmax=4)``.
    """
    if cfg is None:
        cfg = NMostConfig(**kwargs)
    elif kwargs:
        raise TypeError("pass either cfg or keyword options, not both")
    return NMostMiner(ds, cfg).run()
