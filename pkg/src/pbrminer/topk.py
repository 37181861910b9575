"""
Top-K frequent closed itemsets of length at least ``min_l``, mined with a
support floor that starts at zero and rises with the result list.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bitmat import NodeArena, build_matrix
from .dataset import TransactionDataset, remap_for_density
from .nmost import TopList
from .search import (Counters, Itemset, SearchContext, SearchNode, build_pair_table,
                     normalize_order)


class TopKList(TopList):
    """:class:`TopList` plus a superset query over entries of equal support."""

    def __init__(self, capacity: int):
        super().__init__(capacity)
        self.history: list[int] = []

    @property
    def xi(self) -> int:
        return self.threshold

    def offer(self, itemset, support: int) -> bool:
        raised = super().offer(itemset, support)
        if raised:
            self.history.append(self.threshold)
        return raised

    def has_superset(self, items, support: int) -> bool:
        """True if a stored itemset with exactly ``support`` contains ``items``."""
        bucket = self.bucket(support)
        if not bucket:
            return False
        s = set(items)
        return any(s.issubset(other) for other in bucket)


def offer_topk(lst: TopKList, itemset, support: int) -> int:
    lst.offer(itemset, support)
    return lst.threshold


def is_closed(node: SearchNode, ctx: SearchContext) -> bool:
    """
    Exact closedness of ``node.head``: no item of tail ∪ exclusion occurs in
    every transaction that contains the head.
    """
    return not ctx.equal_support_extension(node, list(node.tail) + list(node.exclusion))


@dataclass
class TopKConfig:
    k: int
    min_l: int = 1
    order: str = "dec"
    pair_prune: bool = True
    fused: bool = True
    word_width: int = 64
    list_prefilter: bool = True
    arena_capacity: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("K must be >= 1")
        if self.min_l < 1:
            raise ValueError("min_l must be >= 1")
        self.order = normalize_order(self.order)


@dataclass
class TopKResult:
    itemsets: list[Itemset]
    xi: int
    history: list[int]
    counters: Counters
    wall_time: float = 0.0
    stats: dict = field(default_factory=dict)

    def as_dict(self) -> dict[tuple, int]:
        return {it.items: it.support for it in self.itemsets}


class TopKMiner:
    def __init__(self, ds: TransactionDataset, cfg: TopKConfig):
        self.ds = ds
        self.cfg = cfg
        self.top = TopKList(cfg.k)
        self.counters = Counters()
        self.prefilter_hits = 0

    def run(self) -> TopKResult:
        t0 = time.perf_counter()
        cfg = self.cfg
        dense, kept = remap_for_density(self.ds, 1)
        self._kept = kept.tolist()
        matrix = build_matrix(dense, cfg.word_width)
        table = None
        if cfg.pair_prune and matrix.num_items > 1:
            table = build_pair_table(matrix, counters=self.counters)
        arena = NodeArena.for_matrix(matrix, cfg.arena_capacity)
        self.ctx = SearchContext(matrix, order=cfg.order, pair_table=table,
                                 fused=cfg.fused, arena=arena, counters=self.counters)
        self._visit(self.ctx.root())

        rows = [Itemset(it, s) for it, s in self.top.entries()]
        rows.sort(key=lambda r: (-r.support, len(r.items), r.items))
        return TopKResult(
            itemsets=rows,
            xi=self.top.threshold,
            history=list(self.top.history),
            counters=self.counters,
            wall_time=time.perf_counter() - t0,
            stats={"items_retained": matrix.num_items,
                   "transactions_retained": matrix.num_transactions,
                   "prefilter_hits": self.prefilter_hits,
                   "arena_high_water": arena.high_water,
                   "arena_capacity": arena.capacity},
        )

    def _labels(self, head) -> tuple[int, ...]:
        kept = self._kept
        return tuple(sorted(kept[i] for i in head))

    def _closed(self, node: SearchNode, cands: np.ndarray, sup: np.ndarray, items) -> bool:
        s = node.support
        if len(sup) and bool(np.any(sup == s)):
            return False
        if self.cfg.list_prefilter and self.top.has_superset(items, s):
            self.prefilter_hits += 1
            return False
        ctx = self.ctx
        excl = np.asarray(node.exclusion, dtype=np.intp)
        if len(excl):
            excl = excl[ctx.item_support[excl] >= s]
        if len(excl) and ctx.pair_table is not None:
            excl = excl[ctx.pair_table.min_over_head(node.head, excl) >= s]
        return not ctx.equal_support_extension(node, excl)

    def _visit(self, node: SearchNode):
        ctx = self.ctx
        top = self.top
        min_l = self.cfg.min_l
        d = node.depth
        cands = np.asarray(node.tail, dtype=np.intp)
        xi = max(1, top.threshold)
        if len(cands):
            cands = ctx.prune_pairs(node, cands, xi)
            sup, rows = ctx.count(node, cands)
        else:
            sup, rows = np.empty(0, dtype=np.int64), None

        if d >= min_l and node.support >= max(1, top.threshold):
            items = self._labels(node.head)
            if self._closed(node, cands, sup, items):
                top.offer(items, node.support)

        if not len(cands):
            return
        xi = max(1, top.threshold)
        keep = np.flatnonzero(sup >= xi)
        cands, sup = cands[keep], sup[keep]
        if rows is not None:
            rows = rows[keep]
        perm = ctx.set_tail(node, cands, sup)
        tail_sup = node.tail_support
        m = len(tail_sup)
        # a leaf child still matters when it is long enough to be a result
        leaf_ok = d + 1 >= min_l
        mark = ctx.arena.mark()
        if rows is not None:
            which = [perm[p] for p in range(m) if leaf_ok or p < m - 1]
            ctx.stash(node, cands, rows, which)
        for pos in range(m):
            if not leaf_ok and pos == m - 1:
                break
            if tail_sup[pos] < max(1, top.threshold):
                continue
            self._visit(ctx.expand(node, pos))
        ctx.arena.release(mark)


def mine_topk(ds: TransactionDataset, cfg: TopKConfig | None = None, **kwargs) -> TopKResult:
    """
    Mine the K most frequent closed itemsets with at least ``min_l`` items.

    Ties with the K-th support are all kept, so more than K itemsets may be
    returned. Output order: support descending, length ascending, items
    lexicographic.
    """
    if cfg is None:
        cfg = TopKConfig(**kwargs)
    elif kwargs:
        raise TypeError("pass either cfg or keyword options, not both")
    return TopKMiner(ds, cfg).run()
