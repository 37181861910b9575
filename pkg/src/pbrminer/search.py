"""
Depth-first set-enumeration over a vertical bit matrix.

Each node carries a head itemset, its compacted head words with their
projected bit regions, and an ordered tail of candidate extensions. The
:class:`SearchContext` owns the AND kernels, the fused count-and-project
pass, the pair table and the event counters; the miners in
:mod:`pbrminer.nmost` and :mod:`pbrminer.topk` drive the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np

from .bitmat import NodeArena, VerticalBitMatrix, project_pass, root_pbr

ORDER_ALIASES = {
    "dec": "dec", "decreasing": "dec",
    "inc": "inc", "increasing": "inc",
    "static": "static",
}


def normalize_order(policy: str) -> str:
    try:
        return ORDER_ALIASES[policy]
    except KeyError:
        raise ValueError(f"unknown order policy {policy!r}") from None


@dataclass(frozen=True)
class Itemset:
    items: tuple[int, ...]
    support: int

    def __len__(self):
        return len(self.items)


def order_tail(tail, policy: str = "dec"):
    """Sort ``(item, support)`` pairs by support; ties go to the smaller id."""
    policy = normalize_order(policy)
    if policy == "dec":
        return sorted(tail, key=lambda t: (-t[1], t[0]))
    if policy == "inc":
        return sorted(tail, key=lambda t: (t[1], t[0]))
    return sorted(tail, key=lambda t: t[0])


def _order_arrays(items: np.ndarray, sups: np.ndarray, policy: str) -> np.ndarray:
    # lexsort: last key is primary
    if policy == "dec":
        return np.lexsort((items, -sups))
    if policy == "inc":
        return np.lexsort((items, sups))
    return np.argsort(items, kind="stable")


@dataclass
class Counters:
    """Exact event counts for one mining run."""

    nodes_expanded: int = 0
    and_passes: int = 0
    and_words: int = 0
    skipped_words: int = 0
    fused_passes: int = 0
    projection_passes: int = 0
    two_pass_fallbacks: int = 0
    extensions: int = 0
    extension_and_passes: int = 0
    pair_prune_hits: int = 0
    pair_table_passes: int = 0
    closure_passes: int = 0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(eq=False)
class SearchNode:
    """
    One node of the set-enumeration tree.

    ``tail`` starts as the candidate extensions inherited from the parent;
    once the node is counted it is replaced by the surviving candidates in
    search order, with ``tail_support[i]`` the support of head ∪ {tail[i]}.
    """

    head: tuple[int, ...]
    support: int
    words: np.ndarray | None
    pbr: np.ndarray | None
    tail: list[int]
    tail_support: list[int] | None = None
    parent: SearchNode | None = field(default=None, repr=False)
    pos: int = 0
    stash: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.head)

    @property
    def exclusion(self) -> tuple[int, ...]:
        """Items ordered before this branch at some ancestor."""
        parts = []
        node = self
        while node.parent is not None:
            parts.append(node.parent.tail[: node.pos])
            node = node.parent
        return tuple(i for part in reversed(parts) for i in part)


@dataclass
class PairSupportTable:
    """Exact 2-itemset supports among ``items``; ``table[a, a]`` is support(a)."""

    items: np.ndarray
    table: np.ndarray

    def __post_init__(self):
        size = int(self.items.max()) + 1 if len(self.items) else 0
        self._pos = np.full(size, -1, dtype=np.intp)
        self._pos[self.items] = np.arange(len(self.items))

    def __getitem__(self, pair) -> int:
        a, b = pair
        return int(self.table[self._pos[a], self._pos[b]])

    def min_over_head(self, head, cands: np.ndarray) -> np.ndarray:
        """For each candidate x, min over a in head of pair_support(a, x)."""
        rows = self._pos[np.asarray(head, dtype=np.intp)]
        return self.table[np.ix_(rows, self._pos[cands])].min(axis=0)


def build_pair_table(matrix: VerticalBitMatrix, retained=None,
                     counters: Counters | None = None) -> PairSupportTable:
    """Pair supports by ANDing each item with every later item over its root PBR."""
    M = matrix.words
    items = np.arange(matrix.num_items) if retained is None else np.asarray(retained, dtype=np.intp)
    n = len(items)
    table = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(items.tolist()):
        pbr = root_pbr(M[a])
        table[i, i] = int(np.bitwise_count(M[a, pbr]).sum())
        if i + 1 < n and len(pbr):
            sub = M[np.ix_(items[i + 1:], pbr)]
            sub &= M[a, pbr]
            row = np.bitwise_count(sub).sum(axis=1, dtype=np.int64)
            table[i, i + 1:] = row
            table[i + 1:, i] = row
        if counters is not None:
            counters.pair_table_passes += n - i - 1
    return PairSupportTable(items, table)


def pair_prune(head, x: int, table: PairSupportTable, bound: int) -> bool:
    """True when some a in head has pair_support(a, x) < bound (x cannot reach bound)."""
    return any(table[a, x] < bound for a in head)


class SearchContext:
    """
    Shared state of one mining run: the matrix, arena, counters and options.

    Parameters
    ----------
    matrix: VerticalBitMatrix
    order: {"dec", "inc", "static"}
        tail order after each counting pass
    pair_table: PairSupportTable or None
        enables 2-itemset pair pruning when given
    fused: bool
        write child projections during the counting pass (one AND pass per
        extension) instead of re-ANDing at expansion time
    arena: NodeArena or None
        defaults to :meth:`NodeArena.for_matrix`
    """

    def __init__(self, matrix: VerticalBitMatrix, *, order: str = "dec",
                 pair_table: PairSupportTable | None = None, fused: bool = True,
                 arena: NodeArena | None = None, counters: Counters | None = None):
        self.matrix = matrix
        self.M = matrix.words
        self.nwords = matrix.num_words
        self.order = normalize_order(order)
        self.pair_table = pair_table
        self.fused = fused
        self.arena = arena if arena is not None else NodeArena.for_matrix(matrix)
        self.counters = counters if counters is not None else Counters()
        self.item_support = matrix.supports()

    def root(self) -> SearchNode:
        items = np.flatnonzero(self.item_support > 0).tolist()
        return SearchNode((), self.matrix.num_transactions, None, None, items)

    def prune_pairs(self, node: SearchNode, cands: np.ndarray, bound: int) -> np.ndarray:
        if self.pair_table is None or not node.head or not len(cands) or bound <= 0:
            return cands
        keep = self.pair_table.min_over_head(node.head, cands) >= bound
        self.counters.pair_prune_hits += len(cands) - int(np.count_nonzero(keep))
        return cands[keep]

    def count(self, node: SearchNode, cands: np.ndarray):
        """
        One AND pass of the head against every candidate.

        Returns ``(supports, rows)``; ``rows[j]`` is the AND result for
        ``cands[j]`` over ``node.pbr`` when fused mode keeps it, else None.
        At the root the supports are the item supports and no AND happens.
        """
        if node.words is None:
            return self.item_support[cands], None
        pbr = node.pbr
        p = len(pbr)
        sub = self.M[np.ix_(cands, pbr)]
        sub &= node.words
        sup = np.bitwise_count(sub).sum(axis=1, dtype=np.int64)
        c = self.counters
        n = len(cands)
        c.and_passes += n
        c.and_words += n * p
        c.skipped_words += n * (self.nwords - p)
        return sup, (sub if self.fused else None)

    def stash(self, node: SearchNode, cands: np.ndarray, rows, which) -> None:
        """
        Move fused AND results for ``cands[which]`` onto the arena.

        With a fixed arena a child that does not fit is left out;
        :meth:`expand` then projects it with a second AND pass.
        """
        if rows is None:
            return
        arena = self.arena
        pbr = node.pbr
        # a fixed arena leaves half of what is free to the subtrees below
        limit = None if arena.growable else arena.top + arena.remaining // 2
        for j in which:
            row = rows[j]
            nz = row != 0
            n = int(np.count_nonzero(nz))
            if limit is None or arena.top + n <= limit:
                node.stash[int(cands[j])] = arena.alloc(row[nz], pbr[nz])

    def set_tail(self, node: SearchNode, cands: np.ndarray, sup: np.ndarray) -> np.ndarray:
        """Order surviving candidates; returns the permutation applied."""
        perm = _order_arrays(cands, sup, self.order)
        node.tail = cands[perm].tolist()
        node.tail_support = sup[perm].tolist()
        return perm

    def expand(self, node: SearchNode, pos: int) -> SearchNode:
        """Child with head ∪ {tail[pos]}; its tail is what follows ``pos``."""
        x = node.tail[pos]
        c = self.counters
        if node.words is None:
            words = self.M[x]
            pbr = root_pbr(words)
            words = words[pbr]
        elif x in node.stash:
            words, pbr = node.stash.pop(x)
            c.fused_passes += 1
            c.extensions += 1
            c.extension_and_passes += 1
        else:
            words, pbr = project_pass(node.words, self.M[x], node.pbr)
            p = len(node.pbr)
            c.and_passes += 1
            c.and_words += p
            c.skipped_words += self.nwords - p
            c.projection_passes += 1
            c.extensions += 1
            c.extension_and_passes += 2
            if self.fused:
                c.two_pass_fallbacks += 1
        c.nodes_expanded += 1
        return SearchNode(node.head + (x,), node.tail_support[pos], words, pbr,
                          node.tail[pos + 1:], parent=node, pos=pos)

    def equal_support_extension(self, node: SearchNode, items) -> bool:
        """True if some item in ``items`` occurs in every transaction of the head."""
        items = np.asarray(items, dtype=np.intp)
        if not len(items):
            return False
        if node.words is None:
            return bool(np.any(self.item_support[items] == node.support))
        sub = self.M[np.ix_(items, node.pbr)]
        sub &= node.words
        p = len(node.pbr)
        c = self.counters
        c.closure_passes += len(items)
        c.and_passes += len(items)
        c.and_words += len(items) * p
        c.skipped_words += len(items) * (self.nwords - p)
        return bool(np.any((sub == node.words).all(axis=1)))


def expand(node: SearchNode, x: int, ctx: SearchContext) -> SearchNode:
    """Expand ``node`` by tail item ``x`` (see :meth:`SearchContext.expand`)."""
    return ctx.expand(node, node.tail.index(x))


def count_tail(node: SearchNode, ctx: SearchContext, bound: int = 1) -> SearchNode:
    """Count, prune below ``bound`` and order the node's tail in place."""
    cands = np.asarray(node.tail, dtype=np.intp)
    cands = ctx.prune_pairs(node, cands, bound)
    sup, _ = ctx.count(node, cands)
    keep = sup >= bound
    ctx.set_tail(node, cands[keep], sup[keep])
    return node


def walk_frequent(matrix: VerticalBitMatrix, minsup: int, *, order: str = "static",
                  fused: bool = True, pair_table: PairSupportTable | None = None,
                  on_node: Callable[[SearchNode], None] | None = None,
                  ctx: SearchContext | None = None) -> list[Itemset]:
    """
    Plain fixed-threshold frequent itemset walk.

    ``on_node`` sees every node after its tail has been counted and ordered,
    which makes the projection steps observable. ``node.words`` and
    ``node.pbr`` may be arena views that are reused once the node's subtree
    is finished, so copy them inside the hook if they are needed later.
    """
    minsup = max(1, minsup)
    ctx = ctx or SearchContext(matrix, order=order, fused=fused, pair_table=pair_table)
    out: list[Itemset] = []

    def visit(node: SearchNode):
        cands = ctx.prune_pairs(node, np.asarray(node.tail, dtype=np.intp), minsup)
        sup, rows = ctx.count(node, cands)
        keep = np.flatnonzero(sup >= minsup)
        cands, sup = cands[keep], sup[keep]
        rows = rows[keep] if rows is not None else None
        perm = ctx.set_tail(node, cands, sup)
        if on_node is not None:
            on_node(node)
        mark = ctx.arena.mark()
        if node.words is not None:
            ctx.stash(node, cands, rows, perm.tolist())
        for pos in range(len(node.tail)):
            out.append(Itemset(tuple(sorted(node.head + (node.tail[pos],))), node.tail_support[pos]))
            visit(ctx.expand(node, pos))
        ctx.arena.release(mark)

    visit(ctx.root())
    return out
