"""
Brute-force reference answers for small datasets.

Nothing here touches bit-vectors, regions or thresholds: supports come from
expanding every transaction into its subsets and counting.
"""

from collections import Counter
from itertools import combinations

from .dataset import TransactionDataset

MAX_ITEMS = 20


class OracleGuardError(ValueError):
    pass


def _guard(ds: TransactionDataset):
    if ds.num_items > MAX_ITEMS:
        raise OracleGuardError(
            f"oracle refuses datasets with more than {MAX_ITEMS} items (got {ds.num_items})")


def enumerate_supports(ds: TransactionDataset, kmax=None) -> dict:
    """Support of every itemset (sorted id tuple) of length <= kmax that occurs at all."""
    _guard(ds)
    counts = Counter()
    for t in ds.transactions:
        top = len(t) if kmax is None else min(kmax, len(t))
        for k in range(1, top + 1):
            counts.update(combinations(t, k))
    return dict(counts)


def _nth_cut(supports, n):
    ranked = sorted(supports, reverse=True)
    return ranked[n - 1] if len(ranked) >= n else ranked[-1]


def oracle_nmost(ds: TransactionDataset, n: int, kmax: int, supports=None) -> dict:
    """``{k: {itemset: support}}`` for the N-most interesting k-itemsets, k <= kmax."""
    if supports is None:
        supports = enumerate_supports(ds, kmax)
    by_len = {}
    for items, s in supports.items():
        if len(items) <= kmax:
            by_len.setdefault(len(items), {})[items] = s
    out = {}
    for k, group in by_len.items():
        cut = _nth_cut(group.values(), n)
        out[k] = {items: s for items, s in group.items() if s >= cut}
    return out


def oracle_closed(ds: TransactionDataset, supports=None) -> dict:
    """All closed itemsets with their supports."""
    if supports is None:
        supports = enumerate_supports(ds)
    present = sorted({i for t in ds.transactions for i in t})
    closed = {}
    for items, s in supports.items():
        members = set(items)
        witness = None
        for i in present:
            if i in members:
                continue
            if supports.get(tuple(sorted(members | {i})), 0) == s:
                witness = i
                break
        if witness is None:
            closed[items] = s
    return closed


def oracle_topk(ds: TransactionDataset, k: int, min_l: int, supports=None) -> dict:
    closed = oracle_closed(ds, supports)
    pool = {items: s for items, s in closed.items() if len(items) >= min_l}
    if not pool:
        return {}
    cut = _nth_cut(pool.values(), k)
    return {items: s for items, s in pool.items() if s >= cut}


def scan_support(ds: TransactionDataset, items) -> int:
    want = set(items)
    return sum(1 for t in ds.transactions if want.issubset(t))


def audit_closed(ds: TransactionDataset, items, support: int) -> bool:
    """Closedness by direct scan: support matches and no item is in all covering transactions."""
    want = set(items)
    covering = [set(t) for t in ds.transactions if want.issubset(t)]
    if len(covering) != support or not covering:
        return False
    common = set.intersection(*covering)
    return common == want
