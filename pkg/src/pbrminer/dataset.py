"""
Transaction datasets: FIMI parsing, item supports, density remapping and
synthetic generators.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np


class ParseError(ValueError):
    """Malformed FIMI input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, token: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {token!r}")
        self.lineno = lineno
        self.token = token


@dataclass(frozen=True)
class TransactionDataset:
    """
    Horizontal transaction store with dense item ids.

    Parameters
    ----------
    transactions: tuple of tuples
        each transaction is a strictly increasing tuple of item ids
    labels: tuple of int
        ``labels[i]`` is the original token of item id ``i``
    """

    transactions: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]
    _label_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {lab: i for i, lab in enumerate(self.labels)}
        if len(index) != len(self.labels):
            raise ValueError("duplicate item labels")
        n = len(self.labels)
        for t in self.transactions:
            if any(b <= a for a, b in zip(t, t[1:])):
                raise ValueError(f"transaction not strictly increasing: {t}")
            if t and not 0 <= t[0] <= t[-1] < n:
                raise ValueError(f"item id out of range in {t}")
        object.__setattr__(self, "_label_index", index)

    @property
    def num_items(self) -> int:
        return len(self.labels)

    @property
    def num_transactions(self) -> int:
        return len(self.transactions)

    def id_of(self, label: int) -> int:
        return self._label_index[label]

    def to_labels(self, items: Iterable[int]) -> tuple[int, ...]:
        """Original tokens of ``items``, sorted numerically."""
        return tuple(sorted(self.labels[i] for i in items))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], labels: Sequence[int] | None = None):
        """
        Build a dataset from rows of original labels.

        Ids follow first appearance unless ``labels`` pins the item table up
        front. Rows are deduplicated; rows that end up empty are dropped.
        """
        index: dict[int, int] = {}
        table: list[int] = []
        if labels is not None:
            for lab in labels:
                if lab in index:
                    raise ValueError(f"duplicate label {lab}")
                index[lab] = len(table)
                table.append(lab)
        out = []
        for row in rows:
            ids = set()
            for lab in row:
                i = index.get(lab)
                if i is None:
                    if labels is not None:
                        raise KeyError(f"label {lab} not in item table")
                    i = index[lab] = len(table)
                    table.append(lab)
                ids.add(i)
            if ids:
                out.append(tuple(sorted(ids)))
        return cls(tuple(out), tuple(table))


def _parse_token(tok: str, lineno: int) -> int:
    if tok.isascii() and tok.isdigit():
        return int(tok)
    if tok.startswith("-") and tok[1:].isascii() and tok[1:].isdigit():
        raise ParseError(lineno, tok, "negative item")
    raise ParseError(lineno, tok, "not a non-negative integer")


def parse_fimi(text: str | TextIO | Iterable[str]) -> TransactionDataset:
    """
    Parse FIMI flat format: one transaction per line, whitespace separated
    non-negative integer items. Blank lines are skipped and duplicate items
    within a line collapse to one.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    rows = []
    for lineno, line in enumerate(text, start=1):
        toks = line.split()
        if toks:
            rows.append([_parse_token(t, lineno) for t in toks])
    return TransactionDataset.from_rows(rows)


def load_fimi(path) -> TransactionDataset:
    with open(path, encoding="ascii", newline=None) as fh:
        return parse_fimi(fh)


def serialize_fimi(ds: TransactionDataset) -> str:
    """Inverse of :func:`parse_fimi` on normalized datasets."""
    lines = [" ".join(str(ds.labels[i]) for i in t) for t in ds.transactions]
    return "".join(line + "\n" for line in lines)


def item_supports(ds: TransactionDataset) -> np.ndarray:
    """Number of transactions containing each item id."""
    counts = np.zeros(ds.num_items, dtype=np.int64)
    if ds.transactions:
        flat = np.fromiter(
            (i for t in ds.transactions for i in t), dtype=np.int64,
            count=sum(len(t) for t in ds.transactions))
        counts += np.bincount(flat, minlength=ds.num_items)
    return counts


def remap_for_density(ds: TransactionDataset, floor: int):
    """
    Drop items with support below ``floor`` and transactions left empty.

    Returns
    -------
    (TransactionDataset, np.ndarray)
        the compacted dataset and ``kept``, where ``kept[new_id]`` is the
        item id in ``ds``. Labels travel with the new dataset.
    """
    if floor < 0:
        raise ValueError("floor must be non-negative")
    sup = item_supports(ds)
    kept = np.flatnonzero(sup >= floor)
    new_id = np.full(ds.num_items, -1, dtype=np.int64)
    new_id[kept] = np.arange(len(kept))
    remap = new_id.tolist()
    rows = []
    for t in ds.transactions:
        r = tuple(remap[i] for i in t if remap[i] >= 0)
        if r:
            rows.append(r)
    labels = tuple(ds.labels[i] for i in kept.tolist())
    return TransactionDataset(tuple(rows), labels), kept


def generate_synthetic(num_items: int, num_transactions: int, density: float,
                       seed=None) -> TransactionDataset:
    """
    Bernoulli transactions: each (transaction, item) pair is present
    independently with probability ``density``. Item labels are ``0..num_items-1``.
    """
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if num_items <= 0 or num_transactions <= 0:
        return TransactionDataset((), ())
    rng = np.random.default_rng(seed)
    mask = rng.random((num_transactions, num_items)) < density
    rows = [np.flatnonzero(r).tolist() for r in mask]
    present = np.flatnonzero(mask.any(axis=0)).tolist()
    return TransactionDataset.from_rows(rows, labels=present)


def generate_quest(num_items: int = 1000, num_transactions: int = 100_000,
                   avg_len: float = 10, avg_pattern_len: float = 4,
                   num_patterns: int = 2000, correlation: float = 0.5,
                   corruption: float = 0.5, seed=None) -> TransactionDataset:
    """
    Pattern-based market-basket generator in the style of the IBM Quest
    ``TxIyDz`` datasets.

    Transactions are filled with weighted, randomly corrupted copies of a
    fixed pool of potentially large itemsets, so long itemsets recur with
    non-trivial support. Defaults give the ``T10I4D100K`` shape.
    """
    if num_items <= 0 or num_transactions <= 0:
        return TransactionDataset((), ())
    rng = np.random.default_rng(seed)

    patterns = []
    prev = np.empty(0, dtype=np.int64)
    for _ in range(num_patterns):
        size = min(max(1, rng.poisson(avg_pattern_len)), num_items)
        n_shared = min(len(prev), int(round(size * min(1.0, rng.exponential(correlation)))))
        chosen = set(rng.choice(prev, n_shared, replace=False).tolist()) if n_shared else set()
        while len(chosen) < size:
            chosen.add(int(rng.integers(num_items)))
        prev = np.fromiter(chosen, dtype=np.int64)
        patterns.append(prev)
    weights = rng.exponential(1.0, num_patterns)
    weights /= weights.sum()
    levels = np.clip(rng.normal(corruption, 0.1, num_patterns), 0.0, 1.0)

    sizes = np.maximum(1, rng.poisson(avg_len, num_transactions))
    # pattern draws in bulk; each transaction consumes from the stream
    stream = rng.choice(num_patterns, size=int(sizes.sum()) + 16, p=weights)
    coins = rng.random(len(stream) * 4)
    pos = coin = 0
    rows = []
    carry = None
    for size in sizes.tolist():
        row: set[int] = set()
        while len(row) < size:
            if carry is not None:
                pat, carry = carry, None
            else:
                if pos >= len(stream):
                    stream = rng.choice(num_patterns, size=len(stream), p=weights)
                    pos = 0
                p = int(stream[pos])
                pos += 1
                pat = patterns[p].tolist()
                # drop items while the coin lands under the corruption level
                while pat:
                    if coin >= len(coins):
                        coins = rng.random(len(coins))
                        coin = 0
                    c = coins[coin]
                    coin += 1
                    if c >= levels[p]:
                        break
                    pat.pop(int(c * len(pat) / max(levels[p], 1e-12)) % len(pat))
            if row and len(row) + len(pat) > size and rng.random() < 0.5:
                carry = pat
                break
            row.update(pat)
        if row:
            rows.append(sorted(row))
    present = sorted({i for r in rows for i in r})
    return TransactionDataset.from_rows(rows, labels=present)
