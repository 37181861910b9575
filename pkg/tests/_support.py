import time
from contextlib import contextmanager

import numpy as np

from pbrminer.dataset import TransactionDataset, generate_synthetic

# toy dataset; labels 1..5 stand for A, B, C, D, I
A, B, C, D, I = 1, 2, 3, 4, 5
TOY_ROWS = [[A, B, C], [A, B, I], [B], [C, I], [A, B, D], [A, B, C, D], [A]]
TOY_TEXT = "1 2 3\n1 2 5\n2\n3 5\n1 2 4\n1 2 3 4\n1\n"


def toy_alpha() -> TransactionDataset:
    """Toy dataset with ids pinned to alphabetical order (A=0 ... I=4)."""
    return TransactionDataset.from_rows(TOY_ROWS, labels=[A, B, C, D, I])


def labelled(ds, mapping):
    return {ds.to_labels(items): s for items, s in mapping.items()}


def corpus(count=200, seed=20260901):
    """Seeded small datasets: <= 12 items, <= 64 transactions, density in [0.1, 0.6]."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        ni = int(rng.integers(1, 13))
        nt = int(rng.integers(1, 65))
        den = float(rng.uniform(0.1, 0.6))
        out.append(generate_synthetic(ni, nt, den, seed=int(rng.integers(2**31))))
    return out


RESULTS: list[tuple[str, bool, float, str]] = []


@contextmanager
def criterion(name, detail=""):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        RESULTS.append((name, False, time.perf_counter() - t0, detail))
        raise
    RESULTS.append((name, True, time.perf_counter() - t0, detail))
