"""Run reports, result digests and the versioned CSV schema."""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field

from .search import Counters

CSV_VERSION = "# pbrminer-csv v1"
COUNTER_FIELDS = list(Counters().as_dict())
CSV_FIELDS = (["algorithm", "n", "kmax", "k", "min_l", "order", "pair_prune", "fused",
               "word_width", "seed", "wall_time_s", "result_count", "counts_by_length",
               "result_hash", "final_xi"] + COUNTER_FIELDS)


def format_itemset(labels, support: int) -> str:
    return " ".join(str(x) for x in labels) + f" (#{support})"


def result_digest(pairs) -> str:
    """Order-independent SHA-256 over ``(labels, support)`` pairs."""
    lines = sorted(format_itemset(sorted(labels), s) for labels, s in pairs)
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


@dataclass
class RunReport:
    algorithm: str
    config: dict
    wall_time: float
    counters: dict
    final_xi: list[int]
    counts_by_length: dict[int, int]
    result_hash: str
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def result_count(self) -> int:
        return sum(self.counts_by_length.values())

    def row(self) -> dict:
        cfg = self.config
        row = {
            "algorithm": self.algorithm,
            "n": cfg.get("n", ""),
            "kmax": cfg.get("kmax", ""),
            "k": cfg.get("k", ""),
            "min_l": cfg.get("min_l", ""),
            "order": cfg.get("order", ""),
            "pair_prune": int(cfg.get("pair_prune", True)),
            "fused": int(cfg.get("fused", True)),
            "word_width": cfg.get("word_width", ""),
            "seed": "" if self.seed is None else self.seed,
            "wall_time_s": f"{self.wall_time:.6f}",
            "result_count": self.result_count,
            "counts_by_length": ";".join(f"{k}:{v}" for k, v in sorted(self.counts_by_length.items())),
            "result_hash": self.result_hash,
            "final_xi": ";".join(str(x) for x in self.final_xi),
        }
        row.update({name: self.counters.get(name, 0) for name in COUNTER_FIELDS})
        return row

    def lines(self) -> list[str]:
        """``# key=value`` lines for the side channel."""
        out = [f"# algorithm={self.algorithm}"]
        out += [f"# {k}={v}" for k, v in self.config.items()]
        out.append(f"# wall_time_s={self.wall_time:.6f}")
        out += [f"# {k}={v}" for k, v in self.counters.items()]
        out.append("# final_xi=" + ",".join(str(x) for x in self.final_xi))
        out.append("# results_by_length=" + ",".join(
            f"{k}:{v}" for k, v in sorted(self.counts_by_length.items())))
        out.append(f"# result_hash={self.result_hash}")
        out += [f"# {k}={v}" for k, v in self.extra.items()]
        return out


def write_csv(fh, reports) -> None:
    fh.write(CSV_VERSION + "\n")
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.row())


def read_csv(fh) -> list[dict]:
    first = fh.readline().rstrip("\n")
    if first != CSV_VERSION:
        raise ValueError(f"unexpected CSV schema line {first!r}")
    return list(csv.DictReader(fh))
