"""
Command line front end.

Every option can also come from a ``PBRMINER_*`` environment variable;
an explicit flag beats the environment, which beats the default.
"""

from __future__ import annotations

import sys

import click

from . import oracle
from .dataset import (ParseError, TransactionDataset, generate_quest, generate_synthetic,
                      load_fimi)
from .nmost import NMostConfig, mine_nmost
from .report import RunReport, format_itemset, result_digest, write_csv
from .topk import TopKConfig, mine_topk

EXIT_FAIL = 1
EXIT_REFUSED = 3


def nmost_lines(ds: TransactionDataset, res) -> list[tuple[tuple[int, ...], int]]:
    """Labelled results ordered by length, support descending, labels."""
    rows = [(ds.to_labels(it.items), it.support) for it in res.itemsets()]
    rows.sort(key=lambda r: (len(r[0]), -r[1], r[0]))
    return rows


def topk_lines(ds: TransactionDataset, res) -> list[tuple[tuple[int, ...], int]]:
    rows = [(ds.to_labels(it.items), it.support) for it in res.itemsets]
    rows.sort(key=lambda r: (-r[1], len(r[0]), r[0]))
    return rows


def run_nmost(ds, cfg: NMostConfig, seed=None):
    res = mine_nmost(ds, cfg)
    rows = nmost_lines(ds, res)
    counts = {k: len(v) for k, v in res.by_length.items() if v}
    rep = RunReport("nmost", vars(cfg).copy(), res.wall_time, res.counters.as_dict(),
                    res.thresholds, counts, result_digest(rows), seed=seed,
                    extra=res.stats)
    return rows, rep


def run_topk(ds, cfg: TopKConfig, seed=None):
    res = mine_topk(ds, cfg)
    rows = topk_lines(ds, res)
    counts: dict[int, int] = {}
    for labels, _ in rows:
        counts[len(labels)] = counts.get(len(labels), 0) + 1
    rep = RunReport("topk", vars(cfg).copy(), res.wall_time, res.counters.as_dict(),
                    [res.xi], counts, result_digest(rows), seed=seed, extra=res.stats)
    return rows, rep


def _load(path) -> TransactionDataset:
    try:
        return load_fimi(path)
    except ParseError as exc:
        raise click.ClickException(f"{path}: {exc}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise click.ClickException(f"{path}: {exc}") from None


def _emit(rows, rep: RunReport, csv_path, quiet: bool):
    out = click.get_text_stream("stdout")
    for labels, s in rows:
        out.write(format_itemset(labels, s) + "\n")
    if not quiet:
        err = click.get_text_stream("stderr")
        for line in rep.lines():
            err.write(line + "\n")
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            write_csv(fh, [rep])


def _common(f):
    opts = [
        click.option("--order", type=click.Choice(["dec", "inc"]), default="dec",
                     envvar="PBRMINER_ORDER", show_envvar=True,
                     help="Tail order by support."),
        click.option("--no-pair-prune", is_flag=True, envvar="PBRMINER_NO_PAIR_PRUNE",
                     show_envvar=True, help="Disable 2-itemset pair pruning."),
        click.option("--no-fused", is_flag=True, envvar="PBRMINER_NO_FUSED", show_envvar=True,
                     help="Count and project in two separate AND passes."),
        click.option("--word-width", type=click.Choice(["32", "64"]), default="64",
                     envvar="PBRMINER_WORD_WIDTH", show_envvar=True),
        click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
                     envvar="PBRMINER_CSV", show_envvar=True,
                     help="Write the run report as CSV."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


_positive = click.IntRange(min=1)


@click.group()
def main():
    """Mine N-most interesting itemsets and Top-K closed itemsets without a minimum support."""


@main.command("nmost")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", "n", type=_positive, required=True, envvar="PBRMINER_N", show_envvar=True)
@click.option("--kmax", type=_positive, required=True, envvar="PBRMINER_KMAX", show_envvar=True)
@click.option("--quiet", "-q", is_flag=True, help="Suppress the report on stderr.")
@_common
def cmd_nmost(path, n, kmax, quiet, order, no_pair_prune, no_fused, word_width, csv_path):
    """Print the N most frequent itemsets of each length up to KMAX."""
    ds = _load(path)
    cfg = NMostConfig(n=n, kmax=kmax, order=order, pair_prune=not no_pair_prune,
                      fused=not no_fused, word_width=int(word_width))
    rows, rep = run_nmost(ds, cfg)
    _emit(rows, rep, csv_path, quiet)


@main.command("topk")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", "k", type=_positive, required=True, envvar="PBRMINER_K", show_envvar=True)
@click.option("--minl", "min_l", type=_positive, default=1, envvar="PBRMINER_MINL",
              show_envvar=True)
@click.option("--quiet", "-q", is_flag=True, help="Suppress the report on stderr.")
@_common
def cmd_topk(path, k, min_l, quiet, order, no_pair_prune, no_fused, word_width, csv_path):
    """Print the K most frequent closed itemsets with at least MINL items."""
    ds = _load(path)
    cfg = TopKConfig(k=k, min_l=min_l, order=order, pair_prune=not no_pair_prune,
                     fused=not no_fused, word_width=int(word_width))
    rows, rep = run_topk(ds, cfg)
    _emit(rows, rep, csv_path, quiet)


def _parse_sweep(text: str) -> list[int]:
    vals = [v.strip() for v in text.split(",") if v.strip()]
    try:
        out = [int(v) for v in vals]
    except ValueError:
        raise click.BadParameter(f"not a comma separated integer list: {text!r}") from None
    if any(v < 1 for v in out):
        raise click.BadParameter("sweep values must be >= 1")
    return out


@main.command("bench")
@click.argument("path", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--algo", type=click.Choice(["nmost", "topk"]), default="nmost",
              envvar="PBRMINER_ALGO", show_envvar=True)
@click.option("--sweep", default="10,20,30,40,50,60,70,80", envvar="PBRMINER_SWEEP",
              show_envvar=True, help="Comma separated N (nmost) or K (topk) values.")
@click.option("--kmax", type=_positive, default=5, envvar="PBRMINER_KMAX", show_envvar=True)
@click.option("--minl", "min_l", type=_positive, default=1, envvar="PBRMINER_MINL",
              show_envvar=True)
@click.option("--synthetic", type=click.Choice(["quest", "bernoulli"]), default=None,
              envvar="PBRMINER_SYNTHETIC", show_envvar=True,
              help="Generate the input instead of reading PATH.")
@click.option("--items", type=_positive, default=1000, envvar="PBRMINER_ITEMS", show_envvar=True)
@click.option("--transactions", type=_positive, default=100_000,
              envvar="PBRMINER_TRANSACTIONS", show_envvar=True)
@click.option("--avg-len", type=float, default=10.0, envvar="PBRMINER_AVG_LEN", show_envvar=True)
@click.option("--density", type=float, default=0.01, envvar="PBRMINER_DENSITY", show_envvar=True)
@click.option("--seed", type=int, default=0, envvar="PBRMINER_SEED", show_envvar=True)
@_common
def cmd_bench(path, algo, sweep, kmax, min_l, synthetic, items, transactions, avg_len, density,
              seed, order, no_pair_prune, no_fused, word_width, csv_path):
    """Run one miner over a sweep of N or K values and write CSV rows."""
    values = _parse_sweep(sweep)
    if synthetic is None and path is None:
        raise click.UsageError("give PATH or --synthetic")
    if synthetic == "quest":
        ds, used_seed = generate_quest(items, transactions, avg_len, seed=seed), seed
    elif synthetic == "bernoulli":
        ds, used_seed = generate_synthetic(items, transactions, density, seed=seed), seed
    else:
        ds, used_seed = _load(path), None
    reports = []
    for v in values:
        opts = dict(order=order, pair_prune=not no_pair_prune, fused=not no_fused,
                    word_width=int(word_width))
        if algo == "nmost":
            _, rep = run_nmost(ds, NMostConfig(n=v, kmax=kmax, **opts), seed=used_seed)
        else:
            _, rep = run_topk(ds, TopKConfig(k=v, min_l=min_l, **opts), seed=used_seed)
        reports.append(rep)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            write_csv(fh, reports)
    else:
        write_csv(click.get_text_stream("stdout"), reports)


def _first_difference(got: dict, want: dict):
    for key in sorted(set(got) | set(want), key=lambda t: (len(t), t)):
        if got.get(key) != want.get(key):
            return key, got.get(key), want.get(key)
    return None


@main.command("verify")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", "n", type=_positive, default=3, envvar="PBRMINER_N", show_envvar=True)
@click.option("--kmax", type=_positive, default=3, envvar="PBRMINER_KMAX", show_envvar=True)
@click.option("--k", "k", type=_positive, default=5, envvar="PBRMINER_K", show_envvar=True)
@click.option("--minl", "min_l", type=_positive, default=1, envvar="PBRMINER_MINL",
              show_envvar=True)
@click.option("--corrupt", is_flag=True, hidden=True,
              help="Test hook: perturb one mined support before diffing.")
@_common
def cmd_verify(path, n, kmax, k, min_l, corrupt, order, no_pair_prune, no_fused, word_width,
               csv_path):
    """Diff both miners against the brute-force oracle (small datasets only)."""
    ds = _load(path)
    if ds.num_items > oracle.MAX_ITEMS:
        click.echo(f"refused: {ds.num_items} items exceeds the oracle limit of "
                   f"{oracle.MAX_ITEMS}", err=True)
        sys.exit(EXIT_REFUSED)
    opts = dict(order=order, pair_prune=not no_pair_prune, fused=not no_fused,
                word_width=int(word_width))
    supports = oracle.enumerate_supports(ds)

    nm_rows, _ = run_nmost(ds, NMostConfig(n=n, kmax=kmax, **opts))
    tk_rows, _ = run_topk(ds, TopKConfig(k=k, min_l=min_l, **opts))
    if corrupt and nm_rows:
        labels, s = nm_rows[0]
        nm_rows[0] = (labels, s + 1)

    def labelled(d):
        return {ds.to_labels(items): s for items, s in d.items()}

    want_nm = {}
    for group in oracle.oracle_nmost(ds, n, kmax, supports).values():
        want_nm.update(labelled(group))
    checks = [("nmost", dict(nm_rows), want_nm),
              ("topk", dict(tk_rows), labelled(oracle.oracle_topk(ds, k, min_l, supports)))]
    ok = True
    for name, got, want in checks:
        diff = _first_difference(got, want)
        if diff is None:
            click.echo(f"{name}: pass ({len(got)} itemsets)")
        else:
            ok = False
            labels, g, w = diff
            click.echo(f"{name}: FAIL at {' '.join(map(str, labels))}: mined {g}, oracle {w}")
    sys.exit(0 if ok else EXIT_FAIL)


if __name__ == "__main__":
    main()
