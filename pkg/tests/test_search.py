import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import A, B, C, D, I, toy_alpha
from pbrminer.bitmat import build_matrix
from pbrminer.dataset import TransactionDataset
from pbrminer.oracle import enumerate_supports, scan_support
from pbrminer.search import (Counters, Itemset, SearchContext, build_pair_table, count_tail,
                             expand, normalize_order, order_tail, pair_prune, walk_frequent)


@pytest.fixture
def env():
    ds = toy_alpha()
    matrix = build_matrix(ds, 64)
    return ds, matrix, build_pair_table(matrix)


class TestOrder:
    def test_decreasing(self):
        assert order_tail([(C, 3), (B, 5), (D, 2)], "dec") == [(B, 5), (C, 3), (D, 2)]

    def test_ties_by_id(self):
        assert order_tail([(B, 5), (A, 5)], "decreasing") == [(A, 5), (B, 5)]
        assert order_tail([(B, 5), (A, 5)], "inc") == [(A, 5), (B, 5)]

    def test_increasing_and_static(self):
        tail = [(C, 3), (B, 5), (D, 2)]
        assert order_tail(tail, "inc") == [(D, 2), (C, 3), (B, 5)]
        assert order_tail(tail, "static") == [(B, 5), (C, 3), (D, 2)]

    def test_empty(self):
        assert order_tail([], "dec") == []

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            normalize_order("random")


class TestPairTable:
    def test_toy(self, env):
        ds, _, table = env
        p = lambda x, y: table[ds.id_of(x), ds.id_of(y)]
        assert (p(A, B), p(A, C), p(C, I), p(D, I)) == (4, 2, 1, 0)
        assert p(B, A) == 4
        assert p(A, A) == 5

    def test_matches_scan(self, env):
        ds, _, table = env
        for a in range(ds.num_items):
            for b in range(a + 1, ds.num_items):
                assert table[a, b] == scan_support(ds, [a, b])

    def test_single_item(self):
        table = build_pair_table(build_matrix(TransactionDataset.from_rows([[1]])))
        assert table.table.shape == (1, 1)

    def test_disjoint(self):
        table = build_pair_table(build_matrix(TransactionDataset.from_rows([[1], [2]])))
        assert table[0, 1] == 0

    def test_counts_passes(self, env):
        _, matrix, _ = env
        c = Counters()
        build_pair_table(matrix, counters=c)
        assert c.pair_table_passes == 5 * 4 // 2


class TestPairPrune:
    def test_examples(self, env):
        ds, _, table = env
        a, b, i = ds.id_of(A), ds.id_of(B), ds.id_of(I)
        assert pair_prune((a, b), i, table, 2)
        assert not pair_prune((a,), b, table, 2)
        assert not pair_prune((), i, table, 99)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 6), min_size=1, max_size=7), min_size=1, max_size=30),
           st.integers(1, 8))
    def test_sound(self, rows, bound):
        ds = TransactionDataset.from_rows(rows)
        table = build_pair_table(build_matrix(ds))
        for items, s in enumerate_supports(ds, 4).items():
            if len(items) < 2 or s < bound:
                continue
            for pos, x in enumerate(items):
                head = items[:pos] + items[pos + 1:]
                assert not pair_prune(head, x, table, bound)


class TestExpand:
    def test_root_child(self, env):
        ds, matrix, _ = env
        ctx = SearchContext(matrix, order="static")
        root = count_tail(ctx.root(), ctx)
        a = expand(root, ds.id_of(A), ctx)
        assert a.head == (ds.id_of(A),)
        assert ds.to_labels(a.tail) == (B, C, D, I)
        assert a.exclusion == ()
        assert a.support == 5

    def test_head_ab(self, env):
        ds, matrix, _ = env
        ctx = SearchContext(matrix, order="static")
        root = count_tail(ctx.root(), ctx)
        a = count_tail(expand(root, ds.id_of(A), ctx), ctx, bound=2)
        assert ds.to_labels(a.tail) == (B, C, D)
        assert a.tail_support == [4, 2, 2]
        ab = expand(a, ds.id_of(B), ctx)
        assert ds.to_labels(ab.head) == (A, B)
        assert ds.to_labels(ab.tail) == (C, D)
        assert ab.exclusion == ()
        ac = expand(a, ds.id_of(C), ctx)
        assert ds.to_labels(ac.exclusion) == (B,)
        assert ds.to_labels(ac.tail) == (D,)

    def test_exclusion_accumulates(self, env):
        ds, matrix, _ = env
        ctx = SearchContext(matrix, order="static")
        root = count_tail(ctx.root(), ctx)
        b = count_tail(expand(root, ds.id_of(B), ctx), ctx)
        bc = expand(b, ds.id_of(C), ctx)
        # A was passed over at the root, nothing at {B} precedes C
        assert ds.to_labels(bc.exclusion) == (A,)

    def test_not_in_tail(self, env):
        ds, matrix, _ = env
        ctx = SearchContext(matrix)
        with pytest.raises(ValueError):
            expand(ctx.root(), 99, ctx)

    @pytest.mark.parametrize("fused", [True, False])
    def test_fused_and_two_pass_agree(self, env, fused):
        ds, matrix, _ = env
        ctx = SearchContext(matrix, order="static", fused=fused)
        found = walk_frequent(matrix, 1, ctx=ctx)
        want = enumerate_supports(ds)
        assert {it.items: it.support for it in found} == want
        c = ctx.counters
        assert c.extension_and_passes == (1 if fused else 2) * c.extensions
        assert ctx.arena.top == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 7), min_size=1, max_size=8), min_size=1, max_size=40),
       st.integers(1, 5), st.sampled_from(["dec", "inc", "static"]), st.sampled_from([8, 32, 64]))
def test_walk_frequent_visits_each_itemset_once(rows, minsup, order, width):
    ds = TransactionDataset.from_rows(rows)
    matrix = build_matrix(ds, width)
    found = walk_frequent(matrix, minsup, order=order, pair_table=build_pair_table(matrix))
    keys = [it.items for it in found]
    assert len(keys) == len(set(keys))
    want = {k: s for k, s in enumerate_supports(ds).items() if s >= minsup}
    assert {it.items: it.support for it in found} == want


def test_node_invariants():
    ds = TransactionDataset.from_rows([[1, 2, 3], [1, 2, 4], [2, 3, 4], [1, 3], [4]])
    matrix = build_matrix(ds)
    ctx = SearchContext(matrix, order="dec")
    everything = set(range(ds.num_items))

    def on_node(node):
        head, tail, excl = set(node.head), set(node.tail), set(node.exclusion)
        assert not head & tail and not excl & (head | tail)
        assert head | tail | excl <= everything
        for x, s in zip(node.tail, node.tail_support):
            assert s == scan_support(ds, head | {x})

    walk_frequent(matrix, 1, order="dec", ctx=ctx, on_node=on_node)


def test_itemset_len():
    assert len(Itemset((1, 2), 3)) == 2
