import pytest

from _support import A, B, C, D, I, toy_alpha, labelled
from pbrminer.dataset import TransactionDataset
from pbrminer.oracle import (MAX_ITEMS, OracleGuardError, audit_closed, enumerate_supports,
                             oracle_closed, oracle_nmost, oracle_topk, scan_support)


@pytest.fixture
def ds():
    return toy_alpha()


def test_supports_toy(ds):
    sup = labelled(ds, enumerate_supports(ds, 4))
    assert sup[(A, B)] == 4
    assert sup[(A, B, C)] == 2
    assert sup[(A, B, C, D)] == 1
    assert sup[(C, I)] == 1
    assert (D, I) not in sup


def test_supports_trivial():
    ds = TransactionDataset.from_rows([[A, B]])
    assert labelled(ds, enumerate_supports(ds, 2)) == {(A,): 1, (B,): 1, (A, B): 1}
    assert enumerate_supports(TransactionDataset((), ())) == {}


def test_supports_anti_monotone(ds):
    sup = enumerate_supports(ds)
    for items, s in sup.items():
        assert s == scan_support(ds, items)
        for drop in range(len(items)):
            sub = items[:drop] + items[drop + 1:]
            if sub:
                assert sup[sub] >= s


def test_kmax_limits_length(ds):
    assert max(len(k) for k in enumerate_supports(ds, 2)) == 2


def test_nmost_toy(ds):
    got = {k: labelled(ds, v) for k, v in oracle_nmost(ds, 2, 2).items()}
    assert got == {1: {(A,): 5, (B,): 5},
                   2: {(A, B): 4, (A, C): 2, (A, D): 2, (B, C): 2, (B, D): 2}}
    assert labelled(ds, oracle_nmost(ds, 1, 1)[1]) == {(A,): 5, (B,): 5}


def test_nmost_single():
    ds = TransactionDataset.from_rows([[A]])
    for n in (1, 3):
        assert labelled(ds, oracle_nmost(ds, n, 3)[1]) == {(A,): 1}


def test_closed_toy(ds):
    want = {(A,): 5, (B,): 5, (A, B): 4, (C,): 3, (I,): 2, (A, B, C): 2, (A, B, D): 2,
            (A, B, C, D): 1, (A, B, I): 1, (C, I): 1}
    closed = oracle_closed(ds)
    assert labelled(ds, closed) == want
    for items, s in closed.items():
        assert audit_closed(ds, items, s)


def test_closed_identical_transactions():
    ds = TransactionDataset.from_rows([[A, B]] * 3)
    assert labelled(ds, oracle_closed(ds)) == {(A, B): 3}
    assert oracle_closed(TransactionDataset((), ())) == {}


def test_topk_toy(ds):
    assert labelled(ds, oracle_topk(ds, 3, 1)) == {(A,): 5, (B,): 5, (A, B): 4}
    assert labelled(ds, oracle_topk(ds, 2, 2)) == {(A, B): 4, (A, B, C): 2, (A, B, D): 2}
    assert oracle_topk(ds, 5, 5) == {}


def test_audit_rejects(ds):
    d = ds.id_of(D)
    assert not audit_closed(ds, (d,), 2)          # AD has the same support
    assert not audit_closed(ds, (ds.id_of(A),), 4)  # wrong support
    assert not audit_closed(ds, (d, ds.id_of(I)), 0)


def test_guard():
    wide = TransactionDataset.from_rows([list(range(MAX_ITEMS + 1))])
    for fn in (enumerate_supports, oracle_closed):
        with pytest.raises(OracleGuardError):
            fn(wide)
    with pytest.raises(OracleGuardError):
        oracle_nmost(wide, 1, 1)
    with pytest.raises(OracleGuardError):
        oracle_topk(wide, 1, 1)
    edge = TransactionDataset.from_rows([list(range(MAX_ITEMS))[:3]], labels=range(MAX_ITEMS))
    assert len(enumerate_supports(edge)) == 7
