"""Both kernel backends against shared oracles and against each other."""

import random

import pytest

from treecast import _fallback
from treecast.errors import MemoryBudgetExceeded
from treecast.matrix import ReachMatrix, naive_compose
from treecast.trees import enumerate_trees

from .conftest import KERNELS, random_reflexive


def move_set(n):
    return [(t.root, t.parent) for t in enumerate_trees(n)]


def test_compose_matches_naive(kern):
    rng = random.Random(3)
    for _ in range(300):
        n = rng.choice([1, 2, 5, 8, 15, 16, 40, 70])
        a = random_reflexive(n, rng, rng.random() * 0.3)
        b = random_reflexive(n, rng, rng.random() * 0.3)
        got = ReachMatrix(n, tuple(kern.compose_rows(a.rows, b.rows, n)))
        assert got == naive_compose(a, b)


def test_state_packing_roundtrip(kern):
    rng = random.Random(4)
    for _ in range(200):
        n = rng.randint(1, 8)
        rows = tuple(random_reflexive(n, rng).rows)
        assert tuple(kern.state_to_rows(kern.rows_to_state(rows, n), n)) == rows


def test_state_order_is_row_major_lex(kern):
    # (0,0) is the most significant entry
    a = kern.rows_to_state((0b01, 0b10), 2)
    b = kern.rows_to_state((0b11, 0b10), 2)
    c = kern.rows_to_state((0b01, 0b11), 2)
    assert a < c < b


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("canonicalize", [True, False])
def test_searcher_values(kern, n, canonicalize):
    expected = {2: 1, 3: 2, 4: 4}[n]
    s = kern.Searcher(n, move_set(n), canonicalize)
    assert s.value(tuple(1 << x for x in range(n))) == expected


def test_searcher_broadcast_state_is_zero(kern):
    s = kern.Searcher(3, move_set(3))
    assert s.value((0b111, 0b010, 0b100)) == 0
    assert s.stats["expanded"] == 0


def test_searcher_budget(kern):
    s = kern.Searcher(4, move_set(4), False, max_entries=10)
    with pytest.raises(MemoryBudgetExceeded) as info:
        s.value((1, 2, 4, 8))
    assert info.value.stats["entries"] == 10
    assert info.value.limit == 10


@pytest.mark.skipif(len(KERNELS) < 2, reason="compiled kernels not built")
def test_backends_agree_exactly():
    from treecast import _kernels

    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(1, 8)
        rows = random_reflexive(n, rng, rng.random()).rows
        assert _fallback.canonical_rows(rows, n) == _kernels.canonical_rows(rows, n)
    for n, canon in [(3, True), (4, True), (4, False), (5, True)]:
        ident = tuple(1 << x for x in range(n))
        a = _fallback.Searcher(n, move_set(n), canon)
        b = _kernels.Searcher(n, move_set(n), canon)
        assert a.value(ident) == b.value(ident)
        # same traversal order, so even the counters match
        assert a.stats == b.stats
