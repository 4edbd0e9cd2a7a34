import itertools
import json
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from treecast.errors import InvalidTreeError, ScheduleFormatError
from treecast.matrix import compose, has_broadcaster, identity, popcount
from treecast.trees import (
    RootedTree,
    Schedule,
    broom_tree,
    enumerate_trees,
    load_schedule,
    path_tree,
    prufer_decode,
    random_tree,
    star_tree,
    tree_to_matrix,
    validate_tree,
)


def prufer_encode(t: RootedTree) -> list[int]:
    """Textbook encoder on the undirected tree: strip the smallest leaf."""
    n = t.n
    adj = {v: set() for v in range(n)}
    for v, p in enumerate(t.parent):
        if v != t.root:
            adj[v].add(p)
            adj[p].add(v)
    seq = []
    for _ in range(n - 2):
        leaf = min(v for v in adj if len(adj[v]) == 1)
        (nb,) = adj.pop(leaf)
        adj[nb].discard(leaf)
        seq.append(nb)
    return seq


def parent_array_trees(n):
    """Oracle: every (root, parent array) whose pointers all lead to the root."""
    out = []
    for root in range(n):
        for parent in itertools.product(range(n), repeat=n):
            t = RootedTree(root, parent)
            if parent[root] != root:
                continue
            ok = all(parent[v] != v for v in range(n) if v != root)
            for v in range(n):
                u = v
                for _ in range(n):
                    u = parent[u]
                ok = ok and u == root
            if ok:
                out.append(t)
    return out


@st.composite
def trees(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    if n == 1:
        return RootedTree(0, (0,))
    seq = draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    return prufer_decode(seq, draw(st.integers(0, n - 1)))


def test_tree_to_matrix_examples():
    assert tree_to_matrix(RootedTree(0, (0,))).to_lists() == [[1]]
    assert tree_to_matrix(path_tree([0, 1, 2])).to_lists() == [[1, 1, 0], [0, 1, 1], [0, 0, 1]]
    star = tree_to_matrix(star_tree(4))
    assert star.to_lists()[0] == [1, 1, 1, 1]
    assert has_broadcaster(compose(identity(4), star)) == 0


def test_tree_to_matrix_rejects_invalid():
    with pytest.raises(InvalidTreeError):
        tree_to_matrix(RootedTree(0, (1, 0)))


def test_validate_examples():
    assert validate_tree(RootedTree(0, (0, 0, 1))) is None
    v = validate_tree(RootedTree(0, (1, 0)))
    assert v.invariant == "single-root" and v.node == 0
    v = validate_tree(RootedTree(0, (0, 2, 1)))
    assert v.invariant == "acyclic" and v.node == 1


def test_validate_more_violations():
    assert validate_tree(RootedTree(0, (0, 1))).node == 1  # second self-parent
    assert validate_tree(RootedTree(3, (0, 0))).invariant == "root"
    assert validate_tree(RootedTree(0, (0, 5))).invariant == "range"
    assert validate_tree(RootedTree(0, ())).invariant == "size"


def test_path_tree_examples():
    assert path_tree([0, 1, 2]) == RootedTree(0, (0, 0, 1))
    assert path_tree([2, 0, 1]) == RootedTree(2, (2, 0, 2))
    with pytest.raises(ValueError):
        path_tree([0, 0, 1])


def test_broom_shape():
    assert broom_tree(4) == RootedTree(0, (0, 0, 1, 1))


def test_prufer_decode_examples():
    assert prufer_decode([], 0) == RootedTree(0, (0, 0))
    assert prufer_decode([0], 0) == RootedTree(0, (0, 0, 0))
    with pytest.raises(ValueError):
        prufer_decode([3], 0)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_prufer_roundtrip(n):
    for seq in itertools.product(range(n), repeat=n - 2):
        for root in range(n):
            assert prufer_encode(prufer_decode(seq, root)) == list(seq)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_parent_array_oracle(n):
    got = list(enumerate_trees(n))
    assert len(got) == n ** (n - 1)
    assert len(set(got)) == len(got)
    assert set(got) == set(parent_array_trees(n))


def test_enumeration_n6_count_and_validity():
    got = list(enumerate_trees(6))
    assert len(got) == 6**5 == len(set(got))
    assert all(validate_tree(t) is None for t in got)


def test_enumeration_order_prufer_then_root():
    first = list(itertools.islice(enumerate_trees(4), 5))
    assert first[:4] == [prufer_decode([0, 0], r) for r in range(4)]
    assert first[4] == prufer_decode([0, 1], 0)


@pytest.mark.parametrize("n", [0, 8])
def test_enumeration_rejects_out_of_range(n):
    with pytest.raises(ValueError):
        list(enumerate_trees(n))


def test_random_tree_deterministic():
    a = [random_tree(7, random.Random(42)) for _ in range(3)]
    assert a[0] == a[1] == a[2]


def test_random_tree_uniform_n3():
    rng = random.Random(123)
    counts = Counter(random_tree(3, rng) for _ in range(90000))
    assert len(counts) == 9
    for c in counts.values():
        assert abs(c - 10000) <= 500


@given(trees())
def test_tree_matrix_shape(t):
    assert validate_tree(t) is None
    m = tree_to_matrix(t)
    assert popcount(m) == 2 * t.n - 1
    g = identity(t.n)
    for _ in range(max(t.n - 1, 1)):
        g = compose(g, m)
    assert g.rows[t.root] == (1 << t.n) - 1


def test_schedule_json_roundtrip(tmp_path):
    s = Schedule((path_tree([0, 1, 2, 3]), star_tree(4, 2)))
    text = s.to_json()
    assert json.loads(text) == {
        "n": 4,
        "trees": [{"root": 0, "parent": [0, 0, 1, 2]}, {"root": 2, "parent": [2, 2, 2, 2]}],
    }
    p = tmp_path / "s.json"
    p.write_text(text)
    assert load_schedule(p) == s


def test_schedule_json_reports_tree_index():
    bad = {"n": 3, "trees": [{"root": 0, "parent": [0, 0, 1]}, {"root": 0, "parent": [0, 2, 1]}]}
    with pytest.raises(ScheduleFormatError, match="tree 1"):
        Schedule.from_dict(bad)
    with pytest.raises(ScheduleFormatError, match="tree 0"):
        Schedule.from_dict({"n": 3, "trees": [{"root": 0, "parent": [0, 0]}]})
    with pytest.raises(ScheduleFormatError):
        Schedule.from_json("{not json")


def test_schedule_rejects_mixed_sizes():
    with pytest.raises(ScheduleFormatError):
        Schedule((star_tree(3), star_tree(4)))
