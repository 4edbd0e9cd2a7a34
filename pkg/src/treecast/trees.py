"""Rooted labeled trees with self-loops: the adversary's move set.

A tree is stored as a parent array with ``parent[root] == root``. As a round
network every edge points from parent to child, away from the root, and every
node carries a self-loop. That orientation is what lets the root's
information reach everyone, so it is the one that makes broadcast finite.
"""

from __future__ import annotations

import heapq
import itertools
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from .errors import InvalidTreeError, ScheduleFormatError
from .matrix import ReachMatrix

MAX_ENUMERATE_N = 7


@dataclass(frozen=True)
class RootedTree:
    root: int
    parent: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parent", tuple(self.parent))

    @property
    def n(self) -> int:
        return len(self.parent)

    def to_dict(self) -> dict:
        return {"root": self.root, "parent": list(self.parent)}

    @classmethod
    def from_dict(cls, obj: dict) -> RootedTree:
        return cls(int(obj["root"]), tuple(int(p) for p in obj["parent"]))


@dataclass(frozen=True)
class TreeViolation:
    invariant: str
    node: int | None
    message: str

    def __str__(self) -> str:
        return self.message


def validate_tree(t: RootedTree) -> TreeViolation | None:
    """Return ``None`` for a valid rooted tree, else the first violation found."""
    n = len(t.parent)
    if n < 1:
        return TreeViolation("size", None, "tree has no nodes")
    if not 0 <= t.root < n:
        return TreeViolation("root", t.root, f"root {t.root} outside [0, {n})")
    for v, p in enumerate(t.parent):
        if not 0 <= p < n:
            return TreeViolation("range", v, f"parent[{v}]={p} outside [0, {n})")
    if t.parent[t.root] != t.root:
        return TreeViolation(
            "single-root",
            t.root,
            f"parent[{t.root}]={t.parent[t.root]} but {t.root} is declared root",
        )
    for v, p in enumerate(t.parent):
        if p == v and v != t.root:
            return TreeViolation("single-root", v, f"node {v} is its own parent but is not the root")

    # reached[v]: v's parent chain is known to end at the root
    reached = [False] * n
    reached[t.root] = True
    for v in range(n):
        path = []
        u = v
        while not reached[u]:
            path.append(u)
            u = t.parent[u]
            if len(path) > n:
                return TreeViolation(
                    "acyclic",
                    v,
                    f"node {v} does not reach root {t.root} (parent cycle)",
                )
        for u in path:
            reached[u] = True
    return None


def check_tree(t: RootedTree, index: int | None = None) -> RootedTree:
    violation = validate_tree(t)
    if violation is not None:
        raise InvalidTreeError(violation, index)
    return t


def tree_to_matrix(t: RootedTree) -> ReachMatrix:
    """Self-loops plus one parent->child edge per non-root node."""
    check_tree(t)
    rows = [1 << v for v in range(t.n)]
    for v, p in enumerate(t.parent):
        if v != t.root:
            rows[p] |= 1 << v
    return ReachMatrix(t.n, tuple(rows))


def path_tree(order: Sequence[int]) -> RootedTree:
    """Path ``order[0] -> order[1] -> ... -> order[-1]`` rooted at ``order[0]``."""
    n = len(order)
    if n < 1 or sorted(order) != list(range(n)):
        raise ValueError(f"path order must be a permutation of range({n}): {list(order)}")
    parent = [0] * n
    parent[order[0]] = order[0]
    for prev, cur in zip(order, order[1:]):
        parent[cur] = prev
    return RootedTree(order[0], tuple(parent))


def star_tree(n: int, center: int = 0) -> RootedTree:
    return RootedTree(center, (center,) * n)


def broom_tree(n: int) -> RootedTree:
    """Root 0 with a single child 1, which parents every other node."""
    if n < 2:
        raise ValueError("broom needs at least two nodes")
    return RootedTree(0, (0, 0) + (1,) * (n - 2))


def orient(n: int, edges, root: int) -> RootedTree:
    """Orient an undirected spanning tree away from ``root``."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = [-1] * n
    parent[root] = root
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if parent[v] == -1:
                parent[v] = u
                stack.append(v)
    return RootedTree(root, tuple(parent))


def prufer_decode(seq: Sequence[int], root: int) -> RootedTree:
    """Labeled tree for a Prüfer sequence, rooted at ``root``.

    The tree has ``len(seq) + 2`` nodes.
    """
    n = len(seq) + 2
    for s in seq:
        if not 0 <= s < n:
            raise ValueError(f"Prüfer label {s} outside [0, {n})")
    if not 0 <= root < n:
        raise ValueError(f"root {root} outside [0, {n})")
    degree = [1] * n
    for s in seq:
        degree[s] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return orient(n, edges, root)


def enumerate_trees(n: int) -> Iterator[RootedTree]:
    """Every rooted labeled tree on ``n`` nodes, ``n ** (n - 1)`` in total.

    Order: Prüfer sequences lexicographically, and for each sequence the
    roots in ascending order.
    """
    if not 1 <= n <= MAX_ENUMERATE_N:
        raise ValueError(f"enumeration supports 1 <= n <= {MAX_ENUMERATE_N}, got {n}")
    if n == 1:
        yield RootedTree(0, (0,))
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        for root in range(n):
            yield prufer_decode(seq, root)


def random_tree(n: int, rng: random.Random) -> RootedTree:
    """Uniform over all ``n ** (n - 1)`` rooted labeled trees."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n == 1:
        return RootedTree(0, (0,))
    seq = [rng.randrange(n) for _ in range(n - 2)]
    return prufer_decode(seq, rng.randrange(n))


@dataclass(frozen=True)
class Schedule:
    """Ordered tree sequence ``G_1, G_2, ...`` of uniform size.

    ``n`` is inferred from the trees when omitted; it is required for an
    empty schedule.
    """

    trees: tuple[RootedTree, ...]
    n: int = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        sizes = {t.n for t in self.trees}
        if self.n is None:
            if not sizes:
                raise ValueError("empty schedule needs an explicit n")
            object.__setattr__(self, "n", self.trees[0].n)
        if sizes - {self.n}:
            raise ScheduleFormatError(f"tree sizes {sorted(sizes)} do not all match n={self.n}")

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def to_dict(self) -> dict:
        return {"n": self.n, "trees": [t.to_dict() for t in self.trees]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> Schedule:
        if not isinstance(obj, dict) or "n" not in obj or "trees" not in obj:
            raise ScheduleFormatError('schedule must be an object with "n" and "trees"')
        n = obj["n"]
        if not isinstance(n, int) or n < 1:
            raise ScheduleFormatError(f'"n" must be a positive integer, got {n!r}')
        trees = []
        for i, item in enumerate(obj["trees"]):
            try:
                t = RootedTree.from_dict(item)
            except (KeyError, TypeError, ValueError) as exc:
                raise ScheduleFormatError(f"tree {i}: malformed entry ({exc})") from exc
            if t.n != n:
                raise ScheduleFormatError(f"tree {i}: parent array has length {t.n}, expected n={n}")
            violation = validate_tree(t)
            if violation is not None:
                raise ScheduleFormatError(f"tree {i}: {violation}")
            trees.append(t)
        if not trees:
            raise ScheduleFormatError("schedule has no trees")
        return cls(tuple(trees), n)

    @classmethod
    def from_json(cls, text: str) -> Schedule:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScheduleFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(obj)


def load_schedule(path: str | Path) -> Schedule:
    return Schedule.from_json(Path(path).read_text())


def dump_schedule(schedule: Schedule, path: str | Path) -> None:
    Path(path).write_text(schedule.to_json())
