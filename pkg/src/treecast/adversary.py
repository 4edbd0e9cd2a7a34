"""Playing tree sequences against the product matrix.

Round ``t`` composes the accumulated matrix with the ``t``-th tree and checks
for a full row. Rounds are 1-based; ``tstar == 0`` only for ``n == 1``, where
the identity already has a full row.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol

from .errors import IncompleteTraceError, StrategyFault
from .matrix import ReachMatrix, compose, has_broadcaster, identity, popcount
from .trees import (
    MAX_ENUMERATE_N,
    RootedTree,
    Schedule,
    broom_tree,
    check_tree,
    enumerate_trees,
    path_tree,
    random_tree,
    star_tree,
    tree_to_matrix,
    validate_tree,
)

DEFAULT_POOL = 64


@dataclass(frozen=True)
class RoundRecord:
    round: int
    tree: RootedTree
    popcount: int
    broadcaster: int | None


@dataclass
class BroadcastTrace:
    n: int
    strategy: str
    rounds: list[RoundRecord] = field(default_factory=list)
    tstar: int | None = None
    broadcaster: int | None = None

    @property
    def completed(self) -> bool:
        return self.tstar is not None

    @property
    def status(self) -> str:
        return "broadcast" if self.completed else "cap reached"

    @property
    def popcounts(self) -> list[int]:
        return [r.popcount for r in self.rounds]

    def to_dict(self) -> dict:
        # "n" and "trees" follow the schedule schema so a trace file loads as a schedule
        return {
            "n": self.n,
            "strategy": self.strategy,
            "status": self.status,
            "tstar": self.tstar,
            "broadcaster": self.broadcaster,
            "rounds": [
                {"round": r.round, "popcount": r.popcount, "broadcaster": r.broadcaster}
                for r in self.rounds
            ],
            "trees": [r.tree.to_dict() for r in self.rounds],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "popcount", "broadcaster"])
        for r in self.rounds:
            w.writerow([r.round, r.popcount, "" if r.broadcaster is None else r.broadcaster])
        return buf.getvalue()


class AdversaryStrategy(Protocol):
    name: str

    def next_tree(self, m: ReachMatrix) -> RootedTree: ...


def _play(n: int, choose: Callable[[ReachMatrix], RootedTree | None], cap: int, name: str) -> BroadcastTrace:
    trace = BroadcastTrace(n, name)
    g = identity(n)
    b = has_broadcaster(g)
    if b is not None:
        trace.tstar, trace.broadcaster = 0, b
        return trace
    for t in range(1, cap + 1):
        tree = choose(g)
        if tree is None:
            break
        g = compose(g, tree_to_matrix(tree))
        b = has_broadcaster(g)
        trace.rounds.append(RoundRecord(t, tree, popcount(g), b))
        if b is not None:
            trace.tstar, trace.broadcaster = t, b
            break
    return trace


def run_schedule(schedule: Schedule, cap: int | None = None, cycle: bool = False) -> BroadcastTrace:
    """Play ``schedule`` from the identity until the first full row.

    With ``cycle=True`` the schedule repeats until ``cap`` (default ``n**2``);
    otherwise play stops when either the schedule or ``cap`` runs out.
    """
    n = schedule.n
    for i, t in enumerate(schedule.trees):
        check_tree(t, i)
    if cap is None:
        cap = n * n if cycle else max(len(schedule), 1)
    if cap < 1:
        raise ValueError(f"cap must be at least 1, got {cap}")
    trees = schedule.trees
    if cycle and not trees:
        raise ValueError("cannot cycle an empty schedule")
    pos = 0

    def choose(_g):
        nonlocal pos
        if pos >= len(trees):
            if not cycle:
                return None
            pos = 0
        t = trees[pos]
        pos += 1
        return t

    return _play(n, choose, cap, "schedule")


def run_adversary(strategy: AdversaryStrategy, n: int, cap: int | None = None) -> BroadcastTrace:
    """Let ``strategy`` pick each round's tree from the current matrix.

    ``cap`` defaults to ``n**2``; any valid play broadcasts before then.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if cap is None:
        cap = n * n
    if cap < 1:
        raise ValueError(f"cap must be at least 1, got {cap}")

    def choose(g):
        t = strategy.next_tree(g)
        if not isinstance(t, RootedTree):
            raise StrategyFault(f"{strategy.name}: returned {type(t).__name__}, not a RootedTree")
        if t.n != n:
            raise StrategyFault(f"{strategy.name}: tree has {t.n} nodes, expected {n}")
        violation = validate_tree(t)
        if violation is not None:
            raise StrategyFault(f"{strategy.name}: invalid tree ({violation})")
        return t

    return _play(n, choose, cap, strategy.name)


def replay_trace_as_schedule(trace: BroadcastTrace) -> Schedule:
    if not trace.completed:
        raise IncompleteTraceError("trace ended without broadcast; nothing to replay")
    return Schedule(tuple(r.tree for r in trace.rounds), trace.n)


class FixedTreeAdversary:
    """Plays the same tree every round."""

    def __init__(self, tree: RootedTree, name: str = "fixed"):
        self.tree = check_tree(tree)
        self.name = name

    def next_tree(self, m: ReachMatrix) -> RootedTree:
        return self.tree


class RandomAdversary:
    """Uniformly random tree each round, from a private seeded generator."""

    name = "random"

    def __init__(self, n: int, seed: int = 0):
        self.n = n
        self.rng = random.Random(seed)

    def next_tree(self, m: ReachMatrix) -> RootedTree:
        return random_tree(self.n, self.rng)


class GreedyMinGrowth:
    """One-step lookahead adversary.

    Picks the tree whose successor has the fewest ones. Successors with a
    full row rank last; equal popcounts prefer the successor whose row
    weights, sorted heaviest first, are lexicographically smaller (keeps
    every node far from a full row). Candidates are all trees for ``n <= 7``
    with remaining ties going to enumeration order, and ``pool`` seeded
    random trees per round otherwise.
    """

    name = "greedy"

    def __init__(self, n: int, pool: int = DEFAULT_POOL, seed: int = 0, exhaustive_max_n: int = MAX_ENUMERATE_N):
        self.n = n
        self.pool = pool
        self.rng = random.Random(seed)
        self._all = None
        if n <= exhaustive_max_n:
            self._all = [(t, tree_to_matrix(t)) for t in enumerate_trees(n)]
        elif pool < 1:
            raise ValueError(f"candidate pool must be at least 1, got {pool}")

    def _candidates(self) -> Iterable[tuple[RootedTree, ReachMatrix]]:
        if self._all is not None:
            return self._all
        trees = [random_tree(self.n, self.rng) for _ in range(self.pool)]
        return [(t, tree_to_matrix(t)) for t in trees]

    def next_tree(self, m: ReachMatrix) -> RootedTree:
        best_key = None
        best = None
        for t, tm in self._candidates():
            child = compose(m, tm)
            weights = sorted((r.bit_count() for r in child.rows), reverse=True)
            key = (weights[0] == self.n, sum(weights), weights)
            if best_key is None or key < best_key:
                best_key, best = key, t
        return best


ADVERSARIES = ("path", "star", "broom", "random", "greedy")


def make_adversary(name: str, n: int, seed: int = 0, pool: int = DEFAULT_POOL) -> AdversaryStrategy:
    if name == "path":
        return FixedTreeAdversary(path_tree(list(range(n))), "path")
    if name == "star":
        return FixedTreeAdversary(star_tree(n), "star")
    if name == "broom":
        return FixedTreeAdversary(broom_tree(n), "broom")
    if name == "random":
        return RandomAdversary(n, seed)
    if name == "greedy":
        return GreedyMinGrowth(n, pool=pool, seed=seed)
    raise ValueError(f"unknown adversary {name!r}; choose from {', '.join(ADVERSARIES)}")
