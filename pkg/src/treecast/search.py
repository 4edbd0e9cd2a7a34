"""Exact worst-case broadcast time for small ``n`` and the linear bound window.

The value of a state ``G`` is ``f(G) = 0`` when ``G`` has a full row and
``1 + max_T f(compose(G, T))`` over every rooted tree ``T`` otherwise. Each
round adds at least one entry, so the state graph is acyclic and the
recursion terminates within ``n*n - n`` levels. ``exact_tstar`` evaluates
``f(identity(n))`` with a memo table, optionally keyed on canonical forms
(the move set is closed under relabeling, so ``f`` is too).
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ._backend import BACKEND, kernels
from ._fallback import Searcher as PythonSearcher
from .adversary import run_schedule
from .errors import MemoryBudgetExceeded
from .matrix import ReachMatrix, compose, has_broadcaster, identity, naive_compose
from .trees import RootedTree, Schedule, enumerate_trees, tree_to_matrix

DEFAULT_MAX_ENTRIES = 10_000_000
MAX_SEARCH_N = 5
MAX_EXPENSIVE_N = 6


def lower_bound(n: int) -> int:
    """``ceil((3n - 1) / 2) - 2``, clamped at 0."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return max(0, -(-(3 * n - 1) // 2) - 2)


def upper_bound(n: int) -> int:
    """``ceil((1 + sqrt 2) n - 1)`` in exact integer arithmetic.

    ``k >= (1 + sqrt 2) n - 1`` iff ``k + 1 - n >= sqrt(2 n^2)``, so the
    answer is ``n - 1 + ceil(sqrt(2 n^2))``. ``2 n^2`` is never a perfect
    square for ``n >= 1``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    m = 2 * n * n
    r = math.isqrt(m)
    if r * r < m:
        r += 1
    return n - 1 + r


@dataclass(frozen=True)
class BoundWindow:
    n: int
    lower: int
    upper: int

    @property
    def valid(self) -> bool:
        return self.lower <= self.upper

    def contains(self, t: int) -> bool:
        return self.lower <= t <= self.upper


def bound_window(n: int) -> BoundWindow:
    return BoundWindow(n, lower_bound(n), upper_bound(n))


@dataclass
class SearchStats:
    expanded: int = 0
    entries: int = 0
    hits: int = 0
    wall_time: float = 0.0
    backend: str = BACKEND
    workers: int = 1

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "expanded": self.expanded,
            "memo_entries": self.entries,
            "memo_hits": self.hits,
            "backend": self.backend,
            "workers": self.workers,
        }
        if timing:
            d["wall_time"] = round(self.wall_time, 6)
        return d


@dataclass
class SearchResult:
    n: int
    tstar: int
    witness: Schedule
    stats: SearchStats = field(default_factory=SearchStats)
    canonicalize: bool = True

    @property
    def window(self) -> BoundWindow:
        return bound_window(self.n)

    def to_dict(self, timing: bool = False) -> dict:
        w = self.window
        return {
            "n": self.n,
            "tstar": self.tstar,
            "window": {"lower": w.lower, "upper": w.upper},
            "canonicalize": self.canonicalize,
            "witness": self.witness.to_dict(),
            "stats": self.stats.to_dict(timing),
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> SearchResult:
        s = obj.get("stats", {})
        stats = SearchStats(
            s.get("expanded", 0),
            s.get("memo_entries", 0),
            s.get("memo_hits", 0),
            s.get("wall_time", 0.0),
            s.get("backend", BACKEND),
            s.get("workers", 1),
        )
        return cls(
            int(obj["n"]),
            int(obj["tstar"]),
            Schedule.from_dict(obj["witness"]),
            stats,
            bool(obj.get("canonicalize", True)),
        )


def _move_set(n: int) -> list[RootedTree]:
    return list(enumerate_trees(n))


def _make_searcher(n: int, trees, canonicalize: bool, max_entries: int, backend: str | None):
    pairs = [(t.root, t.parent) for t in trees]
    if backend is None:
        return kernels.Searcher(n, pairs, canonicalize, max_entries)
    if backend == "python":
        return PythonSearcher(n, pairs, canonicalize, max_entries)
    if backend == "compiled":
        try:
            from . import _kernels
        except ImportError as exc:
            raise RuntimeError("compiled kernels are not available") from exc
        return _kernels.Searcher(n, pairs, canonicalize, max_entries)
    raise ValueError(f"unknown backend {backend!r}")


def _witness_from(searcher, state: ReachMatrix, matrices) -> list[int]:
    """Tree indices of the first-in-order optimal play from ``state``."""
    path = []
    value = searcher.value(state.rows)
    while value > 0:
        for i, tm in enumerate(matrices):
            child = compose(state, tm)
            if searcher.value(child.rows) == value - 1:
                path.append(i)
                state, value = child, value - 1
                break
        else:  # pragma: no cover - would mean the memo is inconsistent
            raise RuntimeError("no successor realizes the stored value")
    return path


def _check_n(n: int, expensive: bool) -> None:
    top = MAX_EXPENSIVE_N if expensive else MAX_SEARCH_N
    if not 2 <= n <= top:
        hint = "" if expensive or n != MAX_EXPENSIVE_N else " (n=6 needs expensive=True)"
        raise ValueError(f"exact search supports 2 <= n <= {top}, got {n}{hint}")


def _search_subset(args):
    n, canonicalize, max_entries, backend, indices = args
    trees = _move_set(n)
    matrices = [tree_to_matrix(t) for t in trees]
    searcher = _make_searcher(n, trees, canonicalize, max_entries, backend)
    start = identity(n)
    values = {}
    for i in indices:
        values[i] = searcher.value(compose(start, matrices[i]).rows)
    best = max(values.values())
    best_i = min(i for i, v in values.items() if v == best)
    tail = _witness_from(searcher, compose(start, matrices[best_i]), matrices)
    return values, best_i, tail, searcher.stats


def exact_tstar(
    n: int,
    canonicalize: bool = True,
    max_entries: int = DEFAULT_MAX_ENTRIES,
    workers: int = 1,
    expensive: bool = False,
    backend: str | None = None,
) -> SearchResult:
    """Worst-case broadcast time over all tree sequences, with a witness.

    ``workers > 1`` splits the distinct first-round successors across
    processes, each with a private memo; ``tstar`` and the witness match the
    single-process run, only the stats differ. Raises
    :class:`MemoryBudgetExceeded` (carrying partial stats) if the memo grows
    past ``max_entries``.
    """
    _check_n(n, expensive)
    t0 = time.perf_counter()
    trees = _move_set(n)
    matrices = [tree_to_matrix(t) for t in trees]

    if workers <= 1:
        searcher = _make_searcher(n, trees, canonicalize, max_entries, backend)
        searcher.value(identity(n).rows)
        raw = searcher.stats
        path = _witness_from(searcher, identity(n), matrices)
        stats = SearchStats(raw["expanded"], raw["entries"], raw["hits"], backend=searcher.backend)
    else:
        path, stats = _parallel(n, canonicalize, max_entries, workers, backend, trees, matrices)

    stats.wall_time = time.perf_counter() - t0
    witness = Schedule(tuple(trees[i] for i in path), n)
    return SearchResult(n, len(path), witness, stats, canonicalize)


def _parallel(n, canonicalize, max_entries, workers, backend, trees, matrices):
    start = identity(n)
    first = {}
    for i, tm in enumerate(matrices):
        child = compose(start, tm)
        if has_broadcaster(child) is None:
            first.setdefault(child.rows, i)
    candidates = sorted(first.values())
    if not candidates:
        return [0], SearchStats(workers=workers)
    chunks = [candidates[k::workers] for k in range(workers)]
    chunks = [c for c in chunks if c]
    jobs = [(n, canonicalize, max_entries, backend, c) for c in chunks]
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        results = list(pool.map(_search_subset, jobs))

    stats = SearchStats(workers=workers)
    best_v, best_i, best_tail = -1, None, None
    for values, i, tail, raw in results:
        stats.expanded += raw["expanded"]
        stats.entries += raw["entries"]
        stats.hits += raw["hits"]
        v = values[i]
        if v > best_v or (v == best_v and i < best_i):
            best_v, best_i, best_tail = v, i, tail
    stats.backend = BACKEND if backend is None else backend
    return [best_i] + best_tail, stats


def brute_force_tstar(n: int, allow_slow: bool = False) -> int:
    """Independent oracle for ``exact_tstar``.

    Plain recursion over every tree, no memo, no canonical forms, unpacked
    matrices and the naive product. Trees come from filtering all parent
    arrays rather than from the Prüfer enumeration.
    """
    top = 4 if allow_slow else 3
    if not 1 <= n <= top:
        raise ValueError(f"brute force supports 1 <= n <= {top}, got {n}")
    moves = [_parent_array_matrix(n, root, parent) for root, parent in _all_parent_arrays(n)]

    def f(g: ReachMatrix) -> int:
        if has_broadcaster(g) is not None:
            return 0
        return 1 + max(f(naive_compose(g, m)) for m in moves)

    return f(identity(n))


def _all_parent_arrays(n: int):
    for root in range(n):
        for parent in itertools.product(range(n), repeat=n):
            if parent[root] != root or any(parent[v] == v for v in range(n) if v != root):
                continue
            ok = True
            for v in range(n):
                u, steps = v, 0
                while u != root and steps < n:
                    u, steps = parent[u], steps + 1
                if u != root:
                    ok = False
                    break
            if ok:
                yield root, parent


def _parent_array_matrix(n: int, root: int, parent) -> ReachMatrix:
    entries = [[int(x == y) for y in range(n)] for x in range(n)]
    for v in range(n):
        if v != root:
            entries[parent[v]][v] = 1
    return ReachMatrix.from_lists(entries)


@dataclass(frozen=True)
class BoundCheck:
    n: int
    tstar: int
    lower: int
    upper: int
    witness_length: int

    @property
    def lower_violation(self) -> bool:
        return self.tstar < self.lower

    @property
    def upper_violation(self) -> bool:
        return self.tstar > self.upper

    @property
    def passed(self) -> bool:
        return not (self.lower_violation or self.upper_violation)

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        flags = []
        if self.lower_violation:
            flags.append("below lower bound")
        if self.upper_violation:
            flags.append("above upper bound")
        extra = f" ({', '.join(flags)})" if flags else ""
        return (
            f"{verdict}: n={self.n} t*={self.tstar} window=[{self.lower},{self.upper}] "
            f"witness_length={self.witness_length}{extra}"
        )


def verify_bounds(result: SearchResult) -> BoundCheck:
    w = bound_window(result.n)
    return BoundCheck(result.n, result.tstar, w.lower, w.upper, len(result.witness))


def replay_witness(result: SearchResult) -> bool:
    """True if the witness broadcasts in exactly ``tstar`` rounds."""
    trace = run_schedule(result.witness)
    if not trace.completed or trace.tstar != result.tstar:
        return False
    last = trace.rounds[-1] if trace.rounds else None
    return last is not None and last.broadcaster is not None


__all__ = [
    "BoundCheck",
    "BoundWindow",
    "MemoryBudgetExceeded",
    "SearchResult",
    "SearchStats",
    "bound_window",
    "brute_force_tstar",
    "exact_tstar",
    "lower_bound",
    "replay_witness",
    "upper_bound",
    "verify_bounds",
]
