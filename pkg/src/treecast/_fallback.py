"""Pure-Python kernels.

Mirrors ``_kernels.pyx`` function for function so either can be selected at
import time. Matrices cross this boundary as tuples of row ints where bit ``y``
of row ``x`` is entry ``(x, y)``.

Search states use a different packing ("lex packing"): entry ``(x, y)`` sits
at bit ``n*n - 1 - (x*n + y)``, so integer order equals row-major
lexicographic order of the matrix. Canonical forms are integer minima.
"""

from __future__ import annotations

import itertools
import sys

from .errors import MemoryBudgetExceeded

_BYTE_TABLE_MIN_N = 16


def _bits(r: int):
    while r:
        low = r & -r
        yield low.bit_length() - 1
        r ^= low


def compose_rows(a: tuple[int, ...], b: tuple[int, ...], n: int) -> tuple[int, ...]:
    if n < _BYTE_TABLE_MIN_N:
        out = []
        for r in a:
            acc = 0
            while r:
                low = r & -r
                acc |= b[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return tuple(out)

    # Four-Russians style: OR-tables over 8-row chunks of b.
    tables = []
    for base in range(0, n, 8):
        chunk = b[base:base + 8]
        t = [0] * (1 << len(chunk))
        for v in range(1, len(t)):
            low = v & -v
            t[v] = t[v ^ low] | chunk[low.bit_length() - 1]
        tables.append(t)
    out = []
    for r in a:
        acc = 0
        k = 0
        while r:
            byte = r & 0xFF
            if byte:
                acc |= tables[k][byte]
            r >>= 8
            k += 1
        out.append(acc)
    return tuple(out)


def _reverse_table(n: int) -> list[int]:
    return [int(format(r, f"0{n}b")[::-1], 2) if n else 0 for r in range(1 << n)]


def rows_to_state(rows: tuple[int, ...], n: int) -> int:
    rev = _reverse_table(n)
    s = 0
    for x, r in enumerate(rows):
        s |= rev[r] << ((n - 1 - x) * n)
    return s


def state_to_rows(s: int, n: int) -> tuple[int, ...]:
    rev = _reverse_table(n)
    full = (1 << n) - 1
    return tuple(rev[(s >> ((n - 1 - x) * n)) & full] for x in range(n))


def canonical_rows(rows: tuple[int, ...], n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Brute-force minimum over all ``n!`` simultaneous relabelings.

    Returns the canonical rows and the first permutation (in
    ``itertools.permutations`` order) that maps ``rows`` onto them.
    """
    nn = n * n
    entries = [(x, y) for x in range(n) for y in _bits(rows[x])]
    best_key = None
    best_perm = None
    for p in itertools.permutations(range(n)):
        key = 0
        for x, y in entries:
            key |= 1 << (nn - 1 - (p[x] * n + p[y]))
        if best_key is None or key < best_key:
            best_key = key
            best_perm = p
    return state_to_rows(best_key, n), best_perm


class Searcher:
    """Memoized longest-path evaluator over reachability states.

    ``trees`` is the move set as ``(root, parent)`` pairs in enumeration
    order. ``value(rows)`` returns the worst-case number of further rounds
    before some row is full.
    """

    backend = "python"

    def __init__(self, n: int, trees, canonicalize: bool = True, max_entries: int = 10_000_000):
        if not 1 <= n <= 8:
            raise ValueError(f"search states support 1 <= n <= 8, got {n}")
        self.n = n
        self.canonicalize = canonicalize
        self.max_entries = max_entries
        self.expanded = 0
        self.hits = 0
        self._memo: dict[int, int] = {}
        self._full = (1 << n) - 1
        self._shifts = [(n - 1 - x) * n for x in range(n)]

        self._images = []
        for root, parent in trees:
            children = [0] * n
            for v in range(n):
                if v != root:
                    children[parent[v]] |= 1 << (n - 1 - v)
            img = [0] * (1 << n)
            for r in range(1, 1 << n):
                low = r & -r
                z = n - low.bit_length()
                img[r] = img[r ^ low] | low | children[z]
            self._images.append(img)

        self._perm_tables = []
        if canonicalize:
            for p in itertools.permutations(range(n)):
                table = [0] * (1 << n)
                for r in range(1, 1 << n):
                    low = r & -r
                    y = n - low.bit_length()
                    table[r] = table[r ^ low] | (1 << (n - 1 - p[y]))
                shifts = [(n - 1 - p[x]) * n for x in range(n)]
                self._perm_tables.append((table, shifts))

    @property
    def stats(self) -> dict:
        return {"expanded": self.expanded, "entries": len(self._memo), "hits": self.hits}

    def _broadcast(self, s: int) -> bool:
        full = self._full
        return any((s >> sh) & full == full for sh in self._shifts)

    def _canon(self, s: int) -> int:
        full = self._full
        rows = [(s >> sh) & full for sh in self._shifts]
        best = s
        for table, shifts in self._perm_tables:
            key = 0
            for r, sh in zip(rows, shifts):
                key |= table[r] << sh
            if key < best:
                best = key
        return best

    def _value(self, s: int) -> int:
        if self._broadcast(s):
            return 0
        key = self._canon(s) if self.canonicalize else s
        memo = self._memo
        v = memo.get(key)
        if v is not None:
            self.hits += 1
            return v
        self.expanded += 1
        full = self._full
        shifts = self._shifts
        rows = [(key >> sh) & full for sh in shifts]
        best = 0
        seen = set()
        for img in self._images:
            child = 0
            for r, sh in zip(rows, shifts):
                child |= img[r] << sh
            if child in seen:
                continue
            seen.add(child)
            v = self._value(child)
            if v > best:
                best = v
        if len(memo) >= self.max_entries:
            raise MemoryBudgetExceeded(self.max_entries, self.stats)
        memo[key] = best + 1
        return best + 1

    def value(self, rows: tuple[int, ...]) -> int:
        limit = sys.getrecursionlimit()
        need = self.n * self.n + 100
        if limit < need:
            sys.setrecursionlimit(need)
        return self._value(rows_to_state(tuple(rows), self.n))
