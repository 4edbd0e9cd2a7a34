# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: boolean composition, canonical forms, exact search.

Same interface and state packing as ``_fallback``; see that module for the
layout conventions.
"""

from libc.stdint cimport uint64_t
from libc.string cimport memcpy
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref

import itertools

from .errors import MemoryBudgetExceeded

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef tuple _compose_small(tuple a, tuple b, int n):
    cdef uint64_t bw[64]
    cdef uint64_t r, acc
    cdef int x
    for x in range(n):
        bw[x] = b[x]
    out = []
    for x in range(n):
        r = a[x]
        acc = 0
        while r:
            acc |= bw[__builtin_ctzll(r)]
            r &= r - 1
        out.append(acc)
    return tuple(out)


cdef tuple _compose_wide(tuple a, tuple b, int n):
    cdef int words = (n + 63) // 64
    cdef int nbytes = 8 * words
    cdef vector[uint64_t] aw = vector[uint64_t](n * words)
    cdef vector[uint64_t] bw = vector[uint64_t](n * words)
    cdef vector[uint64_t] ow = vector[uint64_t](n * words)
    cdef bytes buf
    cdef int x, w, k, z
    cdef uint64_t r
    for x in range(n):
        buf = (<object>a[x]).to_bytes(nbytes, "little")
        memcpy(&aw[x * words], <char *>buf, nbytes)
        buf = (<object>b[x]).to_bytes(nbytes, "little")
        memcpy(&bw[x * words], <char *>buf, nbytes)
    with nogil:
        for x in range(n):
            for w in range(words):
                r = aw[x * words + w]
                while r:
                    z = w * 64 + __builtin_ctzll(r)
                    for k in range(words):
                        ow[x * words + k] |= bw[z * words + k]
                    r &= r - 1
    out = []
    for x in range(n):
        buf = (<char *>&ow[x * words])[:nbytes]
        out.append(int.from_bytes(buf, "little"))
    return tuple(out)


def compose_rows(tuple a, tuple b, int n):
    if n <= 64:
        return _compose_small(a, b, n)
    return _compose_wide(a, b, n)


def rows_to_state(tuple rows, int n):
    cdef uint64_t s = 0, r, rev
    cdef int x, y
    for x in range(n):
        r = rows[x]
        rev = 0
        for y in range(n):
            if (r >> y) & 1:
                rev |= (<uint64_t>1) << (n - 1 - y)
        s |= rev << ((n - 1 - x) * n)
    return s


def state_to_rows(uint64_t s, int n):
    cdef uint64_t full = ((<uint64_t>1) << n) - 1, lr, r
    cdef int x, y
    out = []
    for x in range(n):
        lr = (s >> ((n - 1 - x) * n)) & full
        r = 0
        for y in range(n):
            if (lr >> (n - 1 - y)) & 1:
                r |= (<uint64_t>1) << y
        out.append(r)
    return tuple(out)


def canonical_rows(tuple rows, int n):
    """Brute-force minimum over all n! relabelings (n <= 8)."""
    cdef int nn = n * n
    cdef int[64] ex
    cdef int[64] ey
    cdef int m = 0, i, x, y
    cdef uint64_t r, key, best = 0
    cdef int[8] p
    cdef bint first = True
    for x in range(n):
        r = rows[x]
        while r:
            ex[m] = x
            ey[m] = __builtin_ctzll(r)
            m += 1
            r &= r - 1
    best_perm = None
    for perm in itertools.permutations(range(n)):
        for i in range(n):
            p[i] = perm[i]
        key = 0
        for i in range(m):
            key |= (<uint64_t>1) << (nn - 1 - (p[ex[i]] * n + p[ey[i]]))
        if first or key < best:
            best = key
            best_perm = perm
            first = False
    return state_to_rows(best, n), best_perm


cdef class Searcher:
    """Memoized longest-path evaluator; see ``_fallback.Searcher``."""

    cdef readonly int n
    cdef readonly bint canonicalize
    cdef readonly long long max_entries
    cdef readonly long long expanded
    cdef readonly long long hits
    cdef int ntrees, nperms, span
    cdef uint64_t full
    cdef vector[uint64_t] images
    cdef vector[uint64_t] perm_rows
    cdef vector[int] perm_shifts
    cdef unordered_map[uint64_t, int] memo
    cdef bint overflow

    backend = "compiled"

    def __init__(self, int n, trees, bint canonicalize=True, long long max_entries=10_000_000):
        cdef int t, v, r, z, x, y, k
        cdef uint64_t low
        if not 1 <= n <= 8:
            raise ValueError(f"search states support 1 <= n <= 8, got {n}")
        self.n = n
        self.canonicalize = canonicalize
        self.max_entries = max_entries
        self.expanded = 0
        self.hits = 0
        self.overflow = False
        self.full = ((<uint64_t>1) << n) - 1
        self.span = 1 << n

        trees = list(trees)
        self.ntrees = len(trees)
        self.images.resize(self.ntrees * self.span)
        cdef vector[uint64_t] children = vector[uint64_t](n)
        for t in range(self.ntrees):
            root, parent = trees[t]
            for v in range(n):
                children[v] = 0
            for v in range(n):
                if v != root:
                    children[parent[v]] |= (<uint64_t>1) << (n - 1 - v)
            for r in range(1, self.span):
                low = r & -r
                z = n - 1 - __builtin_ctzll(low)
                self.images[t * self.span + r] = (
                    self.images[t * self.span + (r ^ low)] | low | children[z]
                )

        self.nperms = 0
        if canonicalize:
            perms = list(itertools.permutations(range(n)))
            self.nperms = len(perms)
            self.perm_rows.resize(self.nperms * self.span)
            self.perm_shifts.resize(self.nperms * n)
            for k in range(self.nperms):
                perm = perms[k]
                for r in range(1, self.span):
                    low = r & -r
                    y = n - 1 - __builtin_ctzll(low)
                    self.perm_rows[k * self.span + r] = (
                        self.perm_rows[k * self.span + (r ^ low)]
                        | ((<uint64_t>1) << (n - 1 - <int>perm[y]))
                    )
                for x in range(n):
                    self.perm_shifts[k * n + x] = (n - 1 - <int>perm[x]) * n

    @property
    def stats(self):
        return {"expanded": self.expanded, "entries": <long long>self.memo.size(), "hits": self.hits}

    cdef bint _broadcast(self, uint64_t s) noexcept nogil:
        cdef int x
        for x in range(self.n):
            if ((s >> ((self.n - 1 - x) * self.n)) & self.full) == self.full:
                return True
        return False

    cdef uint64_t _canon(self, uint64_t s) noexcept nogil:
        cdef uint64_t rows[8]
        cdef uint64_t best = s, key
        cdef int x, k, n = self.n
        cdef const uint64_t *table
        cdef const int *shifts
        for x in range(n):
            rows[x] = (s >> ((n - 1 - x) * n)) & self.full
        for k in range(self.nperms):
            table = &self.perm_rows[k * self.span]
            shifts = &self.perm_shifts[k * n]
            key = 0
            for x in range(n):
                key |= table[rows[x]] << shifts[x]
            if key < best:
                best = key
        return best

    cdef int _value(self, uint64_t s) noexcept nogil:
        cdef uint64_t key, child
        cdef uint64_t rows[8]
        cdef int x, t, v, best = 0, n = self.n
        cdef const uint64_t *img
        cdef unordered_set[uint64_t] seen
        cdef unordered_map[uint64_t, int].iterator it
        if self._broadcast(s):
            return 0
        key = self._canon(s) if self.canonicalize else s
        it = self.memo.find(key)
        if it != self.memo.end():
            self.hits += 1
            return deref(it).second
        self.expanded += 1
        for x in range(n):
            rows[x] = (key >> ((n - 1 - x) * n)) & self.full
        for t in range(self.ntrees):
            img = &self.images[t * self.span]
            child = 0
            for x in range(n):
                child |= img[rows[x]] << ((n - 1 - x) * n)
            if not seen.insert(child).second:
                continue
            v = self._value(child)
            if v < 0:
                return -1
            if v > best:
                best = v
        if <long long>self.memo.size() >= self.max_entries:
            self.overflow = True
            return -1
        self.memo[key] = best + 1
        return best + 1

    def value(self, tuple rows):
        cdef uint64_t s = rows_to_state(rows, self.n)
        cdef int v
        if self.overflow:
            raise MemoryBudgetExceeded(self.max_entries, self.stats)
        with nogil:
            v = self._value(s)
        if v < 0:
            raise MemoryBudgetExceeded(self.max_entries, self.stats)
        return v
