"""Boolean reachability matrices.

A :class:`ReachMatrix` holds the product graph ``G(t)``: entry ``(x, y)`` is
set when information from ``x`` has reached ``y``. Each row is packed into a
Python int (bit ``y`` of ``rows[x]``), so a broadcaster is a full row.

Composition is not commutative. Rounds are applied as ``G(t) = compose(G(t-1),
G_t)``: the accumulated matrix on the left, the new round on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ._backend import kernels
from .errors import DimensionMismatch

MAX_CANONICAL_N = 8


@dataclass(frozen=True)
class ReachMatrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"matrix size must be positive, got n={self.n}")
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        for x, r in enumerate(self.rows):
            if not 0 <= r < limit:
                raise ValueError(f"row {x} has bits outside [0, {self.n})")
            if not (r >> x) & 1:
                raise ValueError(f"diagonal entry ({x},{x}) is not set")

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int | bool]]) -> ReachMatrix:
        n = len(entries)
        rows = []
        for x, row in enumerate(entries):
            if len(row) != n:
                raise ValueError(f"row {x} has length {len(row)}, expected {n}")
            rows.append(sum(1 << y for y, v in enumerate(row) if v))
        return cls(n, tuple(rows))

    @classmethod
    def from_edges(cls, n: int, edges) -> ReachMatrix:
        """Identity plus the given ``(x, y)`` edges."""
        rows = [1 << x for x in range(n)]
        for x, y in edges:
            rows[x] |= 1 << y
        return cls(n, tuple(rows))

    def __getitem__(self, xy: tuple[int, int]) -> bool:
        x, y = xy
        return bool((self.rows[x] >> y) & 1)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> y) & 1 for y in range(self.n)] for r in self.rows]

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines += ["".join("1" if (r >> y) & 1 else "0" for y in range(self.n)) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ReachMatrix:
        lines = [ln.strip() for ln in text.strip().splitlines()]
        n = int(lines[0])
        body = lines[1:]
        if len(body) != n or any(len(ln) != n or set(ln) - {"0", "1"} for ln in body):
            raise ValueError(f"expected {n} lines of {n} '0'/'1' characters")
        return cls.from_lists([[c == "1" for c in ln] for ln in body])

    def __str__(self) -> str:
        return self.to_text().rstrip("\n")

    def contains(self, other: ReachMatrix) -> bool:
        """True if every entry set in ``other`` is set here."""
        _check_same_n(self, other)
        return all(o & ~s == 0 for s, o in zip(self.rows, other.rows))


def _check_same_n(a: ReachMatrix, b: ReachMatrix) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"matrix sizes differ: {a.n} vs {b.n}")


def identity(n: int) -> ReachMatrix:
    """Round-0 state: every node has heard only from itself."""
    if n < 1:
        raise ValueError(f"matrix size must be positive, got n={n}")
    return ReachMatrix(n, tuple(1 << x for x in range(n)))


def all_ones(n: int) -> ReachMatrix:
    full = (1 << n) - 1
    return ReachMatrix(n, (full,) * n)


def compose(a: ReachMatrix, b: ReachMatrix) -> ReachMatrix:
    """Product graph: ``(x, y)`` is set iff some ``z`` has ``a[x, z]`` and ``b[z, y]``."""
    _check_same_n(a, b)
    return ReachMatrix(a.n, kernels.compose_rows(a.rows, b.rows, a.n))


def naive_compose(a: ReachMatrix, b: ReachMatrix) -> ReachMatrix:
    """Per-entry O(n^3) product on unpacked lists. Kept as an oracle."""
    _check_same_n(a, b)
    n = a.n
    al, bl = a.to_lists(), b.to_lists()
    out = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if al[x][z] and bl[z][y]:
                    out[x][y] = 1
                    break
    return ReachMatrix.from_lists(out)


def has_broadcaster(m: ReachMatrix) -> int | None:
    """Smallest node whose row is full, or ``None``."""
    full = (1 << m.n) - 1
    for x, r in enumerate(m.rows):
        if r == full:
            return x
    return None


def popcount(m: ReachMatrix) -> int:
    return sum(r.bit_count() for r in m.rows)


def permute(m: ReachMatrix, perm: Sequence[int]) -> ReachMatrix:
    """Relabel node ``x`` as ``perm[x]`` on both rows and columns."""
    n = m.n
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of range({n}): {list(perm)}")
    rows = [0] * n
    for x, r in enumerate(m.rows):
        nr = 0
        for y in range(n):
            if (r >> y) & 1:
                nr |= 1 << perm[y]
        rows[perm[x]] = nr
    return ReachMatrix(n, tuple(rows))


def canonical_form(m: ReachMatrix) -> tuple[ReachMatrix, tuple[int, ...]]:
    """Lexicographically smallest relabeling of ``m`` and a permutation reaching it.

    Order is row-major with ``(0, 0)`` most significant and 0 < 1. All ``n!``
    permutations are tried, so ``n`` is capped at 8. The returned ``perm``
    satisfies ``permute(m, perm) == canon``.
    """
    if m.n > MAX_CANONICAL_N:
        raise ValueError(f"canonical_form supports n <= {MAX_CANONICAL_N}, got {m.n}")
    rows, perm = kernels.canonical_rows(m.rows, m.n)
    return ReachMatrix(m.n, tuple(rows)), tuple(perm)
