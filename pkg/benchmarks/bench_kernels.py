"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit

from treecast import _fallback
from treecast.trees import enumerate_trees

try:
    from treecast import _kernels
except ImportError:
    _kernels = None


def random_rows(n, rng, density):
    return tuple((1 << x) | sum(1 << y for y in range(n) if rng.random() < density) for x in range(n))


def cases(rng):
    small_a, small_b = random_rows(8, rng, 0.3), random_rows(8, rng, 0.3)
    wide_a, wide_b = random_rows(100, rng, 0.2), random_rows(100, rng, 0.05)
    six = random_rows(6, rng, 0.4)
    yield "compose n=8", 2000, lambda k: k.compose_rows(small_a, small_b, 8)
    yield "compose n=100", 200, lambda k: k.compose_rows(wide_a, wide_b, 100)
    yield "canonical n=6", 50, lambda k: k.canonical_rows(six, 6)

    for n, canon in ((4, True), (4, False), (5, True)):
        moves = [(t.root, t.parent) for t in enumerate_trees(n)]
        ident = tuple(1 << x for x in range(n))
        yield (
            f"search n={n} {'canonical' if canon else 'raw'}",
            1,
            lambda k, n=n, moves=moves, ident=ident, canon=canon: k.Searcher(n, moves, canon).value(ident),
        )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{'case':<24}" + "".join(f"{name:>14}" for name, _ in backends) + ("     speedup" if _kernels else ""))
    for label, number, fn in cases(random.Random(0)):
        times = []
        for _, k in backends:
            best = min(timeit.repeat(lambda: fn(k), number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:<24}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
