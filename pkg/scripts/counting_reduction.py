#!/usr/bin/env python3
"""Popular matchings of the regular-graph reduction vs. the permanent.

Counting is #P-complete with ties, so this only runs while the oracle's
size guard allows it.
"""

from popmatch import oracle
from popmatch.analysis import circulant, complete_bipartite, reduction_from_regular

CASES = [
    ("K3,3", 3, complete_bipartite(3)),
    ("C4(0,1,2)", 4, circulant(4)),
    ("C5(0,1,2)", 5, circulant(5)),
    ("C6(0,1,2)", 6, circulant(6)),
    ("C7(0,1,3)", 7, circulant(7, (0, 1, 3))),
    ("C8(0,1,2)", 8, circulant(8)),
]

if __name__ == "__main__":
    print(f"{'graph':<11} {'n':>2} {'popular':>8} {'permanent':>9}")
    for name, n, edges in CASES:
        inst = reduction_from_regular(n, edges)
        print(f"{name:<11} {n:>2} {oracle.count_popular(inst):>8} {oracle.perfect_matching_count(n, edges):>9}")
