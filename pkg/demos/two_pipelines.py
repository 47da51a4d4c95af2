"""Count resonance chambers twice and watch the numbers agree.

The first count enumerates chambers of the arrangement directly.  The second
never touches the arrangement: it builds the compatibility graph of
alternating trees, lists maximal cliques, and keeps those whose cones share
an interior point.  Grouping the survivors by source set also shows the
symmetric triangle whose weighted row sums give the same totals.

    python demos/two_pipelines.py [max_n]      # default 4; 5 takes about a minute
"""

import sys
import time

from chamber_atlas.arrangement import enumerate_chambers, resonance_arrangement
from chamber_atlas.graph import (
    build_compatibility_graph,
    classify_cliques,
    source_set_decomposition,
    weighted_indexable_sum,
)


def main(max_n: int = 4) -> None:
    print(" n  chambers  cliques  indexable  weighted  triangle")
    for n in range(1, max_n + 1):
        t0 = time.perf_counter()
        chambers = len(enumerate_chambers(resonance_arrangement(n)))
        t1 = time.perf_counter()
        G = build_compatibility_graph(n + 1)
        report = classify_cliques(G)
        rows = source_set_decomposition(G, report)
        t2 = time.perf_counter()
        triangle = [r.indexable for r in rows.values()]
        print(
            f"{n:2d}  {chambers:8d}  {report.clique_count:7d}  {report.indexable_count:9d}"
            f"  {weighted_indexable_sum(rows, n):8d}  {triangle}"
            f"   ({t1 - t0:.1f}s / {t2 - t1:.1f}s)"
        )


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 4)
