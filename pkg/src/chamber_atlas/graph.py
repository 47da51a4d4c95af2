"""Compatibility graphs of alternating trees and their maximal cliques.

Adjacency rows are Python ints used as bitsets.  Trees with different source
sets are never sign compatible, and canonical vertex order keeps each source
set contiguous, so adjacency is built block by block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Sequence

from .core import (
    AlternatingTree,
    enumerate_alternating_trees,
    enumerate_positive_alternating_trees,
    format_subset,
    format_tree,
)
from .errors import BoundsError, InvariantError, ResourceError
from .flows import is_indexable

LARGE_N = 7


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class CompatGraph:
    n: int
    vertices: tuple[AlternatingTree, ...]
    adjacency: tuple[int, ...]
    positive_only: bool = False

    def __len__(self) -> int:
        return len(self.vertices)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i] >> j & 1)

    def neighbours(self, i: int) -> list[int]:
        return list(_bits(self.adjacency[i]))

    def edge_count(self) -> int:
        return sum(bin(row).count("1") for row in self.adjacency) // 2

    def induced(self, mask: int) -> "CompatGraph":
        """Subgraph on the vertices in ``mask``, reindexed in canonical order."""
        keep = list(_bits(mask))
        pos = {v: k for k, v in enumerate(keep)}
        rows = []
        for v in keep:
            row = 0
            for u in _bits(self.adjacency[v] & mask):
                row |= 1 << pos[u]
            rows.append(row)
        return CompatGraph(self.n, tuple(self.vertices[v] for v in keep), tuple(rows), self.positive_only)


def build_compatibility_graph(
    n: int, positive_only: bool = False, allow_large: bool = False
) -> CompatGraph:
    if not 2 <= n <= LARGE_N:
        raise BoundsError(f"compatibility graphs need 2 <= n <= {LARGE_N}")
    if n == LARGE_N and not allow_large:
        raise BoundsError(f"n={LARGE_N} is long-running; pass allow_large")
    trees = (enumerate_positive_alternating_trees if positive_only else enumerate_alternating_trees)(n)
    signs = [(t.sources, t.sign_vector.plus, t.sign_vector.minus) for t in trees]
    rows = [0] * len(trees)
    start = 0
    while start < len(trees):
        end = start
        while end < len(trees) and signs[end][0] == signs[start][0]:
            end += 1
        for i in range(start, end):
            _, pi, mi = signs[i]
            for j in range(i + 1, end):
                _, pj, mj = signs[j]
                if not (pi & mj) and not (mi & pj):
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
        start = end
    return CompatGraph(n, tuple(trees), tuple(rows), positive_only)


def connected_components(G: CompatGraph) -> list[int]:
    """Vertex bitmasks of the components, ordered by smallest member."""
    seen = 0
    out = []
    for v in range(len(G)):
        if seen >> v & 1:
            continue
        comp = frontier = 1 << v
        while frontier:
            nxt = 0
            for u in _bits(frontier):
                nxt |= G.adjacency[u]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        out.append(comp)
    return out


def _bron_kerbosch(adj: Sequence[int], R: int, P: int, X: int, out: list[int]) -> None:
    if not P and not X:
        out.append(R)
        return
    pivot = max(_bits(P | X), key=lambda u: bin(P & adj[u]).count("1"))
    for v in _bits(P & ~adj[pivot]):
        _bron_kerbosch(adj, R | 1 << v, P & adj[v], X & adj[v], out)
        P &= ~(1 << v)
        X |= 1 << v


def enumerate_maximal_cliques(G: CompatGraph) -> list[tuple[int, ...]]:
    """All maximal cliques as sorted index tuples, in lexicographic order."""
    cliques: list[int] = []
    for comp in connected_components(G):
        _bron_kerbosch(G.adjacency, 0, comp, 0, cliques)
    return sorted(tuple(_bits(c)) for c in cliques)


def is_clique(G: CompatGraph, members: Sequence[int]) -> bool:
    return all(G.adjacent(a, b) for a, b in combinations(members, 2))


def is_maximal_clique(G: CompatGraph, members: Sequence[int]) -> bool:
    if not is_clique(G, members):
        return False
    common = (1 << len(G)) - 1
    for v in members:
        common &= G.adjacency[v]
    return common == 0


def restricted_sources(tree: AlternatingTree) -> int:
    """Source set among the first ``n-1`` vertices."""
    return tree.sources & ((1 << (tree.n - 1)) - 1)


@dataclass(frozen=True)
class CliqueReport:
    n: int
    positive_only: bool
    cliques: tuple[tuple[int, ...], ...]
    indexable_flags: tuple[bool, ...]
    per_source_set_counts: dict[int, int] = field(default_factory=dict)

    @property
    def clique_count(self) -> int:
        return len(self.cliques)

    @property
    def indexable_count(self) -> int:
        return sum(self.indexable_flags)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "positive_only": self.positive_only,
            "clique_count": self.clique_count,
            "indexable_count": self.indexable_count,
            "per_source_set": {
                format_subset(m): c for m, c in sorted(self.per_source_set_counts.items())
            },
        }


def classify_cliques(
    G: CompatGraph,
    cliques: Sequence[tuple[int, ...]] | None = None,
    method: str = "facets",
    mapper: Callable = map,
) -> CliqueReport:
    """Test every maximal clique for indexability.

    ``mapper`` may be a parallel ``map``; results are consumed in clique order.
    """
    if cliques is None:
        cliques = enumerate_maximal_cliques(G)
    groups = [[G.vertices[v] for v in c] for c in cliques]
    flags = tuple(mapper(_indexable_facets if method == "facets" else _indexable_flows, groups))
    per: dict[int, int] = {}
    for c, ok in zip(cliques, flags):
        if ok:
            key = restricted_sources(G.vertices[c[0]])
            per[key] = per.get(key, 0) + 1
    return CliqueReport(G.n, G.positive_only, tuple(cliques), flags, per)


def _indexable_facets(trees):
    return is_indexable(trees, method="facets", check_pairs=False)


def _indexable_flows(trees):
    return is_indexable(trees, method="flows", check_pairs=False)


@dataclass(frozen=True)
class SourceSetRow:
    """Statistics of the subgraph on trees with ``k`` sources among the first ``n-1`` vertices.

    ``components`` and ``cliques`` refer to one source set of that size; all
    such source sets give the same values.
    """

    k: int
    components: int
    cliques: int
    indexable: int


def source_set_decomposition(G: CompatGraph, report: CliqueReport | None = None) -> dict[int, SourceSetRow]:
    if G.positive_only:
        raise InvariantError("the source-set decomposition needs the full graph")
    if report is None:
        report = classify_cliques(G)
    m = G.n - 1
    members: dict[int, int] = {}
    for v, t in enumerate(G.vertices):
        key = restricted_sources(t)
        members[key] = members.get(key, 0) | 1 << v
    cliques: dict[int, int] = {}
    indexable: dict[int, int] = {}
    for c, ok in zip(report.cliques, report.indexable_flags):
        key = restricted_sources(G.vertices[c[0]])
        cliques[key] = cliques.get(key, 0) + 1
        indexable[key] = indexable.get(key, 0) + ok
    full = (1 << m) - 1
    rows: dict[int, SourceSetRow] = {}
    for I in range(1 << m):
        stats = (
            len(connected_components(G.induced(members.get(I, 0)))),
            cliques.get(I, 0),
            indexable.get(I, 0),
        )
        if indexable.get(I, 0) != indexable.get(full ^ I, 0):
            raise InvariantError(f"complement symmetry fails at {format_subset(I)}")
        k = bin(I).count("1")
        row = SourceSetRow(k, *stats)
        if k in rows and rows[k] != row:
            raise InvariantError(f"source sets of size {k} disagree")
        rows[k] = row
    return dict(sorted(rows.items()))


def weighted_indexable_sum(rows: dict[int, SourceSetRow], m: int) -> int:
    return sum(comb(m, k) * row.indexable for k, row in rows.items())


def to_dot(G: CompatGraph) -> str:
    lines = [f'graph "Gamma_{G.n}{"_plus" if G.positive_only else ""}" {{']
    for cid, comp in enumerate(connected_components(G)):
        lines.append(f"  subgraph cluster_{cid} {{")
        for v in _bits(comp):
            lines.append(f'    v{v} [label="{format_tree(G.vertices[v])}"];')
        lines.append("  }")
    for i in range(len(G)):
        for j in _bits(G.adjacency[i] >> (i + 1)):
            lines.append(f"  v{i} -- v{i + 1 + j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_stats(G: CompatGraph, report: CliqueReport | None = None) -> dict:
    sizes: dict[int, int] = {}
    for comp in connected_components(G):
        size = bin(comp).count("1")
        sizes[size] = sizes.get(size, 0) + 1
    out = {
        "n": G.n,
        "positive_only": G.positive_only,
        "vertices": len(G),
        "edges": G.edge_count(),
        "component_sizes": {str(k): v for k, v in sorted(sizes.items())},
    }
    if report is not None:
        out["maximal_cliques"] = report.clique_count
        out["indexable"] = report.indexable_count
    return out


def report_json(report: CliqueReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# maximal positive indexable collections
# ---------------------------------------------------------------------------

def maximal_indexable_subsets(
    G: CompatGraph,
    cliques: Sequence[tuple[int, ...]] | None = None,
    method: str = "facets",
    budget: int = 50_000,
) -> list[tuple[int, ...]]:
    """All inclusion-maximal indexable vertex sets, found without chambers.

    Every indexable set is a clique, so it sits inside some maximal clique.
    Indexable maximal cliques are maximal outright.  The others are searched
    downward by deleting one vertex at a time; candidates inside an already
    known indexable set are discarded.  ``budget`` caps the number of tests.
    """
    if cliques is None:
        cliques = enumerate_maximal_cliques(G)
    test = _indexable_facets if method == "facets" else _indexable_flows
    masks = [sum(1 << v for v in c) for c in cliques]
    flags = [test([G.vertices[v] for v in c]) for c in cliques]
    found = [m for m, ok in zip(masks, flags) if ok]
    tested = len(masks)
    seen: set[int] = set()
    for start, ok in zip(masks, flags):
        if ok:
            continue
        layer = {start}
        while layer:
            nxt = set()
            for mask in layer:
                tested += 1
                if tested > budget:
                    raise ResourceError(f"more than {budget} indexability tests")
                if test([G.vertices[v] for v in _bits(mask)]):
                    found.append(mask)
                else:
                    for v in _bits(mask):
                        nxt.add(mask & ~(1 << v))
            layer = set()
            for m in nxt:
                if m and m not in seen and not any(m & f == m for f in found):
                    seen.add(m)
                    layer.add(m)
    maximal = [f for f in found if not any(f != g and f & g == f for g in found)]
    return sorted(tuple(_bits(m)) for m in set(maximal))


@dataclass(frozen=True)
class PositiveCliqueAnswer:
    """Whether maximal positive indexable sets coincide with maximal cliques of the positive graph."""

    n: int
    maximal_indexable: int
    maximal_cliques: int
    indexable_cliques: int
    all_are_maximal_cliques: bool

    def line(self) -> str:
        verdict = "yes" if self.all_are_maximal_cliques else "no"
        return (
            f"n={self.n}: {self.maximal_indexable} maximal positive indexable sets, "
            f"{self.maximal_cliques} maximal cliques ({self.indexable_cliques} indexable); "
            f"every maximal indexable set is a maximal clique: {verdict}"
        )


def positive_clique_question(G: CompatGraph, sets: Sequence[tuple[int, ...]] | None = None) -> PositiveCliqueAnswer:
    """Compare maximal positive indexable sets with maximal cliques.

    ``sets`` may be supplied from the chamber pipeline (the distinct positive
    tree sets of the positive-cone chambers); otherwise they are searched for
    directly, which is only practical for small ``n``.
    """
    if not G.positive_only:
        raise InvariantError("expected the positive compatibility graph")
    cliques = enumerate_maximal_cliques(G)
    if sets is None:
        sets = maximal_indexable_subsets(G, cliques)
    report = classify_cliques(G, cliques)
    clique_set = set(cliques)
    return PositiveCliqueAnswer(
        G.n,
        len(sets),
        len(cliques),
        report.indexable_count,
        all(tuple(s) in clique_set for s in sets),
    )
