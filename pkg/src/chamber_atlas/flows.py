"""Circulations, cone intersections and flow rerouting on alternating trees."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    AlternatingTree,
    Arc,
    FlowAssignment,
    RationalPoint,
    Sign,
    induce_point,
    is_sign_compatible,
    resonance_sign_vector,
    subset_sums,
)
from .errors import DomainError, InvariantError
from .lp import FeasibilityResult, LinearSystem, lp_feasible, open_cone_point

__all__ = [
    "DirectedMultigraph",
    "FeasibilityResult",
    "LinearSystem",
    "lp_feasible",
    "circulation_graph",
    "circulation_system",
    "find_strictly_positive_circulation",
    "has_strictly_positive_circulation",
    "cones_intersect_fulldim",
    "indexability_system",
    "is_indexable",
    "common_interior_point",
    "positive_root_cone_contains",
    "positive_root_cone_contains_lp",
    "reroute_flow",
    "reroute_until_positive",
]


@dataclass(frozen=True)
class DirectedMultigraph:
    n: int
    arcs: tuple[Arc, ...]

    @classmethod
    def of(cls, n: int, arcs: Iterable[Arc]) -> "DirectedMultigraph":
        arcs = tuple(sorted(arcs))
        for a, b in arcs:
            if not (1 <= a <= n and 1 <= b <= n):
                raise DomainError(f"arc {(a, b)} leaves [{n}]")
        return cls(n, arcs)

    def out_arcs(self, mask: int) -> list[Arc]:
        return [(a, b) for a, b in self.arcs if mask >> (a - 1) & 1 and not mask >> (b - 1) & 1]

    def in_arcs(self, mask: int) -> list[Arc]:
        return [(a, b) for a, b in self.arcs if mask >> (b - 1) & 1 and not mask >> (a - 1) & 1]


def _same_n(t1: AlternatingTree, t2: AlternatingTree) -> None:
    if t1.n != t2.n:
        raise DomainError(f"trees on [{t1.n}] and [{t2.n}] cannot be combined")


def circulation_graph(t1: AlternatingTree, t2: AlternatingTree) -> DirectedMultigraph:
    """Arcs of ``t1`` together with the reversed arcs of ``t2``."""
    _same_n(t1, t2)
    return DirectedMultigraph.of(t1.n, list(t1.arcs) + [(b, a) for a, b in t2.arcs])


def circulation_system(
    graph: DirectedMultigraph, lower: int = 1, upper: int | None = None
) -> LinearSystem:
    """Conservation at every vertex with ``lower <= f(a) [<= upper]``.

    An upper bound is modelled with one slack variable per arc.
    """
    m = len(graph.arcs)
    names = [f"f{k}:{a}->{b}" for k, (a, b) in enumerate(graph.arcs)]
    rows = []
    for v in range(1, graph.n + 1):
        row = [0] * m
        for k, (a, b) in enumerate(graph.arcs):
            if a == v:
                row[k] += 1
            if b == v:
                row[k] -= 1
        rows.append(row)
    lbs: list = [lower] * m
    if upper is not None:
        names += [f"s{k}" for k in range(m)]
        rows = [r + [0] * m for r in rows]
        for k in range(m):
            row = [0] * (2 * m)
            row[k] = 1
            row[m + k] = 1
            rows.append(row)
        lbs += [0] * m
        return LinearSystem.build(names, [(r, 0) for r in rows[: graph.n]] + [(r, upper) for r in rows[graph.n:]], lbs)
    return LinearSystem.build(names, [(r, 0) for r in rows], lbs)


def find_strictly_positive_circulation(
    graph: DirectedMultigraph, upper: int | None = None
) -> FeasibilityResult:
    """Circulation with every arc value at least 1 (and at most ``upper``)."""
    if not graph.arcs:
        return FeasibilityResult(True, {}, None)
    return lp_feasible(circulation_system(graph, 1, upper))


def has_strictly_positive_circulation(graph: DirectedMultigraph, upper: int | None = None) -> bool:
    return find_strictly_positive_circulation(graph, upper).feasible


def cones_intersect_fulldim(
    t1: AlternatingTree, t2: AlternatingTree, check: bool = False
) -> bool:
    """Whether the root cones of two trees meet in a full-dimensional set.

    With ``check`` the circulation verdict is compared against sign
    compatibility and any disagreement raises :class:`InvariantError`.
    """
    verdict = has_strictly_positive_circulation(circulation_graph(t1, t2))
    if check and verdict != is_sign_compatible(t1, t2):
        raise InvariantError(f"circulation and sign tests disagree on {t1} / {t2}")
    return verdict


# ---------------------------------------------------------------------------
# indexability
# ---------------------------------------------------------------------------

def indexability_system(trees: Sequence[AlternatingTree]) -> LinearSystem:
    """Flows ``>= 1`` on every tree, all inducing the first tree's point."""
    n = trees[0].n
    names = []
    offsets = []
    for t, tree in enumerate(trees):
        offsets.append(len(names))
        names += [f"T{t}:{a}->{b}" for a, b in tree.arcs]
    rows = []
    for t in range(1, len(trees)):
        # coordinate n is implied by the other coordinates (both points sum to 0)
        for v in range(1, n):
            row = [0] * len(names)
            for sign, idx in ((1, 0), (-1, t)):
                for k, (a, b) in enumerate(trees[idx].arcs):
                    if a == v:
                        row[offsets[idx] + k] += sign
                    elif b == v:
                        row[offsets[idx] + k] -= sign
            rows.append((row, 0))
    return LinearSystem.build(names, rows, 1)


def _facet_normals(trees: Sequence[AlternatingTree]) -> list[list[int]]:
    """Inner facet normals of the tree cones, in coordinates ``x_1..x_{n-1}``.

    ``x_n`` is eliminated through ``x_n = -(x_1 + ... + x_{n-1})``.
    """
    n = trees[0].n
    top = 1 << (n - 1)
    seen = set()
    normals = []
    for tree in trees:
        for side in tree.cut_sides():
            if side & top:
                # the side holds vertex n: use minus the complement's sum
                comp = ((1 << n) - 1) ^ side
                vec = [-1 if comp >> i & 1 else 0 for i in range(n - 1)]
            else:
                vec = [1 if side >> i & 1 else 0 for i in range(n - 1)]
            key = tuple(vec)
            if key not in seen:
                seen.add(key)
                normals.append(vec)
    return normals


def common_interior_point(trees: Sequence[AlternatingTree]) -> RationalPoint | None:
    """A point inducing flows ``>= 1`` on every tree, or ``None``."""
    x = open_cone_point(_facet_normals(trees))
    if x is None:
        return None
    return RationalPoint(tuple(x) + (-sum(x),))


def is_indexable(
    trees: Sequence[AlternatingTree], method: str = "facets", check_pairs: bool = True
) -> bool:
    """Whether the root cones of ``trees`` share a full-dimensional region.

    ``method="flows"`` solves the flow system directly; ``"facets"`` first
    eliminates the flow variables (each tree's flow is a linear function of the
    common point) and solves the resulting system on the point alone.
    """
    trees = list(trees)
    if not trees:
        raise DomainError("indexability of an empty collection is undefined")
    n = trees[0].n
    if any(t.n != n for t in trees):
        raise DomainError("all trees must live on the same vertex set")
    if check_pairs:
        for i, a in enumerate(trees):
            for b in trees[i + 1:]:
                if not a.sign_vector.compatible_with(b.sign_vector):
                    return False
    if method == "flows":
        if len(trees) == 1:
            return True
        return lp_feasible(indexability_system(trees)).feasible
    if method == "facets":
        return common_interior_point(trees) is not None
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# positive root cone
# ---------------------------------------------------------------------------

def _root_space_point(x) -> tuple[Fraction, ...]:
    coords = tuple(Fraction(v) for v in x)
    if sum(coords) != 0:
        raise DomainError("point is not in the root space")
    return coords


def positive_root_cone_contains(x, strict: bool = False) -> bool:
    """Membership in the cone of positive roots via prefix sums."""
    coords = _root_space_point(x)
    s = Fraction(0)
    for c in coords[:-1]:
        s += c
        if s < 0 or (strict and s == 0):
            return False
    return True


def positive_root_cone_contains_lp(x, strict: bool = False) -> bool:
    """Same question answered by a flow on the complete positive graph."""
    coords = _root_space_point(x)
    n = len(coords)
    arcs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    names = [f"f{i}{j}" for i, j in arcs]
    rows = []
    for v in range(1, n + 1):
        row = [(1 if i == v else -1 if j == v else 0) for i, j in arcs]
        rows.append((row, coords[v - 1]))
    if strict:
        # Interior points are positive combinations of every generator.  Ask
        # for f >= 1 inducing t*x with t >= 0; t = 0 would give a positive
        # circulation on an acyclic graph, so feasibility forces t > 0.
        rows_t = [(list(r) + [-b], 0) for r, b in rows]
        return lp_feasible(LinearSystem.build(names + ["t"], rows_t, 1)).feasible
    return lp_feasible(LinearSystem.build(names, rows, 0)).feasible


# ---------------------------------------------------------------------------
# rerouting flows towards a + entry
# ---------------------------------------------------------------------------

def _tree_path(arcs: Sequence[Arc], start: int, goal: int) -> list[tuple[int, int, Arc]]:
    """Undirected path ``start -> goal`` as ``(from, to, arc)`` steps."""
    adj: dict[int, list[tuple[int, Arc]]] = {}
    for a, b in arcs:
        adj.setdefault(a, []).append((b, (a, b)))
        adj.setdefault(b, []).append((a, (a, b)))
    prev: dict[int, tuple[int, Arc] | None] = {start: None}
    stack = [start]
    while stack:
        v = stack.pop()
        if v == goal:
            break
        for w, arc in adj.get(v, []):
            if w not in prev:
                prev[w] = (v, arc)
                stack.append(w)
    if goal not in prev:
        raise DomainError(f"{start} and {goal} are not connected")
    steps = []
    v = goal
    while prev[v] is not None:
        u, arc = prev[v]
        steps.append((u, v, arc))
        v = u
    return steps[::-1]


def _check_generic(x: Sequence[Fraction]) -> None:
    n = len(x)
    sums = subset_sums(x, n)
    full = (1 << n) - 1
    for s in range(1, full):
        if sums[s] == 0:
            raise DomainError("point lies on a resonance hyperplane")


def reroute_flow(
    tree: AlternatingTree, flow: FlowAssignment, I: int, arc: Arc
) -> tuple[AlternatingTree, FlowAssignment]:
    """One cycle-exchange step removing flow from an arc that enters ``I``.

    ``I`` is a proper nonempty vertex mask with positive net outflow, and
    ``arc = (k, l)`` enters it.  The result induces the same point, never adds
    an arc entering ``I``, and either drops ``arc`` or strictly lowers its flow.
    """
    n = tree.n
    full = (1 << n) - 1
    if not 0 < I < full:
        raise DomainError("I must be a proper nonempty subset")
    if flow.arcs != tree.arcs or not all(v > 0 and v.denominator == 1 for v in flow.values):
        raise DomainError("flow must be a positive integer flow on the tree")
    x = induce_point(tree, flow)
    _check_generic(x.coords)
    if sum(x[i] for i in range(n) if I >> i & 1) <= 0:
        raise DomainError("the net outflow of I must be positive")
    k, l = arc
    if arc not in tree.arcs or I >> (k - 1) & 1 or not I >> (l - 1) & 1:
        raise DomainError(f"{arc} is not an arc entering I")
    out_arcs = [(a, b) for a, b in tree.arcs if I >> (a - 1) & 1 and not I >> (b - 1) & 1]
    i, j = out_arcs[0]

    path = _tree_path(tree.arcs, k, j)
    path_arcs = {step[2] for step in path}
    if arc in path_arcs:
        new = (k, j)
    else:
        new = (i, l)
    # cycle = new arc + tree path between its endpoints; walk it starting with
    # (k, l) traversed forwards
    ends = _tree_path(tree.arcs, new[1], new[0])  # head -> tail in the tree
    cycle_steps = ends + [(new[0], new[1], new)]
    start = next(idx for idx, (u, v, a) in enumerate(cycle_steps) if a == arc)
    if cycle_steps[start][:2] != (k, l):
        cycle_steps = [(v, u, a) for u, v, a in reversed(cycle_steps)]
        start = next(idx for idx, (u, v, a) in enumerate(cycle_steps) if a == arc)
    cycle_steps = cycle_steps[start:] + cycle_steps[:start]
    odd = [a for u, v, a in cycle_steps if (u, v) == a]
    even = [a for u, v, a in cycle_steps if (u, v) != a]
    if len(odd) != len(even) or len(odd) < 2:
        raise InvariantError("exchange cycle is not alternating")

    values = dict(zip(flow.arcs, flow.values))
    values[new] = Fraction(0)
    fstar = min(values[a] for a in odd)
    for a in odd:
        values[a] -= fstar
    for a in even:
        values[a] += fstar
    zeros = [a for a in odd if values[a] == 0]
    if len(zeros) != 1:
        raise InvariantError(f"expected a unique emptied arc, found {zeros}")
    del values[zeros[0]]
    new_tree = AlternatingTree.from_arcs(n, values.keys())
    new_flow = FlowAssignment(new_tree.arcs, tuple(values[a] for a in new_tree.arcs))
    if induce_point(new_tree, new_flow) != x:
        raise InvariantError("rerouting changed the induced point")
    return new_tree, new_flow


def reroute_until_positive(
    tree: AlternatingTree, flow: FlowAssignment, I: int, max_steps: int | None = None
) -> tuple[AlternatingTree, FlowAssignment, int]:
    """Iterate :func:`reroute_flow` until no arc enters ``I``.

    Returns the final tree, its flow and the number of steps taken.
    """
    steps = 0
    while True:
        entering = [(a, b) for a, b in tree.arcs if I >> (b - 1) & 1 and not I >> (a - 1) & 1]
        if not entering:
            return tree, flow, steps
        if max_steps is not None and steps >= max_steps:
            raise InvariantError("rerouting did not terminate within the step budget")
        tree, flow = reroute_flow(tree, flow, I, entering[0])
        steps += 1


def resonance_sign(x, I: int) -> Sign:
    return resonance_sign_vector(x)[I]
