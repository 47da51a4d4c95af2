import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import assume, given, strategies as st

from chamber_atlas.core import (
    AlternatingTree,
    FlowAssignment,
    RationalPoint,
    Sign,
    enumerate_alternating_trees,
    induce_point,
    is_sign_compatible,
    resonance_sign_vector,
    subset_sums,
    tree_flow,
)
from chamber_atlas.errors import DomainError
from chamber_atlas.flows import (
    DirectedMultigraph,
    circulation_graph,
    common_interior_point,
    cones_intersect_fulldim,
    find_strictly_positive_circulation,
    has_strictly_positive_circulation,
    is_indexable,
    positive_root_cone_contains,
    positive_root_cone_contains_lp,
    reroute_flow,
    reroute_until_positive,
    resonance_sign,
)
from chamber_atlas.graph import build_compatibility_graph, enumerate_maximal_cliques


def tree(n, *arcs):
    return AlternatingTree.from_arcs(n, arcs)


TRIPLE = (
    tree(6, (1, 4), (1, 5), (2, 4), (3, 5), (3, 6)),
    tree(6, (1, 6), (2, 5), (2, 6), (3, 4), (3, 6)),
    tree(6, (1, 4), (1, 5), (2, 4), (2, 6), (3, 5)),
)


class TestCirculations:
    def test_graph_reverses_second_tree(self):
        g = circulation_graph(tree(3, (1, 2), (1, 3)), tree(3, (1, 3), (2, 3)))
        assert g.arcs == ((1, 2), (1, 3), (3, 1), (3, 2))

    def test_alternating_four_cycle(self):
        # the alternating 4-cycle 1->3->7->2->1 lives in C(T, T')
        T = tree(7, (1, 2), (1, 3), (4, 3), (4, 5), (6, 5), (7, 2))
        T2 = tree(7, (1, 2), (1, 3), (4, 2), (4, 5), (6, 5), (7, 3))
        arcs = set(circulation_graph(T, T2).arcs)
        assert {(1, 3), (3, 7), (7, 2), (2, 1)} <= arcs
        assert cones_intersect_fulldim(T, T2, check=True) == is_sign_compatible(T, T2)

    def test_witness_is_a_circulation(self):
        g = DirectedMultigraph.of(3, [(1, 2), (2, 3), (3, 1)])
        result = find_strictly_positive_circulation(g)
        assert result and all(v >= 1 for v in result.witness.values())

    def test_upper_bounds(self):
        # the lone reverse arc must carry the sum of two parallel arcs
        g = DirectedMultigraph.of(2, [(1, 2), (1, 2), (2, 1)])
        assert has_strictly_positive_circulation(g)
        assert not has_strictly_positive_circulation(g, upper=1)
        assert has_strictly_positive_circulation(g, upper=2)

    def test_acyclic_has_none(self):
        assert not has_strictly_positive_circulation(DirectedMultigraph.of(3, [(1, 2), (2, 3)]))

    def test_arc_range(self):
        with pytest.raises(DomainError):
            DirectedMultigraph.of(2, [(1, 3)])

    @pytest.mark.parametrize("n", [3, 4])
    def test_matches_sign_compatibility(self, n):
        trees = enumerate_alternating_trees(n)
        for a, b in combinations(trees, 2):
            assert cones_intersect_fulldim(a, b) == is_sign_compatible(a, b)


class TestIndexable:
    def test_counterexample_triple(self):
        for a, b in combinations(TRIPLE, 2):
            assert is_sign_compatible(a, b)
            assert is_indexable([a, b])
        assert not is_indexable(TRIPLE)
        assert not is_indexable(TRIPLE, method="flows")

    def test_single_tree(self):
        assert is_indexable(TRIPLE[:1]) and is_indexable(TRIPLE[:1], method="flows")

    def test_errors(self):
        with pytest.raises(DomainError):
            is_indexable([])
        with pytest.raises(DomainError):
            is_indexable([TRIPLE[0], tree(3, (1, 2), (1, 3))])
        with pytest.raises(ValueError):
            is_indexable(TRIPLE[:1], method="simplex")

    def test_methods_agree_on_cliques(self):
        G = build_compatibility_graph(5)
        rng = random.Random(5)
        for clique in enumerate_maximal_cliques(G):
            members = [G.vertices[v] for v in clique]
            subsets = [members] + [rng.sample(members, k) for k in range(1, len(members))]
            for s in subsets:
                assert is_indexable(s, "facets") == is_indexable(s, "flows")

    def test_interior_point_induces_flows_of_at_least_one(self):
        trees = TRIPLE[:2]
        x = common_interior_point(trees)
        assert x is not None and sum(x) == 0
        for t in trees:
            assert min(tree_flow(t, x).values) >= 1


class TestPositiveCone:
    @pytest.mark.parametrize(
        "x, expected",
        [((1, 0, -1), True), ((0, 1, -1), True), ((1, -1, 0), True), ((-1, 1, 0), False), ((0, 0, 0), True)],
    )
    def test_membership(self, x, expected):
        assert positive_root_cone_contains(x) == expected == positive_root_cone_contains_lp(x)

    def test_strict(self):
        assert positive_root_cone_contains((2, -1, -1), strict=True)
        assert not positive_root_cone_contains((1, -1, 0), strict=True)
        assert positive_root_cone_contains_lp((2, -1, -1), strict=True)
        assert not positive_root_cone_contains_lp((1, -1, 0), strict=True)

    @given(st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.booleans())
    def test_prefix_matches_lp(self, head, strict):
        x = head + [-sum(head)]
        assert positive_root_cone_contains(x, strict) == positive_root_cone_contains_lp(x, strict)


def generic_flow(t, rng):
    for _ in range(100):
        values = [rng.randint(1, 40) for _ in t.arcs]
        x = induce_point(t, FlowAssignment.on(t, values))
        sums = subset_sums(x.coords, t.n)
        if all(sums[s] != 0 for s in range(1, (1 << t.n) - 1)):
            return FlowAssignment.on(t, values), x
    return None, None


def reroute_instance(seed, n):
    rng = random.Random(seed)
    t = rng.choice(enumerate_alternating_trees(n))
    flow, x = generic_flow(t, rng)
    if flow is None:
        return None
    candidates = []
    for I in range(1, (1 << n) - 1):
        if sum(x[i] for i in range(n) if I >> i & 1) > 0 and any(
            I >> (b - 1) & 1 and not I >> (a - 1) & 1 for a, b in t.arcs
        ):
            candidates.append(I)
    if not candidates:
        return None
    return t, flow, x, rng.choice(candidates)


class TestReroute:
    def test_single_step_lowers_flow(self):
        found = 0
        for seed in range(200):
            inst = reroute_instance(seed, 5)
            if inst is None:
                continue
            t, flow, x, I = inst
            arc = next((a, b) for a, b in t.arcs if I >> (b - 1) & 1 and not I >> (a - 1) & 1)
            t2, f2 = reroute_flow(t, flow, I, arc)
            assert induce_point(t2, f2) == x
            assert arc not in t2.arcs or f2[arc] < flow[arc]
            entering = lambda tr: sum(1 for a, b in tr.arcs if I >> (b - 1) & 1 and not I >> (a - 1) & 1)
            assert entering(t2) <= entering(t)
            found += 1
        assert found > 50

    @given(st.integers(0, 10**6), st.integers(3, 6))
    def test_terminates_with_positive_sign(self, seed, n):
        inst = reroute_instance(seed, n)
        assume(inst is not None)
        t, flow, x, I = inst
        final, f, steps = reroute_until_positive(t, flow, I, max_steps=10 * n * n)
        assert induce_point(final, f) == x
        assert not any(I >> (b - 1) & 1 and not I >> (a - 1) & 1 for a, b in final.arcs)
        if I < 1 << (n - 1):
            assert resonance_sign(x, I) == Sign.PLUS
            assert final.sign_vector[I].value == "+"

    def test_rejects_bad_input(self):
        t = tree(3, (1, 2), (3, 2))
        flow = FlowAssignment.on(t, [1, 2])
        with pytest.raises(DomainError):
            reroute_flow(t, flow, 0, (1, 2))
        with pytest.raises(DomainError):
            reroute_flow(t, flow, 0b001, (1, 2))
        with pytest.raises(DomainError):
            reroute_flow(t, FlowAssignment.on(t, [Fraction(1, 2), 2]), 0b010, (1, 2))


@given(st.sampled_from(enumerate_alternating_trees(6)), st.lists(st.integers(1, 50), min_size=5, max_size=5))
def test_sign_soundness_n6(t, values):
    x = induce_point(t, FlowAssignment.on(t, values))
    sv = resonance_sign_vector(x)
    tv = t.sign_vector
    for S in range(1, 32):
        if str(tv[S]) != "?":
            assert str(sv[S]) == str(tv[S])
