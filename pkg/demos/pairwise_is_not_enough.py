"""Three trees on six vertices whose cones meet in pairs but not all at once.

Every pair has a strictly positive circulation on its combined graph, so the
pairwise intersections are full-dimensional.  The three cones together have
no common interior point, which means maximal cliques of the compatibility
graph need not label chambers.

    python demos/pairwise_is_not_enough.py
"""

from itertools import combinations

from chamber_atlas.core import AlternatingTree, format_tree, is_sign_compatible
from chamber_atlas.flows import (
    circulation_graph,
    common_interior_point,
    find_strictly_positive_circulation,
    is_indexable,
)


def tree(*arcs):
    return AlternatingTree.from_arcs(6, arcs)


TRIPLE = (
    tree((1, 4), (1, 5), (2, 4), (3, 5), (3, 6)),
    tree((1, 6), (2, 5), (2, 6), (3, 4), (3, 6)),
    tree((1, 4), (1, 5), (2, 4), (2, 6), (3, 5)),
)


def main() -> None:
    for k, t in enumerate(TRIPLE, 1):
        print(f"T{k}: {format_tree(t)}   signs {t.sign_vector}")
    print()
    for (i, a), (j, b) in combinations(enumerate(TRIPLE, 1), 2):
        circ = find_strictly_positive_circulation(circulation_graph(a, b))
        x = common_interior_point([a, b])
        print(f"T{i}, T{j}: sign compatible {is_sign_compatible(a, b)}")
        flows = ", ".join(f"{name.split(':')[1]}:{v}" for name, v in circ.witness.items())
        print(f"  circulation {flows}")
        print(f"  shared interior point {' '.join(x.serialize())}")
    print(f"\nall three indexable: {is_indexable(TRIPLE)} (flow method agrees: {is_indexable(TRIPLE, method='flows')})")


if __name__ == "__main__":
    main()
