"""Walk through the smallest nontrivial case by hand.

The resonance arrangement of rank two cuts the plane ``a1 + a2 + a3 = 0`` by
three lines.  Each of the six chambers is the interior of exactly one
alternating-tree cone on three vertices, and the two chambers inside the
positive root cone are where the partition function is given by a single
polynomial.

    python demos/rank_two_walkthrough.py
"""

from chamber_atlas.arrangement import (
    chamber_tree_set,
    enumerate_chambers,
    mask_indices,
    positive_chambers,
    resonance_arrangement,
)
from chamber_atlas.core import enumerate_alternating_trees, format_tree
from chamber_atlas.kostant import fit_chamber_polynomial, kostant_chambers, kostant_value


def main() -> None:
    A = resonance_arrangement(2)
    chambers = enumerate_chambers(A)
    trees = enumerate_alternating_trees(3)
    print(f"{len(A)} hyperplanes, {len(chambers)} chambers\n")
    print("signs  witness        tree")
    for c in chambers:
        (k,) = mask_indices(chamber_tree_set(c, trees))
        print(f"{c.sign_string}    {' '.join(c.witness.serialize()):<13}  {format_tree(trees[k])}")

    inside = positive_chambers(chambers, 2)
    print(f"\n{len(inside)} chambers lie in the positive root cone:")
    for kc in kostant_chambers(2, chambers):
        fit = fit_chamber_polynomial(kc, 2)
        sample = fit.holdout_points[0]
        print(
            f"  chamber {kc.resonance_chambers[0].sign_string}: kappa = {fit.polynomial}"
            f"  (check: kappa{sample} = {kostant_value(sample)})"
        )


if __name__ == "__main__":
    main()
