from fractions import Fraction

import pytest

from chamber_atlas.arrangement import (
    CentralArrangement,
    Chamber,
    chamber_tree_set,
    enumerate_chambers,
    in_positive_cone,
    integer_kernel_basis,
    mask_indices,
    maximal_indexable_via_chambers,
    positive_chambers,
    resonance_arrangement,
    resonance_normal,
    restriction,
    threshold_arrangement,
    threshold_normal,
    verify_chamber,
    verify_inequalities,
    wall_census,
)
from chamber_atlas.core import (
    AlternatingTree,
    RationalPoint,
    enumerate_alternating_trees,
    reflect,
    resonance_sign_vector,
    subset_mask,
    threshold_sign_vector,
)
from chamber_atlas.errors import BoundsError, DomainError
from chamber_atlas.flows import positive_root_cone_contains
from oracles import whitney_region_count

R = {1: 2, 2: 6, 3: 32, 4: 370}
# chambers of the threshold arrangement by dimension
TH = {2: 4, 3: 14, 4: 104, 5: 1882}


def sign_string(sv):
    return "".join("+" if int(s) > 0 else "-" for s in sv.entries)


class TestFamilies:
    def test_threshold_normal_example(self):
        assert threshold_normal(8, subset_mask([1, 3, 4, 6])) == (1, -1, 1, 1, -1, 1, -1, -1)

    def test_resonance_normal_example(self):
        assert resonance_normal(7, subset_mask([1, 3, 4, 6])) == (1, 0, 1, 1, 0, 1, 0, 0)

    def test_threshold_three(self):
        A = threshold_arrangement(3)
        assert A.normals == ((-1, -1, -1), (1, -1, -1), (-1, 1, -1), (1, 1, -1))
        assert not A.equality_normals and not A.restriction_normals

    @pytest.mark.parametrize("n", range(1, 7))
    def test_resonance_sizes(self, n):
        A = resonance_arrangement(n)
        assert len(A) == 2**n - 1 and A.ambient_dim == n + 1
        assert A.equality_normals == ((1,) * (n + 1),)

    def test_rank_two_lines(self):
        A = resonance_arrangement(2)
        assert A.normals == ((1, 0, 0), (0, 1, 0), (1, 1, 0))

    @pytest.mark.parametrize("make, n", [(threshold_arrangement, 1), (threshold_arrangement, 7), (resonance_arrangement, 0), (resonance_arrangement, 7)])
    def test_bounds(self, make, n):
        with pytest.raises(BoundsError):
            make(n)

    def test_validation(self):
        with pytest.raises(DomainError):
            CentralArrangement(2, ((0, 0),))
        with pytest.raises(DomainError):
            CentralArrangement(2, ((1, 0, 0),))


class TestEnumeration:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_resonance_counts(self, n, resonance_chambers):
        chambers = resonance_chambers(n).value
        assert len(chambers) == R[n]

    @pytest.mark.parametrize("dim", [2, 3, 4, 5])
    def test_threshold_counts(self, dim, threshold_chambers):
        assert len(threshold_chambers(dim).value) == TH[dim]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_resonance_whitney_oracle(self, n):
        A = resonance_arrangement(n)
        assert whitney_region_count(A.normals, A.equality_normals) == R[n]

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_threshold_whitney_oracle(self, dim):
        assert whitney_region_count(threshold_arrangement(dim).normals) == TH[dim]

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_witnesses_certify(self, n, resonance_chambers):
        A = resonance_arrangement(n)
        chambers = resonance_chambers(n).value
        assert all(verify_chamber(A, c) for c in chambers)
        for c in chambers:
            assert sign_string(resonance_sign_vector(c.witness)) == c.sign_string

    def test_threshold_witnesses(self, threshold_chambers):
        A = threshold_arrangement(4)
        for c in threshold_chambers(4).value:
            assert verify_chamber(A, c)
            assert sign_string(threshold_sign_vector(c.witness)) == c.sign_string

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_sorted_distinct_antipodal(self, n, resonance_chambers):
        chambers = resonance_chambers(n).value
        strings = [c.sign_string for c in chambers]
        assert strings == sorted(strings) and len(set(strings)) == len(strings)
        flipped = {s.translate(str.maketrans("+-", "-+")) for s in strings}
        assert flipped == set(strings)

    def test_parallel_matches_serial(self):
        A = resonance_arrangement(3)
        assert enumerate_chambers(A, workers=2) == enumerate_chambers(A)

    def test_restriction_normals_match_sign_filter(self, resonance_chambers):
        n = 3
        prefix = tuple(resonance_normal(n, (1 << k) - 1) for k in range(1, n + 1))
        base = resonance_arrangement(n)
        A = CentralArrangement(base.ambient_dim, base.normals, base.equality_normals, prefix, base.labels)
        restricted = enumerate_chambers(A)
        filtered = positive_chambers(resonance_chambers(n).value, n)
        assert [c.sign_string for c in restricted] == [c.sign_string for c in filtered]
        assert len(filtered) == 8

    def test_empty_restriction(self):
        A = CentralArrangement(2, ((1, 1),), restriction_normals=((1, 0), (-1, 0)))
        with pytest.raises(DomainError):
            enumerate_chambers(A)
        assert enumerate_chambers(A, allow_empty=True) == []

    def test_json_round_trip(self, resonance_chambers):
        for c in resonance_chambers(3).value:
            assert Chamber.from_json(c.to_json()) == c

    def test_sign_vector_view(self, resonance_chambers):
        A = resonance_arrangement(2)
        c = resonance_chambers(2).value[0]
        assert c.sign_vector(A) == resonance_sign_vector(c.witness)

    def test_kernel_basis(self):
        basis = integer_kernel_basis([(1, 1, 1)], 3)
        assert len(basis) == 2
        assert all(sum(b) == 0 and all(isinstance(v, int) for v in b) for b in basis)


class TestSymmetries:
    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_threshold_reflections(self, dim, threshold_chambers):
        chambers = threshold_chambers(dim).value
        strings = {c.sign_string for c in chambers}
        for J in range(1 << (dim - 1)):
            images = set()
            for c in chambers:
                image = sign_string(threshold_sign_vector(reflect(c.witness, J)))
                assert all(image[S] == c.sign_string[S ^ J] for S in range(len(image)))
                images.add(image)
            assert images == strings

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_cyclic_rotation(self, n, resonance_chambers):
        chambers = resonance_chambers(n).value
        strings = {c.sign_string for c in chambers}
        rotated = {sign_string(resonance_sign_vector(c.witness.rotated())) for c in chambers}
        assert rotated == strings
        assert (n + 1) * len(positive_chambers(chambers, n)) == len(chambers)


class TestWalls:
    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_wall_bijection(self, dim, threshold_chambers):
        census = wall_census(threshold_arrangement(dim), len(threshold_chambers(dim).value))
        assert set(census.per_hyperplane) == {R[dim - 1]}
        assert 2 * census.total == 2**dim * R[dim - 1]
        # two lines in the plane form a simplicial arrangement; beyond that w > dim
        assert census.average_walls > dim if dim >= 3 else census.average_walls == dim

    def test_frozen_averages(self):
        # 2W/C with W = 2^(d-1) R_(d-1): 2*4/4, 2*24/14, 2*256/104
        got = [wall_census(threshold_arrangement(d)).average_walls for d in (2, 3, 4)]
        assert got == [Fraction(2), Fraction(24, 7), Fraction(64, 13)]

    @pytest.mark.parametrize("n", [2, 3])
    def test_resonance_walls_match_oracle(self, n):
        A = resonance_arrangement(n)
        census = wall_census(A)
        for i, w in enumerate(census.per_hyperplane):
            eq = A.equality_normals + (A.normals[i],)
            others = [v for j, v in enumerate(A.normals) if j != i]
            assert w == whitney_region_count(others, eq)

    def test_restriction_dedupes(self):
        r = restriction(resonance_arrangement(2), 0)
        assert len(r) == 1


class TestTreeSets:
    def test_rank_two_one_tree_each(self, resonance_chambers):
        trees = enumerate_alternating_trees(3)
        masks = [chamber_tree_set(c, trees) for c in resonance_chambers(2).value]
        assert all(len(mask_indices(m)) == 1 for m in masks)
        assert sorted(masks) == [1 << k for k in range(6)]

    def test_star_chamber(self, resonance_chambers):
        trees = enumerate_alternating_trees(4)
        target = resonance_sign_vector((3, -1, -1, -1))
        chamber = next(c for c in resonance_chambers(3).value if c.sign_string == sign_string(target))
        got = [trees[k] for k in mask_indices(chamber_tree_set(chamber, trees))]
        assert got == [AlternatingTree.from_arcs(4, [(1, 2), (1, 3), (1, 4)])]

    def test_two_tree_chamber(self, resonance_chambers):
        trees = enumerate_alternating_trees(4)
        pair = {
            AlternatingTree.from_arcs(4, [(1, 2), (1, 4), (3, 4)]),
            AlternatingTree.from_arcs(4, [(1, 2), (1, 4), (3, 2)]),
        }
        sets = [{trees[k] for k in mask_indices(chamber_tree_set(c, trees))} for c in resonance_chambers(3).value]
        assert pair in sets

    def test_dimension_mismatch(self, resonance_chambers):
        with pytest.raises(DomainError):
            chamber_tree_set(resonance_chambers(2).value[0], enumerate_alternating_trees(4))

    def test_full_rank_three(self, resonance_chambers):
        groups = maximal_indexable_via_chambers(3, chambers=resonance_chambers(3).value)
        assert len(groups) == 32 and all(len(g.chambers) == 1 for g in groups)

    def test_positive_rank_three(self, resonance_chambers):
        groups = maximal_indexable_via_chambers(3, positive_only=True, chambers=resonance_chambers(3).value)
        assert len(groups) == 7
        assert sorted(len(g.chambers) for g in groups) == [1] * 6 + [2]

    def test_full_rank_four(self, resonance_chambers):
        assert len(maximal_indexable_via_chambers(4, chambers=resonance_chambers(4).value)) == 370

    def test_bounds(self):
        with pytest.raises(BoundsError):
            maximal_indexable_via_chambers(6)

    def test_positive_filter_matches_cone(self, resonance_chambers):
        for c in resonance_chambers(4).value:
            assert in_positive_cone(c, 4) == positive_root_cone_contains(c.witness, strict=True)


class TestInequalities:
    R_ALL = {1: 2, 2: 6, 3: 32, 4: 370, 5: 11292}
    T_ALL = {1: 4, 2: 14, 3: 104, 4: 1882, 5: 94572}
    K_ALL = {2: 2, 3: 7, 4: 48, 5: 820}

    def test_all_hold(self):
        checks = verify_inequalities(self.R_ALL, self.T_ALL, self.K_ALL)
        assert checks and all(c.holds for c in checks)

    def test_row_four(self):
        check = next(c for c in verify_inequalities(self.R_ALL, self.T_ALL) if c.n == 4)
        assert "370" in check.statement and "941" in check.statement
        assert int(Fraction(5 * 1882, 32)) == 294

    def test_growth_is_evidence(self):
        growth = [c for c in verify_inequalities(self.R_ALL, self.T_ALL, self.K_ALL) if c.name == "growth"]
        assert [c.n for c in growth] == [3, 4] and all(c.kind == "evidence" for c in growth)

    def test_kostant_equality_case(self):
        check = next(c for c in verify_inequalities(self.R_ALL, self.T_ALL, self.K_ALL) if c.name == "kostant" and c.n == 2)
        assert check.holds

    def test_failure_reported(self):
        bad = verify_inequalities({3: 60}, {3: 104})
        assert not bad[0].holds and bad[0].line().startswith("[FAIL]")


def test_rank_one_census():
    census = wall_census(resonance_arrangement(1))
    assert census.per_hyperplane == (1,) and census.chamber_count == 2 and census.average_walls == 1
