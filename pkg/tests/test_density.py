"""
Groups, boxes, pattern sets and the indexed, index-free and Beurling densities.
"""
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from errors import DensityError, EnumerationCapError
from fixtures.catalog import (
    even_labels,
    example_maps,
    localized_copies,
    ordering_example,
    standard_basis,
)
from density.beurling import Lattice, beurling_density
from density.familymap import IndexedFamilyMap
from density.group import Box, FgaGroup, box_points, flatten_group
from density.index_free import density_index_free, index_free_agreement, relative_density
from density.indexed import box_count_range, density_indexed, density_ratio
from density.pattern import PatternSet, pattern_from_map
from density.relations import fiber_bound, map_equivalence


class TestGroup:

    def test_integer_box(self):
        pts = box_points(FgaGroup.integers(1), Box((0,), 2))
        assert pts == [(-2,), (-1,), (0,), (1,), (2,)]

    def test_product_with_torsion(self):
        G = FgaGroup(1, (2,))
        assert len(box_points(G, Box((0, 0), 1))) == 6
        assert G.box_size(1) == 6

    def test_plane_box_any_center(self):
        G = FgaGroup.integers(2)
        for center in [(0, 0), (5, -3), (-100, 7)]:
            assert len(box_points(G, Box(center, 3))) == 49

    @pytest.mark.parametrize("group", [
        FgaGroup.cyclic(5),
        FgaGroup.cyclic(6),
        FgaGroup(1, (4,)),
        FgaGroup(1, (3, 2)),
    ])
    def test_box_size_independent_of_center(self, group):
        for R in range(0, 4):
            sizes = set()
            for c in range(-3, 7):
                center = (c,) * group.rank
                sizes.add(len(box_points(group, Box(center, R))))
            assert sizes == {group.box_size(R)}

    def test_circular_distance(self):
        G = FgaGroup.cyclic(5)
        assert sorted(box_points(G, Box((4,), 1))) == [(0,), (3,), (4,)]
        assert int(G.distance(np.array([0]), np.array([4]))) == 1

    def test_cyclic_coordinates_reduced(self):
        G = FgaGroup(1, (3,))
        assert G.reduce((-4, 7)) == (-4, 1)

    def test_enumeration_cap(self):
        with pytest.raises(EnumerationCapError):
            box_points(FgaGroup.integers(2), Box((0, 0), 10), cap=100)

    def test_invalid_group(self):
        with pytest.raises(ValueError):
            FgaGroup(0, ())
        with pytest.raises(ValueError):
            FgaGroup(1, (0,))


class TestFlattening:

    def test_direct_formula(self):
        U, _ = flatten_group(FgaGroup(1, (2,)))
        assert U((5,)) == (2, 1)
        assert U((-1,)) == (-1, 1)

    def test_bijection_on_window(self):
        U, U_inv = flatten_group(FgaGroup(2, (3, 2)))
        ks = np.array([(i, j) for i in range(-50, 50) for j in range(-50, 50)])
        np.testing.assert_array_equal(U.inverse(U.forward(ks)), ks)
        images = {tuple(g) for g in U.forward(ks).tolist()}
        assert len(images) == len(ks)

    def test_density_preserved(self):
        G = FgaGroup(1, (2,))
        U, _ = flatten_group(G)
        labels = list(range(-100, 101))
        a = IndexedFamilyMap.from_function(FgaGroup.integers(1), labels, lambda i: (i,))
        b = IndexedFamilyMap.from_function(G, labels, lambda i: U((i,)))
        J = [i for i in labels if i % 2 == 0]
        assert density_indexed(a, J).lower == density_indexed(b, J).lower == Fraction(1, 2)
        assert density_indexed(b).lower == Fraction(1)

    def test_needs_free_part(self):
        with pytest.raises(ValueError):
            flatten_group(FgaGroup.cyclic(4))


class TestPatternSet:

    def test_density_and_membership(self):
        P = PatternSet(FgaGroup.integers(1), (2,), ((0,),))
        assert P.density() == Fraction(1, 2)
        assert P.contains((4,)) and not P.contains((-3,))

    def test_membership_matches_enumeration(self):
        P = PatternSet(FgaGroup(1, (3,)), (2,), ((0, 0), (1, 2)))
        box = Box((1, 0), 4)
        expected = [p for p in box_points(P.group, box) if (p[0] % 2, p[1]) in {(0, 0), (1, 2)}]
        assert P.points_in_box(box) == expected

    def test_complement_additivity(self):
        P = PatternSet(FgaGroup.integers(1), (3,), ((0,), (2,)))
        assert P.density() + P.complement().density() == 1

    def test_refine_and_subset(self):
        P = PatternSet(FgaGroup.integers(1), (2,), ((0,),))
        Q = P.refine((4,))
        assert Q.residues == ((0,), (2,))
        assert Q.density() == P.density()
        assert PatternSet(FgaGroup.integers(1), (4,), ((0,),)).issubset(P)
        assert not P.issubset(PatternSet(FgaGroup.integers(1), (4,), ((0,),)))

    def test_multiset_weights(self):
        P = PatternSet(FgaGroup.integers(1), (1,), ((0,),), (2,))
        assert P.density() == 2
        assert P.multiplicity((17,)) == 2
        with pytest.raises(DensityError):
            P.complement()

    def test_residue_outside_cell(self):
        with pytest.raises(ValueError):
            PatternSet(FgaGroup.integers(1), (2,), ((2,),))

    def test_json(self):
        P = PatternSet(FgaGroup(1, (2,)), (3,), ((0, 1), (2, 0)))
        Q = PatternSet.from_dict(P.to_dict())
        assert Q.residues == P.residues and Q.density() == P.density()

    def test_from_map_finds_smallest_period(self):
        maps = example_maps()
        assert pattern_from_map(maps["double"]).period == (2,)
        J = even_labels(maps["rearranged"])
        pattern = pattern_from_map(maps["rearranged"], J)
        assert pattern.period == (4,)
        assert pattern.residues == ((1,), (2,), (3,))


class TestIndexedDensity:

    @pytest.mark.parametrize("name,ratio", [
        ("identity", Fraction(1, 2)),
        ("double", Fraction(1, 2)),
        ("rearranged", Fraction(3, 4)),
    ])
    def test_example_map_ratios(self, name, ratio):
        fmap = example_maps()[name]
        assert density_ratio(fmap, even_labels(fmap)) == ratio

    def test_doubling_densities(self):
        fmap = example_maps()["double"]
        assert density_indexed(fmap, even_labels(fmap)).lower == Fraction(1, 4)
        assert density_indexed(fmap).lower == Fraction(1, 2)

    def test_empty_subset(self):
        est = density_indexed(example_maps()["identity"], [])
        assert est.exact and est.lower == 0 and est.upper == 0

    def test_monotone_in_subset(self):
        fmap = example_maps()["identity"]
        J = [i for i in fmap.labels if i % 4 == 0]
        J2 = even_labels(fmap)
        assert density_indexed(fmap, J).lower <= density_indexed(fmap, J2).lower

    def test_complement_additivity(self):
        fmap = example_maps()["rearranged"]
        J = even_labels(fmap)
        rest = [i for i in fmap.labels if i % 2]
        total = density_indexed(fmap).lower
        assert density_indexed(fmap, J).lower + density_indexed(fmap, rest).lower == total

    def test_sweep_approaches_half(self):
        fmap = example_maps()["identity"]
        est = density_indexed(fmap, even_labels(fmap), mode="sweep", r_max=40)
        assert not est.exact
        assert float(est.lower) == pytest.approx(0.5, abs=0.02)
        assert float(est.upper) == pytest.approx(0.5, abs=0.02)
        for R, lo, hi in est.sweep:
            assert lo == pytest.approx(R / (2 * R + 1))
            assert hi == pytest.approx((R + 1) / (2 * R + 1))

    def test_box_count_range(self):
        assert box_count_range(example_maps()["identity"], 3) == (1.0, 1.0)

    def test_finite_group_is_exact(self):
        G = FgaGroup.cyclic(8)
        fmap = IndexedFamilyMap.identity(G, range(8))
        est = density_indexed(fmap, [0, 2, 4, 6], mode="sweep", r_max=6)
        assert est.exact and est.lower == Fraction(1, 2)

    def test_sweep_csv(self, tmp_path):
        fmap = example_maps()["identity"]
        est = density_indexed(fmap, mode="sweep", r_max=5)
        frame = pd.read_csv(est.write_sweep_csv(tmp_path / "sweep.csv"))
        assert list(frame.columns) == ["R", "inf_value", "sup_value"]
        assert frame["R"].tolist() == [1, 2, 3, 4, 5]


class TestBeurling:

    def test_unit_lattice(self):
        assert beurling_density(Lattice(np.eye(2))).lower == pytest.approx(1.0)

    def test_half_lattice(self):
        est = beurling_density(Lattice(0.5 * np.eye(2)))
        assert est.exact
        assert est.lower == pytest.approx(4.0)

    def test_perturbed_integer_points(self, rng):
        grid = np.stack(np.meshgrid(np.arange(-70, 71), np.arange(-70, 71), indexing="ij"), axis=-1).reshape(-1, 2)
        pts = grid + rng.uniform(-0.099, 0.099, size=grid.shape)
        est = beurling_density(pts, radii=[8, 16, 32, 64])
        assert 0.9 <= est.lower <= est.upper <= 1.1
        R, lo, hi = est.sweep[-1]
        assert R == 64 and 0.95 <= lo <= hi <= 1.05

    def test_empty(self):
        est = beurling_density(np.zeros((0, 2)))
        assert est.exact and est.lower == 0


class TestIndexFreeDensity:

    def test_basis_against_itself(self):
        E = standard_basis(64)
        est = density_index_free(E, E)
        assert not est.diverging
        assert float(est.lower) == pytest.approx(1.0, abs=1e-9)
        assert float(est.upper) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("kind,part,expected", [
        ("basis", "even", 0.5),
        ("intertwined", "even", 0.25),
        ("exotic", "even", 0.25),
        ("exotic", "odd", 0.75),
    ])
    def test_orderings(self, kind, part, expected):
        ex = ordering_example(kind, R=128)
        F = ex.even() if part == "even" else ex.odd()
        est = density_index_free(F, ex.reference, r_max=32)
        assert float(est.lower) == pytest.approx(expected, abs=0.02)
        assert float(est.upper) == pytest.approx(expected, abs=0.02)

    def test_copies_diverge(self):
        F, G = localized_copies(200)
        est = density_index_free(F, G)
        assert est.diverging
        assert est.lower == float("inf")
        values = [v for _, v in est.admission]
        assert values == sorted(values)

    def test_few_copies_stay_finite(self):
        F, G = localized_copies(1)
        assert not density_index_free(F, G).diverging

    def test_zero_energy_member(self):
        E = standard_basis(4)
        F = E.subfamily([0]).scaled(0.0)
        with pytest.raises(DensityError):
            density_index_free(F, E)

    def test_relative_density(self):
        basis = ordering_example("basis", R=128)
        rel = relative_density(basis.even(), basis.F, basis.reference, r_max=32)
        assert rel.r_minus == pytest.approx(0.5, abs=0.02)
        exotic = ordering_example("exotic", R=128)
        rel = relative_density(exotic.even(), exotic.F, exotic.reference, r_max=32)
        assert rel.r_minus == pytest.approx(0.25, abs=0.02)

    def test_relative_density_of_itself(self):
        ex = ordering_example("basis", R=64)
        rel = relative_density(ex.F, ex.F, ex.reference, r_max=16)
        assert rel.r_minus == pytest.approx(1.0)
        assert rel.uniform

    def test_agrees_with_indexed_for_localized_family(self, geometric_small):
        family, fmap, reference = geometric_small
        report = index_free_agreement(family, fmap, reference, r_max=24)
        assert report["difference"] < 0.05


class TestMapRelations:

    def test_fiber_bound(self):
        G = FgaGroup.integers(1)
        labels = list(range(-20, 21))
        assert fiber_bound(IndexedFamilyMap.identity(G, labels)) == 1
        assert fiber_bound(IndexedFamilyMap.from_function(G, labels, lambda i: (i // 2,))) == 2
        assert fiber_bound(IndexedFamilyMap.from_function(G, range(7), lambda i: (0,))) == 7

    def test_equal_maps(self):
        a = example_maps()["identity"]
        report = map_equivalence(a, a)
        assert report.bounded_difference and report.sup_difference == 0
        assert report.densities_match

    def test_shifted_map(self):
        a = example_maps()["identity"]
        report = map_equivalence(a, a.shifted((3,)))
        assert report.bounded_difference and report.sup_difference == 3
        assert report.densities_match

    def test_identity_versus_doubling(self):
        maps = example_maps(M=40)
        report = map_equivalence(maps["identity"], maps["double"])
        assert report.sup_difference == 40
        assert report.growth and not report.bounded_difference
        assert not report.densities_match
        assert report.densities["I"] == {"a": "1", "b": "1/2"}

    def test_different_index_sets(self):
        G = FgaGroup.integers(1)
        with pytest.raises(DensityError):
            map_equivalence(IndexedFamilyMap.identity(G, range(4)), IndexedFamilyMap.identity(G, range(5)))


class TestFamilyMap:

    def test_mapping_and_restrict(self):
        G = FgaGroup(1, (2,))
        fmap = IndexedFamilyMap.from_mapping(G, {"x": (1, 3), "y": (-2, 0)})
        assert fmap("x") == (1, 1)
        sub = fmap.restrict(["y"])
        assert sub.labels == ("y",) and sub("y") == (-2, 0)

    def test_json(self, tmp_path):
        fmap = example_maps(M=5)["rearranged"]
        back = IndexedFamilyMap.read_json(fmap.write_json(tmp_path / "map.json"))
        assert back.labels == fmap.labels
        np.testing.assert_array_equal(back.points, fmap.points)
