"""
Worked instances: orderings, the planar arrangement and fixture emission.
"""
import numpy as np
import pytest

from fixtures.catalog import (
    basis_matrix,
    doubling_sum_map,
    duplicated_basis,
    emit_fixtures,
    example_maps,
    exotic_order,
    geometric_family,
    localized_copies,
    ordering_example,
    planar_position,
    planar_row,
    rearranged_index,
)


class TestOrderings:

    def test_exotic_prefix(self):
        assert exotic_order(10) == [0, 1, 3, 5, 2, 7, 9, 11, 4, 13]

    def test_exotic_is_a_bijection_on_a_window(self):
        ex = ordering_example("exotic", R=200)
        used = set(ex.F.labels)
        assert len(used) == len(ex.reference)
        assert set(range(-60, 61)) <= used

    def test_intertwined_repeats(self):
        ex = ordering_example("intertwined", R=8)
        np.testing.assert_array_equal(ex.reference.vector(4), ex.reference.vector(5))
        assert len(ex.F) == 9

    def test_even_and_odd_split(self):
        ex = ordering_example("basis", R=10)
        assert len(ex.even()) + len(ex.odd()) == len(ex.F)
        assert all(l % 2 == 0 for l in ex.even().labels)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ordering_example("spiral")


class TestPlanarArrangement:

    def test_row_zero(self):
        assert planar_row(0, 16) == [-16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16]

    def test_positions_are_distinct(self):
        positions = [planar_position(n) for n in range(-256, 257)]
        assert len(set(positions)) == len(positions)

    def test_odd_rows(self):
        assert planar_position(5) == (1, 0)
        assert planar_position(3) == (-1, 0)
        assert planar_position(-6) == (-1, -2)

    def test_map_picks_right_neighbour(self):
        fmap = doubling_sum_map([1, 3])
        assert fmap(1) == (0, 2)
        assert fmap(3) == (-1, 1)


class TestInstances:

    def test_rearranged_index_residues(self):
        for i in range(-50, 51):
            r = rearranged_index(i)
            assert (r % 4 == 0) == (i % 2 == 1)
        values = [rearranged_index(i) for i in range(-50, 51)]
        assert len(set(values)) == len(values)

    def test_example_maps_share_labels(self):
        maps = example_maps(M=10)
        assert {len(m) for m in maps.values()} == {21}
        assert maps["double"](3) == (6,)

    def test_duplicated_basis(self):
        family = duplicated_basis(5)
        assert len(family) == 10
        np.testing.assert_array_equal(family.vector((2, 0)), family.vector((2, 1)))

    def test_localized_copies(self):
        F, G = localized_copies(3, L=4)
        assert len(F) == 3 and G.dim == 9
        assert F.matrix[4, 0] == 1.0

    def test_geometric_columns(self):
        family, fmap, reference = geometric_family(W=8, rho=0.5, width=2)
        assert reference.dim == 21
        np.testing.assert_allclose(family.vector(0)[8:13], [0.25, 0.5, 1.0, 0.5, 0.25])

    def test_basis_window(self):
        with pytest.raises(ValueError):
            basis_matrix([5], L=4)


class TestEmission:

    def test_deterministic(self, tmp_path):
        first = emit_fixtures(tmp_path / "a", R=16, L=16)
        second = emit_fixtures(tmp_path / "b", R=16, L=16)
        assert [p.name for p in first] == [p.name for p in second]
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_expected_files(self, tmp_path):
        names = {p.name for p in emit_fixtures(tmp_path, R=16, L=16)}
        assert {"map_identity.json", "ordering_exotic.json", "planar_arrangement.json",
                "duplicated_basis.csv", "gaussian_128.csv", "half_lattice_128_h8.json"} <= names
