"""
Envelopes, decay verdicts, tail operators and truncated families.
"""
import numpy as np
import pandas as pd
import pytest

from errors import DimensionMismatchError, DualPairError, LocalizationError
from fixtures.catalog import (
    doubling_sum_family,
    doubling_sum_map,
    geometric_family,
    ordering_example,
    planar_reference,
    standard_basis,
)
from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from frames.family import VectorFamily
from localization.decay import Verdict, classify_decay
from localization.maps import (
    dominates,
    envelope_from_map,
    envelope_index_free,
    self_localization_check,
    shift_envelope_check,
)
from localization.tails import (
    analysis_gap_norm,
    tail_operator_norm,
    truncate_family,
    truncation_profile,
)


def _identity_map(family: VectorFamily) -> IndexedFamilyMap:
    return IndexedFamilyMap.identity(FgaGroup.integers(1), family.labels)


def _banded_family(rng, L: int = 12, half: int = 8, width: int = 4) -> VectorFamily:
    """f_i supported on e_{i-width} .. e_{i+width} with random positive decaying coefficients"""
    labels = list(range(-half, half + 1))
    M = np.zeros((2 * L + 1, len(labels)))
    for j, i in enumerate(labels):
        for m in range(-width, width + 1):
            M[i + m + L, j] = rng.uniform(0.1, 1.0) * 0.5 ** abs(m)
    return VectorFamily(M, tuple(labels))


@pytest.fixture
def planar_triple():
    L = 64
    labels = [n for n in range(-(L // 2), L // 2 + 1) if n]
    return doubling_sum_family(labels, L), doubling_sum_map(labels), planar_reference(L)


class TestEnvelopeFromMap:

    def test_orthonormal_identity(self):
        E = standard_basis(8)
        report = envelope_from_map(E, _identity_map(E), E)
        assert report.envelope.value_at((0,)) == 1.0
        assert report.envelope.support().tolist() == [[0]]
        assert np.all(report.envelope.tail_sums() == 0.0)
        assert report.verdict is Verdict.SUPPORTED
        assert report.fit.kind == "compact"

    def test_planar_arrangement(self, planar_triple):
        family, fmap, reference = planar_triple
        report = envelope_from_map(family, fmap, reference)
        support = {tuple(o) for o in report.envelope.support(1e-14).tolist()}
        assert support == {(0, 0), (0, 1)}
        assert report.envelope.value_at((0, 0)) == pytest.approx(1.0)
        assert report.envelope.value_at((0, 1)) == pytest.approx(1.0)
        assert report.supported

    def test_minimal_envelope_dominates(self, planar_triple, geometric_small):
        family, fmap, reference = planar_triple
        assert dominates(envelope_from_map(family, fmap, reference), family, fmap, reference)
        family, fmap, reference = geometric_small
        assert dominates(envelope_from_map(family, fmap, reference), family, fmap, reference)

    def test_geometric_family(self, geometric_small):
        family, fmap, reference = geometric_small
        report = envelope_from_map(family, fmap, reference)
        for m in range(-3, 4):
            assert report.envelope.value_at((m,)) == pytest.approx(0.2 ** abs(m))
        assert report.envelope.value_at((4,)) == 0.0
        assert report.supported

    def test_tail_sums_nonincreasing(self, geometric_small):
        tails = envelope_from_map(*geometric_small).envelope.tail_sums()
        assert np.all(np.diff(tails) <= 1e-15)
        assert tails[0] == pytest.approx(2 * (0.2 + 0.04 + 0.008))
        assert tails[3] == 0.0

    def test_envelope_csv(self, tmp_path, geometric_small):
        report = envelope_from_map(*geometric_small)
        frame = pd.read_csv(report.envelope.to_csv(tmp_path / "env.csv"))
        assert list(frame.columns) == ["k0", "value"]
        assert frame["k0"].tolist() == sorted(frame["k0"].tolist())

    def test_reference_labels_must_match_group(self, planar_triple):
        family, _, reference = planar_triple
        with pytest.raises(LocalizationError):
            envelope_from_map(family, doubling_sum_map(list(family.labels), kind="basis"), reference)


class TestIndexFreeEnvelope:

    def test_single_basis_vector(self):
        E = standard_basis(8)
        centers, report = envelope_index_free(E.subfamily([5]), E)
        assert centers[5] == (5,)
        assert report.envelope.support().tolist() == [[0]]

    def test_translates_of_one_profile(self):
        family, _, reference = geometric_family(W=10, rho=0.5, width=6)
        centers, report = envelope_index_free(family, reference)
        assert all(centers[i] == (i,) for i in family.labels)
        for k in range(-6, 7):
            assert report.envelope.value_at((k,)) == pytest.approx(2.0 ** -abs(k))

    def test_planar_arrangement(self, planar_triple):
        family, _, reference = planar_triple
        _, report = envelope_index_free(family, reference, group=FgaGroup.integers(2))
        assert len(report.envelope.support(1e-14)) == 2

    @pytest.mark.parametrize("kind", ["basis", "intertwined", "exotic"])
    def test_linear_orderings_unsupported(self, kind):
        ex = ordering_example(kind, R=128)
        used = set(ex.F.labels)
        labels = [n for n in sorted(used) if 2 * n in used]
        _, report = envelope_index_free(doubling_sum_family(labels, ex.L), ex.reference)
        assert report.verdict is Verdict.UNSUPPORTED
        # unit coefficients at offsets that keep growing with the window
        big = report.envelope.support(0.5)
        assert np.abs(big).max() >= 32

    def test_zero_row(self):
        E = standard_basis(4)
        with pytest.raises(LocalizationError):
            envelope_index_free(E.subfamily([1]).scaled(0.0), E)


class TestSelfLocalization:

    def test_orthonormal(self):
        report = self_localization_check(standard_basis(16))
        assert report.envelope.value_at((0,)) == 1.0
        assert report.envelope.total() == 1.0

    def test_nearly_parallel_family(self, rng):
        M = 1.0 + 0.05 * rng.standard_normal((32, 32))
        M /= np.linalg.norm(M, axis=0)
        report = self_localization_check(VectorFamily.from_matrix(M))
        assert report.verdict is Verdict.UNSUPPORTED


class TestDecayClassification:

    def test_compact(self):
        shells = np.zeros(40)
        shells[:3] = [1.0, 0.5, 0.25]
        verdict, fit = classify_decay(shells, dim=1)
        assert verdict is Verdict.SUPPORTED and fit.support_radius == 2

    def test_geometric(self):
        shells = 0.5 ** np.arange(40)
        verdict, fit = classify_decay(shells, dim=1)
        assert verdict is Verdict.SUPPORTED
        assert fit.kind in ("geometric", "gaussian")

    def test_flat(self):
        verdict, fit = classify_decay(np.ones(40), dim=1)
        assert verdict is Verdict.UNSUPPORTED and fit.kind == "flat"

    def test_slow_polynomial(self):
        r = np.arange(1, 200, dtype=float)
        shells = np.concatenate([[1.0], r ** -0.5])
        verdict, fit = classify_decay(shells, dim=1)
        assert verdict is Verdict.UNSUPPORTED
        assert fit.exponent == pytest.approx(-0.5, abs=1e-6)

    def test_fast_polynomial(self):
        r = np.arange(1, 200, dtype=float)
        shells = np.concatenate([[1.0], r ** -3.0])
        verdict, _ = classify_decay(shells, dim=1)
        assert verdict is Verdict.SUPPORTED

    def test_threshold_is_inconclusive(self):
        r = np.arange(1, 200, dtype=float)
        shells = np.concatenate([[1.0], r ** -1.0])
        verdict, _ = classify_decay(shells, dim=1)
        assert verdict is Verdict.INCONCLUSIVE


class TestTailOperator:

    def test_exactly_localized(self):
        E = standard_basis(10)
        for R in range(1, 5):
            tail = tail_operator_norm(E, _identity_map(E), E, R)
            assert tail.norm == pytest.approx(0.0, abs=1e-15)
            assert tail.fiber == 1

    def test_geometric_tail_bound(self):
        family, fmap, reference = geometric_family(W=20, rho=0.5, width=8)
        previous = np.inf
        for R in range(0, 9):
            tail = tail_operator_norm(family, fmap, reference, R)
            assert tail.within_bound
            assert tail.schur_bound <= 2.0 ** (1 - R) + 1e-12
            assert tail.norm <= previous + 1e-12
            previous = tail.norm

    def test_monotone_on_random_families(self, rng):
        for _ in range(50):
            family = _banded_family(rng)
            fmap = _identity_map(family)
            reference = standard_basis(12)
            norms = [tail_operator_norm(family, fmap, reference, R) for R in range(0, 6)]
            for t in norms:
                assert t.within_bound
            # M^R shrinks entrywise as R grows and its entries are nonnegative
            values = [t.norm for t in norms]
            assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestTruncation:

    def test_large_radius_reconstructs(self, geometric_small):
        family, fmap, reference = geometric_small
        truncated = truncate_family(family, fmap, reference, reference, R=1000)
        np.testing.assert_allclose(truncated.matrix, family.matrix, atol=1e-9)
        assert analysis_gap_norm(family, truncated) == pytest.approx(0.0, abs=1e-12)

    def test_zero_radius_keeps_nearest(self, geometric_small):
        family, fmap, reference = geometric_small
        truncated = truncate_family(family, fmap, reference, reference, R=0)
        L = (reference.dim - 1) // 2
        for j, i in enumerate(family.labels):
            expected = np.zeros(reference.dim)
            expected[i + L] = 1.0
            np.testing.assert_allclose(truncated.matrix[:, j], expected, atol=1e-15)

    def test_invalid_dual(self, geometric_small):
        family, fmap, reference = geometric_small
        with pytest.raises(DualPairError):
            truncate_family(family, fmap, reference, reference.scaled(2.0), R=2)

    def test_rescaled_dual_pair(self):
        family, fmap, reference = geometric_family(W=16, rho=0.5, width=5)
        scaled, dual = reference.scaled(2.0), reference.scaled(0.5)
        profile = truncation_profile(family, fmap, scaled, dual, range(0, 6))
        gaps = [profile[R]["gap"] for R in range(0, 6)]
        assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        for row in profile.values():
            assert row["gap"] <= row["gap_bound"] + 1e-9

    def test_shape_mismatch(self, geometric_small):
        family = geometric_small[0]
        with pytest.raises(DimensionMismatchError):
            analysis_gap_norm(family, family.take(range(3)))


class TestMapShift:

    def test_shifted_envelope_valid(self, geometric_small):
        family, fmap, reference = geometric_small
        report = envelope_from_map(family, fmap, reference)
        check = shift_envelope_check(fmap, fmap.shifted((2,)), report, family, reference)
        assert check["shift"] == 2
        assert check["bounded_difference"]
        assert check["valid_for_b"]
