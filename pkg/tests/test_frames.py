"""
Finite frame machinery: Gram matrices, bounds, duals, partition inequality.
"""
import numpy as np
import pytest

from errors import DimensionMismatchError, PartitionError, SingularOperatorError
from fixtures.catalog import alternating_power_sum, doubling_sum_family
from frames.bounds import (
    BoundsKind,
    bessel_bound,
    frame_bounds,
    gram,
    lambda_min,
    quadratic_form,
    riesz_bounds,
)
from frames.family import VectorFamily
from frames.io import read_family_csv, read_family_json, write_family_csv, write_family_json
from frames.operators import (
    analysis,
    dual_family,
    dual_pair_residual,
    frame_operator,
    reconstruction_residual,
    spectral_norm,
    synthesis,
)
from frames.partition import partition_inequality_check


class TestVectorFamily:

    def test_default_labels(self):
        F = VectorFamily.from_matrix(np.eye(3))
        assert F.labels == (0, 1, 2)
        assert F.dim == 3 and len(F) == 3

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            VectorFamily.from_matrix(np.eye(2), labels=["a", "a"])

    def test_mismatched_vectors_rejected(self):
        with pytest.raises(DimensionMismatchError):
            VectorFamily.from_vectors([[1, 0], [1, 0, 0]])

    def test_list_labels_become_tuples(self):
        F = VectorFamily.from_matrix(np.eye(2), labels=[[0, 1], [1, 0]])
        assert F.labels == ((0, 1), (1, 0))
        np.testing.assert_array_equal(F.vector([1, 0]), [0, 1])

    def test_subfamily_keeps_order(self):
        F = VectorFamily.from_matrix(np.eye(4), labels=list("abcd"))
        sub = F.subfamily(["c", "a"])
        assert sub.labels == ("c", "a")
        np.testing.assert_array_equal(sub.matrix[:, 0], np.eye(4)[:, 2])


class TestGram:

    def test_orthonormal_pair(self):
        G = gram(VectorFamily.from_matrix(np.eye(2)))
        np.testing.assert_allclose(G.entries, np.eye(2), atol=1e-15)

    def test_duplicated_vector(self):
        F = VectorFamily.from_vectors([[1, 0], [1, 0]])
        np.testing.assert_allclose(gram(F).entries, [[1, 1], [1, 1]])

    def test_matches_inner_products(self, rng):
        M = rng.standard_normal((6, 5)) + 1j * rng.standard_normal((6, 5))
        F = VectorFamily.from_matrix(M)
        expected = np.array([[np.vdot(M[:, j], M[:, i]) for j in range(5)] for i in range(5)])
        np.testing.assert_allclose(gram(F).entries, expected, atol=1e-12)

    def test_hermitian_psd(self, random_frame):
        G = gram(random_frame).entries
        np.testing.assert_allclose(G, G.conj().T, atol=1e-14)
        eig = np.linalg.eigvalsh(G)
        assert eig.min() >= -1e-9 * np.abs(eig).max()


class TestBounds:

    def test_orthonormal(self, orthonormal5):
        report = riesz_bounds(orthonormal5)
        assert report.kind is BoundsKind.RIESZ
        assert report.lower == pytest.approx(1.0)
        assert report.upper == pytest.approx(1.0)
        assert bessel_bound(orthonormal5) == pytest.approx(1.0)

    def test_duplicated_vector(self):
        F = VectorFamily.from_vectors([[1, 0], [1, 0]])
        report = riesz_bounds(F)
        assert report.lower == pytest.approx(0.0, abs=1e-12)
        assert report.upper == pytest.approx(2.0)
        assert report.rank_deficient
        assert bessel_bound(F) == pytest.approx(2.0)

    def test_union_of_bases_is_tight(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        F = VectorFamily.from_matrix(np.hstack([np.eye(4), Q]))
        report = frame_bounds(F)
        assert report.lower == pytest.approx(2.0)
        assert report.upper == pytest.approx(2.0)

    def test_frame_bounds_against_rayleigh_quotients(self, rng):
        M = rng.standard_normal((3, 7))
        F = VectorFamily.from_matrix(M)
        report = frame_bounds(F)
        x = rng.standard_normal((3, 20000))
        x /= np.linalg.norm(x, axis=0)
        q = np.sum(np.abs(M.T @ x) ** 2, axis=0)
        assert q.min() >= report.lower - 1e-9
        assert q.max() <= report.upper + 1e-9
        assert q.min() == pytest.approx(report.lower, rel=1e-2)
        assert q.max() == pytest.approx(report.upper, rel=1e-2)

    def test_span_restriction(self):
        F = VectorFamily.from_vectors([[1, 0, 0], [0, 2, 0]])
        report = frame_bounds(F)
        assert report.lower == pytest.approx(1.0)
        assert report.upper == pytest.approx(4.0)
        assert report.rank_deficient

    def test_all_zero_family(self):
        with pytest.raises(SingularOperatorError):
            frame_bounds(VectorFamily.from_matrix(np.zeros((3, 2))))

    def test_scaling_law(self, random_frame):
        c = 1.5 - 0.5j
        r, rs = riesz_bounds(random_frame), riesz_bounds(random_frame.scaled(c))
        f, fs = frame_bounds(random_frame), frame_bounds(random_frame.scaled(c))
        assert rs.upper == pytest.approx(abs(c) ** 2 * r.upper)
        assert fs.lower == pytest.approx(abs(c) ** 2 * f.lower)
        assert fs.upper == pytest.approx(abs(c) ** 2 * f.upper)

    def test_bessel_equals_riesz_upper(self, rng):
        for _ in range(10):
            n, m = rng.integers(2, 9, size=2)
            F = VectorFamily.from_matrix(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
            assert bessel_bound(F) == pytest.approx(riesz_bounds(F).upper, rel=1e-10)

    def test_riesz_inequality_on_random_coefficients(self, random_frame, rng):
        F = random_frame.take(range(4))
        report = riesz_bounds(F)
        for _ in range(50):
            a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            q = quadratic_form(F, a)
            norm2 = np.vdot(a, a).real
            assert report.lower * norm2 - 1e-9 <= q <= report.upper * norm2 + 1e-9


class TestDoublingSum:
    """The operator e_n -> e_n + e_2n along powers of two"""

    def test_alternating_sum_has_norm_two(self):
        v = alternating_power_sum(10, 2048)
        assert np.sum(np.abs(v) ** 2) == pytest.approx(2.0, abs=1e-9)

    def test_not_a_riesz_sequence(self):
        N = 10
        F = doubling_sum_family([2 ** n for n in range(1, N + 1)], 2048)
        assert lambda_min(F) <= 2.0 / N + 1e-12

    def test_quadratic_form_along_powers(self):
        N = 10
        F = doubling_sum_family([2 ** n for n in range(1, N)], 1024)
        form = quadratic_form(F, np.full(N - 1, 1.0 / np.sqrt(N)))
        assert form == pytest.approx((4 * (N - 2) + 2) / N, abs=1e-9)

    def test_bessel_bound_grows_toward_four(self):
        small = bessel_bound(doubling_sum_family(range(1, 9), 16))
        large = bessel_bound(doubling_sum_family(range(1, 65), 128))
        assert small < large < 4.0 + 1e-12


class TestOperators:

    def test_analysis_synthesis_adjoint(self, random_frame, rng):
        f = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        c = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        assert np.vdot(c, analysis(random_frame, f)) == pytest.approx(np.vdot(synthesis(random_frame, c), f))

    def test_frame_operator(self, random_frame, rng):
        f = rng.standard_normal(5)
        np.testing.assert_allclose(
            frame_operator(random_frame) @ f,
            synthesis(random_frame, analysis(random_frame, f)),
            atol=1e-12,
        )

    def test_orthonormal_dual_is_itself(self, orthonormal5):
        np.testing.assert_allclose(dual_family(orthonormal5).matrix, orthonormal5.matrix, atol=1e-14)

    def test_tight_frame_dual(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        F = VectorFamily.from_matrix(np.hstack([np.eye(4), Q]))
        np.testing.assert_allclose(dual_family(F).matrix, F.matrix / 2.0, atol=1e-12)

    def test_reconstruction(self, random_frame, rng):
        dual = dual_family(random_frame)
        samples = rng.standard_normal((5, 100)) + 1j * rng.standard_normal((5, 100))
        assert reconstruction_residual(random_frame, dual, samples) < 1e-9
        assert dual_pair_residual(random_frame, dual) < 1e-9

    def test_singular_frame_operator(self):
        F = VectorFamily.from_vectors([[1, 0, 0], [0, 1, 0]])
        with pytest.raises(SingularOperatorError):
            dual_family(F)
        dual = dual_family(F, within_span=True)
        assert reconstruction_residual(F, dual, np.array([[1.0], [2.0], [0.0]])) < 1e-12

    def test_power_iteration_matches_dense(self, rng):
        M = rng.standard_normal((40, 30))
        assert spectral_norm(M, dense_cap=10) == pytest.approx(np.linalg.norm(M, 2), rel=1e-4)


class TestPartitionInequality:

    def test_orthonormal_equalities(self, orthonormal5, rng):
        a = rng.standard_normal(5)
        check = partition_inequality_check(orthonormal5, [[0, 1], [2], [3, 4]], a)
        assert check.lhs == pytest.approx(check.mid)
        assert check.mid == pytest.approx(check.rhs)
        assert check.holds

    def test_singleton_partition(self, random_frame, rng):
        F = random_frame.take(range(4))
        check = partition_inequality_check(F, [list(F.labels)], rng.standard_normal(4))
        assert check.holds
        assert check.lhs <= check.mid <= check.rhs

    def test_random_trials(self, rng):
        for _ in range(300):
            n = int(rng.integers(2, 7))
            F = VectorFamily.from_matrix(rng.standard_normal((n + 2, n)) + 1j * rng.standard_normal((n + 2, n)))
            cut = sorted(rng.choice(np.arange(1, n), size=int(rng.integers(0, n - 1)), replace=False).tolist())
            bounds = [0] + cut + [n]
            partition = [list(range(bounds[k], bounds[k + 1])) for k in range(len(bounds) - 1)]
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            check = partition_inequality_check(F, partition, a)
            assert check.holds
            assert check.slack >= -1e-9

    def test_overlap_rejected(self, orthonormal5):
        with pytest.raises(PartitionError):
            partition_inequality_check(orthonormal5, [[0, 1], [1, 2, 3, 4]], np.ones(5))

    def test_dependent_family_rejected(self):
        F = VectorFamily.from_vectors([[1, 0], [1, 0]])
        with pytest.raises(SingularOperatorError):
            partition_inequality_check(F, [[0], [1]], np.ones(2))


class TestSerialization:

    def test_csv(self, tmp_path, rng):
        M = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        F = VectorFamily.from_matrix(M, labels=[(0, 1), (1, 1), "x", 7])
        G = read_family_csv(write_family_csv(F, tmp_path / "f.csv"))
        assert G.labels == F.labels
        np.testing.assert_array_equal(G.matrix, F.matrix)

    def test_json(self, tmp_path, rng):
        F = VectorFamily.from_matrix(rng.standard_normal((2, 3)), labels=[(0, 0), (0, 1), (1, 0)])
        G = read_family_json(write_family_json(F, tmp_path / "f.json"))
        assert G.labels == F.labels
        np.testing.assert_allclose(G.matrix, F.matrix)
