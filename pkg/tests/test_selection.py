"""
Finite and blockwise selection: curves, strategies, derived parameters,
cross terms and re-verification.
"""
import math

import numpy as np
import pytest

from config import update_config
from errors import InfeasibleParametersError, SelectionInfeasibleError, SingularOperatorError
from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from fixtures.catalog import duplicated_basis, geometric_family, random_unit_family, standard_basis
from frames.bounds import gram_entries
from frames.family import VectorFamily, label_points
from gabor import reference_system
from localization.maps import envelope_from_map, self_localization_check
import selection.blockwise as blockwise_module
from selection import (
    BarrierCurve,
    ConstantCurve,
    ExhaustiveStrategy,
    GreedyStrategy,
    PowerCurve,
    SelectionResult,
    SelectorConfig,
    SmoothedCurve,
    StepCurve,
    StrategyRegistry,
    block_centers,
    blockwise_select_caseA,
    blockwise_select_caseB,
    cross_term_actual,
    cross_term_bound,
    cross_term_ratio,
    derive_parameters,
    finite_rit_select,
    get_strategy,
    make_curve,
    normalize_columns,
    pareto_frontier,
    required_size,
    smooth_c_curve,
    verify_conclusions,
)


def _identity(family: VectorFamily) -> IndexedFamilyMap:
    return IndexedFamilyMap.identity(FgaGroup.integers(1), family.labels)


def _paired_copies(W: int):
    """Two copies of each e_i, |i| <= W, both mapped to i"""
    E = standard_basis(W)
    labels = [(i, c) for i in E.labels for c in (0, 1)]
    family = VectorFamily(np.repeat(E.matrix, 2, axis=1), tuple(labels))
    fmap = IndexedFamilyMap.from_function(FgaGroup.integers(1), labels, lambda l: (l[0],))
    return family, fmap, E


def _two_basis_frame(L: int):
    """e_i at 2i and the pairwise Hadamard basis at 2j + 1: a tight frame with bound 2"""
    H = np.zeros((L, L))
    s = 1 / math.sqrt(2)
    for j in range(0, L, 2):
        H[j, j] = H[j + 1, j] = H[j, j + 1] = s
        H[j + 1, j + 1] = -s
    matrix = np.empty((L, 2 * L))
    matrix[:, 0::2] = np.eye(L)
    matrix[:, 1::2] = H
    reference = VectorFamily(matrix, tuple(range(2 * L)))
    family = VectorFamily(np.eye(L), tuple(range(L)))
    fmap = IndexedFamilyMap.from_function(FgaGroup.integers(1), family.labels, lambda i: (2 * i,))
    return family, fmap, reference


@pytest.fixture(scope="module")
def geometric_run():
    family, fmap, reference = geometric_family(W=256, rho=0.2, width=3)
    return blockwise_select_caseA(family, fmap, reference, 0.5, 0.5)


class TestCurves:

    def test_barrier_values(self):
        c = BarrierCurve()
        assert c(0.5) == pytest.approx((1 - math.sqrt(0.5)) ** 2)
        assert c(0.0) == 0.0
        assert c.is_monotone()

    def test_step_curve_needs_matching_values(self):
        with pytest.raises(ValueError):
            StepCurve(breaks=(0.3, 0.6), values=(0.1, 0.2))

    def test_smoothing_constant(self):
        smooth = smooth_c_curve(ConstantCurve(0.3), 0.05)
        for eps in (0.1, 0.4, 0.9):
            assert smooth(eps) == pytest.approx(0.3)
        # the window is clipped at zero
        assert smooth(0.02) == pytest.approx(0.3 * 0.02 / 0.05)

    def test_smoothing_step_is_continuous(self):
        smooth = smooth_c_curve(StepCurve(breaks=(0.5,), values=(0.05, 0.2)), 0.1)
        grid = np.arange(0.3, 0.7, 1e-3)
        values = np.array([smooth(e) for e in grid])
        assert np.max(np.abs(np.diff(values))) <= 1.5e-3 + 1e-6
        assert values[0] == pytest.approx(0.05)
        assert values[-1] == pytest.approx(0.2)

    def test_smoothing_keeps_monotone_curves_monotone(self):
        smooth = smooth_c_curve(BarrierCurve(), 0.05)
        assert smooth.is_monotone(points=200)
        for eps in (0.2, 0.5, 0.8):
            assert smooth(eps) <= BarrierCurve()(eps) + 1e-12

    def test_smoothing_width_must_be_positive(self):
        with pytest.raises(ValueError):
            smooth_c_curve(BarrierCurve(), 0.0)

    def test_make_curve(self):
        curve = make_curve({"name": "power", "exponent": 1.0, "scale": 0.5})
        assert isinstance(curve, PowerCurve)
        assert curve(0.4) == pytest.approx(0.2)
        smoothed = make_curve({"name": "constant", "value": 0.2, "zeta": 0.1})
        assert isinstance(smoothed, SmoothedCurve)
        assert isinstance(make_curve(), BarrierCurve)
        with pytest.raises(ValueError):
            make_curve({"name": "cubic"})


class TestSelectorConfig:

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            SelectorConfig(epsilon=1.0)

    def test_curve_value_range(self):
        with pytest.raises(ValueError):
            SelectorConfig(curve=ConstantCurve(1.5))

    def test_with_epsilon(self):
        cfg = SelectorConfig(strategy="greedy").with_epsilon(0.3, require_curve=False)
        assert cfg.epsilon == 0.3 and cfg.strategy == "greedy"
        assert not cfg.require_curve


class TestFiniteSelection:

    def test_required_size(self):
        assert required_size(10, 0.5, 1.0, 2.0) == 2
        assert required_size(8, 0.5, 1.0, 1.0) == 4

    def test_normalize_columns(self, rng):
        M = rng.standard_normal((4, 6)) * np.arange(1, 7)
        S, norms = normalize_columns(VectorFamily.from_matrix(M))
        np.testing.assert_allclose(np.linalg.norm(S.matrix, axis=0), 1.0)
        np.testing.assert_allclose(norms, np.linalg.norm(M, axis=0))

    def test_zero_column(self):
        F = VectorFamily.from_vectors([[1, 0], [0, 0]])
        with pytest.raises(SingularOperatorError):
            finite_rit_select(F)

    def test_orthonormal_keeps_everything(self, orthonormal5):
        result = finite_rit_select(orthonormal5)
        assert result.size == 5
        assert result.achieved_lower == pytest.approx(1.0)
        assert result.certified_c == pytest.approx(1.0)
        assert result.trace["required_size"] == 3

    def test_duplicated_basis(self):
        family = duplicated_basis(32)
        result = finite_rit_select(family, SelectorConfig(epsilon=0.5))
        picked = [j for j, _ in result.selected]
        assert len(picked) == len(set(picked))
        assert result.size / len(family) >= 0.25
        assert result.achieved_lower > 0

    def test_duplicated_basis_is_tight(self):
        # no subset larger than n avoids a repeated vector
        for n in range(2, 7):
            frontier = pareto_frontier(gram_entries(duplicated_basis(n)))
            for size, lam, _ in frontier:
                if size <= n:
                    assert lam == pytest.approx(1.0)
                else:
                    assert lam <= 1e-9

    def test_oracle_meets_curve_on_random_families(self, rng):
        curve = BarrierCurve()
        for trial in range(50):
            n, dim = int(rng.integers(3, 11)), int(rng.integers(2, 7))
            family = random_unit_family(n, dim, seed=trial)
            result = finite_rit_select(family, SelectorConfig(strategy="oracle"))
            assert result.achieved_lower >= curve(0.5) * result.u ** 2 - 1e-9
            assert result.size >= result.trace["required_size"]

    def test_frontier_dominates_selectors(self, rng):
        for trial in range(50):
            n, dim = int(rng.integers(3, 11)), int(rng.integers(2, 7))
            family = random_unit_family(n, dim, seed=100 + trial)
            frontier = {size: lam for size, lam, _ in pareto_frontier(gram_entries(normalize_columns(family)[0]))}
            for strategy in ("barrier", "greedy"):
                cfg = SelectorConfig(strategy=strategy, require_curve=False)
                result = finite_rit_select(family, cfg)
                assert frontier[result.size] >= result.certified_c - 1e-9

    def test_infeasible_certificate(self):
        F = VectorFamily.from_vectors([[1, 0], [0.8, 0.6]])
        cfg = SelectorConfig(epsilon=0.05, curve=ConstantCurve(0.99))
        with pytest.raises(SelectionInfeasibleError) as err:
            finite_rit_select(F, cfg)
        assert err.value.best_subset == [0, 1]
        assert err.value.certificate == pytest.approx(0.2)

    def test_removing_columns_keeps_bound(self, rng):
        family = random_unit_family(10, 6, seed=7)
        result = finite_rit_select(family, SelectorConfig(require_curve=False))
        for drop in result.selected:
            rest = [l for l in result.selected if l != drop]
            if rest:
                lam = np.linalg.eigvalsh(gram_entries(family.subfamily(rest)))[0]
                assert lam >= result.achieved_lower - 1e-12

    def test_deterministic(self, duplicated8):
        first = finite_rit_select(duplicated8)
        second = finite_rit_select(duplicated8)
        assert first.selected == second.selected
        assert first.achieved_lower == second.achieved_lower


class TestStrategies:

    def test_registry_aliases(self):
        assert get_strategy("oracle").name == "exhaustive"
        assert get_strategy("Exhaustive_Oracle").name == "exhaustive"
        with pytest.raises(ValueError):
            StrategyRegistry().get("barrier")

    def test_exhaustive_cap(self):
        assert ExhaustiveStrategy().can_handle(12)
        assert not ExhaustiveStrategy().can_handle(13)
        update_config(exhaustive_max_n=4)
        with pytest.raises(ValueError):
            finite_rit_select(random_unit_family(6, 3, seed=1), SelectorConfig(strategy="exhaustive"))

    def test_greedy_skips_duplicates(self):
        G = gram_entries(duplicated_basis(6))
        outcome = GreedyStrategy(lookahead=4).select(G, m=3, threshold=0.1)
        assert outcome.size == 6
        assert outcome.certificate == pytest.approx(1.0)
        assert {p // 2 for p in outcome.positions} == set(range(6))

    def test_barrier_level_run(self):
        G = gram_entries(duplicated_basis(4))
        assert get_strategy("barrier").run(G, 0.9) == [0, 2, 4, 6]

    def test_frontier_first_subset(self):
        G = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]])
        frontier = pareto_frontier(G)
        assert [size for size, _, _ in frontier] == [1, 2, 3]
        assert frontier[1][2] == (0, 2)
        assert frontier[2][1] == pytest.approx(0.5)


class TestDerivedParameters:

    def test_orthonormal_reference(self):
        E = standard_basis(16)
        env = envelope_from_map(E, _identity(E), E).envelope
        params = derive_parameters(0.5, 0.8, ConstantCurve(0.1), 1.0, 1.0, 1.0, 1.0, env)
        assert params.alpha <= 0.1
        assert params.Q == 1
        assert params.record("truncation").lhs == 0.0
        assert params.all_hold
        assert params.spacing == 2 * params.P + 1

    def test_geometric_envelope(self, geometric_small):
        family, fmap, reference = geometric_small
        env = envelope_from_map(family, fmap, reference).envelope
        u = float(family.norms().min())
        T = float(np.linalg.norm(family.matrix, 2))
        params = derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, u, T, env)
        assert params.Q == 2
        assert params.epsilon_prime < 0.5
        assert params.alpha <= 0.5 / 8
        assert all(r.slack >= -1e-12 for r in params.records)
        assert (1 - params.epsilon_prime) * (1 - params.alpha) ** 2 / (1 + params.alpha) ** 2 >= 0.5

    def test_covering_radius(self):
        E = standard_basis(4)
        env = envelope_from_map(E, _identity(E), E).envelope
        params = derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0, env, covering_radius=8)
        assert params.P == 8
        assert params.record("border").lhs == 0.0

    def test_policy_requirements(self):
        with pytest.raises(ValueError):
            derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0, policy="window_fit")
        with pytest.raises(ValueError):
            derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0, policy="loose")

    def test_truncation_infeasible(self):
        with pytest.raises(InfeasibleParametersError) as err:
            derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0,
                              policy="window_fit", gap_fn=lambda q: 1.0, max_radius=5)
        assert err.value.constraint == "truncation"

    def test_window_fit_keeps_border_out_of_records(self):
        E = standard_basis(16)
        env = envelope_from_map(E, _identity(E), E).envelope
        params = derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0, env,
                                   policy="window_fit", gap_fn=lambda q: 0.0, max_radius=3)
        assert params.P == 2
        assert params.all_hold
        assert all(r.slack >= -1e-12 for r in params.records)
        with pytest.raises(KeyError):
            params.record("border")
        border = [r for r in params.diagnostics if r.name == "border"]
        assert len(border) == 1 and not border[0].holds
        assert params.to_dict()["diagnostics"][0]["name"] == "border"

    def test_strict_border_is_binding(self):
        E = standard_basis(16)
        env = envelope_from_map(E, _identity(E), E).envelope
        with pytest.raises(InfeasibleParametersError) as err:
            derive_parameters(0.5, 0.5, BarrierCurve(), 1.0, 1.0, 1.0, 1.0, env, max_radius=3)
        assert err.value.constraint == "border"


class TestCrossTerms:

    def test_orthogonal_blocks(self):
        blocks = [np.eye(4)[:, 0], np.eye(4)[:, 2]]
        assert cross_term_actual(blocks) == pytest.approx(0.0, abs=1e-15)

    def test_repeated_block(self):
        x = np.array([1.0, 2.0])
        assert cross_term_actual([x, x]) == pytest.approx(10.0)

    def test_single_block_has_no_bound(self):
        E = standard_basis(3)
        env = envelope_from_map(E, _identity(E), E).envelope
        bound, actual = cross_term_bound([np.ones(3)], env, 1, 1, 1, 1.0, 0.5, 1.0, 1.0)
        assert bound == 0.0 and actual == 0.0

    def test_ratio(self):
        assert cross_term_ratio(np.eye(3), [np.array([0]), np.array([1, 2])])[0] == 0.0
        G = np.array([[1.0, 0.5], [0.5, 1.0]])
        rho, v = cross_term_ratio(G, [np.array([0]), np.array([1])])
        assert rho == pytest.approx(0.5)
        assert v.shape == (2,)

    def test_bound_dominates_random_localized_blocks(self):
        reference, group = reference_system(32, h=4)
        envelope = self_localization_check(reference, group=group).envelope
        points = label_points(reference)
        # radius-1 boxes around these centers are at least 2 apart on Z_8 x Z_8
        centers = np.array([[0, 0], [0, 4], [4, 0], [4, 4]])
        members = [np.nonzero(group.distance(points, k[None, :]) <= 1)[0] for k in centers]
        rng = np.random.default_rng(3)
        for _ in range(100):
            coeffs = [rng.standard_normal(len(m)) + 1j * rng.standard_normal(len(m)) for m in members]
            blocks = [reference.matrix[:, m] @ c for m, c in zip(members, coeffs)]
            c_val = min(np.vdot(x, x).real / np.vdot(c, c).real for x, c in zip(blocks, coeffs))
            bound, actual = cross_term_bound(blocks, envelope, 2, 1, 0, 1.0, c_val, 1.0, 1.0, dim=2)
            assert actual <= bound * (1 + 1e-9) + 1e-9


class TestBlockCenters:

    def test_symmetric_window(self):
        centers = block_centers(FgaGroup.integers(1), np.array([-300]), np.array([300]), 54, 109)
        assert centers.ravel().tolist() == [-218, -109, 0, 109, 218]

    def test_no_room(self):
        centers = block_centers(FgaGroup.integers(1), np.array([-10]), np.array([10]), 20, 41)
        assert centers.shape == (0, 1)


class TestBlockwiseCaseA:

    def test_orthonormal(self):
        E = standard_basis(160)
        result = blockwise_select_caseA(E, _identity(E), E, 0.5, 0.5)
        assert len(set(result.selected)) == result.size
        assert result.achieved_lower == pytest.approx(1.0)
        assert result.size_ratio >= 0.95
        assert result.chain["gap"] == pytest.approx(0.0, abs=1e-12)
        assert verify_conclusions(result).passed

    def test_paired_copies(self):
        family, fmap, reference = _paired_copies(128)
        result = blockwise_select_caseA(family, fmap, reference, 0.5, 0.5)
        picked = [i for i, _ in result.selected]
        assert len(picked) == len(set(picked))
        assert result.achieved_lower == pytest.approx(1.0)
        assert result.trace["D_minus"] == pytest.approx(2.0)
        report = verify_conclusions(result)
        assert report.passed
        assert report.clause("density").measured == pytest.approx(0.5, abs=0.02)

    def test_geometric_certifies(self, geometric_run):
        result = geometric_run
        assert result.params.Q == 2
        assert result.params.all_hold
        assert result.chain["direct"] >= result.chain["chain_bound"] - 1e-9
        assert result.chain["direct"] >= result.chain["target"] - 1e-9
        assert result.achieved_lower >= result.required_c * (1 - 0.25) * result.u ** 2 - 1e-9

    def test_geometric_verifies(self, geometric_run):
        report = verify_conclusions(geometric_run)
        assert report.passed
        size_target = 0.5 * geometric_run.u ** 2 / geometric_run.T_norm ** 2
        assert report.clause("density").measured >= size_target - 0.05
        assert report.clause("lower_riesz").detail["agrees"]

    def test_block_records(self, geometric_run):
        for block in geometric_run.per_block:
            assert block.kept == block.selected - block.trimmed
            assert block.lambda_min > 0

    def test_window_fit_records_hold(self):
        family, fmap, reference = geometric_family(W=64, rho=0.2, width=3)
        try:
            result = blockwise_select_caseA(family, fmap, reference, 0.5, 0.5, policy="window_fit")
        except (InfeasibleParametersError, SelectionInfeasibleError):
            return
        assert all(r.holds for r in result.params.records)
        assert "border" not in [r.name for r in result.params.records]
        assert result.required_c == pytest.approx(BarrierCurve()(result.params.epsilon_prime))
        target = result.required_c * 0.75 * (result.chain["A"] / result.chain["B"]) * result.u ** 2
        report = verify_conclusions(result)
        assert report.clause("lower_riesz").threshold == pytest.approx(target)
        assert report.clause("lower_riesz").passed

    def test_lambda_min_below_target_raises(self, monkeypatch):
        E = standard_basis(160)
        monkeypatch.setattr(blockwise_module, "exact_bounds", lambda family: (1e-6, 1.0))
        with pytest.raises(SelectionInfeasibleError) as err:
            blockwise_select_caseA(E, _identity(E), E, 0.5, 0.5)
        assert err.value.certificate == pytest.approx(1e-6)
        assert err.value.required > 1e-6
        assert len(err.value.best_subset) > 0


class TestBlockwiseCaseB:

    def test_orthonormal_tight_frame(self):
        E = standard_basis(160)
        result = blockwise_select_caseB(E, _identity(E), E, 0.5, 0.5)
        assert result.params.R_prime == 1
        assert result.params.W == 2 * result.params.P + 1
        assert result.chain["cross_ratio"] == 0.0
        assert result.chain["cross_ratio"] < result.chain["cross_ratio_limit"]
        assert result.achieved_lower == pytest.approx(1.0)
        assert verify_conclusions(result).passed

    def test_requires_tight_reference(self):
        E = standard_basis(8)
        skewed = E.with_matrix(E.matrix * np.linspace(1.0, 2.0, len(E))[None, :])
        with pytest.raises(InfeasibleParametersError) as err:
            blockwise_select_caseB(E, _identity(E), skewed, 0.5, 0.5)
        assert err.value.constraint == "tight_frame"

    def test_union_of_two_bases(self):
        family, fmap, reference = _two_basis_frame(96)
        result = blockwise_select_caseB(family, fmap, reference, 0.5, 0.5, policy="window_fit")
        assert result.chain["A"] == pytest.approx(2.0)
        assert result.params.Q == 3
        assert result.params.R_prime == 4
        assert result.params.W == 2 * result.params.P + 4
        assert result.chain["cross_ratio"] < 0.5 / 8
        assert result.chain["cross_actual"] <= result.chain["cross_bound"] + 1e-9
        assert result.params.all_hold
        assert "separation" in [r.name for r in result.params.diagnostics]
        assert result.achieved_lower == pytest.approx(1.0)
        report = verify_conclusions(result)
        assert report.clause("cross_ratio").passed
        assert report.passed

    def test_cross_ratio_at_limit_raises(self, monkeypatch):
        E = standard_basis(160)
        monkeypatch.setattr(blockwise_module, "cross_term_ratio",
                            lambda gram, groups: (0.5, np.ones(gram.shape[0])))
        with pytest.raises(InfeasibleParametersError) as err:
            blockwise_select_caseB(E, _identity(E), E, 0.5, 0.5)
        assert err.value.constraint == "separation"


class TestVerification:

    def test_specialization(self, orthonormal5):
        report = verify_conclusions(finite_rit_select(orthonormal5))
        assert report.passed
        assert report.specialization.startswith("density(J) >= (1 - eps) / ||T||^2")

    def test_injected_duplicate_fails(self):
        family = duplicated_basis(4)
        result = finite_rit_select(family)
        assert verify_conclusions(result).passed
        result.selected.append((0, 1))
        report = verify_conclusions(result)
        assert not report.clause("lower_riesz").passed
        assert report.clause("lower_riesz").threshold >= 1e-9
        assert not report.passed

    def test_cross_ratio_clause(self):
        E = standard_basis(160)
        result = blockwise_select_caseB(E, _identity(E), E, 0.5, 0.5)
        clause = verify_conclusions(result).clause("cross_ratio")
        assert clause.relation == "le" and clause.passed
        result.chain["cross_ratio"] = 0.07
        report = verify_conclusions(result)
        assert not report.clause("cross_ratio").passed
        assert not report.passed

    def test_stored_result(self, tmp_path, duplicated8):
        result = finite_rit_select(duplicated8)
        path = tmp_path / "selection.json"
        result.to_json(path)
        loaded = SelectionResult.read_json(path, source=duplicated8)
        assert loaded.selected == result.selected
        assert verify_conclusions(loaded).passed
        row = loaded.summary_row()
        assert row["size"] == result.size and row["blocks"] == 0

    def test_missing_source(self, duplicated8):
        result = finite_rit_select(duplicated8)
        result.source = None
        with pytest.raises(ValueError):
            verify_conclusions(result)
