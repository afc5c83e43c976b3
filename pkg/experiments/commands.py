"""
CLI Commands

One command per experiment type. Each runs either a built-in fixture or
the input files named in the config, and returns the verified clauses
alongside its results.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional

import numpy as np

from config import get_config
from density.familymap import IndexedFamilyMap
from density.index_free import density_index_free
from density.indexed import density_indexed, density_ratio
from errors import ConfigError
from fixtures.catalog import (
    alternating_power_sum,
    doubling_sum_family,
    doubling_sum_map,
    duplicated_basis,
    even_labels,
    example_maps,
    geometric_family,
    localized_copies,
    ordering_example,
    planar_reference,
    random_unit_family,
)
from frames.bounds import gram_entries, quadratic_form
from frames.family import VectorFamily, normalize_label
from frames.io import read_family_csv, read_family_json
from gabor.pipeline import gabor_rit_pipeline
from gabor.signal import Signal, TFSet, gaussian
from gabor.stft import stft, write_stft_csv
from gabor.systems import half_lattice_step
from localization.decay import Verdict
from localization.maps import envelope_from_map, envelope_index_free
from selection.blockwise import blockwise_select_caseA
from selection.result import SelectionResult
from selection.selector import SelectorConfig, finite_rit_select, normalize_columns
from selection.strategies import pareto_frontier
from selection.verify import WINDOW_TOLERANCE, verify_conclusions
from .base_command import BaseCommand, CommandOutcome, CommandRegistry
from .report import Clause
from .schema import ExperimentConfig

logger = logging.getLogger(__name__)

# limits the index-free sweeps are checked against
ORDERING_LIMITS = {
    "basis": {"F": 1.0, "F_even": 0.5},
    "intertwined": {"F": 0.5, "F_even": 0.25},
    "exotic": {"F": 1.0, "F_even": 0.25, "F_odd": 0.75},
}
ORDERING_TOLERANCE = 0.02
MAP_RATIOS = {"identity": Fraction(1, 2), "double": Fraction(1, 2), "rearranged": Fraction(3, 4)}
DIVERGING_COPIES = 200
GEOMETRIC_HALF_WIDTH = 256
POWER_SUM_TERMS = 10


def read_family(path: Path) -> VectorFamily:
    if path.suffix.lower() == ".json":
        return read_family_json(path)
    return read_family_csv(path)


def read_labels(path: Path) -> List[Any]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("selected", data.get("labels"))
    if not isinstance(data, list):
        raise ConfigError(f"{path} holds no label list", path="inputs.subset")
    return [normalize_label(l) for l in data]


def _sidecar(out_dir: Path, config: ExperimentConfig, what: str, suffix: str = "csv") -> Path:
    return out_dir / f"{config.name}.{what}.{suffix}"


def _flag(value: bool) -> float:
    return 1.0 if value else 0.0


def _selector_config(config: ExperimentConfig) -> SelectorConfig:
    p = config.params
    return SelectorConfig(epsilon=p.epsilon, delta=p.delta, strategy=p.strategy)


# -- density ---------------------------------------------------------------

class DensityCommand(BaseCommand):
    name = "density"
    description = "indexed and index-free densities"
    fixtures = ("example_maps", "orderings", "localized_copies")
    inputs = ("map", "subset", "family", "reference")

    def execute(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        fixture = self.default_fixture(config)
        if fixture == "example_maps":
            return self._example_maps(config)
        if fixture == "orderings":
            return self._orderings(config, out_dir)
        if fixture == "localized_copies":
            return self._copies(config, out_dir)
        return self._from_inputs(config, out_dir)

    def _example_maps(self, config: ExperimentConfig) -> CommandOutcome:
        outcome = CommandOutcome()
        for name, fmap in example_maps().items():
            J = even_labels(fmap)
            ratio = density_ratio(fmap, J)
            outcome.results[name] = {
                "ratio": f"{ratio.numerator}/{ratio.denominator}",
                "density_I": density_indexed(fmap).to_dict(),
                "density_J": density_indexed(fmap, J).to_dict(),
            }
            outcome.clauses.append(Clause(f"ratio_{name}", float(ratio), float(MAP_RATIOS[name]), 0.0, "eq",
                                          {"exact": f"{ratio.numerator}/{ratio.denominator}"}))
        return outcome

    def _orderings(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        outcome = CommandOutcome()
        r_max = config.params.r_max
        for kind, limits in ORDERING_LIMITS.items():
            ex = ordering_example(kind, config.params.radius)
            parts = {"F": ex.F, "F_even": ex.even(), "F_odd": ex.odd()}
            entry = {}
            for part, expected in limits.items():
                est = density_index_free(parts[part], ex.reference, r_max=r_max)
                entry[part] = est.to_dict()
                path = est.write_sweep_csv(_sidecar(out_dir, config, f"sweep_{kind}_{part}"))
                outcome.sidecars.append(path)
                outcome.clauses.append(Clause(f"{kind}_{part}", float(est.lower), expected, ORDERING_TOLERANCE, "eq"))
            outcome.results[kind] = entry
        return outcome

    def _copies(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        copies = config.params.copies if config.params.copies > 1 else DIVERGING_COPIES
        F, G = localized_copies(copies)
        est = density_index_free(F, G, r_max=16)
        outcome = CommandOutcome(results={"copies": copies, "density": est.to_dict()})
        outcome.clauses.append(Clause("diverging", _flag(est.diverging), 1.0, 0.0, "eq",
                                      {"admission": [list(a) for a in est.admission]}))
        outcome.sidecars.append(est.write_sweep_csv(_sidecar(out_dir, config, "sweep")))
        return outcome

    def _from_inputs(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        outcome = CommandOutcome()
        p = config.params
        subset = read_labels(config.input_path("subset")) if config.input_path("subset") else None
        if config.input_path("map") is not None:
            fmap = IndexedFamilyMap.read_json(config.input_path("map"))
            est = density_indexed(fmap, subset, mode=p.mode, r_max=p.r_max)
            outcome.results["indexed"] = est.to_dict()
            if subset is not None:
                if p.mode == "exact_pattern":
                    ratio = density_ratio(fmap, subset)
                    outcome.results["ratio"] = f"{ratio.numerator}/{ratio.denominator}"
                else:
                    whole = density_indexed(fmap, mode="sweep", r_max=p.r_max)
                    outcome.results["ratio"] = float(est.lower) / float(whole.lower) if float(whole.lower) else None
            if est.sweep:
                outcome.sidecars.append(est.write_sweep_csv(_sidecar(out_dir, config, "sweep_indexed")))
        if config.input_path("family") is not None:
            if config.input_path("reference") is None:
                raise ConfigError("index-free density needs a reference family", path="inputs.reference")
            family = read_family(config.input_path("family"))
            if subset is not None:
                family = family.subfamily(subset)
            est = density_index_free(family, read_family(config.input_path("reference")), r_max=p.r_max)
            outcome.results["index_free"] = est.to_dict()
            outcome.sidecars.append(est.write_sweep_csv(_sidecar(out_dir, config, "sweep_index_free")))
        return outcome


# -- localization ----------------------------------------------------------

class LocalizeCommand(BaseCommand):
    name = "localize"
    description = "minimal envelopes and summability verdicts"
    fixtures = ("planar", "orderings", "geometric")
    inputs = ("family", "map", "reference")

    def execute(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        fixture = self.default_fixture(config)
        if fixture == "planar":
            return self._planar(config, out_dir)
        if fixture == "orderings":
            return self._orderings(config)
        if fixture == "geometric":
            family, fmap, reference = geometric_family(W=config.params.window)
            return self._envelope(config, out_dir, family, fmap, reference, expect=Verdict.SUPPORTED)[0]
        for key in ("family", "map", "reference"):
            if config.input_path(key) is None:
                raise ConfigError(f"missing input '{key}'", path=f"inputs.{key}")
        return self._envelope(
            config, out_dir,
            read_family(config.input_path("family")),
            IndexedFamilyMap.read_json(config.input_path("map")),
            read_family(config.input_path("reference")),
        )[0]

    def _envelope(self, config, out_dir, family, fmap, reference, expect: Optional[Verdict] = None):
        report = envelope_from_map(family, fmap, reference)
        outcome = CommandOutcome(results={"envelope": report.to_dict()})
        outcome.sidecars.append(report.envelope.to_csv(_sidecar(out_dir, config, "envelope")))
        if expect is not None:
            outcome.clauses.append(Clause(f"verdict_{expect.value}", _flag(report.verdict is expect), 1.0, 0.0, "eq",
                                          {"verdict": report.verdict.value}))
        return outcome, report

    def _planar(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        L = config.params.window
        # n = 0 gives 2 e_0, outside the unit envelope
        labels = [n for n in range(-(L // 2), L // 2 + 1) if n != 0]
        family = doubling_sum_family(labels, L)
        outcome, report = self._envelope(config, out_dir, family, doubling_sum_map(labels), planar_reference(L),
                                         expect=Verdict.SUPPORTED)
        support = {tuple(int(x) for x in o) for o in report.envelope.support(get_config().tolerance.zero)}
        stray = support - {(0, 0), (0, 1)}
        outcome.clauses.append(Clause("envelope_support_outside", float(len(stray)), 0.0, 0.0, "eq",
                                      {"support": sorted(list(s) for s in support)}))
        for offset in ((0, 0), (0, 1)):
            outcome.clauses.append(Clause(f"envelope_at_{offset[0]}_{offset[1]}",
                                          report.envelope.value_at(offset), 1.0, 1e-12, "eq"))

        # quadratic forms of e_n -> e_n + e_2n along the powers of two
        N = POWER_SUM_TERMS
        W = 2 ** (N + 1)
        alternating = float(np.sum(np.abs(alternating_power_sum(N, W)) ** 2))
        powers = doubling_sum_family([2 ** n for n in range(1, N)], W)
        form = quadratic_form(powers, np.full(N - 1, 1.0 / np.sqrt(N)))
        outcome.clauses.append(Clause("alternating_sum_norm_squared", alternating, 2.0, 1e-9, "eq", {"terms": N}))
        outcome.clauses.append(Clause("power_sum_form", form, (4 * (N - 2) + 2) / N, 1e-9, "eq", {"terms": N}))
        outcome.results["power_sums"] = {"terms": N, "alternating_norm_squared": alternating, "form": form}
        return outcome

    def _orderings(self, config: ExperimentConfig) -> CommandOutcome:
        outcome = CommandOutcome()
        for kind in ORDERING_LIMITS:
            ex = ordering_example(kind, config.params.window)
            used = set(ex.F.labels)
            labels = [n for n in sorted(used) if 2 * n in used]
            family = doubling_sum_family(labels, ex.L)
            _, report = envelope_index_free(family, ex.reference)
            outcome.results[kind] = report.to_dict()
            outcome.clauses.append(Clause(f"{kind}_unsupported", _flag(report.verdict is Verdict.UNSUPPORTED), 1.0, 0.0,
                                          "eq", {"verdict": report.verdict.value}))
        return outcome


# -- selection -------------------------------------------------------------

class SelectCommand(BaseCommand):
    name = "select"
    description = "restricted invertibility selection with re-verification"
    fixtures = ("orthonormal", "duplicated_basis", "random", "geometric")
    inputs = ("family", "map", "reference")

    def execute(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        fixture = self.default_fixture(config)
        p = config.params
        extra: List[Clause] = []
        if fixture == "orthonormal":
            family = VectorFamily.from_matrix(np.eye(p.size))
            result = finite_rit_select(family, _selector_config(config))
            extra.append(Clause("selected_all", result.size_ratio, 1.0, 0.0, "eq"))
        elif fixture == "duplicated_basis":
            family = duplicated_basis(p.size)
            result = finite_rit_select(family, _selector_config(config))
            doubled = len(result.selected) - len({j for j, _ in result.selected})
            extra.append(Clause("repeated_vectors", float(doubled), 0.0, 0.0, "eq"))
            extra.append(Clause("share_cap", result.size_ratio, 0.5, 0.0, "le"))
        elif fixture == "random":
            family = random_unit_family(p.size, max(2, p.size // 2), config.seed)
            result = finite_rit_select(family, _selector_config(config))
            if p.size <= get_config().selection.exhaustive_max_n:
                extra.append(self._frontier_clause(family, result))
        elif fixture == "geometric":
            family, fmap, reference = geometric_family(W=GEOMETRIC_HALF_WIDTH)
            result = blockwise_select_caseA(family, fmap, reference, p.epsilon, p.delta, _selector_config(config),
                                            policy=p.policy or "strict")
        else:
            family = read_family(config.input_path("family"))
            if config.input_path("map") is not None and config.input_path("reference") is not None:
                fmap = IndexedFamilyMap.read_json(config.input_path("map"))
                reference = read_family(config.input_path("reference"))
                result = blockwise_select_caseA(family, fmap, reference, p.epsilon, p.delta, _selector_config(config),
                                                policy=p.policy or "strict")
            else:
                result = finite_rit_select(family, _selector_config(config))

        report = verify_conclusions(result)
        outcome = CommandOutcome(results={"selection": result.to_dict(), "verification": report.to_dict()})
        outcome.clauses.extend(Clause.from_check(c) for c in report.clauses)
        outcome.clauses.extend(extra)
        path = _sidecar(out_dir, config, "selection", "json")
        result.to_json(path)
        outcome.sidecars.append(path)
        return outcome

    @staticmethod
    def _frontier_clause(family: VectorFamily, result: SelectionResult) -> Clause:
        """The exhaustive optimum at |J| bounds the selector's certificate from above"""
        S, _ = normalize_columns(family)
        G = gram_entries(S)
        frontier = {size: lam for size, lam, _ in pareto_frontier(G)}
        best = frontier.get(result.size, 0.0)
        return Clause("frontier_dominates", best, result.certified_c, 1e-9, "ge", {"size": result.size})


# -- gabor -----------------------------------------------------------------

class GaborCommand(BaseCommand):
    name = "gabor"
    description = "Gabor system selection on the half-lattice"
    fixtures = ("gaussian_half_lattice", "duplicated_copies")
    inputs = ("window", "tf_set")

    def execute(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        fixture = self.default_fixture(config)
        p = config.params
        copies = 1
        if fixture in self.fixtures:
            phi = gaussian(p.n)
            h = p.h or half_lattice_step(p.n)
            Lambda = TFSet.lattice(p.n, h, h)
            if fixture == "duplicated_copies":
                copies = max(2, p.copies)
        else:
            for key in self.inputs:
                if config.input_path(key) is None:
                    raise ConfigError(f"missing input '{key}'", path=f"inputs.{key}")
            phi = Signal.read_csv(config.input_path("window"))
            Lambda = TFSet.read_json(config.input_path("tf_set"))
            copies = p.copies

        result = gabor_rit_pipeline(phi, Lambda, p.epsilon, p.delta, _selector_config(config),
                                    policy=p.policy or "window_fit", h=p.h, copies=copies)
        verification = result.trace["verification"]
        outcome = CommandOutcome(results={"selection": result.to_dict()})
        for c in verification["clauses"]:
            outcome.clauses.append(Clause(c["name"], c["measured"], c["threshold"], c["tolerance"], c["relation"],
                                          c["detail"]))
        outcome.clauses.append(Clause("lambda_min_positive", result.achieved_lower,
                                      get_config().selection.certificate_floor, 0.0, "ge"))
        if copies > 1:
            outcome.clauses.append(Clause("copy_share", result.size_ratio, 1.0 / copies, WINDOW_TOLERANCE, "le",
                                          {"copies": copies}))

        path = _sidecar(out_dir, config, "selection", "json")
        result.to_json(path)
        outcome.sidecars.append(path)
        outcome.sidecars.append(write_stft_csv(stft(phi, phi), _sidecar(out_dir, config, "stft_window")))
        return outcome


# -- verification ----------------------------------------------------------

class VerifyCommand(BaseCommand):
    name = "verify"
    description = "re-check a stored selection result against its family"
    inputs = ("family", "result", "map")

    def execute(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        for key in ("family", "result"):
            if config.input_path(key) is None:
                raise ConfigError(f"missing input '{key}'", path=f"inputs.{key}")
        family = read_family(config.input_path("family"))
        result = SelectionResult.read_json(config.input_path("result"), source=family)
        unknown = [l for l in result.selected if not family.has_label(l)]
        if unknown:
            raise ConfigError(f"stored selection names labels missing from the family: {unknown[:5]}",
                              path="inputs.result")
        report = verify_conclusions(result)
        outcome = CommandOutcome(results={"verification": report.to_dict(), "size": result.size})
        if not result.blockwise:
            outcome.clauses.extend(Clause.from_check(c) for c in report.clauses)
            return outcome

        # blockwise: the finite size clause does not apply
        lam = report.clause("lower_riesz")
        target = float(result.chain.get("target", lam.threshold))
        outcome.clauses.append(Clause("lower_riesz", lam.measured, target, 0.0, "ge", dict(lam.detail)))
        if config.input_path("map") is None:
            logger.warning("no family map given; the density clause of a blockwise result is skipped")
            return outcome
        fmap = IndexedFamilyMap.read_json(config.input_path("map"))
        r_max = config.params.r_max
        whole = float(density_indexed(fmap, mode="sweep", r_max=r_max).lower)
        part = float(density_indexed(fmap, result.selected, mode="sweep", r_max=r_max).lower)
        ratio = part / whole if whole > 0 else 0.0
        size_target = (1 - result.epsilon) * result.u ** 2 / result.T_norm ** 2
        outcome.clauses.append(Clause("density", ratio, size_target, WINDOW_TOLERANCE, "ge",
                                      {"density_J": part, "density_I": whole}))
        return outcome


def build_registry() -> CommandRegistry:
    registry = CommandRegistry()
    for command in (DensityCommand(), LocalizeCommand(), SelectCommand(), GaborCommand(), VerifyCommand()):
        registry.register(command)
    return registry
