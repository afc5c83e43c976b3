"""
Config validation, the experiment runner and exit codes of main().
"""
import json

import pandas as pd
import pytest

from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from errors import ConfigError
from experiments.runner import run
from experiments.schema import load_config, parse_config
from fixtures.catalog import duplicated_basis, standard_basis
from frames.io import write_family_csv
from main import EXIT_CLAUSE_FAILED, EXIT_INFEASIBLE, EXIT_INPUT_ERROR, EXIT_PASS, main
from selection import finite_rit_select


def _write_config(path, **data):
    path.write_text(json.dumps(data))
    return path


class TestSchema:

    def test_defaults(self):
        cfg = parse_config({"command": "select"})
        assert cfg.params.epsilon == 0.5
        assert cfg.seed == 0 and cfg.fixture is None

    @pytest.mark.parametrize("data, path", [
        ({"command": "select", "params": {"epsilon": 1.5}}, "params.epsilon"),
        ({"command": "select", "params": {"strategy": "random"}}, "params.strategy"),
        ({"command": "select", "colour": "red"}, "colour"),
        ({"command": "cluster"}, "command"),
        ({"command": "select", "seed": -1}, "seed"),
        ({"command": "select", "name": "a/b"}, "name"),
    ])
    def test_errors_carry_the_field_path(self, data, path):
        with pytest.raises(ConfigError) as err:
            parse_config(data)
        assert err.value.path == path

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_inputs_resolve_against_config_dir(self, tmp_path):
        path = _write_config(tmp_path / "run.json", command="verify", inputs={"family": "f.csv"})
        cfg = load_config(path, {"seed": 9})
        assert cfg.input_path("family") == tmp_path / "f.csv"
        assert cfg.seed == 9


class TestRunner:

    def test_unknown_fixture(self, tmp_path):
        cfg = parse_config({"command": "select", "fixture": "spiral", "output_dir": str(tmp_path)})
        with pytest.raises(ConfigError) as err:
            run(cfg)
        assert err.value.path == "fixture"

    def test_unknown_input(self, tmp_path):
        cfg = parse_config({"command": "gabor", "inputs": {"family": "x.csv"}, "output_dir": str(tmp_path)})
        with pytest.raises(ConfigError) as err:
            run(cfg)
        assert err.value.path == "inputs.family"

    def test_density_maps(self, tmp_path):
        cfg = parse_config({"command": "density", "fixture": "example_maps", "name": "maps"})
        report = run(cfg, out_dir=tmp_path)
        assert report.passed
        assert report.results["rearranged"]["ratio"] == "3/4"
        summary = pd.read_csv(tmp_path / "maps.summary.csv")
        assert len(summary) == 3
        assert (tmp_path / "maps.timings.json").exists()

    def test_planar_localization(self, tmp_path):
        cfg = parse_config({"command": "localize", "fixture": "planar", "name": "planar"})
        report = run(cfg, out_dir=tmp_path)
        assert report.passed
        assert (tmp_path / "planar.envelope.csv").exists()

    def test_duplicated_basis_selection(self, tmp_path):
        cfg = parse_config({"command": "select", "fixture": "duplicated_basis", "params": {"size": 32}})
        report = run(cfg, out_dir=tmp_path)
        assert report.passed
        names = {c.name for c in report.clauses}
        assert {"density", "lower_riesz", "repeated_vectors", "share_cap"} <= names

    def test_report_reproducible(self, tmp_path):
        cfg = parse_config({"command": "select", "fixture": "random", "seed": 11,
                            "params": {"size": 10}, "output_dir": str(tmp_path)})
        texts = []
        for _ in range(2):
            report = run(cfg)
            text = (tmp_path / "run.report.json").read_text()
            texts.append(text.replace(report.timestamp, ""))
        assert texts[0] == texts[1]
        assert "timings" not in json.loads(texts[0])


class TestMain:

    def test_list_commands(self):
        assert main(["--list-commands"]) == EXIT_PASS

    def test_no_config(self):
        assert main([]) == EXIT_INPUT_ERROR

    def test_seed_range(self):
        with pytest.raises(SystemExit):
            main(["--config", "x.json", "--seed", str(2 ** 64)])

    def test_emit_fixtures(self, tmp_path):
        assert main(["--emit-fixtures", str(tmp_path / "fx")]) == EXIT_PASS
        assert (tmp_path / "fx" / "planar_arrangement.json").exists()

    def test_passing_run(self, tmp_path):
        path = _write_config(tmp_path / "ortho.json", command="select", fixture="orthonormal", name="ortho")
        assert main(["--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_PASS
        report = json.loads((tmp_path / "out" / "ortho.report.json").read_text())
        assert report["passed"]
        assert report["config"]["output_dir"] == str(tmp_path / "out")

    def test_schema_error(self, tmp_path):
        path = _write_config(tmp_path / "bad.json", command="select", params={"delta": 0})
        assert main(["--config", str(path)]) == EXIT_INPUT_ERROR

    def test_infeasible_window(self, tmp_path):
        E = standard_basis(8)
        write_family_csv(E, tmp_path / "family.csv")
        IndexedFamilyMap.identity(FgaGroup.integers(1), E.labels).write_json(tmp_path / "map.json")
        path = _write_config(
            tmp_path / "small.json", command="select", output_dir=str(tmp_path / "out"),
            inputs={"family": "family.csv", "map": "map.json", "reference": "family.csv"},
        )
        assert main(["--config", str(path)]) == EXIT_INFEASIBLE

    def test_failed_clause(self, tmp_path):
        family = duplicated_basis(4)
        write_family_csv(family, tmp_path / "family.csv")
        stored = finite_rit_select(family).to_dict()
        stored["selected"].append([0, 1])
        (tmp_path / "result.json").write_text(json.dumps(stored))
        path = _write_config(
            tmp_path / "verify.json", command="verify", output_dir=str(tmp_path / "out"),
            inputs={"family": "family.csv", "result": "result.json"},
        )
        assert main(["--config", str(path)]) == EXIT_CLAUSE_FAILED

    def test_unknown_label_in_result(self, tmp_path):
        family = duplicated_basis(4)
        write_family_csv(family, tmp_path / "family.csv")
        stored = finite_rit_select(family).to_dict()
        stored["selected"].append([9, 0])
        (tmp_path / "result.json").write_text(json.dumps(stored))
        path = _write_config(
            tmp_path / "verify.json", command="verify", output_dir=str(tmp_path / "out"),
            inputs={"family": "family.csv", "result": "result.json"},
        )
        assert main(["--config", str(path)]) == EXIT_INPUT_ERROR
