"""CLI and scenario-engine behavior.

Oracles:
[TRIVIAL] empty batch exits 0 with an empty summary; malformed descriptors
    exit 2 naming the offending field; the catalog has >= 8 unique ids.
[DERIVED] every catalog entry runs to completion (CI smoke oracle); the
    bundled point-mass config produces a pointwise report plus a
    radial-comparison CSV (golden artifacts from the first verified run);
    byte-identical CSVs for identical config + seed, serial or parallel.
"""

import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from potlab.cli import main
from potlab.errors import ParameterError, ValidationError
from potlab.measure import AtomsMeasure, GridDensityMeasure, RadialProfileMeasure
from potlab.scenarios import (
    build_boundary,
    build_domain,
    build_measure,
    builtin_batch,
    list_builtin_scenarios,
    run_batch,
    validate_config,
    write_csv,
)

FAST_IDS = ["young-audit-p3", "wolff-dirac-p3", "rearrangement-bound-random"]


def _write_config(path: Path, config: dict) -> str:
    path.write_text(json.dumps(config), encoding="utf-8")
    return str(path)


def _minimal_solve_scenario(**overrides) -> dict:
    sc = {"id": "s0", "task": "solve",
          "young": {"family": "power", "params": {"p": 3.0}},
          "measure": {"kind": "atoms", "points": [[0.0, 0.0]],
                      "weights": [1.0]},
          "domain": {"kind": "disk", "radius": 1.0},
          "resolutions": [0.0625]}
    sc.update(overrides)
    return sc


class TestConfigValidation:
    def test_empty_batch_exits_zero_with_empty_summary(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", {"seed": 0, "scenarios": []})
        out = tmp_path / "out"
        assert main(["run", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_scenarios"] == 0
        assert summary["scenarios"] == []
        assert summary["failures"] == []

    def test_malformed_young_family_exits_two_naming_field(self, tmp_path,
                                                           capsys):
        cfg = _write_config(tmp_path / "c.json", {"scenarios": [
            _minimal_solve_scenario(young={"family": "cubic",
                                           "params": {"p": 3.0}})]})
        assert main(["validate", "--config", cfg]) == 2
        assert "scenarios[0].young.family" in capsys.readouterr().err

    def test_duplicate_ids_rejected(self, tmp_path, capsys):
        cfg = _write_config(tmp_path / "c.json", {"scenarios": [
            {"id": "a", "task": "young-audit",
             "young": {"family": "power", "params": {"p": 2.0}}},
            {"id": "a", "task": "young-audit",
             "young": {"family": "power", "params": {"p": 3.0}}}]})
        assert main(["validate", "--config", cfg]) == 2
        assert "scenarios[1].id" in capsys.readouterr().err

    def test_missing_task_requirement_names_field(self, tmp_path, capsys):
        sc = _minimal_solve_scenario(task="sola")
        cfg = _write_config(tmp_path / "c.json", {"scenarios": [sc]})
        assert main(["validate", "--config", cfg]) == 2
        assert "scenarios[0].params.widths" in capsys.readouterr().err

    def test_unknown_top_level_key_rejected(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json",
                            {"scenarios": [], "extras": 1})
        assert main(["validate", "--config", cfg]) == 2

    def test_unreadable_and_unparsable_configs_exit_two(self, tmp_path,
                                                        capsys):
        assert main(["validate", "--config",
                     str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert main(["validate", "--config", str(bad)]) == 2
        assert "<config>" in capsys.readouterr().err

    def test_bundled_configs_validate(self):
        configs = Path(__file__).resolve().parents[1] / "src/potlab/configs"
        found = sorted(configs.glob("*.json"))
        assert {p.name for p in found} >= {"dirac-p3-disk.json",
                                           "pointwise-family.json"}
        for path in found:
            validate_config(json.loads(path.read_text()))

    def test_validate_subcommand_accepts_good_config(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json",
                            {"scenarios": [_minimal_solve_scenario()]})
        assert main(["validate", "--config", cfg]) == 0

    def test_validate_rejects_nonpositive_resolution(self, tmp_path, capsys):
        sc = _minimal_solve_scenario(resolutions=[0.0625, 0.0])
        cfg = _write_config(tmp_path / "c.json", {"scenarios": [sc]})
        assert main(["validate", "--config", cfg]) == 2
        assert "resolutions[1]" in capsys.readouterr().err


class TestDescriptorBuilders:
    def test_measure_kinds(self):
        assert isinstance(build_measure({"kind": "atoms",
                                         "points": [[0.0, 0.0]],
                                         "weights": [1.0]}), AtomsMeasure)
        uni = build_measure({"kind": "uniform", "density": 2.0,
                             "support_radius": 1.0})
        assert isinstance(uni, RadialProfileMeasure)
        assert uni.total_variation() == pytest.approx(2.0 * np.pi, rel=1e-9)
        pow_ = build_measure({"kind": "radial-power", "coefficient": 3.0,
                              "exponent": -0.5, "support_radius": 1.0})
        # mass of 3 s^(-1/2) over the unit disk: 2*pi*3*(2/3) = 4*pi
        assert pow_.ball_mass((0.0, 0.0), 1.0) == pytest.approx(
            4.0 * np.pi, rel=1e-6)
        grid = build_measure({"kind": "grid",
                              "grid": {"x0": 0.0, "x1": 1.0, "y0": 0.0,
                                       "y1": 1.0, "nx": 2, "ny": 2},
                              "values": [[1.0, 1.0], [1.0, 1.0]]})
        assert isinstance(grid, GridDensityMeasure)
        assert grid.total_variation() == pytest.approx(1.0)

    def test_domain_builders(self):
        rect = build_domain({"kind": "rectangle", "x0": 0.0, "x1": 2.0,
                             "y0": 0.0, "y1": 1.0}, 0.25)
        assert rect.h == pytest.approx(0.25)
        assert np.sum(rect.areas) == pytest.approx(2.0)
        disk = build_domain({"kind": "disk", "radius": 1.0}, 0.0625)
        assert np.sum(disk.areas) == pytest.approx(np.pi, rel=0.05)

    def test_boundary_builders(self):
        pts = np.array([[0.5, 0.25], [1.0, -1.0]])
        assert build_boundary(None) is None
        assert build_boundary({"kind": "zero"}) is None
        lin = build_boundary({"kind": "linear", "coeffs": [2.0, -1.0]})
        np.testing.assert_allclose(lin(pts), [0.75, 3.0])
        quad = build_boundary({"kind": "harmonic-quadratic", "amp": 0.5})
        np.testing.assert_allclose(quad(pts), [0.5 + 0.5 * (0.25 - 0.0625),
                                               1.0])
        with pytest.raises(ValidationError):
            build_boundary({"kind": "spline"})

    def test_csv_formatting_is_fixed_width_scientific(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["a", "b", "flag"], [(1.0, 2.5e-3, True),
                                             (3, 0.0, False)])
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "a,b,flag"
        assert lines[1] == "1.000000000000e+00,2.500000000000e-03,true"
        assert lines[2] == "3.000000000000e+00,0.000000000000e+00,false"


class TestCatalog:
    def test_catalog_has_at_least_eight_unique_ids(self):
        entries = list_builtin_scenarios()
        ids = [e["id"] for e in entries]
        assert len(entries) >= 8
        assert len(set(ids)) == len(ids)
        assert all(e.get("description") for e in entries)

    def test_catalog_validates_against_schema(self):
        validate_config(builtin_batch())

    def test_unknown_catalog_id_rejected(self):
        with pytest.raises(ParameterError):
            builtin_batch(["nope"])


@pytest.fixture(scope="module")
def catalog_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("catalog")
    summary = run_batch(builtin_batch(), out, jobs=3)
    return out, summary


class TestCatalogSmoke:
    def test_every_entry_completes(self, catalog_run):
        _, summary = catalog_run
        assert summary["failures"] == []
        assert summary["n_scenarios"] == len(list_builtin_scenarios())
        assert all(e["status"] == "ok" for e in summary["scenarios"])

    def test_summary_schema_is_stable(self, catalog_run):
        _, summary = catalog_run
        assert set(summary.keys()) == {"seed", "n_scenarios", "failures",
                                       "scenarios"}
        for entry in summary["scenarios"]:
            assert {"id", "task", "status", "summary",
                    "artifacts"} <= set(entry.keys())
            assert "time" not in entry and "elapsed" not in entry

    def test_bundled_point_mass_artifacts(self, catalog_run):
        out, summary = catalog_run
        entry = {e["id"]: e for e in summary["scenarios"]}["dirac-p3-disk"]
        assert "pointwise_samples.csv" in entry["artifacts"]
        assert "radial_comparison.csv" in entry["artifacts"]
        assert entry["summary"]["fitted_constant"] > 0
        assert entry["summary"]["verdict"] in {"bounded", "growing"}
        header = (out / "dirac-p3-disk" / "radial_comparison.csv") \
            .read_text(encoding="utf-8").splitlines()[0]
        assert header == "r,computed,reference"

    def test_csv_cells_use_scientific_format(self, catalog_run):
        out, _ = catalog_run
        path = out / "wolff-dirac-p3" / "wolff_terms.csv"
        body = path.read_text(encoding="utf-8").splitlines()[1:]
        cell = re.compile(r"^-?\d\.\d{12}e[+-]\d{2,}$")
        for line in body:
            for token in line.split(","):
                assert cell.match(token), token

    def test_svg_artifacts_are_well_formed_xml(self, catalog_run):
        out, summary = catalog_run
        svgs = list(out.rglob("*.svg"))
        assert svgs, "expected at least one plot"
        for path in svgs:
            root = ET.parse(path).getroot()
            assert root.tag.endswith("svg")


class TestDeterminism:
    def test_identical_seed_gives_identical_bytes_even_parallel(self,
                                                                tmp_path):
        cfg = builtin_batch(FAST_IDS)
        a, b = tmp_path / "a", tmp_path / "b"
        run_batch(cfg, a, jobs=1)
        run_batch(cfg, b, jobs=3)
        files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel

    def test_seed_changes_random_scenario_output(self, tmp_path):
        cfg = builtin_batch(["rearrangement-bound-random"])
        a, b = tmp_path / "a", tmp_path / "b"
        run_batch(cfg, a, jobs=1)
        run_batch(cfg, b, jobs=1, seed_override=1)
        name = "rearrangement-bound-random/rearrangement_samples.csv"
        assert (a / name).read_bytes() != (b / name).read_bytes()


class TestRunCommand:
    def test_numerical_failure_exits_one_with_id(self, tmp_path, capsys):
        sc = _minimal_solve_scenario(solver={"max_iter": 1})
        cfg = _write_config(tmp_path / "c.json", {"scenarios": [sc]})
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        assert code == 1
        err = capsys.readouterr().err
        assert "s0" in err and "failed" in err
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["failures"] == ["s0"]
        assert summary["scenarios"][0]["status"] == "failed"
        assert summary["scenarios"][0]["diagnostic"]

    def test_scenario_flag_selects_catalog_subset(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--scenario", "young-audit-p3",
                     "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert [e["id"] for e in summary["scenarios"]] == ["young-audit-p3"]

    def test_env_seed_overrides_config(self, tmp_path, monkeypatch):
        monkeypatch.setenv("POTLAB_SEED", "11")
        out = tmp_path / "out"
        assert main(["run", "--scenario", "young-audit-p3",
                     "--out", str(out)]) == 0
        assert json.loads((out / "summary.json").read_text())["seed"] == 11

    def test_bad_env_seed_exits_two(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("POTLAB_SEED", "eleven")
        code = main(["run", "--scenario", "young-audit-p3",
                     "--out", str(tmp_path / "out")])
        assert code == 2
        assert "POTLAB_SEED" in capsys.readouterr().err
