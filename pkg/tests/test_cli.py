import json

import numpy as np
import pytest

from knotenergy import ClosedPolygon, regular_ngon, save_polygon_json
from knotenergy.cli import main
from knotenergy.moebius import MoebiusTransform, SphereInversion

from conftest import perturbed_ngon


@pytest.fixture
def square_file(tmp_path):
    path = tmp_path / "square.json"
    save_polygon_json(ClosedPolygon([[0, 0], [1, 0], [1, 1], [0, 1]]), path)
    return str(path)


@pytest.fixture
def ngon16_file(tmp_path):
    path = tmp_path / "ngon16.json"
    save_polygon_json(regular_ngon(16), path)
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestEnergyCommand:
    def test_kk_square(self, capsys, square_file):
        code, obj = run_json(capsys, ["energy", "--polygon", square_file,
                                      "--energy", "kk"])
        assert code == 0
        assert obj["value"] == pytest.approx(1.0, abs=1e-12)
        assert obj["energy"] == "kk"

    def test_simon_square(self, capsys, square_file):
        code, obj = run_json(capsys, ["energy", "--polygon", square_file,
                                      "--energy", "simon"])
        assert code == 0
        assert obj["value"] == pytest.approx(2.0, abs=1e-12)

    def test_ecos_ngon(self, capsys, ngon16_file):
        code, obj = run_json(capsys, ["energy", "--polygon", ngon16_file,
                                      "--energy", "ecos"])
        assert code == 0
        assert obj["value"] <= 1e-10

    def test_ecos_terms_csv(self, tmp_path, ngon16_file):
        out = tmp_path / "terms.csv"
        code = main(["energy", "--polygon", ngon16_file, "--energy", "ecos",
                     "--format", "csv", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "i,j,cross_ratio,cos_alpha,cos_alpha_tilde,contribution"
        assert len(lines) == 16 * 13 + 1

    def test_continuous_energy_circle(self, capsys):
        code, obj = run_json(capsys, ["energy", "--curve", "circle:R=1",
                                      "--energy", "continuous-E", "--panels", "128"])
        assert code == 0
        assert obj["value"] == pytest.approx(4.0, abs=3e-4)

    def test_continuous_both(self, capsys):
        code, obj = run_json(capsys, ["energy", "--curve", "ellipse:a=2,b=1",
                                      "--energy", "continuous-both", "--panels", "64"])
        assert code == 0
        assert obj["difference"] == pytest.approx(obj["E"] - obj["E_cos"])

    def test_needs_exactly_one_input(self, square_file):
        assert main(["energy", "--energy", "kk"]) == 2
        assert main(["energy", "--polygon", square_file, "--curve", "circle",
                     "--energy", "kk"]) == 2

    def test_discrete_energy_needs_polygon(self):
        assert main(["energy", "--curve", "circle:R=1", "--energy", "kk"]) == 2

    def test_missing_file_is_input_error(self, tmp_path):
        assert main(["energy", "--polygon", str(tmp_path / "nope.json"),
                     "--energy", "kk"]) == 2

    def test_bad_curve_spec(self):
        assert main(["energy", "--curve", "helix:r=1", "--energy",
                     "continuous-E"]) == 2

    def test_geometry_error_exit_code(self, tmp_path):
        bowtie = tmp_path / "bowtie.json"
        save_polygon_json(ClosedPolygon([[0, 0], [1, 1], [1, 0], [0, 1]]), bowtie)
        assert main(["energy", "--polygon", str(bowtie), "--energy", "simon"]) == 3


class TestInvarianceCommand:
    def test_passes_within_tolerance(self, ngon16_file, capsys):
        code, obj = run_json(capsys, ["invariance", "--polygon", ngon16_file,
                                      "--n", "20", "--seed", "7", "--tol", "1e-8"])
        assert code == 0
        assert obj["passed"] is True

    def test_fails_with_impossible_tolerance(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        save_polygon_json(perturbed_ngon(12, 0.05, seed=3), path)
        code, obj = run_json(capsys, ["invariance", "--polygon", str(path),
                                      "--n", "10", "--seed", "7", "--tol", "1e-30"])
        assert code == 1
        assert obj["passed"] is False

    def test_explicit_transform_file(self, tmp_path, ngon16_file, capsys):
        tfile = tmp_path / "t.json"
        MoebiusTransform([SphereInversion(np.array([3.0, 0.0, 0.0]), 1.0)]).save_json(tfile)
        code, obj = run_json(capsys, ["invariance", "--polygon", ngon16_file,
                                      "--transform-file", str(tfile)])
        assert code == 0
        assert obj["max_deviation"] <= 1e-8

    def test_pole_hit_exit_code(self, tmp_path, ngon16_file):
        tfile = tmp_path / "t.json"
        # inversion centered exactly on a vertex of the 16-gon
        MoebiusTransform([SphereInversion(np.array([1.0, 0.0, 0.0]), 1.0)]).save_json(tfile)
        assert main(["invariance", "--polygon", ngon16_file,
                     "--transform-file", str(tfile)]) == 4


class TestGammaCommand:
    def test_csv_table(self, tmp_path):
        out = tmp_path / "table.csv"
        code = main(["gamma", "--curve", "circle:R=1", "--ms", "16,32,64",
                     "--energy", "kk", "--reference", "4.0",
                     "--format", "csv", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 4
        rel = [float(line.split(",")[5]) for line in lines[1:]]
        assert rel[0] > rel[1] > rel[2]

    def test_json_with_auto_reference(self, capsys):
        code, obj = run_json(capsys, ["gamma", "--curve", "ellipse:a=2,b=1",
                                      "--ms", "16,32", "--panels", "32"])
        assert code == 0
        assert len(obj["rows"]) == 2
        assert obj["fixture"]["energy"] == "ecos"

    def test_svg_plot(self, tmp_path):
        svg = tmp_path / "plot.svg"
        code = main(["gamma", "--curve", "circle:R=1", "--ms", "16,32",
                     "--energy", "kk", "--reference", "4.0",
                     "--svg", str(svg), "--out", str(tmp_path / "t.json")])
        assert code == 0
        assert svg.read_text().startswith("<svg")

    def test_bad_ms(self):
        assert main(["gamma", "--curve", "circle:R=1", "--ms", "16,abc"]) == 2


class TestMinimizeCommand:
    def test_trace_csv_non_increasing(self, tmp_path):
        start = tmp_path / "p.json"
        save_polygon_json(perturbed_ngon(8, 0.05, seed=2), start)
        out = tmp_path / "trace.csv"
        final = tmp_path / "final.json"
        code = main(["minimize", "--polygon", str(start), "--energy", "ecos",
                     "--max-iter", "25", "--format", "csv", "--out", str(out),
                     "--final-polygon", str(final)])
        assert code == 0
        lines = out.read_text().strip().splitlines()[1:]
        energies = [float(line.split(",")[1]) for line in lines]
        assert all(b <= a for a, b in zip(energies, energies[1:]))
        assert json.loads(final.read_text())["dim"] == 3

    def test_weighted_mix(self, tmp_path, capsys):
        start = tmp_path / "p.json"
        save_polygon_json(perturbed_ngon(8, 0.05, seed=2), start)
        code, obj = run_json(capsys, ["minimize", "--polygon", str(start),
                                      "--energy", "ecos=1,kk=0.01",
                                      "--max-iter", "5"])
        assert code == 0
        assert obj["final_energy"] <= obj["initial_energy"]


class TestCurvesCommand:
    def test_lists_families(self, capsys):
        code, obj = run_json(capsys, ["curves"])
        assert code == 0
        assert {f["family"] for f in obj["families"]} == {"circle", "ellipse", "torus"}


class TestDeterminism:
    def test_byte_identical_outputs(self, tmp_path):
        start = tmp_path / "p.json"
        save_polygon_json(perturbed_ngon(10, 0.05, seed=6), start)
        files = []
        for tag in ("a", "b"):
            inv = tmp_path / f"inv_{tag}.json"
            main(["invariance", "--polygon", str(start), "--n", "10",
                  "--seed", "3", "--out", str(inv)])
            gam = tmp_path / f"gamma_{tag}.csv"
            main(["gamma", "--curve", "circle:R=1", "--ms", "16,32",
                  "--energy", "kk", "--reference", "4.0",
                  "--format", "csv", "--out", str(gam)])
            files.append((inv.read_bytes(), gam.read_bytes()))
        assert files[0] == files[1]
