import csv
import json

import numpy as np
import pytest

from willmore.cli import (CONVERGENCE_HEADER, ENERGY_HEADER, QUALITY_HEADER, SNAPSHOT_HEADER,
                          RunConfig, UsageError, main, parse_config)
from willmore.curves import PRESETS, UnknownCurveError, curve_catalog, load_points
from willmore.grid import segment_lengths


def header(path):
    with open(path) as fh:
        return next(csv.reader(fh))


def run_cli(tmp_path, *args):
    return main([*args, "--out-dir", str(tmp_path)])


class TestCatalog:
    def test_circle(self):
        s = curve_catalog("circle", 100)
        assert s.M == 100
        assert np.allclose(np.hypot(*s.X.T), 1.0)
        assert np.allclose(np.abs(s.kappa), 1 / np.cos(np.pi / 100) ** 2)

    def test_ellipse4_nodes(self):
        s = curve_catalog("ellipse4", 8)
        assert np.allclose(s.X[0], [4, 0]) and np.allclose(s.X[2], [0, 1])

    def test_unknown(self):
        with pytest.raises(UnknownCurveError, match="presets"):
            curve_catalog("trefoil", 10)

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_valid(self, name):
        s = curve_catalog(name, 100)
        ds, _ = segment_lengths(s.X)
        assert s.M == 100 and ds.min() > 0
        assert np.all(np.isfinite(s.kappa)) and np.all(np.isfinite(s.V))

    def test_point_file(self, tmp_path):
        p = tmp_path / "pts.csv"
        th = 2 * np.pi * np.arange(12) / 12
        p.write_text("\n".join(f"{np.cos(a):.17g},{np.sin(a):.17g}" for a in th))
        assert load_points(p).shape == (12, 2)
        assert curve_catalog(str(p)).M == 12

    def test_point_file_bad_columns(self, tmp_path):
        p = tmp_path / "pts.txt"
        p.write_text("1 2 3\n4 5 6\n7 8 9\n1 1 1\n")
        with pytest.raises(ValueError):
            load_points(p)


class TestConfig:
    def test_defaults(self):
        rc = RunConfig()
        assert (rc.tol, rc.J, rc.beta, rc.r, rc.max_picard) == (1e-8, 0.5, 0.3, 5.0, 100)

    @pytest.mark.parametrize("kw", [{"mode": "plot"}, {"method": "war"}, {"k": 5}, {"dt": 0.0},
                                    {"levels": 2}, {"C": 0.5}, {"J": 0.0}, {"monitor": "cubic"}])
    def test_invalid(self, kw):
        with pytest.raises(UsageError):
            RunConfig(**kw)

    def test_unknown_key(self):
        with pytest.raises(UsageError):
            RunConfig.from_dict({"dtt": 1})

    def test_flags_override_file(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"k": 2, "dt": 0.5, "curve": "bump"}))
        rc, _ = parse_config(["--config", str(p), "--dt", "0.25"])
        assert (rc.k, rc.dt, rc.curve) == (2, 0.25, "bump")

    def test_dump_config_round_trip(self, tmp_path, capsys):
        assert main(["--curve", "flower32", "--k", "3", "--ec", "--startup-substeps", "auto",
                     "--dump-config"]) == 0
        text = capsys.readouterr().out
        p = tmp_path / "cfg.json"
        p.write_text(text)
        rc, _ = parse_config(["--config", str(p)])
        assert rc == RunConfig.from_dict(json.loads(text))
        assert rc.to_json() == text.strip()


class TestRun:
    def test_evolve_outputs(self, tmp_path):
        assert run_cli(tmp_path, "--curve", "ellipse4", "--M", "32", "--T", "0.05",
                       "--snapshot-every", "2") == 0
        assert header(tmp_path / "snapshots.csv") == SNAPSHOT_HEADER
        assert header(tmp_path / "energy.csv") == ENERGY_HEADER
        assert header(tmp_path / "quality.csv") == QUALITY_HEADER
        rows = list(csv.reader(open(tmp_path / "snapshots.csv")))[1:]
        assert sorted({float(r[0]) for r in rows}) == pytest.approx([0, 0.02, 0.04, 0.05])

    def test_energy_mode_defaults_to_circle(self, tmp_path):
        assert run_cli(tmp_path, "--mode", "energy", "--T", "0.05", "--M", "32") == 0
        rows = list(csv.DictReader(open(tmp_path / "energy.csv")))
        R = [float(r["R"]) for r in rows]
        assert all(b <= a for a, b in zip(R, R[1:]))
        assert not (tmp_path / "snapshots.csv").exists()

    def test_quality_mode(self, tmp_path):
        assert run_cli(tmp_path, "--mode", "quality", "--curve", "flower32", "--method", "abdfk",
                       "--T", "0.05") == 0
        rows = list(csv.DictReader(open(tmp_path / "quality.csv")))
        assert float(rows[-1]["R2"]) < float(rows[0]["R2"])

    def test_converge_mode(self, tmp_path):
        assert run_cli(tmp_path, "--mode", "converge", "--method", "awar", "--k", "2",
                       "--levels", "3", "--T", "0.5") == 0
        rows = list(csv.DictReader(open(tmp_path / "convergence.csv")))
        assert list(rows[0]) == CONVERGENCE_HEADER
        assert float(rows[-1]["order"]) == pytest.approx(2.0, abs=0.3)

    def test_missing_curve(self, tmp_path, capsys):
        assert run_cli(tmp_path) == 2
        assert "--curve" in capsys.readouterr().err

    def test_unknown_curve(self, tmp_path):
        assert run_cli(tmp_path, "--curve", "trefoil") == 2

    def test_bad_flag_value(self, tmp_path):
        assert run_cli(tmp_path, "--curve", "circle", "--dt", "-1") == 2
        assert run_cli(tmp_path, "--method", "nope") == 2

    def test_runtime_failure_writes_snapshot(self, tmp_path, capsys):
        assert run_cli(tmp_path, "--curve", "wiggle", "--T", "0.02", "--mode", "quality") == 1
        assert "aborted" in capsys.readouterr().err
        assert (tmp_path / "snapshots.csv").exists()

    def test_env_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WILLMORE_OUT_DIR", str(tmp_path))
        assert main(["--curve", "circle", "--M", "16", "--T", "0.02"]) == 0
        assert (tmp_path / "energy.csv").exists()

    def test_deterministic(self, tmp_path):
        args = ["--curve", "bump", "--M", "40", "--T", "0.05", "--method", "awar", "--ec",
                "--snapshot-every", "1"]
        assert main([*args, "--out-dir", str(tmp_path / "a")]) == 0
        assert main([*args, "--out-dir", str(tmp_path / "b")]) == 0
        for name in ("snapshots.csv", "energy.csv", "quality.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_full_precision_floats(self, tmp_path):
        run_cli(tmp_path, "--curve", "circle", "--M", "16", "--T", "0.01", "--snapshot-every", "1")
        rows = list(csv.DictReader(open(tmp_path / "snapshots.csv")))
        x = float(rows[1]["x"])
        assert x == np.cos(2 * np.pi / 16)
