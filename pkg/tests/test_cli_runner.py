import json
import os

import pytest

from zetamom import cli_runner as cli


def run(argv):
    return cli.main(argv)


class TestParsing:
    def test_version_exits_zero(self):
        assert run(["--version"]) == 0

    def test_unknown_suite(self, capsys):
        assert run(["verify", "nonsense"]) == 2

    def test_mom_requires_parameters(self):
        assert run(["mom"]) == 2

    def test_mom_rejects_bad_box(self, tmp_path):
        out = str(tmp_path / "m.csv")
        assert run(["mom", "--T", "1e4", "--beta", "-1", "--out", out]) == 2
        assert run(["mom", "--T", "1e4", "--beta", "0.5", "--n_h", "10",
                    "--out", out]) == 2

    def test_mainterm_rejects_mismatched_shifts(self, tmp_path):
        out = str(tmp_path / "mt.json")
        assert run(["mainterm", "--order", "4", "--T", "2000",
                    "--shifts", "0,0", "--out", out]) == 2

    def test_mainterm_rejects_large_eta_for_fourth(self, tmp_path):
        out = str(tmp_path / "mt.json")
        assert run(["mainterm", "--order", "4", "--T", "2000",
                    "--shifts", "0,0,0,0", "--eta", "0.5", "--out", out]) == 2


class TestConfigFile:
    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("T = 1e4\nbeta = 0.0\ntheta = 0.5  # comment\n")
        out = str(tmp_path / "m.csv")
        assert run(["mom", "--config", str(cfg), "--theta", "0.25",
                    "--out", out]) == 0
        with open(out) as f:
            header = f.readline().strip().split(",")
            row = dict(zip(header, f.readline().strip().split(",")))
        assert float(row["theta"]) == 0.25

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just some words\n")
        assert run(["mom", "--config", str(cfg)]) == 2


class TestMomCommand:
    def test_writes_csv_and_manifest(self, tmp_path):
        out = str(tmp_path / "m.csv")
        assert run(["mom", "--T", "1e4", "--beta", "0.0", "--theta", "0.3",
                    "--out", out]) == 0
        assert os.path.exists(out)
        with open(out + ".manifest.json") as f:
            manifest = json.load(f)
        assert manifest["command"] == "mom"
        assert manifest["outputs"] == [out]
        assert "version" in manifest

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        outs = []
        for workers in ("1", "4"):
            out = str(tmp_path / f"m{workers}.csv")
            assert run(["mom", "--T", "1e4", "--beta", "0.7", "--n_t", "64",
                        "--n_h", "33", "--seed", "9", "--workers", workers,
                        "--out", out]) == 0
            outs.append(open(out, "rb").read())
        assert outs[0] == outs[1]


class TestScanCommand:
    def test_small_scan(self, tmp_path):
        out = str(tmp_path / "scan.json")
        assert run(["scan", "--betas", "0.0,0.5", "--ladder", "1e4,3e4,1e5",
                    "--n_t", "32", "--n_h", "17", "--out", out]) == 0
        rows = json.load(open(out))
        assert [r["beta"] for r in rows] == [0.0, 0.5]
        assert all("fitted_exponent" in r for r in rows)

    def test_bad_theta(self, tmp_path):
        assert run(["scan", "--theta", "-3",
                    "--out", str(tmp_path / "s.json")]) == 2


class TestMaintermCommand:
    def test_second_order_ratio(self, tmp_path):
        out = str(tmp_path / "mt.json")
        assert run(["mainterm", "--order", "2", "--T", "2000",
                    "--shifts", "0,0", "--out", out]) == 0
        rec = json.load(open(out))
        assert rec["order"] == 2
        assert 0.85 <= rec["ratio"] <= 1.15

    def test_twist_file(self, tmp_path):
        twist = tmp_path / "twist.csv"
        twist.write_text("n,re,im\n1,1,0\n2,0.5,0\n")
        out = str(tmp_path / "mt.json")
        assert run(["mainterm", "--order", "2", "--T", "2000",
                    "--shifts", "0,0", "--eta", "0.2",
                    "--twist-file", str(twist), "--out", out]) == 0
        rec = json.load(open(out))
        assert 0.85 <= rec["ratio"] <= 1.15


class TestCorrelateCommand:
    def test_curve_columns(self, tmp_path):
        out = str(tmp_path / "c.csv")
        assert run(["correlate", "--T", "1e4", "--beta", "1.0",
                    "--dhs", "0.1,1.0", "--n_t", "64", "--out", out]) == 0
        lines = open(out).read().strip().splitlines()
        assert lines[0] == "T,beta,dh,measured,predicted,ratio,n_t,seed"
        assert len(lines) == 3
        for line in lines[1:]:
            T, beta, dh, measured, predicted, ratio, n_t, seed = line.split(",")
            assert float(measured) > 0 and float(predicted) > 0
            assert float(ratio) == pytest.approx(
                float(measured) / float(predicted), rel=1e-12)

    def test_missing_T(self):
        assert run(["correlate", "--beta", "1.0"]) == 2


class TestVerifyCommand:
    def test_zeta_suite_passes(self, tmp_path, capsys):
        out = str(tmp_path / "v.json")
        assert run(["verify", "zeta", "--out", out]) == 0
        text = capsys.readouterr().out
        assert "PASS" in text and "FAIL" not in text
        assert os.path.exists(out)
