import csv
import io
import json
import math
from pathlib import Path

import pytest

from cluster_radius.cli import UsageError, parse_sweep, resolve_workers, run

POTENTIALS = Path(__file__).resolve().parents[1] / "potentials"


def pot(name):
    return str(POTENTIALS / name)


def run_in(directory, monkeypatch, argv, name="out.dat"):
    """Run in ``directory`` writing to a relative --out so audit headers match."""
    directory.mkdir(parents=True, exist_ok=True)
    monkeypatch.chdir(directory)
    assert run(argv + ["--out", name]) == 0
    return (directory / name).read_bytes()


def csv_body(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        assert run(["bounds", "--bogus"]) == 2

    def test_unknown_subcommand(self):
        assert run(["plot"]) == 2

    def test_bad_sweep_is_usage(self):
        assert run(["bounds", "--potential", pot("hardsphere.json"), "--beta-sweep", "1:2"]) == 2

    def test_missing_potential_file(self, capsys):
        assert run(["bounds", "--potential", "no/such/file.json", "--beta", "1"]) == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert set(err) == {"error", "message"}

    def test_domain_error(self, capsys):
        assert run(["mayer", "--potential", pot("hardsphere.json"), "--n", "3", "--method", "exact1d"]) == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"] == "DomainError"

    def test_nonpositive_beta(self):
        assert run(["bounds", "--potential", pot("hardsphere.json"), "--beta", "0"]) in (1, 2)


class TestSweep:
    def test_linear(self):
        assert parse_sweep("1:2:3") == pytest.approx([1.0, 1.5, 2.0])

    def test_log(self):
        assert parse_sweep("0.1:10:3:log") == pytest.approx([0.1, 1.0, 10.0])

    @pytest.mark.parametrize("text", ["1:2", "1:2:0", "0:1:3", "a:b:c", "1:2:3:cubic"])
    def test_rejects(self, text):
        with pytest.raises(UsageError):
            parse_sweep(text)


class TestWorkers:
    def test_env_overrides_flag(self, monkeypatch):
        monkeypatch.setenv("CLUSTER_RADIUS_WORKERS", "3")
        assert resolve_workers(1) == 3

    def test_flag_used_without_env(self, monkeypatch):
        monkeypatch.delenv("CLUSTER_RADIUS_WORKERS", raising=False)
        assert resolve_workers(2) == 2
        assert resolve_workers(None) >= 1


class TestExamples:
    def test_bounds_morse(self, capsys):
        assert run(["bounds", "--potential", pot("morse6.json"), "--beta", "1.0", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        res = doc["result"]
        assert res["inputs"]["B"] == 38.65
        assert {"penrose_ruelle", "brydges_federbush"} <= set(res["radii"])
        assert res["radii"]["penrose_ruelle"]["log"] < res["radii"]["brydges_federbush"]["log"]
        assert doc["config"]["subcommand"] == "bounds" and "version" in doc["config"]

    def test_verify_tgi(self, capsys):
        assert run(["verify-tgi", "--n", "3", "--trials", "100", "--seed", "7"]) == 0
        res = json.loads(capsys.readouterr().out)["result"]
        assert res["passes"] == 100 and res["tolerance"] == 1e-6

    def test_mayer_hardrod(self, capsys):
        assert run(["mayer", "--potential", pot("hardrod.json"), "--n", "3", "--method", "exact1d",
                    "--format", "csv"]) == 0
        rows = csv_body(capsys.readouterr().out)
        assert rows[0][:2] == ["n", "value"]
        assert float(rows[1][1]) == pytest.approx(1.5, rel=1e-12)


class TestOutputFormat:
    def test_csv_sweep(self, capsys):
        assert run(["bounds", "--potential", pot("hardsphere.json"), "--beta-sweep", "0.1:1:4",
                    "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert "\r" not in out
        assert out.startswith("# ")
        rows = csv_body(out)
        assert rows[0][0] == "beta" and len(rows) == 5
        assert "penrose_log" in rows[0]
        assert [float(r[0]) for r in rows[1:]] == parse_sweep("0.1:1:4")
        assert all(r[rows[0].index("penrose_log")] for r in rows[1:])

    def test_audit_header_json(self, capsys):
        run(["integrals", "--potential", pot("square_well.json"), "--beta", "1", "--tol", "1e-10"])
        cfg = json.loads(capsys.readouterr().out)["config"]
        for key in ("subcommand", "potential", "betas", "seed", "tol", "format", "out", "version"):
            assert key in cfg
        assert cfg["tol"] == 1e-10

    def test_audit_header_csv(self, capsys):
        run(["bounds", "--potential", pot("hardsphere.json"), "--beta", "1", "--format", "csv", "--seed", "5"])
        head = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("# ")]
        assert "# seed=5" in head and "# subcommand=\"bounds\"" in head

    def test_nonfinite_json(self, capsys):
        run(["bounds", "--potential", pot("morse6.json"), "--beta", "1"])
        json.loads(capsys.readouterr().out)  # strict JSON, no bare Infinity

    def test_integrals_values(self, capsys):
        run(["integrals", "--potential", pot("square_well.json"), "--beta", "1"])
        res = json.loads(capsys.readouterr().out)["result"]
        text = json.dumps(res)
        assert "c_star" in text and "c_beta" in text


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["mayer", "--potential", pot("hardsphere.json"), "--n", "3", "--method", "montecarlo",
         "--trials", "200000", "--seed", "4"],
        ["verify-tgi", "--n", "4", "--trials", "12", "--seed", "3"],
        ["stability", "--potential", pot("square_well.json"), "--n", "5", "--trials", "2", "--seed", "1"],
        ["bounds", "--potential", pot("square_well.json"), "--beta-sweep", "0.1:1:3", "--format", "csv"],
    ], ids=["mayer", "verify-tgi", "stability", "bounds"])
    def test_byte_identical(self, argv, tmp_path, monkeypatch):
        monkeypatch.delenv("CLUSTER_RADIUS_WORKERS", raising=False)
        one = run_in(tmp_path / "w1", monkeypatch, argv + ["--workers", "1"])
        many = run_in(tmp_path / "w3", monkeypatch, argv + ["--workers", "3"])
        assert one == many

    def test_env_var_workers(self, tmp_path, monkeypatch):
        argv = ["mayer", "--potential", pot("hardsphere.json"), "--n", "2", "--method", "montecarlo",
                "--trials", "140000", "--seed", "9", "--workers", "1"]
        monkeypatch.delenv("CLUSTER_RADIUS_WORKERS", raising=False)
        plain = run_in(tmp_path / "a", monkeypatch, argv)
        monkeypatch.setenv("CLUSTER_RADIUS_WORKERS", "4")
        env = run_in(tmp_path / "b", monkeypatch, argv)
        assert plain == env
        doc = json.loads(plain)
        assert math.isfinite(doc["result"]["value"])
