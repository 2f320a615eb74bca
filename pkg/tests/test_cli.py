import csv
import io
import json
import subprocess
import sys
import time

import pytest

from tailex.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def fixture_8421(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text("size\n8\n4\n2\n1\n")
    return p


class TestEstimate:
    def test_hill_value(self, capsys, fixture_8421):
        code, out, _ = run(capsys, "estimate", "--file", str(fixture_8421), "--column", "size",
                           "--estimators", "HILL_SHIFTED")
        assert code == 0
        rows = table(out)
        assert rows == [{"estimator": "HILL_SHIFTED", "target": "D", "n_used": "4",
                         "value": rows[0]["value"], "status": "OK"}]
        assert float(rows[0]["value"]) == pytest.approx(1.386294, abs=1e-6)

    def test_threshold_above_max(self, capsys, fixture_8421):
        code, _, err = run(capsys, "estimate", "--file", str(fixture_8421), "--threshold", "100")
        assert code == 2
        assert "NO_VALID_ROWS" in err

    def test_threshold_filters(self, capsys, fixture_8421):
        code, out, _ = run(capsys, "estimate", "--file", str(fixture_8421), "--threshold", "2",
                           "--estimators", "OLS")
        assert code == 0 and table(out)[0]["n_used"] == "3"

    def test_all_on_constant_sample(self, capsys, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("x\n3\n3\n3\n")
        code, out, err = run(capsys, "estimate", "--file", str(p), "--estimators", "all")
        assert code == 3
        rows = table(out)
        for r in rows:
            if r["target"] == "D":
                assert float(r["value"]) == 0.0 and r["status"] == "OK"
            else:
                assert r["value"] == "" and r["status"] in ("DEGENERATE_SAMPLE", "TIED_MINIMUM")
        assert "K_ML" in err and "K_OLS" in err

    def test_unknown_estimator(self, capsys, fixture_8421):
        code, _, err = run(capsys, "estimate", "--file", str(fixture_8421), "--estimators", "NOPE")
        assert code == 2

    def test_missing_file_argument(self, capsys):
        assert run(capsys, "estimate")[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "estimate", "--file", str(tmp_path / "absent.csv"))
        assert code == 2 and "IO_ERROR" in err

    def test_json_format(self, capsys, fixture_8421):
        code, out, _ = run(capsys, "estimate", "--file", str(fixture_8421), "--format", "json",
                           "--estimators", "HILL_SHIFTED,OLS")
        body = json.loads(out)
        assert body["columns"] == ["estimator", "target", "n_used", "value", "status"]
        assert [r[0] for r in body["rows"]] == ["HILL_SHIFTED", "OLS"]


class TestCorrections:
    def test_small_rows(self, capsys):
        code, out, _ = run(capsys, "corrections", "--n", "2", "3")
        rows = table(out)
        assert code == 0 and [r["n"] for r in rows] == ["2", "3"]
        assert float(rows[0]["h"]) == pytest.approx(0.6931472, abs=1e-6)
        assert float(rows[1]["f"]) == pytest.approx(0.7520387, abs=1e-6)
        assert float(rows[1]["g"]) == pytest.approx(0.74101, abs=1e-4)

    def test_range(self, capsys):
        _, out, _ = run(capsys, "corrections", "--n", "5:9")
        assert [r["n"] for r in table(out)] == ["5", "6", "7", "8", "9"]

    def test_too_small(self, capsys):
        code, _, err = run(capsys, "corrections", "--n", "1")
        assert code == 2 and "SAMPLE_TOO_SMALL" in err

    def test_million_is_fast(self, capsys):
        t0 = time.perf_counter()
        code, out, _ = run(capsys, "corrections", "--n", "1000000")
        assert code == 0 and time.perf_counter() - t0 < 1.0
        row = table(out)[0]
        assert all(abs(float(row[c]) - 1) < 1e-3 for c in "fgh")

    def test_repr_round_trip(self, capsys):
        from tailex.estimators import correction_factors

        _, out, _ = run(capsys, "corrections", "--n", "37")
        assert float(table(out)[0]["g"]) == correction_factors(37).g


class TestWeights:
    def test_d_ml_three(self, capsys):
        _, out, _ = run(capsys, "weights", "--target", "D", "--estimator", "ML", "--n", "3")
        w = [float(r["weight"]) for r in table(out)]
        assert w == [pytest.approx(0.2696, abs=1e-4), pytest.approx(0.7304, abs=1e-4)]

    def test_d_ols_uniform(self, capsys):
        _, out, _ = run(capsys, "weights", "--estimator", "OLS", "--n", "4")
        assert [float(r["weight"]) for r in table(out)] == [pytest.approx(1 / 3)] * 3

    def test_d_ml_concentration(self, capsys):
        _, out, _ = run(capsys, "weights", "--n", "10000")
        mass = sum(float(r["weight"]) for r in table(out) if int(r["i"]) > 8000)
        assert 0.85 <= mass <= 0.95

    def test_k_ml_simulated(self, capsys):
        code, out, _ = run(capsys, "weights", "--target", "K", "--n", "20", "--replications", "200", "--seed", "4")
        w = [float(r["weight"]) for r in table(out)]
        assert code == 0 and len(w) == 19 and sum(w) == pytest.approx(1.0)


class TestMonteCarlo:
    MC1_COLUMNS = "exercise,k,support,n,estimator,bias,variance,mse,replications,seed"

    def test_mc1_single_replication(self, capsys):
        code, out, _ = run(capsys, "mc1", "--replications", "1", "--n", "10")
        assert code == 0
        assert out.splitlines()[0] == self.MC1_COLUMNS
        rows = table(out)
        assert len(rows) == 2 * 4
        assert all(float(r["variance"]) == 0.0 for r in rows)

    def test_mc1_k_grid(self, capsys):
        _, out, _ = run(capsys, "mc1", "--replications", "3", "--n", "5", "--k", "0.5", "--k", "2", "--supports", "50")
        assert sorted({r["k"] for r in table(out)}) == ["0.5", "2.0"]

    def test_mc2_schema(self, capsys):
        _, out, _ = run(capsys, "mc2", "--replications", "5", "--rho", "1", "5", "--n", "10")
        assert out.splitlines()[0] == self.MC1_COLUMNS.replace("support", "rho")
        assert {r["rho"] for r in table(out)} == {"-1.0", "-5.0"}

    def test_same_seed_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path, threads in ((a, "1"), (b, "4")):
            assert main(["mc1", "--replications", "300", "--n", "3", "20", "--seed", "12",
                         "--threads", threads, "-o", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_manifest(self, tmp_path):
        out = tmp_path / "mc.csv"
        assert main(["mc2", "--replications", "10", "--rho", "2", "--n", "10", "--seed", "5", "-o", str(out)]) == 0
        m = json.loads((tmp_path / "mc.csv.manifest.json").read_text())
        assert m["command"] == "mc2"
        assert m["parameters"]["seed"] == 5 and m["parameters"]["rho"] == ["2"]
        assert m["parameters"]["redraws"] == 0
        assert {"version", "backend", "started", "finished"} <= set(m)

    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"replications": 4, "n": [5], "supports": [50], "seed": 9}))
        _, out, _ = run(capsys, "mc1", "--config", str(cfg))
        rows = table(out)
        assert {r["replications"] for r in rows} == {"4"} and {r["seed"] for r in rows} == {"9"}
        _, out, _ = run(capsys, "mc1", "--config", str(cfg), "--seed", "10")
        assert {r["seed"] for r in table(out)} == {"10"}

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        assert run(capsys, "mc1", "--config", str(cfg))[0] == 2

    def test_invalid_config_values(self, capsys):
        assert run(capsys, "mc1", "--replications", "0")[0] == 2

    def test_threads_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("TAILEX_THREADS", "3")
        out = tmp_path / "x.csv"
        main(["mc2", "--replications", "2", "--rho", "1", "--n", "10", "-o", str(out)])
        assert json.loads((tmp_path / "x.csv.manifest.json").read_text())["parameters"]["threads"] == 3


class TestScan:
    @pytest.fixture
    def pareto_file(self, tmp_path):
        import numpy as np

        x = 50.0 / np.random.default_rng(8).uniform(size=200)
        p = tmp_path / "p.csv"
        p.write_text("x\n" + "\n".join(repr(float(v)) for v in x) + "\n")
        return p

    def test_last_row_matches_estimate(self, capsys, pareto_file):
        _, scan_out, _ = run(capsys, "scan", "--file", str(pareto_file))
        _, est_out, _ = run(capsys, "estimate", "--file", str(pareto_file),
                            "--estimators", "HILL_SHIFTED,OLS,OLS_SHIFTED,OLS_GI")
        last = table(scan_out)[-1]
        assert last["m"] == "200"
        for r in table(est_out):
            assert last[r["estimator"]] == r["value"]

    def test_ecdf_companion(self, tmp_path, pareto_file):
        out = tmp_path / "scan.csv"
        assert main(["scan", "--file", str(pareto_file), "-o", str(out), "--max-tail", "50"]) == 0
        rows = table(out.read_text())
        assert rows[0]["m"] == "3" and rows[-1]["m"] == "50"
        ecdf = table((tmp_path / "scan.ecdf.csv").read_text())
        assert len(ecdf) == 200 and ecdf[-1]["p"] == "1.0"
        assert (tmp_path / "scan.csv.manifest.json").exists()

    def test_returns(self, capsys, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("date,close\n1,100\n2,110\n3,99\n")
        code, out, _ = run(capsys, "scan", "--file", str(p), "--column", "close", "--returns",
                           "--min-tail", "2", "--estimators", "HILL_SHIFTED")
        rows = table(out)
        assert code == 0 and [r["m"] for r in rows] == ["2"]

    def test_too_few_for_min_tail(self, capsys, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("close\n100\n110\n99\n")
        assert run(capsys, "scan", "--file", str(p), "--returns")[0] == 2

    def test_empty_cells_for_failures(self, capsys, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("x\n9\n5\n5\n5\n2\n")
        code, out, err = run(capsys, "scan", "--file", str(p), "--estimators", "K_WLS")
        assert code == 0
        assert [r["K_WLS"] for r in table(out)] == ["", "", table(out)[-1]["K_WLS"]]
        assert "K_WLS undefined on 2" in err


def test_module_entry_point(fixture_8421):
    res = subprocess.run([sys.executable, "-m", "tailex", "estimate", "--file", str(fixture_8421),
                          "--estimators", "OLS"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("estimator,target,n_used,value,status\nOLS,D,4,")
