import json

import pytest

from mertenslab import cli


def run(argv):
    return cli.main(argv)


BASE = ["--n-max", "20000", "--conv-cap", "5000"]


class TestCommands:
    def test_mertens_points_csv(self, tmp_path, capsys):
        out = tmp_path / "m.csv"
        status = run(["mertens", "--points", "1,10", "--format", "csv",
                      "--out", str(out)] + BASE)
        assert status == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,M"
        assert lines[1] == "1,1"
        assert lines[2] == "10,-1"

    def test_verify_single_check_passes(self, tmp_path):
        out = tmp_path / "v.json"
        status = run(["verify", "--which", "tatuzawa-iseki", "--f", "one",
                      "--points", "4", "--out", str(out)] + BASE)
        assert status == 0
        payload = json.loads(out.read_text())
        check = payload["checks"][0]
        assert check["status"] == "pass"
        assert abs(check["worst"]["residual"]) < 1e-12

    def test_empty_grid_usage_error(self, tmp_path):
        out = tmp_path / "x.csv"
        status = run(["mertens", "--points", "", "--out", str(out)] + BASE)
        assert status == 2
        assert not out.exists()

    def test_conflicting_grid_flags_rejected(self):
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args(
                ["mertens", "--points", "1,2", "--grid", "10:1.5"])

    def test_capability_exit(self):
        status = run(["remainders", "--which", "h_mean_gap",
                      "--points", "10000"] + BASE)
        assert status == 3

    def test_unknown_check_usage_error(self):
        status = run(["verify", "--which", "bogus"] + BASE)
        assert status == 2

    def test_iterate_json(self, tmp_path):
        out = tmp_path / "it.json"
        status = run(["iterate", "--lam", "0.5", "--steps", "50",
                      "--out", str(out)] + BASE)
        assert status == 0
        payload = json.loads(out.read_text())
        assert payload["limit"] == 2.0
        assert abs(payload["final_lambda_n"] - 2.0) <= 1e-12

    def test_iterate_bad_lambda(self):
        assert run(["iterate", "--lam", "1.5"] + BASE) == 2

    def test_table_rows(self, tmp_path):
        out = tmp_path / "t.csv"
        status = run(["table", "--points", "1,4,12", "--out", str(out),
                      "--n-max", "2000", "--conv-cap", "2000"])
        assert status == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n,mu,lambda,lambda2,lambda2_minus,theta"
        assert len(lines) == 4

    def test_h_profile_artifacts(self, tmp_path):
        status = run(["h-profile", "--kind", "mertens", "--out",
                      str(tmp_path)] + BASE)
        assert status == 0
        assert (tmp_path / "profile_mertens.csv").exists()
        assert (tmp_path / "zeros_mertens.csv").exists()
        constants = json.loads((tmp_path / "constants_mertens.json").read_text())
        assert "alpha_hat" in constants
        assert constants["provenance"]["zeros_are_step_boundaries"] is True

    def test_intervals_artifacts(self, tmp_path):
        status = run(["intervals", "--kind", "mertens", "--out",
                      str(tmp_path)] + BASE)
        assert status == 0
        lines = (tmp_path / "intervals_mertens.csv").read_text().splitlines()
        assert lines[0] == "a,b,integral_abs,xi,h_at_xi,deriv_bound,damped_bound"
        assert len(lines) > 1

    def test_remainders_all_kinds(self, tmp_path):
        out = tmp_path / "r.json"
        status = run(["remainders", "--out", str(out), "--grid", "100:2.0"] + BASE)
        assert status == 0
        payload = json.loads(out.read_text())
        assert sorted(payload["series"]) == sorted(
            ["selberg_sum", "lambda_theta_sum", "f_dilated_sum",
             "log_square_sum", "lambda_over_n", "f_self_bound",
             "h_mean_gap", "mertens_h_mean_gap"])


class TestDeterminism:
    def test_report_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["report", "--n-max", "5000", "--conv-cap", "2000",
                "--grid", "100:2.0"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_cache_equals_no_cache(self, tmp_path):
        cache = tmp_path / "cache"
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["verify", "--which", "dual-route", "--n-max", "30000",
                "--conv-cap", "5000"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--cache", str(cache), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert any(cache.iterdir())
        # second cached run reuses the segment files
        c = tmp_path / "c.json"
        assert run(args + ["--cache", str(cache), "--out", str(c)]) == 0
        assert b.read_bytes() == c.read_bytes()

    def test_env_cache_honored(self, tmp_path, monkeypatch):
        cache = tmp_path / "envcache"
        monkeypatch.setenv("MLAB_CACHE", str(cache))
        out = tmp_path / "o.json"
        assert run(["sieve", "--out", str(out)] + BASE) == 0
        assert cache.exists() and any(cache.iterdir())

    def test_report_contains_all_series_kinds(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(["report", "--n-max", "5000", "--conv-cap", "2000",
                    "--grid", "100:2.0", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["remainders"]) == 8
        names = [c["name"] for c in payload["checks"]]
        assert "mertens-values" in names
        assert "mertens-tail-ratio" in names
        statuses = {c["status"] for c in payload["checks"]}
        assert statuses <= {"pass", "fail", "not-applicable"}

    def test_timings_sidecar_optional(self, tmp_path):
        out = tmp_path / "o.json"
        side = tmp_path / "t.json"
        assert run(["sieve", "--out", str(out), "--timings", str(side)] + BASE) == 0
        assert side.exists()
        assert "build-prefix-sums" in json.loads(side.read_text())


def test_grid_with_count(tmp_path):
    out = tmp_path / "g.csv"
    status = run(["mertens", "--grid", "1:10:3", "--format", "csv",
                  "--out", str(out), "--n-max", "1000", "--conv-cap", "1000"])
    assert status == 0
    lines = out.read_text().strip().splitlines()
    assert lines[1:] == ["1,1", "10,-1", "100,1"]


def test_failing_check_exits_one(tmp_path):
    out = tmp_path / "v.json"
    status = run(["verify", "--which", "tatuzawa-iseki", "--f", "one",
                  "--points", "1000", "--tol-rel", "1e-30",
                  "--out", str(out)] + BASE)
    assert status == 1
    payload = json.loads(out.read_text())
    assert payload["checks"][0]["status"] == "fail"
    assert "tolerance" in payload["checks"][0]


def test_explicit_conv_cap_above_n_max_rejected():
    assert run(["mertens", "--points", "10", "--n-max", "1000",
                "--conv-cap", "2000"]) == 2
    # the untouched default clamps to a smaller n_max instead of erroring
    assert run(["mertens", "--points", "10", "--n-max", "1000"]) == 0
