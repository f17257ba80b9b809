import json

import pytest

from seqlab.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, _ = run(capsys, argv)
    assert code == 0
    return json.loads(out)


class TestDensityCommand:
    def test_f_density(self, capsys):
        payload = run_json(capsys, ["density", "--set", "squares", "--modulus", "log1p",
                                    "--n", "1000000", "--tol", "0.02"])
        assert payload["schema_version"] == "seqlab/1"
        assert payload["results"]["verdict"] == "converged"
        assert abs(payload["results"]["value"] - 0.5) <= 0.02
        assert payload["warnings"] == []

    def test_natural_density(self, capsys):
        payload = run_json(capsys, ["density", "--set", "evens", "--n", "100000"])
        assert abs(payload["results"]["value"] - 0.5) <= 1e-3

    def test_bounded_modulus_exits_one(self, capsys):
        code, out, err = run(capsys, ["density", "--set", "squares", "--modulus", "bounded",
                                      "--n", "1000"])
        assert code == 1
        assert "bounded modulus" in err

    def test_unknown_set_exits_one(self, capsys):
        code, _, err = run(capsys, ["density", "--set", "primes", "--n", "1000"])
        assert code == 1
        assert "unknown set spec" in err


class TestMembershipCommand:
    def test_half_plateau_mean_member(self, capsys):
        payload = run_json(capsys, ["membership", "--witness", "half-plateau",
                                    "--mode", "mean", "--blocks", "10"])
        assert payload["results"]["verdict"] == "member"

    def test_half_plateau_count_non_member(self, capsys):
        payload = run_json(capsys, ["membership", "--witness", "half-plateau",
                                    "--mode", "count", "--blocks", "10"])
        assert payload["results"]["verdict"] == "non-member"
        trail = payload["results"]["exceedance_ratios"]
        assert trail[-1] == pytest.approx(0.5)

    def test_constant_density_member(self, capsys):
        payload = run_json(capsys, ["membership", "--seq", "const:3", "--limit", "3",
                                    "--mode", "density", "--modulus", "id", "--n", "1000"])
        assert payload["results"]["verdict"] == "member"

    def test_block_spike_warning_attached(self, capsys):
        payload = run_json(capsys, ["membership", "--witness", "block-spike",
                                    "--mode", "mean", "--blocks", "12"])
        assert payload["results"]["verdict"] == "non-member"
        assert any("block-spike" in w for w in payload["warnings"])

    def test_estimate_limit(self, capsys):
        payload = run_json(capsys, ["membership", "--seq", "const:7", "--estimate-limit",
                                    "--mode", "mean", "--modulus", "id", "--blocks", "6"])
        assert payload["inputs"]["limit"] == 7.0
        assert payload["results"]["verdict"] == "member"

    def test_missing_limit_exits_one(self, capsys):
        code, _, err = run(capsys, ["membership", "--seq", "const:3", "--mode", "mean"])
        assert code == 1
        assert "limit" in err


class TestNormCommand:
    def test_luxemburg(self, capsys):
        payload = run_json(capsys, ["norm", "--kind", "luxemburg", "--orlicz", "poly:2",
                                    "--seq", "list:3,4"])
        assert payload["results"]["value"] == pytest.approx(5.0, abs=1e-6)

    def test_orlicz(self, capsys):
        payload = run_json(capsys, ["norm", "--kind", "orlicz", "--orlicz", "poly:2",
                                    "--seq", "list:3,4"])
        assert payload["results"]["value"] == pytest.approx(10.0, abs=1e-5)
        assert payload["results"]["attained"] == "interior"
        assert payload["results"]["iterations"] > 0

    def test_block_mean(self, capsys):
        payload = run_json(capsys, ["norm", "--kind", "block-mean", "--theta", "powers2",
                                    "--blocks", "4", "--seq", "const:1", "--n", "16"])
        assert payload["results"]["value"] == 1.0


class TestWitnessCommand:
    def test_half_plateau(self, capsys):
        payload = run_json(capsys, ["witness", "half-plateau", "--nu", "1", "--rho-value", "1",
                                    "--blocks", "10"])
        r = payload["results"]
        assert r["bound_satisfied"]
        assert r["matches_expected"]
        assert r["mean"]["verdict"] == "member"
        assert r["count"]["verdict"] == "non-member"

    def test_block_spike_discrepancy_warning(self, capsys):
        payload = run_json(capsys, ["witness", "block-spike", "--blocks", "12"])
        assert payload["results"]["residuals_at_least_one"]
        assert payload["results"]["one_spike_per_block"]
        assert payload["warnings"]

    def test_block_spike_bounded_gauge_exits_one(self, capsys):
        code, _, err = run(capsys, ["witness", "block-spike", "--blocks", "8",
                                    "--orlicz", "poly:0.5"])
        assert code == 1

    def test_extract(self, capsys):
        payload = run_json(capsys, ["witness", "extract",
                                    "--seq", "spike:set=squares,base=2,delta=1",
                                    "--modulus", "id", "--n", "100000"])
        r = payload["results"]
        assert r["limit"] == 2.0
        assert r["density"]["value"] <= 0.01
        assert r["off_check"]["passed"]

    def test_extract_failure_is_payload_not_exit(self, capsys):
        payload = run_json(capsys, ["witness", "extract", "--seq", "alt",
                                    "--modulus", "id", "--limit", "0", "--n", "10000"])
        assert payload["results"]["failure"]["stuck_level"] == 2

    def test_cauchy(self, capsys):
        payload = run_json(capsys, ["witness", "cauchy", "--seq", "harmonic:0",
                                    "--modulus", "id", "--n", "10000", "--depth", "10"])
        r = payload["results"]
        assert r["cauchy"]
        assert abs(r["limit"]) <= 0.2
        assert r["width"] <= 0.2 + 1e-12

    def test_probe(self, capsys):
        payload = run_json(capsys, ["witness", "probe",
                                    "--seq", "spike:set=squares,base=2,delta=1",
                                    "--probe-moduli", "id,log1p", "--n", "100000"])
        r = payload["results"]
        assert r["limits"]["id"] == 2.0
        assert r["limits"]["log1p"] is None
        assert not r["all_agree"]
        assert not r["norm_convergence"]


class TestCheckCommand:
    def test_modulus_pass(self, capsys):
        payload = run_json(capsys, ["check", "--modulus", "id"])
        assert payload["results"]["passed"]

    def test_orlicz_pass(self, capsys):
        payload = run_json(capsys, ["check", "--orlicz", "poly:2"])
        assert payload["results"]["passed"]

    def test_super_additive_power_rejected_at_parse(self, capsys):
        code, _, err = run(capsys, ["check", "--modulus", "pow:2"])
        assert code == 1
        assert "subadditivity" in err

    def test_needs_exactly_one(self, capsys):
        code, _, _ = run(capsys, ["check"])
        assert code == 1


class TestOutputFormats:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, ["norm", "--kind", "luxemburg", "--orlicz", "poly:2",
                                    "--seq", "list:3,4", "--format", "csv"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "field,index,value"
        assert any(line.startswith("results.value,") for line in lines)

    def test_table(self, capsys):
        code, out, _ = run(capsys, ["norm", "--kind", "luxemburg", "--orlicz", "poly:2",
                                    "--seq", "list:3,4", "--format", "table"])
        assert code == 0
        assert "results.value" in out

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, ["check", "--modulus", "id", "--out", str(target)])
        assert code == 0
        assert target.read_text() == out

    def test_csv_one_row_per_checkpoint(self, capsys):
        code, out, _ = run(capsys, ["density", "--set", "evens", "--n", "1000",
                                    "--format", "csv"])
        assert code == 0
        ratio_rows = [l for l in out.splitlines() if l.startswith("results.ratios,")]
        payload_rows = [l for l in out.splitlines() if l.startswith("results.checkpoints,")]
        assert len(ratio_rows) == len(payload_rows) >= 3


class TestDeterminism:
    INVOCATIONS = [
        ["density", "--set", "evens", "--modulus", "id", "--n", "10000"],
        ["membership", "--witness", "half-plateau", "--mode", "count", "--blocks", "10"],
        ["norm", "--kind", "luxemburg", "--orlicz", "poly:2", "--seq", "list:3,4"],
        ["witness", "half-plateau", "--nu", "1", "--blocks", "10"],
        ["check", "--modulus", "id"],
    ]

    @pytest.mark.parametrize("argv", INVOCATIONS, ids=lambda a: a[0])
    def test_byte_identical(self, capsys, argv):
        code1, out1, _ = run(capsys, argv)
        code2, out2, _ = run(capsys, argv)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_floats_at_twelve_significant_digits(self, capsys):
        payload = run_json(capsys, ["norm", "--kind", "luxemburg", "--orlicz", "poly:2",
                                    "--seq", "list:3,4"])
        v = payload["results"]["value"]
        assert v == float(f"{v:.12g}")
