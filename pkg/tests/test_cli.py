import json
import subprocess
import sys

from polykay.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# gen


def test_gen_k2_text(capsys):
    code, out, _ = run(capsys, "gen", "k", "2", "--format", "text")
    assert code == 0
    assert out.strip() == "(n*S[2] - S[1]^2) / (n*(n-1))"


def test_gen_pk_1_1_text(capsys):
    code, out, _ = run(capsys, "gen", "pk", "1", "1", "--format", "text")
    assert code == 0
    assert out.strip() == "(S[1]^2 - S[2]) / (n*(n-1))"


def test_gen_mk_covariance(capsys):
    code, out, _ = run(capsys, "gen", "mk", "1 1")
    assert code == 0
    assert out.strip() == "(n*S[1,1] - S[0,1]*S[1,0]) / (n*(n-1))"


def test_gen_is_deterministic(capsys):
    _, first, _ = run(capsys, "gen", "mpk", "2 1 ; 1 1")
    _, second, _ = run(capsys, "gen", "mpk", "2 1 ; 1 1")
    assert first == second


def test_gen_json_format(capsys):
    code, out, _ = run(capsys, "gen", "k", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "estimator"
    assert data["indices"] == [1]
    assert data["terms"][0]["coeff"] == {"num": [1], "den_scalar": 1, "den_falling": 1}
    assert data["terms"][0]["powersums"] == [{"index": [1], "exp": 1}]


def test_gen_latex_format(capsys):
    code, out, _ = run(capsys, "gen", "k", "2", "--format", "latex")
    assert code == 0
    assert out.strip() == r"\frac{n S_{2} - S_{1}^{2}}{n (n-1)}"


def test_gen_usage_error_exit_2(capsys):
    code, _, err = run(capsys, "gen", "k", "0")
    assert code == 2
    assert "error" in err


def test_gen_capacity_error_exit_3(capsys):
    code, _, _ = run(capsys, "gen", "k", "40")
    assert code == 3
    code, _, _ = run(capsys, "gen", "mk", "8 7")
    assert code == 3


def test_gen_limit_override(capsys):
    code, _, _ = run(capsys, "gen", "k", "33", "--univariate-limit", "34")
    assert code == 0


# ---------------------------------------------------------------------------
# eval


def test_eval_k2_on_three_points(tmp_path, capsys):
    data = tmp_path / "three.csv"
    data.write_text("1\n2\n3\n")
    code, out, _ = run(capsys, "eval", "k", "2", "--data", str(data))
    assert code == 0
    assert out.strip() == "1"


def test_eval_exact_fraction_output(tmp_path, capsys):
    data = tmp_path / "four.csv"
    data.write_text("1\n2\n3\n5\n")
    code, out, _ = run(capsys, "eval", "k", "1", "--data", str(data))
    assert code == 0
    assert out.strip() == "11/4"


def test_eval_float_mode(tmp_path, capsys):
    data = tmp_path / "three.csv"
    data.write_text("1\n2\n3\n")
    code, out, _ = run(capsys, "eval", "k", "2", "--data", str(data), "--mode", "float")
    assert code == 0
    assert abs(float(out) - 1.0) < 1e-12


def test_eval_dimension_mismatch_exit_4(tmp_path, capsys):
    data = tmp_path / "one_col.csv"
    data.write_text("1\n2\n3\n")
    code, _, _ = run(capsys, "eval", "mk", "1 1", "--data", str(data))
    assert code == 4


def test_eval_insufficient_sample_exit_5(tmp_path, capsys):
    data = tmp_path / "two.csv"
    data.write_text("1\n2\n")
    code, _, _ = run(capsys, "eval", "k", "3", "--data", str(data))
    assert code == 5


def test_eval_bad_csv_exit_2(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("1,2\n3\n")
    code, _, _ = run(capsys, "eval", "mk", "1 1", "--data", str(data))
    assert code == 2


# ---------------------------------------------------------------------------
# verify


def test_verify_single_spec(capsys):
    code, out, _ = run(capsys, "verify", "k", "5")
    assert code == 0
    assert out.strip() == "k[5]: PASS"


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "k:1..10")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 10
    assert all(line.endswith(": PASS") for line in lines)


def test_verify_json_format(capsys):
    code, out, _ = run(capsys, "verify", "k", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["all_pass"] is True
    assert data["reports"][0]["pass"] is True


def test_verify_default_suite_all_pass(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) > 70
    assert all(line.endswith(": PASS") for line in lines)


def test_verify_corrupted_fixture_exit_1(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "k", "2", "--format", "json")
    fixture = json.loads(out)
    fixture["terms"][0]["coeff"]["num"] = [
        c + 1 for c in fixture["terms"][0]["coeff"]["num"]
    ]
    path = tmp_path / "corrupt.json"
    path.write_text(json.dumps(fixture))
    code, out, _ = run(capsys, "verify", "--expr-json", str(path))
    assert code == 1
    assert "FAIL" in out
    assert "difference" in out


# ---------------------------------------------------------------------------
# bench


def test_bench_single_row_grid(capsys):
    code, out, _ = run(capsys, "bench", "--grid", "k 2")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "spec\tseconds\tterms"
    assert len(lines) == 2
    spec, seconds, terms = lines[1].split("\t")
    assert spec == "k 2"
    float(seconds)
    assert terms == "2"


def test_bench_capacity_row_noted(capsys):
    code, out, err = run(capsys, "bench", "--grid", "k 2, mk 8 7")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 3
    assert lines[2] == "mk 8 7\tcapacity\t-"
    assert "exceeds the multivariate limit" in err


def test_bench_out_file(tmp_path, capsys):
    out_path = tmp_path / "bench.tsv"
    code, out, _ = run(capsys, "bench", "--grid", "k 3", "--out", str(out_path))
    assert code == 0
    assert out == ""
    content = out_path.read_text()
    assert content.startswith("spec\tseconds\tterms\n")


def test_bench_term_count_matches_partition_count(capsys):
    code, out, _ = run(capsys, "bench", "--grid", "k 7")
    assert code == 0
    assert out.strip().split("\n")[1].split("\t")[2] == "15"


# ---------------------------------------------------------------------------
# entry point


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "polykay.cli", "gen", "k", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "S[1] / n"


def test_verify_parallel_small_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "k:1..4", "--parallel")
    assert code == 0
    assert out.strip().split("\n") == [f"k[{i}]: PASS" for i in range(1, 5)]
