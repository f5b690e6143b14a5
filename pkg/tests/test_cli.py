import subprocess
import sys

import pytest

from helpers import example2
from pmsched import cli
from pmsched.cli import BenchRow, RunResult, bench_rows, deviation, format_rows, main
from pmsched.io import write_instance


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_solve_check_round_trip(tmp_path, capsys):
    big = tmp_path / "n10.txt"
    assert run_cli(capsys, "gen", "--n", "10", "--m", "3", "--seed", "1", "--out", str(big))[0] == 0
    sol = tmp_path / "n10.sol"
    code, out, _ = run_cli(capsys, "solve", str(big), "--method", "ldslow", "--budget", "2",
                           "--out", str(sol))
    assert code == 0 and "value:" in out
    code, out, _ = run_cli(capsys, "validate", str(big), str(sol))
    assert code == 0 and out.startswith("solution ok")
    code, out, _ = run_cli(capsys, "check", str(big))
    assert code == 0 and "too large" in out
    small = tmp_path / "n6.txt"
    run_cli(capsys, "gen", "--n", "6", "--m", "2", "--seed", "1", "--out", str(small))
    code, out, _ = run_cli(capsys, "check", str(small), "--front-rule", "--maxflow-rule")
    assert code == 0 and out.strip().endswith("2/2 match")


def test_solution_file_revalidates_byte_identically(tmp_path, capsys):
    inst_path = tmp_path / "e2.txt"
    write_instance(example2(), inst_path)
    sol = tmp_path / "e2.sol"
    assert run_cli(capsys, "solve", str(inst_path), "--out", str(sol))[0] == 0
    text = sol.read_text()
    assert run_cli(capsys, "validate", str(inst_path), str(sol))[0] == 0
    sol2 = tmp_path / "again.sol"
    run_cli(capsys, "solve", str(inst_path), "--out", str(sol2))
    assert sol2.read_text() == text
    # a tampered value is rejected
    sol.write_text(text.replace("11", "12", 1))
    code, out, _ = run_cli(capsys, "validate", str(inst_path), str(sol))
    assert code == 1


def test_check_example2_reports_match(tmp_path, capsys):
    path = tmp_path / "example2.txt"
    write_instance(example2(), path)
    code, out, _ = run_cli(capsys, "check", str(path), "-c", "sum")
    assert code == 0
    assert "sum 11/11 match" in out
    assert out.strip().endswith("1/1 match")


def test_check_uses_corpus_env(tmp_path, capsys, monkeypatch):
    write_instance(example2(False), tmp_path / "a.txt")
    monkeypatch.setenv(cli.CORPUS_ENV, str(tmp_path))
    code, out, _ = run_cli(capsys, "check", "-c", "sum")
    assert code == 0 and "9/9 match" in out


def test_check_without_target_fails(capsys, monkeypatch):
    monkeypatch.delenv(cli.CORPUS_ENV, raising=False)
    assert run_cli(capsys, "check")[0] == 2


def test_solve_csv_and_params(tmp_path, capsys):
    path = tmp_path / "e2.txt"
    write_instance(example2(), path)
    code, out, _ = run_cli(capsys, "solve", str(path), "--method", "hdcdds", "--format", "csv")
    header, row = out.strip().splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    assert fields["value"] == "11"
    assert fields["k_limit"] == "3" and fields["x"] == "1" and fields["d_bin"] == "1"


def test_gen_directory_writes_manifest(tmp_path, capsys):
    out = tmp_path / "corpus"
    assert run_cli(capsys, "gen", "--n", "5", "--m", "2", "--count", "3", "--out", str(out))[0] == 0
    lines = (out / "manifest.csv").read_text().splitlines()
    assert len(lines) == 4 and lines[0].startswith("file,n,m,seed")
    assert len(list(out.glob("*.txt"))) == 3


def test_gen_stdout_is_deterministic(capsys):
    a = run_cli(capsys, "gen", "--n", "7", "--m", "2", "--seed", "5")[1]
    b = run_cli(capsys, "gen", "--n", "7", "--m", "2", "--seed", "5")[1]
    assert a == b and a


def test_bench_csv_is_stable(tmp_path, capsys):
    run_cli(capsys, "gen", "--n", "6", "--m", "2", "--count", "3", "--out", str(tmp_path))
    (tmp_path / "broken.txt").write_text("not an instance\n")
    argv = ["bench", "--corpus", str(tmp_path), "--methods", "exact", "heuristic", "ect",
            "--format", "csv", "--omit-times"]
    code, first, err = run_cli(capsys, *argv)
    assert code == 0 and "skipping" in err
    assert run_cli(capsys, *argv)[1] == first
    assert run_cli(capsys, *argv, "--workers", "2")[1] == first
    lines = first.splitlines()
    assert lines[0] == "method,NbBest,NbBest%,AvgNodes,AvgDev%"
    assert lines[1].startswith("exact,3,100.0,")
    assert lines[-1].startswith("# skipped broken.txt")


def rr(method, value):
    return RunResult(method, value, 10, 0.1, 0.05, False)


def test_bench_rows_dominant_method():
    results = [{"a": rr("a", 5), "b": rr("b", 7)}, {"a": rr("a", 1), "b": rr("b", 2)}]
    a, b = bench_rows(results, ["a", "b"])
    assert (a.nb_best, a.pct_best, a.avg_dev) == (2, 100.0, 0.0)
    assert (b.nb_best, b.pct_best) == (0, 0.0)
    assert b.avg_dev == pytest.approx((40.0 + 100.0) / 2)


def test_bench_single_method_has_no_deviation():
    (row,) = bench_rows([{"a": rr("a", 5)}, {"a": rr("a", -3)}], ["a"])
    assert row.avg_dev == 0.0 and row.pct_best == 100.0


def test_deviation_floor():
    assert deviation(3, 0) == 300.0
    assert deviation(-2, -4) == 50.0


def test_text_format_aligns_columns():
    rows = [BenchRow("exact", 3, 4, 12.0, 0.5, 0.25, 0.0), BenchRow("ect", 2, 4, 0.0, 0.1, 0.1, 12.345)]
    text = format_rows(rows, "text")
    lines = text.splitlines()
    assert len({len(line) for line in lines}) == 1
    assert "75.0" in lines[1] and "12.3" in lines[2]


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "x.txt", "--method", "nope"])
    assert exc.value.code == 2


def test_missing_instance_and_bad_instance(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    code, _, err = run_cli(capsys, "solve", str(tmp_path / "missing.txt"))
    assert code == 1 and "error" in err
    bad.write_text("garbage")
    code, _, err = run_cli(capsys, "solve", str(bad))
    assert code == 1 and "error" in err
    code, out, _ = run_cli(capsys, "validate", str(bad))
    assert code == 1 and out.startswith("invalid instance")


def test_module_entry_point(tmp_path):
    path = tmp_path / "e2.txt"
    write_instance(example2(False), path)
    proc = subprocess.run([sys.executable, "-m", "pmsched.cli", "solve", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "value: 9" in proc.stdout
