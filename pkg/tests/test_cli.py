import json

import pytest

from treeopt.cli.commands import compare as compare_command
from treeopt.cli.common import ExitCode
from treeopt.cli.main import main
from treeopt.schemas.result import SolveResult, SolveStatus
from treeopt.services.instance_io import generate_random, parse_instance


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSolve:
    def test_td(self, capsys, example_file):
        code, out, _ = run(capsys, "solve", "--input", str(example_file), "--method", "td")
        lines = out.splitlines()
        assert code == ExitCode.OK
        assert lines[0] == "OPTIMAL 18"
        assert lines[1] == "1 0 0 1 1 1 1"
        assert lines[2].startswith("stats ")
        assert json.loads(lines[2][len("stats "):])["max_table_size"] == 4

    def test_brute(self, capsys, example_file):
        code, out, _ = run(capsys, "solve", "--input", str(example_file), "--method", "brute")
        assert code == ExitCode.OK
        assert out.splitlines()[:3] == ["OPTIMAL 18", "1 0 0 1 1 1 1", "enumerated 128"]

    @pytest.mark.parametrize("block", ["exhaustive", "implicit", "implicit-reuse"])
    def test_block_strategies(self, capsys, example_file, block):
        code, out, _ = run(capsys, "solve", "--input", str(example_file), "--block", block)
        assert code == ExitCode.OK
        assert out.splitlines()[0] == "OPTIMAL 18"

    def test_implicit_family(self, capsys, example_file):
        code, out, _ = run(capsys, "solve", "--input", str(example_file), "--method", "implicit-family", "--json")
        assert code == ExitCode.OK
        result = SolveResult.model_validate_json(out)
        assert result.objective == 18
        assert {b.strategy.value for b in result.stats.blocks} == {"implicit-reuse"}

    def test_infeasible(self, capsys, infeasible_file):
        code, out, _ = run(capsys, "solve", "--input", str(infeasible_file))
        assert code == ExitCode.INFEASIBLE
        assert out.splitlines()[0] == "INFEASIBLE"

    def test_malformed_input(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n 2\nm 1\nobj 1 1\ncon 3:1 <= 1\n")
        code, out, err = run(capsys, "solve", "--input", str(path))
        assert code == ExitCode.INPUT_ERROR
        assert out == ""
        assert "line 4" in err

    def test_input_not_utf8(self, capsys, tmp_path):
        path = tmp_path / "latin1.txt"
        path.write_bytes(b"n 1\nm 0\nobj 5 # \xff\xfe caf\xe9\n")
        code, out, err = run(capsys, "solve", "--input", str(path))
        assert code == ExitCode.INPUT_ERROR
        assert out == ""
        assert "line 3" in err
        assert "invalid UTF-8 byte 0xff" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "solve", "--input", str(tmp_path / "nope.txt"))
        assert code == ExitCode.INPUT_ERROR
        assert "error:" in err

    def test_trace_and_stats_files(self, capsys, example_file, tmp_path):
        trace = tmp_path / "trace.jsonl"
        stats = tmp_path / "stats.jsonl"
        code, _, _ = run(
            capsys, "solve", "--input", str(example_file),
            "--trace", str(trace), "--stats-file", str(stats),
        )
        assert code == ExitCode.OK
        records = [json.loads(line) for line in trace.read_text().splitlines()]
        assert [r["bag"] for r in records] == [1, 4, 3, 2]
        assert [e["value"] for e in records[0]["entries"]] == [4, 0]
        assert [e["value"] for e in records[2]["entries"]] == [12, 6, 12, 6]
        assert len(stats.read_text().splitlines()) == 4

    def test_trace_needs_td(self, capsys, example_file, tmp_path):
        code, _, err = run(
            capsys, "solve", "--input", str(example_file), "--method", "brute",
            "--trace", str(tmp_path / "t.jsonl"),
        )
        assert code == ExitCode.INPUT_ERROR
        assert "tree-decomposition" in err

    def test_ordering_file(self, capsys, example_file, tmp_path):
        ordering = tmp_path / "order.txt"
        ordering.write_text("1 2 3 4 5 6 7\n")
        code, out, _ = run(capsys, "solve", "--input", str(example_file), "--ordering-file", str(ordering))
        assert code == ExitCode.OK
        assert out.splitlines()[0] == "OPTIMAL 18"


class TestDecompose:
    def test_summary_and_dot(self, capsys, example_file, tmp_path):
        dot = tmp_path / "td.dot"
        graph_dot = tmp_path / "g.dot"
        code, out, _ = run(
            capsys, "decompose", "--input", str(example_file),
            "--dot", str(dot), "--graph-dot", str(graph_dot),
        )
        assert code == ExitCode.OK
        summary = json.loads(out)
        assert summary["bag_count"] == 4
        assert summary["width"] == 2
        assert summary["fill_count"] == 0
        assert dot.read_text().startswith("graph decomposition {")
        assert graph_dot.read_text().startswith("graph interaction {")

    def test_edgeless(self, capsys, tmp_path):
        path = tmp_path / "free.txt"
        path.write_text("n 3\nm 0\nobj 1 2 3\n")
        code, out, _ = run(capsys, "decompose", "--input", str(path))
        assert code == ExitCode.OK
        summary = json.loads(out)
        assert summary["bag_count"] == 3
        assert summary["width"] == 0

    def test_malformed(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n 2\nm 0\nobj 1\n")
        code, _, err = run(capsys, "decompose", "--input", str(path))
        assert code == ExitCode.INPUT_ERROR
        assert "line 3" in err

    def test_bad_ordering_file(self, capsys, example_file, tmp_path):
        ordering = tmp_path / "order.txt"
        ordering.write_text("1 2 3\n")
        code, _, err = run(capsys, "decompose", "--input", str(example_file), "--ordering-file", str(ordering))
        assert code == ExitCode.INPUT_ERROR
        assert "expected 7" in err


    def test_ordering_file_not_utf8(self, capsys, example_file, tmp_path):
        ordering = tmp_path / "order.txt"
        ordering.write_bytes(b"1 2 3\n4 5 6 7 \xe9\n")
        code, _, err = run(capsys, "decompose", "--input", str(example_file), "--ordering-file", str(ordering))
        assert code == ExitCode.INPUT_ERROR
        assert "line 2" in err


class TestGenerate:
    def test_stdout(self, capsys):
        code, out, _ = run(capsys, "gen", "--n", "10", "--m", "5", "--max-support", "3", "--coef", "1..4", "--seed", "3")
        assert code == ExitCode.OK
        instance = parse_instance(out)
        assert instance.n == 10
        assert instance.m == 5
        assert instance == generate_random(10, 5, 3, (1, 4), seed=3)

    def test_out_file_is_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for path in (a, b):
            run(capsys, "gen", "--n", "8", "--m", "4", "--max-support", "2", "--seed", "11", "--out", str(path))
        assert a.read_text() == b.read_text()

    def test_invalid_parameters(self, capsys):
        code, _, err = run(capsys, "gen", "--n", "3", "--m", "1", "--max-support", "5")
        assert code == ExitCode.INPUT_ERROR
        assert "max_support" in err

    def test_bad_coef_range(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["gen", "--n", "3", "--m", "1", "--max-support", "1", "--coef", "1-4"])
        assert exc_info.value.code == 2


class TestCompare:
    def test_seeded_batch(self, capsys):
        code, out, _ = run(capsys, "compare", "--count", "100", "--seed", "0", "--n-max", "14")
        lines = out.splitlines()
        assert code == ExitCode.OK
        assert lines[-1] == "100/100 agree"
        assert json.loads(lines[0])["source"] == "seed=0"
        assert json.loads(lines[99])["source"] == "seed=99"

    def test_example_block_ab(self, capsys, example_file):
        code, out, _ = run(capsys, "compare", "--input", str(example_file), "--block-ab")
        lines = out.splitlines()
        record = json.loads(lines[0])
        assert code == ExitCode.OK
        assert record["agree"]
        assert record["block_values_agree"]
        assert record["reuse_nodes"] <= record["implicit_nodes"]
        assert lines[-1].startswith("1/1 agree; nodes implicit=")

    def test_directory_input(self, capsys, example_file, infeasible_file):
        code, out, _ = run(capsys, "compare", "--input", str(example_file.parent))
        assert code == ExitCode.OK
        assert out.splitlines()[-1] == "2/2 agree"

    def test_directory_with_non_utf8_file(self, capsys, example_file, tmp_path):
        (tmp_path / "zz_bad.txt").write_bytes(b"\xff\n")
        code, _, err = run(capsys, "compare", "--input", str(tmp_path))
        assert code == ExitCode.INPUT_ERROR
        assert "line 1" in err

    def test_corrupted_solver_is_caught(self, capsys, monkeypatch):
        def wrong(instance, options=None):
            return SolveResult(status=SolveStatus.OPTIMAL, objective=-1, assignment=[0] * instance.n)

        monkeypatch.setattr(compare_command, "solve", wrong)
        code, out, err = run(capsys, "compare", "--count", "3", "--seed", "5", "--n-max", "6", "--workers", "1")
        assert code == ExitCode.DISAGREEMENT
        assert out.splitlines()[-1] == "0/3 agree"
        assert "disagreement on seed=5" in err

    def test_n_max_above_oracle_limit(self, capsys):
        code, _, err = run(capsys, "compare", "--n-max", "30")
        assert code == ExitCode.INPUT_ERROR
        assert "oracle limit" in err


def test_version(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["--version"])
    assert exc_info.value.code == 0
    assert "treeopt" in capsys.readouterr().out


def test_command_required():
    with pytest.raises(SystemExit) as exc_info:
        main([])
    assert exc_info.value.code == 2
