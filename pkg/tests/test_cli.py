"""Command-line behavior: outputs, exit codes, diagnostics, determinism."""

import os
import subprocess
import sys

import numpy as np
import pytest

from proxysel import formats
from proxysel.cli import main
from helpers import make_stats, random_logits_table, run_cli_pipeline


@pytest.fixture
def stats_file(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=13))
    stats = make_stats(
        10.0 ** rng.normal(-0.5, 0.5, size=40), labels=rng.integers(0, 4, size=40)
    )
    path = tmp_path / "stats.csv"
    formats.write_stats(stats, path)
    return path


class TestEntropyCommand:
    def test_writes_stats_and_prints_summary(self, tmp_path, capsys):
        logits_path = tmp_path / "logits.csv"
        out_path = tmp_path / "stats.csv"
        formats.write_logits(random_logits_table(1, 4, 6), logits_path)
        assert main(["entropy", "--logits", str(logits_path), "--out", str(out_path)]) == 0
        stats = formats.read_stats(out_path)
        assert list(stats.ids) == [0, 1, 2, 3]
        out = capsys.readouterr().out
        assert "rows: 4" in out
        assert "entropy min:" in out and "entropy mean:" in out and "entropy max:" in out

    def test_empty_input_is_an_error(self, tmp_path, capsys):
        logits_path = tmp_path / "logits.csv"
        logits_path.write_text("", encoding="utf-8")
        code = main(["entropy", "--logits", str(logits_path), "--out", str(tmp_path / "o.csv")])
        assert code == 1
        assert capsys.readouterr().err.startswith("error: no rows")

    def test_malformed_row_reports_line(self, tmp_path, capsys):
        logits_path = tmp_path / "logits.csv"
        logits_path.write_text("id,label,logit_0,logit_1\n0,1,0.5,oops\n", encoding="utf-8")
        code = main(["entropy", "--logits", str(logits_path), "--out", str(tmp_path / "o.csv")])
        assert code == 1
        assert "line 2" in capsys.readouterr().err

    def test_rerun_is_byte_identical(self, tmp_path):
        logits_path = tmp_path / "logits.csv"
        formats.write_logits(random_logits_table(2, 10, 5), logits_path)
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["entropy", "--logits", str(logits_path), "--out", str(out_a)]) == 0
        assert main(["entropy", "--logits", str(logits_path), "--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()


class TestHistogramCommand:
    def test_exact_quarter_width_bins(self, stats_file, tmp_path):
        out = tmp_path / "hist.csv"
        assert main(["histogram", "--stats", str(stats_file), "--out", str(out)]) == 0
        hist = formats.read_histogram(out)
        assert hist.bin_width == 0.25
        for b in range(hist.n_bins):
            assert hist.right_edge(b) - hist.left_edge(b) == pytest.approx(0.25, abs=1e-12)
        assert sum(hist.heights) == 40

    def test_rerun_is_byte_identical(self, stats_file, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["histogram", "--stats", str(stats_file), "--out", str(a)])
        main(["histogram", "--stats", str(stats_file), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestSelectCommand:
    def test_tail_selection_mirrors_selector(self, tmp_path):
        stats = make_stats(np.linspace(0.01, 2.0, 20))
        stats_path = tmp_path / "stats.csv"
        formats.write_stats(stats, stats_path)
        out = tmp_path / "sel.txt"
        code = main(
            [
                "select", "--stats", str(stats_path), "--method", "tail",
                "--beta", "0.9", "--k", "10", "--out", str(out),
            ]
        )
        assert code == 0
        sel = formats.read_selection(out)
        assert sorted(sel.ids) == sorted(list(range(9)) + [19])
        assert sel.method.name == "tail"

    def test_probabilistic_budget_on_large_table(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(key=3))
        stats = make_stats(10.0 ** rng.normal(-0.5, 0.5, size=50_000))
        stats_path = tmp_path / "stats.csv"
        formats.write_stats(stats, stats_path)
        out = tmp_path / "sel.txt"
        code = main(
            [
                "select", "--stats", str(stats_path), "--method", "prob",
                "--weight", "w1", "--k", "5000", "--seed", "0", "--out", str(out),
            ]
        )
        assert code == 0
        sel = formats.read_selection(out)
        assert sel.k == 5000
        assert len(set(sel.ids)) == 5000

    def test_unknown_method_is_a_usage_error(self, stats_file, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(
                [
                    "select", "--stats", str(stats_file), "--method", "sorted",
                    "--k", "5", "--out", str(tmp_path / "sel.txt"),
                ]
            )
        assert exc.value.code == 2
        err = capsys.readouterr().err
        for name in ("random", "entropy-top", "entropy-bottom", "kcenter", "tail", "prob"):
            assert name in err

    def test_kcenter_without_features_is_a_usage_error(self, stats_file, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(
                [
                    "select", "--stats", str(stats_file), "--method", "kcenter",
                    "--k", "5", "--out", str(tmp_path / "sel.txt"),
                ]
            )
        assert exc.value.code == 2
        assert "--features" in capsys.readouterr().err

    def test_kcenter_with_features_file(self, stats_file, tmp_path):
        rng = np.random.Generator(np.random.Philox(key=5))
        features_path = tmp_path / "features.csv"
        formats.write_features(range(40), rng.normal(size=(40, 3)), features_path)
        out = tmp_path / "sel.txt"
        code = main(
            [
                "select", "--stats", str(stats_file), "--method", "kcenter",
                "--features", str(features_path), "--k", "6", "--seed", "2",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert formats.read_selection(out).k == 6

    def test_forgetting_needs_counts(self, stats_file, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(
                [
                    "select", "--stats", str(stats_file), "--method", "forgetting",
                    "--k", "5", "--out", str(tmp_path / "sel.txt"),
                ]
            )
        assert exc.value.code == 2
        assert "--correctness" in capsys.readouterr().err

    def test_forgetting_from_correctness_log(self, stats_file, tmp_path):
        rng = np.random.Generator(np.random.Philox(key=6))
        from proxysel import CorrectnessLog

        log = CorrectnessLog(np.arange(40), rng.integers(0, 2, size=(40, 8)))
        log_path = tmp_path / "log.csv"
        formats.write_correctness(log, log_path)
        out = tmp_path / "sel.txt"
        code = main(
            [
                "select", "--stats", str(stats_file), "--method", "forgetting",
                "--correctness", str(log_path), "--k", "5", "--out", str(out),
            ]
        )
        assert code == 0
        assert formats.read_selection(out).method.name == "forgetting"

    def test_capacity_error_surfaces_verbatim(self, stats_file, tmp_path, capsys):
        code = main(
            [
                "select", "--stats", str(stats_file), "--method", "random",
                "--k", "100", "--out", str(tmp_path / "sel.txt"),
            ]
        )
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error: ")
        assert "k = 100 exceeds" in err

    def test_class_balanced_flag(self, stats_file, tmp_path):
        out = tmp_path / "sel.txt"
        code = main(
            [
                "select", "--stats", str(stats_file), "--method", "entropy-bottom",
                "--class-balanced", "--k", "8", "--out", str(out),
            ]
        )
        assert code == 0
        sel = formats.read_selection(out)
        assert sel.method.name == "class-balanced"
        assert sel.method.param("inner") == "entropy-bottom"
        stats = formats.read_stats(stats_file)
        label_of = {int(i): int(l) for i, l in zip(stats.ids, stats.labels)}
        per_class = [sum(1 for i in sel.ids if label_of[i] == c) for c in range(4)]
        assert per_class == [2, 2, 2, 2]

    def test_seed_env_var_overrides_default(self, stats_file, tmp_path, monkeypatch):
        out_env = tmp_path / "env.txt"
        out_flag = tmp_path / "flag.txt"
        out_default = tmp_path / "default.txt"
        monkeypatch.setenv("PROXYSEL_SEED", "9")
        main(["select", "--stats", str(stats_file), "--method", "random", "--k", "5",
              "--out", str(out_env)])
        monkeypatch.delenv("PROXYSEL_SEED")
        main(["select", "--stats", str(stats_file), "--method", "random", "--k", "5",
              "--seed", "9", "--out", str(out_flag)])
        main(["select", "--stats", str(stats_file), "--method", "random", "--k", "5",
              "--out", str(out_default)])
        assert out_env.read_bytes() == out_flag.read_bytes()
        assert out_env.read_bytes() != out_default.read_bytes()

    def test_explicit_seed_beats_env_var(self, stats_file, tmp_path, monkeypatch):
        monkeypatch.setenv("PROXYSEL_SEED", "9")
        out_a = tmp_path / "a.txt"
        main(["select", "--stats", str(stats_file), "--method", "random", "--k", "5",
              "--seed", "1", "--out", str(out_a)])
        assert formats.read_selection(out_a).seed == 1


class TestSplitCommand:
    def make_selection(self, stats_file, tmp_path):
        out = tmp_path / "sel.txt"
        main(["select", "--stats", str(stats_file), "--method", "random", "--k", "10",
              "--seed", "0", "--out", str(out)])
        return out

    def test_allshuffle_halves(self, stats_file, tmp_path):
        sel_path = self.make_selection(stats_file, tmp_path)
        code = main(
            [
                "split", "--selection", str(sel_path), "--stats", str(stats_file),
                "--mode", "allshuffle", "--ratio", "0.5", "--seed", "1",
                "--out-prefix", str(tmp_path / "out"),
            ]
        )
        assert code == 0
        _, _, _, train = formats.read_split_half(tmp_path / "out.train.txt")
        _, _, _, val = formats.read_split_half(tmp_path / "out.val.txt")
        assert len(train) == 5 and len(val) == 5
        assert not set(train) & set(val)

    def test_disjoint_ignores_seed(self, stats_file, tmp_path):
        sel_path = self.make_selection(stats_file, tmp_path)
        for prefix, seed in (("d1", "1"), ("d2", "999")):
            main(
                [
                    "split", "--selection", str(sel_path), "--stats", str(stats_file),
                    "--mode", "disjoint", "--seed", seed,
                    "--out-prefix", str(tmp_path / prefix),
                ]
            )
        assert (tmp_path / "d1.train.txt").read_bytes() == (tmp_path / "d2.train.txt").read_bytes()
        assert (tmp_path / "d1.val.txt").read_bytes() == (tmp_path / "d2.val.txt").read_bytes()

    def test_missing_stats_file_is_an_error(self, stats_file, tmp_path, capsys):
        sel_path = self.make_selection(stats_file, tmp_path)
        code = main(
            [
                "split", "--selection", str(sel_path), "--stats", str(tmp_path / "missing.csv"),
                "--mode", "disjoint", "--out-prefix", str(tmp_path / "x"),
            ]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error: ")


class TestPipelineDeterminism:
    def test_identical_flags_give_identical_bytes(self, tmp_path):
        first = run_cli_pipeline(tmp_path / "run1", n=240, figures=False)
        second = run_cli_pipeline(tmp_path / "run2", n=240, figures=False)
        assert first.keys() == second.keys()
        for name in first:
            assert first[name] == second[name], name


class TestSubprocessEntry:
    def test_module_invocation(self, tmp_path):
        logits_path = tmp_path / "logits.csv"
        formats.write_logits(random_logits_table(4, 6, 4), logits_path)
        env = dict(os.environ)
        src = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
        env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
        result = subprocess.run(
            [sys.executable, "-m", "proxysel", "entropy", "--logits", str(logits_path),
             "--out", str(tmp_path / "stats.csv")],
            capture_output=True, text=True, env=env,
        )
        assert result.returncode == 0
        assert "rows: 6" in result.stdout

    def test_module_invocation_error_stream(self, tmp_path):
        env = dict(os.environ)
        src = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
        env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
        result = subprocess.run(
            [sys.executable, "-m", "proxysel", "entropy", "--logits",
             str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")],
            capture_output=True, text=True, env=env,
        )
        assert result.returncode == 1
        assert result.stderr.startswith("error: ")
