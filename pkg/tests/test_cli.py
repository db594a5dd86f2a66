import csv

import numpy as np
import pytest

from coversketch import load_edge_list
from coversketch.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGenerate:
    def test_planted_with_sidecar(self, tmp_path, capsys):
        out = str(tmp_path / "inst.txt")
        code, stdout, _ = run(
            ["generate", "planted", "--k", "4", "--m", "40", "--kprime", "6",
             "--eps", "0.2", "--seed", "1", "--out", out,
             "--no-timestamp"], capsys)
        assert code == 0
        inst = load_edge_list(out)
        assert inst.n == 10 and inst.m == 40
        opt_lines = (tmp_path / "inst.txt.opt").read_text().splitlines()
        assert opt_lines[0] == "value=40 k=4"
        assert len(opt_lines) == 5
        assert '"n":10' in stdout.replace(" ", "")

    def test_adversarial(self, tmp_path, capsys):
        out = str(tmp_path / "adv.txt")
        code, _, _ = run(
            ["generate", "adversarial", "--n", "10", "--k", "2", "--beta",
             "2", "--seed", "1", "--out", out, "--no-timestamp"], capsys)
        assert code == 0
        inst = load_edge_list(out)
        assert inst.m == 30

    def test_khop(self, tmp_path, capsys):
        graph = tmp_path / "graph.txt"
        graph.write_text("0 1\n1 2\n")
        out = str(tmp_path / "dom.txt")
        code, _, _ = run(["generate", "khop", "--graph", str(graph),
                          "--hops", "1", "--out", out, "--no-timestamp"],
                         capsys)
        assert code == 0
        inst = load_edge_list(out)
        assert inst.set_elements(1).tolist() == [0, 1, 2]

    def test_feature_pairs_with_labels(self, tmp_path, capsys):
        matrix = tmp_path / "matrix.txt"
        matrix.write_text("1 0\n1 0\n1 1\n0 1\n")
        out = str(tmp_path / "fp.txt")
        code, _, _ = run(["generate", "feature-pairs", "--matrix",
                          str(matrix), "--out", out, "--no-timestamp"],
                         capsys)
        assert code == 0
        labels = (tmp_path / "fp.txt.labels").read_text().splitlines()
        assert len(labels) == load_edge_list(out).m

    def test_missing_flag_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["generate", "planted", "--k", "4"])
        assert err.value.code == 2

    def test_deterministic_without_timestamp(self, tmp_path, capsys):
        a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        args = ["generate", "planted", "--k", "2", "--m", "10", "--kprime",
                "2", "--eps", "0.0", "--seed", "5", "--no-timestamp"]
        assert run(args + ["--out", a], capsys)[0] == 0
        assert run(args + ["--out", b], capsys)[0] == 0
        assert (tmp_path / "a.txt").read_bytes() == \
            (tmp_path / "b.txt").read_bytes()

    def test_generator_error_exit_one(self, tmp_path, capsys):
        code, _, err = run(
            ["generate", "planted", "--k", "3", "--m", "10", "--kprime", "0",
             "--eps", "0.0", "--out", str(tmp_path / "x.txt")], capsys)
        assert code == 1
        assert "error" in err


class TestSketchCommand:
    def test_ratio_one_with_no_pruning(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n0 1\n1 1\n")
        code, stdout, _ = run(
            ["sketch", "--in", str(inp), "--out", str(tmp_path / "sk.txt"),
             "--rho", "1", "--sigma", "1000000"], capsys)
        assert code == 0
        assert "ratio=1.0000" in stdout

    def test_ratio_matches_output_file(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        lines = [f"{int(rng.integers(0, 20))} {v}" for v in range(300)
                 for _ in range(int(rng.integers(1, 4)))]
        inp = tmp_path / "inst.txt"
        inp.write_text("\n".join(lines) + "\n")
        inst = load_edge_list(str(inp))
        out = tmp_path / "sk.txt"
        code, stdout, _ = run(
            ["sketch", "--in", str(inp), "--out", str(out),
             "--rho", "0.3", "--sigma", "2", "--seed", "3"], capsys)
        assert code == 0
        sk = load_edge_list(str(out))
        want = sk.edge_count / inst.edge_count
        assert f"ratio={want:.4f}" in stdout

    def test_theory_k_too_large_is_error(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n1 1\n")
        code, _, err = run(
            ["sketch", "--in", str(inp), "--out", str(tmp_path / "sk.txt"),
             "--theory", "--k", "5", "--eps", "0.5"], capsys)
        assert code == 1 and "error" in err


class TestSolveCommand:
    def test_kcover_zero(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n1 1\n")
        code, stdout, _ = run(
            ["solve", "--in", str(inp), "--problem", "kcover", "--k", "0"],
            capsys)
        assert code == 0 and "value=0" in stdout

    def test_brute_force_flag_exact(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n0 1\n0 2\n1 2\n1 3\n2 3\n2 4\n")
        out = tmp_path / "sol.txt"
        code, stdout, _ = run(
            ["solve", "--in", str(inp), "--problem", "kcover", "--k", "2",
             "--solver", "brute-force", "--out", str(out)], capsys)
        assert code == 0 and "value=5" in stdout
        lines = out.read_text().splitlines()
        assert lines[0] == "value=5 k=2"
        assert lines[1:] == ["0", "2"]

    def test_infeasible_outliers_exit_one(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n0 5\n")  # elements 1..4 uncoverable
        code, _, err = run(
            ["solve", "--in", str(inp), "--problem", "setcover-outliers",
             "--lambda", "0.1"], capsys)
        assert code == 1
        assert "infeasible outlier fraction" in err


class TestSimulateCommand:
    def test_equivalence_with_sketch_plus_solve(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        lines = []
        for v in range(500):
            for s in rng.choice(12, size=int(rng.integers(1, 5)),
                                replace=False):
                lines.append(f"{int(s)} {v}")
        inp = tmp_path / "inst.txt"
        inp.write_text("\n".join(lines) + "\n")

        sim_sol = tmp_path / "sim.sol"
        sim_rep = tmp_path / "sim.rep"
        code, stdout, _ = run(
            ["simulate", "--in", str(inp), "--problem", "kcover", "--k", "3",
             "--eps", "0.5", "--seed", "9", "--machines", "4",
             "--out-solution", str(sim_sol), "--out-report", str(sim_rep)],
            capsys)
        assert code == 0 and "divergence=0" in stdout

        sk_file = tmp_path / "sk.txt"
        code, _, _ = run(
            ["sketch", "--in", str(inp), "--out", str(sk_file), "--theory",
             "--k", "3", "--eps", "0.5", "--seed", "9"], capsys)
        assert code == 0
        solve_sol = tmp_path / "solve.sol"
        code, _, _ = run(
            ["solve", "--in", str(sk_file), "--problem", "kcover", "--k",
             "3", "--out", str(solve_sol)], capsys)
        assert code == 0
        assert sim_sol.read_bytes() == solve_sol.read_bytes()

    def test_report_line_count(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n1 1\n2 2\n")
        rep = tmp_path / "r.txt"
        code, _, _ = run(
            ["simulate", "--in", str(inp), "--problem", "kcover", "--k", "1",
             "--machines", "3", "--out-report", str(rep)], capsys)
        assert code == 0
        assert len(rep.read_text().splitlines()) == 3 * 4 + 1

    def test_single_machine_rejected(self, tmp_path, capsys):
        inp = tmp_path / "inst.txt"
        inp.write_text("0 0\n")
        code, _, err = run(
            ["simulate", "--in", str(inp), "--problem", "kcover", "--k", "1",
             "--machines", "1"], capsys)
        assert code == 1 and "error" in err


class TestExperimentCommand:
    def _write_spec(self, tmp_path, **overrides):
        spec = {
            "instance": "planted",
            "planted.k": "5",
            "planted.m": "200",
            "planted.kprime": "20",
            "planted.eps": "0.2",
            "planted.seed": "3",
            "rho": "0.5",
            "sigma": "50",
            "k": "5",
            "seeds": "1,2,3",
            "solver": "stochastic",
            "out": str(tmp_path / "results.csv"),
        }
        spec.update(overrides)
        path = tmp_path / "spec.txt"
        path.write_text("".join(f"{k} {v}\n" for k, v in spec.items()))
        return path, spec["out"]

    def test_row_count_one_point_three_seeds(self, tmp_path, capsys):
        path, out = self._write_spec(tmp_path)
        code, stdout, _ = run(["experiment", "--spec", str(path)], capsys)
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4  # 3 seed rows + 1 mean row
        assert rows[-1]["seed"] == "mean"

    def test_full_sketch_quality_is_one(self, tmp_path, capsys):
        path, out = self._write_spec(tmp_path, rho="1.0", sigma="100000")
        assert run(["experiment", "--spec", str(path)], capsys)[0] == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            assert float(row["quality_ratio"]) == 1.0
            assert float(row["sketch_ratio"]) == 1.0

    def test_mean_rows_are_arithmetic_means(self, tmp_path, capsys):
        path, out = self._write_spec(tmp_path, rho="0.4,0.8")
        assert run(["experiment", "--spec", str(path)], capsys)[0] == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        groups = {}
        for row in rows:
            groups.setdefault(row["rho"], []).append(row)
        for group in groups.values():
            seeds = [r for r in group if r["seed"] != "mean"]
            mean = [r for r in group if r["seed"] == "mean"][0]
            for col in ("coverage", "quality_ratio", "sketch_edges"):
                want = sum(float(r[col]) for r in seeds) / len(seeds)
                got = float(mean[col])
                assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    def test_spec_validation(self, tmp_path, capsys):
        path, _ = self._write_spec(tmp_path, seeds="1,1")
        code, _, err = run(["experiment", "--spec", str(path)], capsys)
        assert code == 1 and "distinct" in err

    def test_columns_fixed(self, tmp_path, capsys):
        path, out = self._write_spec(tmp_path)
        assert run(["experiment", "--spec", str(path)], capsys)[0] == 0
        with open(out) as fh:
            header = fh.readline().strip().split(",")
        assert header == ["rho", "sigma", "k", "seed", "sketch_edges",
                          "sketch_ratio", "coverage", "baseline_coverage",
                          "quality_ratio"]
