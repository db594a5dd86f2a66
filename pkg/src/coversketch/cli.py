"""Command-line workflows: generate, sketch, solve, simulate, experiment.

Exit codes: 0 on success, 1 on runtime errors or infeasibility, 2 on usage
errors.  All commands are deterministic given their flags and seed; the only
nondeterministic output is an optional timestamp header on generated files,
suppressed with ``--no-timestamp``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import distsim, instance as inst_mod, sketch as sketch_mod, solvers

__all__ = ["main", "entry", "ExperimentSpec", "parse_experiment_spec",
           "run_experiment", "EXPERIMENT_COLUMNS"]

EXPERIMENT_COLUMNS = ["rho", "sigma", "k", "seed", "sketch_edges",
                      "sketch_ratio", "coverage", "baseline_coverage",
                      "quality_ratio"]


def _write_text(path: str, text: str):
    Path(path).write_text(text)


def _header(kind: str, fields: dict, timestamp: bool) -> list[str]:
    parts = [f"{kind} " + " ".join(f"{k}={v}" for k, v in fields.items())]
    if timestamp:
        parts.append("written " + datetime.now(timezone.utc).isoformat())
    return parts


def _load_graph_adjacency(path: str) -> list[list[int]]:
    """Undirected graph from a `u v` edge list; vertex count is 1 + max id."""
    edges = []
    nv = 0
    for lineno, raw in inst_mod._iter_lines(path):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise inst_mod.ParseError(
                f"line {lineno}: expected 2 fields, got {len(tokens)}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise inst_mod.ParseError(f"line {lineno}: non-integer token") from None
        if u < 0 or v < 0:
            raise inst_mod.ParseError(f"line {lineno}: negative id")
        edges.append((u, v))
        nv = max(nv, u + 1, v + 1)
    if not edges:
        raise ValueError("empty instance")
    adjacency = [[] for _ in range(nv)]
    for u, v in edges:
        if u == v:
            continue
        adjacency[u].append(v)
        adjacency[v].append(u)
    return adjacency


def _load_matrix(path: str) -> np.ndarray:
    rows = []
    for lineno, raw in inst_mod._iter_lines(path):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([int(t) for t in line.split()])
        except ValueError:
            raise inst_mod.ParseError(f"line {lineno}: non-integer token") from None
    if not rows:
        raise ValueError("empty instance")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise inst_mod.ParseError("ragged matrix rows")
    return np.asarray(rows)


def _write_solution(path: str | None, sol: solvers.Solution):
    text = f"value={sol.coverage_value} k={len(sol.chosen)}\n"
    text += "".join(f"{s}\n" for s in sol.chosen)
    if path:
        _write_text(path, text)
    return text


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    ts = not args.no_timestamp
    if args.kind == "planted":
        inst, planted = inst_mod.generate_planted(
            args.k, args.m, args.kprime, args.eps, args.seed)
        head = _header("generated", {"kind": "planted", "k": args.k,
                                     "m": args.m, "kprime": args.kprime,
                                     "eps": args.eps, "seed": args.seed}, ts)
        inst_mod.serialize_edge_list(inst, args.out, header_lines=head)
        opt = solvers.Solution(chosen=planted, coverage_value=inst.m,
                               evaluated_on="instance")
        _write_solution(args.out + ".opt", opt)
    elif args.kind == "adversarial":
        inst = inst_mod.generate_adversarial(args.n, args.k, args.beta,
                                             args.seed)
        head = _header("generated", {"kind": "adversarial", "n": args.n,
                                     "k": args.k, "beta": args.beta,
                                     "seed": args.seed}, ts)
        inst_mod.serialize_edge_list(inst, args.out, header_lines=head)
    elif args.kind == "khop":
        adjacency = _load_graph_adjacency(args.graph)
        inst = inst_mod.khop_dominating_instance(adjacency, args.hops)
        head = _header("generated", {"kind": "khop", "hops": args.hops}, ts)
        inst_mod.serialize_edge_list(inst, args.out, header_lines=head)
    else:  # feature-pairs
        matrix = _load_matrix(args.matrix)
        inst = inst_mod.feature_pairs_instance(matrix)
        head = _header("generated", {"kind": "feature-pairs",
                                     "rows": matrix.shape[0],
                                     "cols": matrix.shape[1]}, ts)
        inst_mod.serialize_edge_list(inst, args.out, header_lines=head)
        if inst.element_labels is not None:
            _write_text(args.out + ".labels", "".join(
                f"{i} {code}\n" for i, code in enumerate(inst.element_labels)))
    st = inst_mod.stats(inst)
    print(st.to_json_line())
    return 0


def _sketch_params_from_args(args, inst) -> sketch_mod.SketchParams:
    if args.theory:
        if args.k is None:
            raise ValueError("theory mode requires --k")
        return sketch_mod.theory_params(inst.n, inst.m, inst.edge_count,
                                        k=args.k, eps=args.eps,
                                        delta_dprime=args.delta_dprime)
    if args.rho is None or args.sigma is None:
        raise ValueError("practical mode requires --rho and --sigma")
    return sketch_mod.practical_params(args.rho, args.sigma)


def _cmd_sketch(args) -> int:
    inst = inst_mod.load_edge_list(args.input)
    params = _sketch_params_from_args(args, inst)
    sk = sketch_mod.build_sketch(inst, params, sketch_mod.HashSource(args.seed))
    sketch_mod.serialize_sketch(sk, args.out)
    ratio = sk.instance.edge_count / inst.edge_count if inst.edge_count else 0.0
    print(f"ratio={ratio:.4f}")
    return 0


def _cmd_solve(args) -> int:
    inst = inst_mod.load_edge_list(args.input)
    if args.problem == "kcover":
        if args.k is None:
            raise ValueError("kcover requires --k")
        if args.solver == "greedy":
            sol = solvers.greedy_kcover(inst, args.k)
        elif args.solver == "lazy":
            sol = solvers.lazy_greedy(inst, args.k)
        elif args.solver == "stochastic":
            sol = solvers.stochastic_greedy(inst, args.k, args.eps, args.seed)
        else:
            sol = solvers.brute_force_kcover(inst, args.k)
    else:
        sol = solvers.set_cover_outliers(inst, args.lam, args.eps,
                                         args.delta_dprime, args.seed,
                                         engine=args.engine)
    _write_solution(args.out, sol)
    print(f"value={sol.coverage_value}")
    return 0


def _cmd_simulate(args) -> int:
    inst = inst_mod.load_edge_list(args.input)
    if args.problem == "kcover":
        if args.k is None:
            raise ValueError("kcover requires --k")
        sol, report = distsim.run_kcover_mapreduce(
            inst, args.k, args.eps, args.delta_dprime, args.seed,
            args.machines, solver=args.solver)
    else:
        sol, report = distsim.run_setcover_mapreduce(
            inst, args.lam, args.eps, args.delta_dprime, args.seed,
            args.machines)
    if args.out_solution:
        _write_solution(args.out_solution, sol)
    if args.out_report:
        _write_text(args.out_report, report.to_text())
    print(f"value={sol.coverage_value} rounds={report.rounds_executed} "
          f"divergence={int(report.divergence_flag)}")
    return 0


# ---------------------------------------------------------------------------
# Experiment sweeps
# ---------------------------------------------------------------------------


class ExperimentSpec:
    """Parsed sweep description: an instance, grids, seeds, and solvers."""

    def __init__(self, instance_kind, instance_args, rho_grid, sigma_grid,
                 k_grid, seeds, solver, baseline, solver_eps, out):
        self.instance_kind = instance_kind
        self.instance_args = instance_args
        self.rho_grid = rho_grid
        self.sigma_grid = sigma_grid
        self.k_grid = k_grid
        self.seeds = seeds
        self.solver = solver
        self.baseline = baseline
        self.solver_eps = solver_eps
        self.out = out
        if not rho_grid or not sigma_grid or not k_grid:
            raise ValueError("rho, sigma, and k grids must be non-empty")
        if not seeds:
            raise ValueError("at least one seed required")
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        if solver not in ("stochastic", "greedy", "lazy"):
            raise ValueError("solver must be stochastic, greedy, or lazy")
        if baseline not in ("stochastic", "lazy"):
            raise ValueError("baseline must be stochastic or lazy")


def parse_experiment_spec(path) -> ExperimentSpec:
    """Flat `key value` text; grid keys take comma-separated lists.

    Keys: `instance` (planted | adversarial | khop | file) with dotted
    parameter keys (`planted.k` etc.), grid keys `rho`, `sigma`, `k`, a
    `seeds` list, optional `solver`, `baseline`, `solver_eps`, and `out`.
    """
    kv = {}
    for lineno, raw in inst_mod._iter_lines(path):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" ")
        if not value:
            raise inst_mod.ParseError(f"line {lineno}: expected `key value`")
        kv[key.strip()] = value.strip()
    kind = kv.get("instance")
    if kind not in ("planted", "adversarial", "khop", "file"):
        raise ValueError("spec must name an instance kind "
                         "(planted, adversarial, khop, file)")
    iargs = {k.split(".", 1)[1]: v for k, v in kv.items()
             if k.startswith(kind + ".")}
    return ExperimentSpec(
        instance_kind=kind,
        instance_args=iargs,
        rho_grid=[float(x) for x in kv.get("rho", "").split(",") if x],
        sigma_grid=[int(x) for x in kv.get("sigma", "").split(",") if x],
        k_grid=[int(x) for x in kv.get("k", "").split(",") if x],
        seeds=[int(x) for x in kv.get("seeds", "").split(",") if x],
        solver=kv.get("solver", "stochastic"),
        baseline=kv.get("baseline", "stochastic"),
        solver_eps=float(kv.get("solver_eps", "0.1")),
        out=kv.get("out", "experiment.csv"),
    )


def _build_spec_instance(spec: ExperimentSpec):
    a = spec.instance_args
    if spec.instance_kind == "planted":
        inst, _ = inst_mod.generate_planted(
            int(a["k"]), int(a["m"]), int(a["kprime"]), float(a["eps"]),
            int(a.get("seed", 0)))
        return inst
    if spec.instance_kind == "adversarial":
        return inst_mod.generate_adversarial(
            int(a["n"]), int(a["k"]), float(a["beta"]), int(a.get("seed", 0)))
    if spec.instance_kind == "khop":
        return inst_mod.khop_dominating_instance(
            _load_graph_adjacency(a["graph"]), int(a.get("hops", 2)))
    return inst_mod.load_edge_list(a["path"])


def _solve_target(solver, target, k, eps, seed):
    if solver == "greedy":
        return solvers.greedy_kcover(target, k)
    if solver == "lazy":
        return solvers.lazy_greedy(target, k)
    return solvers.stochastic_greedy(target, k, eps, seed)


def run_experiment(spec: ExperimentSpec):
    """Run the (rho, sigma, k) x seeds sweep; returns rows as dicts.

    Each row solves on a practical sketch and evaluates the chosen sets on
    the full instance; the baseline solves on the full instance directly.
    One mean row (seed column "mean") follows each grid point's seed rows.
    """
    inst = _build_spec_instance(spec)
    baselines: dict[tuple[int, int], float] = {}
    rows = []
    for rho in sorted(spec.rho_grid):
        for sigma in sorted(spec.sigma_grid):
            for k in sorted(spec.k_grid):
                group = []
                for seed in spec.seeds:
                    key = (k, seed)
                    if key not in baselines:
                        base_sol = _solve_target(spec.baseline, inst, k,
                                                 spec.solver_eps, seed)
                        baselines[key] = float(base_sol.coverage_value)
                    params = sketch_mod.practical_params(rho, sigma)
                    sk = sketch_mod.build_sketch(inst, params,
                                                 sketch_mod.HashSource(seed))
                    sol = _solve_target(spec.solver, sk, min(k, sk.instance.n),
                                        spec.solver_eps, seed)
                    cov = float(solvers.coverage(inst, sol.chosen))
                    base = baselines[key]
                    quality = cov / base if base else 1.0
                    group.append({
                        "rho": rho, "sigma": sigma, "k": k, "seed": seed,
                        "sketch_edges": sk.instance.edge_count,
                        "sketch_ratio": sk.instance.edge_count / inst.edge_count,
                        "coverage": cov, "baseline_coverage": base,
                        "quality_ratio": quality,
                    })
                rows.extend(group)
                mean = {"rho": rho, "sigma": sigma, "k": k, "seed": "mean"}
                for col in EXPERIMENT_COLUMNS[4:]:
                    mean[col] = sum(r[col] for r in group) / len(group)
                rows.append(mean)
    return rows


def write_experiment_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=EXPERIMENT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({c: repr(row[c]) if isinstance(row[c], float)
                             else row[c] for c in EXPERIMENT_COLUMNS})


def _cmd_experiment(args) -> int:
    spec = parse_experiment_spec(args.spec)
    if args.out:
        spec.out = args.out
    rows = run_experiment(spec)
    write_experiment_csv(rows, spec.out)
    print(f"rows={len(rows)} out={spec.out}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coversketch",
        description="Coverage optimization via adaptive sampling sketches")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic instance")
    gensub = gen.add_subparsers(dest="kind", required=True)
    gp = gensub.add_parser("planted")
    gp.add_argument("--k", type=int, required=True)
    gp.add_argument("--m", type=int, required=True)
    gp.add_argument("--kprime", type=int, required=True)
    gp.add_argument("--eps", type=float, required=True)
    ga = gensub.add_parser("adversarial")
    ga.add_argument("--n", type=int, required=True)
    ga.add_argument("--k", type=int, required=True)
    ga.add_argument("--beta", type=float, required=True)
    gk = gensub.add_parser("khop")
    gk.add_argument("--graph", required=True)
    gk.add_argument("--hops", type=int, required=True)
    gf = gensub.add_parser("feature-pairs")
    gf.add_argument("--matrix", required=True)
    for p in (gp, ga, gk, gf):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
        p.add_argument("--no-timestamp", action="store_true")
        p.set_defaults(func=_cmd_generate)

    sk = sub.add_parser("sketch", help="build a sketch of an instance file")
    sk.add_argument("--in", dest="input", required=True)
    sk.add_argument("--out", required=True)
    sk.add_argument("--rho", type=float)
    sk.add_argument("--sigma", type=int)
    sk.add_argument("--theory", action="store_true")
    sk.add_argument("--k", type=int)
    sk.add_argument("--eps", type=float, default=0.5)
    sk.add_argument("--delta-dprime", type=float, default=0.5)
    sk.add_argument("--seed", type=int, default=0)
    sk.set_defaults(func=_cmd_sketch)

    so = sub.add_parser("solve", help="solve k-cover or set cover with outliers")
    so.add_argument("--in", dest="input", required=True)
    so.add_argument("--problem", choices=["kcover", "setcover-outliers"],
                    required=True)
    so.add_argument("--solver",
                    choices=["greedy", "lazy", "stochastic", "brute-force"],
                    default="greedy")
    so.add_argument("--k", type=int)
    so.add_argument("--eps", type=float, default=0.5)
    so.add_argument("--lambda", dest="lam", type=float, default=0.01)
    so.add_argument("--delta-dprime", type=float, default=0.5)
    so.add_argument("--engine", choices=["direct", "sketch"], default="direct")
    so.add_argument("--seed", type=int, default=0)
    so.add_argument("--out")
    so.set_defaults(func=_cmd_solve)

    si = sub.add_parser("simulate", help="run the four-round MapReduce pipeline")
    si.add_argument("--in", dest="input", required=True)
    si.add_argument("--problem", choices=["kcover", "setcover-outliers"],
                    required=True)
    si.add_argument("--machines", type=int, required=True)
    si.add_argument("--solver", choices=["greedy", "stochastic"],
                    default="greedy")
    si.add_argument("--k", type=int)
    si.add_argument("--eps", type=float, default=0.5)
    si.add_argument("--lambda", dest="lam", type=float, default=0.01)
    si.add_argument("--delta-dprime", type=float, default=0.5)
    si.add_argument("--seed", type=int, default=0)
    si.add_argument("--out-solution")
    si.add_argument("--out-report")
    si.set_defaults(func=_cmd_simulate)

    ex = sub.add_parser("experiment", help="run a sweep described by a spec file")
    ex.add_argument("--spec", required=True)
    ex.add_argument("--out")
    ex.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
