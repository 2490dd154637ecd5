"""Command line front-end.

Subcommands: simulate, simulate-tree, empvario, fit-graph, fit-rcon,
fit-rvar, ci-test, loglik, color-edges, sweep.  Machine-readable outputs
(CSV/JSON/TSV) go to ``--out``; a short human-readable summary goes to
standard output.  Exit codes: 0 on success, 2 on usage errors (unknown
flags, malformed files, dimension mismatches), 1 on numerical failures,
which also emit a diagnostic JSON object on standard output.

Vertices, anchors and color classes are 1-based on the command line and in
files; the library uses 0-based indices throughout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .ci import ci_statistic
from .errors import DataError, GraphError, HrgmError, ParameterError
from .graphs import ColoredGraph, RootedTree
from .likelihood import dual_loglik, loglik
from .pipeline import (
    ExceedanceSample,
    color_by_stats,
    empirical_precision,
    empirical_variogram,
    sweep_colorings,
    threshold_exceedances,
    to_exponential_margins,
)
from .rcon import edge_values, fit_rcon
from .rvar import fit_graphical_mle, fit_rvar
from .simulate import IncrementSpec, sample_colored_tree, sample_extremal_function


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip() != ""])
    except ValueError:
        raise ValueError(f"could not parse {text!r} as a comma-separated vector") from None


def _check_dims(gamma: np.ndarray, graph: ColoredGraph, gamma_name: str, graph_name: str):
    if gamma.shape[0] != graph.d:
        raise ValueError(
            f"dimension mismatch: {gamma_name} has d={gamma.shape[0]} "
            f"but {graph_name} has d={graph.d}"
        )


def _load_exceedances(args) -> ExceedanceSample:
    sample = io.read_data(args.data)
    if args.exceedances:
        return sample
    if sample.anchors is not None:
        raise ValueError(
            f"data file {args.data} carries anchor labels; pass --exceedances"
        )
    margins = to_exponential_margins(sample.y)
    out = threshold_exceedances(margins, args.p)
    out.names = sample.names
    return out


def cmd_simulate(args) -> int:
    gamma = io.read_matrix(args.gamma)
    d = gamma.shape[0]
    if args.k == "all":
        blocks = [
            sample_extremal_function(gamma, k, args.n, seed=(args.seed, k))
            for k in range(d)
        ]
        data = np.vstack(blocks)
        anchors = np.repeat(np.arange(d), args.n)
        io.write_data(args.out, data, anchors=anchors)
        print(f"wrote {data.shape[0]} rows ({args.n} per anchor, d={d}) to {args.out}")
        return 0
    k = int(args.k)
    if not 1 <= k <= d:
        raise ValueError(f"anchor --k must be in 1..{d} or 'all', got {args.k}")
    data = sample_extremal_function(gamma, k - 1, args.n, seed=args.seed)
    io.write_data(args.out, data)
    print(f"wrote {args.n} rows conditioned on coordinate {k} to {args.out}")
    return 0


def cmd_simulate_tree(args) -> int:
    graph = io.load_graph(args.graph)
    try:
        spec_doc = json.loads(Path(args.spec).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed spec JSON {args.spec}: {exc}") from None
    spec = {}
    for key, entry in spec_doc.items():
        spec[int(key) - 1] = IncrementSpec(
            dist=entry.get("dist", "gaussian"), variance=float(entry["variance"])
        )
    tree = RootedTree.from_edges(graph.d, graph.edges, args.root - 1)
    w = sample_colored_tree(tree, graph, spec, args.n, seed=args.seed)
    if args.pareto:
        from .simulate import rng_from_seed

        w = w + rng_from_seed((args.seed, "exp")).exponential(size=args.n)[:, None]
    io.write_data(args.out, w)
    kind = "conditioned Pareto" if args.pareto else "extremal function"
    print(f"wrote {args.n} {kind} rows for the tree rooted at {args.root} to {args.out}")
    return 0


def cmd_empvario(args) -> int:
    sample = _load_exceedances(args)
    gamma_bar = empirical_variogram(sample)
    io.write_matrix(args.out, gamma_bar)
    print(f"empirical variogram of {sample.n} exceedance rows written to {args.out}")
    return 0


def _write_fit_outputs(prefix: str, report) -> None:
    io.write_report(f"{prefix}.json", report)
    if report.gamma is not None:
        io.write_matrix(f"{prefix}_gamma.csv", report.gamma)
    if report.q is not None:
        io.write_matrix(f"{prefix}_q.csv", report.q)


def _finish_fit(args, report, label: str) -> int:
    _write_fit_outputs(args.out, report)
    status = "converged" if report.converged else f"FAILED ({report.message})"
    print(
        f"{label}: {status} after {report.iterations} iterations, "
        f"score norm {report.final_score_norm:.3e}, loglik {report.loglik:.6f}"
    )
    print(f"estimate: {np.array2string(np.asarray(report.estimate), precision=8)}")
    if not report.converged:
        print(json.dumps(report.to_dict()))
        return 1
    return 0


def cmd_fit_graph(args) -> int:
    gamma_bar = io.read_matrix(args.gamma)
    graph = io.load_graph(args.graph)
    _check_dims(gamma_bar, graph, args.gamma, args.graph)
    _, _, report = fit_graphical_mle(
        gamma_bar, graph, score_tol=args.tol, max_iter=args.max_iter
    )
    return _finish_fit(args, report, "graphical fit")


def cmd_fit_rcon(args) -> int:
    gamma_bar = io.read_matrix(args.gamma)
    coloring = io.load_graph(args.graph)
    _check_dims(gamma_bar, coloring, args.gamma, args.graph)
    omega0 = _parse_vector(args.omega0) if args.omega0 else None
    report = fit_rcon(
        gamma_bar, coloring, omega0=omega0, score_tol=args.tol, max_iter=args.max_iter
    )
    return _finish_fit(args, report, f"rcon fit ({coloring.r} classes)")


def cmd_fit_rvar(args) -> int:
    gamma_bar = io.read_matrix(args.gamma)
    coloring = io.load_graph(args.graph)
    _check_dims(gamma_bar, coloring, args.gamma, args.graph)
    nu0 = _parse_vector(args.nu0) if args.nu0 else None
    report = fit_rvar(
        gamma_bar, coloring, coloring, nu0=nu0, score_tol=args.tol, max_iter=args.max_iter
    )
    return _finish_fit(args, report, f"rvar fit ({coloring.r} classes)")


def cmd_ci_test(args) -> int:
    gamma = io.read_matrix(args.gamma)
    cond = [int(c) - 1 for c in args.cond.split(",") if c.strip() != ""]
    stat = ci_statistic(gamma, args.i - 1, args.j - 1, cond)
    verdict = stat < args.tol
    print(f"independent: {'true' if verdict else 'false'}")
    print(f"statistic: {stat:.6e} (tolerance {args.tol:g})")
    if args.out:
        io.write_json(
            args.out,
            {
                "i": args.i,
                "j": args.j,
                "cond": [c + 1 for c in cond],
                "statistic": stat,
                "tol": args.tol,
                "independent": bool(verdict),
            },
        )
    return 0


def cmd_loglik(args) -> int:
    gamma = io.read_matrix(args.gamma)
    q = io.read_matrix(args.q)
    if gamma.shape != q.shape:
        raise ValueError(
            f"dimension mismatch: {args.gamma} has shape {gamma.shape} "
            f"but {args.q} has shape {q.shape}"
        )
    if args.dual:
        value = dual_loglik(gamma, q)
        label = "dual loglik"
    else:
        value = loglik(q, gamma)
        label = "loglik"
    print(f"{label}: {value:.10g}")
    if args.out:
        io.write_json(args.out, {label.replace(" ", "_"): value})
    return 0


def cmd_color_edges(args) -> int:
    gamma_bar = io.read_matrix(args.gamma)
    graph = io.load_graph(args.graph)
    _check_dims(gamma_bar, graph, args.gamma, args.graph)
    if args.model == "rcon":
        stats = edge_values(empirical_precision(gamma_bar), graph)
    else:
        stats = edge_values(gamma_bar, graph)
    colored = color_by_stats(graph, stats, args.k, seed=args.seed)
    io.save_graph(args.out, colored)
    print(f"colored {colored.n_edges} edges into {colored.r} classes -> {args.out}")
    return 0


def cmd_sweep(args) -> int:
    sample = _load_exceedances(args)
    graph = io.load_graph(args.graph) if args.graph else None
    if graph is not None and graph.d != sample.d:
        raise ValueError(
            f"dimension mismatch: data {args.data} has d={sample.d} "
            f"but graph {args.graph} has d={graph.d}"
        )
    result = sweep_colorings(
        sample,
        graph,
        kmax=args.kmax,
        model=args.model,
        train_frac=args.train_frac,
        seed=args.seed,
        score_tol=args.tol,
        max_iter=args.max_iter,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_matrix(out / "gamma_train.csv", result.gamma_train)
    io.write_matrix(out / "gamma_val.csv", result.gamma_val)
    io.save_graph(out / "graph.json", result.graph)
    lines = ["k\tn_params\tconverged\ttrain_loglik\tval_loglik\tval_loglik_total\tparams"]
    for row in result.rows:
        io.write_report(out / f"fit_k{row.k}.json", row.report)
        params = ",".join(f"{x:.10g}" for x in np.asarray(row.report.estimate).ravel())
        lines.append(
            f"{row.k}\t{len(row.report.estimate)}\t{row.report.converged}"
            f"\t{row.train_loglik:.10g}\t{row.val_loglik:.10g}"
            f"\t{row.val_loglik_total:.10g}\t{params}"
        )
    (out / "summary.tsv").write_text("\n".join(lines) + "\n")
    curve = ["k,val_loglik"] + [
        f"{row.k},{row.val_loglik:.10g}" for row in result.rows
    ]
    (out / "val_curve.csv").write_text("\n".join(curve) + "\n")
    best = result.best_k()
    print(f"sweep over k=1..{len(result.rows)} ({args.model}); best k by validation: {best}")
    print(f"summary written to {out / 'summary.tsv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrgm",
        description="Colored Husler-Reiss extremal graphical models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_fit_flags(p):
        p.add_argument("--tol", type=float, default=1e-6, help="score norm threshold")
        p.add_argument("--max-iter", type=int, default=200)
        p.add_argument("--out", required=True, help="output prefix (JSON + CSV files)")

    p = sub.add_parser("simulate", help="draw conditioned Pareto samples")
    p.add_argument("--gamma", required=True, help="variogram CSV")
    p.add_argument("--k", default="all", help="1-based anchor index or 'all'")
    p.add_argument("--n", type=int, required=True, help="rows per anchor")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("simulate-tree", help="draw colored tree extremal functions")
    p.add_argument("--graph", required=True, help="tree + coloring JSON")
    p.add_argument("--spec", required=True, help="increment spec JSON per color class")
    p.add_argument("--root", type=int, default=1, help="1-based root vertex")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pareto", action="store_true", help="add the exponential component")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate_tree)

    p = sub.add_parser("empvario", help="empirical variogram of exceedances")
    p.add_argument("--data", required=True, help="data CSV with header row")
    p.add_argument("--p", type=float, default=0.85, help="threshold probability")
    p.add_argument(
        "--exceedances",
        action="store_true",
        help="data is already on the shifted exponential scale",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_empvario)

    p = sub.add_parser("fit-graph", help="graphical MLE / variogram completion")
    p.add_argument("--gamma", required=True)
    p.add_argument("--graph", required=True)
    add_fit_flags(p)
    p.set_defaults(func=cmd_fit_graph, tol=5e-9)

    p = sub.add_parser("fit-rcon", help="colored concentration fit")
    p.add_argument("--gamma", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--omega0", help="comma-separated start value")
    add_fit_flags(p)
    p.set_defaults(func=cmd_fit_rcon)

    p = sub.add_parser("fit-rvar", help="colored variogram fit (mixed dual)")
    p.add_argument("--gamma", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--nu0", help="comma-separated start value")
    add_fit_flags(p)
    p.set_defaults(func=cmd_fit_rvar)

    p = sub.add_parser("ci-test", help="extremal conditional independence test")
    p.add_argument("--gamma", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--cond", required=True, help="comma-separated conditioning set")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ci_test)

    p = sub.add_parser("loglik", help="surrogate (or dual) log-likelihood")
    p.add_argument("--gamma", required=True)
    p.add_argument("--q", required=True, help="adjacency CSV")
    p.add_argument("--dual", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_loglik)

    p = sub.add_parser("color-edges", help="k-medoids edge coloring")
    p.add_argument("--gamma", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--model", choices=["rcon", "rvar"], default="rcon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_color_edges)

    p = sub.add_parser("sweep", help="coloring sweep with validation scoring")
    p.add_argument("--data", required=True)
    p.add_argument("--graph", help="graph JSON (default: training-variogram MST)")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--model", choices=["rcon", "rvar"], default="rcon")
    p.add_argument("--train-frac", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.85)
    p.add_argument("--exceedances", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, DataError, HrgmError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
