"""Command-line entry point wiring ingestion, generation, statistics,
communities, simulation, and the experiment drivers.

Conventions: ``-`` means standard input/output for graph and data arguments;
every command that writes to a file also writes ``<file>.manifest.json``
recording the full command line, input hashes, parameters, and duration, so
any output can be regenerated bit-identically by re-running the recorded
command.  Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from . import assembly, communities, experiments, netstats, sexpr
from . import belief as belief_mod
from . import graph as graph_mod
from .belief import ChainSchedule, CouplingParams, PriorMode

PARTITION_FORMAT = "ept-lab-partition"
PARTITION_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 1, not argparse's 2
        raise UsageError(message)


# -- io helpers -----------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_graph(path: str) -> graph_mod.ProofDag:
    return graph_mod.from_json_str(_read_text(path))


def _load_partition(path: str) -> communities.Partition:
    doc = json.loads(_read_text(path))
    if not isinstance(doc, dict) or doc.get("format") != PARTITION_FORMAT:
        raise graph_mod.DagError("not a partition document")
    assignment = {str(k): (int(v) if v is not None else None)
                  for k, v in doc["assignment"].items()}
    return communities.Partition(assignment, float(doc.get("modularity", 0.0)))


def _partition_json(partition: communities.Partition) -> str:
    doc = {
        "format": PARTITION_FORMAT,
        "version": PARTITION_VERSION,
        "modularity": partition.modularity,
        "assignment": {k: partition.assignment[k] for k in sorted(partition.assignment)},
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _param_header(args: argparse.Namespace, extra: dict | None = None) -> str:
    skip = {"func", "inputs", "output", "command"}
    lines = [f"# ept-lab {args.command} (version {__version__})"]
    for key in sorted(vars(args)):
        if key in skip:
            continue
        lines.append(f"# {key} = {getattr(args, key)}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key} = {value}")
    return "\n".join(lines) + "\n"


def _manifest(args: argparse.Namespace, argv: list[str], inputs: list[str],
              started: float) -> str:
    hashes = {}
    for path in inputs:
        if path and path != "-" and Path(path).exists():
            hashes[path] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in {"func", "inputs", "command"}
    }
    doc = {
        "command": ["ept-lab", *argv],
        "inputs": hashes,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "duration_s": round(time.monotonic() - started, 6),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated number list, got {text!r}") from exc


def _schedule(args: argparse.Namespace) -> ChainSchedule:
    return ChainSchedule(
        burn_in_sweeps=args.burn_in,
        n_samples=args.samples,
        sample_stride_sweeps=args.stride,
        n_replicas=args.replicas,
        seed=args.seed,
    )


def _add_schedule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--burn-in", type=int, default=200, help="burn-in sweeps")
    p.add_argument("--samples", type=int, default=1000, help="samples per replica")
    p.add_argument("--stride", type=int, default=2, help="sweeps between samples")
    p.add_argument("--replicas", type=int, default=8, help="independent replicas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: EPT_LAB_THREADS or all cores)")


def _fmt(x: float) -> str:
    return repr(float(x))


# -- subcommands ------------------------------------------------------------------


def _cmd_ingest(args) -> None:
    if (args.source is None) == (args.edges is None):
        raise UsageError("ingest needs exactly one of <file.sexp> or --edges <file.deps>")
    if args.edges is not None:
        dag = graph_mod.from_edge_list(_read_text(args.edges))
    else:
        binders = tuple(args.binders.split(",")) if args.binders else sexpr.DEFAULT_BINDER_LABELS
        dag = sexpr.ingest_text(_read_text(args.source), binders)
    _write_text(args.output, graph_mod.to_json_str(dag))


def _cmd_gen(args) -> None:
    params = assembly.AssemblyParams(
        n_nodes=args.nodes, mean_deps=args.mean_deps,
        copy_prob=args.copy_prob, seed=args.seed,
    )
    _write_text(args.output, graph_mod.to_json_str(assembly.generate(params)))


def _cmd_truncate(args) -> None:
    dag = _read_graph(args.graph)
    _write_text(args.output, graph_mod.to_json_str(graph_mod.truncate_by_depth(dag, args.limit)))


def _cmd_stats(args) -> None:
    dag = _read_graph(args.graph)
    table = graph_mod.degrees(dag)
    values = table.out_values() if args.fit == "out-degree" else table.in_values()
    lines = [_param_header(args).rstrip("\n")]
    if args.fit == "out-degree":
        fit = netstats.fit_power_law(values)
        lines.append(f"# {fit.summary()}")
    else:
        fit = netstats.fit_exponential([v for v in values if v >= 1])
        lines.append(f"# {fit.summary()}")
        ks, crit = netstats.geometric_ks(values)
        lines.append(f"# geometric ks={ks:.5f} crit5pct={crit:.5f}")
    lines.append("degree,count,ccdf")
    for degree, count, ccdf in netstats.degree_histogram(values):
        lines.append(f"{degree},{count},{_fmt(ccdf)}")
    _write_text(args.output, "\n".join(lines) + "\n")


def _cmd_communities(args) -> None:
    dag = _read_graph(args.graph)
    if args.method == "greedy":
        partition = communities.greedy_modularity(dag)
    else:
        partition = communities.girvan_newman(dag)
    if args.top_coverage is not None:
        partition = communities.top_clusters(dag, partition, args.top_coverage)
    _write_text(args.output, _partition_json(partition))


def _cmd_simulate(args) -> None:
    dag = _read_graph(args.graph)
    params = CouplingParams.from_error_rates(
        args.eps_dep, args.eps_imp, args.prior, PriorMode(args.mode)
    )
    summary = belief_mod.run_chain(dag, params, _schedule(args), args.threads)
    lines = [_param_header(args, {
        "beta_dep": params.beta_dep,
        "beta_imp": params.beta_imp,
        "mean_belief": _fmt(summary.mean_belief),
        "theorem_belief": _fmt(summary.theorem_belief),
        "axiom_belief": _fmt(summary.axiom_belief),
        "split_half_discrepancy": _fmt(summary.split_half_discrepancy),
    }).rstrip("\n")]
    lines.append("node_id,label,belief")
    labels = dag.labels
    for node_id, value in zip(summary.node_ids, summary.beliefs):
        lines.append(f"{node_id},{labels[node_id]},{_fmt(value)}")
    _write_text(args.output, "\n".join(lines) + "\n")


def _cmd_sweep(args) -> None:
    dag = _read_graph(args.graph)
    result = experiments.ept_sweep(
        dag, _float_list(args.eps), args.prior, _schedule(args),
        PriorMode(args.mode), args.threads,
    )
    lines = [_param_header(args).rstrip("\n")]
    lines.append("epsilon,beta,mean_belief,theorem_belief,axiom_belief,theorem_stderr,split_half_discrepancy")
    for r in result.rows:
        lines.append(",".join(_fmt(x) for x in (
            r.epsilon, r.beta, r.mean_belief, r.theorem_belief,
            r.axiom_belief, r.theorem_stderr, r.split_half_discrepancy,
        )))
    _write_text(args.output, "\n".join(lines) + "\n")


def _cmd_prior_curve(args) -> None:
    dag = _read_graph(args.graph)
    rows = experiments.prior_response(
        dag, args.eps, _float_list(args.priors), _schedule(args),
        PriorMode(args.mode), args.threads,
    )
    lines = [_param_header(args).rstrip("\n")]
    lines.append("prior,posterior_theorem,theorem_stderr,replica_variance")
    for r in rows:
        lines.append(",".join(_fmt(x) for x in (
            r.prior, r.posterior_theorem, r.theorem_stderr, r.replica_variance,
        )))
    _write_text(args.output, "\n".join(lines) + "\n")


def _cmd_grid(args) -> None:
    dag = _read_graph(args.graph)
    result = experiments.abductive_grid(
        dag, _float_list(args.eps_dep), _float_list(args.eps_imp),
        args.prior, _schedule(args), PriorMode(args.mode), args.threads,
    )
    lines = [_param_header(args).rstrip("\n")]
    lines.append("eps_dep,eps_imp,theorem_belief,mean_belief,theorem_stderr")
    for i, ed in enumerate(result.eps_dep):
        for j, ei in enumerate(result.eps_imp):
            lines.append(",".join(_fmt(x) for x in (
                ed, ei, result.theorem_belief[i, j],
                result.mean_belief[i, j], result.theorem_stderr[i, j],
            )))
    _write_text(args.output, "\n".join(lines) + "\n")


def _cmd_firewall(args) -> None:
    dag = _read_graph(args.graph)
    partition = _load_partition(args.partition)
    report = experiments.firewall_delta(
        dag, partition, beta=args.beta, n_flip=args.n_flip,
        schedule=_schedule(args), n_baseline_draws=args.baseline_draws,
        threads=args.threads,
    )
    lines = [_param_header(args, {
        "delta_L1": _fmt(report.delta_L1),
        "stderr": _fmt(report.stderr),
        "within_mean": _fmt(report.within_mean),
        "within_stderr": _fmt(report.within_stderr),
        "baseline_mean": _fmt(report.baseline_mean),
        "baseline_stderr": _fmt(report.baseline_stderr),
        "n_states": report.n_states,
    }).rstrip("\n")]
    lines.append("module,mean_within_penalty")
    for m in sorted(report.per_module_mean):
        lines.append(f"{m},{_fmt(report.per_module_mean[m])}")
    _write_text(args.output, "\n".join(lines) + "\n")


def _cmd_export(args) -> None:
    dag = _read_graph(args.graph)
    partition = _load_partition(args.partition) if args.partition else None
    fmt = "dot" if args.dot else args.format
    _write_text(args.output, export_graph(dag, fmt, partition))


def export_graph(
    dag: graph_mod.ProofDag,
    fmt: str,
    partition: communities.Partition | None = None,
) -> str:
    """Canonical, byte-stable serialization in one of {json, dot, edges}."""
    if fmt == "json":
        return graph_mod.to_json_str(dag)
    if fmt == "dot":
        return graph_mod.to_dot(dag, partition.assignment if partition else None)
    if fmt == "edges":
        return graph_mod.to_edge_list_str(dag)
    raise UsageError(f"unknown export format {fmt!r}")


# -- parser / dispatch -------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="ept-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ept-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a term dump or edge list into a graph file")
    p.add_argument("source", nargs="?", help=".sexp term dump ('-' for stdin)")
    p.add_argument("--edges", help=".deps edge-list file")
    p.add_argument("--binders", default=None,
                   help="comma-separated binder labels (default: Lambda)")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_ingest, inputs=lambda a: [a.source, a.edges])

    p = sub.add_parser("gen", help="generate a synthetic assembly-model graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--mean-deps", type=float, default=6.0)
    p.add_argument("--copy-prob", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_gen, inputs=lambda a: [])

    p = sub.add_parser("truncate", help="cut a graph at the first depth exceeding a node budget")
    p.add_argument("graph")
    p.add_argument("--limit", type=int, default=10000)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_truncate, inputs=lambda a: [a.graph])

    p = sub.add_parser("stats", help="degree histogram and distribution fit")
    p.add_argument("graph")
    p.add_argument("--fit", choices=["out-degree", "in-degree"], default="out-degree")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_stats, inputs=lambda a: [a.graph])

    p = sub.add_parser("communities", help="module detection by edge-betweenness removal")
    p.add_argument("graph")
    p.add_argument("--method", choices=["girvan-newman", "greedy"],
                   default="girvan-newman",
                   help="greedy = agglomerative modularity, for graphs too "
                        "large for betweenness removal")
    p.add_argument("--top-coverage", type=float, default=None,
                   help="keep only the largest modules covering this node fraction")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_communities, inputs=lambda a: [a.graph])

    p = sub.add_parser("simulate", help="equilibrium beliefs for one parameter point")
    p.add_argument("graph")
    p.add_argument("--eps-dep", type=float, default=0.01)
    p.add_argument("--eps-imp", type=float, default=0.01)
    p.add_argument("--prior", type=float, default=0.75)
    p.add_argument("--mode", choices=[m.value for m in PriorMode], default="field")
    _add_schedule_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_simulate, inputs=lambda a: [a.graph])

    p = sub.add_parser("sweep", help="belief curves over an error-rate grid")
    p.add_argument("graph")
    p.add_argument("--eps", required=True, help="comma-separated error rates")
    p.add_argument("--prior", type=float, default=0.75)
    p.add_argument("--mode", choices=[m.value for m in PriorMode], default="field")
    _add_schedule_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_sweep, inputs=lambda a: [a.graph])

    p = sub.add_parser("prior-curve", help="posterior theorem belief vs prior")
    p.add_argument("graph")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--priors", required=True, help="comma-separated priors")
    p.add_argument("--mode", choices=[m.value for m in PriorMode], default="field")
    _add_schedule_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_prior_curve, inputs=lambda a: [a.graph])

    p = sub.add_parser("grid", help="theorem belief over (eps_dep, eps_imp) grids")
    p.add_argument("graph")
    p.add_argument("--eps-dep", required=True, help="comma-separated error rates")
    p.add_argument("--eps-imp", required=True, help="comma-separated error rates")
    p.add_argument("--prior", type=float, default=0.75)
    p.add_argument("--mode", choices=[m.value for m in PriorMode], default="field")
    _add_schedule_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_grid, inputs=lambda a: [a.graph])

    p = sub.add_parser("firewall", help="within-module vs scattered flip penalties")
    p.add_argument("graph")
    p.add_argument("--partition", required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n-flip", type=int, default=10)
    p.add_argument("--baseline-draws", type=int, default=200)
    _add_schedule_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_firewall, inputs=lambda a: [a.graph, a.partition])

    p = sub.add_parser("export", help="serialize a graph as json, dot, or edges")
    p.add_argument("graph")
    p.add_argument("--format", choices=["json", "dot", "edges"], default="json")
    p.add_argument("--dot", action="store_true", help="shorthand for --format dot")
    p.add_argument("--partition", default=None, help="partition JSON for DOT colors")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_export, inputs=lambda a: [a.graph])

    return parser


_DATA_ERRORS = (
    graph_mod.DagError,
    sexpr.SexprParseError,
    sexpr.DuplicateNameError,
    netstats.InsufficientDataError,
    netstats.DegenerateSampleError,
    OSError,
    json.JSONDecodeError,
    ValueError,
)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"ept-lab: usage error: {exc}", file=sys.stderr)
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return 1
    started = time.monotonic()
    try:
        args.func(args)
    except UsageError as exc:
        print(f"ept-lab: usage error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"ept-lab: error: {exc}", file=sys.stderr)
        return 2
    output = getattr(args, "output", None)
    manifest = _manifest(args, argv, args.inputs(args), started)
    if output and output != "-":
        Path(f"{output}.manifest.json").write_text(manifest, encoding="utf-8")
    else:
        # stdout carries data; the manifest still gets emitted, on stderr
        sys.stderr.write(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
