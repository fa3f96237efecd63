"""Command-line entry point: ``qdcirc <subcommand> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .gates import GATE_SETS, gate_table_hash
from .harness import ExperimentConfig, VARIANTS
from .heatmap import export_heatmap
from .problems import (
    GRAPH_FAMILIES,
    ProblemKind,
    brute_force_optimum,
    combinatorial_check,
    format_bits,
    generate_graph,
    read_graph,
)

_DEFAULT_PARAMS = {"barbell": (4,), "ladder": (4,), "caveman": (2, 4), "erdos_renyi": (8,)}


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", default="maxcut", help="maxcut | minvec | maxind | maxcli")
    p.add_argument("--graph-family", default="erdos_renyi", choices=GRAPH_FAMILIES)
    p.add_argument("--graph-params", type=_int_list, default=None,
                   help="family parameters, e.g. '4' for barbell/ladder, '2,4' for caveman, 'v' for erdos_renyi")
    p.add_argument("--graph-file", default=None, help="edge-list file; overrides --graph-family")
    p.add_argument("--graphs", type=int, default=1, help="number of generated graphs")
    p.add_argument("--gateset", default="tiny", choices=sorted(GATE_SETS))
    p.add_argument("--alpha", type=float, default=0.3, help="archive learning rate")
    p.add_argument("--variant", choices=sorted(VARIANTS), default=None,
                   help="shortcut for --alpha (cma-es=0, cma-mae=0.3, cma-me=1)")
    p.add_argument("--layers", type=int, default=4)
    p.add_argument("--emitters", type=int, default=20)
    p.add_argument("--batch", type=int, default=5)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma0", type=float, default=None)
    p.add_argument("--threshold-min", type=float, default=-1e6)
    p.add_argument("--out-dir", default=None)


def _config(args: argparse.Namespace) -> ExperimentConfig:
    params = args.graph_params or _DEFAULT_PARAMS[args.graph_family]
    return ExperimentConfig(
        problem=args.problem,
        graph_family=args.graph_family,
        graph_params=params,
        graph_file=args.graph_file,
        graphs=args.graphs,
        gateset=args.gateset,
        alpha=VARIANTS[args.variant] if args.variant else args.alpha,
        layers=args.layers,
        emitters=args.emitters,
        batch=args.batch,
        steps=args.steps,
        runs=args.runs,
        seed=args.seed,
        out_dir=args.out_dir,
        sigma0=args.sigma0,
        threshold_min=args.threshold_min,
    )


def cmd_run_co(args: argparse.Namespace) -> int:
    cfg = _config(args)
    result = harness.run_experiment(cfg)
    for o in result.oracles:
        print(f"graph {o.graph} ({o.name}): v={o.vertices} m={o.edges} optimum={o.optimum:g} [{o.bitstring}]")
    if cfg.steps:
        final = result.final_ratios()
        print(f"final ratio: mean {final.mean():.4f} min {final.min():.4f} over {final.size} runs")
    return 0


def _print_table(rows: list[dict]) -> None:
    if not rows:
        return
    cols = list(rows[0])
    print(",".join(cols))
    for row in rows:
        print(",".join(f"{row[c]:.4f}" if isinstance(row[c], float) else str(row[c]) for c in cols))


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    rows = harness.ablate_gatesets(
        cfg,
        gatesets=args.gatesets.split(","),
        variants=args.variants.split(","),
        graphs=args.ablation_graphs.split(","),
        runs=args.runs,
    )
    _print_table(rows)
    return 0


def cmd_scale(args: argparse.Namespace) -> int:
    cfg = _config(args)
    rows = harness.scaling_table(
        cfg,
        vertices=_int_list(args.vertices),
        problems=args.problems.split(","),
        variants=args.variants.split(","),
        graphs=args.graphs,
    )
    _print_table(rows)
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    comments, rows = harness.read_csv(args.archive)
    shape_lines = [c for c in comments if c.startswith("grid_shape:")]
    if not shape_lines:
        print(f"{args.archive}: missing grid_shape header", file=sys.stderr)
        return 2
    shape = tuple(int(x) for x in shape_lines[0].split(":", 1)[1].split())
    stem = Path(args.output) if args.output else Path(args.archive).with_suffix("")
    export_heatmap(
        rows,
        shape,
        stem.with_name(stem.name + "_heatmap.csv"),
        stem.with_name(stem.name + "_heatmap.ppm"),
        header=comments,
    )
    print(f"wrote {stem.name}_heatmap.csv and {stem.name}_heatmap.ppm")
    return 0


def _load_graph(args: argparse.Namespace):
    if args.graph_file:
        return read_graph(args.graph_file)
    params = args.graph_params or _DEFAULT_PARAMS[args.graph_family]
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0, 0]))
    return generate_graph(args.graph_family, *params, rng=rng)


def cmd_oracle(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    problem = ProblemKind.parse(args.problem)
    z, value = brute_force_optimum(problem, graph)
    check = combinatorial_check(problem, graph, z)
    print(f"problem={problem.value} v={graph.v} m={graph.m}")
    print(f"optimum={value:g} bitstring={format_bits(z, graph.v)} valid={check.valid} size={check.size}")
    return 0


def cmd_gen_graph(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    text = graph.to_edge_list()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdcirc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s (gate table {gate_table_hash()[:12]})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-co", help="optimise circuits for a combinatorial problem")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_run_co)

    p = sub.add_parser("ablate-gatesets", help="gate set x variant x graph ablation")
    _add_experiment_args(p)
    p.add_argument("--gatesets", default="cliffordt,rotcnot,tinyh,tiny")
    p.add_argument("--variants", default="cma-es,cma-me,cma-mae")
    p.add_argument("--ablation-graphs", default="barbell,ladder,caveman")
    p.set_defaults(func=cmd_ablate, runs=5)

    p = sub.add_parser("scale", help="scaling table over ER graph sizes")
    _add_experiment_args(p)
    p.add_argument("--vertices", default="12,14,16")
    p.add_argument("--problems", default="maxcli,maxcut,maxind,minvec")
    p.add_argument("--variants", default="cma-es,cma-mae,cma-me")
    p.set_defaults(func=cmd_scale, graphs=10)

    p = sub.add_parser("heatmap", help="render an archive snapshot CSV")
    p.add_argument("archive", help="archive_g*_r*.csv written by run-co")
    p.add_argument("--output", default=None, help="output path stem")
    p.set_defaults(func=cmd_heatmap)

    for name, func in (("oracle", cmd_oracle), ("gen-graph", cmd_gen_graph)):
        p = sub.add_parser(name, help="exhaustive optimum" if name == "oracle" else "write an edge list")
        p.add_argument("--problem", default="maxcut")
        p.add_argument("--graph-family", default="erdos_renyi", choices=GRAPH_FAMILIES)
        p.add_argument("--graph-params", type=_int_list, default=None)
        p.add_argument("--graph-file", default=None)
        p.add_argument("--seed", type=int, default=0)
        if name == "gen-graph":
            p.add_argument("--out", default=None)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
