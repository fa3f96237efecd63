"""Seeded experiment runner: optimisation runs, gate-set ablation, scaling table.

Every CSV written here starts with ``#`` comment lines carrying the full
configuration and the gate-table hash, followed by a header row.  Read them
with e.g. ``pandas.read_csv(path, comment="#")``.

Seeding: graph ``g`` of an experiment is drawn from
``SeedSequence([seed, 0, g])`` and run ``r`` on that graph uses
``SeedSequence([seed, 1, g, r])``, from which each emitter spawns its own
stream.  Results therefore depend only on the master seed.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .gates import gate_table_hash, get_gate_set
from .pipeline import CircuitEvaluator
from .problems import (
    GraphInstance,
    ProblemKind,
    brute_force_optimum,
    build_hamiltonian,
    format_bits,
    generate_graph,
    read_graph,
)
from .qd import Archive, Scheduler, grid_shape, make_emitters

log = logging.getLogger(__name__)

VARIANTS: dict[str, float] = {"cma-es": 0.0, "cma-me": 1.0, "cma-mae": 0.3}

ABLATION_GRAPHS: dict[str, tuple[str, tuple[int, ...]]] = {
    "barbell": ("barbell", (4,)),
    "ladder": ("ladder", (4,)),
    "caveman": ("caveman", (2, 4)),
}

# Mean approximation ratios over 50 ER graphs, 100 steps, 4 layers.
_REFERENCE_COLUMNS = ("maxcli", "maxcut", "maxind", "minvec")
_REFERENCE_ROWS = {
    12: {"cma-es": (0.985, 0.995, 0.998, 0.987), "cma-mae": (0.973, 0.993, 0.996, 0.976), "cma-me": (0.984, 0.997, 0.998, 0.979)},
    14: {"cma-es": (0.972, 0.987, 0.998, 0.955), "cma-mae": (0.965, 0.980, 0.995, 0.942), "cma-me": (0.982, 0.979, 0.996, 0.956)},
    16: {"cma-es": (0.962, 0.973, 0.993, 0.933), "cma-mae": (0.961, 0.968, 0.992, 0.900), "cma-me": (0.964, 0.976, 0.991, 0.912)},
}
REFERENCE_SCALING: dict[tuple[int, str, str], float] = {
    (v, problem, variant): value
    for v, rows in _REFERENCE_ROWS.items()
    for variant, values in rows.items()
    for problem, value in zip(_REFERENCE_COLUMNS, values)
}

_GRAPH_STREAM = 0
_RUN_STREAM = 1


@dataclass
class ExperimentConfig:
    problem: str = "maxcut"
    graph_family: str = "erdos_renyi"
    graph_params: tuple[int, ...] = (8,)
    graph_file: str | None = None
    graphs: int = 1
    gateset: str = "tiny"
    alpha: float = 0.3
    layers: int = 4
    emitters: int = 20
    batch: int = 5
    steps: int = 100
    runs: int = 1
    seed: int = 0
    out_dir: str | None = None
    sigma0: float | None = None
    threshold_min: float = -1e6

    def __post_init__(self) -> None:
        self.graph_params = tuple(int(p) for p in self.graph_params)
        ProblemKind.parse(self.problem)
        get_gate_set(self.gateset)
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        for name in ("layers", "emitters", "graphs", "runs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.batch < 2:
            raise ValueError("batch must be >= 2")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")

    @property
    def problem_kind(self) -> ProblemKind:
        return ProblemKind.parse(self.problem)

    @property
    def step_size(self) -> float:
        gs = get_gate_set(self.gateset)
        return self.sigma0 if self.sigma0 is not None else 0.5 * len(gs)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


@dataclass(frozen=True)
class RunRecord:
    step: int
    run: int
    graph: int
    best_objective: float
    optimum: float
    ratio: float
    qd_score: float
    wall_ms: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class OracleRecord:
    graph: int
    name: str
    vertices: int
    edges: int
    density: float
    optimum: float
    bitstring: str


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    graphs: list[GraphInstance]
    oracles: list[OracleRecord]
    records: list[RunRecord]
    archives: dict[tuple[int, int], Archive]

    def final_ratios(self) -> np.ndarray:
        """Final-step ratio of every (graph, run), ordered by graph then run."""
        last = {}
        for r in self.records:
            last[(r.graph, r.run)] = r.ratio
        return np.array([last[k] for k in sorted(last)])

    def ratios_at(self, step: int) -> np.ndarray:
        return np.array([r.ratio for r in self.records if r.step == step])


def build_graphs(cfg: ExperimentConfig) -> list[GraphInstance]:
    if cfg.graph_file:
        return [read_graph(cfg.graph_file)]
    graphs = []
    for gid in range(cfg.graphs):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _GRAPH_STREAM, gid]))
        graphs.append(generate_graph(cfg.graph_family, *cfg.graph_params, rng=rng))
    return graphs


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Optimise every (graph, run) pair and collect per-step records.

    All oracle optima are computed before any optimisation starts, so an
    oversized graph fails fast.
    """
    problem = cfg.problem_kind
    gs = get_gate_set(cfg.gateset)
    graphs = build_graphs(cfg)

    hamiltonians, oracles = [], []
    for gid, g in enumerate(graphs):
        z, opt = brute_force_optimum(problem, g)
        if opt <= 0:
            log.warning("graph %d has non-positive optimum %g; ratios are not meaningful", gid, opt)
        hamiltonians.append(build_hamiltonian(problem, g))
        oracles.append(
            OracleRecord(gid, g.name, g.v, g.m, round(g.density, 6), opt, format_bits(z, g.v))
        )
        log.info("graph %d (%s): v=%d m=%d density=%.3f optimum=%g", gid, g.name, g.v, g.m, g.density, opt)

    records: list[RunRecord] = []
    archives: dict[tuple[int, int], Archive] = {}
    for gid, (g, h) in enumerate(zip(graphs, hamiltonians)):
        optimum = oracles[gid].optimum
        evaluator = CircuitEvaluator(h, gs, cfg.layers)
        lower = float(h.objective_vector().min())
        for run in range(cfg.runs):
            archive = Archive(
                grid_shape(g.v, cfg.layers, gs),
                cfg.alpha,
                threshold_min=cfg.threshold_min,
                qd_offset=lower,
            )
            emitters = make_emitters(
                cfg.emitters,
                evaluator.dim,
                cfg.batch,
                cfg.step_size,
                (0.0, float(len(gs))),
                np.random.SeedSequence([cfg.seed, _RUN_STREAM, gid, run]),
            )
            scheduler = Scheduler(emitters, archive, evaluator)
            start = time.perf_counter()
            for _ in range(cfg.steps):
                report = scheduler.step()
                records.append(
                    RunRecord(
                        step=report.step,
                        run=run,
                        graph=gid,
                        best_objective=report.best_objective,
                        optimum=optimum,
                        ratio=report.best_objective / optimum,
                        qd_score=report.qd_score,
                        wall_ms=(time.perf_counter() - start) * 1e3,
                    )
                )
            archives[(gid, run)] = archive
            if cfg.steps:
                log.info("graph %d run %d: final ratio %.4f", gid, run, records[-1].ratio)

    result = ExperimentResult(cfg, graphs, oracles, records, archives)
    if cfg.out_dir:
        write_experiment(result, Path(cfg.out_dir))
    return result


def _header_lines(config_json: str, extra: Iterable[str] = ()) -> list[str]:
    lines = [f"# config: {config_json}", f"# gate_table_sha1: {gate_table_hash()}"]
    lines.extend(f"# {line}" for line in extra)
    return lines


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    config_json: str,
    extra_header: Iterable[str] = (),
) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in _header_lines(config_json, extra_header):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def read_csv(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    """Comment lines and data rows of a CSV written by :func:`write_csv`."""
    comments, body = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            (comments if line.startswith("#") else body).append(line)
    return [c[1:].strip() for c in comments], list(csv.DictReader(body))


def write_archive_snapshot(archive: Archive, path: Path, config_json: str) -> None:
    rows = [(r["sparsity"], r["diversity"], r["objective"], r["threshold"]) for r in archive.snapshot()]
    write_csv(
        path,
        ("sparsity", "diversity", "objective", "threshold"),
        rows,
        config_json,
        extra_header=[f"grid_shape: {archive.shape[0]} {archive.shape[1]}"],
    )


def write_experiment(result: ExperimentResult, out_dir: Path) -> None:
    cfg_json = result.config.to_json()
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(
        out_dir / "oracle.csv",
        [f.name for f in dataclasses.fields(OracleRecord)],
        (dataclasses.astuple(o) for o in result.oracles),
        cfg_json,
    )
    write_csv(
        out_dir / "records.csv",
        ("step", "run", "graph", "best_objective", "optimum", "ratio", "qd_score"),
        (
            (r.step, r.run, r.graph, r.best_objective, r.optimum, r.ratio, r.qd_score)
            for r in result.records
        ),
        cfg_json,
    )
    # wall-clock time lives in its own file so records.csv stays reproducible
    write_csv(
        out_dir / "timings.csv",
        ("step", "run", "graph", "wall_ms"),
        ((r.step, r.run, r.graph, round(r.wall_ms, 3)) for r in result.records),
        cfg_json,
    )
    for (gid, run), archive in sorted(result.archives.items()):
        write_archive_snapshot(archive, out_dir / f"archive_g{gid}_r{run}.csv", cfg_json)


def _summary(values: np.ndarray) -> dict[str, float]:
    n = len(values)
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    half = float(stats.t.ppf(0.975, n - 1) * std / math.sqrt(n)) if n > 1 else 0.0
    return {
        "mean_ratio": mean,
        "std": std,
        "ci95": half,
        "min": float(np.min(values)),
        "max": float(np.max(values)),
    }


def ablate_gatesets(
    template: ExperimentConfig,
    gatesets: Sequence[str] = ("cliffordt", "rotcnot", "tinyh", "tiny"),
    variants: Sequence[str] = ("cma-es", "cma-me", "cma-mae"),
    graphs: Sequence[str] = ("barbell", "ladder", "caveman"),
    runs: int = 5,
) -> list[dict]:
    """Final-ratio statistics per (gate set, variant, graph)."""
    rows = []
    for gs_name in gatesets:
        for variant in variants:
            for graph in graphs:
                family, params = ABLATION_GRAPHS[graph]
                cfg = dataclasses.replace(
                    template,
                    gateset=gs_name,
                    alpha=VARIANTS[variant],
                    graph_family=family,
                    graph_params=params,
                    graph_file=None,
                    graphs=1,
                    runs=runs,
                    out_dir=None,
                )
                ratios = run_experiment(cfg).final_ratios()
                rows.append({"gateset": gs_name, "variant": variant, "graph": graph, "runs": runs, **_summary(ratios)})
                log.info("ablation %s/%s/%s: %.4f", gs_name, variant, graph, rows[-1]["mean_ratio"])
    if template.out_dir:
        _write_table(Path(template.out_dir) / "ablation.csv", rows, template.to_json())
    return rows


def scaling_table(
    template: ExperimentConfig,
    vertices: Sequence[int] = (12, 14, 16),
    problems: Sequence[str] = ("maxcli", "maxcut", "maxind", "minvec"),
    variants: Sequence[str] = ("cma-es", "cma-mae", "cma-me"),
    graphs: int = 10,
) -> list[dict]:
    """Mean final ratio over ``graphs`` connected ER graphs per (v, problem, variant).

    The same graph sample is used for every problem and variant at a given ``v``.
    """
    rows = []
    for v in vertices:
        for problem in problems:
            for variant in variants:
                cfg = dataclasses.replace(
                    template,
                    problem=problem,
                    alpha=VARIANTS[variant],
                    graph_family="erdos_renyi",
                    graph_params=(v,),
                    graph_file=None,
                    graphs=graphs,
                    runs=1,
                    out_dir=None,
                )
                ratios = run_experiment(cfg).final_ratios()
                key = (v, ProblemKind.parse(problem).value, variant)
                rows.append(
                    {
                        "v": v,
                        "problem": key[1],
                        "variant": variant,
                        "graphs": graphs,
                        **_summary(ratios),
                        "reference": REFERENCE_SCALING.get(key, float("nan")),
                    }
                )
                log.info("scaling v=%d %s %s: %.4f", v, problem, variant, rows[-1]["mean_ratio"])
    if template.out_dir:
        _write_table(Path(template.out_dir) / "scaling.csv", rows, template.to_json())
    return rows


def _write_table(path: Path, rows: list[dict], config_json: str) -> None:
    columns = list(rows[0]) if rows else []
    write_csv(path, columns, ([row[c] for c in columns] for row in rows), config_json)
