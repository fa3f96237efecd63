"""Graph problems as diagonal Ising Hamiltonians, generators and oracles.

Every problem is expressed as a Hamiltonian ``H`` and the objective to
maximise is ``f(z) = -cost(H, z)``.  A measured bit 1 means the vertex is
selected, i.e. ``Z_i = -1``; bit 0 gives ``Z_i = +1``.

Under this convention the objectives are

* MAXCUT: number of cut edges.
* MINVEC: ``3 * covered - 9 * uncovered + v - 2 * |S|``.
* MAXIND: ``3 * m - 12 * (edges inside S) + 2 * |S| - v``.
* MAXCLI: MAXIND on the complement graph.

so the maximiser of ``f`` is a combinatorial optimum in each case.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import networkx as nx
import numpy as np

MAX_ORACLE_VERTICES = 24


class ProblemKind(enum.Enum):
    MAXCUT = "maxcut"
    MINVEC = "minvec"
    MAXIND = "maxind"
    MAXCLI = "maxcli"

    @classmethod
    def parse(cls, name: str) -> ProblemKind:
        key = name.lower().replace("-", "").replace("_", "")
        aliases = {"minver": "minvec", "mvc": "minvec", "mis": "maxind", "mc": "maxcut"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown problem {name!r}")


@dataclass(frozen=True)
class GraphInstance:
    v: int
    edges: frozenset[tuple[int, int]]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.v < 0:
            raise ValueError("vertex count must be non-negative")
        for i, j in self.edges:
            if not (0 <= i < j < self.v):
                raise ValueError(f"edge {(i, j)} must satisfy 0 <= i < j < v")

    @classmethod
    def from_edges(cls, v: int, edges: Iterable[tuple[int, int]], name: str = "") -> GraphInstance:
        normalized = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            normalized.add((min(i, j), max(i, j)))
        return cls(v, frozenset(normalized), name)

    @classmethod
    def from_networkx(cls, g: nx.Graph, name: str = "") -> GraphInstance:
        mapping = {node: k for k, node in enumerate(sorted(g.nodes))}
        return cls.from_edges(
            g.number_of_nodes(), ((mapping[a], mapping[b]) for a, b in g.edges), name
        )

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.v))
        g.add_edges_from(self.edges)
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @cached_property
    def is_connected(self) -> bool:
        return self.v > 0 and nx.is_connected(self.to_networkx())

    @property
    def density(self) -> float:
        pairs = self.v * (self.v - 1) // 2
        return self.m / pairs if pairs else 0.0

    def complement(self) -> GraphInstance:
        edges = {
            (i, j)
            for i, j in itertools.combinations(range(self.v), 2)
            if (i, j) not in self.edges
        }
        return GraphInstance(self.v, frozenset(edges), f"{self.name}~" if self.name else "")

    def to_edge_list(self) -> str:
        lines = [f"{self.v} {self.m}"] + [f"{i} {j}" for i, j in self.sorted_edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_edge_list(cls, text: str, name: str = "") -> GraphInstance:
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows:
            raise ValueError("empty edge list")
        v, m = int(rows[0][0]), int(rows[0][1])
        if len(rows) - 1 != m:
            raise ValueError(f"header declares {m} edges, found {len(rows) - 1}")
        edges = [(int(a), int(b)) for a, b in rows[1:]]
        if len(set(tuple(sorted(e)) for e in edges)) != m:
            raise ValueError("duplicate edges in edge list")
        return cls.from_edges(v, edges, name)


def read_graph(path: str | Path) -> GraphInstance:
    path = Path(path)
    return GraphInstance.parse_edge_list(path.read_text(encoding="utf-8"), name=path.stem)


def write_graph(graph: GraphInstance, path: str | Path) -> None:
    Path(path).write_text(graph.to_edge_list(), encoding="utf-8")


def basis_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` array whose row ``z`` holds the bits of ``z`` (column ``i`` = bit ``i``)."""
    z = np.arange(1 << n, dtype=np.int64)
    return ((z[:, None] >> np.arange(n)) & 1).astype(np.int8)


@dataclass(frozen=True)
class DiagonalHamiltonian:
    """``constant + sum_i h_i Z_i + sum_ij J_ij Z_i Z_j``."""

    n: int
    constant: float = 0.0
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)

    def cost(self, z: int) -> float:
        spins = [1 - 2 * ((z >> i) & 1) for i in range(self.n)]
        total = self.constant
        for i, h in self.linear.items():
            total += h * spins[i]
        for (i, j), coupling in self.quadratic.items():
            total += coupling * spins[i] * spins[j]
        return total

    def diagonal(self) -> np.ndarray:
        """Cost of every basis state, indexed by ``z`` (cached, read-only)."""
        cached = self.__dict__.get("_diag")
        if cached is None:
            cached = self._compute_diagonal()
            cached.flags.writeable = False
            object.__setattr__(self, "_diag", cached)
        return cached

    def _compute_diagonal(self) -> np.ndarray:
        z = np.arange(1 << self.n, dtype=np.int64)
        spins = [(1 - 2 * ((z >> i) & 1)).astype(np.float64) for i in range(self.n)]
        diag = np.full(z.shape, self.constant, dtype=np.float64)
        for i, h in self.linear.items():
            if h:
                diag += h * spins[i]
        for (i, j), coupling in self.quadratic.items():
            if coupling:
                diag += coupling * (spins[i] * spins[j])
        return diag

    def objective_vector(self) -> np.ndarray:
        return -self.diagonal()


def _accumulate(target: dict, key, value: float) -> None:
    target[key] = target.get(key, 0.0) + value


def _penalized_selection(v: int, edges: Iterable[tuple[int, int]]) -> DiagonalHamiltonian:
    # H = 3 sum_E (ZiZj - Zi - Zj) + sum_V Zi
    linear: dict[int, float] = {i: 1.0 for i in range(v)}
    quadratic: dict[tuple[int, int], float] = {}
    for i, j in edges:
        quadratic[(i, j)] = 3.0
        _accumulate(linear, i, -3.0)
        _accumulate(linear, j, -3.0)
    return DiagonalHamiltonian(v, 0.0, linear, quadratic)


def build_hamiltonian(problem: ProblemKind, graph: GraphInstance) -> DiagonalHamiltonian:
    if graph.v < 1:
        raise ValueError("graph has no vertices")
    v, edges = graph.v, graph.sorted_edges
    if problem is ProblemKind.MAXCUT:
        # H = sum_E 1/2 (ZiZj - 1)
        return DiagonalHamiltonian(
            v, -0.5 * len(edges), {}, {e: 0.5 for e in edges}
        )
    if problem is ProblemKind.MINVEC:
        # H = 3 sum_E (ZiZj + Zi + Zj) - sum_V Zi
        linear: dict[int, float] = {i: -1.0 for i in range(v)}
        quadratic = {}
        for i, j in edges:
            quadratic[(i, j)] = 3.0
            _accumulate(linear, i, 3.0)
            _accumulate(linear, j, 3.0)
        return DiagonalHamiltonian(v, 0.0, linear, quadratic)
    if problem is ProblemKind.MAXIND:
        return _penalized_selection(v, edges)
    if problem is ProblemKind.MAXCLI:
        return _penalized_selection(v, graph.complement().sorted_edges)
    raise ValueError(f"unsupported problem {problem}")


def objective(problem: ProblemKind, graph: GraphInstance, dist: np.ndarray) -> float:
    """Expected objective ``sum_z p(z) f(z)`` under a bitstring distribution."""
    f = build_hamiltonian(problem, graph).objective_vector()
    dist = np.asarray(dist, dtype=float)
    if dist.shape != f.shape:
        raise ValueError(f"distribution of size {dist.size} for {graph.v} vertices")
    return float(dist @ f)


def brute_force_optimum(problem: ProblemKind, graph: GraphInstance) -> tuple[int, float]:
    """Exhaustive argmax of the objective; ties go to the lowest bitstring."""
    if graph.v > MAX_ORACLE_VERTICES:
        raise ValueError(
            f"oracle limited to {MAX_ORACLE_VERTICES} vertices, graph has {graph.v}"
        )
    f = build_hamiltonian(problem, graph).objective_vector()
    z = int(np.argmax(f))
    return z, float(f[z])


def objective_bounds(problem: ProblemKind, graph: GraphInstance) -> tuple[float, float]:
    """(min, max) of the objective over all bitstrings."""
    f = build_hamiltonian(problem, graph).objective_vector()
    return float(f.min()), float(f.max())


def format_bits(z: int, v: int) -> str:
    """Bitstring with the highest vertex first, e.g. ``z=1, v=2 -> '01'``."""
    return format(z, f"0{v}b") if v else ""


def parse_bits(bits: str | int, v: int) -> int:
    if isinstance(bits, str):
        if len(bits) != v or set(bits) - {"0", "1"}:
            raise ValueError(f"expected {v} binary digits, got {bits!r}")
        return int(bits, 2)
    return int(bits)


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    size: int


def combinatorial_check(problem: ProblemKind, graph: GraphInstance, bits: str | int) -> CheckResult:
    """Graph-theoretic evaluation of a bit assignment, with no Hamiltonian involved.

    ``size`` is the cut size for MAXCUT and the number of selected vertices
    otherwise.
    """
    z = parse_bits(bits, graph.v)
    selected = {i for i in range(graph.v) if (z >> i) & 1}
    if problem is ProblemKind.MAXCUT:
        cut = sum(1 for i, j in graph.edges if (i in selected) != (j in selected))
        return CheckResult(True, cut)
    if problem is ProblemKind.MINVEC:
        valid = all(i in selected or j in selected for i, j in graph.edges)
        return CheckResult(valid, len(selected))
    if problem is ProblemKind.MAXIND:
        valid = not any(i in selected and j in selected for i, j in graph.edges)
        return CheckResult(valid, len(selected))
    if problem is ProblemKind.MAXCLI:
        valid = all(
            (min(i, j), max(i, j)) in graph.edges
            for i, j in itertools.combinations(sorted(selected), 2)
        )
        return CheckResult(valid, len(selected))
    raise ValueError(f"unsupported problem {problem}")


def validator_optimum(problem: ProblemKind, graph: GraphInstance) -> int:
    """Best feasible size by exhaustive enumeration through :func:`combinatorial_check`."""
    if graph.v > MAX_ORACLE_VERTICES:
        raise ValueError(f"validator limited to {MAX_ORACLE_VERTICES} vertices")
    sizes = [
        r.size
        for r in (combinatorial_check(problem, graph, z) for z in range(1 << graph.v))
        if r.valid
    ]
    return min(sizes) if problem is ProblemKind.MINVEC else max(sizes)


GRAPH_FAMILIES = ("barbell", "ladder", "caveman", "erdos_renyi")
ER_P_RANGE = (0.3, 0.95)


def generate_graph(
    family: str, *params: int, rng: np.random.Generator | None = None
) -> GraphInstance:
    """Build a benchmark graph.

    ``barbell(p)``: two ``K_p`` joined by one edge.  ``ladder(p)``: a ``2 x p``
    grid.  ``caveman(c, k)``: ``c`` cliques of size ``k`` where one edge per
    clique is rewired to the next clique around a ring.  ``erdos_renyi(v)``:
    ``G(v, p)`` with ``p ~ U[0.3, 0.95]`` drawn per instance, resampled until
    connected.
    """
    family = family.lower().replace("-", "_")
    if family == "barbell":
        (p,) = params
        if p < 3:
            raise ValueError("barbell needs cliques of size >= 3")
        return GraphInstance.from_networkx(nx.barbell_graph(p, 0), f"barbell{p}")
    if family == "ladder":
        (p,) = params
        if p < 2:
            raise ValueError("ladder needs >= 2 rungs")
        return GraphInstance.from_networkx(nx.ladder_graph(p), f"ladder{p}")
    if family == "caveman":
        c, k = params
        if c < 2 or k < 2:
            raise ValueError("caveman needs >= 2 cliques of size >= 2")
        return GraphInstance.from_networkx(
            nx.connected_caveman_graph(c, k), f"caveman{c}x{k}"
        )
    if family in ("erdos_renyi", "er"):
        (v,) = params
        if v < 2:
            raise ValueError("erdos_renyi needs >= 2 vertices")
        if rng is None:
            raise ValueError("erdos_renyi needs an rng")
        while True:
            p = rng.uniform(*ER_P_RANGE)
            seed = int(rng.integers(2**32))
            g = nx.gnp_random_graph(v, p, seed=seed)
            if nx.is_connected(g):
                return GraphInstance.from_networkx(g, f"er{v}")
    raise ValueError(f"unknown graph family {family!r}; choose from {GRAPH_FAMILIES}")
