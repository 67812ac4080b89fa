"""The canonical proof-dependency DAG and its basic structure operations.

Nodes are claims (axioms, intermediate lemmas, definitions, the final
theorem); a directed edge runs from a dependency to the claim that uses it,
so the graph flows from axioms toward the theorem.  Instances are immutable
and validated (acyclic, no self-loops, no duplicate edges) on construction.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np


class DagError(ValueError):
    """Structural problem with a dependency graph or its serialized form."""


class CycleError(DagError):
    """The edge set contains a directed cycle."""


class AmbiguousTheoremError(DagError):
    """No designated theorem and the sink is not unique."""


class EdgeListParseError(DagError):
    """Malformed line in a `dependent: dep1 dep2 ...` edge-list file."""


GRAPH_FORMAT = "ept-lab-graph"
GRAPH_VERSION = 1

# Fill colors used when exporting a DOT file with a module partition.
_DOT_PALETTE = (
    "#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f", "#cab2d6",
    "#ffff99", "#1f78b4", "#33a02c", "#e31a1c", "#ff7f00",
)


@dataclass(frozen=True)
class ProofDag:
    """Immutable dependency DAG.

    ``nodes`` is a sorted tuple of ``(id, label)`` pairs and ``edges`` a sorted
    tuple of ``(dependency_id, dependent_id)`` pairs; use :meth:`from_parts`
    rather than constructing directly so inputs get canonicalized.
    """

    nodes: tuple[tuple[str, str], ...]
    edges: tuple[tuple[str, str], ...]
    theorem: str | None = None

    @classmethod
    def from_parts(
        cls,
        nodes: Mapping[str, str] | Iterable[tuple[str, str]],
        edges: Iterable[tuple[str, str]],
        theorem: str | None = None,
    ) -> "ProofDag":
        if isinstance(nodes, Mapping):
            node_items = sorted(nodes.items())
        else:
            node_items = sorted(dict(nodes).items())
        edge_items = sorted(set((str(u), str(v)) for u, v in edges))
        return cls(tuple(node_items), tuple(edge_items), theorem)

    def __post_init__(self) -> None:
        ids = [i for i, _ in self.nodes]
        known = set(ids)
        if len(known) != len(ids):
            raise DagError("duplicate node ids")
        if list(self.nodes) != sorted(self.nodes):
            raise DagError("nodes must be sorted by id; use ProofDag.from_parts")
        if list(self.edges) != sorted(set(self.edges)):
            raise DagError("edges must be sorted and unique; use ProofDag.from_parts")
        for u, v in self.edges:
            if u == v:
                raise DagError(f"self-loop on node {u!r}")
            if u not in known or v not in known:
                raise DagError(f"edge ({u!r}, {v!r}) references unknown node")
        if self.theorem is not None and self.theorem not in known:
            raise DagError(f"designated theorem {self.theorem!r} is not a node")
        cycle = _find_cycle(known, self.edges)
        if cycle is not None:
            raise CycleError("dependency cycle: " + " -> ".join(cycle))

    # -- basic views ---------------------------------------------------------

    @cached_property
    def labels(self) -> dict[str, str]:
        return dict(self.nodes)

    @cached_property
    def order(self) -> tuple[str, ...]:
        """Canonical node ordering (sorted ids); array views align with it."""
        return tuple(i for i, _ in self.nodes)

    @cached_property
    def index(self) -> dict[str, int]:
        return {node_id: k for k, node_id in enumerate(self.order)}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def _adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style (dep_ptr, dep_idx, use_ptr, use_idx) over `order` indices."""
        n = self.n_nodes
        idx = self.index
        deps: list[list[int]] = [[] for _ in range(n)]
        uses: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            ui, vi = idx[u], idx[v]
            deps[vi].append(ui)
            uses[ui].append(vi)
        dep_ptr = np.zeros(n + 1, dtype=np.int64)
        use_ptr = np.zeros(n + 1, dtype=np.int64)
        for k in range(n):
            dep_ptr[k + 1] = dep_ptr[k] + len(deps[k])
            use_ptr[k + 1] = use_ptr[k] + len(uses[k])
        dep_idx = np.fromiter(
            (j for row in deps for j in sorted(row)), dtype=np.int64, count=dep_ptr[-1]
        )
        use_idx = np.fromiter(
            (j for row in uses for j in sorted(row)), dtype=np.int64, count=use_ptr[-1]
        )
        return dep_ptr, dep_idx, use_ptr, use_idx

    @cached_property
    def edge_index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as index arrays (dependency_idx, dependent_idx)."""
        idx = self.index
        u = np.fromiter((idx[a] for a, _ in self.edges), dtype=np.int64, count=self.n_edges)
        v = np.fromiter((idx[b] for _, b in self.edges), dtype=np.int64, count=self.n_edges)
        return u, v

    def dependencies(self, node_id: str) -> tuple[str, ...]:
        dep_ptr, dep_idx, _, _ = self._adjacency
        k = self.index[node_id]
        return tuple(self.order[j] for j in dep_idx[dep_ptr[k]:dep_ptr[k + 1]])

    def dependents(self, node_id: str) -> tuple[str, ...]:
        _, _, use_ptr, use_idx = self._adjacency
        k = self.index[node_id]
        return tuple(self.order[j] for j in use_idx[use_ptr[k]:use_ptr[k + 1]])

    # -- derived graphs ------------------------------------------------------

    def with_theorem(self, node_id: str) -> "ProofDag":
        return ProofDag(self.nodes, self.edges, node_id)

    def induced_subgraph(self, keep: Iterable[str]) -> "ProofDag":
        kept = set(keep)
        nodes = tuple((i, l) for i, l in self.nodes if i in kept)
        edges = tuple((u, v) for u, v in self.edges if u in kept and v in kept)
        theorem = self.theorem if self.theorem in kept else None
        return ProofDag(nodes, edges, theorem)


def _find_cycle(ids: set[str], edges: Iterable[tuple[str, str]]) -> list[str] | None:
    """Return one directed cycle as a node list (first == last), or None."""
    succ: dict[str, list[str]] = {i: [] for i in ids}
    indeg: dict[str, int] = {i: 0 for i in ids}
    for u, v in edges:
        succ[u].append(v)
        indeg[v] += 1
    queue = deque(i for i in ids if indeg[i] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if seen == len(ids):
        return None
    remaining = {i for i in ids if indeg[i] > 0}
    # Walk inside the remaining set until a node repeats.
    start = min(remaining)
    path: list[str] = [start]
    pos = {start: 0}
    node = start
    while True:
        node = min(v for v in succ[node] if v in remaining)
        if node in pos:
            return path[pos[node]:] + [node]
        pos[node] = len(path)
        path.append(node)


# -- degrees and roles --------------------------------------------------------


@dataclass(frozen=True)
class DegreeTable:
    """Exact per-node dependency (in) and usage (out) counts."""

    in_degree: dict[str, int]
    out_degree: dict[str, int]

    def in_values(self) -> list[int]:
        return [self.in_degree[k] for k in sorted(self.in_degree)]

    def out_values(self) -> list[int]:
        return [self.out_degree[k] for k in sorted(self.out_degree)]


def degrees(dag: ProofDag) -> DegreeTable:
    ins = {i: 0 for i in dag.order}
    outs = {i: 0 for i in dag.order}
    for u, v in dag.edges:
        outs[u] += 1
        ins[v] += 1
    return DegreeTable(ins, outs)


@dataclass(frozen=True)
class NodeRoles:
    """Partition of the node set into axioms, the theorem, and interior claims."""

    axioms: frozenset[str]
    theorem: str
    interior: frozenset[str]


def resolve_theorem(dag: ProofDag) -> str:
    """Designated theorem, falling back to the unique sink."""
    if dag.theorem is not None:
        return dag.theorem
    table = degrees(dag)
    sinks = sorted(i for i, d in table.out_degree.items() if d == 0)
    if len(sinks) != 1:
        raise AmbiguousTheoremError(
            f"no designated theorem and {len(sinks)} sinks: {sinks[:10]}"
        )
    return sinks[0]


def classify_roles(dag: ProofDag) -> NodeRoles:
    theorem = resolve_theorem(dag)
    table = degrees(dag)
    axioms = frozenset(
        i for i, d in table.in_degree.items() if d == 0 and i != theorem
    )
    interior = frozenset(i for i in dag.order if i != theorem and i not in axioms)
    return NodeRoles(axioms, theorem, interior)


def truncate_by_depth(dag: ProofDag, limit: int = 10000) -> ProofDag:
    """Cut the graph to the first dependency depth exceeding ``limit`` nodes.

    Expands breadth-first from the theorem along reverse edges, one full depth
    layer at a time, and returns the induced subgraph at the first depth whose
    cumulative node count exceeds ``limit``.  If the whole expansion stays
    within the limit the graph is returned unchanged.
    """
    if limit < 1:
        raise DagError("limit must be >= 1")
    theorem = resolve_theorem(dag)
    visited = {theorem}
    frontier = [theorem]
    while frontier and len(visited) <= limit:
        nxt: set[str] = set()
        for node in frontier:
            for dep in dag.dependencies(node):
                if dep not in visited:
                    nxt.add(dep)
        visited |= nxt
        frontier = sorted(nxt)
    if not frontier:
        return dag
    sub = dag.induced_subgraph(visited)
    return sub if sub.theorem is not None else sub.with_theorem(theorem)


# -- edge-list ingestion -------------------------------------------------------


def from_edge_list(text: str) -> ProofDag:
    """Parse `dependent: dep1 dep2 ...` lines into a DAG.

    ``#`` begins a comment line; repeated dependencies collapse into a single
    edge; the theorem defaults to the unique sink when one exists.
    """
    labels: dict[str, str] = {}
    edges: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = line.partition(":")
        dependent = head.strip()
        if not sep or not dependent or " " in dependent:
            raise EdgeListParseError(
                f"line {lineno}: expected 'dependent: dep1 dep2 ...', got {raw!r}"
            )
        labels.setdefault(dependent, dependent)
        for dep in rest.split():
            labels.setdefault(dep, dep)
            if dep == dependent:
                raise EdgeListParseError(
                    f"line {lineno}: {dependent!r} cannot depend on itself"
                )
            edges.add((dep, dependent))
    cycle = _find_cycle(set(labels), edges)
    if cycle is not None:
        raise CycleError("dependency cycle: " + " -> ".join(cycle))
    dag = ProofDag.from_parts(labels, edges)
    outs = {i: 0 for i in labels}
    for u, _ in edges:
        outs[u] += 1
    sinks = [i for i, d in outs.items() if d == 0]
    if len(sinks) == 1:
        dag = dag.with_theorem(sinks[0])
    return dag


# -- serialization -------------------------------------------------------------


def to_json_str(dag: ProofDag) -> str:
    doc = {
        "format": GRAPH_FORMAT,
        "version": GRAPH_VERSION,
        "theorem": dag.theorem,
        "nodes": [{"id": i, "label": l} for i, l in dag.nodes],
        "edges": [[u, v] for u, v in dag.edges],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def from_json_str(text: str) -> ProofDag:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DagError(f"invalid graph JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != GRAPH_FORMAT:
        raise DagError("not a graph document (missing format marker)")
    if doc.get("version") != GRAPH_VERSION:
        raise DagError(f"unsupported graph version {doc.get('version')!r}")
    nodes = {n["id"]: n["label"] for n in doc.get("nodes", [])}
    edges = [(u, v) for u, v in doc.get("edges", [])]
    return ProofDag.from_parts(nodes, edges, doc.get("theorem"))


def to_edge_list_str(dag: ProofDag) -> str:
    """Render in the `dependent: deps...` format; re-ingesting is the identity
    on (nodes, edges)."""
    deps: dict[str, list[str]] = {i: [] for i in dag.order}
    mentioned: set[str] = set()
    for u, v in dag.edges:
        deps[v].append(u)
        mentioned.add(u)
        mentioned.add(v)
    lines = []
    for node in dag.order:
        if deps[node]:
            lines.append(f"{node}: {' '.join(sorted(deps[node]))}")
        elif node not in mentioned:
            lines.append(f"{node}:")
    return "\n".join(lines) + ("\n" if lines else "")


def to_dot(dag: ProofDag, assignment: Mapping[str, int | None] | None = None) -> str:
    """DOT rendering; when a module assignment is given, nodes are filled with
    a per-module color."""
    lines = ["digraph proof {"]
    for node_id, label in dag.nodes:
        attrs = [f'label="{_dot_escape(label)}"']
        if assignment is not None and assignment.get(node_id) is not None:
            color = _DOT_PALETTE[assignment[node_id] % len(_DOT_PALETTE)]
            attrs.append(f'style=filled fillcolor="{color}"')
        if node_id == dag.theorem:
            attrs.append("shape=doubleoctagon")
        lines.append(f'  "{_dot_escape(node_id)}" [{" ".join(attrs)}];')
    for u, v in dag.edges:
        lines.append(f'  "{_dot_escape(u)}" -> "{_dot_escape(v)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')
