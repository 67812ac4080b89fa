"""Module detection by iterative removal of high-betweenness edges.

Clustering operates on the undirected projection of the dependency DAG.  The
removal loop recomputes shortest-path edge betweenness after every removal and
returns the component partition of maximum modularity seen along the way, with
betweenness ties broken by lexicographic edge id so runs are deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .graph import ProofDag

UNASSIGNED = None


@dataclass(frozen=True)
class Partition:
    """Node -> module index map (None = unassigned) plus its modularity."""

    assignment: dict[str, int | None]
    modularity: float

    def modules(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for node, m in self.assignment.items():
            if m is not None:
                out.setdefault(m, []).append(node)
        return {m: sorted(ns) for m, ns in out.items()}

    def module_sizes(self) -> dict[int, int]:
        return {m: len(ns) for m, ns in self.modules().items()}


def _undirected_adjacency(dag: ProofDag) -> dict[str, list[str]]:
    adj: dict[str, set[str]] = {i: set() for i in dag.order}
    for u, v in dag.edges:
        adj[u].add(v)
        adj[v].add(u)
    return {i: sorted(ns) for i, ns in adj.items()}


def modularity(dag: ProofDag, assignment: Mapping[str, int | None]) -> float:
    """Standard undirected modularity of an assignment on the full graph.

    Unassigned nodes are treated as singleton modules so the formula stays
    total over the node set.
    """
    m = dag.n_edges
    if m == 0:
        return 0.0
    group: dict[str, object] = {}
    for node in dag.order:
        g = assignment.get(node, UNASSIGNED)
        group[node] = g if g is not None else ("solo", node)
    degree = {i: 0 for i in dag.order}
    for u, v in dag.edges:
        degree[u] += 1
        degree[v] += 1
    internal: dict[object, int] = {}
    degsum: dict[object, int] = {}
    for node in dag.order:
        degsum[group[node]] = degsum.get(group[node], 0) + degree[node]
    for u, v in dag.edges:
        if group[u] == group[v]:
            internal[group[u]] = internal.get(group[u], 0) + 1
    q = 0.0
    for g, dsum in degsum.items():
        q += internal.get(g, 0) / m - (dsum / (2.0 * m)) ** 2
    return q


def edge_betweenness(
    dag_or_adj: ProofDag | dict[str, list[str]],
) -> dict[tuple[str, str], float]:
    """Shortest-path betweenness per undirected edge, unit weights.

    Each unordered node pair contributes 1, split fractionally across
    equal-length shortest paths (Brandes accumulation).  Edge keys are
    ``(min(u, v), max(u, v))``.
    """
    adj = (
        _undirected_adjacency(dag_or_adj)
        if isinstance(dag_or_adj, ProofDag)
        else dag_or_adj
    )
    scores: dict[tuple[str, str], float] = {}
    for node, neighbors in adj.items():
        for nb in neighbors:
            if node < nb:
                scores[(node, nb)] = 0.0
    for source in adj:
        dist = {source: 0}
        sigma = {source: 1.0}
        preds: dict[str, list[str]] = {source: []}
        order: list[str] = []
        queue = deque([source])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    sigma[v] = 0.0
                    preds[v] = []
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = {u: 0.0 for u in order}
        for w in reversed(order):
            for v in preds[w]:
                c = sigma[v] / sigma[w] * (1.0 + delta[w])
                key = (v, w) if v < w else (w, v)
                scores[key] += c
                delta[v] += c
    # Each unordered pair was accumulated from both endpoints.
    return {e: s / 2.0 for e, s in scores.items()}


def _components(adj: dict[str, list[str]]) -> list[list[str]]:
    seen: set[str] = set()
    comps: list[list[str]] = []
    for start in adj:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    # Stable module numbering: by smallest member id.
    comps.sort(key=lambda c: c[0])
    return comps


def _assignment_from_components(comps: list[list[str]]) -> dict[str, int | None]:
    out: dict[str, int | None] = {}
    for m, comp in enumerate(comps):
        for node in comp:
            out[node] = m
    return out


def girvan_newman(dag: ProofDag) -> Partition:
    """Best-modularity partition over the edge-removal sequence."""
    if dag.n_nodes < 2:
        raise ValueError("community detection needs at least 2 nodes")
    adj = {i: list(ns) for i, ns in _undirected_adjacency(dag).items()}

    best_assignment = _assignment_from_components(_components(adj))
    best_q = modularity(dag, best_assignment)
    edges_left = sum(len(ns) for ns in adj.values()) // 2
    while edges_left > 0:
        scores = edge_betweenness(adj)
        # Max betweenness, ties by lexicographic edge id.
        target = min(scores, key=lambda e: (-scores[e], e))
        u, v = target
        adj[u].remove(v)
        adj[v].remove(u)
        edges_left -= 1
        assignment = _assignment_from_components(_components(adj))
        q = modularity(dag, assignment)
        if q > best_q:
            best_q = q
            best_assignment = assignment
    return Partition(best_assignment, best_q)


def greedy_modularity(dag: ProofDag) -> Partition:
    """Agglomerative modularity maximization (merge best pair until no gain).

    A faster alternative to the betweenness-removal loop for large graphs,
    exposed in the CLI only behind an explicit flag.  Deterministic: community
    labels are their smallest member id and ties are broken lexicographically.
    """
    if dag.n_nodes < 2:
        raise ValueError("community detection needs at least 2 nodes")
    m = dag.n_edges
    if m == 0:
        assignment = _assignment_from_components(_components(_undirected_adjacency(dag)))
        return Partition(assignment, modularity(dag, assignment))

    members: dict[str, set[str]] = {i: {i} for i in dag.order}
    degree_frac: dict[str, float] = {i: 0.0 for i in dag.order}
    between: dict[str, dict[str, float]] = {i: {} for i in dag.order}
    for u, v in dag.edges:
        degree_frac[u] += 1.0 / (2 * m)
        degree_frac[v] += 1.0 / (2 * m)
        between[u][v] = between[u].get(v, 0.0) + 1.0 / (2 * m)
        between[v][u] = between[v].get(u, 0.0) + 1.0 / (2 * m)

    while len(members) > 1:
        best: tuple[float, str, str] | None = None
        for a in members:
            for b, e_ab in between[a].items():
                if b <= a:
                    continue
                gain = 2.0 * (e_ab - degree_frac[a] * degree_frac[b])
                key = (gain, a, b)
                if best is None or gain > best[0] + 1e-15 or (
                    abs(gain - best[0]) <= 1e-15 and (a, b) < (best[1], best[2])
                ):
                    best = key
        if best is None or best[0] <= 1e-15:
            break
        _, a, b = best
        # merge b into a; the merged community keeps the smaller label a
        members[a] |= members.pop(b)
        degree_frac[a] += degree_frac.pop(b)
        for c, e_bc in between.pop(b).items():
            if c == a:
                continue
            between[c].pop(b, None)
            if c in members:
                between[a][c] = between[a].get(c, 0.0) + e_bc
                between[c][a] = between[a][c]
        between[a].pop(b, None)

    assignment: dict[str, int | None] = {}
    for k, label in enumerate(sorted(members)):
        for node in members[label]:
            assignment[node] = k
    return Partition(assignment, modularity(dag, assignment))


def top_clusters(dag: ProofDag, partition: Partition, coverage: float = 0.9) -> Partition:
    """Keep the largest modules until at least ``coverage`` of nodes stay
    assigned; remaining nodes become unassigned.  Module indices are kept."""
    if not 0.0 < coverage <= 1.0:
        raise ValueError("coverage must be in (0, 1]")
    sizes = partition.module_sizes()
    total = len(partition.assignment)
    kept: set[int] = set()
    covered = 0
    for m in sorted(sizes, key=lambda m: (-sizes[m], m)):
        if covered >= coverage * total:
            break
        kept.add(m)
        covered += sizes[m]
    assignment = {
        node: (m if m in kept else UNASSIGNED)
        for node, m in partition.assignment.items()
    }
    return Partition(assignment, modularity(dag, assignment))
