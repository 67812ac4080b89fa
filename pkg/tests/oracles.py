"""Brute-force reference implementations the tests check the library against.

Everything here is deliberately independent of the library code paths it
verifies: exact enumeration instead of sampling, path enumeration instead of
Brandes accumulation, direct energy recomputation instead of incremental
boundary sums, table inversion instead of fitted CDFs.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def gibbs_marginals(dag, beta: float, h: float) -> np.ndarray:
    """Exact P(spin=+1) per node for weight exp(beta*sum_edges s_u s_v + h*sum s),
    by summation over all 2^N states.  Aligned with dag.order."""
    n = dag.n_nodes
    assert n <= 20
    states = (((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1) * 2 - 1).astype(np.int8)
    idx = dag.index
    logw = np.zeros(2 ** n)
    for a, b in dag.edges:
        logw += beta * states[:, idx[a]] * states[:, idx[b]]
    logw += h * states.sum(axis=1)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    return ((states > 0) * w[:, None]).sum(axis=0)


def gibbs_state_probs(dag, beta: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """(states, probabilities) for the same exact distribution."""
    n = dag.n_nodes
    states = (((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1) * 2 - 1).astype(np.int8)
    idx = dag.index
    logw = np.zeros(2 ** n)
    for a, b in dag.edges:
        logw += beta * states[:, idx[a]] * states[:, idx[b]]
    logw += h * states.sum(axis=1)
    w = np.exp(logw - logw.max())
    return states, w / w.sum()


def direct_energy(dag, spins: np.ndarray, beta: float, h: float = 0.0) -> float:
    """-beta * sum over edges of s_u s_v  -  h * sum of spins, term by term."""
    idx = dag.index
    total = 0.0
    for a, b in dag.edges:
        total -= beta * float(spins[idx[a]]) * float(spins[idx[b]])
    for k in range(dag.n_nodes):
        total -= h * float(spins[k])
    return total


def powerlaw_sample(
    alpha: float, d_min: int, size: int, rng: np.random.Generator, cap: int = 10 ** 5
) -> np.ndarray:
    """Discrete power-law sample via inverse-CDF table lookup.

    The law is truncated at ``cap``; for alpha > 2 and cap = 1e5 the clipped
    mass is ~1e-6, negligible against the fitting tolerances used in tests.
    """
    support = np.arange(d_min, cap + 1, dtype=np.float64)
    weights = support ** (-alpha)
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    u = rng.random(size)
    return (np.searchsorted(cdf, u) + d_min).astype(np.int64)


def brute_edge_betweenness(adj: dict[str, list[str]]) -> dict[tuple[str, str], float]:
    """Betweenness by explicitly enumerating every shortest path per pair."""
    nodes = sorted(adj)
    scores: dict[tuple[str, str], float] = {}
    for u in nodes:
        for v in adj[u]:
            if u < v:
                scores[(u, v)] = 0.0

    def shortest_paths(s: str, t: str) -> list[list[str]]:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if t not in dist:
            return []
        paths: list[list[str]] = []

        def extend(path: list[str]) -> None:
            last = path[-1]
            if last == t:
                paths.append(list(path))
                return
            for y in adj[last]:
                if dist.get(y) == dist[last] + 1 and dist[y] <= dist[t]:
                    path.append(y)
                    extend(path)
                    path.pop()

        extend([s])
        return paths

    for i, s in enumerate(nodes):
        for t in nodes[i + 1:]:
            paths = shortest_paths(s, t)
            if not paths:
                continue
            share = 1.0 / len(paths)
            for path in paths:
                for a, b in zip(path, path[1:]):
                    key = (a, b) if a < b else (b, a)
                    scores[key] += share
    return scores


def all_partitions(items: list[str]):
    """Every set partition of ``items`` as a node->group-index dict."""
    n = len(items)
    if n == 0:
        yield {}
        return
    codes = [0] * n

    def rec(i: int, n_groups: int):
        if i == n:
            yield dict(zip(items, codes))
            return
        for g in range(n_groups + 1):
            codes[i] = g
            yield from rec(i + 1, max(n_groups, g + 1))

    yield from rec(1, 1)


def distinct_subtrees(tree) -> dict[str, set[str]]:
    """Canonical string of every distinct subtree -> set of distinct parent
    canonical strings.  The brute-force mirror of structural sharing."""

    def canon(t) -> str:
        if not t.children:
            return t.label
        return "(" + " ".join([t.label] + [canon(c) for c in t.children]) + ")"

    parents: dict[str, set[str]] = {}
    stack = [tree]
    while stack:
        node = stack.pop()
        ckey = canon(node)
        parents.setdefault(ckey, set())
        for child in node.children:
            parents.setdefault(canon(child), set()).add(ckey)
            stack.append(child)
    return parents


def modularity_direct(dag, assignment) -> float:
    """Textbook undirected modularity sum over the adjacency matrix."""
    m = dag.n_edges
    if m == 0:
        return 0.0
    nodes = list(dag.order)
    idx = dag.index
    a = np.zeros((len(nodes), len(nodes)))
    for u, v in dag.edges:
        a[idx[u], idx[v]] += 1
        a[idx[v], idx[u]] += 1
    k = a.sum(axis=1)
    q = 0.0
    for i, u in enumerate(nodes):
        for j, v in enumerate(nodes):
            gu = assignment.get(u)
            gv = assignment.get(v)
            same = (gu is not None and gu == gv) or (gu is None and i == j)
            if same:
                q += a[i, j] - k[i] * k[j] / (2 * m)
    return q / (2 * m)
