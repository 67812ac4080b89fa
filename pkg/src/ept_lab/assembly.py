"""Synthetic proof-network growth by dependency choice plus link copying.

Each new claim draws how many claims it depends on, picks them uniformly among
existing claims, then also links to each dependency of a picked claim with a
fixed copy probability.  The copying step is what produces the heavy-tailed
usage (out-degree) distribution; the direct draws keep dependency counts
(in-degree) short-tailed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import ProofDag


@dataclass(frozen=True)
class AssemblyParams:
    """Defaults are tuned so a 10^4-node graph shows the usage power-law tail
    with exponent near 2 alongside a short-tailed dependency-count law."""

    n_nodes: int
    mean_deps: float = 6.0
    copy_prob: float = 0.15
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        # Every claim after the first depends on at least one prior claim
        # (the first node is the sole axiom), so the dependency-count draw is
        # geometric on {1, 2, ...} and its mean must be at least 1.
        if self.mean_deps < 1.0:
            raise ValueError("mean_deps must be >= 1")
        if not 0.0 <= self.copy_prob <= 1.0:
            raise ValueError("copy_prob must be in [0, 1]")


def _node_id(k: int, width: int) -> str:
    return f"n{k:0{width}d}"


def generate(params: AssemblyParams) -> ProofDag:
    """Grow a DAG; deterministic given the seed.

    Node ids are zero-padded in creation order, edges always run from an
    earlier node to a later one, the first node is the sole axiom and the
    last is the designated theorem.
    """
    n = params.n_nodes
    width = max(6, len(str(n - 1)))
    rng = np.random.default_rng(params.seed)
    p_geom = 1.0 / params.mean_deps
    q = params.copy_prob

    deps: list[np.ndarray] = [np.empty(0, dtype=np.int64)]
    for k in range(1, n):
        want = min(int(rng.geometric(p_geom)), k)
        chosen = rng.choice(k, size=want, replace=False)
        links = set(int(t) for t in chosen)
        if q > 0.0:
            for t in chosen:
                cand = deps[int(t)]
                if cand.size:
                    links.update(int(u) for u in cand[rng.random(cand.size) < q])
        deps.append(np.fromiter(sorted(links), dtype=np.int64, count=len(links)))

    nodes = {_node_id(k, width): _node_id(k, width) for k in range(n)}
    edges = [
        (_node_id(int(u), width), _node_id(k, width))
        for k in range(1, n)
        for u in deps[k]
    ]
    theorem = _node_id(n - 1, width)
    return ProofDag.from_parts(nodes, edges, theorem)
