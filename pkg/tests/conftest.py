import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ept_lab import ProofDag

SAMPLES = Path(__file__).parent.parent / "samples"


@pytest.fixture(scope="session")
def ev4_depth1_text() -> str:
    return (SAMPLES / "ev4_depth1.sexp").read_text()


@pytest.fixture(scope="session")
def ev4_depth2_text() -> str:
    return (SAMPLES / "ev4_depth2.sexp").read_text()


def make_clique_pair(size: int = 5, prefix_a: str = "a", prefix_b: str = "b") -> ProofDag:
    """Two complete graphs joined by one bridge edge, acyclically oriented."""
    a = [f"{prefix_a}{i:02d}" for i in range(size)]
    b = [f"{prefix_b}{i:02d}" for i in range(size)]
    edges = []
    for group in (a, b):
        for i in range(size):
            for j in range(i + 1, size):
                edges.append((group[i], group[j]))
    edges.append((a[-1], b[0]))
    nodes = {n: n for n in a + b}
    return ProofDag.from_parts(nodes, edges, theorem=b[-1])


def make_random_dag(n: int, p: float, seed: int, require_connected_theorem: bool = True) -> ProofDag:
    """Random DAG: edge i->j for i<j with probability p; last node is theorem."""
    rng = np.random.default_rng(seed)
    ids = [f"r{i:03d}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((ids[i], ids[j]))
    if require_connected_theorem and n >= 2:
        if not any(v == ids[-1] for _, v in edges):
            edges.append((ids[n - 2], ids[n - 1]))
    return ProofDag.from_parts({i: i for i in ids}, edges, theorem=ids[-1])


def make_path(n: int, prefix: str = "p") -> ProofDag:
    ids = [f"{prefix}{i:04d}" for i in range(n)]
    edges = [(ids[i], ids[i + 1]) for i in range(n - 1)]
    return ProofDag.from_parts({i: i for i in ids}, edges, theorem=ids[-1])
