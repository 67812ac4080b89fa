"""Belief dynamics on dependency DAGs with asymmetric couplings.

Every claim carries a binary truth assessment, spin +1 (believed true) or -1
(believed false).  A claim feels its dependencies with strength ``beta_dep``
and its dependents with strength ``beta_imp``; because the two directions may
differ there is no global energy for the dynamics, and updates use the
Metropolis rule on the local-objective change ``2 * s * f`` where ``f`` is the
local field.  Reliability maps to couplings via ``eps = 1 / (1 + exp(2*beta))``
(so for a single dependency link the odds that a claim agrees with its premise
are ``exp(2*beta_dep)``).

The degree of belief in a claim is the fraction of time it spends believed
true, averaged over samples and independent replicas.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np
from numba import njit

from .graph import ProofDag, classify_roles

# Updates drawn per kernel call; bounds the size of pregenerated RNG arrays.
_CHUNK = 1 << 20


class PriorMode(Enum):
    """How the charitable prior enters: as a persistent per-node field, or
    only through the biased initial state."""

    FIELD = "field"
    INIT_ONLY = "init-only"


def beta_from_epsilon(eps: float) -> float:
    """Coupling strength implied by a one-step error rate in (0, 1/2]."""
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"error rate must be in (0, 0.5], got {eps}")
    return 0.5 * math.log((1.0 - eps) / eps)


def epsilon_from_beta(beta: float) -> float:
    """One-step error rate implied by a coupling strength >= 0."""
    if beta < 0.0:
        raise ValueError(f"coupling must be >= 0, got {beta}")
    return 1.0 / (1.0 + math.exp(2.0 * beta))


def prior_field(p_prior: float) -> float:
    return 0.5 * math.log(p_prior / (1.0 - p_prior))


@dataclass(frozen=True)
class CouplingParams:
    beta_dep: float
    beta_imp: float
    p_prior: float = 0.75
    prior_mode: PriorMode = PriorMode.FIELD

    def __post_init__(self) -> None:
        if self.beta_dep < 0.0 or self.beta_imp < 0.0:
            raise ValueError("coupling strengths must be >= 0")
        if not 0.0 < self.p_prior < 1.0:
            raise ValueError("p_prior must be in (0, 1)")

    @classmethod
    def from_error_rates(
        cls,
        eps_dep: float,
        eps_imp: float,
        p_prior: float = 0.75,
        prior_mode: PriorMode = PriorMode.FIELD,
    ) -> "CouplingParams":
        return cls(
            beta_from_epsilon(eps_dep), beta_from_epsilon(eps_imp), p_prior, prior_mode
        )

    @property
    def field(self) -> float:
        """Per-node prior field h; zero unless the prior acts as a field."""
        if self.prior_mode is PriorMode.FIELD:
            return prior_field(self.p_prior)
        return 0.0

    @property
    def eps_dep(self) -> float:
        return epsilon_from_beta(self.beta_dep)

    @property
    def eps_imp(self) -> float:
        return epsilon_from_beta(self.beta_imp)


@dataclass
class BeliefState:
    """Spin assignment aligned with ``dag.order`` (+1 believed true)."""

    spins: np.ndarray

    @classmethod
    def from_prior(cls, dag: ProofDag, p_prior: float, rng: np.random.Generator) -> "BeliefState":
        spins = np.where(rng.random(dag.n_nodes) < p_prior, 1, -1).astype(np.int8)
        return cls(spins)

    @classmethod
    def uniform(cls, dag: ProofDag, value: int = 1) -> "BeliefState":
        if value not in (-1, 1):
            raise ValueError("spin value must be -1 or +1")
        return cls(np.full(dag.n_nodes, value, dtype=np.int8))

    def copy(self) -> "BeliefState":
        return BeliefState(self.spins.copy())


def local_field(
    dag: ProofDag, state: BeliefState, params: CouplingParams, node: str
) -> float:
    """h + beta_dep * sum(dependency spins) + beta_imp * sum(dependent spins)."""
    dep_ptr, dep_idx, use_ptr, use_idx = dag._adjacency
    k = dag.index[node]
    s = state.spins
    f = params.field
    f += params.beta_dep * float(s[dep_idx[dep_ptr[k]:dep_ptr[k + 1]]].sum())
    f += params.beta_imp * float(s[use_idx[use_ptr[k]:use_ptr[k + 1]]].sum())
    return f


@njit(cache=True, nogil=True)
def _mh_kernel(spins, dep_ptr, dep_idx, use_ptr, use_idx, b_dep, b_imp, h, picks, unifs):
    for t in range(picks.shape[0]):
        i = picks[t]
        f = h
        for a in range(dep_ptr[i], dep_ptr[i + 1]):
            f += b_dep * spins[dep_idx[a]]
        for a in range(use_ptr[i], use_ptr[i + 1]):
            f += b_imp * spins[use_idx[a]]
        d = 2.0 * spins[i] * f
        if d <= 0.0 or unifs[t] < np.exp(-d):
            spins[i] = -spins[i]


@njit(cache=True, nogil=True)
def _mh_sample_kernel(
    spins, dep_ptr, dep_idx, use_ptr, use_idx, b_dep, b_imp, h,
    picks, unifs, period, counts_first, counts_second, start_sample, half,
):
    """Run whole sample blocks (``period`` updates each), accumulating
    believed-true counts after every block; avoids one kernel call per sample."""
    n_blocks = picks.shape[0] // period
    for b in range(n_blocks):
        base = b * period
        for t in range(base, base + period):
            i = picks[t]
            f = h
            for a in range(dep_ptr[i], dep_ptr[i + 1]):
                f += b_dep * spins[dep_idx[a]]
            for a in range(use_ptr[i], use_ptr[i + 1]):
                f += b_imp * spins[use_idx[a]]
            d = 2.0 * spins[i] * f
            if d <= 0.0 or unifs[t] < np.exp(-d):
                spins[i] = -spins[i]
        target = counts_first if start_sample + b < half else counts_second
        for k in range(spins.shape[0]):
            if spins[k] > 0:
                target[k] += 1


def heuristic_step(
    dag: ProofDag, state: BeliefState, params: CouplingParams, rng: np.random.Generator
) -> BeliefState:
    """One Metropolis update of a uniformly chosen node, in place."""
    pick = np.asarray([rng.integers(0, dag.n_nodes)], dtype=np.int64)
    unif = rng.random(1)
    dep_ptr, dep_idx, use_ptr, use_idx = dag._adjacency
    _mh_kernel(
        state.spins, dep_ptr, dep_idx, use_ptr, use_idx,
        params.beta_dep, params.beta_imp, params.field, pick, unif,
    )
    return state


def _run_updates(
    dag: ProofDag,
    state: BeliefState,
    params: CouplingParams,
    n_updates: int,
    rng: np.random.Generator,
) -> None:
    dep_ptr, dep_idx, use_ptr, use_idx = dag._adjacency
    done = 0
    while done < n_updates:
        block = min(_CHUNK, n_updates - done)
        picks = rng.integers(0, dag.n_nodes, size=block, dtype=np.int64)
        unifs = rng.random(block)
        _mh_kernel(
            state.spins, dep_ptr, dep_idx, use_ptr, use_idx,
            params.beta_dep, params.beta_imp, params.field, picks, unifs,
        )
        done += block


@dataclass(frozen=True)
class ChainSchedule:
    burn_in_sweeps: int = 200
    n_samples: int = 1000
    sample_stride_sweeps: int = 2
    n_replicas: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("burn_in_sweeps", "n_samples", "sample_stride_sweeps", "n_replicas"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


@dataclass(frozen=True)
class BeliefSummary:
    """Time-averaged per-node beliefs plus aggregates and a convergence
    diagnostic (largest aggregate difference between the two sample halves)."""

    node_ids: tuple[str, ...]
    beliefs: np.ndarray
    mean_belief: float
    theorem_belief: float
    axiom_belief: float
    split_half_discrepancy: float
    replica_theorem_beliefs: tuple[float, ...]

    def belief_of(self, node_id: str) -> float:
        return float(self.beliefs[self.node_ids.index(node_id)])

    @property
    def theorem_stderr(self) -> float:
        reps = np.asarray(self.replica_theorem_beliefs)
        if reps.size < 2:
            return float("nan")
        return float(reps.std(ddof=1) / math.sqrt(reps.size))


def _replica_counts(
    dag: ProofDag, params: CouplingParams, schedule: ChainSchedule, replica: int,
    collect_states: bool,
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Run one replica; returns (first-half, second-half) believed-true counts
    per node, plus sampled spin snapshots when requested."""
    n = dag.n_nodes
    rng = np.random.default_rng([schedule.seed, replica])
    state = BeliefState.from_prior(dag, params.p_prior, rng)
    _run_updates(dag, state, params, schedule.burn_in_sweeps * n, rng)
    half = schedule.n_samples // 2
    counts = np.zeros((2, n), dtype=np.int64)
    states: list[np.ndarray] = []
    if collect_states:
        for s in range(schedule.n_samples):
            _run_updates(dag, state, params, schedule.sample_stride_sweeps * n, rng)
            counts[0 if s < half else 1] += state.spins > 0
            states.append(state.spins.copy())
        return counts[0], counts[1], states

    dep_ptr, dep_idx, use_ptr, use_idx = dag._adjacency
    period = schedule.sample_stride_sweeps * n
    per_call = max(1, _CHUNK // period)
    done = 0
    while done < schedule.n_samples:
        take = min(per_call, schedule.n_samples - done)
        picks = rng.integers(0, n, size=take * period, dtype=np.int64)
        unifs = rng.random(take * period)
        _mh_sample_kernel(
            state.spins, dep_ptr, dep_idx, use_ptr, use_idx,
            params.beta_dep, params.beta_imp, params.field,
            picks, unifs, period, counts[0], counts[1], done, half,
        )
        done += take
    return counts[0], counts[1], states


def _thread_count(threads: int | None, n_tasks: int) -> int:
    if threads is None:
        env = os.environ.get("EPT_LAB_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(threads, n_tasks))


def run_chain(
    dag: ProofDag,
    params: CouplingParams,
    schedule: ChainSchedule = ChainSchedule(),
    threads: int | None = None,
) -> BeliefSummary:
    """Estimate equilibrium beliefs with independent replicas.

    Each replica initializes every node believed-true with probability
    ``p_prior``, discards the burn-in, then averages believed-true indicators
    over samples; results are deterministic given the schedule seed and
    independent of the thread count (replica streams are seeded by
    ``(seed, replica)``).
    """
    if dag.n_nodes == 0:
        raise ValueError("cannot run a chain on an empty graph")
    roles = classify_roles(dag)
    n_workers = _thread_count(threads, schedule.n_replicas)
    task = lambda r: _replica_counts(dag, params, schedule, r, False)  # noqa: E731
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(task, range(schedule.n_replicas)))
    else:
        results = [task(r) for r in range(schedule.n_replicas)]

    half = schedule.n_samples // 2
    first = np.zeros(dag.n_nodes, dtype=np.int64)
    second = np.zeros(dag.n_nodes, dtype=np.int64)
    theorem_idx = dag.index[roles.theorem]
    per_replica_theorem = []
    for f, s, _ in results:
        first += f
        second += s
        per_replica_theorem.append((f[theorem_idx] + s[theorem_idx]) / schedule.n_samples)

    total = schedule.n_samples * schedule.n_replicas
    beliefs = (first + second) / total
    axiom_idx = np.asarray(sorted(dag.index[a] for a in roles.axioms), dtype=np.int64)

    def aggregates(b: np.ndarray) -> tuple[float, float, float]:
        mean_all = float(b.mean())
        theorem = float(b[theorem_idx])
        axioms = float(b[axiom_idx].mean()) if axiom_idx.size else float("nan")
        return mean_all, theorem, axioms

    mean_all, theorem_belief, axiom_belief = aggregates(beliefs)
    if half >= 1 and schedule.n_samples - half >= 1:
        agg_a = aggregates(first / (half * schedule.n_replicas))
        agg_b = aggregates(second / ((schedule.n_samples - half) * schedule.n_replicas))
        pairs = [(a, b) for a, b in zip(agg_a, agg_b) if not (math.isnan(a) or math.isnan(b))]
        discrepancy = max(abs(a - b) for a, b in pairs)
    else:
        discrepancy = float("nan")
    return BeliefSummary(
        node_ids=dag.order,
        beliefs=beliefs,
        mean_belief=mean_all,
        theorem_belief=theorem_belief,
        axiom_belief=axiom_belief,
        split_half_discrepancy=discrepancy,
        replica_theorem_beliefs=tuple(per_replica_theorem),
    )


def sample_states(
    dag: ProofDag,
    params: CouplingParams,
    schedule: ChainSchedule = ChainSchedule(),
    threads: int | None = None,
) -> list[np.ndarray]:
    """Equilibrium spin snapshots (all replicas, in replica order)."""
    n_workers = _thread_count(threads, schedule.n_replicas)
    task = lambda r: _replica_counts(dag, params, schedule, r, True)  # noqa: E731
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(task, range(schedule.n_replicas)))
    else:
        results = [task(r) for r in range(schedule.n_replicas)]
    states: list[np.ndarray] = []
    for _, _, snaps in results:
        states.extend(snaps)
    return states


# -- symmetric energy accounting -------------------------------------------------


def energy(
    dag: ProofDag, state: BeliefState | np.ndarray, beta: float, h: float = 0.0
) -> float:
    """Symmetric log-likelihood functional: E = -beta * sum(s_i s_j) - h * sum(s).

    Each edge counts once; lower energy means higher likelihood.  Used for
    firewall accounting, where couplings are symmetric.
    """
    s = state.spins if isinstance(state, BeliefState) else state
    u, v = dag.edge_index_arrays
    pair = float((s[u].astype(np.int64) * s[v]).sum()) if u.size else 0.0
    return -beta * pair - h * float(s.astype(np.int64).sum())


def flip_penalty(
    dag: ProofDag,
    state: BeliefState | np.ndarray,
    beta: float,
    nodes: Iterable[str],
    h: float = 0.0,
) -> float:
    """Energy change from flipping all listed spins simultaneously.

    Computed incrementally from boundary edges: an edge contributes only when
    exactly one endpoint flips.
    """
    s = state.spins if isinstance(state, BeliefState) else state
    flip = np.zeros(dag.n_nodes, dtype=bool)
    for node in nodes:
        flip[dag.index[node]] = True
    u, v = dag.edge_index_arrays
    if u.size:
        boundary = flip[u] ^ flip[v]
        pair = float((s[u[boundary]].astype(np.int64) * s[v[boundary]]).sum())
    else:
        pair = 0.0
    return 2.0 * beta * pair + 2.0 * h * float(s[flip].astype(np.int64).sum())
