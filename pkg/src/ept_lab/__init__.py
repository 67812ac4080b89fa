"""Proof dependency networks: ingestion, topology statistics, community
structure, and belief-dynamics experiments."""

__version__ = "0.1.0"

from .graph import (  # noqa: F401
    AmbiguousTheoremError,
    CycleError,
    DagError,
    DegreeTable,
    EdgeListParseError,
    NodeRoles,
    ProofDag,
    classify_roles,
    degrees,
    from_edge_list,
    from_json_str,
    resolve_theorem,
    to_dot,
    to_edge_list_str,
    to_json_str,
    truncate_by_depth,
)
from .sexpr import (  # noqa: F401
    DefinitionForest,
    DuplicateNameError,
    SexprParseError,
    TermTree,
    alpha_number,
    ingest_text,
    parse_sexpr,
    reify_dag,
)
from .assembly import AssemblyParams, generate  # noqa: F401
from .netstats import (  # noqa: F401
    DegenerateSampleError,
    ExponentialFit,
    InsufficientDataError,
    PowerLawFit,
    degree_histogram,
    fit_exponential,
    fit_power_law,
    geometric_ks,
)
from .communities import (  # noqa: F401
    Partition,
    edge_betweenness,
    girvan_newman,
    greedy_modularity,
    modularity,
    top_clusters,
)
from .belief import (  # noqa: F401
    BeliefState,
    BeliefSummary,
    ChainSchedule,
    CouplingParams,
    PriorMode,
    beta_from_epsilon,
    energy,
    epsilon_from_beta,
    flip_penalty,
    heuristic_step,
    local_field,
    run_chain,
    sample_states,
)
from .experiments import (  # noqa: F401
    FirewallConfigError,
    FirewallReport,
    GridResult,
    SweepResult,
    abductive_grid,
    ept_sweep,
    firewall_delta,
    prior_response,
)
