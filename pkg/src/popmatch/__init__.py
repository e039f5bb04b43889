"""Fully popular matchings: solver, certificates, and cross-validation oracle."""

from .instance import (
    Instance,
    InstanceError,
    Matching,
    Posts,
    compute_posts,
    format_matching,
    parse_instance,
    parse_matching,
    run_election,
    serialize_instance,
    vote,
)
from .engine import (
    EngineOutcome,
    ProposalSystem,
    blocking_edges,
    is_stable_pair,
    propose_dispose,
    resume_after_forbid,
    stable_matching,
    stable_vertices,
)
from .popularity import (
    PopularityVerdict,
    check_a_popular,
    check_witness,
    edge_weight,
    verify_popular,
    wt_total,
)
from .legality import (
    EdgeClassification,
    legal_edge_set,
    popular_edges,
    valid_edges,
)
from .mirror import (
    MirrorGraph,
    MirrorMatching,
    PartitionRecord,
    build_mirror,
    classify_partition,
    embed_stable,
    mirror_blocking_edges,
    project,
    realize_witnessed,
)
from .solver import SolveReport, SolverDefect, extract_witness, find_unmarked, solve
from .oracle import (
    OracleCapError,
    OracleReport,
    enumerate_matchings,
    ground_truth,
    witness_search,
)
from .generator import generate

__all__ = [
    "EdgeClassification",
    "EngineOutcome",
    "Instance",
    "InstanceError",
    "Matching",
    "MirrorGraph",
    "MirrorMatching",
    "OracleCapError",
    "OracleReport",
    "PartitionRecord",
    "PopularityVerdict",
    "Posts",
    "ProposalSystem",
    "SolveReport",
    "SolverDefect",
    "blocking_edges",
    "build_mirror",
    "check_a_popular",
    "check_witness",
    "classify_partition",
    "compute_posts",
    "edge_weight",
    "embed_stable",
    "enumerate_matchings",
    "extract_witness",
    "find_unmarked",
    "format_matching",
    "generate",
    "ground_truth",
    "is_stable_pair",
    "legal_edge_set",
    "mirror_blocking_edges",
    "parse_instance",
    "parse_matching",
    "popular_edges",
    "project",
    "propose_dispose",
    "realize_witnessed",
    "resume_after_forbid",
    "run_election",
    "serialize_instance",
    "solve",
    "stable_matching",
    "stable_vertices",
    "valid_edges",
    "verify_popular",
    "vote",
    "witness_search",
    "wt_total",
]
