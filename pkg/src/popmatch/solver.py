"""Max-size fully popular matching via iterated forbidding in the mirror graph.

The driver computes a legal stable matching of the mirror graph (one that
avoids every signed copy of a non-legal edge), then repeatedly looks for a
vertex whose left copy carries a minus tag while its right copy carries a
plus tag.  Any such vertex must have certificate entry zero in every fully
popular matching, and that forces zero across its whole popular-subgraph
component; the loop therefore forbids all plus-tagged proposals of the
component's agents, resumes the engine, and marks the component.  When no
unmarked vertex straddles the two halves any more, the upper projection is
a max-size fully popular matching, and the final sign partitions assemble
its popularity certificate.  If the engine ever runs dry, no fully popular
matching exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import EngineOutcome, ProposalSystem, resume_after_forbid
from .instance import Instance, Matching, Posts, compute_posts
from .legality import EdgeClassification, legal_edge_set
from .mirror import (
    MirrorGraph,
    MirrorMatching,
    PartitionRecord,
    build_mirror,
    classify_partition,
    mirror_blocking_edges,
    mirror_system,
    project,
    realize_witnessed,
)
from .popularity import check_a_popular, check_witness


class SolverDefect(AssertionError):
    """A structural guarantee of the algorithm failed; this is a bug, not an input error."""


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    trigger: int
    component: tuple[int, ...]
    edges_forbidden: int
    proposals_total: int


@dataclass
class SolverState:
    """Mutable working state of one solve run."""

    inst: Instance
    posts: Posts
    classification: EdgeClassification
    mirror: MirrorGraph
    system: ProposalSystem
    outcome: EngineOutcome | None = None
    edge_offsets: tuple[int, ...] = ()
    marks: list[bool] = field(default_factory=list)
    candidates: list[int] = field(default_factory=list)
    in_list: list[bool] = field(default_factory=list)
    scan_pos: int = 0
    iteration: int = 0
    # Populated when the solve finishes successfully.
    mirror_matching: MirrorMatching | None = None
    matching: Matching | None = None
    lower: Matching | None = None
    partition: PartitionRecord | None = None
    z_set: frozenset[int] = frozenset()


@dataclass(frozen=True)
class SolveReport:
    """Result of a solve: a certified matching or a nonexistence verdict.

    ``outcome`` is ``"found"`` or ``"none"``.  A found matching comes with
    its popularity certificate and is max-size among fully popular
    matchings.  A nonexistence verdict records the iteration at which the
    engine ran dry and the vertex that exhausted its options; rerunning
    reproduces it deterministically.
    """

    outcome: str
    matching: Matching | None
    witness: tuple[int, ...] | None
    size: int | None
    iterations: int
    trace: tuple[TraceRow, ...]
    fail_iteration: int | None
    infeasible_vertex: int | None
    state: SolverState | None


def _is_candidate(state: SolverState, u: int) -> bool:
    le = state.system.left_match[u]
    re = state.system.right_match[u]
    if le == -1 or re == -1:
        return False
    mirror = state.mirror
    if mirror.is_twin(le) or mirror.is_twin(re):
        return False
    return mirror.left_tag[le] < 0 and mirror.right_tag[re] > 0


def _absorb_candidates(state: SolverState, outcome: EngineOutcome) -> None:
    """Append vertices that now straddle the two halves, in id order per batch."""
    for u in sorted(set(outcome.touched_left) | set(outcome.touched_right)):
        if (
            not state.in_list[u]
            and not state.marks[u]
            and _is_candidate(state, u)
        ):
            state.in_list[u] = True
            state.candidates.append(u)


def find_unmarked(state: SolverState) -> int | None:
    """Next unmarked straddling vertex via the append-only candidate list.

    The scan pointer only moves forward: entries are skipped once they are
    marked or no longer straddle (a vertex that falls to its twin never
    straddles again), so the total scan cost is linear in appends.
    """
    while state.scan_pos < len(state.candidates):
        u = state.candidates[state.scan_pos]
        if not state.marks[u] and _is_candidate(state, u):
            return u
        state.scan_pos += 1
    return None


def _agent_plus_edges(state: SolverState, agents) -> list[int]:
    """All not-yet-forbidden plus-tagged edges at the given agents' copies."""
    inst = state.inst
    offsets = state.edge_offsets
    forbidden = state.system.forbidden
    out = []
    for a in agents:
        start = offsets[a]
        for k in range(start, start + len(inst.pref[a])):
            for e in (4 * k, 4 * k + 2):
                if not forbidden[e]:
                    out.append(e)
    return out


def _edge_offsets(inst: Instance) -> tuple[int, ...]:
    """Start index of each agent's contiguous block in the edge list."""
    offsets = []
    total = 0
    for a in inst.agent_ids():
        offsets.append(total)
        total += len(inst.pref[a])
    return tuple(offsets)


def extract_witness(state: SolverState) -> tuple[int, ...]:
    """Popularity certificate of the returned matching from the final partitions.

    Marked genuine-matched vertices and twin-matched vertices get zero;
    everything else takes the sign of its upper-half tag.  The result must
    validate; a failure here would mean the solver itself is broken.
    """
    part = state.partition
    if part is None:
        raise ValueError("solve has not finished")
    alpha = [0] * state.inst.n
    z = state.z_set
    for a in part.a_plus:
        alpha[a] = 1
    for a in part.a_minus - z:
        alpha[a] = -1
    for b in part.b_plus - z:
        alpha[b] = 1
    for b in part.b_minus:
        alpha[b] = -1
    witness = tuple(alpha)
    if not check_witness(state.inst, state.matching, witness):
        raise SolverDefect("final partitions produced an invalid certificate")
    return witness


def solve(
    inst: Instance, backend: str = "fast", validate: bool = False
) -> SolveReport:
    """Decide whether a fully popular matching exists and return a max-size one.

    ``backend`` selects how popular edges are classified (see
    :func:`popmatch.legality.popular_edges`).  With ``validate`` the run
    additionally re-checks every structural guarantee (restricted stability,
    partial symmetry, the per-half certificates, and the mirror realization
    of the result); violations raise :class:`SolverDefect`.
    """
    posts = compute_posts(inst)
    classification = legal_edge_set(inst, backend=backend)
    mirror = build_mirror(inst, classification)
    system = mirror_system(mirror)
    state = SolverState(
        inst=inst,
        posts=posts,
        classification=classification,
        mirror=mirror,
        system=system,
        edge_offsets=_edge_offsets(inst),
        marks=[False] * inst.n,
        in_list=[False] * inst.n,
    )
    trace: list[TraceRow] = []

    outcome = system.run(snapshot=False)
    state.outcome = outcome
    if not outcome.feasible:
        return _none_report(state, trace, 0, outcome)
    _absorb_candidates(state, outcome)

    while (trigger := find_unmarked(state)) is not None:
        state.iteration += 1
        cid = state.classification.component_id[trigger]
        component = state.classification.components[cid]
        comp_agents = [u for u in component if inst.is_agent(u)]
        newly = _agent_plus_edges(state, comp_agents)
        outcome = resume_after_forbid(system, outcome, newly, snapshot=False)
        state.outcome = outcome
        trace.append(
            TraceRow(
                iteration=state.iteration,
                trigger=trigger,
                component=component,
                edges_forbidden=len(newly),
                proposals_total=outcome.proposals,
            )
        )
        if not outcome.feasible:
            return _none_report(state, trace, state.iteration, outcome)
        for u in component:
            state.marks[u] = True
        _absorb_candidates(state, outcome)

    mh = MirrorMatching(
        mirror, tuple(system.left_match), tuple(system.right_match)
    )
    state.mirror_matching = mh
    state.matching = project(mh, "upper")
    state.lower = project(mh, "lower")
    state.partition = classify_partition(mh)
    unmatched = state.partition.u_agents | state.partition.u_jobs
    state.z_set = frozenset(
        u for u in range(inst.n) if state.marks[u] and u not in unmatched
    )
    witness = extract_witness(state)
    if validate:
        _validate(state, witness)
    return SolveReport(
        outcome="found",
        matching=state.matching,
        witness=witness,
        size=state.matching.size(inst),
        iterations=state.iteration,
        trace=tuple(trace),
        fail_iteration=None,
        infeasible_vertex=None,
        state=state,
    )


def _none_report(
    state: SolverState,
    trace: list[TraceRow],
    iteration: int,
    outcome: EngineOutcome,
) -> SolveReport:
    vertex = (
        outcome.offender_left
        if outcome.offender_left is not None
        else outcome.offender_right
    )
    return SolveReport(
        outcome="none",
        matching=None,
        witness=None,
        size=None,
        iterations=state.iteration,
        trace=tuple(trace),
        fail_iteration=iteration,
        infeasible_vertex=vertex,
        state=state,
    )


def _validate(state: SolverState, witness: tuple[int, ...]) -> None:
    """Re-check every structural guarantee of a successful solve."""
    inst = state.inst
    part = state.partition
    mat = state.matching
    low = state.lower
    z = state.z_set

    def ensure(cond: bool, message: str) -> None:
        if not cond:
            raise SolverDefect(message)

    ensure(
        check_a_popular(inst, state.posts, mat),
        "result is not one-sided popular",
    )

    z_agents = z & frozenset(inst.agent_ids())
    z_jobs = z - z_agents
    ensure(
        z_agents <= (part.a_minus & part.ap_plus),
        "marked matched agents escaped the minus/plus intersection",
    )
    ensure(
        z_jobs <= (part.b_plus & part.bp_minus),
        "marked matched jobs escaped the plus/minus intersection",
    )

    # Loop termination: no unmarked vertex straddles the two halves.
    for u in (part.a_minus & part.ap_plus) | (part.b_plus & part.bp_minus):
        ensure(state.marks[u], "unmarked straddling vertex at termination")

    # The two projections agree on marked matched vertices.
    for u in z:
        ensure(
            mat.partner[u] == low.partner[u],
            "upper and lower projections diverge on a marked vertex",
        )

    # Restricted stability on marked and twin-matched vertices.
    restricted = z | part.u_agents | part.u_jobs
    for a, b in inst.edges:
        if a in restricted and b in restricted:
            for proj in (mat, low):
                blocked = inst.rank_of(a, b) < inst.rank_of(
                    a, proj.partner[a]
                ) and inst.rank_of(b, a) < inst.rank_of(b, proj.partner[b])
                ensure(not blocked, "blocking edge inside the marked region")

    # Agents settled on their minus tags weakly prefer the upper projection.
    for a in (part.a_minus - z) | (part.a_plus & part.ap_plus):
        ensure(
            inst.rank_of(a, mat.partner[a]) <= inst.rank_of(a, low.partner[a]),
            "agent prefers the lower projection",
        )

    # Upper projection stays inside the sign structure.
    for a, b in mat.pairs(inst):
        ok = (
            (a in part.a_plus and b in part.b_minus)
            or (a in z and b in z)
            or (a in part.a_minus - z and b in part.b_plus - z)
        )
        ensure(ok, "matched pair escapes the sign partition")

    # Per-half certificates.
    gamma = [0] * inst.n
    for u in part.a_plus | part.b_plus:
        gamma[u] = 1
    for u in part.a_minus | part.b_minus:
        gamma[u] = -1
    scope_m = list(inst.agent_ids()) + [
        b for b in inst.job_ids() if b not in part.u_jobs
    ]
    ensure(
        check_witness(inst, mat, gamma, vertices=scope_m),
        "upper-half certificate failed off the twin-matched jobs",
    )
    beta = [0] * inst.n
    for u in part.ap_plus | part.bp_plus:
        beta[u] = 1
    for u in part.ap_minus | part.bp_minus:
        beta[u] = -1
    scope_l = [a for a in inst.agent_ids() if a not in part.u_agents] + list(
        inst.job_ids()
    )
    ensure(
        check_witness(inst, low, beta, vertices=scope_l),
        "lower-half certificate failed off the twin-matched agents",
    )

    # The full certificate must also realize to a legal stable mirror matching.
    realization = realize_witnessed(state.mirror, mat, witness)
    ensure(
        not mirror_blocking_edges(realization),
        "realization of the result is unstable in the mirror graph",
    )
    ensure(
        not realization.uses_forbidden(),
        "realization of the result uses a forbidden edge",
    )
