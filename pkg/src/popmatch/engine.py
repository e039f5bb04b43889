"""Generic proposer/disposer engine with forbidden edges and resumable state.

The engine runs one-sided proposals over ranked edge lists.  Left vertices
consume their lists monotonically; right vertices keep a threshold rank and
never accept a proposal along an edge worse than one they have already seen.
A proposal along a forbidden edge is rejected, and that rejection also
deletes every worse edge at the receiving vertex, including a currently held
one.  The same machinery therefore serves plain stable matching, stable
matching that must avoid a forbidden edge set, and truncated runs used for
stable-pair queries.

Re-forbidding edges after a run and resuming is equivalent to a fresh run
with the enlarged forbidden set, and total work over any forbid/resume
sequence stays linear in the summed list lengths.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .instance import Instance, InstanceError, Matching

INFINITE_RANK = 1 << 60


@dataclass(frozen=True)
class EngineOutcome:
    """Snapshot of an engine run.

    ``feasible`` is False when some left vertex exhausted its list or some
    right vertex ended unmatched after rejecting a forbidden proposal it
    would otherwise have taken; either way no stable matching avoiding the
    forbidden edges exists.  ``left_edge[u]`` / ``right_edge[r]`` hold the
    matched edge id or -1.
    """

    feasible: bool
    offender_left: int | None
    offender_right: int | None
    left_edge: tuple[int, ...]
    right_edge: tuple[int, ...]
    proposals: int
    rejections: int
    touched_left: tuple[int, ...]
    touched_right: tuple[int, ...]


class ProposalSystem:
    """Ranked proposal lists on the left, threshold acceptance on the right.

    Edges are dense ids.  ``left_lists[u]`` orders u's edges from best to
    worst; ``edge_right[e]`` is the receiving right vertex, or -1 for a
    private always-accepting sink (the "stay alone" option).  ``right_rank``
    orders each right vertex's incident edges (lower is better).  Initial
    right cutoffs implement list truncation: a right vertex never accepts an
    edge ranked at or beyond its cutoff.
    """

    def __init__(
        self,
        num_left: int,
        num_right: int,
        left_lists: list[tuple[int, ...]],
        edge_left: list[int],
        edge_right: list[int],
        right_rank: list[int],
        forbidden=(),
        right_cut_init: dict[int, int] | None = None,
    ):
        self.num_left = num_left
        self.num_right = num_right
        self.left_lists = left_lists
        self.edge_left = edge_left
        self.edge_right = edge_right
        self.right_rank = right_rank
        num_edges = len(edge_left)
        self.forbidden = [False] * num_edges
        self.has_forbidden = False
        for e in forbidden:
            self.forbidden[e] = True
            self.has_forbidden = True
        self.total_list_length = sum(len(row) for row in left_lists)
        self._reset(right_cut_init)

    def _reset(self, right_cut_init: dict[int, int] | None = None) -> None:
        self.next_i = [0] * self.num_left
        self.left_match = [-1] * self.num_left
        self.right_match = [-1] * self.num_right
        self.right_cut = [INFINITE_RANK] * self.num_right
        if right_cut_init:
            for r, cut in right_cut_init.items():
                self.right_cut[r] = cut
        self.starved: set[int] = set()
        self.queue: deque[int] = deque(range(self.num_left))
        self.proposals = 0
        self.rejections = 0
        self.exhausted_left: int | None = None

    def clone_fresh(
        self, right_cut_init: dict[int, int] | None = None
    ) -> "ProposalSystem":
        """Unrun copy sharing this system's topology and forbidden marks.

        Cheap relative to rebuilding: ranked lists and edge tables are
        shared, only the per-run state is allocated.
        """
        clone = ProposalSystem.__new__(ProposalSystem)
        clone.num_left = self.num_left
        clone.num_right = self.num_right
        clone.left_lists = self.left_lists
        clone.edge_left = self.edge_left
        clone.edge_right = self.edge_right
        clone.right_rank = self.right_rank
        clone.forbidden = list(self.forbidden)
        clone.has_forbidden = self.has_forbidden
        clone.total_list_length = self.total_list_length
        clone._reset(right_cut_init)
        return clone

    def probe_truncation(self, r: int, cut: int) -> int:
        """Matched edge at right vertex r once its cutoff tightens to ``cut``.

        Runs the rejection cascade directly on the settled state and rolls
        every mutation back before returning, so a probe costs only its
        cascade, not a fresh run.  Tightening a cutoff after the fact is
        equivalent to having started with it: both ways the same edges get
        deleted.  Only valid on quiescent systems without forbidden edges.
        """
        if self.queue or self.exhausted_left is not None:
            raise ValueError("probe requires a settled feasible system")
        if self.has_forbidden:
            raise ValueError("probe does not support forbidden edges")
        next_i = self.next_i
        left_match = self.left_match
        right_match = self.right_match
        right_cut = self.right_cut
        log: list[tuple[list, int, int]] = []

        def put(arr: list, idx: int, value: int) -> None:
            log.append((arr, idx, arr[idx]))
            arr[idx] = value

        queue = []
        put(right_cut, r, cut)
        cur = right_match[r]
        if cur != -1 and self.right_rank[cur] >= cut:
            put(right_match, r, -1)
            u = self.edge_left[cur]
            put(left_match, u, -1)
            put(next_i, u, next_i[u] + 1)
            queue.append(u)
        while queue:
            u = queue.pop()
            while True:
                i = next_i[u]
                if i >= len(self.left_lists[u]):
                    raise AssertionError(
                        "left vertex ran dry during a truncation probe"
                    )
                e = self.left_lists[u][i]
                rr = self.edge_right[e]
                if rr == -1:
                    put(left_match, u, e)
                    break
                rank = self.right_rank[e]
                if rank >= right_cut[rr]:
                    put(next_i, u, i + 1)
                    continue
                cur = right_match[rr]
                if cur != -1:
                    u2 = self.edge_left[cur]
                    put(left_match, u2, -1)
                    put(next_i, u2, next_i[u2] + 1)
                    queue.append(u2)
                put(right_match, rr, e)
                put(right_cut, rr, rank)
                put(left_match, u, e)
                break
        answer = right_match[r]
        for arr, idx, old in reversed(log):
            arr[idx] = old
        return answer

    def _divorce(self, edge: int, touched_left: dict) -> None:
        u = self.edge_left[edge]
        self.left_match[u] = -1
        self.next_i[u] += 1
        self.queue.append(u)
        self.rejections += 1
        touched_left[u] = None

    def run(self, snapshot: bool = True) -> EngineOutcome:
        """Drain the proposal queue and report the resulting state.

        ``snapshot=False`` skips materializing the full per-vertex match
        arrays in the outcome (they come back empty); repeated resumes over
        large systems stay linear that way, and callers read the live state
        or take one snapshot at the end.
        """
        touched_left: dict[int, None] = {}
        touched_right: dict[int, None] = {}
        if self.exhausted_left is not None:
            return self._outcome(touched_left, touched_right, snapshot)

        while self.queue:
            u = self.queue.popleft()
            if self.left_match[u] != -1:
                continue
            while True:
                i = self.next_i[u]
                if i >= len(self.left_lists[u]):
                    self.exhausted_left = u
                    touched_left[u] = None
                    return self._outcome(touched_left, touched_right, snapshot)
                e = self.left_lists[u][i]
                self.proposals += 1
                r = self.edge_right[e]
                if r == -1:
                    if self.forbidden[e]:
                        self.next_i[u] += 1
                        self.rejections += 1
                        continue
                    self.left_match[u] = e
                    touched_left[u] = None
                    break
                rank = self.right_rank[e]
                if rank >= self.right_cut[r]:
                    self.next_i[u] += 1
                    self.rejections += 1
                    continue
                if self.forbidden[e]:
                    # An in-range forbidden proposal deletes every worse
                    # edge here, including the currently held one.
                    self.right_cut[r] = rank
                    cur = self.right_match[r]
                    if cur != -1:
                        self.right_match[r] = -1
                        self._divorce(cur, touched_left)
                        touched_right[r] = None
                    self.starved.add(r)
                    self.next_i[u] += 1
                    self.rejections += 1
                    continue
                cur = self.right_match[r]
                if cur != -1:
                    self._divorce(cur, touched_left)
                self.right_match[r] = e
                self.right_cut[r] = rank
                self.starved.discard(r)
                self.left_match[u] = e
                touched_left[u] = None
                touched_right[r] = None
                break
        return self._outcome(touched_left, touched_right, snapshot)

    def forbid(self, edges) -> None:
        """Mark edges forbidden, divorcing any that are currently matched."""
        touched: dict[int, None] = {}
        for e in edges:
            if self.forbidden[e]:
                continue
            self.forbidden[e] = True
            self.has_forbidden = True
            u = self.edge_left[e]
            if self.left_match[u] != e:
                continue
            r = self.edge_right[e]
            if r != -1:
                # From scratch this proposal would have been an in-range
                # forbidden rejection, so replicate that state exactly.
                self.right_match[r] = -1
                self.starved.add(r)
            self._divorce(e, touched)

    def _outcome(
        self, touched_left, touched_right, snapshot: bool = True
    ) -> EngineOutcome:
        feasible = self.exhausted_left is None and not self.starved
        offender_right = (
            min(self.starved)
            if self.exhausted_left is None and self.starved
            else None
        )
        return EngineOutcome(
            feasible=feasible,
            offender_left=self.exhausted_left,
            offender_right=offender_right,
            left_edge=tuple(self.left_match) if snapshot else (),
            right_edge=tuple(self.right_match) if snapshot else (),
            proposals=self.proposals,
            rejections=self.rejections,
            touched_left=tuple(touched_left),
            touched_right=tuple(touched_right),
        )


def propose_dispose(system: ProposalSystem) -> EngineOutcome:
    """Run the engine to quiescence from its current state."""
    return system.run()


def resume_after_forbid(
    system: ProposalSystem,
    outcome: EngineOutcome,
    newly_forbidden,
    snapshot: bool = True,
) -> EngineOutcome:
    """Forbid more edges and continue; equivalent to a fresh run with them all.

    ``outcome`` must be the system's most recent result.
    """
    if outcome.proposals != system.proposals:
        raise ValueError("outcome does not match the system's current state")
    system.forbid(newly_forbidden)
    return system.run(snapshot)


@dataclass(frozen=True)
class SystemHandle:
    """A proposal system over an instance plus the id bookkeeping around it."""

    inst: Instance
    system: ProposalSystem
    left_ids: tuple[int, ...]
    right_ids: tuple[int, ...]
    edge_of: dict[tuple[int, int], int]

    def to_matching(self, outcome: EngineOutcome) -> Matching:
        pairs = []
        for ri, e in enumerate(outcome.right_edge):
            if e != -1:
                li = self.system.edge_left[e]
                u, v = self.left_ids[li], self.right_ids[ri]
                pairs.append((u, v) if self.inst.is_agent(u) else (v, u))
        return Matching.from_pairs(self.inst, pairs)


def build_system(
    inst: Instance,
    proposers: str = "agents",
    forbidden_pairs=(),
    right_cut_init: dict[int, int] | None = None,
) -> SystemHandle:
    """Plain one-sided proposal system over an instance.

    Left vertices carry their preference lists plus a trailing private sink
    (the stay-alone option); right ranks come from the other side's lists.
    ``forbidden_pairs`` are (left vertex, right vertex) instance-id pairs;
    ``right_cut_init`` maps right indexes to initial acceptance cutoffs.
    """
    if proposers == "agents":
        left_ids = tuple(inst.agent_ids())
        right_ids = tuple(inst.job_ids())
    elif proposers == "jobs":
        left_ids = tuple(inst.job_ids())
        right_ids = tuple(inst.agent_ids())
    else:
        raise ValueError(f"unknown proposer side {proposers!r}")
    right_index = {v: i for i, v in enumerate(right_ids)}

    left_lists: list[tuple[int, ...]] = []
    edge_left: list[int] = []
    edge_right: list[int] = []
    right_rank: list[int] = []
    edge_of: dict[tuple[int, int], int] = {}
    for li, u in enumerate(left_ids):
        row = []
        for v in inst.pref[u]:
            e = len(edge_left)
            edge_of[(u, v)] = e
            edge_left.append(li)
            edge_right.append(right_index[v])
            right_rank.append(inst.rank_of(v, u))
            row.append(e)
        sink = len(edge_left)
        edge_of[(u, u)] = sink
        edge_left.append(li)
        edge_right.append(-1)
        right_rank.append(0)
        row.append(sink)
        left_lists.append(tuple(row))

    system = ProposalSystem(
        num_left=len(left_ids),
        num_right=len(right_ids),
        left_lists=left_lists,
        edge_left=edge_left,
        edge_right=edge_right,
        right_rank=right_rank,
        forbidden=[edge_of[pair] for pair in forbidden_pairs],
        right_cut_init=right_cut_init,
    )
    return SystemHandle(inst, system, left_ids, right_ids, edge_of)


def stable_matching(inst: Instance, proposers: str = "agents") -> Matching:
    """Proposer-optimal stable matching of the instance."""
    handle = build_system(inst, proposers)
    return handle.to_matching(handle.system.run())


def stable_vertices(inst: Instance) -> frozenset[int]:
    """Vertices matched to genuine partners in every stable matching.

    All stable matchings cover the same vertex set, so one agent-proposing
    run settles membership.
    """
    mat = stable_matching(inst)
    return frozenset(u for u in range(inst.n) if not mat.is_self(u))


def is_stable_pair(
    inst: Instance, edge: tuple[int, int], handle: SystemHandle | None = None
) -> bool:
    """Whether some stable matching contains the edge.

    Truncates the job's acceptance just below the given agent and checks
    whether the agent-proposing run then matches the two together.  Passing
    a prebuilt agent-proposing ``handle`` lets batch callers amortize the
    system construction; each query runs on a fresh clone.
    """
    a, b = edge
    if not inst.has_edge(a, b):
        raise InstanceError(
            f"({inst.names[a]}, {inst.names[b]}) is not an edge"
        )
    if handle is None:
        handle = build_system(inst, "agents")
    r = b - inst.num_agents
    cut = inst.rank_of(b, a) + 1
    system = handle.system
    if system.has_forbidden:
        fresh = system.clone_fresh(right_cut_init={r: cut})
        outcome = fresh.run()
        e = outcome.right_edge[r]
        return e != -1 and handle.left_ids[fresh.edge_left[e]] == a
    if system.queue:
        system.run()
    e = system.probe_truncation(r, cut)
    return e != -1 and handle.left_ids[system.edge_left[e]] == a


def blocking_edges(inst: Instance, mat: Matching) -> frozenset[tuple[int, int]]:
    """All edges whose endpoints both strictly prefer each other to their partners."""
    blockers = []
    for a, b in inst.edges:
        if mat.partner[a] == b:
            continue
        if inst.rank_of(a, b) < inst.rank_of(a, mat.partner[a]) and inst.rank_of(
            b, a
        ) < inst.rank_of(b, mat.partner[b]):
            blockers.append((a, b))
    return frozenset(blockers)
