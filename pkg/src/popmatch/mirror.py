"""The two-copy mirror graph: signed parallel edges, embeddings, realizations.

Every vertex u appears twice, as a left copy and a right copy.  A genuine
edge (a, b) spawns four signed edges: two parallel ones in the upper half
(between a's left copy and b's right copy) and two in the lower half
(between b's left copy and a's right copy).  Each vertex also has a single
*twin* edge joining its two copies.  Signs order preferences: every copy
prefers partners reached through their minus tag over partners reached
through their plus tag, keeping the original order within each block; a
left copy ranks its twin dead last, while a right copy ranks its twin
between the two blocks.

Stable matchings here encode "half-integral" popular structure; symmetric
ones project to matchings of the original instance, and the per-vertex sign
sums recover popularity certificates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import ProposalSystem, blocking_edges
from .instance import Instance, Matching
from .legality import EdgeClassification


@dataclass(frozen=True)
class MirrorGraph:
    """Signed two-copy graph with ranked edge lists and a forbidden set.

    For the k-th genuine edge (a, b) the four signed edges take ids
    ``4k .. 4k+3``: upper with a tagged plus, upper with a tagged minus,
    lower with b tagged plus, lower with b tagged minus.  Twin edges follow
    at ``4m + u``.  ``lrank``/``rrank`` give each edge's position in its
    left/right endpoint's preference order; ``forbidden`` marks every signed
    copy of a non-legal edge and the twin of every vertex whose self-loop is
    not legal.
    """

    inst: Instance
    edge_left: tuple[int, ...]
    edge_right: tuple[int, ...]
    left_tag: tuple[int, ...]
    right_tag: tuple[int, ...]
    g_edge: tuple[int, ...]
    left_lists: tuple[tuple[int, ...], ...]
    lrank: tuple[int, ...]
    rrank: tuple[int, ...]
    forbidden: frozenset[int]

    @property
    def num_edges(self) -> int:
        return len(self.edge_left)

    @property
    def twin_base(self) -> int:
        return 4 * self.inst.m

    def twin(self, u: int) -> int:
        return self.twin_base + u

    def is_twin(self, e: int) -> bool:
        return e >= self.twin_base

    def describe(self, e: int) -> str:
        names = self.inst.names
        lt = "+" if self.left_tag[e] > 0 else "-"
        rt = "+" if self.right_tag[e] > 0 else "-"
        return (
            f"({names[self.edge_left[e]]}_l^{lt}, "
            f"{names[self.edge_right[e]]}_r^{rt})"
        )


@dataclass(frozen=True)
class MirrorMatching:
    """A perfect matching of the mirror graph, stored per copy.

    ``left_edge[u]`` / ``right_edge[u]`` hold the edge id matched at u's
    left / right copy.
    """

    mirror: MirrorGraph
    left_edge: tuple[int, ...]
    right_edge: tuple[int, ...]

    def uses_forbidden(self) -> bool:
        return any(e in self.mirror.forbidden for e in self.left_edge)


def build_mirror(inst: Instance, classification: EdgeClassification) -> MirrorGraph:
    """Construct the mirror graph with its forbidden set from a classification."""
    m = inst.m
    num_edges = 4 * m + inst.n
    edge_left = [0] * num_edges
    edge_right = [0] * num_edges
    left_tag = [0] * num_edges
    right_tag = [0] * num_edges
    g_edge = [-1] * num_edges

    edge_index: dict[tuple[int, int], int] = {}
    for k, (a, b) in enumerate(inst.edges):
        edge_index[(a, b)] = k
        for off, (lv, rv, lt, rt) in enumerate(
            (
                (a, b, 1, -1),   # upper, a proposes toward b's minus slot
                (a, b, -1, 1),   # upper, parallel twin-signed copy
                (b, a, 1, -1),   # lower
                (b, a, -1, 1),   # lower
            )
        ):
            e = 4 * k + off
            edge_left[e] = lv
            edge_right[e] = rv
            left_tag[e] = lt
            right_tag[e] = rt
            g_edge[e] = k
    for u in range(inst.n):
        e = 4 * m + u
        edge_left[e] = u
        edge_right[e] = u
        left_tag[e] = -1
        right_tag[e] = 1

    def upper_plus(a: int, b: int) -> int:
        return 4 * edge_index[(a, b)]

    def upper_minus(a: int, b: int) -> int:
        return 4 * edge_index[(a, b)] + 1

    def lower_plus(a: int, b: int) -> int:
        return 4 * edge_index[(a, b)] + 2

    def lower_minus(a: int, b: int) -> int:
        return 4 * edge_index[(a, b)] + 3

    def signed(u: int, v: int, u_tag: int) -> int:
        # Edge incident to u's copy carrying tag u_tag, toward neighbor v.
        if inst.is_agent(u):
            return (
                upper_plus(u, v) if u_tag > 0 else upper_minus(u, v)
            )
        return lower_plus(v, u) if u_tag > 0 else lower_minus(v, u)

    lrank = [0] * num_edges
    rrank = [0] * num_edges
    left_lists = []
    for u in range(inst.n):
        # Left copy: minus-tagged partners first, then plus-tagged partners,
        # twin last.  A proposal toward v's minus slot runs along u's plus tag.
        row = [signed(u, v, +1) for v in inst.pref[u]]
        row += [signed(u, v, -1) for v in inst.pref[u]]
        row.append(4 * m + u)
        for pos, e in enumerate(row):
            lrank[e] = pos
        left_lists.append(tuple(row))
        # Right copy: minus-tagged partners, twin, plus-tagged partners.
        order = [signed(v, u, -1) for v in inst.pref[u]]
        order.append(4 * m + u)
        order += [signed(v, u, +1) for v in inst.pref[u]]
        for pos, e in enumerate(order):
            rrank[e] = pos

    forbidden = set()
    for k, (a, b) in enumerate(inst.edges):
        if (a, b) not in classification.legal:
            forbidden.update((4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3))
    for u in range(inst.n):
        if (u, u) not in classification.legal:
            forbidden.add(4 * m + u)

    return MirrorGraph(
        inst=inst,
        edge_left=tuple(edge_left),
        edge_right=tuple(edge_right),
        left_tag=tuple(left_tag),
        right_tag=tuple(right_tag),
        g_edge=tuple(g_edge),
        left_lists=tuple(left_lists),
        lrank=tuple(lrank),
        rrank=tuple(rrank),
        forbidden=frozenset(forbidden),
    )


def mirror_system(mirror: MirrorGraph) -> ProposalSystem:
    """Proposal system over the mirror graph: left copies propose, right dispose."""
    return ProposalSystem(
        num_left=mirror.inst.n,
        num_right=mirror.inst.n,
        left_lists=list(mirror.left_lists),
        edge_left=list(mirror.edge_left),
        edge_right=list(mirror.edge_right),
        right_rank=list(mirror.rrank),
        forbidden=mirror.forbidden,
    )


def embed_stable(mirror: MirrorGraph, stable: Matching) -> MirrorMatching:
    """Mirror a stable matching symmetrically using the minus-to-plus rule.

    Each matched pair occupies the upper and lower minus-to-plus copies;
    self-matched vertices take their twins.  The input must be stable, and
    the result then has no blocking edge in the mirror graph.
    """
    inst = mirror.inst
    if blocking_edges(inst, stable):
        raise ValueError("matching is not stable")
    left = [-1] * inst.n
    right = [-1] * inst.n
    edge_index = {pair: k for k, pair in enumerate(inst.edges)}
    for a, b in stable.pairs(inst):
        k = edge_index[(a, b)]
        left[a] = 4 * k + 1
        right[b] = 4 * k + 1
        left[b] = 4 * k + 3
        right[a] = 4 * k + 3
    for u in range(inst.n):
        if stable.is_self(u):
            left[u] = right[u] = mirror.twin(u)
    return MirrorMatching(mirror, tuple(left), tuple(right))


def realize_witnessed(
    mirror: MirrorGraph, mat: Matching, alpha
) -> MirrorMatching:
    """Symmetric mirror realization of a popular matching from its certificate.

    Matched pairs are signed by their certificate values; a pair whose
    entries do not cancel violates the tight-edge property of certificates
    and is rejected.  At every vertex the two incident sign tags sum to
    twice its certificate entry.
    """
    inst = mirror.inst
    left = [-1] * inst.n
    right = [-1] * inst.n
    edge_index = {pair: k for k, pair in enumerate(inst.edges)}
    for a, b in mat.pairs(inst):
        if alpha[a] + alpha[b] != 0:
            raise ValueError(
                f"matched pair ({inst.names[a]}, {inst.names[b]}) has "
                "non-cancelling certificate entries"
            )
        k = edge_index[(a, b)]
        if alpha[a] < 0:
            left[a] = 4 * k + 1   # upper minus at a
            right[b] = 4 * k + 1
            left[b] = 4 * k + 2   # lower plus at b
            right[a] = 4 * k + 2
        elif alpha[a] > 0:
            left[a] = 4 * k      # upper plus at a
            right[b] = 4 * k
            left[b] = 4 * k + 3  # lower minus at b
            right[a] = 4 * k + 3
        else:
            left[a] = 4 * k + 1
            right[b] = 4 * k + 1
            left[b] = 4 * k + 3
            right[a] = 4 * k + 3
    for u in range(inst.n):
        if mat.is_self(u):
            if alpha[u] != 0:
                raise ValueError(
                    f"self-matched vertex {inst.names[u]} has a nonzero "
                    "certificate entry"
                )
            left[u] = right[u] = mirror.twin(u)
    return MirrorMatching(mirror, tuple(left), tuple(right))


def project(mh: MirrorMatching, half: str) -> Matching:
    """Matching induced in one half; twin-matched vertices become self-matched."""
    if half not in ("upper", "lower"):
        raise ValueError(f"unknown half {half!r}")
    mirror = mh.mirror
    inst = mirror.inst
    partner = list(range(inst.n))
    for u in range(inst.n):
        e = mh.left_edge[u]
        if e == -1 or mirror.is_twin(e):
            continue
        is_upper = inst.is_agent(u)
        if (half == "upper") == is_upper:
            v = mirror.edge_right[e]
            partner[u] = v
            partner[v] = u
    return Matching(tuple(partner))


@dataclass(frozen=True)
class PartitionRecord:
    """Sign partitions induced by a perfect mirror matching.

    ``u_agents``/``u_jobs`` hold twin-matched vertices.  The unprimed sets
    read signs off the upper half (each vertex's own tag there) and the
    primed sets read the lower half.
    """

    u_agents: frozenset[int]
    u_jobs: frozenset[int]
    a_plus: frozenset[int]
    a_minus: frozenset[int]
    b_plus: frozenset[int]
    b_minus: frozenset[int]
    ap_plus: frozenset[int]
    ap_minus: frozenset[int]
    bp_plus: frozenset[int]
    bp_minus: frozenset[int]


def classify_partition(mh: MirrorMatching) -> PartitionRecord:
    """Read the sign partitions off a perfect mirror matching."""
    mirror = mh.mirror
    inst = mirror.inst
    u_agents, u_jobs = set(), set()
    a_plus, a_minus, b_plus, b_minus = set(), set(), set(), set()
    ap_plus, ap_minus, bp_plus, bp_minus = set(), set(), set(), set()
    for u in range(inst.n):
        e = mh.left_edge[u]
        if e == -1 or mh.right_edge[u] == -1:
            raise ValueError("mirror matching is not perfect")
        if mirror.is_twin(e):
            (u_agents if inst.is_agent(u) else u_jobs).add(u)
            continue
        if inst.is_agent(u):
            # Upper-half sign at the agent's left copy.
            (a_plus if mirror.left_tag[e] > 0 else a_minus).add(u)
            er = mh.right_edge[u]
            (ap_plus if mirror.right_tag[er] > 0 else ap_minus).add(u)
        else:
            (bp_plus if mirror.left_tag[e] > 0 else bp_minus).add(u)
            er = mh.right_edge[u]
            (b_plus if mirror.right_tag[er] > 0 else b_minus).add(u)
    return PartitionRecord(
        u_agents=frozenset(u_agents),
        u_jobs=frozenset(u_jobs),
        a_plus=frozenset(a_plus),
        a_minus=frozenset(a_minus),
        b_plus=frozenset(b_plus),
        b_minus=frozenset(b_minus),
        ap_plus=frozenset(ap_plus),
        ap_minus=frozenset(ap_minus),
        bp_plus=frozenset(bp_plus),
        bp_minus=frozenset(bp_minus),
    )


def mirror_blocking_edges(mh: MirrorMatching) -> tuple[int, ...]:
    """Every mirror edge both of whose endpoints prefer it to their matches."""
    mirror = mh.mirror
    blockers = []
    for e in range(mirror.num_edges):
        lu = mirror.edge_left[e]
        rv = mirror.edge_right[e]
        le = mh.left_edge[lu]
        re = mh.right_edge[rv]
        if e in (le, re):
            continue
        if (le == -1 or mirror.lrank[e] < mirror.lrank[le]) and (
            re == -1 or mirror.rrank[e] < mirror.rrank[re]
        ):
            blockers.append(e)
    return tuple(blockers)


def format_mirror(mirror: MirrorGraph) -> str:
    """Line-oriented debug dump: each copy's ranked edges with forbidden flags."""
    inst = mirror.inst
    lines = [f"mirror graph: {inst.n * 2} vertices, {mirror.num_edges} edges"]
    for u in range(inst.n):
        row = " ".join(
            mirror.describe(e) + ("!" if e in mirror.forbidden else "")
            for e in mirror.left_lists[u]
        )
        lines.append(f"{inst.names[u]}_l > {row}")
    for u in range(inst.n):
        order = sorted(
            (
                e
                for e in range(mirror.num_edges)
                if mirror.edge_right[e] == u
                and (mirror.is_twin(e) or mirror.edge_left[e] != u)
            ),
            key=lambda e: mirror.rrank[e],
        )
        row = " ".join(
            mirror.describe(e) + ("!" if e in mirror.forbidden else "")
            for e in order
        )
        lines.append(f"{inst.names[u]}_r > {row}")
    return "\n".join(lines) + "\n"
