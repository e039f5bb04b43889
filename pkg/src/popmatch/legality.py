"""Edge classification: valid, popular, and legal edges, and the popular subgraph.

An edge is *valid* when the one-sided characterization permits it (a top or
fallback edge of some agent, or the self-loop of a vertex no agent ranks
first).  It is *popular* when some popular matching uses it; a genuine edge
is popular exactly when it is a stable pair or a dominant pair, and a
self-loop is popular exactly when its vertex is unstable.  *Legal* edges are
those that are both, and only they may appear in a fully popular matching.

Dominant pairs are reduced to stable pairs of a two-level auxiliary
instance: each agent splits into a high and a low copy, jobs prefer any
high copy to any low copy, and a private last-resort job arbitrates which
copy is active.  The reduction is validated exhaustively against the
election oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import (
    build_system,
    is_stable_pair,
    stable_matching,
    stable_vertices,
)
from .instance import Instance, compute_posts

EdgeKey = tuple[int, int]


@dataclass(frozen=True)
class EdgeClassification:
    """Valid/popular/legal sets plus the popular-subgraph components.

    Edge keys are ``(agent, job)`` pairs; self-loops appear as ``(u, u)``.
    ``component_id[u]`` indexes the connected component of u in the graph of
    genuine popular edges (self-loops connect nothing); every vertex belongs
    to exactly one component.
    """

    valid: frozenset[EdgeKey]
    popular: frozenset[EdgeKey]
    legal: frozenset[EdgeKey]
    component_id: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]


def valid_edges(inst: Instance, posts) -> frozenset[EdgeKey]:
    """Edges permitted by the one-sided characterization.

    Each agent contributes its top edge and its fallback slot (possibly its
    own self-loop); each job that is nobody's top choice contributes its
    self-loop.
    """
    keys = set()
    for a in inst.agent_ids():
        keys.add((a, posts.f[a]))
        keys.add((a, posts.s[a]) if posts.s[a] != a else (a, a))
    f_image = posts.f_image()
    for b in inst.job_ids():
        if b not in f_image:
            keys.add((b, b))
    return frozenset(keys)


def two_level_instance(inst: Instance) -> tuple[Instance, int]:
    """Auxiliary instance whose stable matchings are the dominant matchings.

    Agent a becomes a high copy (id a) and a low copy (id num_agents + a).
    The high copy ranks a private last-resort job first and a's jobs after;
    the low copy ranks a's jobs first and the last resort last.  Jobs rank
    all high copies above all low copies, preserving a's order inside each
    level, and each last-resort job accepts only its own two copies, low
    copy first.  In any stable matching exactly one copy of a holds a
    genuine job or the agent is effectively unmatched, so projecting genuine
    pairs back recovers a dominant matching.

    Returns the instance and the number of original agents (which is also
    the id offset of the low copies).
    """
    na = inst.num_agents
    agent_names = [f"{inst.names[a]}^hi" for a in inst.agent_ids()] + [
        f"{inst.names[a]}^lo" for a in inst.agent_ids()
    ]
    job_names = [inst.names[b] for b in inst.job_ids()] + [
        f"{inst.names[a]}^rest" for a in inst.agent_ids()
    ]
    pref: dict[str, list[str]] = {}
    for a in inst.agent_ids():
        jobs = [inst.names[b] for b in inst.pref[a]]
        rest = f"{inst.names[a]}^rest"
        pref[f"{inst.names[a]}^hi"] = [rest] + jobs
        pref[f"{inst.names[a]}^lo"] = jobs + [rest]
        pref[rest] = [f"{inst.names[a]}^lo", f"{inst.names[a]}^hi"]
    for b in inst.job_ids():
        order = [inst.names[a] for a in inst.pref[b]]
        pref[inst.names[b]] = [f"{x}^hi" for x in order] + [
            f"{x}^lo" for x in order
        ]
    return Instance.build(agent_names, job_names, pref), na


def _stable_pair_windows(inst: Instance) -> tuple:
    """Rank windows that every stable pair must fall inside.

    The proposer-optimal and proposer-pessimal stable matchings bound each
    matched vertex's possible stable partners; any edge outside both bounds
    cannot be a stable pair, and the two boundary matchings are stable
    themselves.  This prunes almost every edge in practice, so that the
    exact per-edge test only runs on a short shortlist.
    """
    m_best = stable_matching(inst, "agents")
    m_worst = stable_matching(inst, "jobs")
    return m_best, m_worst


def stable_pairs(
    inst: Instance, candidates=None
) -> frozenset[EdgeKey]:
    """All edges (or the given subset) lying in some stable matching."""
    m_best, m_worst = _stable_pair_windows(inst)
    out = set()
    pool = inst.edges if candidates is None else candidates
    handle = None
    for a, b in pool:
        if m_best.partner[a] == b or m_worst.partner[a] == b:
            out.add((a, b))
            continue
        if m_best.is_self(a) or m_best.is_self(b):
            continue
        ra = inst.rank_of(a, b)
        if not (
            inst.rank_of(a, m_best.partner[a])
            <= ra
            <= inst.rank_of(a, m_worst.partner[a])
        ):
            continue
        rb = inst.rank_of(b, a)
        if not (
            inst.rank_of(b, m_worst.partner[b])
            <= rb
            <= inst.rank_of(b, m_best.partner[b])
        ):
            continue
        if handle is None:
            handle = build_system(inst, "agents")
        if is_stable_pair(inst, (a, b), handle=handle):
            out.add((a, b))
    return frozenset(out)


def dominant_pairs(
    inst: Instance, candidates=None
) -> frozenset[EdgeKey]:
    """All edges (or the given subset) lying in some dominant matching."""
    aux, na = two_level_instance(inst)
    aux_pairs = []
    pool = inst.edges if candidates is None else candidates
    for a, b in pool:
        bx = b - inst.num_agents + 2 * na
        aux_pairs.append((a, bx))          # high copy
        aux_pairs.append((na + a, bx))     # low copy
    found = stable_pairs(aux, aux_pairs)
    out = set()
    for ax, bx in found:
        a = ax if ax < na else ax - na
        out.add((a, bx - 2 * na + inst.num_agents))
    return frozenset(out)


def popular_edges(
    inst: Instance, backend: str = "fast", cap: int | None = None
) -> frozenset[EdgeKey]:
    """Edges and self-loops that some popular matching uses.

    The ``fast`` backend combines the stable-pair and dominant-pair tests
    with the unstable-vertex rule for self-loops; ``oracle`` enumerates all
    popular matchings instead and takes the union (small instances only).
    """
    if backend == "oracle":
        from .oracle import ground_truth

        report = ground_truth(inst, cap)
        return report.popular_edges | frozenset(
            (u, u) for u in report.popular_loops
        )
    if backend != "fast":
        raise ValueError(f"unknown backend {backend!r}")
    out = set(stable_pairs(inst)) | set(dominant_pairs(inst))
    stable = stable_vertices(inst)
    for u in range(inst.n):
        if u not in stable:
            out.add((u, u))
    return frozenset(out)


def legal_edge_set(inst: Instance, backend: str = "fast") -> EdgeClassification:
    """Classify every edge and self-loop and build the popular-subgraph components."""
    posts = compute_posts(inst)
    valid = valid_edges(inst, posts)
    popular = popular_edges(inst, backend=backend)
    legal = valid & popular

    parent = list(range(inst.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in popular:
        if a != b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

    roots: dict[int, int] = {}
    component_id = []
    members: list[list[int]] = []
    for u in range(inst.n):
        r = find(u)
        if r not in roots:
            roots[r] = len(members)
            members.append([])
        cid = roots[r]
        component_id.append(cid)
        members[cid].append(u)
    return EdgeClassification(
        valid=valid,
        popular=popular,
        legal=legal,
        component_id=tuple(component_id),
        components=tuple(tuple(ms) for ms in members),
    )
