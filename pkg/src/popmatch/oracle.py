"""Exponential ground truth for small instances.

Enumerates every matching, runs all pairwise elections, and reports the
exact sets of popular, agent-side-popular, and fully popular matchings along
with the popular edge union.  Everything downstream is validated against
these definitions, so this module deliberately trades speed for
transparency: no pruning beyond a vertex cap, and no structural shortcuts
except where explicitly cross-checked.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .engine import stable_vertices
from .instance import Instance, Matching
from .popularity import edge_weight

DEFAULT_VERTEX_CAP = 16
_CAP_ENV = "POPMATCH_ORACLE_CAP"


class OracleCapError(ValueError):
    """Instance too large for exhaustive enumeration."""


def vertex_cap() -> int:
    raw = os.environ.get(_CAP_ENV)
    return int(raw) if raw else DEFAULT_VERTEX_CAP


@dataclass(frozen=True)
class OracleReport:
    """Exact election results over every matching of a small instance."""

    num_matchings: int
    popular: tuple[Matching, ...]
    a_popular: tuple[Matching, ...]
    fully_popular: tuple[Matching, ...]
    max_fully_popular_size: int | None
    min_popular_size: int
    max_popular_size: int
    popular_edges: frozenset[tuple[int, int]]
    popular_loops: frozenset[int]
    witness_exists: tuple[bool, ...] | None


def enumerate_matchings(inst: Instance, cap: int | None = None):
    """Yield every matching of the instance exactly once, the empty one included."""
    limit = cap if cap is not None else vertex_cap()
    if inst.n > limit:
        raise OracleCapError(
            f"instance has {inst.n} vertices, enumeration cap is {limit}"
        )
    partner = list(range(inst.n))

    def rec(a: int):
        if a == inst.num_agents:
            yield Matching(tuple(partner))
            return
        yield from rec(a + 1)
        for b in inst.pref[a]:
            if partner[b] == b:
                partner[a] = b
                partner[b] = a
                yield from rec(a + 1)
                partner[a] = a
                partner[b] = b

    yield from rec(0)


def ground_truth(
    inst: Instance,
    cap: int | None = None,
    with_witness_flags: bool = False,
) -> OracleReport:
    """Exhaustive elections over all matchings.

    Popularity and agent-side popularity come straight from the vote counts;
    the fully popular set is their intersection.  The popular edge union is
    cross-checked against the rule that a self-loop is popular exactly when
    its vertex is unstable, an independently computed fact.
    """
    mats = list(enumerate_matchings(inst, cap))
    k = len(mats)
    n = inst.n

    # rank_of_partner[i][u]: how u ranks its partner in matching i.
    ranks = np.empty((k, n), dtype=np.int32)
    for i, mat in enumerate(mats):
        ranks[i] = [inst.rank_of(u, mat.partner[u]) for u in range(n)]

    agent_cols = np.arange(inst.num_agents)
    popular_mask = np.ones(k, dtype=bool)
    a_popular_mask = np.ones(k, dtype=bool)
    for i in range(k):
        better = ranks[i] < ranks  # (k, n): vertices preferring mat i
        worse = ranks[i] > ranks
        if np.any(better.sum(axis=1) < worse.sum(axis=1)):
            popular_mask[i] = False
        ba = better[:, agent_cols].sum(axis=1)
        wa = worse[:, agent_cols].sum(axis=1)
        if np.any(ba < wa):
            a_popular_mask[i] = False

    popular = tuple(m for i, m in enumerate(mats) if popular_mask[i])
    a_popular = tuple(m for i, m in enumerate(mats) if a_popular_mask[i])
    fully = tuple(
        m
        for i, m in enumerate(mats)
        if popular_mask[i] and a_popular_mask[i]
    )

    sizes = [m.size(inst) for m in popular]
    pop_edges = frozenset(
        pair for m in popular for pair in m.pairs(inst)
    )
    pop_loops = frozenset(
        u for m in popular for u in range(n) if m.is_self(u)
    )
    stable = stable_vertices(inst)
    rule_loops = frozenset(u for u in range(n) if u not in stable)
    if pop_loops != rule_loops:
        raise AssertionError(
            "self-loop popularity disagrees with the unstable-vertex rule"
        )

    flags = None
    if with_witness_flags:
        flags = tuple(witness_search(inst, m) is not None for m in mats)

    fully_sizes = [m.size(inst) for m in fully]
    return OracleReport(
        num_matchings=k,
        popular=popular,
        a_popular=a_popular,
        fully_popular=fully,
        max_fully_popular_size=max(fully_sizes) if fully_sizes else None,
        min_popular_size=min(sizes),
        max_popular_size=max(sizes),
        popular_edges=pop_edges,
        popular_loops=pop_loops,
        witness_exists=flags,
    )


def witness_search(
    inst: Instance, mat: Matching, cap: int = 12
) -> tuple[int, ...] | None:
    """Exhaustive search for a popularity certificate of ``mat``.

    Complete backtracking over all vectors in {0, +-1}^n, organized so that
    the all-zero branch is explored first (a stable matching therefore
    yields the zero certificate).  Returns None when no vector satisfies the
    covering constraints, which by exhaustiveness proves none exists.
    """
    if inst.n > cap:
        raise OracleCapError(
            f"instance has {inst.n} vertices, witness search cap is {cap}"
        )
    n = inst.n
    loop_wt = [edge_weight(inst, mat, (u, u)) for u in range(n)]
    wt = {}
    back_edges: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for a, b in inst.edges:
        w = edge_weight(inst, mat, (a, b))
        wt[(a, b)] = w
        hi, lo = max(a, b), min(a, b)
        back_edges[hi].append((lo, w))

    alpha = [0] * n

    def rec(u: int, total: int):
        if u == n:
            if total == 0:
                yield tuple(alpha)
            return
        remaining = n - u - 1
        for val in (0, -1, 1):
            if val < loop_wt[u]:
                continue
            if any(alpha[v] + val < w for v, w in back_edges[u]):
                continue
            if abs(total + val) > remaining:
                continue
            alpha[u] = val
            yield from rec(u + 1, total + val)
        alpha[u] = 0

    return next(rec(0, 0), None)
