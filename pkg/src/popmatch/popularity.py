"""Popularity verification with certificates, plus the one-sided check.

A matching M is popular when it never loses a head-to-head election.  That
is equivalent to every perfect matching N (self-loops included) having
``wt_M(N) <= 0`` under the joint-vote edge weights, which in turn reduces to
a max-weight perfect-matching problem whose integral dual optimum is a
vector in {0, +-1} covering every edge.  Such a vector is a *witness*: it
certifies popularity in linear time without re-running any election.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

from .instance import Instance, InstanceError, Matching, Posts

_INF = 1 << 60


@dataclass(frozen=True)
class PopularityVerdict:
    """Outcome of a popularity check.

    When popular, ``witness`` is a vertex-indexed vector in {0, +-1} whose
    covering constraints validate via :func:`check_witness`.  Otherwise
    ``counterexample`` is a matching that defeats M by the largest possible
    vote margin, and ``margin`` is that maximum of ``wt_M``.
    """

    popular: bool
    margin: int
    witness: tuple[int, ...] | None
    counterexample: Matching | None


def edge_weight(inst: Instance, mat: Matching, e: tuple[int, int]) -> int:
    """Joint vote of an edge's endpoints against their partners in ``mat``.

    Genuine edges weigh +2 (blocking), -2 (both prefer their partners), or
    0; a self-loop weighs 0 if it is in the matching and -1 otherwise.
    """
    u, v = e
    if u == v:
        if not 0 <= u < inst.n:
            raise InstanceError(f"no vertex with id {u}")
        return 0 if mat.partner[u] == u else -1
    if not (inst.has_edge(u, v) or inst.has_edge(v, u)):
        raise InstanceError(f"({u}, {v}) is not an edge")
    su = 1 if inst.rank_of(u, v) < inst.rank_of(u, mat.partner[u]) else (
        0 if mat.partner[u] == v else -1
    )
    sv = 1 if inst.rank_of(v, u) < inst.rank_of(v, mat.partner[v]) else (
        0 if mat.partner[v] == u else -1
    )
    return su + sv


def wt_total(inst: Instance, mat: Matching, other: Matching) -> int:
    """Sum of ``edge_weight`` over ``other``'s edges and self-loops.

    Equals the vote difference ``phi(other, mat) - phi(mat, other)``.
    """
    total = 0
    for u in range(inst.n):
        p = other.partner[u]
        if p == u:
            total += edge_weight(inst, mat, (u, u))
        elif u < p:
            total += edge_weight(inst, mat, (u, p))
    return total


def check_witness(
    inst: Instance,
    mat: Matching,
    alpha,
    vertices=None,
) -> bool:
    """Validate a popularity certificate against a matching.

    Requires entries in {0, +-1} summing to zero, every edge covered
    (``alpha_a + alpha_b >= wt``), and every vertex covering its own
    self-loop weight.  ``vertices`` restricts the check to an induced
    subgraph; the matching must not pair a vertex in scope with one outside.
    """
    scope = range(inst.n) if vertices is None else sorted(vertices)
    in_scope = [False] * inst.n
    for u in scope:
        in_scope[u] = True
    for u in scope:
        p = mat.partner[u]
        if p != u and not in_scope[p]:
            raise ValueError("matching leaves the induced subgraph")
    if any(alpha[u] not in (-1, 0, 1) for u in scope):
        return False
    if sum(alpha[u] for u in scope) != 0:
        return False
    for u in scope:
        if alpha[u] < edge_weight(inst, mat, (u, u)):
            return False
    for a, b in inst.edges:
        if in_scope[a] and in_scope[b]:
            if alpha[a] + alpha[b] < edge_weight(inst, mat, (a, b)):
                return False
    return True


def check_a_popular(inst: Instance, posts: Posts, mat: Matching) -> bool:
    """One-sided popularity, decided structurally from the f/s posts.

    The matching must use only per-agent top or fallback edges, cover every
    agent (an agent may sit on its own self-loop only when its fallback is
    itself), and give every top-choice job to an agent that ranks it first.
    """
    for a in inst.agent_ids():
        p = mat.partner[a]
        if p == a:
            if posts.s[a] != a:
                return False
        elif p != posts.f[a] and p != posts.s[a]:
            return False
    for b in posts.f_image():
        p = mat.partner[b]
        if p == b or posts.f[p] != b:
            return False
    return True


def verify_popular(inst: Instance, mat: Matching) -> PopularityVerdict:
    """Decide popularity, producing a witness or a defeating matching.

    Solves the max-weight perfect-matching relaxation with an augmenting
    path assignment method over small integer weights; the column/row
    potentials collapse to the integral witness when the optimum is zero.
    """
    loop_wt = [edge_weight(inst, mat, (u, u)) for u in range(inst.n)]
    const = sum(loop_wt)

    p = inst.num_agents
    q = inst.num_jobs
    # Self-loop weights folded into the genuine edges so that leaving both
    # endpoints alone is the zero baseline; folded weights are >= 0.
    adj: list[list[tuple[int, int]]] = []
    for a in inst.agent_ids():
        row = []
        for b in inst.pref[a]:
            wprime = edge_weight(inst, mat, (a, b)) - loop_wt[a] - loop_wt[b]
            row.append((b - p, wprime))
        row.append((q + a, 0))
        adj.append(row)

    value, match_row, y_row, y_col = _assignment_max(p, q, adj)
    margin = value + const

    if margin > 0:
        pairs = [
            (a, c + p) for a, c in enumerate(match_row) if c < q
        ]
        best = Matching.from_pairs(inst, pairs)
        return PopularityVerdict(False, margin, None, best)

    witness = [0] * inst.n
    for a in inst.agent_ids():
        witness[a] = y_row[a] + loop_wt[a]
    for b in inst.job_ids():
        witness[b] = y_col[b - p] + loop_wt[b]
    alpha = tuple(witness)
    if not check_witness(inst, mat, alpha):
        alpha = _witness_fallback(inst, mat)
    return PopularityVerdict(True, 0, alpha, None)


def _witness_fallback(inst: Instance, mat: Matching) -> tuple[int, ...]:
    """Exhaustive certificate search, used only if dual extraction misfires."""
    warnings.warn(
        "dual potentials failed certificate validation; "
        "falling back to exhaustive search",
        RuntimeWarning,
        stacklevel=2,
    )
    if inst.n > 16:
        raise AssertionError("witness extraction failed on a large instance")
    for alpha in itertools.product((0, -1, 1), repeat=inst.n):
        if check_witness(inst, mat, alpha):
            return alpha
    raise AssertionError("popular matching without any witness")


def _assignment_max(
    p: int, q: int, adj: list[list[tuple[int, int]]]
) -> tuple[int, list[int], list[int], list[int]]:
    """Max-weight assignment of rows to columns with per-row private sinks.

    ``adj[a]`` lists ``(col, weight)`` options where cols ``0..q-1`` are
    shared and col ``q+a`` is row a's zero-weight sink.  Every row ends
    assigned.  Returns the total weight over shared columns, the row
    assignment, and nonnegative integral dual potentials ``y_row``/``y_col``
    satisfying ``y_row[a] + y_col[c] >= weight(a, c)`` with equality on
    assigned pairs and zero on unassigned shared columns.
    """
    num_cols = q + p
    v = [0] * num_cols
    match_row = [-1] * p
    match_col = [-1] * num_cols
    mcost = [0] * p  # cost (negated weight) of each row's assigned edge

    cost_adj = [[(c, -w) for c, w in row] for row in adj]

    for a0 in range(p):
        d = [_INF] * num_cols
        reach_row = [-1] * num_cols
        reach_cost = [0] * num_cols
        prev_col = [-1] * num_cols
        done: list[int] = []
        done_mark = [False] * num_cols
        for c, w in cost_adj[a0]:
            rc = w - v[c]
            if rc < d[c]:
                d[c] = rc
                reach_row[c] = a0
                reach_cost[c] = w
                prev_col[c] = -1
        end = -1
        while True:
            best, bc = _INF, -1
            for c in range(num_cols):
                if not done_mark[c] and d[c] < best:
                    best, bc = d[c], c
            if bc == -1:
                raise AssertionError("assignment search ran out of columns")
            done_mark[bc] = True
            done.append(bc)
            if match_col[bc] == -1:
                end = bc
                break
            a1 = match_col[bc]
            u1 = mcost[a1] - v[bc]
            for c, w in cost_adj[a1]:
                if done_mark[c]:
                    continue
                nd = d[bc] + (w - u1 - v[c])
                if nd < d[c]:
                    d[c] = nd
                    reach_row[c] = a1
                    reach_cost[c] = w
                    prev_col[c] = bc
        mu = d[end]
        for c in done:
            v[c] += d[c] - mu
        c = end
        while True:
            a = reach_row[c]
            match_col[c] = a
            match_row[a] = c
            mcost[a] = reach_cost[c]
            if a == a0:
                break
            c = prev_col[c]

    value = -sum(mcost[a] for a in range(p) if match_row[a] < q)
    y_col = [-v[c] for c in range(q)]
    # Row potential u satisfies u + v[col] == cost on the assigned edge;
    # the dual we need is its negation.
    y_row = [v[match_row[a]] - mcost[a] for a in range(p)]
    return value, match_row, y_row, y_col
