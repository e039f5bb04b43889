"""Bipartite preference instances, matchings, posts, and pairwise elections.

An instance is a bipartite graph whose two sides are called *agents* and
*jobs*.  Every vertex ranks its genuine neighbors strictly and implicitly
ranks "staying on its own" below all of them, so any matching can be viewed
as a perfect matching once each uncovered vertex is paired with itself.
"""

from __future__ import annotations

from dataclasses import dataclass


class InstanceError(ValueError):
    """Malformed instance or matching input."""


@dataclass(frozen=True)
class Instance:
    """A two-sided preference system with dense integer vertex ids.

    Agents occupy ids ``0 .. num_agents-1`` and jobs occupy
    ``num_agents .. n-1``.  ``pref[u]`` lists u's genuine neighbors in
    strictly decreasing preference.  ``rank_tbl[u]`` maps each neighbor to
    its position in ``pref[u]``; u itself always gets rank ``len(pref[u])``,
    one worse than every genuine neighbor.

    Instances are immutable after construction and safe to share across
    threads; all operations on them are pure.
    """

    names: tuple[str, ...]
    num_agents: int
    pref: tuple[tuple[int, ...], ...]
    rank_tbl: tuple[dict[int, int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def num_jobs(self) -> int:
        return self.n - self.num_agents

    def is_agent(self, u: int) -> bool:
        return u < self.num_agents

    def agent_ids(self) -> range:
        return range(self.num_agents)

    def job_ids(self) -> range:
        return range(self.num_agents, self.n)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.pref[u]

    def rank_of(self, u: int, v: int) -> int:
        """Position of v in u's list; u's own (worst) slot if v == u."""
        if v == u:
            return len(self.pref[u])
        return self.rank_tbl[u][v]

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InstanceError(f"unknown vertex name {name!r}") from None

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.rank_tbl[a]

    @staticmethod
    def build(
        agent_names: list[str],
        job_names: list[str],
        pref_by_name: dict[str, list[str]],
    ) -> "Instance":
        """Intern names to ids and validate every structural invariant."""
        names = list(agent_names) + list(job_names)
        if len(set(names)) != len(names):
            dup = next(x for x in names if names.count(x) > 1)
            raise InstanceError(f"duplicate vertex name {dup!r}")
        idx = {name: i for i, name in enumerate(names)}
        num_agents = len(agent_names)

        pref: list[tuple[int, ...]] = []
        for u, name in enumerate(names):
            row = pref_by_name.get(name, [])
            ids = []
            for v_name in row:
                if v_name not in idx:
                    raise InstanceError(
                        f"{name!r} lists unknown vertex {v_name!r}"
                    )
                v = idx[v_name]
                if (v < num_agents) == (u < num_agents):
                    raise InstanceError(
                        f"{name!r} lists same-side vertex {v_name!r}"
                    )
                if v in ids:
                    raise InstanceError(
                        f"{name!r} lists {v_name!r} more than once"
                    )
                ids.append(v)
            pref.append(tuple(ids))

        for a in range(num_agents):
            if not pref[a]:
                raise InstanceError(
                    f"agent {names[a]!r} has an empty preference list"
                )

        for u in range(len(names)):
            for v in pref[u]:
                if u not in pref[v]:
                    raise InstanceError(
                        f"adjacency is not mutual: {names[u]!r} lists "
                        f"{names[v]!r} but not conversely"
                    )

        rank_tbl = tuple({v: i for i, v in enumerate(row)} for row in pref)
        edges = tuple(
            (a, b) for a in range(num_agents) for b in pref[a]
        )
        return Instance(tuple(names), num_agents, tuple(pref), rank_tbl, edges)


@dataclass(frozen=True)
class Matching:
    """A perfect matching over the self-augmented vertex set.

    ``partner[u] == u`` means u is on its own; otherwise ``(u, partner[u])``
    is a genuine edge.  The map is a total involution.
    """

    partner: tuple[int, ...]

    @staticmethod
    def from_pairs(inst: Instance, pairs) -> "Matching":
        partner = list(range(inst.n))
        for a, b in pairs:
            if not inst.has_edge(a, b) and not inst.has_edge(b, a):
                raise InstanceError(
                    f"({inst.names[a]}, {inst.names[b]}) is not an edge"
                )
            if partner[a] != a or partner[b] != b:
                raise InstanceError(
                    f"vertex matched twice near ({inst.names[a]}, {inst.names[b]})"
                )
            partner[a] = b
            partner[b] = a
        return Matching(tuple(partner))

    def pairs(self, inst: Instance) -> tuple[tuple[int, int], ...]:
        """Genuine matched pairs as (agent, job), sorted by agent id."""
        return tuple(
            (a, self.partner[a])
            for a in inst.agent_ids()
            if self.partner[a] != a
        )

    def size(self, inst: Instance) -> int:
        return len(self.pairs(inst))

    def is_self(self, u: int) -> bool:
        return self.partner[u] == u


@dataclass(frozen=True)
class Posts:
    """Per-agent top choice and fallback post.

    ``f[a]`` is agent a's first-ranked job.  ``s[a]`` is a's most preferred
    neighbor that is nobody's top choice, or a itself when every neighbor of
    a is some agent's top choice.
    """

    f: tuple[int, ...]
    s: tuple[int, ...]

    def f_image(self) -> frozenset[int]:
        return frozenset(self.f)


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format.

    Expected shape::

        agents: a0 a1
        jobs: b0 b1
        a0 > b1
        a1 > b1 b0
        b0 > a1
        b1 > a1 a0

    ``#`` starts a comment line.  Preference lines run from most to least
    preferred.  A vertex without a preference line has an empty list, which
    is an error for agents.
    """
    agent_names: list[str] | None = None
    job_names: list[str] | None = None
    pref_by_name: dict[str, list[str]] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("agents:"):
            if agent_names is not None:
                raise InstanceError(f"line {line_no}: repeated agents line")
            agent_names = line[len("agents:"):].split()
            continue
        if line.startswith("jobs:"):
            if job_names is not None:
                raise InstanceError(f"line {line_no}: repeated jobs line")
            job_names = line[len("jobs:"):].split()
            continue
        if ">" not in line:
            raise InstanceError(f"line {line_no}: expected 'name > neighbors...'")
        head, _, tail = line.partition(">")
        name = head.strip()
        if not name:
            raise InstanceError(f"line {line_no}: missing vertex name")
        if name in pref_by_name:
            raise InstanceError(f"line {line_no}: repeated list for {name!r}")
        pref_by_name[name] = tail.split()

    if agent_names is None or job_names is None:
        raise InstanceError("missing 'agents:' or 'jobs:' line")
    known = set(agent_names) | set(job_names)
    for name in pref_by_name:
        if name not in known:
            raise InstanceError(f"preference line for undeclared vertex {name!r}")
    return Instance.build(agent_names, job_names, pref_by_name)


def serialize_instance(inst: Instance) -> str:
    """Render an instance back into the parseable text format."""
    lines = [
        "agents: " + " ".join(inst.names[: inst.num_agents]),
        "jobs: " + " ".join(inst.names[inst.num_agents:]),
    ]
    for u in range(inst.n):
        lines.append(
            f"{inst.names[u]} > " + " ".join(inst.names[v] for v in inst.pref[u])
        )
    return "\n".join(lines) + "\n"


def parse_matching(text: str, inst: Instance) -> Matching:
    """Parse an ``agent job`` pair-per-line file; omitted vertices are self-matched."""
    pairs = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InstanceError(f"line {line_no}: expected 'agent job'")
        a, b = (inst.id_of(p) for p in parts)
        if not inst.is_agent(a) or inst.is_agent(b):
            raise InstanceError(f"line {line_no}: expected an agent then a job")
        pairs.append((a, b))
    return Matching.from_pairs(inst, pairs)


def format_matching(inst: Instance, mat: Matching) -> str:
    return "\n".join(
        f"{inst.names[a]} {inst.names[b]}" for a, b in mat.pairs(inst)
    ) + ("\n" if mat.pairs(inst) else "")


def compute_posts(inst: Instance) -> Posts:
    """Derive each agent's top choice f(a) and fallback post s(a)."""
    f = tuple(inst.pref[a][0] for a in inst.agent_ids())
    f_image = set(f)
    s = []
    for a in inst.agent_ids():
        fallback = a
        for b in inst.pref[a]:
            if b not in f_image:
                fallback = b
                break
        s.append(fallback)
    return Posts(f, tuple(s))


def vote(inst: Instance, u: int, v: int, w: int) -> int:
    """u's vote for v against w: +1 if u prefers v, -1 if u prefers w, 0 if equal.

    Both candidates must be genuine neighbors of u or u itself; staying
    alone is every vertex's worst option.
    """
    for cand in (v, w):
        if cand != u and not inst.has_edge(u, cand) and not inst.has_edge(cand, u):
            raise InstanceError(
                f"{inst.names[cand]} is not adjacent to {inst.names[u]}"
            )
    if v == w:
        return 0
    rv, rw = inst.rank_of(u, v), inst.rank_of(u, w)
    return 1 if rv < rw else -1


def run_election(
    inst: Instance, first: Matching, second: Matching
) -> tuple[int, int, int, int]:
    """Head-to-head election between two matchings.

    Returns ``(phi_first, phi_second, phiA_first, phiA_second)``: total votes
    for each matching over all vertices, then over agents only.  Vertices
    with the same partner in both matchings abstain.
    """
    phi_first = phi_second = phi_a_first = phi_a_second = 0
    for u in range(inst.n):
        pu, qu = first.partner[u], second.partner[u]
        if pu == qu:
            continue
        ballot = 1 if inst.rank_of(u, pu) < inst.rank_of(u, qu) else -1
        if ballot > 0:
            phi_first += 1
            if inst.is_agent(u):
                phi_a_first += 1
        else:
            phi_second += 1
            if inst.is_agent(u):
                phi_a_second += 1
    return phi_first, phi_second, phi_a_first, phi_a_second
