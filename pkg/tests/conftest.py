"""Shared fixtures: the three reference instances and sweep helpers.

``size_gap``: four vertices where the stable matching has size 1 but a
popular matching of size 2 exists.

``identical_prefs``: three agents with identical lists; no matching is
popular on the agent side, so no fully popular matching exists.

``showcase``: twelve vertices where the stable size is 4, a popular perfect
matching of size 6 exists, and the only fully popular matching has size 5,
so neither a min-size nor a max-size popular matching qualifies.  The exact
lists are frozen here and re-certified against the oracle in the acceptance
suite.
"""

from __future__ import annotations

import pytest

from popmatch import Matching, parse_instance
from popmatch.generator import generate

SIZE_GAP_TEXT = """\
# stable matching has size 1, the popular maximum has size 2
agents: a0 a1
jobs: b0 b1
a0 > b1
a1 > b1 b0
b0 > a1
b1 > a1 a0
"""

IDENTICAL_PREFS_TEXT = """\
# three agents with identical lists: nothing is popular agent-side
agents: a1 a2 a3
jobs: b1 b2 b3
a1 > b1 b2 b3
a2 > b1 b2 b3
a3 > b1 b2 b3
b1 > a1 a2 a3
b2 > a1 a2 a3
b3 > a1 a2 a3
"""

SHOWCASE_TEXT = """\
# only a middle-size popular matching is also popular agent-side
agents: a ap p pp x xp
jobs: b bp q qp y yp
a > b qp bp
ap > b
p > q qp
pp > q qp
x > y yp
xp > y qp
b > a ap
bp > a
q > p pp
qp > a p pp xp
y > x xp
yp > x
"""


@pytest.fixture(scope="session")
def size_gap():
    return parse_instance(SIZE_GAP_TEXT)


@pytest.fixture(scope="session")
def identical_prefs():
    return parse_instance(IDENTICAL_PREFS_TEXT)


@pytest.fixture(scope="session")
def showcase():
    return parse_instance(SHOWCASE_TEXT)


def ids(inst, *names):
    return tuple(inst.id_of(name) for name in names)


def pairs_by_name(inst, mat: Matching):
    return sorted(
        (inst.names[a], inst.names[b]) for a, b in mat.pairs(inst)
    )


def match_of(inst, *name_pairs) -> Matching:
    return Matching.from_pairs(
        inst, [(inst.id_of(a), inst.id_of(b)) for a, b in name_pairs]
    )


def size_gap_max(inst) -> Matching:
    return match_of(inst, ("a0", "b1"), ("a1", "b0"))


def size_gap_stable(inst) -> Matching:
    return match_of(inst, ("a1", "b1"))


def showcase_stable(inst) -> Matching:
    return match_of(inst, ("a", "b"), ("p", "q"), ("pp", "qp"), ("x", "y"))


def showcase_full(inst) -> Matching:
    return match_of(
        inst, ("a", "b"), ("p", "q"), ("pp", "qp"), ("x", "yp"), ("xp", "y")
    )


def showcase_max(inst) -> Matching:
    return match_of(
        inst,
        ("a", "bp"),
        ("ap", "b"),
        ("p", "q"),
        ("pp", "qp"),
        ("x", "yp"),
        ("xp", "y"),
    )


def random_instance(seed: int, max_side: int = 4):
    """Deterministic small random instance for sweep tests."""
    na = 1 + seed % max_side
    nb = 1 + (seed // max_side) % max_side
    density = (0.3, 0.6, 1.0)[seed % 3]
    return parse_instance(generate(na, nb, density, seed))
