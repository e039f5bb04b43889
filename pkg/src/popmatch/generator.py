"""Seeded random instance generation."""

from __future__ import annotations

import math
import random

_MAX_REROLLS = 1000


def _bernoulli_row(rng: random.Random, jobs: int, log_skip: float) -> list[int]:
    # Geometric gaps between kept columns: equivalent to an independent coin
    # per column, but costs only as many draws as columns kept.
    row = []
    j = -1
    while True:
        j += 1 + int(math.log(1.0 - rng.random()) / log_skip)
        if j >= jobs:
            return row
        row.append(j)


def generate(agents: int, jobs: int, density: float, seed: int) -> str:
    """Random bipartite instance text, byte-identical for equal parameters.

    Every agent/job pair is kept independently with probability ``density``;
    each side's realized neighbor list is then shuffled independently.
    Agents that end up with no neighbors get their row re-rolled, since
    every agent needs at least one genuine neighbor.
    """
    if agents < 1 or jobs < 1:
        raise ValueError("need at least one agent and one job")
    if not 0 < density <= 1:
        raise ValueError("density must be in (0, 1]")
    rng = random.Random(seed)
    log_skip = math.log1p(-density) if density < 1.0 else None

    rows: list[list[int]] = []
    for _ in range(agents):
        for _attempt in range(_MAX_REROLLS):
            if log_skip is None:
                row = list(range(jobs))
            else:
                row = _bernoulli_row(rng, jobs, log_skip)
            if row:
                break
        else:
            raise ValueError("density too low to give every agent a neighbor")
        rows.append(row)

    cols: list[list[int]] = [[] for _ in range(jobs)]
    for i, row in enumerate(rows):
        for j in row:
            cols[j].append(i)

    lines = [
        "agents: " + " ".join(f"a{i}" for i in range(agents)),
        "jobs: " + " ".join(f"b{j}" for j in range(jobs)),
    ]
    for i, row in enumerate(rows):
        order = row[:]
        rng.shuffle(order)
        lines.append(f"a{i} > " + " ".join(f"b{j}" for j in order))
    for j, col in enumerate(cols):
        rng.shuffle(col)
        lines.append(f"b{j} > " + " ".join(f"a{i}" for i in col))
    return "\n".join(lines) + "\n"
