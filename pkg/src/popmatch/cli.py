"""Command-line surface: solve, verify, classify edges, oracle checks, benchmarks.

Exit codes: 0 success, 1 input or I/O error, 2 no fully popular matching
exists (``solve``), 3 verification failed (``verify``).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .generator import generate
from .instance import (
    Instance,
    InstanceError,
    Matching,
    compute_posts,
    parse_instance,
    parse_matching,
)
from .legality import legal_edge_set
from .mirror import build_mirror, format_mirror
from .oracle import OracleCapError, ground_truth
from .popularity import check_a_popular, verify_popular
from .solver import solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NONE = 2
EXIT_FAILED = 3


@dataclass(frozen=True)
class RunConfig:
    """Parsed command line."""

    command: str
    instance: str | None = None
    matching: str | None = None
    mode: str = "fully"
    kind: str = "legal"
    backend: str = "fast"
    cross_check: bool = False
    dump_mirror: bool = False
    validate: bool = False
    trace: bool = False
    as_json: bool = False
    agents: int = 4
    jobs: int = 4
    density: float = 0.5
    seed: int = 0
    output: str | None = None
    sizes: tuple[int, ...] = (10_000, 20_000, 40_000, 80_000)
    degree: int = 5


def _load_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text())


def _edge_names(inst: Instance, key: tuple[int, int]) -> list[str]:
    return [inst.names[key[0]], inst.names[key[1]]]


def _matching_json(inst: Instance, mat: Matching) -> list[list[str]]:
    return [[inst.names[a], inst.names[b]] for a, b in mat.pairs(inst)]


def _witness_json(inst: Instance, witness) -> dict[str, int]:
    return {inst.names[u]: witness[u] for u in range(inst.n)}


def _cmd_solve(config: RunConfig) -> int:
    inst = _load_instance(config.instance)
    report = solve(inst, backend=config.backend, validate=config.validate)
    if config.as_json:
        payload: dict = {"outcome": report.outcome}
        if report.outcome == "found":
            payload["matching"] = _matching_json(inst, report.matching)
            payload["witness"] = _witness_json(inst, report.witness)
            payload["size"] = report.size
        else:
            payload["fail_iteration"] = report.fail_iteration
            payload["vertex"] = inst.names[report.infeasible_vertex]
        if config.trace:
            payload["trace"] = [
                {
                    "iteration": row.iteration,
                    "trigger": inst.names[row.trigger],
                    "component": [inst.names[u] for u in row.component],
                    "edges_forbidden": row.edges_forbidden,
                    "proposals_total": row.proposals_total,
                }
                for row in report.trace
            ]
        print(json.dumps(payload))
    elif report.outcome == "found":
        print(f"found: size {report.size}")
        for a, b in report.matching.pairs(inst):
            print(f"  {inst.names[a]} {inst.names[b]}")
        print(
            "witness: "
            + " ".join(
                f"{inst.names[u]}={report.witness[u]:+d}"
                for u in range(inst.n)
            )
        )
        if config.trace:
            for row in report.trace:
                print(
                    f"iteration {row.iteration}: trigger "
                    f"{inst.names[row.trigger]}, marked "
                    f"{len(row.component)} vertices, forbade "
                    f"{row.edges_forbidden} edges"
                )
    else:
        vertex = inst.names[report.infeasible_vertex]
        print(
            f"no fully popular matching (iteration {report.fail_iteration}, "
            f"vertex {vertex} ran out of options)"
        )
    return EXIT_OK if report.outcome == "found" else EXIT_NONE


def _cmd_verify(config: RunConfig) -> int:
    inst = _load_instance(config.instance)
    mat = parse_matching(Path(config.matching).read_text(), inst)
    results: dict[str, bool] = {}
    if config.mode in ("popular", "fully"):
        results["popular"] = verify_popular(inst, mat).popular
    if config.mode in ("a-popular", "fully"):
        results["a-popular"] = check_a_popular(
            inst, compute_posts(inst), mat
        )
    ok = all(results.values())
    if config.as_json:
        print(json.dumps({"ok": ok, "checks": results}))
    else:
        for name, value in results.items():
            print(f"{name}: {'yes' if value else 'no'}")
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_edges(config: RunConfig) -> int:
    inst = _load_instance(config.instance)
    if config.dump_mirror:
        classification = legal_edge_set(inst, backend=config.backend)
        print(format_mirror(build_mirror(inst, classification)), end="")
        return EXIT_OK
    classification = legal_edge_set(inst, backend=config.backend)
    chosen = {
        "valid": classification.valid,
        "popular": classification.popular,
        "legal": classification.legal,
    }[config.kind]
    keys = sorted(chosen)
    if config.as_json:
        print(
            json.dumps(
                {
                    config.kind: [_edge_names(inst, k) for k in keys],
                    "components": [
                        [inst.names[u] for u in comp]
                        for comp in classification.components
                    ],
                }
            )
        )
    else:
        for u, v in keys:
            if u == v:
                print(f"{inst.names[u]} (self)")
            else:
                print(f"{inst.names[u]} {inst.names[v]}")
    return EXIT_OK


def _cmd_oracle(config: RunConfig) -> int:
    inst = _load_instance(config.instance)
    try:
        report = ground_truth(inst)
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = {
        "matchings": report.num_matchings,
        "popular": len(report.popular),
        "a_popular": len(report.a_popular),
        "fully_popular": len(report.fully_popular),
        "max_fully_popular_size": report.max_fully_popular_size,
        "min_popular_size": report.min_popular_size,
        "max_popular_size": report.max_popular_size,
    }
    diffs: list[str] = []
    if config.cross_check:
        solved = solve(inst, backend=config.backend, validate=True)
        oracle_size = report.max_fully_popular_size
        if (solved.outcome == "found") != (oracle_size is not None):
            diffs.append("existence verdict differs")
        elif solved.outcome == "found" and solved.size != oracle_size:
            diffs.append(
                f"solver size {solved.size} != oracle size {oracle_size}"
            )
        from .legality import popular_edges

        fast = popular_edges(inst, backend="fast")
        exact = report.popular_edges | frozenset(
            (u, u) for u in report.popular_loops
        )
        if fast != exact:
            diffs.append("popular edge sets differ")
        payload["diffs"] = diffs
    if config.as_json:
        print(json.dumps(payload))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
    return EXIT_OK if not diffs else EXIT_FAILED


def _cmd_generate(config: RunConfig) -> int:
    text = generate(config.agents, config.jobs, config.density, config.seed)
    if config.output:
        Path(config.output).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_bench(config: RunConfig) -> int:
    print(f"{'edges':>8} {'vertices':>9} {'seconds':>9} {'sec/(m+n)':>12}")
    previous = None
    for m in config.sizes:
        side = max(2, m // config.degree)
        density = m / (side * side)
        text = generate(side, side, min(1.0, density), seed=m)
        inst = parse_instance(text)
        start = time.perf_counter()
        report = solve(inst, backend=config.backend)
        elapsed = time.perf_counter() - start
        total = inst.m + inst.n
        ratio = "" if previous is None else f"x{elapsed / previous:.2f}"
        print(
            f"{inst.m:>8} {inst.n:>9} {elapsed:>9.3f} "
            f"{elapsed / total:>12.2e} {ratio} [{report.outcome}]"
        )
        previous = elapsed
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="popmatch",
        description="Fully popular matchings: solve, verify, classify, cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_instance=True):
        if needs_instance:
            p.add_argument("instance", help="instance file")
        p.add_argument("--json", action="store_true", dest="as_json")
        p.add_argument(
            "--backend", choices=("fast", "oracle"), default="fast"
        )

    p = sub.add_parser("solve", help="find a max-size fully popular matching")
    add_common(p)
    p.add_argument("--validate", action="store_true")
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("verify", help="check a matching file")
    add_common(p)
    p.add_argument("--matching", required=True)
    p.add_argument(
        "--mode", choices=("popular", "a-popular", "fully"), default="fully"
    )

    p = sub.add_parser("edges", help="classify edges and self-loops")
    add_common(p)
    p.add_argument(
        "--kind", choices=("valid", "popular", "legal"), default="legal"
    )
    p.add_argument("--dump-mirror", action="store_true")

    p = sub.add_parser("oracle", help="exhaustive ground truth (small instances)")
    add_common(p)
    p.add_argument("--cross-check", action="store_true")

    p = sub.add_parser("generate", help="emit a seeded random instance")
    p.add_argument("--agents", type=int, default=4)
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")

    p = sub.add_parser("bench", help="solve wall time at growing sizes")
    p.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        default=[10_000, 20_000, 40_000, 80_000],
    )
    p.add_argument("--degree", type=int, default=5)
    p.add_argument(
        "--backend", choices=("fast", "oracle"), default="fast"
    )
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {
        key: value
        for key, value in vars(args).items()
        if key in RunConfig.__dataclass_fields__ and value is not None
    }
    if "sizes" in fields:
        fields["sizes"] = tuple(fields["sizes"])
    return RunConfig(**fields)


def run(config: RunConfig) -> int:
    """Dispatch a parsed configuration; returns the process exit code."""
    handlers = {
        "solve": _cmd_solve,
        "verify": _cmd_verify,
        "edges": _cmd_edges,
        "oracle": _cmd_oracle,
        "generate": _cmd_generate,
        "bench": _cmd_bench,
    }
    try:
        return handlers[config.command](config)
    except (InstanceError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
