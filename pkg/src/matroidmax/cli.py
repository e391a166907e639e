"""Command-line interface: solve an instance file, run benchmarks, self-check.

Exit codes: 0 on success, 1 on a failed self-check, 2 on validation errors
(bad flags, unreadable or malformed instance files).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import parse_sizes, run_bench, write_csv
from .continuous_greedy import ContinuousGreedyConfig
from .lazy_greedy import LazySamplingGreedy
from .matroids import GraphicMatroid, PartitionMatroid, max_weight_base_bruteforce
from .pipeline import SolveReport, baseline_greedy, estimate_opt, load_instance, maximize
from .dynamic_base import NaiveDynamicBase, WeightGrid, build_dynamic_base
from .euler_forest import EulerForest
from .oracles import CoverageOracle
from .rounding import BaseCombination, swap_round

__all__ = ["main"]


def _cmd_solve(args) -> int:
    try:
        oracle, matroid = load_instance(args.instance)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    try:
        if args.algo == "pipeline":
            report = maximize(
                oracle, matroid, args.eps, rng, restarts=args.restarts, seed=args.seed
            )
        elif args.algo == "greedy":
            solution = baseline_greedy(oracle, matroid)
            report = _plain_report("greedy", oracle, matroid, args, sorted(solution))
        else:  # lazy-only
            cap = estimate_opt(oracle, matroid, min(args.eps, 0.24))
            solution: list[int] = []
            if cap > 0:
                lazy = LazySamplingGreedy(oracle, matroid, args.eps, cap, rng)
                solution = sorted(lazy.run())
            report = _plain_report("lazy-only", oracle, matroid, args, solution)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def _plain_report(algo, oracle, matroid, args, solution) -> SolveReport:
    value = oracle.peek(solution)
    return SolveReport(
        algo=algo,
        n=matroid.n,
        rank=matroid.rank,
        eps=args.eps,
        seed=args.seed,
        restarts=1,
        solution=list(solution),
        value=value,
        opt_estimate=float("nan"),
        lazy_size=len(solution),
        fractional_estimate=float("nan"),
        phase_calls={algo: oracle.call_count},
        phase_seconds={},
        indep_ops=0,
        total_calls=oracle.call_count,
        feasible=matroid.is_independent(solution),
    )


def _cmd_bench(args) -> int:
    try:
        sizes = parse_sizes(args.sizes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    try:
        rows = run_bench(
            args.family,
            sizes,
            args.seeds,
            args.eps,
            algos,
            sample_cap=args.sample_cap,
            progress=lambda row: print(
                f"{row.instance} seed={row.seed} algo={row.algo} "
                f"value={row.value:.3f} calls={row.calls} secs={row.secs:.2f}",
                file=sys.stderr,
            ),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        write_csv(rows, args.out)
    else:
        for row in rows:
            print(",".join(str(v) for v in row.as_list()))
    return 0


# -- selfcheck ----------------------------------------------------------------------


def _check_dynamic_base(inject_fault: bool) -> list[str]:
    failures = []
    rng = np.random.default_rng(99)
    part_of = [int(rng.integers(0, 6)) for _ in range(30)]
    sizes = np.bincount(part_of, minlength=6)
    matroid = PartitionMatroid(part_of, [int(min(2, s)) for s in sizes])
    weights = rng.uniform(1.0, 10.0, size=30)
    grid = WeightGrid(float(weights.max()), 0.3, matroid.rank)
    fast = build_dynamic_base(matroid, weights, grid.cap, 0.3, backend="partition", grid=grid)
    naive = NaiveDynamicBase(
        matroid, weights, grid, fault_after=3 if inject_fault else None
    )
    current = weights.copy()
    for step in range(40):
        base = sorted(fast.base_set() - fast.frozen)
        candidates = [e for e in base if e in naive.base_set() and e not in naive.frozen]
        if not candidates:
            break
        e = candidates[int(rng.integers(len(candidates)))]
        current[e] *= float(rng.uniform(0.1, 0.9))
        fast.update_base(e, current[e])
        naive.update_base(e, current[e])
        if fast.total_weight() != naive.total_weight():
            failures.append(
                f"dynamic-base mismatch at step {step}: "
                f"{fast.total_weight()} != {naive.total_weight()}"
            )
            break
    else:
        brute = max_weight_base_bruteforce(
            matroid, grid.level_weights[fast.level - 1]
        )
        counts = np.zeros(grid.num_buckets + 2, dtype=np.int64)
        for e in brute:
            counts[grid.level_of(grid.level_weights[fast.level[e] - 1])] += 1
        if grid.total(counts) != fast.total_weight():
            failures.append("dynamic-base lost max-weight invariant")
    return failures


def _check_euler_forest() -> list[str]:
    import random
    from collections import deque

    failures = []
    rng = random.Random(7)
    n = 80
    forest = EulerForest(n)
    adj = {v: set() for v in range(n)}
    edges = {}
    next_id = 0

    def connected(a, b):
        seen = {a}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y == b:
                    return True
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return a == b

    for _ in range(4000):
        u, v = rng.randrange(n), rng.randrange(n)
        roll = rng.random()
        if roll < 0.45 and u != v and not connected(u, v):
            forest.link(u, v, next_id)
            adj[u].add(v)
            adj[v].add(u)
            edges[next_id] = (u, v)
            next_id += 1
        elif roll < 0.7 and edges:
            k = rng.choice(list(edges))
            a, b = edges.pop(k)
            forest.cut(k)
            adj[a].discard(b)
            adj[b].discard(a)
        else:
            if forest.same_tree(u, v) != connected(u, v):
                failures.append(f"euler forest connectivity mismatch at ({u}, {v})")
                break
    return failures


def _check_rounding() -> list[str]:
    failures = []
    rng = np.random.default_rng(17)
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]
    gm = GraphicMatroid(4, edges)
    bases = [frozenset({0, 1, 2}), frozenset({1, 2, 3}), frozenset({0, 2, 4})]
    comb = BaseCombination(list(bases), [0.25, 0.5, 0.25])
    for _ in range(50):
        out = swap_round(gm, comb, rng)
        if not gm.is_base(out):
            failures.append(f"graphic rounding output is not a spanning tree: {sorted(out)}")
            break
    pm = PartitionMatroid([0, 0, 1, 1], [1, 1])
    combp = BaseCombination([frozenset({0, 2}), frozenset({1, 3})], [0.4, 0.6])
    for _ in range(50):
        out = swap_round(pm, combp, rng)
        if not pm.is_base(out):
            failures.append(f"partition rounding output is not a base: {sorted(out)}")
            break
    return failures


def _check_lazy_greedy() -> list[str]:
    failures = []
    rng = np.random.default_rng(3)
    oracle, matroid = None, None
    universe = 40
    sets = [np.unique(rng.integers(0, universe, size=4)) for _ in range(60)]
    oracle = CoverageOracle(universe, sets)
    matroid = PartitionMatroid([e % 8 for e in range(60)], [1] * 8)
    cap = estimate_opt(oracle, matroid, 0.1)
    lazy = LazySamplingGreedy(oracle, matroid, 0.2, cap, rng)
    solution = lazy.run()
    if not matroid.is_independent(solution):
        failures.append("lazy greedy produced a dependent set")
    return failures


def _cmd_selfcheck(args) -> int:
    suites = [
        ("dynamic-base", lambda: _check_dynamic_base(args.inject_fault)),
        ("euler-forest", _check_euler_forest),
        ("rounding", _check_rounding),
        ("lazy-greedy", _check_lazy_greedy),
    ]
    failed = False
    for name, suite in suites:
        failures = suite()
        status = "ok" if not failures else "FAIL"
        print(f"selfcheck {name}: {status}")
        for message in failures:
            failed = True
            print(f"  {message}", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matroidmax",
        description="Submodular maximization under explicit matroid constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance file (objective + matroid)")
    solve.add_argument("instance", help="path to the instance file")
    solve.add_argument("--eps", type=float, default=0.1)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--algo", choices=["pipeline", "greedy", "lazy-only"], default="pipeline")
    solve.add_argument("--restarts", type=int, default=3)
    solve.add_argument("--out", help="write the JSON report here instead of stdout")
    solve.set_defaults(func=_cmd_solve)

    bench = sub.add_parser("bench", help="run a benchmark family over a size sweep")
    bench.add_argument("--family", choices=["coverage", "welfare"], default="coverage")
    bench.add_argument("--sizes", default="2^10..2^12", help="e.g. 2^12..2^16 or 1024,4096")
    bench.add_argument("--seeds", type=int, default=1)
    bench.add_argument("--eps", type=float, default=0.2)
    bench.add_argument("--algos", default="pipeline,greedy")
    bench.add_argument("--sample-cap", type=int, default=8, dest="sample_cap")
    bench.add_argument("--out", help="write CSV here instead of stdout")
    bench.set_defaults(func=_cmd_bench)

    selfcheck = sub.add_parser("selfcheck", help="run the built-in oracle-equivalence suites")
    selfcheck.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    selfcheck.set_defaults(func=_cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
