"""Command-line front end.

Exit status: 0 on success, 1 when any reported verdict fails (or the machine
is jammed), 2 on usage or input errors. The seed defaults to a fixed value so
bare invocations are reproducible; ``RELQ_SEED`` overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from collections import Counter
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import algorithms as alg
from . import harness, machine, qsim
from . import io as rio
from .errors import Jammed, NetworkFormatError, RelqError
from .harness import DEFAULT_SEED, ExperimentReport, trial_rngs


def _bits_arg(value: str) -> str:
    """A bit string, or ``0x``-prefixed hex (widened to n bits later)."""
    if value[:2].lower() == "0x":
        try:
            int(value, 16)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{value!r} is not hex") from None
        return value.lower()
    if set(value) - {"0", "1"} or not value:
        raise argparse.ArgumentTypeError(f"{value!r} is not a bit string")
    return value


def _resolve_k(value: Optional[str], n: int) -> Optional[str]:
    if value is None:
        return None
    if value.startswith("0x"):
        v = int(value, 16)
        if v >> n:
            raise RelqError(f"--k {value} does not fit in {n} bits")
        return format(v, f"0{n}b")
    if len(value) != n:
        raise RelqError(f"--k must have {n} bits")
    return value


def _sizes_arg(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a comma-separated list of ints") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    common.add_argument("--timing", action="store_true", help="include wall-clock runtime_ms in reports")

    p = argparse.ArgumentParser(prog="relq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deutsch", parents=[common], help="Deutsch's problem, conventional or extended")
    d.add_argument("--k", type=_bits_arg, help="function index k1k2 (default: all four)")
    d.add_argument("--extended", action="store_true")

    g = sub.add_parser("grover", parents=[common], help="Grover search")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--k", type=_bits_arg)
    g.add_argument("--iterations", type=int)
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--extended", action="store_true")
    mode.add_argument("--row-game", action="store_true")

    s = sub.add_parser("simon", parents=[common], help="Simon's hidden string problem")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--k", type=_bits_arg)
    s.add_argument("--iterations", type=int, help="quantum readouts per run (default 6n)")
    s.add_argument("--extended", action="store_true")
    s.add_argument("--canonical", action="store_true", help="canonical coset values instead of random")

    m = sub.add_parser("machine", parents=[common], help="sample a POR network machine")
    m.add_argument("--network", type=Path, required=True)

    nm = sub.add_parser("not-machine", parents=[common], help="the two-part y = not x machine")
    nm.add_argument("--mx", type=float, default=1.0)
    nm.add_argument("--my", type=float, default=1.0)
    nm.add_argument("--q-mass", type=float, default=0.0)

    r = sub.add_parser("rule50", parents=[common], help="quantum cost vs classical cost with 50%% advance knowledge")
    r.add_argument("--problem", choices=("grover", "deutsch", "simon"), required=True)
    r.add_argument("--sizes", type=_sizes_arg, default=None)

    b = sub.add_parser("backdate", parents=[common], help="backdated reduction in extended Grover")
    b.add_argument("--n", type=int, default=2)
    return p


# -- command handlers: each returns (payload, csv rows, reports) ------------


def _random_bits(n: int, rng: np.random.Generator, nonzero: bool = False) -> str:
    return format(int(rng.integers(1 if nonzero else 0, 1 << n)), f"0{n}b")


def cmd_deutsch(args, seed):
    trials = args.trials or 1
    rows = []
    if args.extended:
        for t, rng in enumerate(trial_rngs(seed, trials, stream=1)):
            e = alg.deutsch_extended_run(rng)
            rows.append({"trial": t, "k": e.k, "x": e.x, "answer": e.result.answer,
                         "queries": e.result.oracle_queries, "success": e.result.success})
        hist = Counter(f"{r['k']},{r['x']}" for r in rows)
        return {"command": "deutsch", "extended": True, "trials": trials, "histogram": dict(sorted(hist.items())),
                "runs": rows}, rows, []
    ks = [_resolve_k(args.k, 2)] if args.k else ["00", "01", "10", "11"]
    for k in ks:
        res = alg.deutsch_run(alg.DeutschFunction(k), np.random.default_rng(seed))
        rows.append({"k": k, "answer": res.answer, "queries": res.oracle_queries,
                     "exact_probability": res.success_probability, "success": res.success})
    return {"command": "deutsch", "extended": False, "runs": rows}, rows, []


def cmd_grover(args, seed):
    trials = args.trials or 1
    n = args.n
    given = _resolve_k(args.k, n)
    rows = []
    for t, rng in enumerate(trial_rngs(seed, trials, stream=2)):
        k = given or _random_bits(n, rng)
        if args.extended:
            e = alg.grover_extended_run(n, rng)
            rows.append({"trial": t, "k": e.k, "answer": e.x, "queries": e.result.oracle_queries,
                         "exact_probability": e.result.success_probability, "success": e.result.success})
            continue
        if args.row_game:
            res = alg.grover_row_game(n, k, rng)
        else:
            res = alg.grover_run(alg.GroverInstance(n, k), rng, args.iterations)
        rows.append({"trial": t, "k": k, "answer": res.answer, "queries": res.oracle_queries,
                     "exact_probability": res.success_probability, "success": res.success})
    payload = {
        "command": "grover",
        "mode": "extended" if args.extended else "row-game" if args.row_game else "standard",
        "n": n,
        "trials": trials,
        "success_rate": sum(r["success"] for r in rows) / trials,
        "runs": rows,
    }
    return payload, rows, []


def cmd_simon(args, seed):
    trials = args.trials or 1
    n = args.n
    iterations = args.iterations or 6 * n
    given = _resolve_k(args.k, n)
    rows = []
    for t, rng in enumerate(trial_rngs(seed, trials, stream=3)):
        if args.extended:
            e = alg.simon_extended_run(n, iterations, rng)
            k, res = e.k, e.result
        else:
            k = given or _random_bits(n, rng, nonzero=True)
            inst = alg.simon_build_function(n, k, rng, canonical=args.canonical)
            res = alg.simon_run(inst, iterations, rng)
        rows.append({"trial": t, "k": k, "answer": res.answer, "queries": res.oracle_queries,
                     "success": res.success, "samples": res.samples})
    payload = {
        "command": "simon",
        "extended": args.extended,
        "n": n,
        "iterations": iterations,
        "trials": trials,
        "success_rate": sum(r["success"] for r in rows) / trials,
        "exact_success_probability": harness.simon_success_prob_exact(n, iterations),
        "runs": rows,
    }
    return payload, rows, []


def _frequency_reports(claim, exact: dict, samples: list, seed, trials) -> list[ExperimentReport]:
    tol = 4 * math.sqrt(math.log(trials) / trials) if trials > 1 else 1.0
    counts = Counter(samples)
    reports = []
    for key, p in exact.items():
        freq = counts.get(key, 0) / trials
        reports.append(ExperimentReport(f"{claim}.{key}", p, freq, tol, abs(freq - p) <= tol, seed, trials))
    stray = sum(c for key, c in counts.items() if key not in exact)
    reports.append(ExperimentReport(f"{claim}.outside_support", 0.0, stray / trials, 0.0, stray == 0, seed, trials))
    return reports


def cmd_machine(args, seed):
    trials = args.trials or 10_000
    spec = rio.load_network(args.network)
    net = spec.network
    try:
        dist = machine.exact_distribution(spec)
    except Jammed as e:
        raise Jammed(f"network {args.network} is unsatisfiable: {e}") from None
    label = lambda a: "".join(map(str, a))  # noqa: E731
    rng = np.random.default_rng(seed)
    sampled = [label(a) for a in machine.sample_solution(spec, rng, size=trials)]
    exact = {label(a): p for a, p in dist.entries}
    reports = _frequency_reports("machine", exact, sampled, seed, trials)
    payload = {
        "command": "machine",
        "network": str(args.network),
        "variables": [net.name(v) for v in range(net.num_vars)],
        "trials": trials,
        "exact": exact,
        "empirical": {k: c / trials for k, c in sorted(Counter(sampled).items())},
        "note": "multi-gate mass combination is additive (q_mass + selected part masses)",
    }
    return payload, None, reports


def cmd_not_machine(args, seed):
    trials = args.trials or 10_000
    rows = []
    samples = []
    for rng in trial_rngs(seed, trials, stream=4):
        run = machine.not_machine((args.mx, args.my), args.q_mass, rng)
        samples.append("X" if run.x else "Y")
    p = machine.not_machine_probability((args.mx, args.my), args.q_mass)
    reports = _frequency_reports("not_machine", {"X": p, "Y": 1 - p}, samples, seed, trials)
    counts = Counter(samples)
    payload = {
        "command": "not-machine",
        "masses": [args.mx, args.my],
        "q_mass": args.q_mass,
        "trials": trials,
        "p_x_moves": p,
        "frequencies": {k: counts.get(k, 0) / trials for k in ("X", "Y")},
    }
    return payload, rows, reports


def cmd_rule50(args, seed):
    trials = args.trials or 10_000
    reports = harness.rule50_report(args.problem, args.sizes or (), seed, trials)
    return {"command": "rule50", "problem": args.problem}, None, reports


def cmd_backdate(args, seed):
    return {"command": "backdate", "n": args.n}, None, harness.backdate_report(args.n, seed)


HANDLERS = {
    "deutsch": cmd_deutsch,
    "grover": cmd_grover,
    "simon": cmd_simon,
    "machine": cmd_machine,
    "not-machine": cmd_not_machine,
    "rule50": cmd_rule50,
    "backdate": cmd_backdate,
}


def _render(args, seed, payload, rows, reports) -> str:
    report_docs = [rio.report_to_json(r, args.timing) for r in reports]
    if args.format == "csv":
        if reports:
            return rio.rows_to_csv(report_docs)
        return rio.rows_to_csv(rows or [payload])
    doc = dict(payload)
    doc["seed"] = seed
    if reports:
        doc["reports"] = report_docs
        doc["verdict"] = all(r.verdict for r in reports)
    return rio.dumps(doc)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    seed = args.seed
    env = os.environ.get("RELQ_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            print(f"relq: RELQ_SEED={env!r} is not an integer", file=sys.stderr)
            return 2
    if not 0 <= seed < 2**64:
        print("relq: seed must be a 64-bit unsigned integer", file=sys.stderr)
        return 2
    if args.trials is not None and args.trials < 1:
        print("relq: --trials must be >= 1", file=sys.stderr)
        return 2
    try:
        payload, rows, reports = HANDLERS[args.command](args, seed)
        text = _render(args, seed, payload, rows, reports)
        if args.out:
            args.out.write_text(text)
        else:
            sys.stdout.write(text)
    except Jammed as e:
        print(f"relq: jammed: {e}", file=sys.stderr)
        return 1
    except NetworkFormatError as e:
        print(f"relq: invalid network: {e}", file=sys.stderr)
        return 2
    except (RelqError, OSError, ValueError) as e:
        print(f"relq: {e}", file=sys.stderr)
        return 2
    return 0 if all(r.verdict for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
