"""Batch front-end: run the simulation protocol, sweep the bound-decay
grid, and verify the bound suite, emitting deterministic CSV/JSON.

Exit codes: 0 all good / all bounds satisfied, 1 a bound was violated,
2 usage or budget errors.  Identical arguments and seed give byte-identical
output; wall-clock timing goes to stderr so records stay reproducible.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis, linalg, model, protocols
from .analysis import BoundReport
from .model import ALICE, BOB, BudgetError, PureState, Register, RegisterLayout

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _input_state(spec: str, d: int, seed: int) -> PureState:
    n = d + 1
    layout = RegisterLayout((Register("A", n, ALICE), Register("B", n, BOB)))
    if spec == "phi":
        return model.make_phi(d)
    if spec == "random":
        rng = np.random.default_rng(seed)
        return PureState(layout, linalg.random_pure_vector(n * n, rng))
    digits = spec
    if len(digits) != 2 or not digits.isdigit():
        raise ValueError(f"input spec {spec!r}: expected 'phi', 'random', or two digits like '00'")
    a, b = int(digits[0]), int(digits[1])
    if a >= n or b >= n:
        raise ValueError(f"basis label {spec!r} out of range for d={d}")
    amps = np.zeros(n * n, dtype=complex)
    amps[a * n + b] = 1.0
    return PureState(layout, amps)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    state = _input_state(args.input, args.d, args.seed)
    t0 = time.perf_counter()
    result = protocols.run_w(
        state, args.d, args.m, mode=args.mode, integral_qubits=args.integral_qubits
    )
    exact = protocols.exact_gate_action(state, model.make_gate_u(args.d)).density()
    measured = linalg.trace_distance(result.final_density, exact)
    elapsed = time.perf_counter() - t0
    bound = 2.0 * math.sqrt(2.0 / args.m)
    record = {
        "command": "simulate",
        "d": args.d,
        "m": args.m,
        "mode": args.mode,
        "input": args.input,
        "seed": args.seed,
        "measured_trace_distance": float(measured),
        "bound": bound,
        "satisfied": bool(measured <= bound + 1e-9),
        "ledger": result.ledger.as_dict(),
        "transcript": result.transcript,
    }
    print(f"runtime: {elapsed:.3f}s", file=sys.stderr)
    _emit(_json_dumps(record), args.out)
    return EXIT_OK if record["satisfied"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_trial(task: tuple[int, int, int]) -> float:
    d, m, trial_seed = task
    rng = np.random.default_rng(trial_seed)
    pair_dim = (d + 1) ** 2
    phi = linalg.random_pure_vector(pair_dim * pair_dim, rng).reshape(pair_dim, pair_dim)
    return analysis.simulation_pair_distance(phi, d, m)


def cmd_sweep(args) -> int:
    m_list = [int(tok) for tok in args.m_list.split(",") if tok.strip()]
    if not m_list:
        raise ValueError("empty m-list")
    rows = []
    seeds = np.random.SeedSequence(args.seed).spawn(len(m_list))
    for m, seq in zip(m_list, seeds):
        trial_seeds = [int(s.generate_state(1)[0]) for s in seq.spawn(args.trials)]
        tasks = [(args.d, m, ts) for ts in trial_seeds]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                values = list(pool.map(_sweep_trial, tasks))
        else:
            values = [_sweep_trial(t) for t in tasks]
        bound = 2.0 * math.sqrt(2.0 / m)
        qubits = 2.0 * math.log2(m)
        rows.append(
            {
                "d": args.d,
                "m": m,
                "trials": args.trials,
                "max_measured_distance": max(values),
                "bound": bound,
                "satisfied": bool(max(values) <= bound + 1e-9),
                "fwd_qubits": qubits,
                "bwd_qubits": qubits,
                "bits_equiv": 4.0 * qubits,
            }
        )
    if args.format == "json":
        _emit(_json_dumps(rows), args.out)
    else:
        header = [
            "d", "m", "trials", "max_measured_distance", "bound", "satisfied",
            "fwd_qubits", "bwd_qubits", "bits_equiv",
        ]
        lines = [",".join(header)]
        for r in rows:
            lines.append(
                ",".join(
                    [
                        str(r["d"]), str(r["m"]), str(r["trials"]),
                        _fmt(r["max_measured_distance"]), _fmt(r["bound"]),
                        "true" if r["satisfied"] else "false",
                        _fmt(r["fwd_qubits"]), _fmt(r["bwd_qubits"]), _fmt(r["bits_equiv"]),
                    ]
                )
            )
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r["satisfied"] for r in rows) else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _margin_report(name: str, reports: list[BoundReport], context: dict) -> BoundReport:
    """Aggregate per-input reports whose bounds differ: the measured value
    becomes the worst violation margin (<= 0 means all held)."""
    margin = max(r.measured - r.bound for r in reports)
    return BoundReport(name, margin, 0.0, dict(context, inputs=len(reports)))


def _bounds_suite(seed: int, trials: int, search_trials: int) -> list[BoundReport]:
    rng = np.random.default_rng(seed)
    reports: list[BoundReport] = []

    # deviation-term bounds on random general inputs (grid kept within budget)
    for d, m in ((1, 2), (1, 4), (2, 2), (2, 4)):
        per_input = []
        for _ in range(trials):
            g = analysis.random_general_input(rng, d)
            per_input.extend(analysis.verify_appendix_bounds(g, m))
        reports.append(_margin_report("deviation-bounds-max-margin", per_input, {"d": d, "m": m}))

    # diamond estimates against the decay bounds
    for m in (2, 4, 8, 16):
        for pair in ("ma-mi", "w-u"):
            reports.append(analysis.channel_distance_search(pair, 1, m, "ansatz", search_trials, seed))

    # communication cost identity on an epsilon grid
    eps_grid = np.geomspace(1.0, 2.0**-10, 20)
    worst = max(
        abs(analysis.simulation_cost(float(e)).classical_bits - (24.0 + 16.0 * math.log2(1.0 / e)))
        for e in eps_grid
    )
    reports.append(BoundReport("cost-identity", worst, 1e-9, {"grid_points": len(eps_grid)}))

    # entangled-state simulation lower bound, reference point
    b = analysis.epr_lower_bound(16, 2.0**-18)
    reports.append(
        BoundReport(
            "epr-lower-bound-reference",
            abs((b.bits or 0.0) - (7.0 + math.log2(0.28125))),
            1e-9,
            {"d": 16, "epsilon": 2.0**-18, "delta": b.delta},
        )
    )

    # capacity chain majorant consistency
    ch = analysis.capacity_bound_chain(1024, 3)
    reports.append(
        BoundReport(
            "capacity-chain-majorants",
            max(iv - tv for iv, tv in zip(ch.intermediates, ch.terms)),
            0.0,
            {"n": ch.n, "c": ch.c, "total": ch.total},
        )
    )

    # conditional-entropy continuity on random pairs
    fa_reports = []
    for dim_z in (2, 4, 8):
        for _ in range(trials):
            s1 = linalg.random_density_matrix((2, dim_z), rng)
            s2 = linalg.random_density_matrix((2, dim_z), rng)
            fa_reports.append(analysis.fannes_alicki_check(s1, s2, [0]))
    reports.append(_margin_report("conditional-entropy-continuity-max-margin", fa_reports, {"dim_y": 2}))

    # information-gain continuity for the simulation pair at m=16
    d, m = 1, 16
    chan_u = analysis.exact_gate_channel(d)
    chan_w = analysis.simulation_channel(d, m)
    eps = 2.0 * math.sqrt(2.0 / m)
    gap_reports = []
    for _ in range(5):
        members = []
        sizes = rng.integers(2, 4)
        probs = rng.dirichlet(np.ones(sizes))
        for p in probs:
            v = linalg.random_pure_vector(16, rng)
            members.append((float(p), linalg.DensityOperator.from_pure(v, (2, 2, 2, 2))))
        ens = linalg.Ensemble(tuple(members))
        gap_reports.append(analysis.continuity_gap_check(chan_u, chan_w, eps, ens, d, [1, 3]))
    reports.append(_margin_report("information-gain-continuity-max-margin", gap_reports, {"d": d, "m": m}))

    # entanglement created/removed by the gate
    for d in (2, 3, 4):
        u = model.make_gate_u(d)
        n = d + 1
        zeros = np.zeros(n * n, dtype=complex)
        zeros[0] = 1.0
        ground = PureState(RegisterLayout((Register("A", n, ALICE), Register("B", n, BOB))), zeros)
        delta_up = analysis.entanglement_delta(u, ground, ["A"])
        delta_down = analysis.entanglement_delta(u, model.make_phi(d), ["A"])
        reports.append(
            BoundReport(
                "entanglement-delta",
                max(abs(delta_up - math.log2(d)), abs(delta_down + math.log2(d))),
                1e-9,
                {"d": d},
            )
        )
    return reports


def cmd_bounds(args) -> int:
    if args.delta_eps:
        b = analysis.epr_lower_bound(args.d, args.epsilon)
        record = {
            "command": "bounds --delta-eps",
            "d": args.d,
            "epsilon": args.epsilon,
            "delta": b.delta,
            "bits": b.bits,
            "vacuous": b.vacuous,
        }
        _emit(_json_dumps(record), args.out)
        return EXIT_OK
    if args.chain:
        ch = analysis.capacity_bound_chain(args.n, args.c)
        record = {
            "command": "bounds --chain",
            "n": ch.n,
            "c": ch.c,
            "terms": list(ch.terms),
            "intermediates": list(ch.intermediates),
            "total": ch.total,
        }
        _emit(_json_dumps(record), args.out)
        return EXIT_OK

    t0 = time.perf_counter()
    reports = _bounds_suite(args.seed, args.trials, args.search_trials)
    print(f"runtime: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    payload = {
        "all_satisfied": all(r.satisfied for r in reports),
        "reports": [r.to_dict() for r in reports],
        "seed": args.seed,
    }
    _emit(_json_dumps(payload), args.out)
    if not payload["all_satisfied"]:
        for r in reports:
            if not r.satisfied:
                print(f"violated: {r.to_dict()['context']}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocalsim",
        description="Simulate the catalyst-assisted gate protocol and verify its bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="one protocol run against the exact gate")
    sim.add_argument("--d", type=int, required=True, help="local dimension parameter (registers are d+1-dimensional)")
    sim.add_argument("--m", type=int, required=True, help="catalyst size")
    sim.add_argument("--mode", choices=("approx", "ideal"), default="approx")
    sim.add_argument("--input", default="00", help="'00'-style basis label, 'phi', or 'random'")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--integral-qubits", action="store_true", help="charge ceil(log2 dim) per register move")
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="bound-decay table over m")
    sw.add_argument("--d", type=int, default=1)
    sw.add_argument("--m-list", default="2,4,8,16")
    sw.add_argument("--trials", type=int, default=100)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", default=None)
    sw.set_defaults(func=cmd_sweep)

    bd = sub.add_parser("bounds", help="run the bound verification suite")
    bd.add_argument("--seed", type=int, default=0)
    bd.add_argument("--trials", type=int, default=25, help="random inputs per sweep family")
    bd.add_argument("--search-trials", type=int, default=8, help="restarts per diamond search")
    bd.add_argument("--delta-eps", action="store_true", help="evaluate the entangled-simulation lower bound only")
    bd.add_argument("--chain", action="store_true", help="evaluate the capacity bound chain only")
    bd.add_argument("--d", type=int, default=16)
    bd.add_argument("--epsilon", type=float, default=2.0**-18)
    bd.add_argument("--n", type=int, default=1024)
    bd.add_argument("--c", type=float, default=3.0)
    bd.add_argument("--out", default=None)
    bd.set_defaults(func=cmd_bounds)
    return parser


def main(argv: list[str] | None = None) -> int:
    if os.environ.get("NONLOCALSIM_MAX_AMPLITUDES"):
        cap = model.max_amplitudes()
        if cap < 2**10:
            print(f"amplitude cap {cap} below the 2^10 minimum", file=sys.stderr)
            return EXIT_USAGE
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
