"""Command-line entry point: ``qcut {gen,cut,estimate,run,verify}``.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 infeasible cut,
4 verification failure, 5 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import benchmarks
from .circuit import Circuit, CircuitError, parse_circuit, write_circuit
from .cost import CostModelConfig, hss_metrics, total_runtime
from .cutter import assignment_from_json, enumerate_variants, extract_subcircuits, plan_summary, plan_to_json
from .dag import build_dag, to_dot
from .finder import CutFinderConfig, InfeasibleCutError, find_cuts
from .pipeline import DEFAULT_MEMORY_CAP, default_threads, reconstruct, run_tensors
from .simulator import ResourceCapError, probabilities, write_tensor
from .tensornet import NetworkError, TensorNetwork, contraction_report, find_order

EXIT_USAGE, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_CAP = 1, 2, 3, 4, 5
VERIFY_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_circuit(path: str) -> tuple[Circuit, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return parse_circuit(text), hashlib.sha256(text.encode()).hexdigest()


def _finder_config(args, c: Circuit) -> CutFinderConfig:
    w_max = args.wmax if args.wmax is not None else math.ceil(c.num_qubits / 2) + 1
    s_max = args.smax if args.smax is not None else max(1, c.num_two_qubit_gates)
    if w_max < 2:
        raise InfeasibleCutError(f"w_max={w_max} cannot hold a two-qubit gate")
    try:
        return CutFinderConfig(w_max, s_max, args.kt, args.qmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _plan(args, c: Circuit):
    if getattr(args, "plan", None):
        try:
            data = json.loads(Path(args.plan).read_text())
            assignment = assignment_from_json(data)
        except (OSError, ValueError, KeyError) as exc:
            raise CircuitError(f"bad plan file {args.plan}: {exc}") from None
        return extract_subcircuits(c, assignment), None
    config = _finder_config(args, c)
    state = find_cuts(build_dag(c), config)
    return extract_subcircuits(c, state, w_max=config.w_max), config


def _config_echo(config: CutFinderConfig | None) -> dict:
    if config is None:
        return {}
    return {"w_max": config.w_max, "s_max_gates": config.s_max_gates, "K_t": config.k_t,
            "Q_max": config.q_max}


def _emit(args, report: dict) -> None:
    report.setdefault("timestamp", datetime.now(timezone.utc).isoformat())
    text = json.dumps(report, indent=2 if args.pretty else None)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.pretty:
        _print_table(report)


def _print_table(report: dict) -> None:
    rows = []
    for section in ("cut", "contraction", "cost", "metrics", "verification"):
        block = report.get(section)
        if isinstance(block, dict):
            for key, value in block.items():
                if isinstance(value, (int, float, str, bool)):
                    rows.append((f"{section}.{key}", value))
    if rows:
        width = max(len(k) for k, _ in rows)
        for key, value in rows:
            print(f"{key:<{width}}  {value}", file=sys.stderr)


def cmd_gen(args) -> int:
    params = {}
    if args.p is not None:
        params["p"] = args.p
    if args.degree is not None:
        params["degree"] = args.degree
    c = benchmarks.gen_benchmark(args.kind, args.n, args.seed, **params)
    text = write_circuit(c)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_cut(args) -> int:
    c, digest = _load_circuit(args.circuit)
    plan, config = _plan(args, c)
    report = plan_to_json(plan, _config_echo(config))
    report["input"] = {"path": args.circuit, "sha256": digest}
    if args.emit_dot:
        assignment = assignment_from_json(report)
        Path(args.emit_dot).write_text(to_dot(build_dag(c), c, assignment))
    if args.emit_variants:
        out = Path(args.emit_variants)
        out.mkdir(parents=True, exist_ok=True)
        for s in plan.subcircuits:
            for k, ((settings, inits), vc) in enumerate(enumerate_variants(s)):
                header = f"# subcircuit {s.id} measure {','.join(settings) or '-'} init {','.join(inits) or '-'}\n"
                (out / f"sub{s.id}_v{k}.qc").write_text(header + write_circuit(vc))
    _emit(args, report)
    return 0


def _cost_config(args) -> CostModelConfig:
    try:
        return CostModelConfig(args.tg, args.tm, args.flops, args.qpus)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_estimate(args) -> int:
    c, digest = _load_circuit(args.circuit)
    plan, config = _plan(args, c)
    tree = None
    contraction = None
    if plan.m > 1:
        net = TensorNetwork.from_topology([s.edges for s in plan.subcircuits],
                                          [2**s.num_outputs for s in plan.subcircuits])
        tree = find_order(net, restarts=args.restarts, seed=args.seed, allow_disconnected=True)
        contraction = contraction_report(tree, None, args.states)
    cost = total_runtime(plan, tree, args.states, _cost_config(args))
    _emit(args, {
        "schema": 1, "command": "estimate",
        "input": {"path": args.circuit, "sha256": digest},
        "config": {**_config_echo(config), "seed": args.seed, "restarts": args.restarts},
        "cut": plan_summary(plan),
        "contraction": contraction,
        "cost": cost.to_json(),
    })
    return 0


def cmd_run(args) -> int:
    c, digest = _load_circuit(args.circuit)
    threads = args.threads or default_threads()
    plan, config = _plan(args, c)
    tensors = run_tensors(plan, mode=args.mode, shots=args.shots, seed=args.seed, threads=threads)
    if args.dump_tensors:
        out = Path(args.dump_tensors)
        out.mkdir(parents=True, exist_ok=True)
        for s, t in zip(plan.subcircuits, tensors):
            write_tensor(out / f"sub{s.id}.tensor", t)
    rec = reconstruct(plan, tensors, hss_budget=args.hss, restarts=args.restarts, seed=args.seed,
                      memory_cap=args.memory_cap, threads=threads, clip=args.clip)
    dist = rec.distribution
    states = len(dist.states)
    cost = total_runtime(plan, rec.tree if plan.m > 1 else None, states, _cost_config(args))

    metrics = verification = None
    code = 0
    if c.num_qubits <= args.oracle_max_qubits:
        truth = probabilities(c)
        linf = float(np.max(np.abs(dist.values - truth[dist.states])))
        verification = {"linf": linf, "tolerance": VERIFY_TOL, "passed": linf <= VERIFY_TOL}
        if args.mode == "exact" and not args.clip and linf > VERIFY_TOL:
            code = EXIT_VERIFY
        metrics = hss_metrics(dist, states, truth).to_json()

    _emit(args, {
        "schema": 1, "command": "run",
        "input": {"path": args.circuit, "sha256": digest, "num_qubits": c.num_qubits,
                  "gates": len(c.gates)},
        "config": {**_config_echo(config), "hss": args.hss, "mode": args.mode, "shots": args.shots,
                   "seed": args.seed, "restarts": args.restarts, "memory_cap": args.memory_cap,
                   "clip": args.clip},
        "cut": plan_summary(plan),
        "contraction": contraction_report(rec.tree, rec.slices, states),
        "hss": rec.selection.to_json() if rec.selection else None,
        "cost": cost.to_json(),
        "metrics": metrics,
        "verification": verification,
        "top": [{"state": s, "value": v} for s, v in dist.top(args.top)],
    })
    return code


def cmd_verify(args) -> int:
    c, digest = _load_circuit(args.circuit)
    plan, config = _plan(args, c)
    truth = probabilities(c)
    tensors = run_tensors(plan, threads=args.threads or default_threads())
    rec = reconstruct(plan, tensors, restarts=args.restarts, seed=args.seed)
    diff = rec.distribution.dense() - truth
    linf = float(np.max(np.abs(diff)))
    passed = linf <= VERIFY_TOL
    _emit(args, {
        "schema": 1, "command": "verify",
        "input": {"path": args.circuit, "sha256": digest},
        "config": _config_echo(config),
        "cut": plan_summary(plan),
        "verification": {"linf": linf, "l1": float(np.sum(np.abs(diff))),
                         "tolerance": VERIFY_TOL, "passed": passed},
    })
    return 0 if passed else EXIT_VERIFY


def _add_cut_flags(p):
    p.add_argument("--wmax", type=int, help="max qubits per subcircuit (default ceil(n/2)+1)")
    p.add_argument("--smax", type=int, help="max 2-qubit gates per subcircuit (default: all)")
    p.add_argument("--kt", type=int, default=10, help="contraction-edge threshold K_t")
    p.add_argument("--qmax", type=float, default=1e4, help="merging-cost cutoff Q_max")


def _add_output_flags(p):
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--pretty", action="store_true", help="indent JSON and print a summary table")


def _add_cost_flags(p):
    p.add_argument("--tg", type=float, default=1e-7, help="seconds per gate layer")
    p.add_argument("--tm", type=float, default=1e-6, help="seconds per measurement")
    p.add_argument("--flops", type=float, default=1e12, help="classical throughput")
    p.add_argument("--qpus", type=int, default=10, help="parallel QPUs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a benchmark circuit")
    p.add_argument("--kind", required=True, choices=benchmarks.KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, help="edge probability for erdos (default 0.5)")
    p.add_argument("--degree", type=int, help="aqft approximation degree")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("cut", help="find cuts and print the cut plan")
    p.add_argument("circuit")
    _add_cut_flags(p)
    p.add_argument("--emit-dot", help="write the partitioned DAG in DOT format")
    p.add_argument("--emit-variants", help="directory for per-variant .qc files")
    _add_output_flags(p)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("estimate", help="hybrid runtime estimate")
    p.add_argument("circuit")
    p.add_argument("--plan", help="cut plan JSON from `qcut cut`")
    _add_cut_flags(p)
    _add_cost_flags(p)
    p.add_argument("--states", type=int, default=10**6, help="states to reconstruct")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("run", help="cut, simulate and reconstruct")
    p.add_argument("circuit")
    p.add_argument("--plan", help="cut plan JSON from `qcut cut`")
    _add_cut_flags(p)
    _add_cost_flags(p)
    p.add_argument("--hss", type=int, help="heavy-state budget (default: full reconstruction)")
    p.add_argument("--mode", choices=("exact", "shots"), default="exact")
    p.add_argument("--shots", type=int, help="shots per variant (default clamp(2^w, 2^10, 2^20))")
    p.add_argument("--clip", action="store_true", help="clip negative values and renormalise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--memory-cap", type=int, default=DEFAULT_MEMORY_CAP,
                   help="max tensor elements during contraction")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--threads", type=int, help="worker threads (env QCUT_THREADS)")
    p.add_argument("--oracle-max-qubits", type=int, default=20)
    p.add_argument("--dump-tensors", help="directory for subcircuit tensor files")
    _add_output_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="compare full reconstruction with direct simulation")
    p.add_argument("circuit")
    p.add_argument("--plan", help="cut plan JSON from `qcut cut`")
    _add_cut_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--threads", type=int)
    _add_output_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qcut: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CircuitError as exc:
        print(f"qcut: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleCutError as exc:
        print(f"qcut: infeasible cut: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ResourceCapError, NetworkError) as exc:
        print(f"qcut: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
