"""Command line interface.

Every command is deterministic for a fixed ``--seed``. Tables go to CSV with
nine significant digits; run summaries are flat ``key,value`` records.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .graph import FAMILIES, generate_topology
from .instances import (BUNDLED, InstanceError, Instance, bundled_path, dumps, load_instance,
                        network_document)
from .network import NetworkParams, gen_instance
from .pareto import (ParetoRecord, all_records, brute_force_front, dirichlet_weights,
                     simplex_grid, top_k)
from .qaoa import MAX_QUBITS, OptimizerConfig
from .qubo import EncodingError, QuboProblem, check_weights, scalarize
from .resources import estimate
from .experiments import RunConfig, scaling, solve, sweep

logger = logging.getLogger("moroute")

FULL_TABLE_QUBITS = 16


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def write_text(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def record_text(record: dict) -> str:
    return csv_text(["key", "value"], [(k, v) for k, v in record.items()])


def records_csv(q: QuboProblem, records: Sequence[ParetoRecord], extra: dict[str, list] | None = None) -> str:
    L = q.num_objectives
    header = ["bitstring", "feasible", "pareto_optimal"]
    header += [f"obj_{i + 1}" for i in range(L)] + [f"r_{i + 1}" for i in range(L)] + ["probability"]
    extra = extra or {}
    header += list(extra)
    rows = []
    for j, r in enumerate(records):
        row = [r.bitstring, r.feasible, r.pareto_optimal, *r.objectives, *r.r, r.probability]
        row += [col[j] for col in extra.values()]
        rows.append(row)
    return csv_text(header, rows)


def resolve_instance(spec: str) -> Instance:
    if not os.path.exists(spec) and spec in BUNDLED:
        return load_instance(bundled_path(spec))
    return load_instance(spec)


def parse_weights(text: str | None, count: int) -> list[float]:
    if text is None:
        return [1.0 / count] * count
    try:
        w = [float(x) for x in text.split(",")]
    except ValueError:
        raise EncodingError(f"weights must be comma separated numbers, got {text!r}") from None
    check_weights(w, count)
    return w


def parse_size(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 3 or 3x2, got {text!r}") from None


def _optimizer(args) -> OptimizerConfig:
    return OptimizerConfig(method=args.optimizer, max_evals_per_layer=args.max_evals)


def _config(args) -> RunConfig:
    if args.p < 1:
        raise EncodingError("--p must be at least 1")
    if args.shots < 0:
        raise EncodingError("--shots must be non-negative")
    return RunConfig(p=args.p, shots=args.shots, seed=args.seed, k=args.k, delta=args.delta,
                     optimizer=_optimizer(args))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.bundled:
        write_text(bundled_path(args.bundled).read_text(encoding="utf-8"), args.out)
        return 0
    if not args.topology:
        raise EncodingError("generate needs a topology or --bundled")
    family, *size = args.topology
    g = generate_topology(family, *(int(s) for s in size))
    net = gen_instance(args.seed, g, NetworkParams(), args.source, args.destination)
    write_text(dumps(network_document(net, name=f"{family} {' '.join(size)} seed {args.seed}")), args.out)
    return 0


def cmd_encode(args) -> int:
    inst = resolve_instance(args.instance)
    q = inst.problem(args.penalty_weight)
    doc = {
        "n": q.n,
        "source": q.vmap.source,
        "destination": q.vmap.destination,
        "variables": [list(q.vmap.describe(i)) for i in range(q.n)],
        "penalty": _poly_doc(q.penalty_polynomial()),
        "objectives": [{"label": o.label, "scale": o.scale, "constant": o.constant,
                        "linear": {str(i): c for i, c in o.linear.items()}} for o in q.objectives],
    }
    if args.weights is not None:
        doc["weights"] = parse_weights(args.weights, q.num_objectives)
        doc["scalarized"] = _poly_doc(scalarize(q, doc["weights"]))
    write_text(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _poly_doc(poly) -> dict:
    return {"constant": poly.constant,
            "linear": {str(i): c for i, c in sorted(poly.linear.items())},
            "quadratic": {f"{i},{j}": c for (i, j), c in sorted(poly.quadratic.items())}}


def cmd_estimate(args) -> int:
    q = resolve_instance(args.instance).problem(args.penalty_weight)
    w = parse_weights(args.weights, q.num_objectives)
    write_text(record_text(estimate(q, w, args.p, args.epsilon).record()), args.out)
    return 0


def cmd_pareto(args) -> int:
    q = resolve_instance(args.instance).problem(args.penalty_weight)
    front = [r for r in brute_force_front(q, MAX_QUBITS) if r.pareto_optimal]
    write_text(records_csv(q, front), args.out)
    return 0


def cmd_solve(args) -> int:
    q = resolve_instance(args.instance).problem(args.penalty_weight)
    w = parse_weights(args.weights, q.num_objectives)
    cfg = _config(args)
    res = solve(q, w, cfg)
    if q.n <= FULL_TABLE_QUBITS:
        idx = None
    elif res.samples is not None:
        idx = [i for i in range(len(res.probabilities)) if res.probabilities[i] > 0]
    else:
        idx = top_k(res.probabilities, cfg.k)
    records = all_records(q, res.probabilities, idx)
    summary = {"n_qubits": q.n, "labels": ",".join(q.labels),
               "rows": "all" if idx is None else "sampled", **res.summary()}
    write_text(records_csv(q, records), args.out)
    if args.summary:
        write_text(record_text(summary), args.summary)
    else:
        sys.stderr.write(record_text(summary))
    if args.history:
        write_text(csv_text(["evaluation", "cost", "best_cost"],
                            [(i + 1, c, b) for i, (c, b) in enumerate(zip(res.history, res.best_history))]),
                   args.history)
    return 0


def cmd_sweep(args) -> int:
    q = resolve_instance(args.instance).problem(args.penalty_weight)
    L = q.num_objectives
    if args.weights is not None:
        grid = [tuple(parse_weights(args.weights, L))]
    elif args.dirichlet:
        grid = dirichlet_weights(args.dirichlet, L, args.seed)
    else:
        grid = simplex_grid(args.grid, L)
    results, union, front = sweep(q, grid, _config(args), args.workers)
    in_front = {r.bitstring for r in front}
    feasible_union = [r for r in union.records if r.feasible]
    text = records_csv(q, feasible_union,
                       {"union_front": [r.bitstring in in_front for r in feasible_union]})
    write_text(text, args.out)
    if args.summary:
        rows = [r.summary() for r in results]
        write_text(csv_text(list(rows[0]), [list(r.values()) for r in rows]), args.summary)
    return 0


def cmd_scaling(args) -> int:
    header = ["family", "size", "n_qubits", "p", "instances", "ratio_mean", "ratio_std",
              "success_mean", "success_std"]
    rows = []
    p_values = list(range(1, args.p_max + 1))
    for family in args.family:
        for size in args.sizes:
            for r in scaling(family, size, p_values, args.instances, args.seed, args.delta,
                             _optimizer(args), args.workers):
                rows.append([r.family, r.size, r.n_qubits, r.p, r.instances, r.ratio_mean,
                             r.ratio_std, r.success_mean, r.success_std])
    write_text(csv_text(header, rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moroute", description="Multi-objective QAOA routing toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", required=True,
                           help=f"instance JSON path or bundled name ({', '.join(BUNDLED)})")
            p.add_argument("--penalty-weight", type=float, default=1.0)
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--seed", type=int, default=0)

    def qaoa_flags(p):
        p.add_argument("--weights", help="comma separated scalarization weights")
        p.add_argument("--p", type=int, default=1)
        p.add_argument("--shots", type=int, default=0, help="0 gives exact probabilities")
        p.add_argument("--k", type=int, default=100)
        p.add_argument("--delta", type=float, default=0.7, help="linear ramp slope")
        p.add_argument("--optimizer", choices=["nelder-mead", "cobyla"], default="nelder-mead")
        p.add_argument("--max-evals", type=int, default=500, help="evaluation budget per layer")

    p = sub.add_parser("generate", help="write an instance file")
    common(p, instance=False)
    p.add_argument("topology", nargs="*", help=f"family and sizes, family in {FAMILIES}")
    p.add_argument("--bundled", choices=sorted(BUNDLED))
    p.add_argument("--source", type=int)
    p.add_argument("--destination", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("encode", help="print the QUBO as JSON")
    common(p)
    p.add_argument("--weights")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("estimate", help="resource report")
    common(p)
    p.add_argument("--weights")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("pareto", help="exact Pareto front by enumeration")
    common(p)
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("solve", help="one QAOA run")
    common(p)
    qaoa_flags(p)
    p.add_argument("--summary", help="run summary path (default stderr)")
    p.add_argument("--history", help="optimizer history CSV path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="QAOA over a weight grid, aggregated front")
    common(p)
    qaoa_flags(p)
    p.add_argument("--grid", type=int, default=4, help="simplex grid resolution")
    p.add_argument("--dirichlet", type=int, default=0, help="sample this many weight vectors instead")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary", help="per-run summary CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scaling", help="approximation ratio and success probability versus p")
    common(p, instance=False)
    p.add_argument("--family", action="append", choices=FAMILIES, required=True)
    p.add_argument("--sizes", type=parse_size, nargs="+", required=True, help="e.g. 2x1 3x1, or 4 for cycles")
    p.add_argument("--p-max", type=int, default=6)
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--delta", type=float, default=0.7)
    p.add_argument("--optimizer", choices=["nelder-mead", "cobyla"], default="nelder-mead")
    p.add_argument("--max-evals", type=int, default=500)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scaling)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InstanceError, EncodingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
