"""Seeded QAOA experiments: single solves, weight sweeps and the layer-scaling protocol.

Every random quantity is derived from an explicit seed through
``numpy.random.SeedSequence``, and pooled work is merged in submission order,
so results do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .graph import FAMILIES, Graph, generate_topology
from .pareto import CandidateSet, aggregate, brute_force_front, candidates, top_k
from .qaoa import (EnergyTable, OptimizerConfig, QaoaParams, SampleSet, approximation_ratio,
                   build_energy_table, expectation, linear_ramp_init, optimize, probabilities,
                   run_circuit, sample, success_probability)
from .qubo import QuboProblem, encode_shortest_path, scalarize


@dataclass
class RunConfig:
    p: int = 1
    shots: int = 0
    seed: int = 0
    k: int = 100
    delta: float = 0.7
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)


@dataclass
class SolveResult:
    weights: tuple[float, ...]
    params: QaoaParams
    history: list[float]
    best_history: list[float]
    converged: bool
    energy: float
    ground_energy: float
    approximation_ratio: float
    success_probability: float
    probabilities: np.ndarray
    samples: SampleSet | None = None

    def summary(self) -> dict:
        return {
            "weights": ",".join(f"{w:.9g}" for w in self.weights),
            "p": self.params.p,
            "gammas": ",".join(f"{g:.9g}" for g in self.params.gammas),
            "betas": ",".join(f"{b:.9g}" for b in self.params.betas),
            "evaluations": len(self.history),
            "converged": self.converged,
            "energy": self.energy,
            "ground_energy": self.ground_energy,
            "approximation_ratio": self.approximation_ratio,
            "success_probability": self.success_probability,
            "shots": self.samples.shots if self.samples else 0,
        }


def solve(q: QuboProblem, weights: Sequence[float], config: RunConfig,
          front: Iterable[int] | None = None) -> SolveResult:
    """Scalarize, optimize from the linear ramp and measure the final state.

    With ``shots == 0`` the reported probabilities are exact; otherwise they are
    empirical frequencies from a seeded multinomial draw.
    """
    table = build_energy_table(scalarize(q, weights))
    res = optimize(table, linear_ramp_init(config.p, config.delta), config.optimizer)
    state = run_circuit(res.params, table)
    if front is None:
        front = [r.index for r in brute_force_front(q) if r.pareto_optimal]
    front = list(front)
    samples = None
    probs = probabilities(state)
    if config.shots > 0:
        samples = sample(state, config.shots, config.seed)
        probs = samples.probabilities(q.n)
    return SolveResult(tuple(float(w) for w in weights), res.params, res.history,
                       res.best_history, res.converged, expectation(state, table), table.minimum,
                       approximation_ratio(state, table), float(sum(probs[i] for i in front)),
                       probs, samples)


def _pool_map(fn: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order regardless of completion order
        return list(pool.map(fn, items))


def _sweep_task(args):
    q, w, config, front = args
    res = solve(q, w, config, front)
    idx = top_k(res.probabilities, config.k)
    return res, candidates(q, idx, res.probabilities, w)


def sweep(q: QuboProblem, weight_list: Sequence[Sequence[float]], config: RunConfig,
          workers: int = 1) -> tuple[list[SolveResult], CandidateSet, list]:
    """One solve per weight vector; top-k states are pooled and filtered for dominance."""
    front = [r.index for r in brute_force_front(q) if r.pareto_optimal]
    out = _pool_map(_sweep_task, [(q, tuple(w), config, front) for w in weight_list], workers)
    results = [r for r, _ in out]
    union, union_front = aggregate(q, [c for _, c in out])
    return results, union, union_front


# ---------------------------------------------------------------------------
# layer-scaling protocol on random two-objective instances
# ---------------------------------------------------------------------------

def family_endpoints(family: str, g: Graph) -> tuple[int, int]:
    return g.nodes[0], g.nodes[-1]


def random_two_objective(g: Graph, s: int, d: int, seed_seq: np.random.SeedSequence) -> QuboProblem:
    """Node objective and edge objective with weights uniform in ``[-1, 1]``."""
    rng = np.random.default_rng(seed_seq)
    node_w = {u: float(x) for u, x in zip(g.nodes, rng.uniform(-1.0, 1.0, g.num_nodes))}
    edge_w = {e: float(x) for e, x in zip(g.edges, rng.uniform(-1.0, 1.0, g.num_edges))}
    return encode_shortest_path(g, s, d, [(node_w, {}), ({}, edge_w)], labels=("node", "edge"))


def scaling_instances(family: str, size: Sequence[int], count: int, seed: int) -> list[QuboProblem]:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    g = generate_topology(family, *size)
    s, d = family_endpoints(family, g)
    fam = FAMILIES.index(family)
    return [random_two_objective(g, s, d, np.random.SeedSequence([seed, fam, *size, i]))
            for i in range(count)]


def _scaling_task(args):
    q, p, delta, opt = args
    cfg = RunConfig(p=p, delta=delta, optimizer=opt)
    res = solve(q, (0.5, 0.5), cfg)
    return res.approximation_ratio, res.success_probability


@dataclass(frozen=True)
class ScalingRow:
    family: str
    size: str
    n_qubits: int
    p: int
    instances: int
    ratio_mean: float
    ratio_std: float
    success_mean: float
    success_std: float


def scaling(family: str, size: Sequence[int], p_values: Sequence[int], count: int, seed: int,
            delta: float = 0.7, optimizer: OptimizerConfig | None = None, workers: int = 1,
            max_qubits: int = 16) -> list[ScalingRow]:
    opt = optimizer or OptimizerConfig()
    qs = scaling_instances(family, size, count, seed)
    n = qs[0].n
    if n > max_qubits:
        raise ValueError(f"{family} {tuple(size)} needs {n} qubits, above the cap of {max_qubits}")
    tasks = [(q, p, delta, opt) for p in p_values for q in qs]
    vals = _pool_map(_scaling_task, tasks, workers)
    rows = []
    for j, p in enumerate(p_values):
        chunk = np.array(vals[j * count:(j + 1) * count], dtype=float)
        ratios, succ = chunk[:, 0], chunk[:, 1]
        rows.append(ScalingRow(family, "x".join(str(s) for s in size), n, p, count,
                               float(np.nanmean(ratios)), float(np.nanstd(ratios)),
                               float(succ.mean()), float(succ.std())))
    return rows
