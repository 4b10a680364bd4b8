"""Exact statevector QAOA on a diagonal cost.

The cost is held as an energy table indexed by basis integer (variable ``i`` is
bit ``i``). Each layer applies the phase ``exp(-i gamma E(b))`` and then the
mixer ``cos(beta) I - i sin(beta) X`` on every qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .qubo import Bits, Hamiltonian, Polynomial, bits_to_int, bits_to_str, int_to_bits, to_bits

MAX_QUBITS = 24


@dataclass(frozen=True)
class EnergyTable:
    n: int
    energies: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.shape != (2**self.n,):
            raise ValueError(f"energy table must have 2**{self.n} entries, got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("energy table has non-finite entries")
        object.__setattr__(self, "energies", e)

    @property
    def minimum(self) -> float:
        return float(self.energies.min())

    @property
    def maximum(self) -> float:
        return float(self.energies.max())


def build_energy_table(cost: Polynomial | Hamiltonian, max_qubits: int = MAX_QUBITS) -> EnergyTable:
    if cost.n > max_qubits:
        raise ValueError(f"{cost.n} qubits exceeds the simulator cap of {max_qubits}")
    return EnergyTable(cost.n, cost.energies())


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas) or not self.gammas:
            raise ValueError("need p >= 1 gammas and as many betas")

    @property
    def p(self) -> int:
        return len(self.gammas)

    def vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "QaoaParams":
        v = list(v)
        if len(v) % 2:
            raise ValueError("parameter vector must have even length")
        p = len(v) // 2
        return cls(tuple(v[:p]), tuple(v[p:]))


def uniform_state(n: int) -> np.ndarray:
    return np.full(2**n, 2.0 ** (-n / 2), dtype=complex)


def apply_mixer(state: np.ndarray, n: int, beta: float) -> np.ndarray:
    """Apply ``cos(beta) I - i sin(beta) X`` to each of the ``n`` qubits."""
    c, s = math.cos(beta), -1j * math.sin(beta)
    psi = state
    for i in range(n):
        view = psi.reshape(-1, 2, 2**i)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] = c * lo + s * hi
        view[:, 1, :] = s * lo + c * hi
    return psi


def run_circuit(params: QaoaParams, table: EnergyTable) -> np.ndarray:
    psi = uniform_state(table.n)
    for gamma, beta in zip(params.gammas, params.betas):
        psi *= np.exp(-1j * gamma * table.energies)
        apply_mixer(psi, table.n, beta)
    return psi


def _check_dim(state: np.ndarray, table: EnergyTable) -> None:
    if state.shape != table.energies.shape:
        raise ValueError(f"state has {state.shape[0]} amplitudes, table has {table.energies.shape[0]}")


def probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def expectation(state: np.ndarray, table: EnergyTable) -> float:
    _check_dim(state, table)
    return float(np.dot(probabilities(state), table.energies))


@dataclass(frozen=True)
class SampleSet:
    shots: int
    counts: dict[str, int]

    def probabilities(self, n: int) -> np.ndarray:
        """Empirical frequencies as a dense vector over basis integers."""
        out = np.zeros(2**n)
        for b, c in self.counts.items():
            out[bits_to_int(to_bits(b, n))] = c / self.shots
        return out


def sample(state: np.ndarray, shots: int, seed: int) -> SampleSet:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    n = int(round(math.log2(state.shape[0])))
    probs = probabilities(state)
    probs = probs / probs.sum()
    draws = np.random.default_rng(seed).multinomial(shots, probs)
    hit = np.flatnonzero(draws)
    return SampleSet(shots, {bits_to_str(int_to_bits(int(b), n)): int(draws[b]) for b in hit})


def linear_ramp_init(p: int, delta: float = 0.7) -> QaoaParams:
    if p < 1:
        raise ValueError("p must be at least 1")
    if delta <= 0:
        raise ValueError("ramp slope must be positive")
    frac = [(i - 0.5) / p for i in range(1, p + 1)]
    return QaoaParams(tuple(delta * f for f in frac), tuple(delta * (1.0 - f) for f in frac))


@dataclass
class OptimizerConfig:
    method: str = "nelder-mead"
    max_evals_per_layer: int = 500
    xatol: float = 1e-6
    fatol: float = 1e-10


@dataclass
class OptimizeResult:
    params: QaoaParams
    cost: float
    history: list[float] = field(default_factory=list)
    best_history: list[float] = field(default_factory=list)
    evaluations: int = 0
    converged: bool = True


def optimize(table: EnergyTable, init: QaoaParams, config: OptimizerConfig | None = None) -> OptimizeResult:
    """Minimize the exact expectation over the ``2p`` angles.

    The best parameters seen during the search are returned, so the final cost
    never exceeds the initial one even if the optimizer wanders.
    """
    config = config or OptimizerConfig()
    history: list[float] = []
    best = {"cost": math.inf, "x": init.vector()}

    def cost(x):
        val = expectation(run_circuit(QaoaParams.from_vector(x), table), table)
        history.append(val)
        if val < best["cost"]:
            best["cost"] = val
            best["x"] = np.array(x, dtype=float)
        return val

    cost(init.vector())
    budget = config.max_evals_per_layer * init.p
    method = config.method.lower()
    if method == "nelder-mead":
        res = minimize(cost, init.vector(), method="Nelder-Mead",
                       options={"maxfev": budget, "xatol": config.xatol,
                                "fatol": config.fatol, "adaptive": True})
    elif method == "cobyla":
        res = minimize(cost, init.vector(), method="COBYLA",
                       options={"maxiter": budget, "rhobeg": 0.1, "tol": config.xatol})
    else:
        raise ValueError(f"unknown optimizer {config.method!r}")
    best_hist = np.minimum.accumulate(history).tolist()
    return OptimizeResult(QaoaParams.from_vector(best["x"]), best["cost"], history, best_hist,
                          len(history), bool(res.success))


def approximation_ratio(state: np.ndarray, table: EnergyTable) -> float:
    """Expectation over the ground energy; NaN when the ground energy is 0."""
    e_min = table.minimum
    if e_min == 0.0:
        return math.nan
    return expectation(state, table) / e_min


def success_probability(state: np.ndarray, front: Iterable[Bits | int]) -> float:
    n = int(round(math.log2(state.shape[0])))
    idx = set()
    for f in front:
        idx.add(f if isinstance(f, (int, np.integer)) else bits_to_int(to_bits(f, n)))
    if not idx:
        raise ValueError("Pareto front is empty")
    probs = probabilities(state)
    return float(sum(probs[i] for i in idx))
