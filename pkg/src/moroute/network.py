"""Radio link budget and the four routing objectives.

Link math runs in linear units (W, mW, ratios); dB and dBm appear only at the
boundaries. Data rates are in kbit/s, so ``beta`` is per kbit/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .graph import Edge, Graph, canonical
from .pareto import enumerate_paths
from .qubo import QuboProblem, encode_shortest_path

OBJECTIVE_LABELS = ("node_delay", "path_loss", "bit_error", "data_rate")


@dataclass(frozen=True)
class NetworkParams:
    width_m: float = 1000.0
    height_m: float = 1000.0
    delay_ms: float = 1.0
    path_loss_exponent: float = 2.7
    tx_power_w: float = 50.0
    wavelength_m: float = 1.2
    modulation_order: int = 4
    noise_mean_dbm: float = -90.0
    noise_std_dbm: float = 10.0
    base_rate_kbps: float = 5000.0
    rate_step_kbps: float = 50.0

    def __post_init__(self):
        if not 2.0 <= self.path_loss_exponent <= 4.0:
            raise ValueError(f"path loss exponent {self.path_loss_exponent} outside [2, 4]")
        if self.tx_power_w <= 0 or self.wavelength_m <= 0:
            raise ValueError("transmit power and wavelength must be positive")
        if self.modulation_order < 2:
            raise ValueError("modulation order must be at least 2")
        if self.rate_step_kbps <= 0 or self.base_rate_kbps < 0:
            raise ValueError("rate grid must have a positive step")
        if self.width_m <= 0 or self.height_m <= 0:
            raise ValueError("area must be positive")


@dataclass(frozen=True)
class NodeInfo:
    x_m: float
    y_m: float
    noise_dbm: float
    delay_ms: float


@dataclass(frozen=True)
class LinkInfo:
    distance_m: float
    data_rate_kbps: float


@dataclass(frozen=True)
class PhysicalNetwork:
    graph: Graph
    nodes: Mapping[int, NodeInfo]
    links: Mapping[Edge, LinkInfo]
    params: NetworkParams = field(default_factory=NetworkParams)
    source: int | None = None
    destination: int | None = None

    def endpoints(self) -> tuple[int, int]:
        s = self.graph.nodes[0] if self.source is None else self.source
        d = self.graph.nodes[-1] if self.destination is None else self.destination
        return s, d


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w * 1e3)


def dbm_to_mw(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0)


def path_loss_ratio(d: float, wavelength: float, alpha: float) -> float:
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return (4.0 * math.pi * d / wavelength) ** alpha


def path_loss_db(d: float, wavelength: float, alpha: float) -> float:
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return 10.0 * alpha * math.log10(4.0 * math.pi * d / wavelength)


def symmetrized_noise_dbm(p_i: float, p_j: float) -> float:
    """Mean of two noise powers taken in milliwatts, returned in dBm."""
    return 10.0 * math.log10((dbm_to_mw(p_i) + dbm_to_mw(p_j)) / 2.0)


def snr_ratio(tx_power_w: float, d: float, params: NetworkParams, noise_dbm: float) -> float:
    """Received power over ``log2(M)`` times the noise power (linear)."""
    if tx_power_w <= 0:
        raise ValueError("transmit power must be positive")
    received_mw = tx_power_w * 1e3 / path_loss_ratio(d, params.wavelength_m, params.path_loss_exponent)
    return received_mw / (math.log2(params.modulation_order) * dbm_to_mw(noise_dbm))


def ratio_db(r: float) -> float:
    return 10.0 * math.log10(r)


def bit_error(r: float) -> float:
    if r < 0:
        raise ValueError(f"signal ratio must be non-negative, got {r}")
    if math.isinf(r):
        return 0.0
    # 1 - sqrt(r/(r+1)) rewritten to avoid cancellation at large r
    root = math.sqrt(r / (r + 1.0))
    return 0.5 * (1.0 / (r + 1.0)) / (1.0 + root)


def link_metrics(net: PhysicalNetwork) -> dict[Edge, dict[str, float]]:
    """Per-edge path loss (dB), signal ratio (linear and dB) and bit error probability."""
    p = net.params
    out = {}
    for e in net.graph.edges:
        link = net.links[e]
        noise = symmetrized_noise_dbm(net.nodes[e[0]].noise_dbm, net.nodes[e[1]].noise_dbm)
        r = snr_ratio(p.tx_power_w, link.distance_m, p, noise)
        out[e] = {
            "distance_m": link.distance_m,
            "data_rate_kbps": link.data_rate_kbps,
            "path_loss_db": path_loss_db(link.distance_m, p.wavelength_m, p.path_loss_exponent),
            "noise_dbm": noise,
            "snr": r,
            "snr_db": ratio_db(r),
            "bit_error": bit_error(r),
        }
    return out


# ---------------------------------------------------------------------------
# data-rate bottleneck coefficient
# ---------------------------------------------------------------------------

def _bottleneck_ok(rates: list[float], beta: float) -> bool:
    lo = min(rates)
    # exp(-beta*lo) > sum over slower-decaying terms, evaluated relative to the bottleneck
    rest = sum(math.exp(-beta * (r - lo)) for r in rates if r > lo)
    return rest < 1.0


def path_rates(net: PhysicalNetwork, path) -> list[float]:
    return [net.links[canonical(u, v)].data_rate_kbps for u, v in zip(path, path[1:])]


def select_beta(net: PhysicalNetwork, iterations: int = 50, max_doublings: int = 200) -> float:
    """Smallest tested ``beta`` making each route's slowest link dominate its rate cost.

    Starts at ``ln 2 / rate_step``, doubles until every enumerated route passes,
    then bisects between the last failing and first passing value. Edges tied at
    the bottleneck rate count as the bottleneck.
    """
    s, d = net.endpoints()
    paths = enumerate_paths(net.graph, s, d)
    if not paths:
        raise ValueError(f"no route between {s} and {d}")
    rate_lists = [path_rates(net, p) for p in paths]

    def ok(beta):
        return all(_bottleneck_ok(r, beta) for r in rate_lists)

    beta = math.log(2.0) / net.params.rate_step_kbps
    if ok(beta):
        return beta
    lo = beta
    for _ in range(max_doublings):
        beta *= 2.0
        if ok(beta):
            break
        lo = beta
    else:
        raise ValueError("no beta satisfies the bottleneck condition")
    hi = beta
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# objectives and instances
# ---------------------------------------------------------------------------

def objective_weights(net: PhysicalNetwork, beta: float | None = None, loss_db: bool = False):
    """Per-node and per-edge weights of (delay, path loss, bit error, data rate).

    Path loss enters as the linear ratio ``P_T / P_R`` unless ``loss_db`` is set.
    Summing dB values ranks routes by the product of link losses instead.
    """
    beta = select_beta(net) if beta is None else beta
    metrics = link_metrics(net)
    p = net.params
    delay = ({u: info.delay_ms for u, info in net.nodes.items()}, {})
    if loss_db:
        loss = ({}, {e: m["path_loss_db"] for e, m in metrics.items()})
    else:
        loss = ({}, {e: path_loss_ratio(m["distance_m"], p.wavelength_m, p.path_loss_exponent)
                     for e, m in metrics.items()})
    ber = ({}, {e: m["bit_error"] for e, m in metrics.items()})
    rate = ({}, {e: math.exp(-beta * m["data_rate_kbps"]) for e, m in metrics.items()})
    return [delay, loss, ber, rate]


def build_objectives(net: PhysicalNetwork, beta: float | None = None,
                     penalty_weight: float = 1.0, loss_db: bool = False) -> QuboProblem:
    """Encode the routing problem with objectives ordered (delay, path loss, BER, rate)."""
    s, d = net.endpoints()
    return encode_shortest_path(net.graph, s, d, objective_weights(net, beta, loss_db),
                                labels=OBJECTIVE_LABELS, penalty_weight=penalty_weight)


def gen_instance(seed: int, graph: Graph, params: NetworkParams | None = None,
                 source: int | None = None, destination: int | None = None) -> PhysicalNetwork:
    """Random radio network on a fixed topology.

    Positions are uniform over the area, node noise is normal in dBm and
    available rates are uniform on ``{0, step, ..., base}``.
    """
    params = params or NetworkParams()
    rng = np.random.default_rng(seed)
    nodes = {}
    for u in graph.nodes:
        x, y = rng.uniform(0.0, params.width_m), rng.uniform(0.0, params.height_m)
        noise = rng.normal(params.noise_mean_dbm, params.noise_std_dbm)
        nodes[u] = NodeInfo(float(x), float(y), float(noise), params.delay_ms)
    levels = int(round(params.base_rate_kbps / params.rate_step_kbps))
    links = {}
    for u, v in graph.edges:
        a, b = nodes[u], nodes[v]
        dist = math.hypot(a.x_m - b.x_m, a.y_m - b.y_m)
        rate = int(rng.integers(0, levels + 1)) * params.rate_step_kbps
        links[(u, v)] = LinkInfo(dist, float(rate))
    return PhysicalNetwork(graph, nodes, links, params, source, destination)


def with_endpoints(net: PhysicalNetwork, s: int, d: int) -> PhysicalNetwork:
    return replace(net, source=s, destination=d)
