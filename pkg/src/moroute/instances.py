"""Instance files: JSON documents describing a routing problem.

Two kinds are accepted. ``physical`` carries radio parameters, node positions
and noise, and link rates, and is turned into the four routing objectives.
``raw`` carries explicit node and edge weights per objective. Unknown keys are
rejected at every level.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any

from .graph import Graph, build_graph
from .network import LinkInfo, NetworkParams, NodeInfo, PhysicalNetwork, build_objectives
from .qubo import QuboProblem, encode_shortest_path

BUNDLED = {
    "k4": "k4_network.json",
    "square": "square_lattice_network.json",
    "triangular": "triangular_weights.json",
}


class InstanceError(ValueError):
    pass


def _check_keys(obj: dict, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise InstanceError(f"{where}: expected an object")
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise InstanceError(f"{where}: missing field(s) {sorted(missing)}")
    if unknown:
        raise InstanceError(f"{where}: unknown field(s) {sorted(unknown)}")


@dataclass
class Instance:
    kind: str
    graph: Graph
    source: int
    destination: int
    name: str = ""
    network: PhysicalNetwork | None = None
    labels: tuple[str, ...] = ()
    node_weights: dict[int, list[float]] | None = None
    edge_weights: dict[tuple[int, int], list[float]] | None = None
    normalize: bool = False
    beta: float | None = None

    def problem(self, penalty_weight: float = 1.0) -> QuboProblem:
        if self.kind == "physical":
            q = build_objectives(self.network, self.beta, penalty_weight)
        else:
            objs = []
            for k in range(len(self.labels)):
                objs.append(({u: w[k] for u, w in self.node_weights.items()},
                             {e: w[k] for e, w in self.edge_weights.items()}))
            q = encode_shortest_path(self.graph, self.source, self.destination, objs,
                                     labels=self.labels, penalty_weight=penalty_weight)
        return q.normalized() if self.normalize else q


_PARAM_KEYS = {f.name for f in fields(NetworkParams)}


def parse_instance(doc: dict[str, Any]) -> Instance:
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "physical":
        _check_keys(doc, {"kind", "params", "nodes", "edges", "source", "destination"},
                    {"name", "normalize", "beta"}, "instance")
        _check_keys(doc["params"], set(), _PARAM_KEYS, "params")
        params = NetworkParams(**doc["params"])
        nodes = {}
        for i, nd in enumerate(doc["nodes"]):
            _check_keys(nd, {"id", "x_m", "y_m", "noise_dbm", "delay_ms"}, set(), f"nodes[{i}]")
            nodes[nd["id"]] = NodeInfo(float(nd["x_m"]), float(nd["y_m"]),
                                       float(nd["noise_dbm"]), float(nd["delay_ms"]))
        links = {}
        pairs = []
        for i, ed in enumerate(doc["edges"]):
            _check_keys(ed, {"u", "v", "data_rate_kbps"}, {"distance_m"}, f"edges[{i}]")
            u, v = ed["u"], ed["v"]
            pairs.append((u, v))
            if "distance_m" in ed:
                dist = float(ed["distance_m"])
            else:
                a, b = nodes[u], nodes[v]
                dist = ((a.x_m - b.x_m) ** 2 + (a.y_m - b.y_m) ** 2) ** 0.5
            links[(min(u, v), max(u, v))] = LinkInfo(dist, float(ed["data_rate_kbps"]))
        g = build_graph(list(nodes), pairs)
        s, d = doc["source"], doc["destination"]
        net = PhysicalNetwork(g, nodes, links, params, s, d)
        return Instance("physical", g, s, d, doc.get("name", ""), network=net,
                        labels=("node_delay", "path_loss", "bit_error", "data_rate"),
                        normalize=bool(doc.get("normalize", True)), beta=doc.get("beta"))
    if kind == "raw":
        _check_keys(doc, {"kind", "objectives", "nodes", "edges", "source", "destination"},
                    {"name", "normalize"}, "instance")
        labels = tuple(doc["objectives"])
        nw, ew, pairs = {}, {}, []
        for i, nd in enumerate(doc["nodes"]):
            _check_keys(nd, {"id", "weights"}, set(), f"nodes[{i}]")
            if len(nd["weights"]) != len(labels):
                raise InstanceError(f"nodes[{i}]: expected {len(labels)} weights")
            nw[nd["id"]] = [float(w) for w in nd["weights"]]
        for i, ed in enumerate(doc["edges"]):
            _check_keys(ed, {"u", "v", "weights"}, set(), f"edges[{i}]")
            if len(ed["weights"]) != len(labels):
                raise InstanceError(f"edges[{i}]: expected {len(labels)} weights")
            pairs.append((ed["u"], ed["v"]))
            ew[(min(ed["u"], ed["v"]), max(ed["u"], ed["v"]))] = [float(w) for w in ed["weights"]]
        g = build_graph(list(nw), pairs)
        return Instance("raw", g, doc["source"], doc["destination"], doc.get("name", ""),
                        labels=labels, node_weights=nw, edge_weights=ew,
                        normalize=bool(doc.get("normalize", False)))
    raise InstanceError(f"instance kind must be 'physical' or 'raw', got {kind!r}")


def load_instance(path: str | Path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(json.load(fh))


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise InstanceError(f"unknown bundled instance {name!r}; choose from {sorted(BUNDLED)}")
    return Path(str(resources.files("moroute") / "data" / BUNDLED[name]))


def load_bundled(name: str) -> Instance:
    return load_instance(bundled_path(name))


def network_document(net: PhysicalNetwork, name: str = "") -> dict[str, Any]:
    s, d = net.endpoints()
    doc: dict[str, Any] = {"kind": "physical"}
    if name:
        doc["name"] = name
    doc["params"] = asdict(net.params)
    doc["nodes"] = [{"id": u, "x_m": i.x_m, "y_m": i.y_m, "noise_dbm": i.noise_dbm,
                     "delay_ms": i.delay_ms} for u, i in sorted(net.nodes.items())]
    doc["edges"] = [{"u": e[0], "v": e[1], "data_rate_kbps": l.data_rate_kbps,
                     "distance_m": l.distance_m} for e, l in sorted(net.links.items())]
    doc["source"] = s
    doc["destination"] = d
    return doc


def raw_document(g: Graph, s: int, d: int, labels, node_weights, edge_weights,
                 name: str = "") -> dict[str, Any]:
    doc: dict[str, Any] = {"kind": "raw"}
    if name:
        doc["name"] = name
    doc["objectives"] = list(labels)
    doc["nodes"] = [{"id": u, "weights": list(node_weights[u])} for u in g.nodes]
    doc["edges"] = [{"u": e[0], "v": e[1], "weights": list(edge_weights[e])} for e in g.edges]
    doc["source"] = s
    doc["destination"] = d
    return doc


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"
