"""Multi-objective network routing with QAOA: encoding, simulation and analysis."""

from .graph import Graph, build_graph, edge_color, generate_topology, middle_graph
from .qubo import QuboProblem, encode_shortest_path, scalarize, to_ising
from .pareto import brute_force_front, enumerate_paths, pareto_front
from .qaoa import build_energy_table, linear_ramp_init, optimize, run_circuit
from .resources import estimate
from .instances import load_bundled, load_instance
from .experiments import RunConfig, solve, sweep

__version__ = "0.1.0"
