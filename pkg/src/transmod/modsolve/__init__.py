"""Discrete modulus solver: path graph, restricted QP, certificates."""
from .graph import PathGraph, build_graph
from .qp import QPSolution, solve_restricted
from .solver import (
    DensityCertificate,
    ModulusResult,
    SolverConfig,
    VerifyReport,
    load_solver_config,
    modulus,
    modulus_union,
    shortest_path,
    transboundary_length,
    verify_admissible,
)

__all__ = [
    "DensityCertificate",
    "ModulusResult",
    "PathGraph",
    "QPSolution",
    "SolverConfig",
    "VerifyReport",
    "build_graph",
    "load_solver_config",
    "modulus",
    "modulus_union",
    "shortest_path",
    "solve_restricted",
    "transboundary_length",
    "verify_admissible",
]
