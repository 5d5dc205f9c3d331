"""Seeded randomized property run over small unbalanced magnetic graphs."""

from __future__ import annotations

import math

import numpy as np

from .graph import SwitchingFunction, build_lift, switch_signature
from .instances import random_complex, random_molecule, random_unbalanced_graph
from .lift import classical_ae_norm_on_lift, compress, fiber_min
from .solver import DEFAULT_CONFIG, SolverConfig, ae_norm, atom_matrix, certified_bounds, duality_gap_check
from .spaces import Molecule, lip_sigma_norm, magnetic_atom

SUITE_COLUMNS = [
    "index", "n", "edges", "p", "primal", "dual", "gap", "lower", "upper",
    "atom_norm_error", "switch_lip_diff", "switch_ae_diff",
    "contraction_slack", "fiber_n1", "fiber_n2", "fiber_n3", "passed",
]


def run_instance(rng: np.random.Generator, index: int, config: SolverConfig = DEFAULT_CONFIG) -> dict:
    graph = random_unbalanced_graph(rng)
    m = random_molecule(rng, graph)
    gap = duality_gap_check(graph, m, config)
    lower, upper = certified_bounds(graph, m, config.K)

    atom_err = 0.0
    for u, v in graph.edge_names():
        atom_err = max(atom_err, abs(ae_norm(graph, magnetic_atom(graph, u, v), config).value - 1))

    tau = SwitchingFunction({v: int(rng.integers(graph.p)) for v in graph.vertices}, graph.p)
    switched = switch_signature(graph, tau)
    phases = np.array([tau.value(v) for v in graph.vertices])
    f = random_complex(rng, graph.n)
    lip_diff = abs(lip_sigma_norm(switched, phases * f) - lip_sigma_norm(graph, f))
    ae_diff = abs(ae_norm(switched, np.conj(phases) * m.vector(), config).value - gap.primal)

    lift = build_lift(graph)
    b = random_complex(rng, len(lift.graph.edges))
    M = Molecule.from_vector(lift.graph, atom_matrix(lift.graph) @ b)
    slack = classical_ae_norm_on_lift(lift, M, config).value - ae_norm(graph, compress(graph, lift, M), config).value
    fiber = fiber_min(graph, lift, m, config)

    k = math.cos(math.pi / config.K)
    passed = (
        gap.passed
        and abs(gap.gap) <= 1e-5
        and lower <= gap.primal + 1e-9
        and gap.primal <= upper + 1e-9
        and upper / lower <= 1 / k + 1e-12
        and atom_err <= 1e-7
        and lip_diff <= 1e-8
        and ae_diff <= 1e-8
        and slack >= -1e-6
        and fiber.equal
    )
    return {
        "index": index,
        "n": graph.n,
        "edges": len(graph.edges),
        "p": graph.p,
        "primal": gap.primal,
        "dual": gap.dual,
        "gap": gap.gap,
        "lower": lower,
        "upper": upper,
        "atom_norm_error": atom_err,
        "switch_lip_diff": lip_diff,
        "switch_ae_diff": ae_diff,
        "contraction_slack": slack,
        "fiber_n1": fiber.magnetic_norm,
        "fiber_n2": fiber.canonical_norm,
        "fiber_n3": fiber.fiber_minimum,
        "passed": bool(passed),
    }


def run_suite(seed: int = 0, count: int = 50, config: SolverConfig = DEFAULT_CONFIG) -> list[dict]:
    """One row per instance; instance ``i`` draws from the child stream ``i`` of ``seed``."""
    streams = np.random.SeedSequence(seed).spawn(count)
    return [run_instance(np.random.default_rng(s), i, config) for i, s in enumerate(streams)]
