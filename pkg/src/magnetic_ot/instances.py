"""Fixtures and seeded random instances."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .graph import MagneticGraph, balance_check
from .spaces import Molecule

SQRT2_PLUS_2 = 2 + math.sqrt(2)


def counterexample_triangle() -> MagneticGraph:
    """Triangle ``u, v, w`` with ``sigma_uv = i`` and trivial signature elsewhere."""
    return MagneticGraph.from_edges("uvw", [("u", "v", 1), ("v", "w", 0), ("w", "u", 0)], 4)


def counterexample_molecule(graph: MagneticGraph | None = None) -> Molecule:
    return Molecule(graph or counterexample_triangle(), {"u": 1.0, "v": 1.0})


def extreme_triangle_function(graph: MagneticGraph | None = None) -> Molecule:
    """A function on the triangle satisfying all three edges."""
    return Molecule(
        graph or counterexample_triangle(),
        {"u": 1.0, "v": -1j * cmath.exp(1j * math.pi / 3), "w": 0.0},
    )


def cycle_graph(n: int, k: int, p: int) -> MagneticGraph:
    """``n``-cycle with exponent ``k`` on every edge oriented in cycle order."""
    names = [f"x{i}" for i in range(n)]
    return MagneticGraph.from_edges(names, [(names[i], names[(i + 1) % n], k) for i in range(n)], p)


def random_graph(
    rng: np.random.Generator,
    n: int,
    p: int,
    extra_edge_prob: float = 0.4,
    connected: bool = True,
) -> MagneticGraph:
    """Random spanning tree plus random extra edges, uniform exponents mod ``p``."""
    names = [f"v{i}" for i in range(n)]
    pairs = set()
    if connected:
        order = rng.permutation(n)
        for pos in range(1, n):
            a, b = int(order[pos]), int(order[rng.integers(pos)])
            pairs.add((min(a, b), max(a, b)))
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in pairs and rng.random() < extra_edge_prob:
                pairs.add((a, b))
    edges = [(names[a], names[b], int(rng.integers(p))) for a, b in sorted(pairs)]
    return MagneticGraph.from_edges(names, edges, p)


def random_unbalanced_graph(
    rng: np.random.Generator, n_max: int = 8, p_choices=(2, 3, 4), n_min: int = 3
) -> MagneticGraph:
    """Connected random graph with ``n_min <= |V| <= n_max`` that is unbalanced."""
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        p = int(rng.choice(p_choices))
        g = random_graph(rng, n, p)
        if balance_check(g).all_unbalanced:
            return g


def random_tree(rng: np.random.Generator, n: int, p: int) -> MagneticGraph:
    return random_graph(rng, n, p, extra_edge_prob=0.0)


def random_complex(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_molecule(rng: np.random.Generator, graph: MagneticGraph) -> Molecule:
    return Molecule.from_vector(graph, random_complex(rng, graph.n))


def random_unit_ball_function(rng: np.random.Generator, graph: MagneticGraph) -> Molecule:
    """Random function rescaled to Lipschitz norm exactly one."""
    from .spaces import lip_sigma_norm

    vec = random_complex(rng, graph.n)
    return Molecule.from_vector(graph, vec / lip_sigma_norm(graph, vec))
