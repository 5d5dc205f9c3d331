"""Compression from the lift's classical Arens-Eells space onto the magnetic one.

For a lift molecule ``M`` the compression is ``(C M)(u) = sum_k w^k M(u, w^k)``
with ``w = exp(2 pi i / p)``.  A classical lift atom between ``(u, w)`` and
``(v, w sigma_uv)`` compresses to ``w`` times the magnetic atom ``m^sigma_uv``,
which makes ``C`` a surjective contraction, and the magnetic norm of ``m`` is
the least classical norm over its preimages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, LiftGraph, MagneticGraph, build_lift, root_value, shortest_path_distance
from .instances import counterexample_molecule, counterexample_triangle
from .solver import DEFAULT_CONFIG, SolveReport, SolverConfig, ae_norm, atom_matrix, basis_pursuit
from .spaces import FunctionLike, Molecule, as_vector, path_molecule


def _check_lift(graph: MagneticGraph, lift: LiftGraph) -> None:
    if lift.base != graph:
        raise GraphError("lift does not belong to this graph")


def compression_matrix(lift: LiftGraph) -> np.ndarray:
    """``n x (p n)`` matrix of the compression map."""
    p, n = lift.p, lift.base.n
    C = np.zeros((n, p * n), dtype=complex)
    for j, (i, k) in enumerate(lift.fiber):
        C[i, j] = root_value(k, p)
    return C


def compress(graph: MagneticGraph, lift: LiftGraph, M: FunctionLike) -> Molecule:
    _check_lift(graph, lift)
    vec = as_vector(lift.graph, M)
    out = np.zeros(graph.n, dtype=complex)
    for j, (i, k) in enumerate(lift.fiber):
        if vec[j] != 0:
            out[i] += root_value(k, lift.p) * vec[j]
    return Molecule.from_vector(graph, out)


def canonical_preimage(graph: MagneticGraph, lift: LiftGraph, coefficients) -> Molecule:
    """Place ``a_e`` times the classical atom ``(u, 1) -> (v, sigma_uv)`` for each edge.

    ``coefficients`` is indexed like ``graph.edges`` (stored orientations);
    a mapping from ``"tail→head"`` (or ``"tail->head"``) labels is accepted as
    well, in either orientation.
    """
    _check_lift(graph, lift)
    if isinstance(coefficients, dict):
        coeffs = np.zeros(len(graph.edges), dtype=complex)
        for label, a in coefficients.items():
            tail, sep, head = label.replace("->", "→").partition("→")
            pos = graph.edge_position(tail, head) if sep else None
            if pos is None:
                raise GraphError(f"unknown edge label {label!r}")
            if graph.vertex_index(tail) > graph.vertex_index(head):
                # m_vu = -sigma_vu m_uv
                a = -graph.sigma_value(tail, head) * a
            coeffs[pos] += a
    else:
        coeffs = np.asarray(coefficients, dtype=complex)
    if coeffs.shape != (len(graph.edges),):
        raise GraphError(f"expected {len(graph.edges)} coefficients, got {coeffs.shape}")
    out = np.zeros(lift.graph.n, dtype=complex)
    for a, e in zip(coeffs, graph.edges):
        out[lift.lift_index(e.tail, 0)] += a
        out[lift.lift_index(e.head, e.k)] -= a
    return Molecule.from_vector(lift.graph, out)


def classical_ae_norm_on_lift(
    lift: LiftGraph, M: FunctionLike, config: SolverConfig = DEFAULT_CONFIG
) -> SolveReport:
    """Classical Arens-Eells norm on the (trivially signed) lift graph."""
    return ae_norm(lift.graph, M, config)


@dataclass(frozen=True)
class FiberReport:
    magnetic_norm: float
    canonical_norm: float
    fiber_minimum: float
    fiber_dual: float
    optimal_preimage: Molecule
    tolerance: float
    iterations: int

    @property
    def equal(self) -> bool:
        t = self.tolerance
        return (
            abs(self.magnetic_norm - self.fiber_minimum) <= t
            and abs(self.canonical_norm - self.magnetic_norm) <= t
            and self.fiber_minimum <= self.canonical_norm + t
        )

    def to_dict(self) -> dict:
        return {
            "magnetic_norm": self.magnetic_norm,
            "canonical_preimage_norm": self.canonical_norm,
            "fiber_minimum": self.fiber_minimum,
            "fiber_dual": self.fiber_dual,
            "optimal_preimage": self.optimal_preimage.to_dict(),
            "tolerance": self.tolerance,
            "iterations": self.iterations,
            "verdict": "equal" if self.equal else "mismatch",
        }


def fiber_min(
    graph: MagneticGraph,
    lift: LiftGraph,
    m_sigma: FunctionLike,
    config: SolverConfig = DEFAULT_CONFIG,
    tol: float = 1e-5,
) -> FiberReport:
    """Least classical lift norm over all preimages of ``m_sigma``.

    Minimizes ``sum |b|`` over lift-edge coefficients with
    ``C A_lift b = m_sigma`` directly, and compares with the magnetic norm on
    the base and with the classical norm of the canonical preimage built from
    the base solver's optimal coefficients.
    """
    _check_lift(graph, lift)
    vec = as_vector(graph, m_sigma)
    base = ae_norm(graph, vec, config)
    canonical = canonical_preimage(graph, lift, base.coefficients)
    n2 = classical_ae_norm_on_lift(lift, canonical, config).value

    A_lift = atom_matrix(lift.graph)
    composed = compression_matrix(lift) @ A_lift
    res = basis_pursuit(composed, vec, config)
    preimage = Molecule.from_vector(lift.graph, A_lift @ res.coefficients)
    return FiberReport(
        magnetic_norm=base.value,
        canonical_norm=n2,
        fiber_minimum=res.value,
        fiber_dual=res.dual_value,
        optimal_preimage=preimage,
        tolerance=tol,
        iterations=res.iterations,
    )


def conjecture_demo(config: SolverConfig = DEFAULT_CONFIG) -> dict:
    """Compare a path molecule's norm with the lift path length on the triangle fixture.

    ``delta_u + delta_v`` is the path molecule of the walk ``u, v, w, u, v``
    (holonomy ``-1``), whose lift path runs from ``(u, 1)`` to ``(v, -1)``.
    """
    graph = counterexample_triangle()
    m = counterexample_molecule(graph)
    walk = ["u", "v", "w", "u", "v"]
    pm, hol = path_molecule(graph, walk)
    if not pm.allclose(m):
        raise AssertionError("walk does not reproduce the fixture molecule")
    report = ae_norm(graph, m, config)
    lift = build_lift(graph)
    distance = shortest_path_distance(lift.graph, lift.vertex("u", 0), lift.vertex("v", hol.k))
    value = report.value
    holds = distance is not None and abs(value - distance) <= 1e-6
    return {
        "ae_norm": value,
        "expected": 2 + math.sqrt(2),
        "gap": report.gap,
        "coefficients": {k: [z.real, z.imag] for k, z in report.coefficient_map().items()},
        "path": walk,
        "holonomy": str(hol),
        "lift_source": lift.vertex("u", 0),
        "lift_target": lift.vertex("v", hol.k),
        "lift_distance": distance,
        "conjecture": "holds" if holds else "fails",
    }
