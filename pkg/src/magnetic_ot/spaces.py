"""Molecules, atoms and the sigma-Lipschitz seminorm.

A :class:`Molecule` is any complex vertex function; it serves both as an
element of the magnetic Arens-Eells space and as a Lipschitz-side test
function.  The pairing between the two sides is the bilinear sum
``sum_u f(u) * m(u)`` (no conjugation), under which
``<f, m^sigma_uv> = f(u) - sigma_uv f(v)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .graph import (
    GraphError,
    MagneticGraph,
    RootOfUnity,
    balance_check,
    require_valid,
    root_value,
)

DEFAULT_SATISFACTION_TOL = 1e-9


class OutsideUnitBall(ValueError):
    """A function expected in the sigma-Lipschitz unit ball lies outside it."""


@dataclass(frozen=True, eq=False)
class Molecule:
    """Complex-valued function on the vertices of ``graph``.

    Only nonzero entries are stored; absent vertices read as zero.
    """

    graph: MagneticGraph
    values: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for v, z in self.values.items():
            self.graph.vertex_index(v)
            z = complex(z)
            if z != 0:
                clean[v] = z
        ordered = {v: clean[v] for v in self.graph.vertices if v in clean}
        object.__setattr__(self, "values", ordered)

    @classmethod
    def zero(cls, graph: MagneticGraph) -> Molecule:
        return cls(graph, {})

    @classmethod
    def delta(cls, graph: MagneticGraph, u: str) -> Molecule:
        return cls(graph, {u: 1.0})

    @classmethod
    def from_vector(cls, graph: MagneticGraph, vec: Sequence[complex]) -> Molecule:
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (graph.n,):
            raise GraphError(f"vector of shape {vec.shape} does not match {graph.n} vertices")
        return cls(graph, {v: vec[i] for i, v in enumerate(graph.vertices) if vec[i] != 0})

    def __getitem__(self, v: str) -> complex:
        self.graph.vertex_index(v)
        return self.values.get(v, 0j)

    def vector(self) -> np.ndarray:
        out = np.zeros(self.graph.n, dtype=complex)
        for v, z in self.values.items():
            out[self.graph.index[v]] = z
        return out

    def support(self) -> list[str]:
        return list(self.values)

    def _same_graph(self, other: Molecule) -> None:
        if other.graph.vertices != self.graph.vertices:
            raise GraphError("molecules live on different vertex sets")

    def __add__(self, other: Molecule) -> Molecule:
        self._same_graph(other)
        return Molecule.from_vector(self.graph, self.vector() + other.vector())

    def __sub__(self, other: Molecule) -> Molecule:
        self._same_graph(other)
        return Molecule.from_vector(self.graph, self.vector() - other.vector())

    def __mul__(self, c: complex) -> Molecule:
        return Molecule.from_vector(self.graph, complex(c) * self.vector())

    __rmul__ = __mul__

    def __neg__(self) -> Molecule:
        return self * -1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Molecule):
            return NotImplemented
        return self.graph.vertices == other.graph.vertices and dict(self.values) == dict(other.values)

    def allclose(self, other: Molecule, atol: float = 1e-12) -> bool:
        self._same_graph(other)
        return bool(np.allclose(self.vector(), other.vector(), rtol=0, atol=atol))

    def pair(self, other: Molecule) -> complex:
        """Bilinear pairing ``sum_u self(u) * other(u)``."""
        self._same_graph(other)
        return complex(np.sum(self.vector() * other.vector()))

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.vector()))

    def to_dict(self) -> dict:
        return {"values": {v: [z.real, z.imag] for v, z in self.values.items()}}

    @classmethod
    def from_dict(cls, graph: MagneticGraph, data: Mapping) -> Molecule:
        try:
            raw = data["values"]
            values = {}
            for v, z in raw.items():
                if isinstance(z, (int, float)) and not isinstance(z, bool):
                    values[v] = complex(z)
                else:
                    re, im = z
                    values[v] = complex(float(re), float(im))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise GraphError(f"malformed molecule JSON: {exc}") from None
        return cls(graph, values)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, graph: MagneticGraph, text: str) -> Molecule:
        return cls.from_dict(graph, json.loads(text))


FunctionLike = Union[Molecule, Sequence[complex], np.ndarray]


def as_vector(graph: MagneticGraph, f: FunctionLike) -> np.ndarray:
    if isinstance(f, Molecule):
        if f.graph.vertices != graph.vertices:
            raise GraphError("function lives on a different vertex set")
        return f.vector()
    vec = np.asarray(f, dtype=complex)
    if vec.shape != (graph.n,):
        raise GraphError(f"vector of shape {vec.shape} does not match {graph.n} vertices")
    return vec


def signature_values(graph: MagneticGraph) -> np.ndarray:
    """sigma on the stored orientation of every edge, as complex numbers."""
    return np.array([root_value(e.k, graph.p) for e in graph.edges], dtype=complex)


def edge_differences(graph: MagneticGraph, f: FunctionLike) -> np.ndarray:
    """``f(u) - sigma_uv f(v)`` for every stored edge ``(u, v)``."""
    vec = as_vector(graph, f)
    if not graph.edges:
        return np.zeros(0, dtype=complex)
    tails = np.array([e.tail for e in graph.edges])
    heads = np.array([e.head for e in graph.edges])
    return vec[tails] - signature_values(graph) * vec[heads]


def lip_sigma_norm(graph: MagneticGraph, f: FunctionLike) -> float:
    """``max_{u~v} |f(u) - sigma_uv f(v)|``; zero on an edgeless graph."""
    diffs = edge_differences(graph, f)
    return float(np.max(np.abs(diffs))) if diffs.size else 0.0


def lip0_norm(graph: MagneticGraph, f: FunctionLike) -> float:
    """Classical Lipschitz seminorm, i.e. the sigma-norm with the signature ignored."""
    return lip_sigma_norm(graph.trivialized(), as_vector(graph, f))


def magnetic_atom(graph: MagneticGraph, u: str, v: str) -> Molecule:
    """The atom with value 1 at ``u`` and ``-sigma_uv`` at ``v``."""
    if u == v or not graph.adjacent(u, v):
        raise GraphError(f"{u!r} and {v!r} are not adjacent")
    return Molecule(graph, {u: 1.0, v: -graph.sigma_value(u, v)})


def path_molecule(graph: MagneticGraph, path: Sequence[str]) -> tuple[Molecule, RootOfUnity]:
    """Molecule ``delta_x - hol * delta_y`` for a walk from ``x`` to ``y``.

    Returns the molecule and the exact holonomy ``hol`` of the walk.
    """
    if not path:
        raise GraphError("empty path")
    k = 0
    for a, b in zip(path, path[1:]):
        if a == b or not graph.adjacent(a, b):
            raise GraphError(f"broken path: {a!r} and {b!r} are not adjacent")
        k += graph.exponent(a, b)
    hol = RootOfUnity.of(k, graph.p)
    x, y = path[0], path[-1]
    vec = np.zeros(graph.n, dtype=complex)
    vec[graph.vertex_index(x)] += 1.0
    vec[graph.vertex_index(y)] -= complex(hol)
    return Molecule.from_vector(graph, vec), hol


# ---------------------------------------------------------------------------
# satisfied edges and extreme points


@dataclass(frozen=True)
class SatisfiedSubgraph:
    graph: MagneticGraph
    edge_positions: tuple[int, ...]
    tolerance: float

    def edge_names(self) -> list[tuple[str, str]]:
        return self.graph.edge_names()


def _check_unit_ball(graph: MagneticGraph, f: np.ndarray, tolerance: float) -> float:
    norm = lip_sigma_norm(graph, f)
    if norm > 1 + tolerance:
        raise OutsideUnitBall(f"Lipschitz norm {norm:.12g} exceeds 1 + {tolerance:g}")
    return norm


def satisfied_subgraph(
    graph: MagneticGraph, f: FunctionLike, tolerance: float = DEFAULT_SATISFACTION_TOL
) -> SatisfiedSubgraph:
    """Spanning subgraph of edges with ``|f(u) - sigma_uv f(v)| >= 1 - tolerance``."""
    require_valid(graph)
    vec = as_vector(graph, f)
    _check_unit_ball(graph, vec, tolerance)
    gaps = np.abs(edge_differences(graph, vec))
    keep = tuple(int(i) for i in np.flatnonzero(gaps >= 1 - tolerance))
    return SatisfiedSubgraph(graph.subgraph(keep), keep, tolerance)


@dataclass(frozen=True)
class ExtremeVerdict:
    extreme: bool
    satisfied: SatisfiedSubgraph
    witness: Molecule | None = None
    epsilon: float | None = None
    balanced_component: list[str] | None = None

    def to_dict(self) -> dict:
        out = {
            "verdict": "extreme" if self.extreme else "not-extreme",
            "satisfied_edges": [list(e) for e in self.satisfied.edge_names()],
            "tolerance": self.satisfied.tolerance,
        }
        if not self.extreme:
            out["balanced_component"] = self.balanced_component
            out["epsilon"] = self.epsilon
            out["witness"] = self.witness.to_dict()
        return out


def extreme_point_check(
    graph: MagneticGraph, f: FunctionLike, tolerance: float = DEFAULT_SATISFACTION_TOL
) -> ExtremeVerdict:
    """Classify ``f`` as an extreme point of the sigma-Lipschitz unit ball.

    ``f`` is extreme iff every connected component of its satisfied subgraph
    is unbalanced.  Edgeless components count as balanced.  When some
    component ``A`` is balanced the perturbation ``g = (1 - eps)/2 * h`` on
    ``A`` (zero elsewhere) is returned, where ``h(u) = sigma_uv h(v)`` on the
    satisfied edges of ``A`` and ``eps`` is the largest edge gap strictly below
    ``1 - tolerance`` (0 if there is none).
    """
    require_valid(graph)
    if not balance_check(graph).all_unbalanced:
        raise GraphError("extreme point classification needs every component unbalanced")
    vec = as_vector(graph, f)
    sat = satisfied_subgraph(graph, vec, tolerance)
    report = balance_check(sat.graph)
    balanced = [c for c in report.components if c.balanced]
    if not balanced:
        return ExtremeVerdict(True, sat)

    comp = balanced[0]
    gaps = np.abs(edge_differences(graph, vec))
    interior = gaps[gaps < 1 - tolerance]
    eps = float(interior.max()) if interior.size else 0.0
    # tau makes the component trivial; its inverse h satisfies h(u) = sigma_uv h(v)
    g = {v: (1 - eps) / 2 * root_value(-k, graph.p) for v, k in comp.certificate.items()}
    return ExtremeVerdict(
        False, sat, witness=Molecule(graph, g), epsilon=eps, balanced_component=list(comp.vertices)
    )


# ---------------------------------------------------------------------------
# span of the atoms


@dataclass(frozen=True)
class SpanReport:
    in_span: bool
    tolerance: float
    # one entry per balanced component: (vertices, pairing with its potential)
    obstructions: list[tuple[list[str], complex]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "in_span": self.in_span,
            "tolerance": self.tolerance,
            "balanced_components": [
                {"vertices": verts, "pairing": [z.real, z.imag]} for verts, z in self.obstructions
            ],
        }


def balanced_potentials(graph: MagneticGraph) -> list[tuple[list[str], np.ndarray]]:
    """Unit-modulus ``f_p`` with ``f_p(u) = sigma_uv f_p(v)``, one per balanced component.

    Each ``f_p`` is supported on its component and annihilates every atom.
    """
    out = []
    for comp in balance_check(graph).components:
        if not comp.balanced:
            continue
        vec = np.zeros(graph.n, dtype=complex)
        for v, k in comp.certificate.items():
            vec[graph.index[v]] = root_value(-k, graph.p)
        out.append((list(comp.vertices), vec))
    return out


def span_feasibility(
    graph: MagneticGraph, m: FunctionLike, tolerance: float = 1e-9
) -> SpanReport:
    """Decide whether ``m`` is a finite combination of magnetic atoms.

    Unbalanced components impose nothing; a balanced component requires the
    pairing of ``m`` with that component's potential to vanish.  The tolerance
    is scaled by ``max(1, ||m||_2)``.
    """
    require_valid(graph)
    vec = as_vector(graph, m)
    scale = max(1.0, float(np.linalg.norm(vec)))
    obstructions = []
    ok = True
    for verts, fp in balanced_potentials(graph):
        z = complex(np.sum(fp * vec))
        obstructions.append((verts, z))
        if abs(z) > tolerance * scale:
            ok = False
    return SpanReport(ok, tolerance, obstructions)
