"""Magnetic graphs with root-of-unity signatures.

Signatures are stored as integer exponents ``k`` modulo a shared group order
``p``; the value on an oriented edge is ``exp(2*pi*i*k/p)``.  Every edge is
stored once, oriented from the lower vertex index to the higher one, and the
reverse orientation is obtained by conjugation.  All signature arithmetic is
therefore exact.
"""

from __future__ import annotations

import cmath
import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    """Raised on malformed graphs, unknown vertices or broken preconditions."""


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """The element ``exp(2*pi*i*k/p)`` of the cyclic group of order ``p``."""

    k: int
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"group order must be positive, got {self.p}")
        if not 0 <= self.k < self.p:
            raise ValueError(f"exponent {self.k} outside [0, {self.p})")

    @classmethod
    def one(cls, p: int) -> RootOfUnity:
        return cls(0, p)

    @classmethod
    def of(cls, k: int, p: int) -> RootOfUnity:
        """Build from an arbitrary integer exponent, reducing it mod ``p``."""
        return cls(k % p, p)

    def _check(self, other: RootOfUnity) -> None:
        if other.p != self.p:
            raise ValueError(f"mismatched group orders {self.p} and {other.p}")

    def __mul__(self, other: RootOfUnity) -> RootOfUnity:
        self._check(other)
        return RootOfUnity((self.k + other.k) % self.p, self.p)

    def __truediv__(self, other: RootOfUnity) -> RootOfUnity:
        self._check(other)
        return RootOfUnity((self.k - other.k) % self.p, self.p)

    def __pow__(self, n: int) -> RootOfUnity:
        return RootOfUnity((self.k * n) % self.p, self.p)

    def inverse(self) -> RootOfUnity:
        return RootOfUnity((-self.k) % self.p, self.p)

    conjugate = inverse

    @property
    def is_one(self) -> bool:
        return self.k == 0

    def order(self) -> int:
        return self.p // math.gcd(self.k, self.p)

    def __complex__(self) -> complex:
        return root_value(self.k, self.p)

    def __str__(self) -> str:
        return f"{self.k}/{self.p} turns"


def root_value(k: int, p: int) -> complex:
    """Complex value of ``exp(2*pi*i*k/p)``, exact on the axes."""
    k %= p
    # snap the four axis points so that, e.g., i*i == -1 exactly
    if (4 * k) % p == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[(4 * k) // p]
    return cmath.exp(2j * math.pi * k / p)


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    k: int


@dataclass(frozen=True, eq=False)
class MagneticGraph:
    """Simple undirected graph carrying a signature in the ``p``-th roots of unity.

    Build instances with :meth:`from_edges` (external vertex names) or
    :meth:`from_json`.  Edges are stored with ``tail < head`` in vertex-index
    order; a triple given in the other orientation is conjugated on the way in.
    Out-of-range exponents, loops and duplicate pairs are kept as given so that
    :func:`validate` can report them.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    p: int

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, int]],
        p: int,
    ) -> MagneticGraph:
        vertices = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(vertices)}
        stored = []
        for tail, head, k in edges:
            if tail not in index or head not in index:
                missing = tail if tail not in index else head
                raise GraphError(f"edge ({tail}, {head}) uses unknown vertex {missing!r}")
            i, j, k = index[tail], index[head], int(k)
            if i > j:
                i, j = j, i
                if 0 <= k < p:
                    k = (-k) % p
                else:
                    k = -k
            stored.append(Edge(i, j, k))
        return cls(vertices, tuple(stored), int(p))

    # -- lookups -----------------------------------------------------------
    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _edge_lookup(self) -> dict[tuple[int, int], int]:
        return {(e.tail, e.head): pos for pos, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            adj[e.tail].append(e.head)
            adj[e.head].append(e.tail)
        for nbrs in adj:
            nbrs.sort()
        return adj

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v: str) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def edge_position(self, u: str | int, v: str | int) -> int | None:
        i = u if isinstance(u, int) else self.vertex_index(u)
        j = v if isinstance(v, int) else self.vertex_index(v)
        return self._edge_lookup.get((min(i, j), max(i, j)))

    def adjacent(self, u: str | int, v: str | int) -> bool:
        return self.edge_position(u, v) is not None

    def exponent(self, u: str | int, v: str | int) -> int:
        """Exponent of the signature on the oriented edge ``(u, v)``."""
        i = u if isinstance(u, int) else self.vertex_index(u)
        j = v if isinstance(v, int) else self.vertex_index(v)
        pos = self._edge_lookup.get((min(i, j), max(i, j)))
        if pos is None:
            raise GraphError(f"{self.vertices[i]!r} and {self.vertices[j]!r} are not adjacent")
        k = self.edges[pos].k
        return k if i < j else (-k) % self.p

    def sigma(self, u: str | int, v: str | int) -> RootOfUnity:
        return RootOfUnity(self.exponent(u, v), self.p)

    def sigma_value(self, u: str | int, v: str | int) -> complex:
        return root_value(self.exponent(u, v), self.p)

    def degree(self, v: str | int) -> int:
        i = v if isinstance(v, int) else self.vertex_index(v)
        return len(self.adjacency[i])

    def edge_names(self) -> list[tuple[str, str]]:
        return [(self.vertices[e.tail], self.vertices[e.head]) for e in self.edges]

    def edge_label(self, pos: int) -> str:
        e = self.edges[pos]
        return f"{self.vertices[e.tail]}→{self.vertices[e.head]}"

    @property
    def is_trivial(self) -> bool:
        return all(e.k == 0 for e in self.edges)

    def with_exponents(self, exponents: Sequence[int]) -> MagneticGraph:
        """Same graph, new exponents on the stored (canonical) orientations."""
        return MagneticGraph(
            self.vertices,
            tuple(Edge(e.tail, e.head, int(k) % self.p) for e, k in zip(self.edges, exponents)),
            self.p,
        )

    def trivialized(self) -> MagneticGraph:
        return self.with_exponents([0] * len(self.edges))

    def subgraph(self, edge_positions: Iterable[int]) -> MagneticGraph:
        """Spanning subgraph keeping only the listed edges (signature inherited)."""
        keep = sorted(set(edge_positions))
        return MagneticGraph(self.vertices, tuple(self.edges[i] for i in keep), self.p)

    # -- equality / serialization ----------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MagneticGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.p == other.p
            and sorted(self.edges, key=_edge_key) == sorted(other.edges, key=_edge_key)
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.p, tuple(sorted(self.edges, key=_edge_key))))

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "vertices": list(self.vertices),
            "edges": [
                {"tail": self.vertices[e.tail], "head": self.vertices[e.head], "k": e.k}
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> MagneticGraph:
        try:
            p = data["p"]
            vertices = data["vertices"]
            edges = [(e["tail"], e["head"], e["k"]) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: missing field {exc}") from None
        if not isinstance(p, int) or isinstance(p, bool):
            raise GraphError(f"malformed graph JSON: p must be an integer, got {p!r}")
        for _, _, k in edges:
            if not isinstance(k, int) or isinstance(k, bool):
                raise GraphError(f"malformed graph JSON: exponent {k!r} is not an integer")
        if len(set(vertices)) != len(vertices):
            raise GraphError("malformed graph JSON: duplicate vertex identifiers")
        return cls.from_edges(vertices, edges, p)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> MagneticGraph:
        return cls.from_dict(json.loads(text))


def _edge_key(e: Edge) -> tuple[int, int, int]:
    return (e.tail, e.head, e.k)


# ---------------------------------------------------------------------------
# validation and components


def validate(graph: MagneticGraph) -> list[str]:
    """Return human-readable violations; an empty list means the graph is valid."""
    problems = []
    if graph.p < 1:
        problems.append(f"group order p={graph.p} must be positive")
    if len(set(graph.vertices)) != len(graph.vertices):
        problems.append("duplicate vertex identifiers")
    seen: dict[tuple[int, int], int] = {}
    for pos, e in enumerate(graph.edges):
        name = f"{graph.vertices[e.tail]}-{graph.vertices[e.head]}"
        if not (0 <= e.tail < graph.n and 0 <= e.head < graph.n):
            problems.append(f"edge {pos}: vertex index out of range")
            continue
        if e.tail == e.head:
            problems.append(f"loop at {graph.vertices[e.tail]!r}")
        if e.tail > e.head:
            problems.append(f"edge {name}: stored orientation is not canonical")
        key = (min(e.tail, e.head), max(e.tail, e.head))
        if key in seen:
            problems.append(f"duplicate edge {name}")
        seen[key] = pos
        if graph.p >= 1 and not 0 <= e.k < graph.p:
            problems.append(f"edge {name}: exponent {e.k} outside [0, {graph.p})")
    return problems


def require_valid(graph: MagneticGraph) -> None:
    problems = validate(graph)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))


def _component_indices(graph: MagneticGraph) -> list[list[int]]:
    comp = [-1] * graph.n
    out = []
    for root in range(graph.n):
        if comp[root] >= 0:
            continue
        comp[root] = len(out)
        members = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in graph.adjacency[u]:
                if comp[w] < 0:
                    comp[w] = len(out)
                    members.append(w)
                    queue.append(w)
        out.append(sorted(members))
    return out


def connected_components(graph: MagneticGraph) -> list[list[str]]:
    """Vertex partition into components, ordered by smallest vertex index."""
    require_valid(graph)
    return [[graph.vertices[i] for i in c] for c in _component_indices(graph)]


# ---------------------------------------------------------------------------
# balance and switching


@dataclass(frozen=True)
class SwitchingFunction:
    """Vertex function ``tau`` with values in the ``p``-th roots of unity."""

    values: Mapping[str, int]
    p: int

    def __getitem__(self, v: str) -> RootOfUnity:
        return RootOfUnity(self.values[v] % self.p, self.p)

    def value(self, v: str) -> complex:
        return root_value(self.values[v], self.p)

    def inverse(self) -> SwitchingFunction:
        return SwitchingFunction({v: (-k) % self.p for v, k in self.values.items()}, self.p)

    def to_dict(self) -> dict:
        return {"p": self.p, "values": dict(self.values)}

    @classmethod
    def from_dict(cls, data: Mapping, p: int | None = None) -> SwitchingFunction:
        try:
            values = {str(v): int(k) for v, k in data["values"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise GraphError(f"malformed switching JSON: {exc}") from None
        order = data.get("p", p)
        if order is None:
            raise GraphError("switching JSON needs a group order p")
        return cls(values, int(order))


@dataclass(frozen=True)
class ComponentBalance:
    vertices: list[str]
    balanced: bool
    certificate: dict[str, int] | None = None
    cycle: list[str] | None = None
    holonomy: int | None = None


@dataclass(frozen=True)
class BalanceReport:
    p: int
    components: list[ComponentBalance] = field(default_factory=list)

    @property
    def balanced(self) -> bool:
        return all(c.balanced for c in self.components)

    @property
    def all_unbalanced(self) -> bool:
        return all(not c.balanced for c in self.components)

    def certificate(self) -> SwitchingFunction:
        """Switching function built from the balanced components' certificates.

        Vertices of unbalanced components get the identity.
        """
        values: dict[str, int] = {}
        for comp in self.components:
            for v in comp.vertices:
                values[v] = comp.certificate[v] if comp.certificate else 0
        return SwitchingFunction(values, self.p)

    def to_dict(self) -> dict:
        comps = []
        for c in self.components:
            entry: dict = {"vertices": c.vertices, "verdict": "balanced" if c.balanced else "unbalanced"}
            if c.balanced:
                entry["certificate"] = {v: f"{k}/{self.p} turns" for v, k in c.certificate.items()}
            else:
                entry["cycle"] = c.cycle
                entry["holonomy"] = f"{c.holonomy}/{self.p} turns"
            comps.append(entry)
        return {"p": self.p, "balanced": self.balanced, "components": comps}


def _tree_path(parent: list[int], a: int, b: int) -> list[int]:
    """Vertex path from ``a`` to ``b`` through a BFS tree given by ``parent``."""
    up_a = [a]
    while parent[up_a[-1]] >= 0:
        up_a.append(parent[up_a[-1]])
    depth_of = {v: i for i, v in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in depth_of:
        up_b.append(parent[up_b[-1]])
    meet = up_b[-1]
    return up_a[: depth_of[meet] + 1] + list(reversed(up_b[:-1]))


def balance_check(graph: MagneticGraph) -> BalanceReport:
    """Decide balance per component via a BFS spanning tree.

    Exponents of ``tau`` are propagated as ``tau(v) = tau(u) + k_uv`` along
    tree edges from ``tau(root) = 0``; the component is balanced iff the same
    relation holds on every non-tree edge, in which case
    ``tau(u) sigma_uv tau(v)^{-1}`` is trivial and ``tau`` is the certificate.
    Otherwise the fundamental cycle of the first violating edge is reported
    with its holonomy.
    """
    require_valid(graph)
    p = graph.p
    report = []
    for comp in _component_indices(graph):
        root = comp[0]
        phi = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in graph.adjacency[u]:
                if w not in phi:
                    phi[w] = (phi[u] + graph.exponent(u, w)) % p
                    parent[w] = u
                    queue.append(w)
        bad = None
        for pos, e in enumerate(graph.edges):
            if e.tail not in phi:
                continue
            if (phi[e.tail] + e.k - phi[e.head]) % p != 0:
                bad = e
                break
        names = [graph.vertices[i] for i in comp]
        if bad is None:
            cert = {graph.vertices[i]: phi[i] for i in comp}
            report.append(ComponentBalance(names, True, certificate=cert))
            continue
        parents = [-1] * graph.n
        for v, par in parent.items():
            parents[v] = par
        # closed walk: tail -> head along the edge, then head back to tail in the tree
        back = _tree_path(parents, bad.head, bad.tail)
        cycle = [bad.tail] + back
        hol = sum(graph.exponent(a, b) for a, b in zip(cycle, cycle[1:])) % p
        report.append(
            ComponentBalance(names, False, cycle=[graph.vertices[i] for i in cycle], holonomy=hol)
        )
    return BalanceReport(p, report)


def cycle_holonomy(graph: MagneticGraph, cycle: Sequence[str]) -> RootOfUnity:
    """Product of signature values along a closed vertex sequence."""
    k = 0
    for a, b in zip(cycle, cycle[1:]):
        k += graph.exponent(a, b)
    return RootOfUnity.of(k, graph.p)


def switch_signature(graph: MagneticGraph, tau: SwitchingFunction) -> MagneticGraph:
    """Return the graph with signature ``tau(u) * sigma_uv * tau(v)^{-1}``."""
    require_valid(graph)
    if tau.p != graph.p:
        raise GraphError(f"switching function has order {tau.p}, graph has {graph.p}")
    missing = [v for v in graph.vertices if v not in tau.values]
    if missing:
        raise GraphError(f"switching function missing vertices {missing}")
    t = [tau.values[v] for v in graph.vertices]
    return graph.with_exponents([t[e.tail] + e.k - t[e.head] for e in graph.edges])


# ---------------------------------------------------------------------------
# lift


def lift_name(vertex: str, k: int) -> str:
    return f"{vertex}@{k}"


@dataclass(frozen=True, eq=False)
class LiftGraph:
    """The ``p``-fold lift of a magnetic graph.

    ``graph`` carries the trivial signature (group order 1) on vertices named
    ``"u@k"`` for the pair ``(u, exp(2*pi*i*k/p))``; ``fiber[j] = (i, k)`` maps a
    lift vertex index to its base vertex index and fiber exponent.
    """

    base: MagneticGraph
    graph: MagneticGraph
    fiber: tuple[tuple[int, int], ...]

    @property
    def p(self) -> int:
        return self.base.p

    def lift_index(self, base_index: int, k: int) -> int:
        return base_index * self.p + (k % self.p)

    def vertex(self, base_vertex: str, k: int) -> str:
        return lift_name(base_vertex, k % self.p)

    def correspondence(self) -> dict[str, tuple[str, int]]:
        return {
            self.graph.vertices[j]: (self.base.vertices[i], k)
            for j, (i, k) in enumerate(self.fiber)
        }


def build_lift(graph: MagneticGraph) -> LiftGraph:
    """Vertices ``(u, w)``; ``(u, w) ~ (v, w * sigma_uv)`` for each edge ``{u, v}``."""
    require_valid(graph)
    p = graph.p
    fiber = tuple((i, k) for i in range(graph.n) for k in range(p))
    names = [lift_name(graph.vertices[i], k) for i, k in fiber]
    edges = []
    for e in graph.edges:
        for k in range(p):
            edges.append((names[e.tail * p + k], names[e.head * p + (k + e.k) % p], 0))
    return LiftGraph(graph, MagneticGraph.from_edges(names, edges, 1), fiber)


# ---------------------------------------------------------------------------
# distances


def shortest_path_distance(graph: MagneticGraph, s: str, t: str) -> int | None:
    """Breadth-first hop distance; ``None`` when ``t`` is unreachable from ``s``."""
    src, dst = graph.vertex_index(s), graph.vertex_index(t)
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            return dist[u]
        for w in graph.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return None
