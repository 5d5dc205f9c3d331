import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnetic_ot.graph import GraphError, MagneticGraph, SwitchingFunction, switch_signature
from magnetic_ot.instances import cycle_graph, random_complex, random_unbalanced_graph
from magnetic_ot.spaces import (
    Molecule,
    OutsideUnitBall,
    extreme_point_check,
    lip0_norm,
    lip_sigma_norm,
    magnetic_atom,
    path_molecule,
    satisfied_subgraph,
    span_feasibility,
)

from conftest import perturbation_nullity, saturated_cycle_function


# -- Lipschitz norms ---------------------------------------------------------


def test_lip_sigma_examples(triangle):
    assert lip_sigma_norm(triangle, Molecule.delta(triangle, "u")) == 1
    ones = Molecule(triangle, {v: 1 for v in "uvw"})
    assert lip_sigma_norm(triangle, ones) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert lip_sigma_norm(triangle.trivialized(), ones) == 0


def test_lip0_examples():
    path = MagneticGraph.from_edges("uvw", [("u", "v", 0), ("v", "w", 0)], 1)
    assert lip0_norm(path, [0, 1, 2]) == 1
    assert lip0_norm(path, [3, 3, 3]) == 0
    assert lip0_norm(path, Molecule.delta(path, "v")) == 1


def test_lip0_ignores_signature(triangle):
    ones = [1, 1, 1]
    assert lip0_norm(triangle, ones) == 0


def test_orientation_independence(triangle):
    f = np.array([0.3 + 1j, -0.2, 0.5j])
    for u, v in triangle.edge_names():
        fu, fv = f[triangle.index[u]], f[triangle.index[v]]
        assert abs(fu - triangle.sigma_value(u, v) * fv) == pytest.approx(
            abs(fv - triangle.sigma_value(v, u) * fu), abs=1e-15
        )


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_seminorm_laws(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r)
    f, h = random_complex(r, g.n), random_complex(r, g.n)
    c = complex(*r.normal(size=2))
    assert lip_sigma_norm(g, c * f) == pytest.approx(abs(c) * lip_sigma_norm(g, f), rel=1e-12)
    assert lip_sigma_norm(g, f + h) <= lip_sigma_norm(g, f) + lip_sigma_norm(g, h) + 1e-12
    assert lip_sigma_norm(g, f) > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_switching_covariance_of_lip_norm(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r)
    tau = SwitchingFunction({v: int(r.integers(g.p)) for v in g.vertices}, g.p)
    phases = np.array([tau.value(v) for v in g.vertices])
    f = random_complex(r, g.n)
    assert abs(lip_sigma_norm(switch_signature(g, tau), phases * f) - lip_sigma_norm(g, f)) <= 1e-12


# -- atoms and path molecules ------------------------------------------------


def test_magnetic_atom(triangle):
    assert magnetic_atom(triangle, "u", "v") == Molecule(triangle, {"u": 1, "v": -1j})
    trivial = triangle.trivialized()
    assert magnetic_atom(trivial, "u", "v") == Molecule(trivial, {"u": 1, "v": -1})
    with pytest.raises(GraphError):
        magnetic_atom(MagneticGraph.from_edges("abc", [("a", "b", 0)], 1), "a", "c")


def test_reversed_atom_is_unit_multiple(triangle):
    for u, v in triangle.edge_names():
        assert magnetic_atom(triangle, v, u).allclose(
            -triangle.sigma_value(v, u) * magnetic_atom(triangle, u, v)
        )


def test_path_molecules(triangle):
    trivial = triangle.trivialized()
    m, hol = path_molecule(trivial, ["u", "v"])
    assert hol.is_one and m == magnetic_atom(trivial, "u", "v")

    m, hol = path_molecule(triangle, ["u", "v", "w", "u", "v"])
    assert hol.k == 2  # -1
    assert m == Molecule(triangle, {"u": 1, "v": 1})

    m, hol = path_molecule(trivial, ["u", "v", "w", "u"])
    assert hol.is_one and m == Molecule.zero(trivial)

    with pytest.raises(GraphError):
        path_molecule(MagneticGraph.from_edges("abc", [("a", "b", 0)], 1), ["a", "c"])


def test_molecule_json_round_trip(triangle):
    m = Molecule(triangle, {"u": 1 + 2j, "w": -0.5})
    assert Molecule.from_json(triangle, m.to_json()) == m
    assert m["v"] == 0
    assert m.pair(Molecule.delta(triangle, "u")) == 1 + 2j


# -- satisfied subgraph / extreme points -----------------------------------


def test_satisfied_subgraph_examples(triangle, tri_extreme):
    sat = satisfied_subgraph(triangle, Molecule.delta(triangle, "u"))
    assert sorted(map(sorted, sat.edge_names())) == [["u", "v"], ["u", "w"]]
    assert satisfied_subgraph(triangle, Molecule.zero(triangle)).edge_names() == []
    assert len(satisfied_subgraph(triangle, tri_extreme).edge_names()) == 3


def test_satisfied_rejects_outside_ball(triangle):
    with pytest.raises(OutsideUnitBall):
        satisfied_subgraph(triangle, Molecule.delta(triangle, "u") * 2)


def _check_witness(graph, f, verdict, tol=1e-9):
    g = verdict.witness.vector()
    assert np.linalg.norm(g) > 0
    for t in (-1, -0.5, 0.5, 1):
        assert lip_sigma_norm(graph, f + t * g) <= 1 + 2 * tol


def test_delta_is_not_extreme(triangle):
    f = Molecule.delta(triangle, "u")
    verdict = extreme_point_check(triangle, f)
    assert not verdict.extreme
    assert sorted(verdict.witness.support()) == ["u", "v", "w"]
    _check_witness(triangle, f.vector(), verdict)


def test_all_satisfied_triangle_is_extreme(triangle, tri_extreme):
    assert extreme_point_check(triangle, tri_extreme).extreme


def test_zero_is_not_extreme(triangle):
    verdict = extreme_point_check(triangle, Molecule.zero(triangle))
    assert not verdict.extreme and verdict.epsilon == 0.0
    _check_witness(triangle, np.zeros(3), verdict)


def test_extreme_requires_unbalanced_graph(triangle):
    with pytest.raises(GraphError):
        extreme_point_check(triangle.trivialized(), Molecule.zero(triangle))


def test_saturated_cycle_functions_are_extreme(rng):
    g = cycle_graph(5, 1, 3)
    found = 0
    for _ in range(50):
        f = saturated_cycle_function(g, rng)
        if f is None:
            continue
        found += 1
        assert lip_sigma_norm(g, f) == pytest.approx(1, abs=1e-12)
        assert extreme_point_check(g, f).extreme
        assert perturbation_nullity(g, f) == 0
    assert found > 5


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_extreme_verdict_agrees_with_nullspace_oracle(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r, n_max=5)
    f = random_complex(r, g.n)
    f = f / lip_sigma_norm(g, f)
    verdict = extreme_point_check(g, f)
    assert verdict.extreme == (perturbation_nullity(g, f) == 0)
    if not verdict.extreme:
        _check_witness(g, f, verdict)


# -- span feasibility --------------------------------------------------------


def test_span_examples(triangle):
    assert span_feasibility(triangle, Molecule.delta(triangle, "u")).in_span
    trivial = triangle.trivialized()
    assert not span_feasibility(trivial, Molecule.delta(trivial, "u")).in_span
    assert span_feasibility(trivial, magnetic_atom(trivial, "u", "v")).in_span


def test_span_on_balanced_switched_graph(rng):
    g = cycle_graph(4, 1, 2)  # balanced
    for u, v in g.edge_names():
        assert span_feasibility(g, magnetic_atom(g, u, v)).in_span
    assert not span_feasibility(g, Molecule.delta(g, "x0")).in_span
