import math

import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnetic_ot.graph import GraphError, SwitchingFunction, balance_check, switch_signature
from magnetic_ot.instances import (
    SQRT2_PLUS_2,
    random_complex,
    random_molecule,
    random_tree,
    random_unbalanced_graph,
)
from magnetic_ot.solver import (
    InfeasibleMolecule,
    NotConverged,
    SolverConfig,
    ae_norm,
    atom_matrix,
    certified_bounds,
    duality_gap_check,
    lip_dual,
)
from magnetic_ot.spaces import Molecule, lip_sigma_norm, magnetic_atom


def socp_oracle(graph, m):
    """Arens-Eells norm via a generic conic solver (independent route)."""
    A = atom_matrix(graph)
    a = cp.Variable(A.shape[1], complex=True)
    prob = cp.Problem(cp.Minimize(cp.sum(cp.abs(a))), [A @ a == np.asarray(m)])
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def test_atom_matrix_columns(triangle):
    A = atom_matrix(triangle)
    assert A.shape == (3, 3)
    assert np.all(np.count_nonzero(A, axis=0) == 2)
    assert np.allclose(np.abs(A[A != 0]), 1)


def test_triangle_coefficients_from_linear_system(triangle, tri_molecule):
    # a m_uv + b m_vw + c m_wu = delta_u + delta_v
    oracle = np.linalg.solve(
        np.array([[1, 0, -1], [-1j, 1, 0], [0, -1, 1]]), np.array([1, 1, 0])
    )
    assert np.allclose(oracle, [1 + 1j, 1j, 1j])
    assert np.sum(np.abs(oracle)) == pytest.approx(SQRT2_PLUS_2, abs=1e-14)

    report = ae_norm(triangle, tri_molecule)
    assert report.value == pytest.approx(SQRT2_PLUS_2, abs=1e-9)
    coeffs = report.coefficient_map()
    assert coeffs["u→v"] == pytest.approx(1 + 1j, abs=1e-8)
    assert coeffs["v→w"] == pytest.approx(1j, abs=1e-8)
    # stored orientation is u->w, and m_uw = -m_wu
    assert coeffs["u→w"] == pytest.approx(-1j, abs=1e-8)


def test_report_certificates(triangle, tri_molecule):
    r = ae_norm(triangle, tri_molecule, bounds=True)
    assert r.status == "converged"
    assert np.linalg.norm(atom_matrix(triangle) @ r.coefficients - tri_molecule.vector()) <= 1e-9
    assert lip_sigma_norm(triangle, r.dual_witness) <= 1 + 1e-9
    pairing = r.dual_witness.pair(tri_molecule)
    assert pairing.real == pytest.approx(r.dual_value, abs=1e-12)
    assert abs(pairing.imag) < 1e-12
    assert 0 <= r.gap <= 1e-6
    assert r.lower <= r.value <= r.upper


def test_zero_molecule(triangle):
    r = ae_norm(triangle, Molecule.zero(triangle))
    assert r.value == 0 and not np.any(r.coefficients)
    assert lip_dual(triangle, Molecule.zero(triangle))[0] == 0
    assert certified_bounds(triangle, Molecule.zero(triangle)) == (0, 0)


def test_atom_norm_is_one(triangle):
    for u, v in triangle.edge_names():
        atom = magnetic_atom(triangle, u, v)
        assert ae_norm(triangle, atom).value == pytest.approx(1, abs=1e-7)
        value, witness = lip_dual(triangle, atom)
        assert value == pytest.approx(1, abs=1e-7)
        lo, up = certified_bounds(triangle, atom, 64)
        assert lo >= math.cos(math.pi / 64) - 1e-9 and up <= 1 / math.cos(math.pi / 64) + 1e-9


def test_delta_witness_for_atom(triangle):
    atom = magnetic_atom(triangle, "u", "v")
    delta = Molecule.delta(triangle, "u")
    assert lip_sigma_norm(triangle, delta) == 1
    assert delta.pair(atom) == 1


def test_lip_dual_triangle(triangle, tri_molecule):
    value, witness = lip_dual(triangle, tri_molecule)
    assert value == pytest.approx(SQRT2_PLUS_2, abs=1e-7)
    assert lip_sigma_norm(triangle, witness) <= 1 + 1e-9


def test_bounds_triangle(triangle, tri_molecule):
    lo, up = certified_bounds(triangle, tri_molecule, 64)
    assert lo <= SQRT2_PLUS_2 <= up
    assert up / lo <= 1 / math.cos(math.pi / 64) + 1e-12
    with pytest.raises(ValueError):
        certified_bounds(triangle, tri_molecule, 7)


def test_bounds_deterministic(triangle, tri_molecule):
    assert certified_bounds(triangle, tri_molecule) == certified_bounds(triangle, tri_molecule)


def test_infeasible_molecule(triangle):
    trivial = triangle.trivialized()
    with pytest.raises(InfeasibleMolecule):
        ae_norm(trivial, Molecule.delta(trivial, "u"))
    with pytest.raises(InfeasibleMolecule):
        certified_bounds(trivial, Molecule.delta(trivial, "u"))


def test_not_converged_carries_report(rng):
    g = random_unbalanced_graph(rng)
    m = random_molecule(rng, g)
    with pytest.raises(NotConverged) as info:
        ae_norm(g, m, SolverConfig(max_iter=3, check_every=1))
    assert info.value.report.status == "max_iter"


def test_gapcheck_triangle(triangle, tri_molecule):
    report = duality_gap_check(triangle, tri_molecule)
    assert report.passed and abs(report.gap) <= 1e-6


def test_gapcheck_rejects_balanced(triangle):
    trivial = triangle.trivialized()
    with pytest.raises(GraphError):
        duality_gap_check(trivial, magnetic_atom(trivial, "u", "v"))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_matches_conic_oracle_and_duality(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r)
    m = random_molecule(r, g)
    report = duality_gap_check(g, m)
    assert report.passed
    assert report.dual <= report.primal + 1e-9
    assert report.primal == pytest.approx(socp_oracle(g, m.vector()), abs=1e-6)
    lo, up = certified_bounds(g, m)
    assert lo <= report.primal + 1e-9 and report.primal <= up + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_homogeneity_and_l2_bound(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r)
    m = random_molecule(r, g)
    base = ae_norm(g, m).value
    xi = np.exp(1j * r.uniform(0, 2 * np.pi))
    assert ae_norm(g, xi * m.vector()).value == pytest.approx(base, abs=1e-8)
    c = complex(*r.normal(size=2))
    assert ae_norm(g, c * m.vector()).value == pytest.approx(abs(c) * base, abs=1e-7 * max(1, abs(c)))
    assert base >= m.l2_norm() / 2 - 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_explicit_representation_is_upper_bound(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r)
    a = random_complex(r, len(g.edges))
    m = atom_matrix(g) @ a
    assert ae_norm(g, m).value <= np.sum(np.abs(a)) + 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_switching_covariance_of_ae_norm(seed):
    r = np.random.default_rng(seed)
    g = random_unbalanced_graph(r)
    m = random_molecule(r, g)
    tau = SwitchingFunction({v: int(r.integers(g.p)) for v in g.vertices}, g.p)
    phases = np.array([tau.value(v) for v in g.vertices])
    switched = switch_signature(g, tau)
    assert ae_norm(switched, np.conj(phases) * m.vector()).value == pytest.approx(
        ae_norm(g, m).value, abs=1e-8
    )


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_balanced_tree_reduces_to_classical(seed):
    r = np.random.default_rng(seed)
    tree = random_tree(r, int(r.integers(2, 8)), int(r.integers(2, 5)))
    a = random_complex(r, len(tree.edges))
    m = atom_matrix(tree) @ a
    tau = balance_check(tree).certificate()
    phases = np.array([tau.value(v) for v in tree.vertices])
    classical = switch_signature(tree, tau)
    assert classical.is_trivial
    direct = ae_norm(tree, m).value
    reduced = ae_norm(classical, np.conj(phases) * m).value
    # on a tree the representation is unique
    assert direct == pytest.approx(np.sum(np.abs(a)), abs=1e-8)
    assert reduced == pytest.approx(direct, abs=1e-8)
