"""Arens-Eells norms by complex l1 minimization, with duality certificates.

The magnetic Arens-Eells norm of ``m`` is

    min  sum_e |a_e|   subject to   A a = m,

where column ``e = (u, v)`` of the atom matrix ``A`` is ``delta_u - sigma_uv delta_v``.
Only the stored orientation of each edge gets a column: the reversed atom is a
unit multiple of it, so nothing is lost.  The dual problem is

    max  Re sum_u f(u) m(u)   subject to   |(A^T f)_e| <= 1,

i.e. a maximization over the sigma-Lipschitz unit ball.  Both are solved with
ADMM; a third, independent bracket comes from a polygonal LP relaxation.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog

from .graph import GraphError, MagneticGraph, balance_check, require_valid
from .spaces import FunctionLike, Molecule, as_vector, lip_sigma_norm, signature_values, span_feasibility

log = logging.getLogger(__name__)


class InfeasibleMolecule(ValueError):
    """The molecule is not in the span of the atoms."""


class NotConverged(RuntimeError):
    """ADMM hit its iteration limit; the partial report is attached."""

    def __init__(self, message: str, report: "SolveReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class SolverConfig:
    feas_tol: float = 1e-9
    gap_tol: float = 1e-6
    max_iter: int = 100_000
    rho: float = 1.0
    adaptive: bool = True
    K: int = 64
    check_every: int = 25

    def __post_init__(self):
        if self.feas_tol <= 0 or self.gap_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.K < 8 or self.K % 2:
            raise ValueError(f"K must be an even integer >= 8, got {self.K}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


DEFAULT_CONFIG = SolverConfig()


def atom_matrix(graph: MagneticGraph) -> np.ndarray:
    """Dense ``n x |E|`` matrix whose columns are the atoms of the stored orientations."""
    A = np.zeros((graph.n, len(graph.edges)), dtype=complex)
    sig = signature_values(graph)
    for j, e in enumerate(graph.edges):
        A[e.tail, j] = 1.0
        A[e.head, j] = -sig[j]
    return A


def _pinv_hermitian(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Pseudo-inverse of a Hermitian PSD matrix via its eigendecomposition."""
    if M.size == 0:
        return M.copy()
    w, V = np.linalg.eigh(M)
    cutoff = rtol * max(1.0, float(np.max(np.abs(w))))
    inv = np.where(w > cutoff, 1.0 / np.where(w > cutoff, w, 1.0), 0.0)
    return (V * inv) @ V.conj().T


def _shrink(v: np.ndarray, t: float) -> np.ndarray:
    """Complex soft-thresholding: shrink magnitudes by ``t``, keep phases."""
    mag = np.abs(v)
    scale = np.maximum(mag - t, 0.0) / np.where(mag > 0, mag, 1.0)
    return v * scale


def _unit_disk(v: np.ndarray) -> np.ndarray:
    mag = np.abs(v)
    return v / np.maximum(mag, 1.0)


def _witness_from_direction(A: np.ndarray, m: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, float]:
    """Scale ``f`` into the dual-feasible set and rotate the pairing onto the reals.

    Returns the adjusted ``f`` and its (lower-bound) dual value.
    """
    lip = float(np.max(np.abs(A.T @ f))) if A.shape[1] else 0.0
    if lip > 1.0:
        f = f / lip
    z = complex(np.sum(f * m))
    if abs(z) > 0:
        f = f * (abs(z) / z)
    return f, abs(z)


@dataclass
class BasisPursuitResult:
    coefficients: np.ndarray
    value: float
    witness: np.ndarray
    dual_value: float
    iterations: int
    status: str
    residual: float


def basis_pursuit(A: np.ndarray, m: np.ndarray, config: SolverConfig = DEFAULT_CONFIG) -> BasisPursuitResult:
    """Solve ``min ||a||_1 s.t. A a = m`` over complex ``a`` by ADMM.

    Splitting: ``x`` is projected onto the affine set ``{A x = m}`` using a
    precomputed pseudo-inverse of ``A A^*``; ``z`` is the soft-thresholded
    copy; ``u`` the scaled multiplier.  ``rho * u`` always lies in the
    subdifferential of the l1 norm at ``z``, so mapping it back through
    ``A^*`` gives a Lipschitz-side witness.  Iteration stops once the
    certified gap ``sum|x| - dual`` is below ``config.gap_tol`` (relative to
    the value when that exceeds one) and the residuals are small, or at
    ``config.max_iter``.
    """
    n, E = A.shape
    m = np.asarray(m, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(m)))
    if E == 0 or not np.any(m):
        return BasisPursuitResult(np.zeros(E, complex), 0.0, np.zeros(n, complex), 0.0, 0, "converged", 0.0)

    G = _pinv_hermitian(A @ A.conj().T)
    A_plus = A.conj().T @ G
    Q = np.eye(E) - A_plus @ A
    x0 = A_plus @ m
    residual = float(np.linalg.norm(A @ x0 - m))
    if residual > config.feas_tol * scale * 10:
        raise InfeasibleMolecule(f"molecule is not in the atom span (residual {residual:.3g})")

    rho = config.rho
    z = x0.copy()
    u = np.zeros(E, dtype=complex)
    x = x0
    best = None
    status = "max_iter"
    it = 0
    for it in range(1, config.max_iter + 1):
        x = Q @ (z - u) + x0
        z_old = z
        z = _shrink(x + u, 1.0 / rho)
        u = u + x - z
        if it % config.check_every and it != config.max_iter:
            continue
        r = float(np.linalg.norm(x - z))
        s = rho * float(np.linalg.norm(z - z_old))
        primal = float(np.sum(np.abs(x)))
        f = np.conj(A_plus.conj().T @ (rho * u))
        f, dual = _witness_from_direction(A, m, f)
        if best is None or primal - dual < best[1] - best[2]:
            best = (x.copy(), primal, dual, f)
        gap = best[1] - best[2]
        if gap <= config.gap_tol * max(1.0, best[1]) * 1e-3 and r <= config.feas_tol * scale * math.sqrt(E) * 1e3:
            status = "converged"
            break
        if config.adaptive:
            if r > 10 * s:
                rho *= 2.0
                u /= 2.0
            elif s > 10 * r:
                rho /= 2.0
                u *= 2.0
    x, primal, dual, f = best
    residual = float(np.linalg.norm(A @ x - m))
    return BasisPursuitResult(x, primal, f, dual, it, status, residual)


def lipschitz_dual(A: np.ndarray, m: np.ndarray, config: SolverConfig = DEFAULT_CONFIG) -> tuple[float, np.ndarray, int, str]:
    """Maximize ``Re sum f*m`` over ``|A^T f|_inf <= 1`` by ADMM.

    The edge variable ``w = A^T f`` is projected onto unit disks; the
    ``f``-step solves the normal equations with the (pseudo-)inverted
    magnetic Laplacian ``conj(A) A^T``.  Stationarity in ``f`` reads
    ``A conj(rho u) = m``, so the conjugated multiplier projected onto
    ``{A a = m}`` is a primal candidate whose l1 norm bounds the optimum from
    above.  The returned value is that of a feasible, phase-normalized
    witness, reached once upper and lower bounds agree to ``gap_tol * 1e-3``.
    """
    n, E = A.shape
    m = np.asarray(m, dtype=complex)
    if E == 0 or not np.any(m):
        return 0.0, np.zeros(n, complex), 0, "converged"
    B = A.T
    L_pinv = _pinv_hermitian(B.conj().T @ B)
    A_plus = A.conj().T @ _pinv_hermitian(A @ A.conj().T)
    rho = config.rho
    w = np.zeros(E, dtype=complex)
    u = np.zeros(E, dtype=complex)
    best_val, best_f = -np.inf, np.zeros(n, complex)
    upper = np.inf
    status = "max_iter"
    it = 0
    for it in range(1, config.max_iter + 1):
        f = L_pinv @ (B.conj().T @ (w - u) + np.conj(m) / rho)
        Bf = B @ f
        w_old = w
        w = _unit_disk(Bf + u)
        u = u + Bf - w
        if it % config.check_every and it != config.max_iter:
            continue
        g, val = _witness_from_direction(A, m, f)
        if val > best_val:
            best_val, best_f = val, g
        a = np.conj(rho * u)
        a = a - A_plus @ (A @ a - m)
        upper = min(upper, float(np.sum(np.abs(a))))
        if upper - best_val <= config.gap_tol * max(1.0, best_val) * 1e-3:
            status = "converged"
            break
        r = float(np.linalg.norm(Bf - w))
        s = rho * float(np.linalg.norm(B.conj().T @ (w - w_old)))
        if config.adaptive:
            if r > 10 * s:
                rho *= 2.0
                u /= 2.0
            elif s > 10 * r:
                rho /= 2.0
                u *= 2.0
    return float(best_val), best_f, it, status


# ---------------------------------------------------------------------------
# graph-level entry points


@dataclass(frozen=True)
class SolveReport:
    graph: MagneticGraph
    value: float
    coefficients: np.ndarray
    dual_witness: Molecule
    dual_value: float
    gap: float
    lower: float | None
    upper: float | None
    iterations: int
    status: str
    residual: float
    config: SolverConfig = field(default=DEFAULT_CONFIG)
    seconds: float = 0.0

    def coefficient_map(self) -> dict[str, complex]:
        return {self.graph.edge_label(j): complex(a) for j, a in enumerate(self.coefficients)}

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "coefficients": {k: [z.real, z.imag] for k, z in self.coefficient_map().items()},
            "dual_witness": self.dual_witness.to_dict(),
            "dual_value": self.dual_value,
            "gap": self.gap,
            "lower": self.lower,
            "upper": self.upper,
            "iterations": self.iterations,
            "status": self.status,
            "residual": self.residual,
            "tolerances": {"feasibility": self.config.feas_tol, "gap": self.config.gap_tol},
        }


def _require_in_span(graph: MagneticGraph, m: np.ndarray, config: SolverConfig) -> None:
    span = span_feasibility(graph, m, config.feas_tol)
    if not span.in_span:
        worst = max(abs(z) for _, z in span.obstructions)
        raise InfeasibleMolecule(
            f"molecule is not in the atom span: pairing {worst:.3g} on a balanced component"
        )


def ae_norm(
    graph: MagneticGraph,
    m: FunctionLike,
    config: SolverConfig = DEFAULT_CONFIG,
    *,
    bounds: bool = False,
) -> SolveReport:
    """Magnetic Arens-Eells norm of ``m`` with a primal/dual certificate.

    Raises :class:`InfeasibleMolecule` when ``m`` is outside the atom span
    and :class:`NotConverged` (carrying the partial report) when ADMM runs
    out of iterations.  With ``bounds=True`` the LP bracket is attached.
    """
    require_valid(graph)
    start = time.perf_counter()
    vec = as_vector(graph, m)
    _require_in_span(graph, vec, config)
    A = atom_matrix(graph)
    res = basis_pursuit(A, vec, config)
    lower = upper = None
    if bounds:
        lower, upper = certified_bounds(graph, vec, config.K)
    report = SolveReport(
        graph=graph,
        value=res.value,
        coefficients=res.coefficients,
        dual_witness=Molecule.from_vector(graph, res.witness),
        dual_value=res.dual_value,
        gap=res.value - res.dual_value,
        lower=lower,
        upper=upper,
        iterations=res.iterations,
        status=res.status,
        residual=res.residual,
        config=config,
        seconds=time.perf_counter() - start,
    )
    log.debug("ae_norm: value=%.12g gap=%.3g iters=%d", report.value, report.gap, report.iterations)
    if res.status != "converged":
        raise NotConverged(f"ADMM did not converge in {config.max_iter} iterations", report)
    return report


def lip_dual(
    graph: MagneticGraph, m: FunctionLike, config: SolverConfig = DEFAULT_CONFIG
) -> tuple[float, Molecule]:
    """Lipschitz-side value ``max Re <f, m>`` over the unit ball, with its witness."""
    require_valid(graph)
    vec = as_vector(graph, m)
    _require_in_span(graph, vec, config)
    value, f, iterations, status = lipschitz_dual(atom_matrix(graph), vec, config)
    if status != "converged":
        raise NotConverged(f"dual ADMM did not converge in {iterations} iterations")
    return value, Molecule.from_vector(graph, f)


def polygon_lp(A: np.ndarray, m: np.ndarray, K: int = 64) -> float:
    """Minimize ``sum_e |a_e|_K`` subject to ``A a = m`` as a linear program.

    ``|a|_K = max_k Re(exp(-2 pi i k / K) a)`` is the support function of the
    regular ``K``-gon inscribed in the unit circle, so
    ``cos(pi/K) |a| <= |a|_K <= |a|``.
    """
    n, E = A.shape
    m = np.asarray(m, dtype=complex)
    if E == 0 or not np.any(m):
        return 0.0
    # variables: [Re a (E), Im a (E), t (E)]
    angles = 2 * np.pi * np.arange(K) / K
    c, s = np.cos(angles), np.sin(angles)
    rows = []
    eye = np.eye(E)
    for k in range(K):
        rows.append(np.hstack([c[k] * eye, s[k] * eye, -eye]))
    A_ub = np.vstack(rows)
    b_ub = np.zeros(K * E)
    Ar, Ai = A.real, A.imag
    A_eq = np.vstack(
        [
            np.hstack([Ar, -Ai, np.zeros((n, E))]),
            np.hstack([Ai, Ar, np.zeros((n, E))]),
        ]
    )
    b_eq = np.concatenate([m.real, m.imag])
    cost = np.concatenate([np.zeros(2 * E), np.ones(E)])
    bounds = [(None, None)] * (2 * E) + [(0, None)] * E
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:
        raise InfeasibleMolecule("linear program is infeasible: molecule outside the atom span")
    if res.status != 0:
        raise NotConverged(f"linear program failed: {res.message}")
    return float(res.fun)


def certified_bounds(graph: MagneticGraph, m: FunctionLike, K: int = 64) -> tuple[float, float]:
    """``(L, L / cos(pi/K))`` bracketing the Arens-Eells norm, from :func:`polygon_lp`."""
    if K < 8 or K % 2:
        raise ValueError(f"K must be an even integer >= 8, got {K}")
    require_valid(graph)
    vec = as_vector(graph, m)
    _require_in_span(graph, vec, DEFAULT_CONFIG)
    low = polygon_lp(atom_matrix(graph), vec, K)
    return low, low / math.cos(math.pi / K)


@dataclass(frozen=True)
class GapReport:
    primal: float
    dual: float
    gap: float
    passed: bool
    primal_report: SolveReport
    dual_witness: Molecule
    witness_lip: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "primal": self.primal,
            "dual": self.dual,
            "gap": self.gap,
            "pass": self.passed,
            "witness_lip_norm": self.witness_lip,
            "feasibility_residual": self.residual,
            "dual_witness": self.dual_witness.to_dict(),
            "primal_report": self.primal_report.to_dict(),
        }


def duality_gap_check(
    graph: MagneticGraph, m: FunctionLike, config: SolverConfig = DEFAULT_CONFIG
) -> GapReport:
    """Run :func:`ae_norm` and :func:`lip_dual` independently and compare.

    Passes when both certificates validate and ``|primal - dual| <= gap_tol``.
    Requires every component of the graph to be unbalanced.
    """
    require_valid(graph)
    if not balance_check(graph).all_unbalanced:
        raise GraphError("duality check requires an unbalanced graph (every component)")
    vec = as_vector(graph, m)
    primal = ae_norm(graph, vec, config)
    dual_value, witness = lip_dual(graph, vec, config)
    A = atom_matrix(graph)
    residual = float(np.linalg.norm(A @ primal.coefficients - vec))
    lip = lip_sigma_norm(graph, witness)
    pairing = complex(np.sum(witness.vector() * vec)).real
    scale = max(1.0, float(np.linalg.norm(vec)))
    valid = (
        residual <= config.feas_tol * scale
        and lip <= 1 + config.feas_tol
        and abs(pairing - dual_value) <= 1e-9 * max(1.0, abs(dual_value))
        and primal.dual_value <= primal.value + 1e-9
        and lip_sigma_norm(graph, primal.dual_witness) <= 1 + config.feas_tol
    )
    gap = primal.value - dual_value
    return GapReport(
        primal=primal.value,
        dual=dual_value,
        gap=gap,
        passed=bool(valid and abs(gap) <= config.gap_tol),
        primal_report=primal,
        dual_witness=witness,
        witness_lip=lip,
        residual=residual,
    )


def with_overrides(config: SolverConfig, **kwargs) -> SolverConfig:
    return replace(config, **{k: v for k, v in kwargs.items() if v is not None})
