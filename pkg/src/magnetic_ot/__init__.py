"""Optimal transport norms on magnetic graphs.

Root-of-unity signatures, balance and switching, lift graphs, sigma-Lipschitz
and magnetic Arens-Eells norms with duality certificates, extreme points of
the Lipschitz unit ball, and the compression map from the lift.
"""

from .graph import (
    BalanceReport,
    GraphError,
    LiftGraph,
    MagneticGraph,
    RootOfUnity,
    SwitchingFunction,
    balance_check,
    build_lift,
    connected_components,
    shortest_path_distance,
    switch_signature,
    validate,
)
from .lift import (
    FiberReport,
    canonical_preimage,
    classical_ae_norm_on_lift,
    compress,
    conjecture_demo,
    fiber_min,
)
from .solver import (
    InfeasibleMolecule,
    NotConverged,
    SolveReport,
    SolverConfig,
    ae_norm,
    atom_matrix,
    certified_bounds,
    duality_gap_check,
    lip_dual,
)
from .spaces import (
    ExtremeVerdict,
    Molecule,
    OutsideUnitBall,
    SatisfiedSubgraph,
    extreme_point_check,
    lip0_norm,
    lip_sigma_norm,
    magnetic_atom,
    path_molecule,
    satisfied_subgraph,
    span_feasibility,
)

__version__ = "0.1.0"
