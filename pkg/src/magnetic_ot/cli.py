"""Command-line front end.

Every subcommand prints a JSON report on stdout (``suite`` can also emit
CSV).  Exit status: 0 on success, 1 when a mathematical check fails
(infeasible molecule, duality gap exceeded, no convergence, invalid graph
under ``validate``), 2 on input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import graph as gc
from . import lift as lt
from . import solver as sv
from . import spaces as sp
from .suite import SUITE_COLUMNS, run_suite

SIG_DIGITS = 9


class InputError(Exception):
    def __init__(self, category: str, message: str, location: str | None = None):
        super().__init__(message)
        self.category = category
        self.location = location


class CheckFailed(Exception):
    """Carries a report to print before exiting with status 1."""

    def __init__(self, report: dict):
        super().__init__(report.get("message", "check failed"))
        self.report = report


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-6
    feas_tol: float = 1e-9
    max_iter: int = 100_000
    K: int = 64
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0 or self.feas_tol <= 0:
            raise InputError("config", "tolerances must be positive")
        if self.K < 8 or self.K % 2:
            raise InputError("config", f"--K must be an even integer >= 8, got {self.K}")
        if self.max_iter < 1:
            raise InputError("config", "--max-iter must be positive")

    def solver(self) -> sv.SolverConfig:
        return sv.SolverConfig(
            feas_tol=self.feas_tol, gap_tol=self.tolerance, max_iter=self.max_iter, K=self.K
        )


# ---------------------------------------------------------------------------
# output


def _clean(obj):
    """Round floats to 9 significant digits and make the tree JSON-serializable."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        r = float(f"{obj:.{SIG_DIGITS}g}")
        return 0.0 if r == 0 else r
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# input


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError("io", str(exc), path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("json", f"{exc.msg} at line {exc.lineno} column {exc.colno}", path) from None


def load_graph(path: str, check: bool = True) -> gc.MagneticGraph:
    data = _read_json(path)
    try:
        graph = gc.MagneticGraph.from_dict(data)
    except gc.GraphError as exc:
        raise InputError("graph", str(exc), path) from None
    if check:
        problems = gc.validate(graph)
        if problems:
            raise InputError("graph", "; ".join(problems), path)
    return graph


def load_molecule(graph: gc.MagneticGraph, path: str) -> sp.Molecule:
    try:
        return sp.Molecule.from_dict(graph, _read_json(path))
    except gc.GraphError as exc:
        raise InputError("molecule", str(exc), path) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args, cfg):
    graph = load_graph(args.graph, check=False)
    problems = gc.validate(graph)
    report = {"valid": not problems, "violations": problems}
    if problems:
        raise CheckFailed(report)
    return report


def cmd_components(args, cfg):
    comps = gc.connected_components(load_graph(args.graph))
    return {"count": len(comps), "components": comps}


def cmd_balance(args, cfg):
    return gc.balance_check(load_graph(args.graph)).to_dict()


def cmd_switch(args, cfg):
    graph = load_graph(args.graph)
    tau = gc.SwitchingFunction.from_dict(_read_json(args.tau), p=graph.p)
    return gc.switch_signature(graph, tau).to_dict()


def cmd_lift(args, cfg):
    lift = gc.build_lift(load_graph(args.graph))
    out = lift.graph.to_dict()
    out["base_p"] = lift.p
    out["correspondence"] = {name: {"vertex": v, "k": k} for name, (v, k) in lift.correspondence().items()}
    return out


def cmd_distance(args, cfg):
    graph = load_graph(args.graph)
    d = gc.shortest_path_distance(graph, args.source, args.target)
    return {"source": args.source, "target": args.target, "distance": d, "reachable": d is not None}


def cmd_lipnorm(args, cfg):
    graph = load_graph(args.graph)
    f = load_molecule(graph, args.function)
    value = sp.lip0_norm(graph, f) if args.classical else sp.lip_sigma_norm(graph, f)
    return {"norm": value, "classical": args.classical}


def cmd_atom(args, cfg):
    graph = load_graph(args.graph)
    return sp.magnetic_atom(graph, args.u, args.v).to_dict()


def cmd_pathmol(args, cfg):
    graph = load_graph(args.graph)
    m, hol = sp.path_molecule(graph, args.path)
    out = m.to_dict()
    out["holonomy"] = str(hol)
    return out


def cmd_satisfied(args, cfg):
    graph = load_graph(args.graph)
    sat = sp.satisfied_subgraph(graph, load_molecule(graph, args.function), args.sat_tol)
    return {"edges": [list(e) for e in sat.edge_names()], "tolerance": sat.tolerance, "graph": sat.graph.to_dict()}


def cmd_extreme(args, cfg):
    graph = load_graph(args.graph)
    return sp.extreme_point_check(graph, load_molecule(graph, args.function), args.sat_tol).to_dict()


def cmd_feasible(args, cfg):
    graph = load_graph(args.graph)
    report = sp.span_feasibility(graph, load_molecule(graph, args.molecule), cfg.feas_tol)
    if not report.in_span:
        raise CheckFailed(report.to_dict())
    return report.to_dict()


def cmd_aenorm(args, cfg):
    graph = load_graph(args.graph)
    m = load_molecule(graph, args.molecule)
    return sv.ae_norm(graph, m, cfg.solver(), bounds=not args.no_bounds).to_dict()


def cmd_dualnorm(args, cfg):
    graph = load_graph(args.graph)
    value, witness = sv.lip_dual(graph, load_molecule(graph, args.molecule), cfg.solver())
    return {"value": value, "witness": witness.to_dict(), "witness_lip_norm": sp.lip_sigma_norm(graph, witness)}


def cmd_bounds(args, cfg):
    graph = load_graph(args.graph)
    lower, upper = sv.certified_bounds(graph, load_molecule(graph, args.molecule), cfg.K)
    return {"lower": lower, "upper": upper, "K": cfg.K}


def cmd_gapcheck(args, cfg):
    graph = load_graph(args.graph)
    report = sv.duality_gap_check(graph, load_molecule(graph, args.molecule), cfg.solver()).to_dict()
    if not report["pass"]:
        raise CheckFailed(report)
    return report


def cmd_compress(args, cfg):
    graph = load_graph(args.graph)
    lift = gc.build_lift(graph)
    return lt.compress(graph, lift, load_molecule(lift.graph, args.lift_molecule)).to_dict()


def cmd_preimage(args, cfg):
    graph = load_graph(args.graph)
    lift = gc.build_lift(graph)
    data = _read_json(args.coefficients)
    try:
        raw = data.get("coefficients", data)
        coeffs = {k.replace("->", "→"): complex(v[0], v[1]) for k, v in raw.items()}
    except (AttributeError, TypeError, IndexError, ValueError) as exc:
        raise InputError("coefficients", f"malformed coefficient JSON: {exc}", args.coefficients) from None
    return lt.canonical_preimage(graph, lift, coeffs).to_dict()


def cmd_fibermin(args, cfg):
    graph = load_graph(args.graph)
    lift = gc.build_lift(graph)
    report = lt.fiber_min(graph, lift, load_molecule(graph, args.molecule), cfg.solver()).to_dict()
    if report["verdict"] != "equal":
        raise CheckFailed(report)
    return report


def cmd_demo(args, cfg):
    return lt.conjecture_demo(cfg.solver())


def cmd_suite(args, cfg):
    rows = run_suite(cfg.seed, args.count, cfg.solver())
    summary = {
        "seed": cfg.seed,
        "count": len(rows),
        "passed": sum(r["passed"] for r in rows),
        "max_abs_gap": max((abs(r["gap"]) for r in rows), default=0.0),
        "rows": rows,
    }
    if summary["passed"] != len(rows):
        raise CheckFailed(summary)
    return summary


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUITE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(_clean(row))
    return buf.getvalue()


COMMANDS = {
    "validate": (cmd_validate, ["graph"], "check simplicity, exponent ranges and orientations"),
    "components": (cmd_components, ["graph"], "connected components"),
    "balance": (cmd_balance, ["graph"], "balance verdict with certificate or violating cycle"),
    "switch": (cmd_switch, ["graph", "tau"], "apply a switching function"),
    "lift": (cmd_lift, ["graph"], "build the p-fold lift graph"),
    "distance": (cmd_distance, ["graph", "source", "target"], "shortest-path distance"),
    "lipnorm": (cmd_lipnorm, ["graph", "function"], "sigma-Lipschitz norm of a function"),
    "atom": (cmd_atom, ["graph", "u", "v"], "magnetic atom m_uv"),
    "pathmol": (cmd_pathmol, ["graph", "path"], "path molecule and holonomy of a walk"),
    "satisfied": (cmd_satisfied, ["graph", "function"], "sigma-satisfied subgraph"),
    "extreme": (cmd_extreme, ["graph", "function"], "extreme-point verdict with witness"),
    "feasible": (cmd_feasible, ["graph", "molecule"], "is the molecule in the atom span"),
    "aenorm": (cmd_aenorm, ["graph", "molecule"], "magnetic Arens-Eells norm with certificates"),
    "dualnorm": (cmd_dualnorm, ["graph", "molecule"], "Lipschitz-side dual value and witness"),
    "bounds": (cmd_bounds, ["graph", "molecule"], "polygonal LP lower/upper bounds"),
    "gapcheck": (cmd_gapcheck, ["graph", "molecule"], "primal/dual duality gap check"),
    "compress": (cmd_compress, ["graph", "lift_molecule"], "compress a lift molecule"),
    "preimage": (cmd_preimage, ["graph", "coefficients"], "canonical lift preimage of a combination"),
    "fibermin": (cmd_fibermin, ["graph", "molecule"], "fiber minimization over lift preimages"),
    "demo-counterexample": (cmd_demo, [], "path-molecule conjecture counterexample"),
    "suite": (cmd_suite, [], "seeded randomized property run"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-6, help="duality gap tolerance")
    common.add_argument("--feas-tol", type=float, default=1e-9, help="feasibility tolerance")
    common.add_argument("--max-iter", type=int, default=100_000)
    common.add_argument("--K", type=int, default=64, help="polygon size for LP bounds")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="magnetic-ot", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name, (_, positionals, help_text) in COMMANDS.items():
        sub = subs.add_parser(name, parents=[common], help=help_text)
        for pos in positionals:
            if pos == "path":
                sub.add_argument("path", nargs="+", help="vertex sequence")
            else:
                sub.add_argument(pos)
        if name in ("satisfied", "extreme"):
            sub.add_argument("--sat-tol", type=float, default=sp.DEFAULT_SATISFACTION_TOL)
        if name == "lipnorm":
            sub.add_argument("--classical", action="store_true", help="ignore the signature")
        if name == "aenorm":
            sub.add_argument("--no-bounds", action="store_true", help="skip the LP bracket")
        if name == "suite":
            sub.add_argument("--count", type=int, default=50)
    return parser


def _error(category: str, message: str, location: str | None = None) -> str:
    return json.dumps({"error": category, "message": message, "location": location}, ensure_ascii=False)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    handler = COMMANDS[args.command][0]
    try:
        cfg = RunConfig(args.tol, args.feas_tol, args.max_iter, args.K, args.format, args.seed)
        report = handler(args, cfg)
        code = 0
    except CheckFailed as exc:
        report, code = exc.report, 1
    except sv.InfeasibleMolecule as exc:
        report, code = {"status": "infeasible", "message": str(exc)}, 1
    except sv.NotConverged as exc:
        report = exc.report.to_dict() if exc.report is not None else {"status": "max_iter"}
        report["message"] = str(exc)
        code = 1
    except InputError as exc:
        print(_error(exc.category, str(exc), exc.location), file=stderr)
        return 2
    except sp.OutsideUnitBall as exc:
        print(_error("precondition", str(exc)), file=stderr)
        return 2
    except (gc.GraphError, ValueError) as exc:
        print(_error("input", str(exc)), file=stderr)
        return 2
    if args.command == "suite" and args.format == "csv":
        stdout.write(_rows_to_csv(report["rows"]))
    else:
        print(dumps(report), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
