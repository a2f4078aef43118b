"""``wco`` command line front end.

Every command builds one plain dict; ``--json`` dumps it and the table mode
renders the same dict, so both formats carry identical data.
Exit codes: 0 success, 1 fuzz failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys as _sys
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from . import fuzz, gaussian, invariant, oracle, properties, trees
from .io import complex_pair, load_system, load_tree, matrix_to_json
from .measure_space import DiscreteMeasureSpace, InputError
from .model import WcoSystem, conditional_expectation, operator_norm, rn_values
from .transforms import aluthge_weight, polar

DEMOS = ("blackblack", "blackblackplus", "rudy", "gauss1d", "kernel2")
ALUTHGE_TABLE = (0.25, 0.5, 1.0)


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-9
    output_format: str = "table"
    seed: int = 42
    max_atoms: int = 8
    fuzz_count: int = 1000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("--tol must be positive")
        if not 1 <= self.max_atoms <= oracle.MAX_DIM:
            raise InputError(f"--max-atoms must lie in 1..{oracle.MAX_DIM}")
        if self.fuzz_count < 0:
            raise InputError("--count must be nonnegative")


def analyze_schema() -> dict:
    return json.loads(resources.files("wco").joinpath("analyze.schema.json").read_text(encoding="utf-8"))


def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return _clean(complex_pair(obj))
    return obj


# -- payload builders -------------------------------------------------------


def analysis(sys: WcoSystem, tol: float) -> dict:
    ids = sys.space.ids
    h = rn_values(sys)
    eh = conditional_expectation(sys, h).real
    pd = polar(sys)
    al = {a: aluthge_weight(sys, a) for a in ALUTHGE_TABLE}
    atoms = []
    for k, a in enumerate(ids):
        row = {
            "id": a,
            "mass": float(sys.masses[k]),
            "phi": ids[sys.phi[k]],
            "w": complex_pair(sys.w[k]),
            "h": float(h[k]),
            "E_h": float(eh[k]),
            "phase_weight": complex_pair(pd.phase_weight[k]),
            "modulus": float(pd.modulus_density[k]),
        }
        for alpha, aw in al.items():
            row[f"aluthge_{alpha:g}"] = complex_pair(aw.w_alpha[k])
        atoms.append(row)
    return _clean({
        "tolerance": tol,
        "norm": operator_norm(sys),
        "atoms": atoms,
        "reports": [r.to_dict() for r in properties.all_reports(sys, tol)],
    })


def oracle_payload(sys: WcoSystem, tol: float) -> dict:
    T = oracle.to_matrix(sys).entries
    metrics = {
        "weak_centered_commutator": oracle.weak_centered_commutator(T),
        "quasinormal_commutator": oracle.quasinormal_commutator(T),
        "moduli_commutator": oracle.moduli_commutator(T),
        "normality_gap": oracle.normality_gap(T),
    }
    gu, gm = fuzz.polar_gaps(sys, T)
    metrics["polar_phase_gap"] = gu
    metrics["polar_modulus_gap"] = gm
    for a in ALUTHGE_TABLE:
        metrics[f"aluthge_gap_{a:g}"] = fuzz.aluthge_gap(sys, T, a)
    wc_closed = properties.is_weakly_centered(sys, tol).verdict
    qn_closed = properties.is_quasinormal(sys, tol).verdict
    hy_closed = properties.is_hyponormal(sys, tol).verdict
    agreements = [
        {"property": "weakly_centered", "closed_form": wc_closed,
         "matrix": metrics["weak_centered_commutator"] <= fuzz.COMMUTATOR_TOL},
        {"property": "moduli_commute", "closed_form": wc_closed,
         "matrix": metrics["moduli_commutator"] <= fuzz.COMMUTATOR_TOL},
        {"property": "quasinormal", "closed_form": qn_closed,
         "matrix": metrics["quasinormal_commutator"] <= fuzz.COMMUTATOR_TOL},
        {"property": "hyponormal", "closed_form": hy_closed,
         "matrix": properties.matrix_hyponormal(sys).verdict},
    ]
    for row in agreements:
        row["agree"] = row["closed_form"] == row["matrix"]
    return _clean({"metrics": metrics, "agreements": agreements})


def invariant_payload(sys: WcoSystem, tol: float) -> dict:
    found = invariant.find_invariant(sys, tol)
    out = {"descriptor": found.to_dict()}
    if isinstance(found, invariant.SubspaceDescriptor):
        out["verification"] = invariant.verify_invariant(sys, found).to_dict()
    return _clean(out)


def tree_payload(shift: trees.TreeShift, interior_only: bool, tol: float) -> dict:
    sys = trees.tree_to_wco(shift)
    T = oracle.to_matrix(sys).entries
    return _clean({
        "vertices": len(shift.tree.vertices),
        "interior_only": interior_only,
        "tree_criterion": trees.tree_weakly_centered(shift, interior_only, tol).to_dict(),
        "unweighted_criterion": trees.unweighted_tree_criterion(shift.tree, interior_only).to_dict(),
        "closed_form": properties.is_weakly_centered(sys, tol).to_dict(),
        "matrix_commutator": oracle.weak_centered_commutator(T),
        "phase_unitary": trees.phase_is_unitary(shift).to_dict(),
    })


def domain_gap_payload(n: int) -> dict:
    rows = invariant.aluthge_domain_gap(n)
    rs = [r for _, r in rows]
    return _clean({
        "rows": [{"n": k, "x": 3 * k, "r": r} for k, r in rows],
        "strictly_increasing": all(b > a for a, b in zip(rs, rs[1:])),
        "growth_ratio": rs[-1] / rs[0],
    })


def _parse_coeffs(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(c) for c in text.split(","))
    except ValueError:
        raise InputError(f"--coeffs must be comma separated numbers, got {text!r}") from None


def gauss_payload(alpha: float, coeffs, dim: int, samples: int, seed: int, entire: bool) -> dict:
    if alpha == 0:
        raise InputError("alpha must be nonzero (phi must be invertible)")
    if dim < 1 or samples < 1:
        raise InputError("--dim and --samples must be positive")
    rho = gaussian.EntireSeriesDensity(coeffs, is_polynomial=not entire)
    lin = gaussian.LinearSystem.scalar(alpha, dim)
    out = {
        "alpha": alpha,
        "coefficients": list(rho.coefficients),
        "dim": dim,
        "bounded": gaussian.is_bounded(lin, rho).to_dict(),
        "weakly_centered": gaussian.weakly_centered_flag(lin, rho).to_dict(),
        "inequality": gaussian.check_density_inequality(lin, rho, samples, seed).to_dict(),
    }
    if len(rho.coefficients) == 2:
        B, A = rho.coefficients
        t = lin.norm_sq(gaussian.sample_points(dim, samples, seed))
        direct = gaussian.linear_reduction_gap(alpha, A, B, t)
        closed = gaussian.linear_reduction_closed_form(alpha, A, B, t)
        rel = np.abs(direct - closed) / np.maximum(1.0, np.abs(closed))
        out["reduction_identity_max_rel_error"] = float(rel.max())
    return _clean(out)


def kernel2_system() -> WcoSystem:
    space = DiscreteMeasureSpace.counting(["1", "2"])
    return WcoSystem.from_mapping(space, {"1": "1", "2": "1"}, {"1": 1.0, "2": 0.0})


def demo_payload(name: str, alpha: float, tol: float, seed: int) -> dict:
    if name == "blackblack":
        shift = trees.build_t2infty(alpha, 4)
        return {"demo": name, "alpha": alpha, "tree": tree_payload(shift, False, tol),
                "analysis": analysis(trees.tree_to_wco(shift), tol)}
    if name == "blackblackplus":
        shift = trees.build_pruned_leaf_tree(4)
        return {"demo": name, "tree": tree_payload(shift, True, tol)}
    if name == "rudy":
        return {"demo": name, **domain_gap_payload(20)}
    if name == "gauss1d":
        return {"demo": name, **gauss_payload(2.0, (1.0, 1.0), 1, 1000, seed, False)}
    if name == "kernel2":
        sys = kernel2_system()
        return {"demo": name, "analysis": analysis(sys, tol), "invariant": invariant_payload(sys, tol)}
    raise InputError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")


# -- rendering --------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def _table(rows: list[dict]) -> list[str]:
    cols = list(dict.fromkeys(k for r in rows for k in r))
    cells = [[_fmt(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(cols, widths))]
    lines += ["  ".join(x.ljust(wd) for x, wd in zip(row, widths)) for row in cells]
    return lines


def render(payload, indent: str = "") -> str:
    lines: list[str] = []
    for key, val in payload.items():
        if isinstance(val, dict) and val:
            lines.append(f"{indent}{key}:")
            lines.append(render(val, indent + "  "))
        elif isinstance(val, list) and val and all(isinstance(r, dict) for r in val):
            lines.append(f"{indent}{key}:")
            lines += [indent + "  " + ln for ln in _table(val)]
        else:
            lines.append(f"{indent}{key}: {_fmt(val)}")
    return "\n".join(lines)


def emit(payload: dict, cfg: RunConfig) -> None:
    if cfg.output_format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(render(payload))


# -- argument parsing -------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=float, default=d(1e-9), help="relative tolerance (default 1e-9)")
    p.add_argument("--json", action="store_true", default=d(False), help="emit JSON instead of a table")
    p.add_argument("--seed", type=int, default=d(42), help="random seed (default 42)")
    p.add_argument("--max-atoms", type=int, default=d(8), help="atoms per fuzzed system (default 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wco", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="closed-form analysis of a system file")
    p.add_argument("file")
    p = sub.add_parser("oracle", parents=[common], help="matrix oracle metrics and verdict agreement")
    p.add_argument("file")
    p.add_argument("--dump-matrix", action="store_true", help="print the matrix as JSON [re, im] pairs")
    p = sub.add_parser("invariant", parents=[common], help="invariant subspace search and verification")
    p.add_argument("file")
    p = sub.add_parser("tree", parents=[common], help="weighted shift on a directed tree")
    p.add_argument("file")
    p.add_argument("--interior-only", action="store_true", help="skip vertices touching a truncation")
    p = sub.add_parser("gauss", parents=[common], help="linear maps with density rho(|x|^2)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--coeffs", default="1,1", help="ascending coefficients of rho, e.g. 'B,A' for A z + B")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--entire", action="store_true", help="treat rho as a truncated non-polynomial series")
    p = sub.add_parser("rudy", parents=[common], help="Aluthge domain-gap growth table (CSV)")
    p.add_argument("--n", type=int, default=20)
    p = sub.add_parser("demo", parents=[common], help=f"built-in examples: {', '.join(DEMOS)}")
    p.add_argument("name")
    p.add_argument("--alpha", type=float, default=2.0, help="weight on the (2,2) vertex for the two-branch tree demo")
    p = sub.add_parser("fuzz", parents=[common], help="closed-form versus matrix equivalence battery")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mutant", choices=sorted(fuzz.MUTANTS), help=argparse.SUPPRESS)
    return parser


def _run(args, cfg: RunConfig) -> int:
    cmd = args.command
    if cmd == "analyze":
        payload = analysis(load_system(args.file), cfg.tolerance)
        jsonschema.validate(payload, analyze_schema())
        emit(payload, cfg)
    elif cmd == "oracle":
        sys = load_system(args.file)
        payload = oracle_payload(sys, cfg.tolerance)
        if args.dump_matrix:
            payload["matrix"] = matrix_to_json(oracle.to_matrix(sys).entries)
            print(json.dumps(payload["matrix"]) if cfg.output_format == "table" else json.dumps(payload, indent=2))
            return 0
        emit(payload, cfg)
    elif cmd == "invariant":
        emit(invariant_payload(load_system(args.file), cfg.tolerance), cfg)
    elif cmd == "tree":
        emit(tree_payload(load_tree(args.file), args.interior_only, cfg.tolerance), cfg)
    elif cmd == "gauss":
        emit(gauss_payload(args.alpha, _parse_coeffs(args.coeffs), args.dim, args.samples, cfg.seed,
                           args.entire), cfg)
    elif cmd == "rudy":
        payload = domain_gap_payload(args.n)
        if cfg.output_format == "json":
            emit(payload, cfg)
        else:
            buf = _io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=["n", "x", "r"], lineterminator="\n")
            writer.writeheader()
            writer.writerows(payload["rows"])
            print(buf.getvalue(), end="")
    elif cmd == "demo":
        emit(_clean(demo_payload(args.name, args.alpha, cfg.tolerance, cfg.seed)), cfg)
    elif cmd == "fuzz":
        summary = fuzz.run_battery(cfg.fuzz_count, cfg.seed, cfg.max_atoms, args.workers, args.mutant)
        emit(_clean({
            "count": summary.count,
            "seed": cfg.seed,
            "failures": summary.failures,
            "passed": summary.passed,
            "failed": summary.failed,
            "observed_not_counted": {k: {"held": v[0], "violated": v[1]} for k, v in summary.observed.items()},
            "counterexamples": summary.counterexamples,
        }), cfg)
        return 1 if summary.failures else 0
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.tol, "json" if args.json else "table", args.seed, args.max_atoms,
                        getattr(args, "count", 1000))
        return _run(args, cfg)
    except InputError as exc:
        print(f"wco: error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    _sys.exit(main())
