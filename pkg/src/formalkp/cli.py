"""Command-line driver: ``formalkp <group> <action> CONFIG [flags]``.

Every run reads one JSON config, writes one report (JSON by default) and
exits with

* 0  success,
* 2  validation error (unreadable or malformed input),
* 3  a numerical check failed its tolerance,
* 4  an operator fell outside the supported class.

Reports embed the resolved config, the arithmetic mode and the library
version; keys are sorted and floats are rounded to 12 significant digits so
repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .bandop import ClassViolation, op_build
from .groups import GL, PosReal, group_from_tag
from .kp import (coefficient_table_csv, hkp_from_classical, kp_complex_solve, kp_conserved, kp_fcl_solve,
                 kp_residual, kp_solve, sato_wilson_residual)
from .lattice import (PolyForm, Triangulation, curvature_estimate, discretize_connection, loop_holonomy,
                      refinement_sweep, simplex_holonomy)
from .pc import (PCMatrix, distance_matrix, enumerate_pc_from_distance, gauge_act, generic_ii, graph_holonomy,
                 koczkodaj_kii, left_orbit_consistentize, pc_is_consistent, pc_validate, ranked_kii)
from .scalar import QI, scalar_from_json, scalar_to_json
from .symbol import FormalSymbol, pairing_res, parity_class, residues, sym_compose
from .zeta import ExactValue, plain_trace, renorm_trace, res_zeta, schwinger_cocycle

EXIT_OK, EXIT_VALIDATION, EXIT_TOLERANCE, EXIT_CLASS = 0, 2, 3, 4

ACTIONS = {
    "kp": ("solve", "verify"),
    "pdo": ("compose", "res", "pair"),
    "trace": ("eval", "schwinger"),
    "pc": ("check", "gauge", "rank", "distance"),
    "lattice": ("holonomy", "discretize", "converge"),
}


class ValidationError(ValueError):
    """Bad input: reported with exit code 2."""


@dataclass
class RunConfig:
    """Resolved run parameters; command-line flags override the config file."""

    command: str
    config_path: str | None = None
    w_max: int | None = None
    depth: int | None = None
    l_max: int | None = None
    tol: float | None = None
    mode: str = "exact"
    format: str = "json"
    seed: int = 0
    out: str | None = None
    params: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def get(self, key: str, default=None):
        v = getattr(self, key, None) if key in ("w_max", "depth", "l_max", "tol") else None
        if v is not None:
            return v
        return self.params.get(key, default)

    def require(self, key: str):
        v = self.get(key)
        if v is None:
            raise ValidationError(f"config is missing required field {key!r}")
        return v

    def describe(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k not in ("out", "config_path", "format")}
        return d


# ---------------------------------------------------------------------- JSON helpers
def _round(x: float) -> float:
    if x == 0 or not np.isfinite(x):
        return float(x)
    return float(f"{x:.12g}")


def stable(obj: Any) -> Any:
    """Convert a result tree into JSON-ready data with rounded floats."""
    if isinstance(obj, dict):
        return {str(k): stable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [stable(v) for v in obj]
    if isinstance(obj, (bool, type(None), str, int)) and not isinstance(obj, np.integer):
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [_round(z.real), _round(z.imag)]
    if isinstance(obj, np.ndarray):
        return stable(obj.tolist())
    if isinstance(obj, (QI, Fraction)):
        return scalar_to_json(obj) if isinstance(obj, QI) else str(obj)
    if isinstance(obj, ExactValue):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return stable(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(stable(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"{path}: cannot read config: {e.strerror}") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from e
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}:1:1: config must be a JSON object")
    return obj


def _symbol(cfg: RunConfig, key: str) -> FormalSymbol:
    obj = cfg.require(key)
    try:
        return FormalSymbol.from_json(obj, exact=cfg.exact)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"field {key!r}: invalid symbol: {e}") from e


def _operator(cfg: RunConfig, key: str):
    expr = cfg.require(key)
    if not isinstance(expr, str):
        raise ValidationError(f"field {key!r}: expected an operator expression string")
    try:
        return op_build(expr, dim=cfg.get("dim"), exact=cfg.exact)
    except ClassViolation:
        raise
    except (SyntaxError, ValueError, KeyError, TypeError) as e:
        raise ValidationError(f"field {key!r}: cannot parse {expr!r}: {e}") from e


def _scalar(cfg: RunConfig, v):
    return scalar_from_json(v, cfg.exact)


def _group(cfg: RunConfig, obj: dict):
    tag = obj.get("group", "pos_real")
    try:
        return group_from_tag(tag, n=int(obj.get("n_group", obj.get("dim", 2))), exact=cfg.exact)
    except ValueError as e:
        raise ValidationError(str(e)) from e


def _pc_matrix(cfg: RunConfig, key: str = "matrix") -> PCMatrix:
    obj = cfg.require(key)
    G = _group(cfg, obj)
    try:
        if "upper" in obj:
            n = int(obj["n"])
            upper = {tuple(int(t) for t in k.split(",")): G.from_json(v) for k, v in obj["upper"].items()}
            return PCMatrix.from_upper(G, n, upper)
        return PCMatrix.from_json(obj, G)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"field {key!r}: invalid PC matrix: {e}") from e


# ---------------------------------------------------------------------- kp
def _residual_table(sol, tol: float) -> tuple[dict, bool]:
    table, ok = {}, True
    for k in range(1, sol.n_times + 1):
        r, s = kp_residual(sol, k), sato_wilson_residual(sol, k)
        good = r.ok(tol) and s.ok(tol)
        ok &= good
        table[str(k)] = {"kp": {"max_abs": r.max_abs, "exact_zero": r.exact_zero, "window_weight": r.window_weight},
                         "sato_wilson": {"max_abs": s.max_abs, "exact_zero": s.exact_zero},
                         "ok": good}
    return table, ok


def _kp_solution(cfg: RunConfig):
    variant = cfg.get("variant", "classical")
    w_max, depth = int(cfg.require("w_max")), int(cfg.require("depth"))
    L0 = _symbol(cfg, "L0")
    extra: dict = {}
    if variant in ("classical", "h"):
        sol = kp_solve(L0, w_max, depth)
        if variant == "h":
            sol = hkp_from_classical(sol)
    elif variant in ("fcl", "epsilon"):
        lam, mu = _scalar(cfg, cfg.require("lambda")), _scalar(cfg, cfg.require("mu"))
        sol = kp_fcl_solve(L0, lam, mu, w_max, depth, twisted=(variant == "epsilon"))
    elif variant == "complex":
        if cfg.get("square_of_L0", False):
            # alpha = 2 instance: evolve L0^2 and compare with the square of the classical solution
            M = L0
            L0 = sym_compose(M, M, depth - 2 * w_max - 16)
            sol = kp_complex_solve(L0, w_max, depth, kind=cfg.get("kind", "d"))
            classical = kp_solve(M, w_max, depth - 2)
            Lsq = classical.L.compose(classical.L, depth - 2)
            extra["matches_classical_square"] = sol.L.agrees(Lsq, depth, w_max=w_max, tol=0.0 if cfg.exact else 1e-10)
        else:
            sol = kp_complex_solve(L0, w_max, depth, kind=cfg.get("kind"))
    else:
        raise ValidationError(f"unknown KP variant {variant!r}")
    return sol, extra


def run_kp(cfg: RunConfig, action: str) -> tuple[dict, int]:
    tol = float(cfg.get("tol", 0.0 if cfg.exact else 1e-10))
    sol, extra = _kp_solution(cfg)
    residuals, ok = _residual_table(sol, tol)
    ok &= all(extra.values())
    out: dict = {"variant": sol.variant, "w_max": sol.w_max, "depth": sol.depth, "residuals": residuals}
    out.update(extra)
    if sol.variant in ("classical", "h"):
        cons = {}
        for k in range(1, int(cfg.get("conserved_max", 2)) + 1):
            c = kp_conserved(sol, k)
            moving = {" ".join(map(str, m)): v for m, v in c.items() if any(m) and not _is_zero(v, tol)}
            cons[str(k)] = {"value": c[(0,) * sol.n_times], "time_dependent_terms": moving}
            ok &= not moving
        out["conserved"] = cons
    if action == "solve":
        out.update({k: v for k, v in sol.bundle().items() if k in ("S", "Y", "L", "meta")})
    if cfg.format == "csv":
        out["csv"] = coefficient_table_csv(sol.L, int(cfg.get("csv_grade", -1)), cfg.get("csv_component", "plus"))
    return out, EXIT_OK if ok else EXIT_TOLERANCE


def _is_zero(v, tol: float) -> bool:
    if isinstance(v, QI):
        return v.is_zero()
    return abs(complex(v)) <= tol


# ---------------------------------------------------------------------- pdo
def _parity(A: FormalSymbol) -> str | None:
    try:
        return parity_class(A)
    except ValueError:
        return None


def run_pdo(cfg: RunConfig, action: str) -> tuple[dict, int]:
    A = _symbol(cfg, "A")
    if action == "compose":
        B = _symbol(cfg, "B")
        C = sym_compose(A, B, cfg.get("depth"))
        return {"product": C, "parity": _parity(C)}, EXIT_OK
    if action == "res":
        r = residues(A)
        return {"adler": r.adler, "res_plus": r.res_plus, "res_minus": r.res_minus, "res": r.res,
                "parity": _parity(A)}, EXIT_OK
    B = _symbol(cfg, "B")
    return {"pairing": pairing_res(A, B), "pairing_swapped": pairing_res(B, A)}, EXIT_OK


# ---------------------------------------------------------------------- trace
def run_trace(cfg: RunConfig, action: str) -> tuple[dict, int]:
    if action == "eval":
        A = _operator(cfg, "expr")
        tr = renorm_trace(A)
        out = {"renormalized_trace": tr, "res_zeta": res_zeta(A)}
        if A.is_finite():
            out["plain_trace"] = plain_trace(A)
        expect = cfg.get("expect")
        if expect is not None:
            out["matches_expected"] = str(tr) == expect
            return out, EXIT_OK if out["matches_expected"] else EXIT_TOLERANCE
        return out, EXIT_OK
    a, b = _operator(cfg, "a"), _operator(cfg, "b")
    cs = schwinger_cocycle(a, b)
    out = {"c_s": cs, "c_s_swapped": schwinger_cocycle(b, a)}
    expect = cfg.get("expect")
    if expect is not None:
        out["matches_expected"] = _is_zero(cs - _scalar(cfg, expect), float(cfg.get("tol", 0.0) or 0.0))
        return out, EXIT_OK if out["matches_expected"] else EXIT_TOLERANCE
    return out, EXIT_OK


# ---------------------------------------------------------------------- pc
def _pc_summary(A: PCMatrix, tol) -> dict:
    rep = pc_validate(A, tol)
    if not rep.ok:
        raise ValidationError("; ".join(rep.errors))
    out: dict = {"matrix": A, "consistent": pc_is_consistent(A, tol, "covariant"),
                 "consistent_contravariant": pc_is_consistent(A, tol, "contravariant")}
    if isinstance(A.group, PosReal) and A.is_dense():
        out["koczkodaj_kii"] = koczkodaj_kii(A)
    if A.group.has_metric() and A.is_dense():
        out["generic_ii"] = generic_ii(A)
    return out


def run_pc(cfg: RunConfig, action: str) -> tuple[dict, int]:
    tol = cfg.get("tol")
    A = _pc_matrix(cfg)
    if action == "check":
        out = _pc_summary(A, tol)
        if cfg.get("left_orbit", False):
            res = left_orbit_consistentize(A, rng=np.random.default_rng(cfg.seed))
            out["left_orbit"] = {"success": res.success,
                                 "gauge": None if res.gauge is None else [A.group.to_json(g) for g in res.gauge],
                                 "certificate": res.certificate}
        return out, EXIT_OK
    if action == "gauge":
        side = cfg.require("side")
        g = [A.group.from_json(x) for x in cfg.require("g")]
        if len(g) != A.n:
            raise ValidationError(f"gauge needs {A.n} elements, got {len(g)}")
        try:
            B = gauge_act(side, g, A)
        except ValueError as e:
            raise ValidationError(str(e)) from e
        before, after = _pc_summary(A, tol), _pc_summary(B, tol)
        return {"side": side, "before": before, "after": after}, EXIT_OK
    if action == "rank":
        l_max = int(cfg.get("l_max", 6))
        base = int(cfg.get("base", 0))
        hol = graph_holonomy(A, base, l_max=l_max)
        return {"ranked_kii": ranked_kii(A, base, l_max),
                "holonomy": [{"element": A.group.to_json(h), "length": L} for h, L in hol],
                "l_max": l_max, "base": base}, EXIT_OK
    K = distance_matrix(A)
    pre = enumerate_pc_from_distance(K, A.group)
    cons = [P for P in pre if pc_is_consistent(P, tol)]
    return {"distance": K.values, "ratios": K.ratios, "preimages": len(pre), "consistent_preimages": len(cons),
            "consistent": [P for P in cons]}, EXIT_OK


# ---------------------------------------------------------------------- lattice
def _form(cfg: RunConfig) -> PolyForm:
    try:
        return PolyForm.from_json(cfg.require("theta"))
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"field 'theta': invalid polynomial form: {e}") from e


def _tri(cfg: RunConfig) -> Triangulation:
    try:
        return Triangulation.from_json(cfg.require("triangulation"))
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"field 'triangulation': {e}") from e


def run_lattice(cfg: RunConfig, action: str) -> tuple[dict, int]:
    theta = _form(cfg)
    ode_tol = float(cfg.get("ode_tol", 1e-10))
    tol = float(cfg.get("tol", 1e-6))
    if action == "holonomy":
        A = simplex_holonomy(theta, cfg.require("vertices"), ode_tol)
        G = GL(theta.dim, tol=tol)
        A = PCMatrix(G, A.entries)
        out = {"matrix": A, "consistent": pc_is_consistent(A, tol), "generic_ii": generic_ii(A)}
        if cfg.get("expect_consistent") is not None:
            good = out["consistent"] == bool(cfg.get("expect_consistent"))
            return out, EXIT_OK if good else EXIT_TOLERANCE
        return out, EXIT_OK
    tri = _tri(cfg)
    if action == "discretize":
        field_ = discretize_connection(tri, theta, int(cfg.get("basepoint", 0)), ode_tol)
        rows, worst = [], 0.0
        eye = np.eye(theta.dim)
        for s in tri.simplices:
            H = loop_holonomy(field_, s)
            dev = float(np.max(np.abs(H - eye)))
            worst = max(worst, dev)
            rows.append({"simplex": list(s), "holonomy": H, "deviation": dev,
                         "curvature_estimate": curvature_estimate(field_, tri, s)})
        out = {"plaquettes": rows, "max_deviation": worst, "tree_order": field_.order,
               "edges": {f"{a},{b}": field_.g[(a, b)] for a, b in tri.edges()}}
        if cfg.get("expect_flat", False):
            out["flat_within_tol"] = worst <= tol
            return out, EXIT_OK if worst <= tol else EXIT_TOLERANCE
        return out, EXIT_OK
    sweep = refinement_sweep(tri, theta, int(cfg.get("levels", 3)), ode_tol)
    min_order = float(cfg.get("min_order", 1.0))
    out = {"table": sweep.to_rows(), "order": sweep.order, "order_stderr": sweep.order_stderr,
           "C": sweep.C, "C_interval": list(sweep.C_interval), "min_order": min_order}
    return out, EXIT_OK if sweep.order >= min_order else EXIT_TOLERANCE


RUNNERS: dict[str, Callable[[RunConfig, str], tuple[dict, int]]] = {
    "kp": run_kp, "pdo": run_pdo, "trace": run_trace, "pc": run_pc, "lattice": run_lattice,
}


# ---------------------------------------------------------------------- entry point
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="formalkp", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"formalkp {__version__}")
    groups = p.add_subparsers(dest="group", required=True)
    for g, actions in ACTIONS.items():
        gp = groups.add_parser(g)
        sub = gp.add_subparsers(dest="action", required=True)
        for a in actions:
            ap = sub.add_parser(a)
            ap.add_argument("config", help="JSON config file")
            ap.add_argument("--wmax", type=int, dest="w_max")
            ap.add_argument("--depth", type=int)
            ap.add_argument("--lmax", type=int, dest="l_max")
            ap.add_argument("--tol", type=float)
            ap.add_argument("--mode", choices=("exact", "float"))
            ap.add_argument("--format", choices=("json", "csv", "text"))
            ap.add_argument("--seed", type=int)
            ap.add_argument("--out", help="write the report here instead of stdout")
    return p


def make_config(args: argparse.Namespace) -> RunConfig:
    params = load_config(args.config)
    cfg = RunConfig(command=f"{args.group} {args.action}", config_path=args.config,
                    w_max=args.w_max, depth=args.depth, l_max=args.l_max, tol=args.tol,
                    mode=args.mode or params.pop("mode", "exact"),
                    format=args.format or params.pop("format", "json"),
                    seed=args.seed if args.seed is not None else int(params.pop("seed", 0)),
                    out=args.out, params=params)
    params.pop("mode", None), params.pop("format", None), params.pop("seed", None)
    if cfg.mode not in ("exact", "float"):
        raise ValidationError(f"unknown arithmetic mode {cfg.mode!r}")
    return cfg


def _text(report: dict) -> str:
    lines = [f"{report['command']}  [{report['mode']}]  status={report['status']}"]
    for k, v in sorted(stable(report["result"]).items()):
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True, ensure_ascii=False)
            if len(v) > 100:
                v = v[:97] + "..."
        lines.append(f"  {k}: {v}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[dict, int]:
    group, action = cfg.command.split()
    result, code = RUNNERS[group](cfg, action)
    status = {EXIT_OK: "ok", EXIT_TOLERANCE: "tolerance_failure"}[code]
    return {"command": cfg.command, "mode": cfg.mode, "version": __version__, "config": cfg.describe(),
            "status": status, "result": result}, code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        report, code = run(cfg)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ClassViolation as e:
        print(f"class violation: {e}", file=sys.stderr)
        return EXIT_CLASS
    except (ValueError, TypeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if cfg.format == "csv" and "csv" in report["result"]:
        text = report["result"]["csv"]
    elif cfg.format == "text":
        text = _text(report)
    else:
        text = dumps(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
