"""Command-line front end.

Every subcommand reads a surface document (JSON, as written by
``catalog``) from ``--data`` or stdin and writes a structured report to
stdout or ``--out``.  Exit codes: 0 success, 1 usage error, 2 validation
failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import functools
import json
import math
import sys
import warnings

import numpy as np

from . import catalog, geometry, mesh, period, verify
from .algebra import complex_to_json, is_inf, matrix_to_json
from .config import IntegratorConfig, default_tol
from .errors import CMC1Error, NumericalError, ValidationError
from .integrate import build_system, full_representation
from .mero import RationalFn, residue_at
from .surface import SurfaceData, compatibility_check, end_orders, pseudometric_divisor, point_to_str

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _clean(x):
    """JSON-ready copy with complex numbers as ``[re, im]`` and no NaN."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(float(x.real)), _clean(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x + 0.0  # folds -0.0 into 0.0
    if isinstance(x, np.integer):
        return int(x)
    if is_inf(x):
        return complex_to_json(x)
    if hasattr(x, "to_json"):
        return _clean(x.to_json())
    if x is None or isinstance(x, (str, int)):
        return x
    return str(x)


def _dump(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"parameter {item!r} is not of the form key=value")
        out[key.strip()] = value.strip()
    return out


def _load_data(args) -> SurfaceData:
    if args.data and args.data != "-":
        with open(args.data) as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"input is not JSON: {exc}") from None
    return SurfaceData.from_json(doc)


def _human(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not all(isinstance(t, (int, float, str)) for t in (v if isinstance(v, list) else [0])):
                lines.append(f"{pad}{k}:")
                lines.append(_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(_clean(v))}")
    elif isinstance(obj, list):
        for v in obj:
            lines.append(f"{pad}-")
            lines.append(_human(v, indent + 1))
    else:
        lines.append(f"{pad}{json.dumps(_clean(obj))}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_catalog(args, cfg):
    if args.list:
        return {"families": sorted(catalog.FAMILIES)}
    if not args.name:
        raise UsageError("catalog needs --name (or --list)")
    return catalog.make(args.name, **_parse_params(args.param)).to_json()


def cmd_check(args, cfg):
    data = _load_data(args)
    out = {"label": data.label, "punctures": [complex_to_json(p) for p in data.punctures]}
    if data.gauss is not None:
        rep = compatibility_check(data.gauss.G, data.gauss.Q, data.punctures)
        out["compatibility"] = {
            "ok": rep.ok,
            "checks": [
                {"point": point_to_str(c.point), "kind": c.kind, "ord_Q": c.ord_Q, "branch_G": c.branch_G, "passed": c.passed}
                for c in rep.checks
            ],
        }
    system = build_system(data)
    residues = []
    for p in data.finite_punctures():
        vals = []
        for entry in _coefficient_entries(data, system.form):
            try:
                vals.append(residue_at(entry, p))
            except CMC1Error:
                vals.append(None)
        residues.append({"point": complex_to_json(p), "coefficient_residues": vals})
    out["residues"] = residues
    out["ends"] = end_orders(data)
    out["divisor"] = str(pseudometric_divisor(data))
    out["ok"] = out.get("compatibility", {"ok": True})["ok"]
    if not out["ok"]:
        raise _ReportedFailure(out, EXIT_VALIDATION)
    return out


def _coefficient_entries(data, form):
    if form == "left":
        Qc = data.gauss.Q.coefficient
        Qc = Qc if isinstance(Qc, RationalFn) else Qc.as_rational()
        R = Qc / data.gauss.G.deriv()
        G = data.gauss.G
        return [G * R, -(G * G * R), R]
    g, om = data.weierstrass.g, data.weierstrass.omega.coefficient
    return [g * om, -(g * g * om), om]


class _ReportedFailure(Exception):
    def __init__(self, report, code):
        super().__init__("check failed")
        self.report, self.code = report, code


def cmd_curvature(args, cfg):
    data = _load_data(args)
    rep = geometry.curvature_report(data)
    out = rep.to_json()
    out["inequalities"] = [c.__dict__ for c in geometry.inequality_report(rep, data.genus)]
    return out


def cmd_flux(args, cfg):
    data = _load_data(args)
    bal = geometry.flux_balance(data)
    out = bal.to_json()
    out["balanced"] = bal.residual <= max(cfg["tol"], 1e-9) * max(1.0, max(np.linalg.norm(F) for _, F in bal.fluxes))
    return out


def _rep_json(rep, ur, cls) -> dict:
    return {
        "basepoint": complex_to_json(rep.basepoint),
        "form": rep.form,
        "relation_defect": rep.relation_defect,
        "generators": [
            {"puncture": complex_to_json(p), "matrix": matrix_to_json(M), "trace": complex_to_json(complex(np.trace(M)))}
            for p, M in rep.generators
        ],
        "reducibility": cls.value,
        "unitarizability": ur.to_json(),
    }


def cmd_monodromy(args, cfg):
    data = _load_data(args)
    rep = full_representation(data, cfg=cfg["integrator"], tol=max(cfg["tol"], 1e-7))
    return _rep_json(rep, period.unitarizability(rep), period.reducibility(rep))


def _family_builder(name, params, key, value):
    return catalog.make(name, **{**params, key: value})


def _parse_scan(text: str):
    try:
        key, _, rng = text.partition("=")
        lo, hi, step = (float(t) for t in rng.split(":"))
    except ValueError:
        raise UsageError(f"scan {text!r} is not of the form key=lo:hi:step") from None
    if not key or not (hi > lo) or step <= 0:
        raise UsageError(f"scan {text!r} needs key, lo < hi and step > 0")
    return key, lo, hi, step


def cmd_period_solve(args, cfg):
    key, lo, hi, step = _parse_scan(args.scan)
    params = _parse_params(args.param)
    builder = functools.partial(_family_builder, args.family, params, key)
    res = period.period_solve(builder, lo, hi, step=step, parameter=key, workers=args.workers, cfg=cfg["integrator"])
    out = res.to_json()
    out["family"] = args.family
    out["params"] = params
    return out


def cmd_verify(args, cfg):
    kw = _parse_params(args.arg)
    if args.budget is not None:
        kw["rho"] = args.budget
    return verify.run_case(args.case, **kw).to_json()


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def cmd_mesh(args, cfg):
    if not args.obj_out:
        raise UsageError("mesh needs --out")
    data = _load_data(args)
    grid = mesh.MeshGrid.parse(args.grid, center=_parse_complex(args.center))
    if args.tree:
        grid.tree = args.tree
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = mesh.sample_surface(data, grid, dual=args.dual, cfg=cfg["integrator"])
    info = mesh.export_obj(m, args.obj_out)
    info["metric"] = mesh.metric_checks(data, m).to_json()
    info["periods_closed"] = m.periods_closed
    info["warnings"] = [str(w.message) for w in caught]
    return info


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cmc1", description="Construct and check CMC-1 surfaces in hyperbolic space.")
    p.add_argument("--report", choices=("json", "human"), default="json", help="output format")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--tol", type=float, help="comparison tolerance (default: CMC1_TOL or 1e-9)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def with_data(sp):
        sp.add_argument("--data", help="surface document (default: stdin)")
        return sp

    s = sub.add_parser("catalog", help="emit a catalog family as a surface document")
    s.add_argument("--name")
    s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_catalog)
    with_data(sub.add_parser("check", help="compatibility, residue and divisor report")).set_defaults(func=cmd_check)
    with_data(sub.add_parser("curvature", help="total and dual total curvature")).set_defaults(func=cmd_curvature)
    with_data(sub.add_parser("flux", help="flux matrices and their balance")).set_defaults(func=cmd_flux)
    with_data(sub.add_parser("monodromy", help="monodromy generators and unitarizability")).set_defaults(func=cmd_monodromy)
    s = sub.add_parser("period-solve", help="scan a family parameter for unitarizable monodromy")
    s.add_argument("--family", required=True)
    s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--scan", required=True, metavar="KEY=LO:HI:STEP")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_period_solve)
    s = sub.add_parser("verify", help="run an existence/nonexistence case or the type enumerator")
    s.add_argument("--case", required=True, choices=sorted(verify.CASES))
    s.add_argument("--budget", type=float, help="curvature budget TA/2pi for the enumerator")
    s.add_argument("--arg", action="append", default=[], metavar="KEY=VALUE")
    s.set_defaults(func=cmd_verify)
    s = with_data(sub.add_parser("mesh", help="sample the surface and export an OBJ mesh"))
    s.add_argument("--grid", required=True, help="annulus:r0,r1,nr,nt | disk:r,nr,nt | rectangle:x0,x1,y0,y1,nx,ny")
    s.add_argument("--out", dest="obj_out", help="OBJ path (a .K.csv sidecar is written next to it)")
    s.add_argument("--tree", choices=("rays", "rings", "columns", "rows"))
    s.add_argument("--center", default="0", help="chart center of polar grids, e.g. 0.5+0.4j")
    s.add_argument("--dual", action="store_true")
    s.set_defaults(func=cmd_mesh)
    return p


def _emit(obj, args) -> None:
    text = _dump(obj) if args.report == "json" else _human(_clean(obj)) + "\n"
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    try:
        cfg = {"tol": args.tol if args.tol is not None else default_tol(), "integrator": IntegratorConfig()}
        _emit(args.func(args, cfg), args)
        return EXIT_OK
    except _ReportedFailure as exc:
        _emit(exc.report, args)
        return exc.code
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (ValidationError, CMC1Error) as exc:
        sys.stderr.write(f"validation failure: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
