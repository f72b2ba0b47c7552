"""Command-line surface: energies, invariance checks, sweeps, minimization.

Exit codes are a stable contract:

    0  success (invariance: deviation within tolerance)
    1  invariance deviation above tolerance
    2  invalid input (files, spec strings, option combinations)
    3  degenerate geometry (message names the offending pair)
    4  pole hit (a point mapped to infinity by an inversion)
"""

from __future__ import annotations

import argparse
import json
import sys

from .continuous import QuadratureSpec, energy_E, energy_E_cos, energy_pair_report
from .curves import curve_families, make_curve
from .discrete import e_cos_m, kim_kusner, simon_md
from .errors import GeometryError, InputError, PoleHitError
from .moebius import MoebiusTransform
from .experiments import (
    MinimizeOptions,
    gamma_limsup_sweep,
    invariance_sweep,
    minimize,
)
from .polygon import load_polygon, polygon_to_dict, save_polygon_json

DISCRETE_ENERGIES = {"ecos": e_cos_m, "kk": kim_kusner, "simon": simon_md}
CONTINUOUS_ENERGIES = {"continuous-E": energy_E, "continuous-Ecos": energy_E_cos}


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=["json", "csv"], default="json",
                        help="output format where both make sense")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
    parser.add_argument("--threads", type=int, default=0,
                        help="0 = auto (execution is vectorized in-process)")


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _quadrature_spec(args) -> QuadratureSpec:
    return QuadratureSpec(panels=args.panels, band=args.band, diagonal=args.diagonal)


def _parse_energy_mix(spec: str):
    """'ecos' or 'ecos=1,kk=0.01' -> name-or-weights for the experiments API."""
    if "=" not in spec:
        return spec
    weights = {}
    for item in spec.split(","):
        name, _, w = item.partition("=")
        try:
            weights[name.strip()] = float(w)
        except ValueError as exc:
            raise InputError(f"bad energy weight {item!r}") from exc
    return weights


def cmd_energy(args) -> int:
    if (args.polygon is None) == (args.curve is None):
        raise InputError("give exactly one of --polygon or --curve")
    if args.energy in DISCRETE_ENERGIES:
        if args.polygon is None:
            raise InputError(f"--energy {args.energy} needs --polygon")
        p = load_polygon(args.polygon)
        keep_terms = args.terms or (args.format == "csv")
        if args.energy == "ecos":
            report = e_cos_m(p, keep_terms=keep_terms)
        else:
            if keep_terms:
                raise InputError("per-pair terms are only available for --energy ecos")
            report = DISCRETE_ENERGIES[args.energy](p)
        if args.format == "csv":
            if not args.out:
                raise InputError("--format csv needs --out")
            report.write_csv(args.out)
        else:
            _emit_json(report.to_json_obj(), args.out)
        return 0
    if args.curve is None:
        raise InputError(f"--energy {args.energy} needs --curve")
    f = make_curve(args.curve)
    spec = _quadrature_spec(args)
    if args.energy == "continuous-both":
        _emit_json(energy_pair_report(f, spec), args.out)
        return 0
    value = CONTINUOUS_ENERGIES[args.energy](f, spec)
    _emit_json({"energy": args.energy, "curve": f.spec_string(), "value": value,
                "panels": spec.panels, "band": spec.band_width,
                "diagonal": spec.diagonal}, args.out)
    return 0


def cmd_invariance(args) -> int:
    p = load_polygon(args.polygon)
    if args.transform_file:
        t = MoebiusTransform.load_json(args.transform_file)
        baseline = e_cos_m(p).value
        value = e_cos_m(t.apply_polygon(p)).value
        dev = abs(value - baseline)
        kind = "absolute"
        if abs(baseline) > 1e-10:
            dev /= abs(baseline)
            kind = "relative"
        obj = {"baseline": baseline, "value": value, "max_deviation": dev,
               "deviation_kind": kind, "transform": t.to_json_obj(),
               "tolerance": args.tol, "passed": dev <= args.tol}
        _emit_json(obj, args.out)
        return 0 if dev <= args.tol else 1
    report = invariance_sweep(p, n_transforms=args.n, seed=args.seed,
                              margin=args.margin)
    obj = report.to_json_obj()
    obj["tolerance"] = args.tol
    obj["passed"] = report.max_deviation <= args.tol
    _emit_json(obj, args.out)
    return 0 if report.max_deviation <= args.tol else 1


def cmd_gamma(args) -> int:
    f = make_curve(args.curve)
    try:
        ms = [int(x) for x in args.ms.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad --ms list {args.ms!r}") from exc
    if args.reference is not None:
        reference = args.reference
    else:
        spec = _quadrature_spec(args)
        reference = (energy_E_cos(f, spec) if args.energy == "ecos"
                     else energy_E(f, spec))
    table = gamma_limsup_sweep(f, ms, partition=args.partition,
                               energy=args.energy, reference=reference)
    if args.svg:
        table.write_svg(args.svg)
    if args.format == "csv":
        if not args.out:
            raise InputError("--format csv needs --out")
        table.write_csv(args.out)
    else:
        _emit_json(table.to_json_obj(), args.out)
    return 0


def cmd_minimize(args) -> int:
    p = load_polygon(args.polygon)
    opts = MinimizeOptions(max_iter=args.max_iter, grad_tol=args.grad_tol)
    trace = minimize(p, energy=_parse_energy_mix(args.energy), opts=opts)
    if args.final_polygon:
        save_polygon_json(trace.final_polygon, args.final_polygon)
    if args.format == "csv":
        if not args.out:
            raise InputError("--format csv needs --out")
        trace.write_csv(args.out)
    else:
        obj = {
            "energy": trace.energy,
            "termination": trace.termination,
            "iterations": trace.rows[-1].iteration,
            "initial_energy": trace.rows[0].energy,
            "final_energy": trace.rows[-1].energy,
            "rows": [{"iteration": r.iteration, "energy": r.energy,
                      "grad_norm": r.grad_norm,
                      "max_displacement": r.max_displacement}
                     for r in trace.rows],
            "final_polygon": polygon_to_dict(trace.final_polygon),
        }
        _emit_json(obj, args.out)
    return 0


def cmd_curves(args) -> int:
    _emit_json({"families": curve_families(),
                "grammar": "family:key=val,key=val,..."}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knotenergy",
        description="Discrete and continuous knot energies of closed curves")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("energy", help="evaluate one energy of a polygon or curve")
    pe.add_argument("--polygon", help="polygon file (.json or .csv)")
    pe.add_argument("--curve", help="curve spec, e.g. ellipse:a=2,b=1")
    pe.add_argument("--energy", required=True,
                    choices=sorted(DISCRETE_ENERGIES) + sorted(CONTINUOUS_ENERGIES)
                    + ["continuous-both"])
    pe.add_argument("--terms", action="store_true",
                    help="include per-pair terms (ecos only)")
    pe.add_argument("--panels", type=int, default=256)
    pe.add_argument("--band", type=float, default=None)
    pe.add_argument("--diagonal", choices=["limit-fill", "band-skip"],
                    default="limit-fill")
    _common_flags(pe)
    pe.set_defaults(func=cmd_energy)

    pi = sub.add_parser("invariance", help="Moebius-invariance check of a polygon")
    pi.add_argument("--polygon", required=True)
    pi.add_argument("--n", type=int, default=100, help="number of random transforms")
    pi.add_argument("--tol", type=float, default=1e-8)
    pi.add_argument("--margin", type=float, default=None,
                    help="min inversion-center distance (default 0.1 x diameter)")
    pi.add_argument("--transform-file",
                    help="apply one explicit transform (JSON primitive list) instead of random ones")
    _common_flags(pi)
    pi.set_defaults(func=cmd_invariance)

    pg = sub.add_parser("gamma", help="inscribed-polygon convergence sweep")
    pg.add_argument("--curve", required=True)
    pg.add_argument("--ms", required=True, help="comma list, e.g. 32,64,128,256,512")
    pg.add_argument("--energy", choices=["ecos", "kk"], default="ecos")
    pg.add_argument("--partition", choices=["parameter", "arclength"],
                    default="parameter")
    pg.add_argument("--reference", type=float, default=None,
                    help="override the quadrature reference value")
    pg.add_argument("--panels", type=int, default=256)
    pg.add_argument("--band", type=float, default=None)
    pg.add_argument("--diagonal", choices=["limit-fill", "band-skip"],
                    default="limit-fill")
    pg.add_argument("--svg", help="also write a log-log error plot")
    _common_flags(pg)
    pg.set_defaults(func=cmd_gamma)

    pm = sub.add_parser("minimize", help="gradient descent on a polygon energy")
    pm.add_argument("--polygon", required=True)
    pm.add_argument("--energy", default="ecos",
                    help="name or weighted mix, e.g. ecos=1,kk=0.01")
    pm.add_argument("--max-iter", type=int, default=200)
    pm.add_argument("--grad-tol", type=float, default=1e-8)
    pm.add_argument("--final-polygon", help="write the final polygon JSON here")
    _common_flags(pm)
    pm.set_defaults(func=cmd_minimize)

    pc = sub.add_parser("curves", help="list curve families and the spec grammar")
    _common_flags(pc)
    pc.set_defaults(func=cmd_curves)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PoleHitError as exc:
        print(f"pole error: {exc}", file=sys.stderr)
        return 4
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
