"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure
(partial output is still written). Every output file is written atomically.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import apalm, continuation, eigen, statics
from .io import read_kv, write_csv, write_json
from .materials import MaterialError, MaterialParams, uniaxial_solve
from .mappedbasis import example_instance, write_samples_csv
from .models import InvalidConfig, MODEL_NAMES, make_operator_set
from .numerics import NumericsError
from .operators import AssemblyError, PoisonedOperatorSet

log = logging.getLogger("pathfinder")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ranged(kind, lo=None, hi=None, lo_open=False):
    """argparse type that rejects values outside [lo, hi] (or (lo, hi])."""

    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}")
        bad = (lo is not None and (v <= lo if lo_open else v < lo)) or (hi is not None and v > hi)
        if bad:
            left = "(" if lo_open else "["
            rng = f"{left}{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}]"
            raise argparse.ArgumentTypeError(f"{v} outside the valid range {rng}")
        return v

    return conv


POS = _ranged(float, 0.0, lo_open=True)
NONNEG_INT = _ranged(int, 0)


def _model_args(p, default=None):
    p.add_argument("--model", choices=MODEL_NAMES, default=default, help="built-in model")
    p.add_argument("--model-file", help="key=value file with model parameters")
    p.add_argument("--material", help="key=value material file (membrane model)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a model parameter (repeatable)")
    p.add_argument("--poison", type=POS, default=None, metavar="NORM",
                   help="refuse assembly once |u| exceeds NORM (failure-path testing)")


def _output_args(p, formats=("csv", "json")):
    p.add_argument("-o", "--output", required=True, help="output file")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pathfinder", description="Nonlinear structural path-following toolkit.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("static", help="solve R(u) = 0")
    _model_args(p, "spring")
    _output_args(p)
    p.add_argument("--solver", choices=("newton", "dr", "composite"), default="newton")
    p.add_argument("--tolF", type=POS, default=None)
    p.add_argument("--tolU", type=POS, default=1e-14)
    p.add_argument("--max-iterations", type=NONNEG_INT, default=None)
    p.add_argument("--dt", type=POS, default=1.0)
    p.add_argument("--damping", type=_ranged(float, 0.0), default=0.0)

    p = sub.add_parser("modal", help="natural frequencies")
    _model_args(p, "chain")
    _output_args(p)
    p.add_argument("--n", type=_ranged(int, 1), help="chain length (shortcut for --set N=...)")
    p.add_argument("--count", type=_ranged(int, 1), default=None)

    p = sub.add_parser("buckle", help="linear buckling load factors")
    _model_args(p, "column")
    _output_args(p)
    p.add_argument("--count", type=_ranged(int, 1), default=None)

    for name in ("continue", "apalm"):
        p = sub.add_parser(name, help="arc-length continuation" if name == "continue"
                           else "adaptive parallel arc-length continuation")
        _model_args(p, "vmtruss")
        _output_args(p)
        p.add_argument("--dl", "-L", type=POS, default=0.05, help="arc-length increment")
        p.add_argument("--steps", "-N", type=NONNEG_INT, default=100, help="number of steps")
        p.add_argument("--psi", type=POS, default=1.0)
        p.add_argument("--tolF", type=POS, default=1e-10)
        p.add_argument("--max-iterations", type=_ranged(int, 1), default=25)
        if name == "continue":
            p.add_argument("--stepper", choices=[s.value for s in continuation.Stepper],
                           default="crisfield")
            p.add_argument("--predictor", choices=("tangent", "secant"), default="tangent")
            p.add_argument("--singular", action="store_true", help="locate singular points")
            p.add_argument("--branch-switch", action="store_true")
            p.add_argument("--tau-rel", type=POS, default=1e-3)
            p.add_argument("--lam-max", type=POS, default=None)
        else:
            p.add_argument("--n-sub", type=_ranged(int, 2), default=2)
            p.add_argument("--eps-l", type=POS, default=1e-3)
            p.add_argument("--eps-u", type=POS, default=1e-3)
            p.add_argument("--max-level", type=NONNEG_INT, default=5)
            p.add_argument("--workers", type=NONNEG_INT, default=None,
                           help="worker processes (default: $PATHFINDER_WORKERS or 0 = inline)")
            p.add_argument("--report", help="run-report JSON path")

    p = sub.add_parser("uniaxial", help="uniaxial tension response of a material")
    p.add_argument("--material", help="key=value material file")
    _output_args(p, ("csv",))
    p.add_argument("--lambda-min", type=POS, default=1.0)
    p.add_argument("--lambda-max", type=POS, default=12.5)
    p.add_argument("--samples", type=_ranged(int, 1), default=100)

    p = sub.add_parser("spline-demo", help="C1 mapped basis example over two patches")
    _output_args(p, ("csv",))
    p.add_argument("--samples", type=_ranged(int, 2), default=200)
    p.add_argument("--map", help="also write the map A as (row, col, value) triplets")
    return ap


def _model(args):
    cfg = {}
    if args.model_file:
        cfg.update(read_kv(args.model_file))
    if args.model:
        cfg.setdefault("model", args.model)
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cfg[k.strip()] = v.strip()
    if getattr(args, "n", None) is not None:
        cfg["N"] = args.n
    if args.material:
        cfg["material"] = read_kv(args.material)
    ops = make_operator_set(cfg)
    if args.poison is not None:
        ops = PoisonedOperatorSet(ops, args.poison)
    return ops


def _write_vector_table(args, header, rows, payload):
    if args.format == "json":
        write_json(args.output, payload)
    else:
        write_csv(args.output, header, rows)


def cmd_static(args):
    ops = _model(args)
    if args.solver == "dr":
        base = statics.DR_DEFAULTS
    else:
        base = statics.StaticConfig()
    kw = {"tolU": args.tolU, "dt": args.dt, "damping": args.damping}
    if args.tolF is not None:
        kw["tolF"] = args.tolF
    if args.max_iterations is not None:
        kw["max_iterations"] = args.max_iterations
    cfg = statics.StaticConfig(**{**base.__dict__, **kw})
    if args.solver == "newton":
        res = statics.newton_solve(ops, cfg)
    elif args.solver == "dr":
        res = statics.dr_solve(ops, cfg)
    else:
        dr_cfg = statics.StaticConfig(**{**statics.DR_DEFAULTS.__dict__, "dt": args.dt,
                                         "damping": args.damping})
        res = statics.composite_solve([statics.dr_stage(dr_cfg), statics.newton_stage(cfg)], ops)
    u = res.u if np.all(np.isfinite(res.u)) else np.zeros_like(res.u)
    rn = res.residual_norm if np.isfinite(res.residual_norm) else None
    _write_vector_table(args, ["dof", "u"], [[i, x] for i, x in enumerate(u)],
                        {"status": res.status.value, "message": res.message,
                         "iterations": res.iterations, "residual_norm": rn, "u": u.tolist()})
    log.info("%s after %d iterations, |R| = %s", res.status.value, res.iterations, rn)
    return EXIT_OK if res.converged else EXIT_SOLVER


def cmd_modal(args):
    ops = _model(args)
    pairs = eigen.modal(ops, args.count)
    rows = [[i, p.value, p.frequency] for i, p in enumerate(pairs)]
    _write_vector_table(args, ["mode", "omega2", "frequency"], rows,
                        {"modes": [{"omega2": p.value, "frequency": p.frequency,
                                    "vector": p.vector.tolist()} for p in pairs]})
    for p in pairs:
        print(format(p.frequency, ".17g"))
    return EXIT_OK


def cmd_buckle(args):
    ops = _model(args)
    try:
        pairs = eigen.buckling(ops, args.count)
    except AssemblyError as exc:
        _write_vector_table(args, ["mode", "lambda", "load_factor"], [],
                            {"status": "AssemblyError", "message": str(exc), "modes": []})
        print(f"pathfinder: buckling failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rows = [[i, p.value, p.load_factor] for i, p in enumerate(pairs)]
    _write_vector_table(args, ["mode", "lambda", "load_factor"], rows,
                        {"modes": [{"lambda": p.value, "load_factor": p.load_factor,
                                    "vector": p.vector.tolist()} for p in pairs]})
    for p in pairs:
        print(format(p.load_factor, ".17g"))
    return EXIT_OK


def _write_path(args, path, n_dof, extra=False):
    if args.format == "json":
        path.write_json(args.output, extra)
    else:
        path.write_csv(args.output, n_dof, extra)


def cmd_continue(args):
    ops = _model(args)
    cfg = continuation.ContinuationConfig(
        stepper=args.stepper, dl=args.dl, steps=args.steps, psi=args.psi, tolF=args.tolF,
        max_iterations=args.max_iterations, predictor=args.predictor, singular=args.singular,
        branch_switch=args.branch_switch, tau_rel=args.tau_rel, lam_max=args.lam_max)
    path = continuation.run(cfg, ops)
    _write_path(args, path, ops.n_dof)
    if path.aborted:
        log.error("continuation aborted after %d points: %s", len(path.points), path.reason)
        return EXIT_SOLVER
    return EXIT_OK


def _default_workers():
    env = os.environ.get("PATHFINDER_WORKERS")
    if env is None:
        return 0
    try:
        w = int(env)
    except ValueError:
        raise UsageError(f"PATHFINDER_WORKERS must be a non-negative integer, got {env!r}")
    if w < 0:
        raise UsageError(f"PATHFINDER_WORKERS must be a non-negative integer, got {env!r}")
    return w


def cmd_apalm(args):
    ops = _model(args)
    workers = args.workers if args.workers is not None else _default_workers()
    if args.eps_l > args.eps_u:
        raise UsageError(f"--eps-l {args.eps_l} must not exceed --eps-u {args.eps_u}")
    cfg = apalm.ApalmConfig(eps_l=args.eps_l, eps_u=args.eps_u, n_sub=args.n_sub,
                            max_level=args.max_level, dL=args.dl, workers=workers, psi=args.psi,
                            tolF=args.tolF, max_iterations=args.max_iterations)
    path0, intervals = apalm.serial_init(ops, cfg, args.steps)
    result = apalm.solve(path0, intervals, cfg, ops.copy)
    if path0.aborted and not result.path.aborted:
        result.path.status, result.path.reason = path0.status, path0.reason
    _write_path(args, result.path, ops.n_dof, extra=True)
    if args.report:
        result.write_report(args.report)
    if result.path.aborted:
        log.error("apalm: %s", result.path.reason)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_uniaxial(args):
    mat = MaterialParams.from_mapping(read_kv(args.material)) if args.material else MaterialParams()
    if args.lambda_max < args.lambda_min:
        raise UsageError("--lambda-max must be at least --lambda-min")
    rows = []
    status = EXIT_OK
    for lam in np.linspace(args.lambda_min, args.lambda_max, args.samples):
        try:
            s = uniaxial_solve(mat, float(lam))
        except MaterialError as exc:
            log.error("uniaxial solve failed at lambda=%s: %s", lam, exc)
            status = EXIT_SOLVER
            break
        rows.append([float(lam), s.lambda3, s.sigma, s.J])
    write_csv(args.output, ["lambda", "lambda3", "sigma", "J"], rows)
    return status


def cmd_spline_demo(args):
    mb = example_instance()
    write_samples_csv(args.output, mb, args.samples)
    if args.map:
        mb.write_csv(args.map)
    print(f"{mb.n_global} global functions from {mb.n_local} local functions")
    return EXIT_OK


COMMANDS = {"static": cmd_static, "modal": cmd_modal, "buckle": cmd_buckle,
            "continue": cmd_continue, "apalm": cmd_apalm, "uniaxial": cmd_uniaxial,
            "spline-demo": cmd_spline_demo}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"pathfinder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pathfinder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidConfig as exc:
        print(f"pathfinder: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericsError, AssemblyError) as exc:
        print(f"pathfinder: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (MaterialError, OSError, ValueError) as exc:
        print(f"pathfinder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
