"""Command-line front end.

Exit codes: 0 success, 1 usage or validation error, 2 solver or domain
error, 3 verification failure. Numbers are written with 17 significant
digits so every artifact round-trips exactly.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

from . import checks as checks_mod
from .errors import ParameterError, ZeemanError
from .field import build_selection_pair, field_grid, grid_to_csv, grid_to_pgm
from .harmony import dressed_mass_fixed_point, selection_rule_enumerate, selection_to_json
from .model import ModelParams, load_config, validate_params
from .orbit import orbit_perturbative, solve_orbit_exact, zeeman_table

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3

DEFAULT_CONFIG = {"alpha_inv": 137, "m_p": 1.0, "sigma": 0.1, "B": 1e-5, "u0": 1.0}

_T_TOKEN = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*T\s*(?:/\s*([0-9.eE+-]+))?\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _num(x: float) -> str:
    return f"{x:.17g}"


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _parse_n_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed n list {text!r}") from exc
    if not values or any(not math.isfinite(v) or v == 0 for v in values):
        raise UsageError(f"n list must contain finite nonzero numbers: {text!r}")
    return values


def parse_time(token: str, period: float) -> float:
    """A number, or a multiple/fraction of the beat period ``T`` (``T/4``, ``3T/4``, ``2*T``)."""
    try:
        return float(token)
    except ValueError:
        pass
    match = _T_TOKEN.match(token)
    if not match:
        raise UsageError(f"cannot parse time {token!r}")
    coeff = float(match.group(1)) if match.group(1) not in (None, "", "+") else 1.0
    if match.group(1) == "-":
        coeff = -1.0
    div = float(match.group(2)) if match.group(2) else 1.0
    if div == 0:
        raise UsageError(f"division by zero in time {token!r}")
    return coeff * period / div


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="flat JSON parameter file")
    p.add_argument("--output", default=argparse.SUPPRESS, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json", "pgm"), default=argparse.SUPPRESS)
    p.add_argument("--permissive", action="store_true", default=argparse.SUPPRESS,
                   help="ignore unknown configuration keys")
    p.add_argument("--B", type=float, default=argparse.SUPPRESS, help="override the magnetic field")
    p.add_argument("--alpha-inv", type=float, default=argparse.SUPPRESS, help="override 1/alpha")
    p.add_argument("--sigma", type=float, default=argparse.SUPPRESS)
    p.add_argument("--u0", type=float, default=argparse.SUPPRESS)
    p.add_argument("--m-p", type=float, default=argparse.SUPPRESS)
    p.add_argument("--m-eff", type=float, default=argparse.SUPPRESS,
                   help="dressed mass to use (default m_p)")
    p.add_argument("--dressed", action="store_true", default=argparse.SUPPRESS,
                   help="use the dressed-mass fixed point for m_eff")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    parser = _Parser(prog="zeeman-analog", parents=[common],
                     description="Wave-particle Bohr-atom analog in a weak magnetic field (natural units).")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("levels", parents=[common], help="Zeeman level table")
    p.add_argument("--n", default="1,-1", help="comma-separated signed n values")

    p = sub.add_parser("grid", parents=[common], help="|u| on the orbital plane")
    p.add_argument("--m-plus", type=int, required=True)
    p.add_argument("--m-minus", type=int, required=True)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--t", action="append", default=None,
                   help="time (number, or T, T/4, 3T/4 with T the beat period); repeatable")
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--half-extent", type=float, default=None, help="default 3 r_n")
    p.add_argument("--keep-alpha", action="store_true",
                   help="use the configured alpha instead of alpha0 = n^2/N")

    p = sub.add_parser("verify", parents=[common], help="run the numerical check suites")
    p.add_argument("--suite", action="append", choices=sorted(checks_mod.SUITES) + ["all"], default=None)
    p.add_argument("--tol-override", type=float, default=None, help="replace every bound by this value")
    p.add_argument("--alpha0-inv", type=int, default=None)
    p.add_argument("--n-max", type=int, default=2)

    p = sub.add_parser("selection", parents=[common], help="allowed (m+, m-) for alpha0 = n^2/N")
    p.add_argument("--alpha0-inv", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--include-half-integers", action="store_true")

    p = sub.add_parser("orbit", parents=[common], help="single orbit dump")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--mode", choices=("relativistic", "nonrelativistic", "perturbative"), default="relativistic")
    return parser


def _params(args) -> ModelParams:
    strict = not getattr(args, "permissive", False)
    if hasattr(args, "config"):
        path = Path(args.config)
        if not path.is_file():
            raise ParameterError("config", f"no such file: {path}")
        params = load_config(path, strict=strict)
    else:
        params = validate_params(DEFAULT_CONFIG)
    raw = params.to_dict()
    raw.pop("e_charge")
    for attr, key in (("B", "B"), ("sigma", "sigma"), ("u0", "u0"), ("m_p", "m_p")):
        if hasattr(args, attr):
            raw[key] = getattr(args, attr)
    if hasattr(args, "alpha_inv"):
        raw.pop("alpha")
        raw["alpha_inv"] = args.alpha_inv
    return validate_params(raw)


def _m_eff(args, params: ModelParams, n: float = 1.0) -> float:
    if hasattr(args, "m_eff"):
        if not args.m_eff > 0:
            raise ParameterError("m_eff", f"must be positive, got {args.m_eff!r}")
        return args.m_eff
    if getattr(args, "dressed", False):
        return dressed_mass_fixed_point(params, n).m_eff
    return params.m_p


def _emit(args, text: str) -> None:
    if hasattr(args, "output"):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(args, default: str, allowed: tuple[str, ...]) -> str:
    fmt = getattr(args, "format", default)
    if fmt not in allowed:
        raise UsageError(f"--format {fmt} not supported by {args.command} (use {', '.join(allowed)})")
    return fmt


def cmd_levels(args) -> int:
    fmt = _fmt(args, "csv", ("csv", "json"))
    params = _params(args)
    n_list = _parse_n_list(args.n)
    m_eff = _m_eff(args, params)
    rows = zeeman_table(n_list, params, m_eff)
    cols = ("n", "E0", "E_exact", "E_pert", "dE", "dE_exact", "omega_L")
    records = [{"n": r.n, "E0": r.E0, "E_exact": r.E_exact, "E_pert": r.E_pert, "dE": r.dE,
                "dE_exact": r.dE_exact, "omega_L": r.omega_L} for r in rows]
    if fmt == "json":
        _emit(args, _json_dump({"m_eff": m_eff, "B": params.B, "alpha": params.alpha, "levels": records}))
    else:
        lines = [",".join(cols)] + [",".join(_num(rec[c]) for c in cols) for rec in records]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_grid(args) -> int:
    fmt = _fmt(args, "pgm", ("csv", "pgm"))
    if args.resolution < 2:
        raise UsageError(f"--resolution must be >= 2, got {args.resolution}")
    if args.half_extent is not None and not args.half_extent > 0:
        raise UsageError("--half-extent must be positive")
    if args.m_plus < 0 or args.m_minus < 0:
        raise UsageError("--m-plus and --m-minus must be non-negative")
    if 2.0 * args.n != args.m_plus - args.m_minus:
        raise UsageError(f"--n must equal (m_plus - m_minus)/2 = {(args.m_plus - args.m_minus) / 2:g}")
    params = _params(args)
    if not args.keep_alpha:
        big_n = 0.5 * (args.m_plus + args.m_minus)
        params = params.with_alpha(args.n * args.n / big_n)
    m_eff = _m_eff(args, params, args.n)
    pair, orbit = build_selection_pair(args.m_plus, args.m_minus, params, m_eff)
    period = 2.0 * math.pi / abs(pair.beat)
    times = [parse_time(tok, period) for tok in (args.t or ["0"])]
    half = 3.0 * orbit.r if args.half_extent is None else args.half_extent
    render = grid_to_pgm if fmt == "pgm" else grid_to_csv
    for i, t in enumerate(times):
        text = render(field_grid(pair, t, half, args.resolution))
        if hasattr(args, "output"):
            out = Path(args.output)
            target = out if len(times) == 1 else out.with_name(f"{out.stem}_t{i}{out.suffix}")
            target.write_text(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    _fmt(args, "json", ("json",))
    params = _params(args)
    m_eff = _m_eff(args, params)
    suites = args.suite or ["all"]
    if "all" in suites:
        suites = list(checks_mod.SUITES)
    results = checks_mod.run_suites(suites, params, m_eff, tol_override=args.tol_override,
                                    alpha0_inv=args.alpha0_inv, n_max=args.n_max)
    report = {"params": params.to_dict(), "m_eff": m_eff, "suites": suites,
              "checks": [c.to_dict() for c in results],
              "failed": [c.name for c in results if not c.passed]}
    if "selection" in suites:
        invs = [args.alpha0_inv] if args.alpha0_inv is not None else [3, 137]
        report["selection"] = {str(inv): [e.to_dict() for e in selection_rule_enumerate(inv, args.n_max)]
                               for inv in invs}
    _emit(args, _json_dump(report))
    if report["failed"]:
        sys.stderr.write("failed checks: " + ", ".join(report["failed"]) + "\n")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_selection(args) -> int:
    fmt = _fmt(args, "csv", ("csv", "json"))
    if args.alpha0_inv < 1:
        raise UsageError("--alpha0-inv must be a positive integer")
    if args.n_max < 1:
        raise UsageError("--n-max must be a positive integer")
    entries = selection_rule_enumerate(args.alpha0_inv, args.n_max, args.include_half_integers)
    if fmt == "json":
        _emit(args, selection_to_json(entries) + "\n")
    else:
        lines = ["n,N,m_plus,m_minus,alpha0"] + [",".join(str(x) for x in e.row()) for e in entries]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_orbit(args) -> int:
    fmt = _fmt(args, "json", ("csv", "json"))
    params = _params(args)
    m_eff = _m_eff(args, params, args.n)
    if args.mode == "perturbative":
        orbit = orbit_perturbative(args.n, params, m_eff)
    else:
        orbit = solve_orbit_exact(args.n, params, m_eff, mode=args.mode)
    data = orbit.to_dict()
    if fmt == "json":
        _emit(args, _json_dump(data))
    else:
        keys = list(data)
        vals = [v if isinstance(v, str) else _num(v) for v in data.values()]
        _emit(args, ",".join(keys) + "\n" + ",".join(str(v) for v in vals) + "\n")
    return EXIT_OK


COMMANDS = {"levels": cmd_levels, "grid": cmd_grid, "verify": cmd_verify,
            "selection": cmd_selection, "orbit": cmd_orbit}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        sys.stderr.write(f"invalid parameter: {exc}\n")
        return EXIT_USAGE
    except (ZeemanError, ArithmeticError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
