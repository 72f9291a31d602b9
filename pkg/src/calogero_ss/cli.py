"""Batch driver: argument parsing, sweeps, CSV/JSON emission, SVG plots.

Exit codes: 0 success, 1 usage, 2 invalid couplings, 3 numerical failure,
4 I/O failure, 5 spectral singularity found (a finding, not a crash),
6 residual/trend check failure.  Identical arguments and seed produce
byte-identical outputs; every output file embeds the convention flags in
force (CSV as '#' preamble lines, SVG as a comment block).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from fractions import Fraction
from typing import Sequence

from .errors import (AccuracyLossError, CalogeroError, CouplingRangeError,
                     DomainError, NumericalFailureError)
from .model import CouplingParams, Validity, solve_nu_prime
from .polynomials import solve_generalized_laplace
from .scattering import (match_n_body, match_two_body, momentum_sampler,
                         ss_scan, transmission_sweep,
                         transmitted_coefficient_readings)
from .svgplot import render_line_plot
from .wavefunction import (SuperpositionCoeffs, make_scattering_state,
                           reference_momentum_set, residual_convergence,
                           state_energy)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COUPLINGS = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
EXIT_SS_FOUND = 5
EXIT_CHECK_FAILED = 6

THREADS_ENV = "CALOGERO_SS_THREADS"

SCAN_HEADER = "sample,p,min_pair_factor,min_w_magnitude,m22_status,ss_verdict"
COEFFS_HEADER = ("p,r_minus,r_plus,re_A,im_A,re_B,im_B,re_D,im_D,R,T,"
                 "deriv_mismatch")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit 2 is reserved for invalid couplings; argparse's default error
    # path would exit 2 on usage problems, so route those to exit 1
    def error(self, message):
        raise UsageError(message)


def _f17(x: float) -> str:
    return f"{x:.17e}"


def _max_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, "
                         f"got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, "
                         f"got {raw!r}")
    return value


def _params_from_args(args) -> CouplingParams:
    has_g = getattr(args, "g", None) is not None
    has_nu = getattr(args, "nu_prime", None) is not None
    if has_g == has_nu:
        raise UsageError("give exactly one of --g / --nu-prime")
    if args.delta is None:
        raise UsageError("--delta is required")
    if has_g:
        params = CouplingParams.from_coupling(args.n, args.g, args.delta)
    else:
        params = CouplingParams.from_exponent(args.n, args.nu_prime,
                                              args.delta)
    if params.validity_class is Validity.INVALID:
        raise CouplingRangeError(
            f"couplings g={params.g}, delta={params.delta} are outside "
            "both validity ranges")
    return params


def _convention_metadata(args) -> dict[str, str]:
    return {
        "phi_exponent": "nu" if getattr(args, "phi_use_nu", False)
        else "nu_prime",
        "outgoing_prefactor": "pure_phase",
        "transmitted_coefficient": "value_matched",
        "ss_direction_rule": "all_nondegenerate_directions",
        "eigenvalue_convention": "half_p_squared",
    }


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv_document(metadata: dict[str, str], header: str,
                  rows: Sequence[str]) -> str:
    lines = [f"# {key}={metadata[key]}" for key in sorted(metadata)]
    lines.append(header)
    lines.extend(rows)
    return "\n".join(lines) + "\n"


# --- subcommands ---------------------------------------------------------------

def cmd_nu_prime(args) -> int:
    if args.g is None or args.delta is None:
        raise UsageError("nu-prime needs --g and --delta")
    sol = solve_nu_prime(args.g, args.delta)
    if sol.validity is Validity.INVALID:
        raise CouplingRangeError(
            f"couplings g={args.g}, delta={args.delta} are outside both "
            "validity ranges")
    doc = {"roots": [sol.roots[0], sol.roots[1]], "selected": sol.selected,
           "validity": sol.validity.value}
    print(json.dumps(doc))
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.out is None:
        raise UsageError("scan needs --out")
    params = CouplingParams.from_exponent(args.n, args.nu_prime, args.delta)
    sampler = momentum_sampler(args.n, args.p_min, args.p_max, args.seed)
    summary = ss_scan(args.n, sampler, args.samples, tol=args.tol,
                      params=params, max_workers=_max_workers())
    rows = []
    for idx, rep in enumerate(summary.reports):
        n = len(rep.pair_factors)
        live = [i for i in range(n) if i != n - 1 - i]
        min_factor = min(abs(rep.pair_factors[i]) for i in live)
        min_w = min(rep.w_magnitudes[i] for i in live)
        rows.append(",".join([
            str(idx), _f17(rep.pset.p), _f17(min_factor), _f17(min_w),
            rep.m22_status, "true" if rep.ss_verdict else "false"]))
    metadata = _convention_metadata(args)
    metadata.update({
        "n": str(args.n), "samples": str(args.samples),
        "p_min": _f17(args.p_min), "p_max": _f17(args.p_max),
        "seed": str(args.seed), "ss_tolerance": _f17(args.tol),
        "nu_prime": _f17(params.nu_prime), "delta": _f17(params.delta),
    })
    _write_text(args.out, _csv_document(metadata, SCAN_HEADER, rows))
    min_factor_txt = _f17(summary.min_pair_factor) \
        if summary.reports else "n/a"
    print(f"scan: {args.samples} samples, {summary.ss_count} SS verdicts, "
          f"min pair factor {min_factor_txt}", file=sys.stderr)
    return EXIT_SS_FOUND if summary.ss_count else EXIT_OK


def _coeffs_row(params: CouplingParams, args, p: float, r_minus: float,
                r_plus: float) -> tuple[str, dict]:
    if params.n_particles == 2:
        m = match_two_body(params, p, r_minus, r_plus)
        a, b, d = m.a, m.b, m.d
        t = m.transmission
        mism = m.derivative_mismatch
        row = ",".join([
            _f17(p), _f17(r_minus), _f17(r_plus),
            _f17(a.real), _f17(a.imag), _f17(b.real), _f17(b.imag),
            _f17(d.real), _f17(d.imag), _f17(m.reflection), _f17(t),
            _f17(mism)])
        return row, {"match": m}
    entries = {(0, 1): 1.0 + 0j}
    if args.k:
        entries[(args.k, 1)] = 0.6 + 0j
    coeffs = SuperpositionCoeffs.for_params(params, entries)
    pset = _symmetric_pset(params.n_particles, p)
    m = match_n_body(params, pset, coeffs, r_minus)
    nan = float("nan")
    row = ",".join([
        _f17(p), _f17(r_minus), _f17(nan),
        _f17(m.a1.real), _f17(m.a1.imag), _f17(m.b1.real), _f17(m.b1.imag),
        _f17(nan), _f17(nan), _f17(m.reflection), _f17(nan), _f17(nan)])
    return row, {"match": m}


def _symmetric_pset(n: int, p: float):
    return reference_momentum_set(n, p)


def cmd_coeffs(args) -> int:
    params = _params_from_args(args)
    if args.p is None or args.p <= 0.0:
        raise UsageError("coeffs needs --p > 0")
    metadata = _convention_metadata(args)
    metadata.update({"n": str(args.n), "p": _f17(args.p),
                     "r_minus": _f17(args.r_minus),
                     "r_plus": _f17(args.r_plus), "k": str(args.k)})
    if params.n_particles == 2:
        readings = transmitted_coefficient_readings(params, args.p,
                                                    args.r_plus)
        for name, val in sorted(readings.items()):
            metadata[f"alt_d_{name}"] = _f17(abs(val))
    row, _ = _coeffs_row(params, args, args.p, args.r_minus, args.r_plus)
    _write_text(args.out, _csv_document(metadata, COEFFS_HEADER, [row]))
    return EXIT_OK


def _grid(start: float, stop: float, steps: int, log: bool) -> list[float]:
    if steps < 1:
        raise UsageError("--steps must be >= 1")
    if steps == 1:
        return [start]
    if log:
        if start <= 0.0 or stop <= 0.0:
            raise UsageError("--log needs positive --from/--to")
        la, lb = math.log(start), math.log(stop)
        return [math.exp(la + (lb - la) * i / (steps - 1))
                for i in range(steps)]
    return [start + (stop - start) * i / (steps - 1) for i in range(steps)]


def cmd_sweep(args) -> int:
    params = _params_from_args(args)
    grid = _grid(getattr(args, "from_"), args.to, args.steps, args.log)
    rows = []
    column_values = {"R": [], "T": [], "deriv_mismatch": []}
    for value in grid:
        p = value if args.param == "p" else args.p
        r_minus = value if args.param == "r-minus" else args.r_minus
        r_plus = value if args.param == "r-plus" else args.r_plus
        if p is None or p <= 0.0:
            raise UsageError("sweep needs --p > 0 (or --param p)")
        row, extra = _coeffs_row(params, args, p, r_minus, r_plus)
        rows.append(row)
        m = extra["match"]
        column_values["R"].append(m.reflection)
        column_values["T"].append(m.transmission
                                  if m.transmission is not None
                                  else float("nan"))
        column_values["deriv_mismatch"].append(
            m.derivative_mismatch if m.derivative_mismatch is not None
            else float("nan"))
    metadata = _convention_metadata(args)
    metadata.update({"n": str(args.n), "param": args.param,
                     "from": _f17(getattr(args, "from_")),
                     "to": _f17(args.to), "steps": str(args.steps),
                     "log": "true" if args.log else "false"})

    check_failed = False
    if args.param == "r-minus" and params.n_particles == 2:
        sweep = transmission_sweep(params, args.p, grid, args.r_plus)
        metadata["trend_claim"] = "transmission_vanishes_at_large_r_minus"
        metadata["trend_slope"] = _f17(sweep.trend.fitted_slope)
        metadata["trend_decayed"] = "true" if sweep.trend.decayed else "false"
        if sweep.trend.discrepancy is not None:
            disc = sweep.trend.discrepancy
            metadata["trend_discrepancy"] = (
                f"slope={_f17(disc.fitted_slope)};"
                f"envelope_first={_f17(disc.envelope_first)};"
                f"envelope_last={_f17(disc.envelope_last)}")
            check_failed = True

    _write_text(args.out, _csv_document(metadata, COEFFS_HEADER, rows))
    if args.plot is not None:
        series = column_values[args.plot_column]
        if any(math.isnan(v) for v in series):
            raise UsageError(f"column {args.plot_column} is undefined for "
                             "this sweep")
        svg = render_line_plot(
            list(zip(grid, series)), x_label=args.param,
            y_label=args.plot_column,
            title=f"{args.plot_column} vs {args.param}",
            log_x=args.log, metadata=metadata)
        try:
            with open(args.plot, "w", newline="") as fh:
                fh.write(svg)
        except OSError:
            raise
    if check_failed:
        print("sweep: expected-trend check failed "
              "(transmission does not vanish); see metadata",
              file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _builtin_samples(n: int, seed: int, count: int = 20):
    # banded gaps keep samples away from polynomial nodes
    bands = ((1.3, 1.6), (2.6, 3.1))
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        gaps = [rng.uniform(*bands[j % len(bands)]) for j in range(n - 1)]
        coords = [rng.uniform(-0.5, 0.5)]
        for g in gaps:
            coords.append(coords[-1] - g)
        mean = sum(coords) / n
        out.append(tuple(c - mean for c in coords))
    return out


def cmd_residual(args) -> int:
    params = _params_from_args(args)
    if args.p is None or args.p <= 0.0:
        raise UsageError("residual needs --p > 0")
    if args.configs is not None:
        try:
            with open(args.configs) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise UsageError(f"malformed configs file: {err}") from None
        samples = [tuple(float(c) for c in row) for row in doc["configs"]]
    else:
        samples = _builtin_samples(args.n, args.seed)
    pset = _symmetric_pset(args.n, args.p)
    psi = make_scattering_state(params, pset, args.k)
    energy = state_energy(pset)
    res_h, res_h2, ratio = residual_convergence(psi, energy, samples, params,
                                                h_factor=args.h)
    passed = res_h < args.tol
    doc = {
        "max_residual": res_h,
        "max_residual_half_h": res_h2,
        "convergence_ratio": ratio,
        "tolerance": args.tol,
        "passed": passed,
        "metadata": dict(sorted(_convention_metadata(args).items())),
    }
    print(json.dumps(doc))
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _partition_key(partition) -> str:
    live = [str(e) for e in partition if e]
    return "+".join(live) if live else "1"


def cmd_polys(args) -> int:
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"bad --lambda value: {err}") from None
    system = solve_generalized_laplace(args.n, args.k, lam)
    basis = []
    for sol in system.solutions:
        basis.append({_partition_key(mon): str(coeff)
                      for mon, coeff in sol.ordered_items()})
    doc = {"n": args.n, "k": args.k, "lambda": str(lam),
           "dimension": system.nullspace_dim, "basis": basis}
    print(json.dumps(doc))
    return EXIT_OK


# --- parser construction --------------------------------------------------------

def _add_model_options(sub, with_k: bool = True):
    sub.add_argument("--n", type=int, required=True,
                     help="number of particles")
    sub.add_argument("--g", type=float, default=None,
                     help="long-range coupling (exclusive with --nu-prime)")
    sub.add_argument("--nu-prime", dest="nu_prime", type=float, default=None,
                     help="ground-state exponent (exclusive with --g)")
    sub.add_argument("--delta", type=float, default=None,
                     help="deformation coupling")
    sub.add_argument("--phi-use-nu", dest="phi_use_nu", action="store_true",
                     help="use the undeformed exponent in the reversed-wave "
                          "phase")
    if with_k:
        sub.add_argument("--k", type=int, default=0,
                         help="polynomial degree of the state")


def build_parser() -> _Parser:
    parser = _Parser(prog="calogero-ss",
                     description="Scattering observables and "
                                 "spectral-singularity scan")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON file of defaults (flags win)")
    subs = parser.add_subparsers(dest="command", required=True)

    p_nu = subs.add_parser("nu-prime", help="solve the exponent quadratic")
    p_nu.add_argument("--g", type=float, default=None, required=False)
    p_nu.add_argument("--delta", type=float, default=None, required=False)
    p_nu.set_defaults(func=cmd_nu_prime)

    p_scan = subs.add_parser("scan", help="spectral-singularity sweep")
    p_scan.add_argument("--n", type=int, required=True)
    p_scan.add_argument("--samples", type=int, required=True)
    p_scan.add_argument("--p-min", dest="p_min", type=float, default=0.01)
    p_scan.add_argument("--p-max", dest="p_max", type=float, required=True)
    p_scan.add_argument("--seed", type=int, required=True)
    p_scan.add_argument("--out", type=str, required=True)
    p_scan.add_argument("--tol", type=float, default=1e-10)
    p_scan.add_argument("--nu-prime", dest="nu_prime", type=float,
                        default=1.0)
    p_scan.add_argument("--delta", type=float, default=0.5)
    p_scan.set_defaults(func=cmd_scan, phi_use_nu=False)

    p_coeffs = subs.add_parser("coeffs", help="matched coefficients at one "
                                              "momentum")
    _add_model_options(p_coeffs)
    p_coeffs.add_argument("--p", type=float, default=None)
    p_coeffs.add_argument("--r-minus", dest="r_minus", type=float,
                          default=50.0)
    p_coeffs.add_argument("--r-plus", dest="r_plus", type=float, default=5.0)
    p_coeffs.add_argument("--out", type=str, default=None)
    p_coeffs.set_defaults(func=cmd_coeffs)

    p_sweep = subs.add_parser("sweep", help="sweep one parameter")
    _add_model_options(p_sweep)
    p_sweep.add_argument("--param", choices=["r-minus", "r-plus", "p"],
                         required=True)
    p_sweep.add_argument("--from", dest="from_", type=float, required=True)
    p_sweep.add_argument("--to", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--log", action="store_true")
    p_sweep.add_argument("--p", type=float, default=1.0)
    p_sweep.add_argument("--r-minus", dest="r_minus", type=float,
                         default=50.0)
    p_sweep.add_argument("--r-plus", dest="r_plus", type=float, default=5.0)
    p_sweep.add_argument("--out", type=str, default=None)
    p_sweep.add_argument("--plot", type=str, default=None)
    p_sweep.add_argument("--plot-column", dest="plot_column",
                         choices=["R", "T", "deriv_mismatch"], default="T")
    p_sweep.set_defaults(func=cmd_sweep)

    p_res = subs.add_parser("residual", help="finite-difference eigen check")
    _add_model_options(p_res)
    p_res.add_argument("--p", type=float, default=None)
    p_res.add_argument("--h", type=float, default=1e-3,
                       help="step factor times the local minimum gap")
    p_res.add_argument("--configs", type=str, default=None,
                       help='JSON file {"configs": [[x1..xN], ...]}')
    p_res.add_argument("--seed", type=int, default=0)
    p_res.add_argument("--tol", type=float, default=1e-6)
    p_res.set_defaults(func=cmd_residual)

    p_polys = subs.add_parser("polys", help="generalized-Laplace nullspace")
    p_polys.add_argument("--n", type=int, required=True)
    p_polys.add_argument("--k", type=int, required=True)
    p_polys.add_argument("--lambda", dest="lam", type=str, required=True,
                         help="rational like 7/10")
    p_polys.set_defaults(func=cmd_polys)
    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> list[str]:
    """Load --config JSON as defaults; explicit flags still win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[idx + 1]
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise UsageError(f"malformed config file: {err}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    # apply to every subparser that knows the key; unknown keys are errors
    subs = [a for a in parser._subparsers._group_actions
            if isinstance(a, argparse._SubParsersAction)][0]
    known = set()
    for sub in subs.choices.values():
        for action in sub._actions:
            known.add(action.dest)
    for key, value in doc.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown config key {key!r}")
        for sub in subs.choices.values():
            if any(a.dest == dest for a in sub._actions):
                sub.set_defaults(**{dest: value})
    return argv


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CouplingRangeError as err:
        print(f"invalid couplings: {err}", file=sys.stderr)
        return EXIT_COUPLINGS
    except (AccuracyLossError, NumericalFailureError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CalogeroError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"i/o failure: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
