"""Command-line front end: ``stieltjes {transform,invert,bound,gamma,freeconv}``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure. Failures print
a one-line JSON diagnostic on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import PiecewiseMonotoneDensity, inverse_count_bound, measure_bound
from .errors import StieltjesError, SupportError, ValidationError
from .freeconv import free_convolve
from .inverse import all_inverses
from .measure import Measure, check, measure_from_dict
from .transforms import gamma_curve, stieltjes

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
HEADER = f"stieltjes {__version__}"


class InputError(Exception):
    """Unreadable or malformed command-line input."""


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_measure(path) -> Measure:
    return check(measure_from_dict(_read_json(path)))


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc


def read_points(path) -> np.ndarray:
    """Rows ``re, im`` (or a single complex literal); ``#`` lines and headers skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    pts = []
    for row in csv.reader(io.StringIO(text)):
        row = [c.strip() for c in row if c.strip()]
        if not row or row[0].startswith("#"):
            continue
        try:
            if len(row) == 1:
                pts.append(parse_complex(row[0]))
            else:
                pts.append(complex(float(row[0]), float(row[1])))
        except (ValueError, InputError):
            if pts:
                raise InputError(f"malformed point row {row!r} in {path}")
            continue  # header line
    return np.array(pts, dtype=complex)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _zetas(args):
    vals = [parse_complex(z) for z in (args.zeta or [])]
    if args.points:
        vals.extend(read_points(args.points))
    return vals


# -- commands --------------------------------------------------------------

def run_transform(args):
    if not args.points:
        raise InputError("transform needs --points")
    measure = load_measure(args.measure)
    buf = io.StringIO()
    buf.write(f"# {HEADER}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re_z", "im_z", "re_G", "im_G"])
    for z in read_points(args.points):
        try:
            g = stieltjes(measure, z)
        except SupportError:
            warnings.warn(f"point {z} lies on the support; written as NaN")
            g = complex(math.nan, math.nan)
        writer.writerow([repr(float(v)) for v in (z.real, z.imag, g.real, g.imag)])
    _emit(buf.getvalue(), args.out)


def run_invert(args):
    measure = load_measure(args.measure)
    reports = []
    for zeta in _zetas(args):
        rep = all_inverses(measure, zeta, r=args.r, K=args.K, M=args.M,
                           bound=True if args.with_bound else None,
                           winding=args.with_winding, residual_tol=args.residual_tol)
        reports.append(rep.to_dict())
    _emit(_dump({"version": __version__, "reports": reports}), args.out)


def run_bound(args):
    data = _read_json(args.measure)
    if "pieces" in data:
        report = inverse_count_bound(PiecewiseMonotoneDensity.from_dict(data))
    else:
        report = measure_bound(check(measure_from_dict(data)))
    out = {"version": __version__, "N": report.N, "critical_values": report.critical_values,
           "witness_y": report.witness_y, "max_count": report.max_count}
    _emit(_dump(out), args.out)


def run_gamma(args):
    measure = load_measure(args.measure)
    curve = gamma_curve(measure, args.r, args.K)
    _emit(curve.to_csv(HEADER), args.out)


def run_freeconv(args):
    if not args.measure_b:
        raise InputError("freeconv needs --measure-b")
    mu_a, mu_b = load_measure(args.measure), load_measure(args.measure_b)
    res = free_convolve(mu_a, mu_b, m=args.m, r=args.r, K=args.K)
    out = {"version": __version__, **res.to_dict()}
    if args.reference:
        ref = load_measure(args.reference)
        if len(ref.components) != 1 or ref.atoms:
            raise InputError("reference must be a single-component measure")
        comp = ref.components[0]
        table = res.error_csv(np.asarray(comp.coeffs) / comp.Z)
        if args.errors:
            Path(args.errors).write_text(f"# {HEADER}\n" + table)
        rows = list(csv.DictReader(io.StringIO(table)))
        out["coefficient_errors"] = [float(r["abs_error"]) for r in rows]
    _emit(_dump(out), args.out)


COMMANDS = {"transform": run_transform, "invert": run_invert, "bound": run_bound,
            "gamma": run_gamma, "freeconv": run_freeconv}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stieltjes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=HEADER)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--measure", required=True, help="measure JSON (or density JSON for bound)")
        s.add_argument("--out", help="output path (default stdout)")
        s.add_argument("--format", choices=["csv", "json"], help="informational; each "
                       "command has a fixed format")
        if name in ("transform", "invert"):
            s.add_argument("--points", help="file of complex points, one 're, im' per row")
        if name == "invert":
            s.add_argument("--zeta", action="append", help="target value, e.g. 0.1+1.6i")
            s.add_argument("--M", type=int, default=None)
            s.add_argument("--with-bound", action="store_true")
            s.add_argument("--with-winding", action="store_true")
            s.add_argument("--residual-tol", type=float, default=1e-8)
        if name in ("invert", "gamma", "freeconv"):
            default_r = {"invert": 0.99, "gamma": 0.99, "freeconv": 0.95}[name]
            default_K = {"invert": None, "gamma": 1024, "freeconv": 1000}[name]
            s.add_argument("--r", type=float, default=default_r)
            s.add_argument("--K", type=int, default=default_K)
        if name == "freeconv":
            s.add_argument("--measure-b")
            s.add_argument("--m", type=int, default=80)
            s.add_argument("--reference", help="measure JSON to compare coefficients against")
            s.add_argument("--errors", help="write the coefficient-error CSV here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _warn_stderr
            COMMANDS[args.command](args)
    except (InputError, ValidationError) as exc:
        _diagnose(exc, "input")
        return EXIT_INPUT
    except (StieltjesError, np.linalg.LinAlgError, FloatingPointError) as exc:
        _diagnose(exc, "numerical")
        return EXIT_NUMERIC
    return EXIT_OK


def _warn_stderr(message, category, filename, lineno, file=None, line=None):
    sys.stderr.write(f"warning: {message}\n")


def _diagnose(exc, kind):
    diag = {"version": __version__, "kind": kind, "error": type(exc).__name__,
            "message": str(exc)}
    if getattr(exc, "violations", None):
        diag["violations"] = [str(v) for v in exc.violations]
    sys.stderr.write(json.dumps(diag) + "\n")


if __name__ == "__main__":
    sys.exit(main())
