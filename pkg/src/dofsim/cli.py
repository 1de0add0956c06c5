"""Command-line front end: ``dofsim region|sweep|bounds|check``.

Exit codes: 0 success, 1 invalid input, 2 a check ran and failed.

Settings resolve as command-line flag, then config file (``--config``),
then the ``DOFSIM_SEED`` environment variable (seed only), then built-in
defaults. The config file is flat ``key = value`` text; keys are the long
flag names with dashes or underscores, for example::

    scheme = enhanced
    alpha = 0.5
    pmin_db = 40
    trials = 3000
"""

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import bounds as bnd
from .doffit import DEFAULT_WINDOW, DofFit, RateCurve, fit_dof, linear_to_db, power_grid_db, sweep
from .region import contains, theorem1_region, theorem2_region
from .schemes import NOISE_MODES, SCHEMES, RatePair, SchemeConfig, SchemeError

__all__ = ["main", "build_parser", "write_atomic", "curve_to_csv", "curve_from_csv"]

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2
CSV_COLUMNS = ("scheme", "alpha", "P_dB", "r1", "se1", "r2", "se2")
SEED_ENV = "DOFSIM_SEED"

DEFAULTS = {
    "scheme": "enhanced",
    "alpha": "0.5",
    "n_rx": 1,
    "pmin_db": 40.0,
    "pmax_db": 80.0,
    "points": 5,
    "trials": 3000,
    "seed": 0,
    "mode": "analytic",
    "dims": "2,1",
    "window": DEFAULT_WINDOW,
    "threads": 1,
    "format": "csv",
    "n": 1,
    "m": 2,
    "sigma2_grid": "1,0.1,0.01",
    "instances": 100,
    "bound_trials": 10_000,
    "slack": bnd.DEFAULT_SLACK,
    "eps": 0.05,
}


class InvalidInput(ValueError):
    pass


# ------------------------------------------------------------------ files


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.path.abspath(path)
    d = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def curve_to_csv(curve, fit=None, meta=None):
    """CSV text for a rate curve; a ``# {json}`` footer keeps exact values."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in curve.points:
        w.writerow([curve.scheme, repr(curve.alpha), repr(float(linear_to_db(r.P))),
                    repr(r.r1), repr(r.se1), repr(r.r2), repr(r.se2)])
    footer = {
        "P": [r.P for r in curve.points],
        "extra": [{"trials": r.trials, "skipped": r.skipped,
                   "peak_power_ratio": r.peak_power_ratio,
                   "diagnostics": r.diagnostics} for r in curve.points],
        "fit": fit.to_dict() if fit is not None else None,
        "meta": meta or {},
    }
    buf.write("# " + json.dumps(footer) + "\n")
    return buf.getvalue()


def curve_from_csv(text):
    """Inverse of :func:`curve_to_csv`: ``(curve, fit or None, meta)``.

    Files without a footer (hand-written curves) are accepted; P is then
    taken from the ``P_dB`` column.
    """
    lines = text.splitlines()
    footer = {}
    body = []
    for ln in lines:
        if ln.startswith("#"):
            footer = json.loads(ln[1:].strip() or "{}")
        elif ln.strip():
            body.append(ln)
    rows = list(csv.DictReader(body))
    if not rows:
        raise InvalidInput("rate curve file has no rows")
    if set(CSV_COLUMNS) - set(rows[0]):
        raise InvalidInput(f"rate curve file needs columns {CSV_COLUMNS}")
    powers = footer.get("P") or [float(10 ** (float(r["P_dB"]) / 10)) for r in rows]
    extra = footer.get("extra") or [{} for _ in rows]
    if len(powers) != len(rows) or len(extra) != len(rows):
        raise InvalidInput("footer does not match the rows")
    schemes = {r["scheme"] for r in rows}
    alphas = {float(r["alpha"]) for r in rows}
    if len(schemes) != 1 or len(alphas) != 1:
        raise InvalidInput("a rate curve file holds one scheme at one alpha")
    pts = tuple(
        RatePair(r1=float(r["r1"]), r2=float(r["r2"]), se1=float(r["se1"]),
                 se2=float(r["se2"]), P=float(p), alpha=float(r["alpha"]), **ex)
        for r, p, ex in zip(rows, powers, extra)
    )
    curve = RateCurve(scheme=schemes.pop(), alpha=alphas.pop(), points=pts)
    fit = DofFit.from_dict(footer["fit"]) if footer.get("fit") else None
    return curve, fit, footer.get("meta", {})


def curve_to_json(curve, fit=None, meta=None):
    return json.dumps({
        "scheme": curve.scheme, "alpha": curve.alpha,
        "points": [{"P": r.P, "r1": r.r1, "se1": r.se1, "r2": r.r2, "se2": r.se2,
                    "trials": r.trials, "skipped": r.skipped,
                    "peak_power_ratio": r.peak_power_ratio,
                    "diagnostics": r.diagnostics} for r in curve.points],
        "fit": fit.to_dict() if fit is not None else None,
        "meta": meta or {},
    }, indent=2) + "\n"


def curve_from_json(text):
    d = json.loads(text)
    pts = tuple(RatePair(alpha=d["alpha"], **p) for p in d["points"])
    curve = RateCurve(scheme=d["scheme"], alpha=d["alpha"], points=pts)
    fit = DofFit.from_dict(d["fit"]) if d.get("fit") else None
    return curve, fit, d.get("meta", {})


# --------------------------------------------------------------- settings


def _read_config(path):
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read config file: {exc}") from exc
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string("[dofsim]\n" + text)
    except configparser.Error as exc:
        raise InvalidInput(f"bad config file: {exc}") from exc
    cfg = {k.replace("-", "_"): v for k, v in cp["dofsim"].items()}
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _setting(args, conf, key, cast):
    val = getattr(args, key, None)
    if val is None:
        val = conf.get(key)
    if val is None and key == "seed":
        val = os.environ.get(SEED_ENV)
    if val is None:
        val = DEFAULTS[key]
    try:
        return cast(val)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad value for {key}: {val!r}") from exc


def _fraction(x):
    try:
        return Fraction(str(x).strip())
    except ValueError as exc:
        raise InvalidInput(f"not a number: {x!r}") from exc


def _float_list(x):
    if isinstance(x, (list, tuple)):
        return [float(_fraction(v)) for v in x]
    return [float(_fraction(v)) for v in str(x).replace(",", " ").split()]


def _dims(x):
    parts = [int(v) for v in str(x).replace("x", ",").split(",")]
    if len(parts) != 2:
        raise ValueError("dims must be M,N")
    return tuple(parts)


# --------------------------------------------------------------- commands


def cmd_region(args, conf):
    alpha = _setting(args, conf, "alpha", _fraction)
    n_rx = _setting(args, conf, "n_rx", int)
    if not 0 <= alpha <= 1:
        raise InvalidInput(f"alpha must lie in [0, 1], got {alpha}")
    if n_rx < 1:
        raise InvalidInput("--n-rx must be >= 1")
    poly = theorem1_region(alpha) if n_rx == 1 else theorem2_region(alpha, n_rx)
    _emit(poly.to_json(indent=2) + "\n", args.out)
    return EXIT_OK


def _sweep_settings(args, conf):
    s = {
        "scheme": _setting(args, conf, "scheme", str),
        "pmin_db": _setting(args, conf, "pmin_db", float),
        "pmax_db": _setting(args, conf, "pmax_db", float),
        "points": _setting(args, conf, "points", int),
        "trials": _setting(args, conf, "trials", int),
        "seed": _setting(args, conf, "seed", int),
        "mode": _setting(args, conf, "mode", str),
        "dims": _setting(args, conf, "dims", _dims),
        "window": _setting(args, conf, "window", int),
        "threads": _setting(args, conf, "threads", int),
    }
    if s["scheme"] not in SCHEMES:
        raise InvalidInput(f"unknown scheme {s['scheme']!r}; choose from {sorted(SCHEMES)}")
    if s["mode"] not in NOISE_MODES:
        raise InvalidInput(f"mode must be one of {NOISE_MODES}")
    if s["threads"] < 1:
        raise InvalidInput("--threads must be >= 1")
    if s["scheme"] != "mimo" and s["dims"] != (2, 1):
        raise InvalidInput(f"scheme {s['scheme']!r} needs dims 2,1")
    if s["scheme"] == "mimo" and s["dims"][0] < 2 * s["dims"][1]:
        raise InvalidInput("mimo needs M >= 2N")
    explicit = getattr(args, "window", None) is not None or "window" in conf
    if not explicit:
        # the built-in default shrinks to fit a short grid
        s["window"] = min(s["window"], s["points"])
    if not 3 <= s["window"] <= s["points"]:
        raise InvalidInput("--window must lie in [3, points]")
    try:
        s["grid"] = power_grid_db(s["pmin_db"], s["pmax_db"], s["points"])
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    if s["pmin_db"] < 0:
        raise InvalidInput("powers below 0 dB are not supported")
    return s


def _run_sweep(s, alpha):
    try:
        template = SchemeConfig(alpha=alpha, P=s["grid"][0], trials=s["trials"],
                                noise_mode=s["mode"], dims=s["dims"], seed=s["seed"])
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    curve = sweep(s["scheme"], template, s["grid"], threads=s["threads"])
    return curve, fit_dof(curve, s["window"])


def _meta(s):
    return {"trials": s["trials"], "seed": s["seed"], "mode": s["mode"], "dims": list(s["dims"])}


def cmd_sweep(args, conf):
    s = _sweep_settings(args, conf)
    fmt = _setting(args, conf, "format", str)
    if fmt not in ("csv", "json"):
        raise InvalidInput("--format must be csv or json")
    alphas = _setting(args, conf, "alpha", _float_list)
    if len(alphas) != 1:
        raise InvalidInput("sweep takes a single alpha")
    curve, fit = _run_sweep(s, alphas[0])
    text = (curve_to_csv if fmt == "csv" else curve_to_json)(curve, fit, _meta(s))
    _emit(text, args.out)
    print(f"{curve.scheme} alpha={curve.alpha:g}: slope1={fit.slope1:.4f} "
          f"(se {fit.stderr1:.4f}) slope2={fit.slope2:.4f} (se {fit.stderr2:.4f})",
          file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args, conf):
    n = _setting(args, conf, "n", int)
    m = _setting(args, conf, "m", int)
    grid = _setting(args, conf, "sigma2_grid", _float_list)
    instances = _setting(args, conf, "instances", int)
    trials = _setting(args, conf, "bound_trials", int)
    seed = _setting(args, conf, "seed", int)
    slack = _setting(args, conf, "slack", float)
    if n < 1 or m < n:
        raise InvalidInput(f"need 1 <= n <= m, got n={n}, m={m}")
    if not grid or any(not 0 < g <= 1 for g in grid):
        raise InvalidInput("sigma2 values must lie in (0, 1]")
    if instances < 1 or trials < 2:
        raise InvalidInput("need instances >= 1 and trials >= 2")
    rng = np.random.default_rng(seed)
    reports = []
    for s2 in grid:
        for _ in range(instances):
            inst = bnd.random_instance(rng, n, m, s2)
            reports.append(bnd.check_sandwich(rng, inst, trials, slack))
    _emit(bnd.reports_to_json(reports, indent=2) + "\n", args.out)
    failed = sum(not r.verdict for r in reports)
    for s2 in grid:
        rows = [r for r in reports if r.sigma2 == s2]
        ok = sum(r.verdict for r in rows)
        print(f"sigma2={s2:g}: {ok}/{len(rows)} pass, max gap {max(r.gap for r in rows):.3f} "
              f"(bound {rows[0].gap_bound:.3f})", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def check_curve(curve, dims, eps):
    """(passed, normalized point) for the top-power point of ``curve``."""
    top = curve.points[-1]
    L = math.log2(top.P)
    pt = (top.r1 / L, top.r2 / L)
    N = int(dims[1])
    alpha = Fraction(repr(float(curve.alpha)))
    poly = theorem1_region(alpha) if N == 1 else theorem2_region(alpha, N)
    return contains(poly, pt, eps, metric="chebyshev"), pt


def cmd_check(args, conf):
    eps = _setting(args, conf, "eps", float)
    if eps < 0:
        raise InvalidInput("--eps must be >= 0")
    results = []
    if args.input:
        for path in args.input:
            try:
                with open(path, encoding="utf-8") as f:
                    text = f.read()
            except OSError as exc:
                raise InvalidInput(f"cannot read {path}: {exc}") from exc
            reader = curve_from_json if text.lstrip().startswith("{") else curve_from_csv
            try:
                curve, _, meta = reader(text)
            except (KeyError, ValueError) as exc:
                raise InvalidInput(f"{path}: {exc}") from exc
            results.append((curve, tuple(meta.get("dims", (2, 1)))))
    else:
        s = _sweep_settings(args, conf)
        schemes = args.scheme_list or [s["scheme"]]
        for name in schemes:
            s = dict(s, scheme=name)
            if name not in SCHEMES:
                raise InvalidInput(f"unknown scheme {name!r}")
            if name != "mimo":
                s["dims"] = (2, 1)
            for a in _setting(args, conf, "alpha", _float_list):
                curve, _ = _run_sweep(s, a)
                results.append((curve, s["dims"]))
    failed = 0
    for curve, dims in results:
        ok, pt = check_curve(curve, dims, eps)
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {curve.scheme} alpha={curve.alpha:g} "
              f"P={linear_to_db(curve.points[-1].P):.1f}dB point=({pt[0]:.4f}, {pt[1]:.4f}) "
              f"eps={eps:g}")
    return EXIT_FAILED if failed else EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(prog="dofsim", description="DoF simulation toolkit")
    p.add_argument("--config", help="flat key = value settings file")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("region", help="write the exact DoF region polygon as JSON")
    r.add_argument("--alpha", help="CSIT quality exponent, e.g. 1/2")
    r.add_argument("--n-rx", dest="n_rx", type=int, help="receive antennas N (scales the region)")
    r.add_argument("--out")
    r.set_defaults(func=cmd_region)

    def sweep_flags(q):
        q.add_argument("--pmin-db", dest="pmin_db", type=float)
        q.add_argument("--pmax-db", dest="pmax_db", type=float)
        q.add_argument("--points", type=int)
        q.add_argument("--trials", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--mode", choices=NOISE_MODES)
        q.add_argument("--dims", help="M,N antennas (mimo scheme)")
        q.add_argument("--window", type=int, help="top grid points used by the fit")
        q.add_argument("--threads", type=int, help="max concurrent grid points")

    s = sub.add_parser("sweep", help="rate curve over a power grid plus DoF fit")
    s.add_argument("--scheme", choices=sorted(SCHEMES))
    s.add_argument("--alpha")
    sweep_flags(s)
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bounds", help="check the log-det sandwich bounds")
    b.add_argument("--n", type=int, help="rows of H (receive antennas)")
    b.add_argument("--m", type=int, help="columns of H (transmit antennas)")
    b.add_argument("--sigma2-grid", dest="sigma2_grid")
    b.add_argument("--instances", type=int, help="random instances per sigma2")
    b.add_argument("--trials", dest="bound_trials", type=int, help="Monte Carlo draws")
    b.add_argument("--seed", type=int)
    b.add_argument("--slack", type=float, help="additive constant in nats")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("check", help="outer-bound containment of swept rate points")
    c.add_argument("--alpha", nargs="+", help="alphas to sweep when no --input is given")
    c.add_argument("--scheme", dest="scheme_list", nargs="+", choices=sorted(SCHEMES))
    c.add_argument("--input", nargs="+", help="rate curve files (csv or json) to check")
    c.add_argument("--eps", type=float, help="Chebyshev inflation of the region")
    sweep_flags(c)
    c.set_defaults(func=cmd_check, scheme=None)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        conf = _read_config(args.config)
        return args.func(args, conf)
    except (InvalidInput, ValueError) as exc:
        print(f"dofsim: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"dofsim: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SchemeError as exc:
        print(f"dofsim: run failed: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
