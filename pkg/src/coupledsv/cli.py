"""``coupledsv`` command line: kernel tables, densities, hard-edge ladders, CLT runs, verification.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from itertools import combinations

import numpy as np

from coupledsv import __version__
from coupledsv.errors import CapacityError, ConvergenceError, DomainError, NumericError, ProximityError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
CSV_VERSION = 1

DEFAULTS = {
    "mu": 0.5, "N": 4, "M": None, "seed": 12345, "trials": 20000, "bins": 40, "grid": "0.5:3:6,0.5:3:6",
    "method": "direct", "out": None, "format": "csv", "nu": 0, "Ns": "20,40,80", "f": "x",
    "range": None, "mus": "0.3,0.7", "tol": None,
}

COMMAND_DEFAULTS = {
    "clt": {"N": 100, "trials": 5000},
    "density": {"N": 8},
}

log = logging.getLogger("coupledsv")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option defaults (flags take precedence)")
    common.add_argument("--mu", type=float)
    common.add_argument("--N", type=int)
    common.add_argument("--M", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--bins", type=int)
    common.add_argument("--grid", help='"x0:x1:steps,y0:y1:steps"')
    common.add_argument("--method", choices=["direct", "double", "cd", "contour", "all"])
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--nu", type=int)
    common.add_argument("--Ns", help="comma-separated N ladder")
    common.add_argument("--mus", help="comma-separated mu values (hardedge)")
    common.add_argument("--f", help='polynomial: "x", "x^k", or ascending coefficients "c0,c1,..."')
    common.add_argument("--range", help='histogram range "lo:hi"')
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="coupledsv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"coupledsv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("kernel", parents=[common], help="K_N(x, y) on a grid")
    sub.add_parser("density", parents=[common], help="Monte Carlo one-point density vs K_N(x, x)")
    sub.add_parser("hardedge", parents=[common], help="rescaled kernel vs hard-edge limit over an N ladder")
    sub.add_parser("clt", parents=[common], help="CLT variance experiment (JSON report)")
    sub.add_parser("verify", parents=[common], help="run the exact identity suite")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["M"] is None:
        cfg["M"] = cfg["N"] + cfg["nu"]
    cfg["command"] = args.command
    return cfg


def _params(cfg):
    from coupledsv.ensemble import make_parameters

    return make_parameters(cfg["mu"], cfg["N"], cfg["M"])


def parse_grid(spec: str):
    try:
        parts = [tuple(p.split(":")) for p in spec.split(",")]
        if len(parts) != 2:
            raise ValueError
        axes = []
        for a, b, n in parts:
            a, b, n = float(a), float(b), int(n)
            if n < 1 or a <= 0 or b < a:
                raise ValueError
            axes.append(np.linspace(a, b, n) if n > 1 else np.array([a]))
        return axes
    except ValueError:
        raise UsageError(f"invalid grid {spec!r}; expected x0:x1:steps,y0:y1:steps with 0 < x0 <= x1") from None


def parse_polynomial(spec: str) -> list:
    spec = spec.replace(" ", "")
    if spec == "x":
        return [0.0, 1.0]
    if spec.startswith("x^"):
        try:
            k = int(spec[2:])
        except ValueError:
            raise UsageError(f"invalid polynomial {spec!r}") from None
        return [0.0] * k + [1.0]
    try:
        return [float(c) for c in spec.split(",")]
    except ValueError:
        raise UsageError(f"invalid polynomial {spec!r}") from None


def _int_list(spec: str):
    try:
        return [int(v) for v in str(spec).split(",")]
    except ValueError:
        raise UsageError(f"invalid integer list {spec!r}") from None


def _float_list(spec: str):
    try:
        return [float(v) for v in str(spec).split(",")]
    except ValueError:
        raise UsageError(f"invalid number list {spec!r}") from None


def _header(cfg) -> str:
    shown = {k: cfg[k] for k in sorted(cfg) if k not in ("out", "config")}
    return f"# coupledsv {cfg['command']} csv-v{CSV_VERSION}\n# config: {json.dumps(shown, sort_keys=True)}\n"


def _emit_table(cfg, columns, rows, extra=None):
    if cfg["format"] == "json":
        clean = [[None if isinstance(v, float) and not np.isfinite(v) else v for v in row] for row in rows]
        payload = {"command": cfg["command"], "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
                   "columns": columns, "rows": clean}
        if extra:
            payload.update(extra)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(_header(cfg))
    if extra:
        for k in sorted(extra):
            buf.write(f"# {k}: {json.dumps(extra[k], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# -- subcommands ---------------------------------------------------------------------

def cmd_kernel(cfg):
    from coupledsv.ensemble import BiorthogonalSystem
    from coupledsv.ensemble.kernel import ALIASES, kernel_values

    xs, ys = parse_grid(cfg["grid"])
    sys_ = BiorthogonalSystem(_params(cfg))
    methods = ["direct", "double", "cd", "contour"] if cfg["method"] == "all" else [cfg["method"]]
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    cols = {}
    for m in methods:
        if m == "cd" and len(methods) > 1:
            vals = np.full(X.shape, np.nan)
            close = np.abs(X - Y) <= 1e-4 * np.maximum(X, Y)
            if np.any(~close):
                vals[~close] = kernel_values(X[~close], Y[~close], sys_, m)
            cols[m] = vals
        else:
            cols[m] = np.asarray(kernel_values(X, Y, sys_, m))
    if len(methods) == 1:
        m = methods[0]
        rows = [[float(x), float(y), float(v), ALIASES[m]] for x, y, v in zip(X.ravel(), Y.ravel(), cols[m].ravel())]
        return _emit_table(cfg, ["x", "y", "K", "method"], rows)
    rows = []
    for idx in np.ndindex(X.shape):
        vals = [float(cols[m][idx]) for m in methods]
        finite = [v for v in vals if np.isfinite(v)]
        dev = max((abs(a - b) / max(abs(a), abs(b), 1e-300) for a, b in combinations(finite, 2)), default=0.0)
        rows.append([float(X[idx]), float(Y[idx])] + vals + [dev])
    return _emit_table(cfg, ["x", "y"] + [ALIASES[m] for m in methods] + ["max_rel_deviation"], rows)


def cmd_density(cfg):
    from coupledsv.ensemble import BiorthogonalSystem
    from coupledsv.ensemble.kernel import kernel_direct
    from coupledsv.quadrature.rules import gauss_legendre_nodes
    from coupledsv.sampler import empirical_density, sample_batch

    if cfg["trials"] < 100:
        raise UsageError("density needs at least 100 trials")
    params = _params(cfg)
    batch = sample_batch(params, cfg["trials"], cfg["seed"])
    if cfg["range"]:
        try:
            lo, hi = (float(v) for v in cfg["range"].split(":"))
        except ValueError:
            raise UsageError("range must be lo:hi") from None
    else:
        lo, hi = 0.0, float(np.quantile(batch.spectra, 0.995))
    hist = empirical_density(batch, cfg["bins"], (lo, hi))
    sys_ = BiorthogonalSystem(params)
    u, w = gauss_legendre_nodes(16)
    a, b = hist.edges[:-1, None], hist.edges[1:, None]
    pts = a + (b - a) * u
    diag = kernel_direct(pts, pts, sys_)
    mass = np.sum(diag * w * (b - a), axis=1)
    width = np.diff(hist.edges)
    rows = [
        [float(0.5 * (hist.edges[i] + hist.edges[i + 1])), float(hist.density[i]), float(hist.stderr[i]),
         float(mass[i] / width[i]), float(mass[i])]
        for i in range(len(width))
    ]
    extra = {"trials": batch.count, "failures": batch.failures,
             "empirical_mass": float(np.sum(hist.density * width)), "analytic_mass": float(np.sum(mass))}
    return _emit_table(cfg, ["bin_center", "empirical_density", "stderr", "analytic_density", "analytic_bin_mass"],
                       rows, extra)


def cmd_hardedge(cfg):
    from coupledsv.ensemble import BiorthogonalSystem, make_parameters
    from coupledsv.hardedge import limiting_kernel, rescaled_finite_kernel

    g = np.linspace(0.2, 3.0, 5)
    if cfg["grid"] != DEFAULTS["grid"]:
        xs, ys = parse_grid(cfg["grid"])
    else:
        xs = ys = g
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nu = cfg["nu"]
    limit = limiting_kernel(X, Y, nu)
    rows = []
    for mu in _float_list(cfg["mus"]):
        for n in _int_list(cfg["Ns"]):
            sys_ = BiorthogonalSystem(make_parameters(mu, n, n + nu))
            dev = float(np.max(np.abs(rescaled_finite_kernel(X, Y, sys_) - limit)))
            rows.append([mu, n, nu, dev])
    return _emit_table(cfg, ["mu", "N", "nu", "sup_deviation"], rows)


def cmd_clt(cfg):
    from coupledsv.clt import clt_experiment

    if cfg["trials"] < 1000:
        raise UsageError("clt needs at least 1000 trials")
    report = clt_experiment(_params(cfg), parse_polynomial(cfg["f"]), cfg["trials"], cfg["seed"])
    d = json.loads(report.to_json())
    tol = cfg["tol"] if cfg["tol"] is not None else 0.1
    d["within_tolerance"] = abs(d["ratio"] - 1) <= tol
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


def cmd_verify(cfg):
    from coupledsv.identities import run_suite

    verdicts = run_suite()
    failed = [v for v in verdicts if not v.ok]
    payload = {"ok": not failed, "families": [dict(v.__dict__, ok=v.ok) for v in verdicts]}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n", (EXIT_VERIFY if failed else EXIT_OK)


COMMANDS = {"kernel": cmd_kernel, "density": cmd_density, "hardedge": cmd_hardedge, "clt": cmd_clt,
            "verify": cmd_verify}


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message), "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        out = COMMANDS[args.command](cfg)
        code = EXIT_OK
        if isinstance(out, tuple):
            out, code = out
        _write(out, cfg["out"])
        return code
    except (UsageError, DomainError, ProximityError, CapacityError) as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, exc)
    except (ConvergenceError, NumericError, OverflowError, FloatingPointError) as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, exc)
    except OSError as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, exc)


if __name__ == "__main__":
    raise SystemExit(main())
