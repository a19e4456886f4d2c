"""Command-line front end.

Subcommands expose point evaluations (kernel, distance), constant sweeps,
the verification suites, and the Monte Carlo oracle.  Outputs are CSV
(17 significant digits, '.' decimal) or JSON carrying a config echo, the
library version, and per-value error estimates.  Files are written via a
temporary name and os.replace, so failures leave no partial output.

Exit codes: 0 success (and, for verify, zero violations), 2 domain error,
3 convergence failure, 1 verification violations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .distance import cc_distance
from .errors import ConvergenceError, DomainError, Su2HeatError
from .geometry import CylCoord
from .heisenberg import HeisPoint, dilation_limit_error, gaveau_kernel
from .inequalities import (a_const, c_const, eigen_cos, first_gradient_bound_check,
                           kernel_function, li_yau_check, li_yau_exponential_check,
                           positive_cos, reverse_poincare_check)
from .sampler import (MCConfig, chi_square_test, empirical_density,
                      model_cell_probabilities, sample_coordinates)
from .su2_kernel import (KernelRep, laplace_check, phi_ratio, pt, pt_cutlocus,
                         pt_integral, pt_spectral)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3

_FLOAT_FMT = "%.17g"

DEFAULTS = {
    "eps": 1e-10,
    "alpha": 3.0,
    "t": 1.0,
    "grid_n": 40,
    "seed": 0,
    "n_paths": 10000,
    "step": 1e-3,
    "rep": "auto",
    "format": "json",
}


@dataclass
class RunConfig:
    """Flat key=value configuration; flags override file entries."""

    values: dict = field(default_factory=lambda: dict(DEFAULTS))

    @classmethod
    def load(cls, path=None, overrides=None):
        cfg = cls()
        if path:
            with open(path) as fh:
                for line_no, line in enumerate(fh, 1):
                    line = line.split("#", 1)[0].strip()
                    if not line:
                        continue
                    if "=" not in line:
                        raise ValueError(f"{path}:{line_no}: expected key=value")
                    key, val = (s.strip() for s in line.split("=", 1))
                    if key not in DEFAULTS:
                        raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
                    cfg.values[key] = type(DEFAULTS[key])(val)
        for key, val in (overrides or {}).items():
            if val is not None:
                cfg.values[key] = val
        return cfg

    def __getitem__(self, key):
        return self.values[key]


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".su2heat-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(payload, args, csv_text=None):
    """Print or write the result; JSON by default, CSV when asked for."""
    fmt = getattr(args, "format", None) or "json"
    if fmt == "csv" and csv_text is not None:
        out = csv_text
    else:
        payload = {"version": __version__, **payload}
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        _atomic_write(args.out, out)
    else:
        sys.stdout.write(out)


def _f(x):
    return float(_FLOAT_FMT % x)  # round-trips at 17 significant digits


def cmd_kernel(args):
    rep = args.rep
    if rep == "spectral":
        ev = pt_spectral(args.t, args.r, args.z, args.eps)
    elif rep == "integral":
        ev = pt_integral(args.t, args.r, args.z)
    elif rep == "cutlocus":
        ev = pt_cutlocus(args.t, args.z)
    else:
        ev = pt(args.t, args.r, args.z, args.eps)
    _emit({"t": args.t, "r": args.r, "z": args.z,
           "value": _f(ev.value), "abs_err": _f(ev.abs_err),
           "representation": ev.representation.value,
           "config": {"rep": rep, "eps": args.eps}}, args)
    return EXIT_OK


def cmd_distance(args):
    res = cc_distance(args.r, args.z)
    _emit({"r": args.r, "z": args.z, "theta_star": _f(res.theta_star),
           "d_squared": _f(res.d_squared), "d": _f(res.distance),
           "residual": _f(res.residual), "on_cut_locus": res.on_cut_locus,
           "config": {}}, args)
    return EXIT_OK


def cmd_constants(args):
    t_grid = sorted(float(s) for s in args.t_grid.split(","))
    rows = []
    for t in t_grid:
        row = {"t": t, "A": a_const(t),
               "C": c_const(t) if t >= 0.05 else float("nan"),
               "Phi": phi_ratio(t) if t >= 0.5 else float("nan")}
        rows.append(row)
    header = "t,A,C,Phi"
    lines = [header] + [",".join(_FLOAT_FMT % row[k] for k in ("t", "A", "C", "Phi"))
                        for row in rows]
    csv_text = "\n".join(lines) + "\n"
    _emit({"rows": [{k: _f(v) for k, v in row.items()} for row in rows],
           "config": {"t_grid": t_grid}}, args, csv_text=csv_text)
    return EXIT_OK


def _report_dict(rep):
    return {"name": rep.name, "min_margin": _f(rep.min_margin),
            "argmin": [_f(v) for v in rep.argmin],
            "n_points": rep.n_points, "n_violations": rep.n_violations}


def _suite_liyau(args):
    return [li_yau_check(args.t, args.alpha, args.grid_n),
            li_yau_exponential_check(args.t, args.alpha, args.grid_n)]


def _suite_reverse_poincare(args):
    cv = c_const(args.t)
    return [reverse_poincare_check(f, args.t, c_value=cv)
            for f in (eigen_cos(), eigen_cos(0.5), positive_cos(),
                      kernel_function(0.2))]


def _suite_gradient(args):
    return [first_gradient_bound_check(f, args.t)
            for f in (eigen_cos(), positive_cos(), kernel_function(0.2),
                      kernel_function(0.2, z_shift=0.5))]


def _suite_laplace(args):
    reports = []
    for lam, r, z in ((0.5, 1.0, 0.0), (1.0, 0.7, 1.1)):
        lhs, rhs = laplace_check(lam, r, z)
        margin = 1e-5 - abs(lhs - rhs) / abs(rhs)
        reports.append(type("R", (), {
            "name": f"laplace[lam={lam}]", "min_margin": margin,
            "argmin": (lam, r, z), "n_points": 1,
            "n_violations": int(margin < 0)})())
    return reports


def _suite_heisenberg(args):
    reports = []
    for (rh, zh) in ((1.0, 0.5), (0.5, 1.0)):
        errs = [dilation_limit_error(t, rh, zh) for t in (0.1, 0.05, 0.02)]
        lim = 2.0 * np.pi ** 2 * gaveau_kernel(1.0, HeisPoint(rh, zh))
        ok = errs[0] > errs[1] > errs[2] and errs[2] < 0.1 * lim
        reports.append(type("R", (), {
            "name": f"heisenberg[({rh},{zh})]",
            "min_margin": 0.1 * lim - errs[2], "argmin": (0.02, rh, zh),
            "n_points": 3, "n_violations": int(not ok)})())
    return reports


def cmd_verify(args):
    suites = {"liyau": _suite_liyau, "reverse-poincare": _suite_reverse_poincare,
              "gradient": _suite_gradient, "laplace": _suite_laplace,
              "heisenberg": _suite_heisenberg}
    names = list(suites) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        reports.extend(suites[name](args))
    violations = sum(rep.n_violations for rep in reports)
    _emit({"reports": [_report_dict(r) for r in reports],
           "total_violations": violations,
           "config": {"suite": args.suite, "t": args.t, "alpha": args.alpha,
                      "grid_n": args.grid_n}}, args)
    return EXIT_OK if violations == 0 else EXIT_VIOLATIONS


def cmd_sample(args):
    cfg = MCConfig(n_paths=args.n, step=args.step, t_final=args.t,
                   seed=args.seed)
    r, theta, z = sample_coordinates(cfg)
    hist = empirical_density(r, z)
    probs = model_cell_probabilities(args.t, hist)
    stat, dof, p, merged = chi_square_test(hist, probs)
    if args.out_csv:
        lines = ["path_id,r,theta,z"]
        lines += [f"{i},{_FLOAT_FMT % r[i]},{_FLOAT_FMT % theta[i]},{_FLOAT_FMT % z[i]}"
                  for i in range(len(r))]
        _atomic_write(args.out_csv, "\n".join(lines) + "\n")
    payload = {"seed": cfg.seed, "n_paths": cfg.n_paths, "step": cfg.step,
               "t_final": cfg.t_final,
               "chi_square": {"stat": _f(stat), "dof": dof, "p_value": _f(p),
                              "merged_cells": merged},
               "histogram": {"r_edges": [_f(v) for v in hist.r_edges],
                             "z_edges": [_f(v) for v in hist.z_edges],
                             "counts": hist.counts.astype(int).tolist(),
                             "total": hist.total},
               "config": {"n": args.n, "step": args.step, "t": args.t,
                          "seed": args.seed}}
    if args.out_json:
        _atomic_write(args.out_json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        _emit(payload, args)
    return EXIT_OK


def cmd_defaults(args):
    lines = [f"{k}={v}" for k, v in sorted(DEFAULTS.items())]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="su2heat",
                                description="Subelliptic heat kernel on SU(2)")
    p.add_argument("--config", help="key=value config file ('#' comments)")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="evaluate p_t(r, z)")
    k.add_argument("--t", type=float, required=True)
    k.add_argument("--r", type=float, required=True)
    k.add_argument("--z", type=float, required=True)
    k.add_argument("--rep", choices=["auto", "spectral", "integral", "cutlocus"],
                   default=None)
    k.add_argument("--eps", type=float, default=None)
    k.add_argument("--out")
    k.set_defaults(func=cmd_kernel)

    d = sub.add_parser("distance", help="Carnot-Caratheodory distance from 0")
    d.add_argument("--r", type=float, required=True)
    d.add_argument("--z", type=float, required=True)
    d.add_argument("--out")
    d.set_defaults(func=cmd_distance)

    c = sub.add_parser("constants", help="CSV of t, A(t), C(t), Phi(t)")
    c.add_argument("--t-grid", default="0.5,1,3")
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True,
                   choices=["liyau", "reverse-poincare", "gradient",
                            "laplace", "heisenberg", "all"])
    v.add_argument("--t", type=float, default=None)
    v.add_argument("--alpha", type=float, default=None)
    v.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="Monte Carlo diffusion oracle")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--step", type=float, default=None)
    s.add_argument("--t", type=float, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out-csv")
    s.add_argument("--out-json")
    s.set_defaults(func=cmd_sample)

    r = sub.add_parser("defaults", help="print the configuration reference")
    r.set_defaults(func=cmd_defaults)
    return p


def _apply_config(args):
    keys = {"eps", "alpha", "t", "grid_n", "seed", "step", "rep", "format"}
    overrides = {k: getattr(args, k, None) for k in keys}
    overrides["n_paths"] = getattr(args, "n", None)
    cfg = RunConfig.load(getattr(args, "config", None), overrides)
    for key in keys:
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, cfg[key])
    if hasattr(args, "n") and args.n is None:
        args.n = cfg["n_paths"]
    return args


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args = _apply_config(args)
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except Su2HeatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
