"""Batch command-line front end.

Subcommands
    params      derived model parameters and exponent-triplet classification
    verify      named identity/estimate suites, JSON report
    evolve      nonlinear mild-solution march, trajectory CSV + JSON report
    decay-fit   power-law exponent fit of a (t, value) CSV
    young-audit randomized convolution-inequality audit, CSV report

Conventions: flags may also be supplied via `--config FILE` (JSON object
whose keys are the flag names with dashes replaced by underscores;
explicit flags win).  `--out DIR` writes report files into DIR, otherwise
reports go to stdout.  Outputs are deterministic: identical configs
produce byte-identical files.  Exit codes: 0 success, 1 bad
configuration, 2 numerical failure, 3 blow-up detected (only with
--fail-on-blowup).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .estimates import decay_exponent_fit
from .evolution import EvolutionConfig, picard_solve
from .grids import GridFunction, PHYSICAL, transform_grids
from .kernels import young_audit
from .model import classify_triplet, derive_params, make_nonlinearity
from .transform import plan_transform
from .verify import SUITES, run_suites


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, filename: str, text: str) -> None:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_atomic(os.path.join(args.out, filename), text)
    else:
        sys.stdout.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset (None) flags from the JSON config file, if given."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must contain a JSON object")
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, val)


def _defaults(args: argparse.Namespace, **pairs) -> None:
    for dest, val in pairs.items():
        if getattr(args, dest) is None:
            setattr(args, dest, val)


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="dimension (>= 2)")
    p.add_argument("--beta", type=float, default=None,
                   help="weight exponent, 0 <= beta < 2")
    p.add_argument("--k", type=int, default=None, help="mode index (>= 0)")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", default=None, help="output directory")


def _parse_triplets(text: str):
    """Parse 'q=2,p=2..6' into (q, [p values])."""
    q = None
    ps = None
    for part in text.split(","):
        key, _, val = part.partition("=")
        if key == "q":
            q = float(val)
        elif key == "p":
            lo, sep, hi = val.partition("..")
            ps = (list(range(int(float(lo)), int(float(hi)) + 1)) if sep
                  else [float(lo)])
        else:
            raise ValueError(f"unknown triplet field {key!r}")
    if q is None or ps is None:
        raise ValueError("--triplets needs both q=... and p=...")
    return q, [float(p) for p in ps]


def cmd_params(args) -> int:
    _defaults(args, n=3, beta=1.0, k=0)
    mp = derive_params(args.n, args.beta, args.k)
    lines = ["field,value"]
    for name in ("n", "beta", "k", "lam", "mu_k", "mu", "gamma", "alpha"):
        lines.append(f"{name},{getattr(mp, name):.17g}")
    if args.triplets:
        q, ps = _parse_triplets(args.triplets)
        lines.append("")
        lines.append("m,p,q,kind")
        from .model import admissible_m
        for p in ps:
            m = admissible_m(p, q, mp)
            tr = classify_triplet(m, p, q, mp)
            lines.append(f"{m:.17g},{p:.17g},{q:.17g},{tr.kind}")
    _emit(args, "params.csv", "\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    _defaults(args, n=3, beta=1.0, k=0)
    suites = args.suite or []
    if not suites:
        raise ValueError("no suites selected; choose from "
                         + ", ".join(SUITES) + ", all")
    if "all" in suites:
        suites = list(SUITES)
    mp = derive_params(args.n, args.beta, args.k)
    checks = run_suites(suites, mp)
    report = {
        "model": {"n": args.n, "beta": args.beta, "k": args.k},
        "suites": suites,
        "checks": checks,
        "all_pass": all(c["pass"] for c in checks),
    }
    _emit(args, "verify.json", _json_dumps(report))
    return 0 if report["all_pass"] else 2


def cmd_evolve(args) -> int:
    _defaults(args, n=3, beta=1.0, k=0, b=1.0, sign="defocusing", q=3.0,
              t_end=1.0, steps=64, amplitude=1.0, width=1.0, r_max=20.0,
              substeps=4, picard_tol=1e-9, threshold=1e12)
    mp = derive_params(args.n, args.beta, args.k)
    sign = {"focusing": 1.0, "defocusing": -1.0}.get(args.sign)
    if sign is None:
        raise ValueError("--sign must be focusing or defocusing")
    nl = make_nonlinearity(args.b, sign, mp)
    cfg = EvolutionConfig(t_end=args.t_end, steps=args.steps,
                          nonlinearity=nl, q=args.q,
                          picard_tol=args.picard_tol,
                          blowup_threshold=args.threshold,
                          substeps=args.substeps)
    pg, sg = transform_grids(args.beta, r_max=args.r_max)
    plan = plan_transform(pg, sg, mp)
    r = pg.nodes
    u0 = GridFunction(pg, args.amplitude * r ** args.k
                      * np.exp(-r ** 2 / (2.0 * args.width ** 2)),
                      PHYSICAL, mp)
    traj, report = picard_solve(u0, cfg, plan)
    _emit(args, "trajectory.csv", traj.to_csv())
    rep = {
        "blowup_detected": report.detected,
        "T_star_fit": report.T_star_fit,
        "exponent_fit": report.exponent_fit,
        "lower_bound_exponent": report.lower_bound_exponent,
        "t_final": float(traj.times[-1]),
        "norm_q_final": float(traj.norms_q[-1]),
    }
    for key, val in rep.items():
        if isinstance(val, float) and math.isnan(val):
            rep[key] = None
    _emit(args, "report.json", _json_dumps(rep))
    if report.detected and args.fail_on_blowup:
        return 3
    return 0


def cmd_decay_fit(args) -> int:
    if not args.csv:
        raise ValueError("--csv FILE is required")
    data = np.genfromtxt(args.csv, delimiter=",", skip_header=1)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("CSV must have at least two columns (t, value)")
    keep = (data[:, 0] > 0) & (data[:, 1] > 0)
    expo = decay_exponent_fit(data[keep, 0], data[keep, 1])
    _emit(args, "decay_fit.json", _json_dumps({"exponent": expo}))
    return 0


def cmd_young_audit(args) -> int:
    _defaults(args, n=3, beta=1.0, k=0, trials=20, seed=0)
    mp = derive_params(args.n, args.beta, args.k)
    pg, sg = transform_grids(args.beta, r_max=14.0)
    plan = plan_transform(pg, sg, mp)
    r = pg.nodes
    rng = np.random.default_rng(args.seed)
    triples = ((1.0, 1.0, 1.0), (2.0, 4.0 / 3.0, 4.0 / 3.0), (3.0, 1.2, 2.0))
    lines = ["trial,a,b,c,lhs,rhs,slack,pass"]
    ok = True
    for trial in range(args.trials):
        c1, c2 = rng.uniform(0.3, 2.0, 2)
        s1, s2 = rng.uniform(0.5, 2.0, 2)
        f = GridFunction(pg, r ** args.k * np.exp(-c1 * (r - s1) ** 2),
                         PHYSICAL, mp)
        g = GridFunction(pg, r ** args.k * np.exp(-c2 * (r - s2) ** 2),
                         PHYSICAL, mp)
        for (a, b, c) in triples:
            lhs, rhs = young_audit(f, g, a, b, c, plan)
            slack = lhs / rhs - 1.0
            good = slack <= 1e-8
            ok = ok and good
            lines.append(f"{trial},{a:.17g},{b:.17g},{c:.17g},"
                         f"{lhs:.17g},{rhs:.17g},{slack:.17g},{good}")
    _emit(args, "young_audit.csv", "\n".join(lines) + "\n")
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bhankel",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derived parameters and triplet kinds")
    _model_flags(p)
    p.add_argument("--triplets", default=None,
                   help="classification lattice, e.g. q=2,p=2..6")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("verify", help="run identity/estimate suites")
    _model_flags(p)
    p.add_argument("--suite", action="append", default=None,
                   choices=list(SUITES) + ["all"],
                   help="suite name (repeatable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evolve", help="nonlinear evolution run")
    _model_flags(p)
    p.add_argument("--b", type=float, default=None, help="nonlinearity power")
    p.add_argument("--sign", default=None,
                   help="focusing or defocusing")
    p.add_argument("--q", type=float, default=None, help="tracked norm index")
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--steps", type=int, default=None,
                   help="target number of marching windows")
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--width", type=float, default=None)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--substeps", type=int, default=None)
    p.add_argument("--picard-tol", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None,
                   help="blow-up detection norm threshold")
    p.add_argument("--fail-on-blowup", action="store_true")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("decay-fit", help="fit a power-law exponent to a CSV")
    p.add_argument("--csv", default=None, help="input CSV with t,value")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_decay_fit)

    p = sub.add_parser("young-audit",
                       help="randomized convolution-inequality audit")
    _model_flags(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_young_audit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
