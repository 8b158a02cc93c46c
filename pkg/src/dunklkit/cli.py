"""Command-line front end.

    dunklkit <command> [--kappa K] [--fn NAME[:ARGS]] [--out DIR] [--format csv|json] ...

Every command writes a data table (CSV with ``#`` metadata lines, or one
JSON document) and a JSON report into ``--out``.  Exit codes: 0 ok,
1 acceptance failure (``verify``), 2 bad configuration, 3 numerical
failure (a library error, or a built-in check above ``--tol``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, DunklkitError, InvalidInterval, MethodUnavailable, SingularPoint
from .functions import BUILTINS, Fn, parse_fn, poisson_p
from .transform import CSV_TAG

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_ERRORS = (DomainError, InvalidInterval, MethodUnavailable, SingularPoint)


class ConfigError(Exception):
    pass


class CheckFailed(Exception):
    """A command's built-in numerical check exceeded its tolerance."""


# ------------------------------------------------------------- config ----

def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kappa", type=float, default=0.5, help="multiplicity (>= 0)")
    common.add_argument("--dim", type=int, default=1, help="dimension (product group Z_2^d)")
    common.add_argument("--grid-L", type=float, default=None, dest="grid_L",
                        help="grid half-width: frequency range or ball-family extent")
    common.add_argument("--grid-n", type=int, default=None, dest="grid_n",
                        help="target node count of the frequency grid")
    common.add_argument("--tol", type=float, default=None, help="check tolerance override")
    common.add_argument("--refine", type=int, default=0, help="family/grid refinement steps")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="dunklkit_out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--fn", default=None, help=f"function: {', '.join(sorted(BUILTINS))}, "
                        "poisson-p, or custom-csv:PATH")
    common.add_argument("--x0", type=float, default=1.0, help="height (Poisson kernel, fields)")
    common.add_argument("--xs", type=_floats, default=None, help="evaluation points a,b,c")

    p = argparse.ArgumentParser(prog="dunklkit", description="Rank-one Dunkl harmonic analysis")
    p.add_argument("--version", action="version", version=f"dunklkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("transform", parents=[common], help="Dunkl transform with Plancherel check")
    r = sub.add_parser("riesz", parents=[common], help="Riesz transform values")
    r.add_argument("--eps", type=float, default=0.0, help="truncation (0: principal value)")
    sub.add_parser("poisson", parents=[common], help="Poisson / conjugate fields and CR residual")
    for name, helptext in (("bmo", "BMO norm over a ball family"),
                           ("bmc", "BMC seminorm over a ball family")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("--riesz", action="store_true", help="apply R~ to the function first")
        if name == "bmo":
            q.add_argument("--orbit", action="store_true", help="orbit balls B u (-B)")
    c = sub.add_parser("carleson", parents=[common], help="Carleson norm of a density")
    c.add_argument("--density", choices=("phi", "x0"), default="phi",
                   help="phi: x0 |grad u_phi|^2; x0: x0 restricted to x0 < 1")
    d = sub.add_parser("duality", parents=[common], help="H^1-BMC pairing identity")
    d.add_argument("--parity", choices=("odd", "even"), default="odd")
    sub.add_parser("phi0", parents=[common], help="phi0 = R chi_[-1,1] against its lower bound")
    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--quick", action="store_true", help="fast subset (< 60 s)")
    v.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], default=None)
    return p


def config_dict(args) -> dict:
    skip = {"out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def validate(args):
    if not math.isfinite(args.kappa) or args.kappa < 0:
        raise ConfigError(f"kappa must be >= 0, got {args.kappa}")
    if args.dim < 1:
        raise ConfigError("dim must be >= 1")
    if args.dim > 1 and args.command != "transform":
        raise ConfigError(f"{args.command} is rank one only (--dim 1)")
    if args.grid_L is not None and args.grid_L <= 0:
        raise ConfigError("grid-L must be positive")
    if args.grid_n is not None and args.grid_n < 8:
        raise ConfigError("grid-n must be >= 8")
    if args.tol is not None and args.tol <= 0:
        raise ConfigError("tol must be positive")
    if args.refine < 0:
        raise ConfigError("refine must be >= 0")
    if args.x0 <= 0:
        raise ConfigError("x0 must be positive")


def resolve_fn(args, default: str):
    spec = args.fn or default
    if spec == "poisson-p":
        return poisson_p(args.x0, args.kappa)
    if spec.startswith("custom-csv:"):
        from .transform import read_csv
        path = Path(spec.partition(":")[2])
        if not path.exists():
            raise ConfigError(f"no such file: {path}")
        return read_csv(path)
    try:
        return parse_fn(spec)
    except (DomainError, ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e


def apply_thread_cap():
    """DUNKLKIT_THREADS caps BLAS/OpenMP pools (the library itself is
    single-threaded)."""
    n = os.environ.get("DUNKLKIT_THREADS")
    if not n:
        return None
    try:
        n = max(1, int(n))
    except ValueError:
        raise ConfigError(f"DUNKLKIT_THREADS must be an integer, got {n!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    try:
        from threadpoolctl import threadpool_limits
        return threadpool_limits(limits=n)
    except ImportError:
        return None


# ------------------------------------------------------------- output ----

class Writer:
    def __init__(self, args):
        self.args = args
        self.cfg = config_dict(args)
        self.hash = config_hash(self.cfg)
        self.dir = Path(args.out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def _header(self):
        yield f"# {CSV_TAG}"
        yield f"# command={self.args.command}"
        yield f"# config_hash={self.hash}"
        yield f"# config={json.dumps(self.cfg, sort_keys=True)}"

    def table(self, name, columns, rows, report: dict):
        report = {"schema": "dunklkit.report/1", "command": self.args.command,
                  "config": self.cfg, "config_hash": self.hash, **report}
        if self.args.format == "json":
            doc = dict(report, columns=list(columns), rows=[[_num(v) for v in r] for r in rows])
            path = self.dir / f"{name}.json"
            path.write_text(json.dumps(_jsonable(doc), indent=1, sort_keys=True) + "\n")
            self.files.append(path)
            return
        buf = io.StringIO()
        for line in self._header():
            buf.write(line + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(v) for v in r])
        path = self.dir / f"{name}.csv"
        path.write_text(buf.getvalue())
        side = self.dir / f"{name}.report.json"
        side.write_text(json.dumps(_jsonable(report), indent=1, sort_keys=True) + "\n")
        self.files += [path, side]


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _num(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _say(msg):
    print(msg, flush=True)


# ----------------------------------------------------------- commands ----

def _l2_norm(fn: Fn, k: float, dim: int = 1) -> float:
    from .dunkl_core import MultiplicityConfig
    from .numerics import QuadratureSpec, adaptive_integrate
    c = MultiplicityConfig(k).c_kappa
    lo, hi = fn.support if fn.support is not None else (-math.inf, math.inf)
    feats = tuple(p for p in fn.features() if lo < p < hi)
    sing = (0.0,) if lo < 0 < hi and k != int(k) else ()
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-11, singular_points=sing,
                          breakpoints=tuple(p for p in feats if p not in sing))
    r = adaptive_integrate(lambda x: np.abs(fn(x)) ** 2 * np.abs(x) ** (2 * k), lo, hi, spec)
    return math.sqrt(c * r.value) ** dim


def cmd_transform(args, out: Writer):
    from .transform import Grid, SampledFunction, forward_transform
    k = args.kappa
    f = resolve_fn(args, "gaussian")
    tol = args.tol or 1e-6
    if args.grid_L is not None:
        n = args.grid_n or 1025
        xi_grid = Grid.composite(k, L=args.grid_L, core=min(8.0, args.grid_L), n=n)
    elif isinstance(f, Fn) and f.name.startswith("P("):
        xi_grid = Grid.frequency(k, 40.0)
    else:
        xi_grid = None
    F = forward_transform(f, xi_grid, k)
    if isinstance(f, SampledFunction):
        nf = f.norm(2) ** args.dim
    else:
        nf = _l2_norm(f, k, args.dim)
    nF = F.norm(2) ** args.dim
    resid = abs(nF - nf) / nf
    report = {"grid": F.grid.describe(), "norm_f": nf, "norm_F": nF, "plancherel_residual": resid,
              "route": F.meta.get("route")}
    cols, rows = ["xi", "re", "im"], [[x, z.real, z.imag] for x, z in zip(F.grid.nodes, F.values)]
    checks = [("plancherel_residual", resid)]
    if isinstance(f, Fn) and f.name.startswith("P("):
        exact = np.exp(-args.x0 * np.abs(F.grid.nodes))
        err = float(np.max(np.abs(F.values - exact)))
        report["max_error_vs_exp"] = err
        checks.append(("max_error_vs_exp", err))
        cols.append("exact")
        rows = [r + [e] for r, e in zip(rows, exact)]
    out.table("transform", cols, rows, report)
    for name, v in checks:
        _say(f"{name} = {v:.3e} (tol {tol:g})")
        if not v <= tol:
            raise CheckFailed(f"{name} {v:.3e} exceeds tol {tol:g}")


def _points(args, default):
    return np.asarray(args.xs if args.xs else default, dtype=float)


def cmd_riesz(args, out: Writer):
    from .riesz import regularized_truncated_riesz, riesz_pv, truncated_riesz
    k = args.kappa
    f = resolve_fn(args, "odd_gaussian")
    xs = _points(args, np.linspace(-3, 3, 13) + 0.05)
    eps = args.eps
    if eps < 0:
        raise ConfigError("eps must be >= 0")
    regular = f.growth != "decay"       # bounded or growing: use the recentred R~
    vals = []
    for x in xs:
        if regular:
            vals.append(regularized_truncated_riesz(f, eps, float(x), k))
        elif eps == 0:
            vals.append(riesz_pv(f, float(x), k))
        else:
            vals.append(truncated_riesz(f, eps, float(x), k))
    kind = ("R~" if regular else "R") + ("" if eps == 0 else f"^{eps:g}")
    out.table("riesz", ["x", "value"], [[x, v] for x, v in zip(xs, vals)],
              {"operator": kind, "fn": f.name, "kappa": k})
    _say(f"{kind} {f.name}: {len(xs)} points written")


def cmd_poisson(args, out: Writer):
    from .poisson import cauchy_riemann_residual, poisson_field
    k = args.kappa
    f = resolve_fn(args, "gaussian")
    xs = _points(args, np.linspace(-3, 3, 13))
    x0 = np.full(len(xs), args.x0)
    fld = poisson_field(f, x0, xs, k)
    cr = [cauchy_riemann_residual(f, (args.x0, float(x)), k) for x in xs]
    worst = max(max(abs(a), abs(b)) for a, b in cr)
    rows = [[args.x0, x, fld["u"][i], fld["v"][i], fld["d0u"][i], fld["Du"][i], cr[i][0], cr[i][1]]
            for i, x in enumerate(xs)]
    out.table("poisson", ["x0", "x", "u", "Qf", "d0u", "Du", "cr_1", "cr_2"], rows,
              {"fn": f.name, "kappa": k, "max_cauchy_riemann_residual": worst})
    tol = args.tol or 1e-5 * max(1.0, 1.0 / args.x0)
    _say(f"max Cauchy-Riemann residual {worst:.3e} (tol {tol:g})")
    if not worst <= tol:
        raise CheckFailed(f"Cauchy-Riemann residual {worst:.3e} exceeds tol {tol:g}")


def _family(args):
    from .spaces import BallFamily
    return BallFamily.dyadic(L=args.grid_L or 2.0)


def _sequence(args, measure):
    """Evaluate ``measure(family)`` on the family and its refinements."""
    base = _family(args)
    reports = []
    for level in range(args.refine + 1):
        fam = base if level == 0 else base.refined(level)
        rep = measure(fam)
        reports.append(rep)
        _say(f"level {level}: {rep.kind} = {rep.value:.6g} ({len(fam.balls)} balls)")
    rows = [[i, r.family.get("id", "") if isinstance(r.family, dict) else "", len(r.per_ball),
             r.value, r.quadrature_error, r.worst[0], r.worst[1]] for i, r in enumerate(reports)]
    cols = ["level", "family", "balls", "value", "quadrature_error", "worst_center", "worst_radius"]
    return reports, cols, rows


def _maybe_riesz(args, f):
    if getattr(args, "riesz", False):
        from .riesz import riesz_image
        return riesz_image(f, args.kappa)
    return f


def cmd_bmo(args, out: Writer):
    from .spaces import bmo_norm, bmo_orbit_norm
    k = args.kappa
    f = _maybe_riesz(args, resolve_fn(args, "log-abs"))
    op = bmo_orbit_norm if args.orbit else bmo_norm
    reports, cols, rows = _sequence(args, lambda fam: op(f, fam, k))
    out.table("bmo", cols, rows, {"fn": f.name, "final": reports[-1].to_dict(),
                                  "values": [r.value for r in reports]})


def cmd_bmc(args, out: Writer):
    from .spaces import bmc_seminorm
    k = args.kappa
    f = _maybe_riesz(args, resolve_fn(args, "sign"))
    reports, cols, rows = _sequence(args, lambda fam: bmc_seminorm(f, fam, k))
    out.table("bmc", cols, rows, {"fn": f.name, "final": reports[-1].to_dict(),
                                  "values": [r.value for r in reports]})


def cmd_carleson(args, out: Writer):
    from .spaces import TentLattice, _field_route, carleson_norm, gradient_columns
    k = args.kappa
    if args.density == "x0":
        def nu(h, x):
            return np.where(h < 1.0, h, 0.0)
        label = "x0 1{x0<1}"
        fns_ = ()
    else:
        phi = resolve_fn(args, "sign")
        src, conj = _field_route(phi)
        label = f"x0 |grad u|^2 [{phi.name}]"
        fns_ = (phi, src)

        def nu(h, x):
            g = gradient_columns([src], h[:, 0], x[0], k, conjugate=conj)[0]
            return h * (g[0] ** 2 + g[1] ** 2)

    def measure(fam):
        return carleson_norm(nu, fam, k, TentLattice(fam, k, fns_))
    reports, cols, rows = _sequence(args, measure)
    out.table("carleson", cols, rows, {"density": label, "final": reports[-1].to_dict(),
                                       "values": [r.value for r in reports]})


def cmd_duality(args, out: Writer):
    from .spaces import clean_frequency, duality_residual, moment_free_gaussian
    k = args.kappa
    phi = resolve_fn(args, "sign")
    f = clean_frequency(moment_free_gaussian(k, args.parity), k)
    r = duality_residual(f, phi, k)
    tol = args.tol or 1e-3
    out.table("duality", ["lhs", "rhs", "rel", "tail_estimate"],
              [[r["lhs"], r["rhs"], r["rel"], r["tail_estimate"]]],
              {"phi": phi.name, "f": f"cleaned moment-free gaussian ({args.parity})", **r})
    _say(f"lhs {r['lhs']:.10g}  rhs {r['rhs']:.10g}  rel {r['rel']:.3e} (tol {tol:g})")
    if not r["rel"] <= tol:
        raise CheckFailed(f"duality residual {r['rel']:.3e} exceeds tol {tol:g}")


def cmd_phi0(args, out: Writer):
    from .riesz import phi0_example
    k = args.kappa
    xs = _points(args, [1.1, 1.01, 1.001])
    rows = []
    for x in xs:
        v, lb = phi0_example(float(x), k)
        rows.append([x, v, lb, v >= lb])
    out.table("phi0", ["x", "phi0", "lower_bound", "bound_holds"], rows, {"kappa": k})
    for r in rows:
        _say(f"x={r[0]:<8g} phi0={r[1]:.6f} lower={r[2]:.6f} {'ok' if r[3] else 'VIOLATED'}")
    if not all(r[3] for r in rows):
        raise CheckFailed("phi0 lower bound violated")


def cmd_verify(args, out: Writer):
    from .acceptance import run
    results = run(args.only, seed=args.seed, quick=args.quick, echo=lambda s: _say(s))
    rows = [[r.number, r.title, r.passed, r.note] for r in results]
    out.table("verify", ["criterion", "title", "passed", "note"], rows,
              {"results": [r.to_dict() for r in results], "quick": args.quick})
    n_ok = sum(r.passed for r in results)
    _say(f"{n_ok}/{len(results)} criteria passed")
    return EXIT_OK if n_ok == len(results) else EXIT_VERIFY


COMMANDS = {"transform": cmd_transform, "riesz": cmd_riesz, "poisson": cmd_poisson,
            "bmo": cmd_bmo, "bmc": cmd_bmc, "carleson": cmd_carleson,
            "duality": cmd_duality, "phi0": cmd_phi0, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:          # argparse exits 2 on bad usage, 0 on --help
        return int(e.code or 0)
    try:
        validate(args)
        limits = apply_thread_cap()
        out = Writer(args)
        code = COMMANDS[args.command](args, out) or EXIT_OK
        del limits
        return code
    except ConfigError as e:
        print(f"dunklkit: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailed as e:
        print(f"dunklkit: check failed: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except CONFIG_ERRORS as e:
        print(f"dunklkit: invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DunklkitError, ArithmeticError, FloatingPointError) as e:
        print(f"dunklkit: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
