"""Command-line entry point ``hyperbm``.

Exit status: 0 when every check passes, 1 when a verification fails,
2 for invalid arguments.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import __version__, _backend
from . import complex_space as cs
from . import quat_space as qs
from . import real_space as rs
from . import verify
from .core import ConfigError, SimConfig
from .harness import atomic_write_text, write_report
from .special import DomainError

SPACES = ("real", "complex", "quaternionic")
CLT_T = {"real": 50.0, "complex": 50.0, "quaternionic": 30.0}


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common_sim(p, samples=10_000, dt=verify.DT):
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--dt", type=float, default=dt)
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: $HYPERBM_WORKERS or 1)")


def build_parser():
    ap = argparse.ArgumentParser(prog="hyperbm", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="dump trajectories or terminal points as CSV")
    p.add_argument("--space", choices=SPACES, default="real")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--terminal", action="store_true", help="only the time-T points")
    p.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    _common_sim(p, samples=1)

    p = sub.add_parser("verify-clt", help="radial central limit theorem")
    p.add_argument("--space", choices=SPACES, default="real")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", type=float, default=None, help="horizon (default 50, quaternionic 30)")
    p.add_argument("--out", default="verify-clt.json")
    _common_sim(p)

    p = sub.add_parser("verify-limit-law", help="boundary limit laws")
    p.add_argument("--space", choices=SPACES, default="real")
    p.add_argument("--n", type=int, default=None, help="default 1 (real) or 2")
    p.add_argument("--t", type=float, default=None, help="default 30 / 20 / 10 by space")
    p.add_argument("--out", default="verify-limit-law.json")
    _common_sim(p)

    p = sub.add_parser("verify-fourier", help="Fourier identities, CF consistency, hitting law")
    p.add_argument("--mc-points", type=int, default=1_000_000)
    p.add_argument("--out", default="verify-fourier.json")
    _common_sim(p)

    p = sub.add_parser("verify-appendix", help="perpetual integrals and their transforms")
    p.add_argument("--joint-samples", type=int, default=100_000)
    p.add_argument("--out", default="verify-appendix.json")
    _common_sim(p)

    p = sub.add_parser("verify-invariants", help="skew blocks, kernel normalisations, determinism")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--mc-points", type=int, default=1_000_000)
    p.add_argument("--out", default="verify-invariants.json")

    p = sub.add_parser("kernel-eval", help="tabulate a Poisson kernel")
    p.add_argument("--space", choices=SPACES, default="real")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--y", type=float, default=1.0, help="height of the base point")
    p.add_argument("--base", type=_floats, default=None,
                   help="boundary coordinates of the base point (default 0)")
    p.add_argument("--xi", type=_floats, action="append", default=None,
                   help="boundary point, comma separated; repeatable")
    p.add_argument("--grid", type=_floats, default=None, metavar="LO,HI,COUNT",
                   help="tensor grid over every boundary coordinate")
    p.add_argument("--out", default="-")
    return ap


def _config(args, horizon):
    return SimConfig(int(args.seed), float(args.dt), float(horizon), int(args.samples), args.workers)


def manifest(args, config=None, **extra):
    m = {"command": args.command, "version": __version__, "backend": _backend.backend_name(),
         "args": {k: v for k, v in vars(args).items() if k != "command"}}
    if config is not None:
        m["config"] = {"seed": config.seed, "dt": config.dt, "horizon": config.horizon,
                       "n_samples": config.n_samples, "n_workers": config.n_workers,
                       "n_steps": config.n_steps, "step": config.step}
    m.update(extra)
    return m


def _finish(args, reports, man, out=sys.stdout):
    for r in reports:
        print(r.line(), file=out)
    write_report(args.out, reports, man)
    ok = all(r.passed for r in reports)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in reports)}/{len(reports)} -> {args.out}", file=out)
    return 0 if ok else 1


def _csv_text(man, header, rows):
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(format(float(v), ".17g") if not isinstance(v, (int, np.integer)) else str(v)
                           for v in row) + "\n")
    return buf.getvalue()


def _emit(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _check_n(space, n):
    if space == "real" and n < 1 or space != "real" and n < 2:
        raise UsageError(f"n = {n} is not valid for the {space} space")


def cmd_simulate(args):
    _check_n(args.space, args.n)
    cfg = _config(args, args.t)
    z0 = verify.default_point(args.space, args.n)
    coords = _coord_names(args.space, args.n)
    man = manifest(args, cfg, space=args.space, n=args.n, outputs=[args.out])
    if args.terminal:
        term = verify.terminal(args.space, z0, cfg, args.stream)
        bd = verify.terminal_boundary(args.space, term)
        rows = [[i, cfg.horizon, *bd[i], term.log_y[i]] for i in range(cfg.n_samples)]
    else:
        if args.space == "real":
            tr = rs.sample_real_bm(z0, cfg, args.stream)
            bd = tr.x
        elif args.space == "complex":
            tr = cs.sample_complex_bm(z0, cfg, args.stream)
            bd = np.concatenate([tr.x1[..., None], tr.tilde], axis=-1)
        else:
            tr = qs.sample_quat_bm(z0, cfg, args.stream)
            bd = np.concatenate([tr.head, tr.tilde], axis=-1)
        rows = [[i, tr.t[j], *bd[i, j], tr.log_y[i, j]]
                for i in range(cfg.n_samples) for j in range(tr.t.size)]
    _emit(args.out, _csv_text(man, ["sample", "t", *coords, "log_y"], rows))
    return 0


def _coord_names(space, n):
    if space == "real":
        return [f"x{k + 1}" for k in range(n)]
    if space == "complex":
        return ["x1"] + [f"{c}{k}" for k in range(2, n + 1) for c in ("x", "y")]
    return ["x1", "xn1", "yn1"] + [f"th{k}_{c}" for k in range(2, n + 1) for c in range(4)]


def cmd_verify_clt(args):
    _check_n(args.space, args.n)
    t = CLT_T[args.space] if args.t is None else args.t
    cfg = _config(args, t)
    reports = verify.clt_campaign(args.space, args.n, t, args.dt, args.samples, args.seed, args.workers)
    return _finish(args, reports, manifest(args, cfg, space=args.space, n=args.n, outputs=[args.out]))


def cmd_verify_limit_law(args):
    n = args.n if args.n is not None else (1 if args.space == "real" else 2)
    _check_n(args.space, n)
    t = args.t if args.t is not None else {"real": 30.0, "complex": 20.0, "quaternionic": 10.0}[args.space]
    cfg = _config(args, t)
    reports = verify.limit_law_campaign(args.space, n, t, args.dt, args.samples, args.seed, args.workers)
    return _finish(args, reports, manifest(args, cfg, space=args.space, n=n, outputs=[args.out]))


def cmd_verify_fourier(args):
    cfg = _config(args, 40.0)
    reports = verify.fourier_campaign(args.seed, args.dt, args.samples, args.workers, args.mc_points)
    return _finish(args, reports, manifest(args, cfg, outputs=[args.out]))


def cmd_verify_appendix(args):
    cfg = _config(args, 15.0)
    reports = verify.appendix_campaign(args.seed, args.dt, args.samples, args.joint_samples,
                                       args.samples, args.workers)
    return _finish(args, reports, manifest(args, cfg, outputs=[args.out]))


def cmd_verify_invariants(args):
    reports = (verify.skew_campaign(seed=args.seed)
               + verify.normalization_campaign(args.seed, args.mc_points)
               + verify.determinism_campaign(args.seed))
    return _finish(args, reports, manifest(args, outputs=[args.out]))


def cmd_kernel_eval(args):
    _check_n(args.space, args.n)
    dim = {"real": args.n, "complex": 2 * args.n - 1, "quaternionic": 4 * args.n - 1}[args.space]
    base = np.zeros(dim) if args.base is None else np.asarray(args.base, dtype=float)
    if base.size != dim:
        raise UsageError(f"--base needs {dim} coordinates")
    pts = []
    if args.xi:
        pts += [np.asarray(x, dtype=float) for x in args.xi]
    if args.grid:
        if len(args.grid) != 3 or args.grid[2] < 1 or args.grid[2] != int(args.grid[2]):
            raise UsageError("--grid takes LO,HI,COUNT")
        if int(args.grid[2]) ** dim > 10**6:
            raise UsageError("grid larger than 1e6 points")
        axis = np.linspace(args.grid[0], args.grid[1], int(args.grid[2]))
        mesh = np.meshgrid(*([axis] * dim), indexing="ij")
        pts += list(np.stack([m.ravel() for m in mesh], axis=-1))
    if not pts:
        raise UsageError("give --xi and/or --grid")
    if any(p.size != dim for p in pts):
        raise UsageError(f"each boundary point needs {dim} coordinates")
    xs = np.stack(pts)
    if args.space == "real":
        vals = rs.poisson_kernel_real(args.n, xs - base, args.y)
    elif args.space == "complex":
        z0 = cs.ComplexPoint(base[0], args.y, base[1:])
        vals = cs.poisson_kernel_complex(args.n, xs[:, 0], xs[:, 1:], z0)
    else:
        z0 = qs.QuatPoint(base[0], args.y, base[1], base[2], base[3:])
        vals = qs.poisson_kernel_quat(args.n, xs, z0)
    man = manifest(args, space=args.space, n=args.n, outputs=[args.out])
    rows = [[*x, v] for x, v in zip(xs, np.atleast_1d(vals))]
    _emit(args.out, _csv_text(man, [*_coord_names(args.space, args.n), "density"], rows))
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "verify-clt": cmd_verify_clt,
    "verify-limit-law": cmd_verify_limit_law,
    "verify-fourier": cmd_verify_fourier,
    "verify-appendix": cmd_verify_appendix,
    "verify-invariants": cmd_verify_invariants,
    "kernel-eval": cmd_kernel_eval,
}


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, DomainError, ValueError) as e:
        parser.print_usage(sys.stderr)
        print(f"hyperbm {args.command}: error: {e}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
