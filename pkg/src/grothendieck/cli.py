"""Command line entry point: `groth <subcommand> ...`.

Exit codes: 0 ok, 2 usage, 3 parameter regime, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .core import GrothendieckError, Partition, UsageError

THREADS_ENV = "GROTH_THREADS"
# let values such as "-1/4" through as arguments rather than option flags
_NEGATIVE = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")


# ---------------------------------------------------------------- argument types

def rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


rational_arg.__name__ = "rational"


def rational_list(text: str) -> tuple[Fraction, ...]:
    return tuple(rational_arg(t) for t in text.split(",") if t.strip())


rational_list.__name__ = "rational list"


def int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated integer list: {text!r}") from None


int_list.__name__ = "integer list"


def fstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _add_model(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--n", type=int, required=False, help="number of variables N")
    g.add_argument("--x", type=rational_arg, help="homogeneous x")
    g.add_argument("--y", type=rational_arg, help="homogeneous y")
    g.add_argument("--beta", type=rational_arg, help="homogeneous beta")
    g.add_argument("--xs", type=rational_list, help="x_1..x_N, comma separated")
    g.add_argument("--ys", type=rational_list, help="y_1..y_N")
    g.add_argument("--betas", type=rational_list, help="beta_1..beta_{N-1}")


def _model(args, force_beta: Fraction | None = None):
    from .measures import GrothendieckModel
    if args.xs is not None:
        if args.ys is None:
            raise UsageError("--xs needs --ys (and --betas when N > 1)")
        betas = args.betas or ()
        if force_beta is not None:
            betas = (force_beta,) * (len(args.xs) - 1)
        return GrothendieckModel.from_vectors(args.xs, args.ys, betas)
    missing = [f for f in ("n", "x", "y") if getattr(args, f) is None]
    if args.beta is None and force_beta is None:
        missing.append("beta")
    if missing:
        raise UsageError("missing " + ", ".join("--" + m for m in missing))
    beta = force_beta if force_beta is not None else args.beta
    return GrothendieckModel.homogeneous(args.n, args.x, args.y, beta)


def _threads(args) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return max(1, args.threads)


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in rows:
            out.write(json.dumps(r) + "\n")
    else:
        w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


# ---------------------------------------------------------------- commands

def cmd_weight(args) -> int:
    from .measures import grothendieck_weight, schur_weight
    M = _model(args, Fraction(0) if args.schur else None)
    lam = Partition(args.lambda_, M.N)
    w = schur_weight(lam, M) if args.schur else grothendieck_weight(lam, M)
    _emit([{"lambda": ",".join(map(str, lam.parts)), "weight": fstr(w), "decimal": float(w)}],
          args.format, sys.stdout)
    return 0


def cmd_normalize_check(args) -> int:
    from .measures import cauchy_normalization, normalization, truncated_total
    M = _model(args)
    Z = normalization(M.ensemble())
    total, cap = truncated_total(M, tol=args.tol)
    row = {"N": M.N, "normalization": fstr(Z), "truncated_total": float(total),
           "deficit": float(1 - total), "max_part": cap}
    if len(set(M.xs)) == M.N and len(set(M.ys)) == M.N:
        closed = cauchy_normalization(M)
        row["closed_form"] = fstr(closed)
        row["match"] = closed == Z
    _emit([row], args.format, sys.stdout)
    return 0


def cmd_correlations(args) -> int:
    from .schur2d import correlation_function
    M = _model(args)
    E = M.ensemble()
    rows = []
    for pts in args.points:
        rho = correlation_function(E, list(pts))
        rows.append({"points": ",".join(map(str, pts)), "rho": fstr(rho), "decimal": float(rho)})
    _emit(rows, args.format, sys.stdout)
    return 0


def cmd_kernel(args) -> int:
    from .schur2d import KernelQuery, contour_kernel, em_kernel
    M = _model(args)
    q = KernelQuery(args.a, args.t, args.b, args.s)
    row = {"a": q.a, "t": q.t, "b": q.b, "s": q.s}
    if args.method == "em":
        val = em_kernel(M.ensemble(), q)
        row.update(re=float(val), im=0.0, exact=fstr(val))
    else:
        val = contour_kernel(M, q, nodes=args.nodes)
        row.update(re=val.real, im=val.imag)
    sys.stdout.write(json.dumps(row) + "\n")
    return 0


def _read_matrix(path: str) -> list[list]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([Fraction(v.strip()) for v in rec])
            except ValueError:
                rows.append([complex(v.strip().replace(" ", "")) for v in rec])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise UsageError(f"{path}: expected a square matrix")
    return rows


def cmd_nanson(args) -> int:
    from .pmap import (cluster_from_minors, determinantality_witness, nanson4, nanson_n,
                       principal_minors, witness_scale)
    if args.matrix:
        A = _read_matrix(args.matrix)
        if len(A) != args.order:
            raise UsageError(f"--order {args.order} but the matrix is {len(A)} x {len(A)}")
        T = cluster_from_minors(principal_minors(A))
        if args.order == 4:
            v = nanson4(T)
            row = {"order": 4, "value": fstr(v) if isinstance(v, Fraction) else str(v),
                   "abs": abs(complex(v))}
        else:
            r = nanson_n(T)
            row = {"order": args.order, "re": r.value.real, "im": r.value.imag,
                   "relative": r.relative, "closest": r.closest, "factors": r.factors}
        sys.stdout.write(json.dumps(row) + "\n")
        return 0
    M = _model(args)
    raw = determinantality_witness(M, args.points)
    scale = witness_scale(M.betas[0]) if M.N > 1 and len(set(M.betas)) == 1 else None
    row = {"points": ",".join(map(str, args.points)), "raw": fstr(raw), "raw_decimal": float(raw)}
    if scale is not None:
        row["scaled"] = fstr(scale * raw)
        row["scaled_decimal"] = float(scale * raw)
    sys.stdout.write(json.dumps(row) + "\n")
    return 0


def _one_sample(job):
    from .measures import GrothendieckModel
    from .sampler import RngSpec, sample_grothendieck
    n, x, y, beta, seed, stream = job
    lam = sample_grothendieck(GrothendieckModel.homogeneous(n, x, y, beta), RngSpec(seed, stream))
    return lam.parts


def cmd_sample(args) -> int:
    from .sampler import _check
    M = _model(args)
    _check(M)  # regime errors before any worker starts
    jobs = [(M.N, M.xs[0], M.ys[0], M.betas[0] if M.N > 1 else Fraction(0), args.seed, args.first_stream + k)
            for k in range(args.count)]
    workers = _threads(args)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_one_sample, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_one_sample(j) for j in jobs]
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for job, parts in zip(jobs, results):
            out.write(json.dumps({"seed": args.seed, "stream": job[5], "lambda": list(parts),
                                  "size": sum(parts)}) + "\n")
    finally:
        if args.out:
            out.close()
    if args.svg:
        import numpy as np

        from .plotting import plot_shape
        curve = None
        if args.shape_csv:
            with open(args.shape_csv, newline="") as fh:
                curve = np.array([[float(r["u"]), float(r["W"])] for r in csv.DictReader(fh)])
        shown = [(Partition(parts, M.N), M.N) for parts in results[:args.overlay]]
        plot_shape(None, args.svg, samples=shown, curve=curve,
                   title=f"N={M.N} x={fstr(M.xs[0])} y={fstr(M.ys[0])} beta={fstr(jobs[0][3])}")
    return 0


def _asym(args):
    from .limitshape import AsymptoticParams
    return AsymptoticParams(float(args.x), float(args.y), float(args.beta),
                            allow_positive_beta=args.allow_positive_beta)


def cmd_limit_shape(args) -> int:
    import numpy as np

    from .limitshape import limit_shape, shape_W, vkls_deviation
    from .plotting import plot_boundary, plot_height, plot_shape
    p = _asym(args)
    tag = "CONJECTURAL" if p.conjectural else "theorem"
    workers = _threads(args)
    sg = limit_shape(p, tau_steps=args.tau_steps, xi_points=args.xi_points, step=args.xi_step,
                     workers=workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    W = shape_W(sg)
    with open(out / "shape.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "L", "u", "W", "tag"])
        for t, l, (u, v) in zip(sg.tau_grid, sg.L, W):
            w.writerow([repr(float(t)), repr(float(l)), repr(u), repr(v), tag])
    with open(out / "boundary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z", "xi", "tau"])
        for b in sg.boundary:
            w.writerow([repr(b.z), repr(b.xi), repr(b.tau)])
    title = f"x={args.x} y={args.y} beta={args.beta}" + (" CONJECTURAL" if p.conjectural else "")
    samples = []
    if args.sample_n:
        from .measures import GrothendieckModel
        from .sampler import RngSpec, sample_grothendieck
        M = GrothendieckModel.homogeneous(args.sample_n, args.x, args.y, args.beta)
        samples = [(sample_grothendieck(M, RngSpec(args.seed)), args.sample_n)]
    plot_shape(sg, out / "shape.svg", samples=samples, title=title)
    plot_boundary(sg, out / "boundary.svg", title=title)
    plot_height(sg, out / "height.svg", title=title)
    summary = {"tag": tag, "rows": len(sg.tau_grid), "xi_max": sg.xi_max,
               "L0": float(sg.L[0]), "undefined_rows": int(np.isnan(sg.L).sum()),
               "h0_min": float(sg.H[:, 0].min()), "h0_max": float(sg.H[:, 0].max()),
               "files": sorted(str(f) for f in out.iterdir())}
    if args.vkls:
        summary["vkls_deviation"] = vkls_deviation(p, workers=workers)[0]
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


def cmd_frozen_boundary(args) -> int:
    import numpy as np

    from .limitshape import cusp_point, default_z_grid, frozen_boundary
    p = _asym(args)
    zs = np.linspace(args.z_min, args.z_max, args.z_points) if args.z_min is not None else default_z_grid(p, args.z_points)
    pts = frozen_boundary(p, zs)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["z", "xi", "tau"])
        for b in pts:
            w.writerow([repr(b.z), repr(b.xi), repr(b.tau)])
    finally:
        if args.out:
            out.close()
    xi, tau, z = cusp_point(p)
    sys.stderr.write(json.dumps({"points": len(pts), "cusp": {"xi": xi, "tau": tau, "z": z}}) + "\n")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="groth", description="Grothendieck random partitions.")
    ap.add_argument("--threads", type=int, default=1, help=f"worker count (env {THREADS_ENV} overrides)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weight", help="exact probability of one partition")
    _add_model(p)
    p.add_argument("--lambda", dest="lambda_", type=int_list, required=True)
    p.add_argument("--schur", action="store_true", help="beta = 0 Schur measure")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("normalize-check", help="determinant normalization vs closed form and truncated sum")
    _add_model(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_normalize_check)

    p = sub.add_parser("correlations", help="exact correlation functions of the particles l_j")
    _add_model(p)
    p.add_argument("--points", type=int_list, action="append", required=True,
                   help="comma separated positions; repeat for several sets")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("kernel", help="two-dimensional correlation kernel K(a,t; b,s)")
    _add_model(p)
    for f in ("a", "t", "b", "s"):
        p.add_argument(f"--{f}", type=int, required=True)
    p.add_argument("--method", choices=("em", "contour"), default="em")
    p.add_argument("--nodes", type=int, default=1024)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("nanson", help="determinantality witness or Nanson test on a matrix")
    _add_model(p)
    p.add_argument("--points", type=int_list, default=(0, 1, 2, 3))
    p.add_argument("--order", type=int, choices=(4, 5, 6, 7), default=4)
    p.add_argument("--matrix", help="CSV file with a square matrix (rationals or complex)")
    p.set_defaults(func=cmd_nanson)

    p = sub.add_parser("sample", help="exact samples, newline delimited JSON")
    _add_model(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--first-stream", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--svg", help="write a profile overlay here")
    p.add_argument("--overlay", type=int, default=1, help="samples drawn in the SVG")
    p.add_argument("--shape-csv", help="limit-shape CSV (from limit-shape) to overlay")
    p.set_defaults(func=cmd_sample)

    for name, func, helptext in (("limit-shape", cmd_limit_shape, "limit shape CSV and SVG figures"),
                                 ("frozen-boundary", cmd_frozen_boundary, "frozen boundary curve CSV")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--x", type=rational_arg, required=True)
        p.add_argument("--y", type=rational_arg, required=True)
        p.add_argument("--beta", type=rational_arg, required=True)
        p.add_argument("--allow-positive-beta", action="store_true")
        p.set_defaults(func=func)
        if name == "limit-shape":
            p.add_argument("--tau-steps", type=int, default=200)
            p.add_argument("--xi-points", type=int, default=400)
            p.add_argument("--xi-step", type=float, default=None)
            p.add_argument("--out-dir", default="limit_shape_out")
            p.add_argument("--sample-n", type=int, default=0, help="overlay one exact sample of this size")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--vkls", action="store_true", help="also report the scaled deviation from Omega")
        else:
            p.add_argument("--z-points", type=int, default=4000)
            p.add_argument("--z-min", type=float)
            p.add_argument("--z-max", type=float)
            p.add_argument("--out")
    for parser in [ap, *sub.choices.values()]:
        parser._negative_number_matcher = _NEGATIVE
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except GrothendieckError as e:
        sys.stderr.write(f"groth {args.command}: {type(e).__name__}: {e}\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(f"groth {args.command}: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
