"""Command-line interface: ``python -m lirkw <subcommand>``.

Every run that writes to ``--out`` also writes ``<out>.manifest``, a
``key=value`` file holding the full argument list; ``lirkw rerun <manifest>``
replays it and reproduces the output bytes.

Exit codes: 0 success, 1 check failed, 2 bad input, 3 non-finite state.
"""
from __future__ import annotations

import argparse
import csv
import io
import shlex
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .convergence import fit_order, run_sweep
from .errors import (DegenerateParameters, NonfiniteState, SingularFactor,
                     SingularStageSystem, TableauFormatError, UnknownProblem)
from .linop import AmfOperator, subset_expansion
from .problems import L_CONFIGS, build_problem
from .stability import log_grid, scan_to_csv, stability_scan
from .tableau import load, table1_type1, table2_type2
from .trees import (VERIFY_TOL, density, enumerate_trees, label_of, max_residual,
                    to_bracket, verify_order)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NONFINITE = 0, 1, 2, 3


class _InputError(Exception):
    pass


def _g(x) -> str:
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _pretty(header, rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join([fmt.format(*header)] + [fmt.format(*r) for r in rows]) + "\n"


def _table(args, header, rows) -> str:
    return _csv(header, rows) if args.format == "csv" else _pretty(header, rows)


def _tableau(args):
    name = args.tableau
    if name in ("table1", "table1-broken"):
        tb = table1_type1()
        if name == "table1-broken":
            tb = tb.replace(b=np.asarray(tb.b) * 1.1, name="table1-broken")
        return tb
    if name == "table2":
        return table2_type2(args.gamma, args.gamma54, args.a43, args.gamma43)
    try:
        return load(name)
    except OSError as exc:
        raise _InputError(f"cannot read tableau {name!r}: {exc}")


# -- subcommands -------------------------------------------------------------

def cmd_verify(args):
    tb = _tableau(args)
    mtype = args.type or int(tb.method_type)
    rows = verify_order(tb, mtype, args.order)
    table = [[r.label or "-", to_bracket(r.tree), r.tree.order, str(r.target), _g(r.value),
              _g(r.residual), "ok" if r.passed(VERIFY_TOL) else "FAIL"] for r in rows]
    text = _table(args, ["label", "tree", "rho", "target", "value", "residual", "status"], table)
    ok = all(r.passed(VERIFY_TOL) for r in rows)
    summary = (f"{tb.name} type {mtype} order {args.order}: {len(rows)} conditions, "
               f"max |residual| {max_residual(rows):.3e}, {'PASS' if ok else 'FAIL'}")
    return text, summary, EXIT_OK if ok else EXIT_FAIL


def cmd_trees(args):
    trees = enumerate_trees(args.family, args.order)
    table = []
    for t in trees:
        target = str(Fraction(1, density(t))) if t.is_meagre else "0"
        table.append([label_of(t) or "-", to_bracket(t), t.order, target])
    text = _table(args, ["label", "tree", "rho", "target"], table)
    return text, f"count {len(trees)}", EXIT_OK


def cmd_converge(args):
    tb = _tableau(args)
    mtype = args.type or int(tb.method_type)
    params = {}
    if args.problem == "adr2d":
        params = {"nx": args.nx, "ny": args.ny}
    problem = build_problem(args.problem, args.l_config, args.seed, args.tf, **params)
    n_list = [int(v) for v in args.n_list.split(",")]
    rows = run_sweep(problem, tb, n_list, mtype=mtype)
    slope = fit_order(rows, args.tail)
    table = [[r.n_steps, _g(r.h), _g(r.error), _g(r.local_slope)] for r in rows]
    text = _table(args, ["n_steps", "h", "error", "local_slope"], table)
    ok = abs(slope - args.expect) <= args.band
    summary = (f"{args.problem} {args.l_config} {tb.name} type {mtype}: fitted order "
               f"{slope:.4f} over {args.tail} smallest h (max-norm error at t={problem.tf:g}); "
               f"expected {args.expect} +/- {args.band}: {'PASS' if ok else 'FAIL'}")
    return text, summary, EXIT_OK if ok else EXIT_FAIL


def _grid(args):
    if args.points:
        return [float(v) for v in args.points.split(",")]
    try:
        lo, hi, per = (float(v) for v in args.grid.split(":"))
    except ValueError:
        raise _InputError(f"bad grid {args.grid!r}; expected LO:HI:PER_DECADE")
    return log_grid(lo, hi, int(per))


def cmd_stability(args):
    tb = _tableau(args)
    mtype = args.type or int(tb.method_type)
    rows = stability_scan(tb, mtype, _grid(args), args.config, args.c)
    if args.format == "csv":
        text = scan_to_csv(rows)
    else:
        text = _pretty(["h_lambda", "abs_R"], [[_g(z), _g(r)] for z, r in rows])
    z, r = rows[-1]
    return text, f"{len(rows)} points; |R({z:g})| = {r:.6e}", EXIT_OK


def cmd_amf_check(args):
    rng = np.random.default_rng(args.seed)
    parts = [rng.standard_normal((args.N, args.N)) for _ in range(args.R)]
    op = AmfOperator(parts)
    sigma = args.sigma
    scale = max(1.0, float(np.abs(subset_expansion(parts, sigma)).max()))
    rows = []
    ref = subset_expansion(parts, sigma)
    rows.append(["tilde_apply vs subset expansion",
                 float(np.abs(op.tilde_dense(sigma) - ref).max()) / scale])
    if args.R == 1:
        rows.append(["R=1 identity Lt = L1", float(np.abs(op.tilde_dense(sigma) - parts[0]).max())
                     / max(1.0, float(np.abs(parts[0]).max()))])
    if args.R == 2:
        adi = parts[0] + parts[1] - sigma * parts[0] @ parts[1]
        rows.append(["R=2 Lt = L1 + L2 - sigma L1 L2", float(np.abs(op.tilde_dense(sigma) - adi).max())
                     / max(1.0, float(np.abs(adi).max()))])
    rhs = rng.standard_normal(args.N)
    x = op.product_solve(sigma, rhs)
    rows.append(["product_solve round trip",
                 float(np.abs(op.product_apply(sigma, x) - rhs).max()) / max(1.0, np.abs(rhs).max())])
    ok = all(v <= args.tol for _, v in rows)
    text = _table(args, ["check", "relative_error"], [[k, _g(v)] for k, v in rows])
    return text, f"R={args.R} N={args.N} seed={args.seed}: {'PASS' if ok else 'FAIL'}", \
        EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------

def _common(p):
    p.add_argument("--out", help="write the table here (and a .manifest beside it)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "pretty"), default="csv")


def _tableau_args(p, default="table1"):
    p.add_argument("--tableau", default=default,
                   help="table1, table1-broken, table2 or a tableau file path")
    p.add_argument("--type", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--gamma54", type=float, default=-0.5)
    p.add_argument("--a43", type=float, default=0.3)
    p.add_argument("--gamma43", type=float, default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="lirkw", description="LIRK-W method toolkit")
    ap.add_argument("--version", action="version", version=f"lirkw {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify", help="check order conditions of a tableau")
    _tableau_args(p)
    p.add_argument("--order", type=int, default=3, choices=(1, 2, 3, 4))
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trees", help="list LW-trees of a family")
    p.add_argument("--family", default="LW1", choices=("T", "LW1", "LW2", "LW3"))
    p.add_argument("--order", type=int, default=3)
    _common(p)
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("converge", help="fixed-step convergence sweep")
    p.add_argument("--problem", default="brusselator",
                   choices=("adr2d", "brusselator", "vdpol-mild", "linear-split"))
    _tableau_args(p)
    p.add_argument("--l-config", default="exact-L", choices=L_CONFIGS)
    p.add_argument("--n-list", default="16,32,64,128,256,512,1024")
    p.add_argument("--tail", type=int, default=4)
    p.add_argument("--expect", type=float, default=3.0)
    p.add_argument("--band", type=float, default=0.25)
    p.add_argument("--tf", type=float, default=None)
    p.add_argument("--nx", type=int, default=24)
    p.add_argument("--ny", type=int, default=24)
    _common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("stability", help="scan |R(z)| along the negative real axis")
    _tableau_args(p, default="table2")
    p.add_argument("--config", default="exact", choices=("exact", "explicit", "fast"))
    p.add_argument("--c", type=float, default=1.0, help="scale of hL_i = c z^2 for 'fast'")
    p.add_argument("--grid", default="0:8:4", help="LO:HI:PER_DECADE exponents of -10^e")
    p.add_argument("--points", default=None, help="explicit comma-separated z values")
    _common(p)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("amf-check", help="compare Lt against its subset expansion")
    p.add_argument("--R", type=int, default=2)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--sigma", type=float, default=0.37)
    p.add_argument("--tol", type=float, default=1e-12)
    _common(p)
    p.set_defaults(func=cmd_amf_check)

    p = sub.add_parser("rerun", help="replay a manifest written next to an output")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="override the output path")
    p.set_defaults(func=None)
    return ap


# -- manifests ---------------------------------------------------------------

def write_manifest(path, argv, args):
    lines = [f"subcommand={args.subcommand}", f"version={__version__}",
             f"seed={getattr(args, 'seed', '')}", f"out={args.out}",
             f"argv={shlex.join(argv)}"]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_manifest(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line and not line.startswith("#"):
                key, _, value = line.partition("=")
                out[key] = value
    if "argv" not in out:
        raise _InputError(f"{path}: manifest has no argv entry")
    return out


def _replace_out(argv, out):
    argv = list(argv)
    if "--out" in argv:
        argv[argv.index("--out") + 1] = out
    else:
        argv += ["--out", out]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "rerun":
            man = read_manifest(args.manifest)
            inner = shlex.split(man["argv"])
            if args.out:
                inner = _replace_out(inner, args.out)
            return main(inner)
        text, summary, code = args.func(args)
    except NonfiniteState as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except (_InputError, TableauFormatError, UnknownProblem, DegenerateParameters,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularFactor, SingularStageSystem) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        write_manifest(args.out + ".manifest", argv, args)
    else:
        sys.stdout.write(text)
    print(summary, file=sys.stderr if args.out is None and args.format == "csv" else sys.stdout)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
