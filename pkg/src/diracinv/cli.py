"""Command-line interface for the spectral-problem pipeline.

Subcommands: free, forward, inverse, check, roundtrip, accelerant, krein,
sign-check.  Exit codes: 0 success, 1 invalid input, 2 numerical failure;
failures emit a one-line JSON error record on stderr.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import accelerant as acc
from . import fileio, krein, matcore, pipeline
from .errors import InputError, NumericalError
from .reduction import resolve_sign_convention

__all__ = ["main"]


def _limit_threads(n):
    if n is None:
        return
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=n)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _params(args):
    return pipeline.InverseParams(m_max=args.m_max, n_grid=args.grid,
                                  k_tail=args.k_tail, c5_tol=args.c5_tol)


def _cmd_free(args):
    U = fileio.load_unitary(args.unitary)
    dec = matcore.unitary_eig(U)
    m_span = args.periods * dec.s
    fs = acc.free_spectrum(dec, (-m_span, m_span))
    print(f"# free spectrum, s={dec.s}, gammas={np.round(dec.gammas, 12).tolist()}")
    print(f"{'m':>6} {'zeta':>22} {'rank':>4}")
    rows = []
    for m, z, p in zip(fs.ms, fs.zetas, fs.projectors):
        rank = int(round(np.trace(p).real))
        print(f"{m:6d} {z:22.15g} {rank:4d}")
        rows.append((int(m), float(z), rank))
    if args.emit_plots:
        _write_csv(args.emit_plots, ["m", "zeta", "rank"], rows)
    return 0


def _cmd_forward(args):
    q = fileio.load_potential(args.potential)
    U = fileio.load_unitary(args.unitary)
    sd = pipeline.forward_T(q, U, m_max=args.window, oversample=args.oversample,
                            points_per_wave=args.points_per_wave)
    fileio.save_spectral_data(sd, args.out)
    print(f"wrote {len(sd)} eigenvalues to {args.out}")
    if args.emit_plots:
        _write_csv(args.emit_plots, ["index", "lambda", "mult"],
                   [(j, float(d.lam), int(d.mult)) for j, d in enumerate(sd.data)])
    return 0


def _cmd_inverse(args):
    sd = fileio.load_spectral_data(args.data)
    q, U, report = pipeline.inverse_T(sd, _params(args))
    os.makedirs(args.out, exist_ok=True)
    fileio.save_potential(q, os.path.join(args.out, "q.json"))
    fileio.save_unitary(U, os.path.join(args.out, "U.json"))
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        json.dump({"c1": report.c1, "c2": report.c2, "c3": report.c3,
                   "c4": report.c4, "c5": report.c5}, fh, default=float)
    print(f"reconstruction written to {args.out} "
          f"(conditions: {report.summary()})")
    if args.emit_plots:
        norms = np.linalg.norm(q.samples, ord=2, axis=(1, 2))
        _write_csv(os.path.join(args.out, "q_abs.csv"), ["x", "abs_q"],
                   list(zip(q.grid.tolist(), norms.tolist())))
    return 0


def _cmd_check(args):
    sd = fileio.load_spectral_data(args.data)
    report = pipeline.check_conditions(sd, _params(args))
    doc = {"verdicts": report.summary(),
           "c1": report.c1, "c2": report.c2, "c3": report.c3,
           "c4": report.c4, "c5": report.c5}
    json.dump(doc, sys.stdout, default=float)
    print()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, default=float)
    return 0


def _cmd_roundtrip(args):
    q = fileio.load_potential(args.potential)
    U = fileio.load_unitary(args.unitary)
    m_list = [int(v) for v in args.m_list.split(",")] if args.m_list else [args.m_max]
    rows = []
    out_doc = {}
    for m in m_list:
        params = pipeline.InverseParams(m_max=m, n_grid=args.grid,
                                        k_tail=args.k_tail, c5_tol=args.c5_tol)
        metrics = pipeline.roundtrip(q, U, params)
        rows.append((m, metrics["q_err_rel_L2"], metrics["U_err_opnorm"],
                     metrics["spec_err_max"]))
        out_doc[str(m)] = {k: v for k, v in metrics.items() if k != "report"}
        print(f"M={m}: q_err={metrics['q_err_rel_L2']:.4e} "
              f"U_err={metrics['U_err_opnorm']:.4e} "
              f"spec_err={metrics['spec_err_max']:.4e}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out_doc, fh, default=float)
    if args.emit_plots:
        _write_csv(args.emit_plots, ["m_max", "q_err_rel_L2", "U_err_opnorm", "spec_err_max"],
                   rows)
    return 0


def _cmd_accelerant(args):
    sd = fileio.load_spectral_data(args.data)
    if args.unitary:
        U = fileio.load_unitary(args.unitary)
    else:
        U = pipeline.estimate_U(sd, args.k_tail)
    H = acc.accelerant_from_measure(sd, U, n_half=args.grid, m_max=args.m_max,
                                    fejer=not args.no_damping)
    fileio.save_accelerant(H, args.out)
    print(f"accelerant written to {args.out} "
          f"(grid norm {H.norm_inf():.6g}, symmetry residual {H.sym_residual:.3e})")
    return 0


def _cmd_krein(args):
    H = fileio.load_accelerant(args.accelerant)
    V = krein.theta(H, n=args.grid)
    fileio.save_spotential(V, args.out)
    print(f"potential written to {args.out}")
    return 0


def _cmd_sign_check(args):
    convention = resolve_sign_convention(args.r, n_unitaries=args.trials,
                                         seed=args.seed, use_cache=False)
    print(f"sigma = {convention.sigma:+d}")
    return 0


def _build_parser():
    p = argparse.ArgumentParser(prog="diracinv",
                                description="Direct and inverse spectral problems "
                                            "for interval Dirac operators")
    p.add_argument("--threads", type=int, default=None,
                   help="bound intra-stage BLAS parallelism")
    sub = p.add_subparsers(dest="command", required=True)

    def common_inverse(sp):
        sp.add_argument("--m-max", type=int, default=40, help="paired windows per side")
        sp.add_argument("--grid", type=int, default=256, help="triangular-solver grid intervals")
        sp.add_argument("--k-tail", type=int, default=5, help="tail periods for the unitary estimate")
        sp.add_argument("--c5-tol", type=float, default=1e-3,
                        help="diagonal-block residual gate")

    sp = sub.add_parser("free", help="free spectrum of a boundary unitary")
    sp.add_argument("--unitary", required=True)
    sp.add_argument("--periods", type=int, default=4)
    sp.add_argument("--emit-plots", metavar="CSV")
    sp.set_defaults(fn=_cmd_free)

    sp = sub.add_parser("forward", help="spectral data of an interval operator")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--unitary", required=True)
    sp.add_argument("--window", type=int, default=40, help="paired windows per side")
    sp.add_argument("--oversample", type=int, default=2)
    sp.add_argument("--points-per-wave", type=int, default=24)
    sp.add_argument("--out", required=True)
    sp.add_argument("--emit-plots", metavar="CSV")
    sp.set_defaults(fn=_cmd_forward)

    sp = sub.add_parser("inverse", help="reconstruct potential and boundary unitary")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True, help="output directory")
    common_inverse(sp)
    sp.add_argument("--emit-plots", action="store_true")
    sp.set_defaults(fn=_cmd_inverse)

    sp = sub.add_parser("check", help="admissibility conditions of spectral data")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out")
    common_inverse(sp)
    sp.set_defaults(fn=_cmd_check)

    sp = sub.add_parser("roundtrip", help="forward + inverse + re-forward metrics")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--unitary", required=True)
    common_inverse(sp)
    sp.add_argument("--m-list", help="comma-separated window counts to sweep")
    sp.add_argument("--out")
    sp.add_argument("--emit-plots", metavar="CSV")
    sp.set_defaults(fn=_cmd_roundtrip)

    sp = sub.add_parser("accelerant", help="spectral data -> accelerant kernel")
    sp.add_argument("--data", required=True)
    sp.add_argument("--unitary", help="boundary unitary (estimated from data when absent)")
    sp.add_argument("--m-max", type=int, default=40)
    sp.add_argument("--grid", type=int, default=256)
    sp.add_argument("--k-tail", type=int, default=5)
    sp.add_argument("--no-damping", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_accelerant)

    sp = sub.add_parser("krein", help="accelerant -> doubled potential")
    sp.add_argument("--accelerant", required=True)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_krein)

    sp = sub.add_parser("sign-check", help="resolve the boundary-unitary sign convention")
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--trials", type=int, default=3)
    sp.add_argument("--seed", type=int, default=1905)
    sp.set_defaults(fn=_cmd_sign_check)
    return p


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    _limit_threads(args.threads)
    try:
        return args.fn(args)
    except (InputError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except NumericalError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
