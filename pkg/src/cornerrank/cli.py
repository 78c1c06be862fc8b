"""Command-line entry point: ``cornerrank {construct,verify,chain,shift} ...``.

Exit codes: 0 certified, 1 checks ran but did not certify, 2 invalid target,
3 ambiguous numerics, 4 I/O or format error.
"""

import argparse
import csv
import io as _stdio
import os
import sys

import numpy as np

from . import __version__
from .chain import chain_from_projection, extract_cyclic_vector, verify_shifts_forward
from .construct import GammaSpec, TargetRanks, build_unequal_corners, compose_target_ranks, perturb_and_rebuild, search_m2
from .corners import (
    Witness,
    corner_identity_check,
    cr_sample_test,
    decompose,
    normality_defect,
    spectrum_line_circle_classify,
)
from .errors import (
    AmbiguousChain,
    AmbiguousRank,
    CornerRankError,
    FormatError,
    InvalidTarget,
    NotCyclicWitness,
    NotNormal,
    SearchExhausted,
)
from .io import dumps_report, read_cmtx, write_cmtx, write_text_atomic
from .linalg import ToleranceProfile, haar_random_projection
from . import shiftlab

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_AMBIGUOUS = 3
EXIT_IO = 4


def _tol(args):
    return ToleranceProfile(
        rank_rel_tol=args.rank_tol,
        normality_rel_tol=args.normality_tol,
        gap_factor=args.gap_factor,
        eig_distinct_rel_tol=args.eig_tol,
    )


def _emit(args, report, matrices=None, rows=None):
    text = dumps_report(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        name = args.report_name or getattr(args, "default_report", "report.json")
        write_text_atomic(os.path.join(args.out, name), text)
        for name, M in (matrices or {}).items():
            write_cmtx(os.path.join(args.out, name), M)
    else:
        sys.stdout.write(text)
    if rows and getattr(args, "csv", None):
        buf = _stdio.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        write_text_atomic(args.csv, buf.getvalue())


def cmd_construct(args):
    tol = _tol(args)
    if args.m is not None:
        cert = build_unequal_corners(GammaSpec(args.m, args.gamma), tol, seed=args.seed, budget=args.budget)
        if args.perturb is not None:
            cert = perturb_and_rebuild(cert, args.perturb, seed=args.seed, tol=tol)
    elif args.search_m2:
        cert = search_m2(seed=args.seed, budget=args.budget, tol=tol)
    else:
        if None in (args.n, args.j, args.k):
            raise InvalidTarget("construct needs --m, --search-m2 or all of --n --j --k")
        cert = compose_target_ranks(TargetRanks(args.n, args.j, args.k), tol, seed=args.seed)
    report = cert.to_dict()
    _emit(args, report, {"D.cmtx": cert.D, "P.cmtx": cert.P})
    if cert.certified:
        return EXIT_OK
    if cert.verdict == "ambiguous":
        sys.stderr.write("certificate field 'ranks' is ambiguous\n")
        return EXIT_AMBIGUOUS
    failed = _failed_fields(cert)
    sys.stderr.write(f"certificate fields not satisfied: {', '.join(failed)}\n")
    return EXIT_FAILED


def _failed_fields(cert):
    out = []
    if cert.normality_defect > cert.normality_tol:
        out.append("normality_defect")
    if cert.rank2.rank != cert.target.k:
        out.append("rank2")
    if cert.rank3.rank != cert.target.j:
        out.append("rank3")
    if not cert.s_pd_min_eig > 0:
        out.append("s_pd_min_eig")
    return out


def _load_square(path, name):
    A = read_cmtx(path)
    if A.shape[0] != A.shape[1]:
        raise FormatError(f"{name} in {path} is not square: {A.shape}")
    return A


def cmd_verify(args):
    tol = _tol(args)
    D = _load_square(args.input, "D")
    report = {"claim": "corner verification", "inputs": {"n": D.shape[0], "seed": args.seed},
              "ranks": {}, "residuals": {}, "checks": {}}
    status = []
    defect = normality_defect(D)
    report["residuals"]["normality_defect"] = defect
    eigs = np.linalg.eigvals(D)
    report["checks"]["spectrum"] = spectrum_line_circle_classify(eigs)
    if args.proj:
        P = _load_square(args.proj, "P")
        dec = decompose(D, P, tol)
        try:
            rep = corner_identity_check(dec, tol)
        except NotNormal as exc:
            report["checks"]["corner_identity"] = {"error": str(exc)}
            status.append("violated")
        else:
            report["ranks"] = {"rank2": rep.rank2.to_dict(), "rank3": rep.rank3.to_dict()}
            report["residuals"].update({
                "frob2": rep.frob2, "frob3": rep.frob3, "frob_gap": rep.frob_gap,
                "commutator_residual": rep.commutator_residual,
            })
            fro = max(rep.norm_D, 1.0)
            ok = rep.frob_gap <= 1e-10 * fro and rep.commutator_residual <= 1e-10 * fro * fro
            if rep.rank2.ambiguous or rep.rank3.ambiguous:
                status.append("ambiguous")
            else:
                status.append("certified" if ok else "violated")
    if args.cr_trials:
        extra = [read_cmtx(args.proj)] if args.proj else []
        found = cr_sample_test(D, trials=args.cr_trials, seed=args.seed, tol=tol,
                               extra_projections=extra)
        if isinstance(found, Witness):
            report["checks"]["cr_sampling"] = {
                "result": "Witness", "trial": found.trial,
                "rank2": found.rank2.to_dict(), "rank3": found.rank3.to_dict()}
        else:
            report["checks"]["cr_sampling"] = {
                "result": "NoViolationFound", "trials": found.trials,
                "ambiguous_trials": found.ambiguous_trials}
        status.append("certified")
    if "violated" in status:
        verdict, code = "violated", EXIT_FAILED
    elif "ambiguous" in status:
        verdict, code = "ambiguous", EXIT_AMBIGUOUS
    else:
        verdict, code = "certified", EXIT_OK
    report["verdict"] = verdict
    _emit(args, report)
    return code


def cmd_chain(args):
    tol = _tol(args)
    D = _load_square(args.input, "D")
    P = _load_square(args.proj, "P")
    chain, lam = chain_from_projection(D, P, tol, args.steps_up, args.steps_down)
    n = D.shape[0]
    up, down = len(chain) - 1 + chain.start, -chain.start
    residuals, forward = verify_shifts_forward(D, chain)
    report = {
        "claim": "subspace chain from ran P",
        "inputs": {"n": n, "rank_P": chain.dims[down], "steps_up": up, "steps_down": down,
                   "shift": abs(lam)},
        "dims": chain.dims,
        "indices": chain.indices,
        "residuals": {"shifts_forward": residuals, "nesting": chain.nesting_residuals()},
        "strictly_increasing": chain.strictly_increasing,
    }
    code = EXIT_OK
    try:
        cyc = extract_cyclic_vector(D, chain, tol)
        report["cyclicity"] = cyc.to_dict()
    except NotCyclicWitness as exc:
        report["cyclicity"] = {"error": str(exc), **exc.report.to_dict()}
        code = EXIT_FAILED
    certified = code == EXIT_OK and forward and chain.strictly_increasing
    report["verdict"] = "certified" if certified else "violated"
    _emit(args, report)
    return EXIT_OK if certified else EXIT_FAILED


def _sweep_T(args):
    if args.sweep:
        return [int(t) for t in args.sweep.split(",")]
    return [args.T]


def _k_value(k):
    if k is None:
        return None
    return shiftlab.INFINITE if str(k).lower() in ("inf", "infinite") else int(k)


def cmd_shift(args):
    tol = _tol(args)
    case = args.case
    Ts = _sweep_T(args)
    k = _k_value(args.k)
    j = args.j
    matrices = {}
    if case in ("1", "2", "3"):
        if case == "1":
            builder = lambda T: shiftlab.build_case1(1 if k is None else k, T, tol)
        elif case == "2":
            builder = lambda T: shiftlab.build_case2(1 if j is None else j, 1 if k is None else k, T, tol)
        else:
            builder = lambda T: shiftlab.build_case3(args.n or T, tol)
        rows, slopes = shiftlab.rank_sweep(builder, Ts)
        last = builder(Ts[-1])
        report = {"claim": f"case {case} corner ranks", "inputs": {"case": case, "j": j, "k": args.k, "T": Ts},
                  "ranks": {"rank3": last.rank3.to_dict(), "rank2": last.rank2.to_dict()},
                  "sweep": rows, "slopes": slopes}
        matrices = {"D.cmtx": last.D, "P.cmtx": last.P}
        ok = last.certified
    elif case == "weighted":
        rows = []
        for T in Ts:
            sec = shiftlab.build_weighted_section(T)
            interior = np.ix_(sec.interior, sec.interior)
            ps = range(-T + 1, T)
            ratio_err = max(abs(shiftlab.kernel_ratio_from_entries(sec, p) - shiftlab.kernel_recursion_oracle(p))
                            for p in ps)
            rows.append({
                "T": T,
                "lower_interior_max": float(np.abs(sec.lower[interior]).max()),
                "upper_skew_residual": float(np.abs(sec.upper + sec.upper.conj().T).max()),
                "ratio_oracle_error": ratio_err,
                "sigma_min": shiftlab.interior_sigma_min(sec),
            })
        report = {"claim": "quasiaffinity construction on finite sections",
                  "inputs": {"case": case, "T": Ts}, "sweep": rows}
        ok = all(r["lower_interior_max"] <= 1e-13 and r["ratio_oracle_error"] <= 1e-12 and r["sigma_min"] > 0
                 for r in rows)
        sec = shiftlab.build_weighted_section(Ts[-1])
        matrices = {"lower.cmtx": sec.lower, "upper.cmtx": sec.upper}
    elif case in ("injective", "noncyclic"):
        jj = 1 if j is None else j
        fn = shiftlab.assemble_injective_corner if case == "injective" else shiftlab.assemble_noncyclic
        res = [fn(jj, T, tol) for T in Ts]
        rows = [{"T": r.T, "rank3": r.rank3.rank, **{a: b for a, b in r.realized.items()}} for r in res]
        report = {"claim": f"{case} assembly", "inputs": {"case": case, "j": jj, "T": Ts},
                  "ranks": {"rank3": res[-1].rank3.to_dict()}, "sweep": rows}
        ok = all(r.rank3.rank == jj and r.rank3.certified for r in res)
        matrices = {"D.cmtx": res[-1].D, "P.cmtx": res[-1].P}
    elif case == "hs":
        def K_builder(T):
            d = 1.0 / np.arange(1, 2 * T + 2)
            return np.diag(d).astype(np.complex128)

        def P_builder(T, size):
            return haar_random_projection(size, size // 2, seed=args.seed + T)

        rows = shiftlab.hs_corner_sweep(K_builder, P_builder, Ts, tol)
        report = {"claim": "Hilbert-Schmidt corner identity", "inputs": {"case": case, "T": Ts, "seed": args.seed},
                  "sweep": rows}
        ok = all(r["gap"] <= r["bound"] for r in rows)
    else:  # pragma: no cover - argparse restricts choices
        raise InvalidTarget(f"unknown case {case}")
    report["verdict"] = "certified" if ok else "violated"
    _emit(args, report, matrices, rows)
    return EXIT_OK if ok else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="cornerrank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="directory for JSON/cmtx output (default: JSON on stdout)")
    common.add_argument("--report-name", help="report file name inside --out")
    common.add_argument("--rank-tol", type=float, default=1e-8)
    common.add_argument("--normality-tol", type=float, default=1e-10)
    common.add_argument("--gap-factor", type=float, default=1e3)
    common.add_argument("--eig-tol", type=float, default=1e-6)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a certified (D, P)")
    p.add_argument("--m", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--search-m2", action="store_true")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--perturb", type=float, help="perturbation size for the weights")
    p.set_defaults(func=cmd_construct, default_report="certificate.json")

    p = sub.add_parser("verify", parents=[common], help="check corners of a given matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--proj")
    p.add_argument("--cr-trials", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chain", parents=[common], help="subspace chain and cyclic vector")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--proj", required=True)
    p.add_argument("--steps-up", type=int)
    p.add_argument("--steps-down", type=int)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("shift", parents=[common], help="finite sections of shift constructions")
    p.add_argument("--case", required=True, choices=["1", "2", "3", "weighted", "injective", "noncyclic", "hs"])
    p.add_argument("--T", type=int, default=20)
    p.add_argument("--sweep", help="comma separated list of T values")
    p.add_argument("--j", type=int)
    p.add_argument("--k", help="integer or 'inf'")
    p.add_argument("--n", type=int)
    p.add_argument("--csv", help="write sweep rows as CSV")
    p.set_defaults(func=cmd_shift)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidTarget as exc:
        sys.stderr.write(f"invalid target: {exc}\n")
        return EXIT_INVALID
    except (AmbiguousRank, AmbiguousChain) as exc:
        sys.stderr.write(f"ambiguous numerics: {exc}\n")
        return EXIT_AMBIGUOUS
    except FormatError as exc:
        sys.stderr.write(f"format error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
    except SearchExhausted as exc:
        sys.stderr.write(f"search exhausted: {exc}\n")
        return EXIT_FAILED
    except CornerRankError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
