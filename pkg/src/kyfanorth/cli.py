"""Command line interface.

Subcommands: norm (print a Ky Fan norm and the singular values), check
(decide orthogonality or parallelism and optionally write a report), verify
(re-check a report's certificate against its problem), gen (write labeled
random instances), and sweep-plot (dump the support-function sweep as CSV).

Exit codes for check: 0 orthogonal/parallel, 1 refuted, 3 boundary,
2 parse or usage error, 4 rank-degenerate input for a criterion that needs
s_k > 0. verify: 0 PASS, 1 FAIL, 2 parse. Everything else: 0 success,
2 parse/usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .decide import (
    _range_model,
    check_pair,
    check_pair_blocks,
    check_parallel,
    check_subspace,
    verify_certificate,
)
from .errors import DegenerateRank, KyFanError, ParseError
from .generate import (
    make_nonorthogonal_pair,
    make_nonparallel_pair,
    make_orthogonal_pair,
    make_parallel_pair,
    make_singular_pair,
    make_subspace_instance,
)
from .io import encode_report, load_problem, load_report, save_problem, save_report
from .linalg import singular_values
from .model import COMPLEX_FIELD, REAL_FIELD, Tolerances, Verdict
from .norms import ky_fan_norm
from .oracle import (
    GridSpec,
    oracle_check_pair,
    oracle_check_parallel,
    oracle_check_subspace,
    sample_range_points,
)
from .subdiff import build_frame

__all__ = ["main", "entry", "build_parser"]

_PASS_VERDICTS = (Verdict.ORTHOGONAL, Verdict.PARALLEL, Verdict.NO_COUNTEREXAMPLE)
_FAIL_VERDICTS = (Verdict.NOT_ORTHOGONAL, Verdict.NOT_PARALLEL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kyfanorth",
        description="Birkhoff-James orthogonality of complex matrices "
                    "in Ky Fan k-norms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="print a Ky Fan norm")
    p_norm.add_argument("problem", help="problem JSON file")
    p_norm.add_argument("--name", default="a", help="matrix name (default a)")
    p_norm.add_argument("--k", type=int, default=None,
                        help="override the problem's k")
    p_norm.set_defaults(func=cmd_norm)

    p_check = sub.add_parser("check", help="decide orthogonality/parallelism")
    p_check.add_argument("problem", help="problem JSON file")
    p_check.add_argument("--mode", default=None,
                         choices=["pair", "blocks", "subspace", "parallel"],
                         help="criterion (default: subspace if the problem "
                              "lists one, else pair)")
    p_check.add_argument("--field", default=None,
                         choices=[COMPLEX_FIELD, REAL_FIELD],
                         help="scalar field override")
    p_check.add_argument("--json", action="store_true",
                         help="print the full report as JSON")
    p_check.add_argument("--report", default=None, metavar="PATH",
                         help="write the report JSON to PATH")
    p_check.add_argument("--no-cert", action="store_true",
                         help="skip certificate construction")
    p_check.add_argument("--oracle", action="store_true",
                         help="use the norm-evaluation referee instead of "
                              "the frame engine")
    p_check.add_argument("--seed", type=int, default=None,
                         help="seed recorded in the report and used by the "
                              "oracle grid")
    p_check.add_argument("--tol-decide", type=float, default=None)
    p_check.add_argument("--tol-strict", type=float, default=None)
    p_check.add_argument("--cluster-tol", type=float, default=None)
    p_check.set_defaults(func=cmd_check)

    p_verify = sub.add_parser("verify", help="re-check a report certificate")
    p_verify.add_argument("problem", help="problem JSON file")
    p_verify.add_argument("report", help="report JSON file")
    p_verify.add_argument("--json", action="store_true",
                          help="print the clause table as JSON")
    p_verify.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser("gen", help="write a labeled random instance")
    p_gen.add_argument("--kind", required=True,
                       choices=["orthogonal", "nonorthogonal", "parallel",
                                "nonparallel", "subspace", "singular"])
    p_gen.add_argument("--out", required=True, help="output problem path")
    p_gen.add_argument("-n", type=int, default=5, help="matrix size")
    p_gen.add_argument("-k", type=int, default=2, help="norm index")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--q", type=int, default=1,
                       help="boundary cluster members at or before k")
    p_gen.add_argument("--r", type=int, default=0,
                       help="boundary cluster members after k")
    p_gen.add_argument("--m", type=int, default=2,
                       help="basis size for subspace instances")
    p_gen.add_argument("--degenerate", action="store_true",
                       help="put the boundary cluster at zero")
    p_gen.add_argument("--negative", action="store_true",
                       help="generate the refuted variant of subspace kind")
    p_gen.add_argument("--field", default=COMPLEX_FIELD,
                       choices=[COMPLEX_FIELD, REAL_FIELD])
    p_gen.set_defaults(func=cmd_gen)

    p_sweep = sub.add_parser("sweep-plot",
                             help="dump the support-function sweep as CSV")
    p_sweep.add_argument("problem", help="problem JSON file (pair)")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--grid", type=int, default=720,
                         help="number of sweep angles")
    p_sweep.add_argument("--points", type=int, default=0,
                         help="also sample this many attainable pairing "
                              "points into OUT.points.csv")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.set_defaults(func=cmd_sweep_plot)
    return parser


def _tol_from(problem, args) -> Tolerances:
    base = problem.tolerances if problem.tolerances is not None else Tolerances()
    kwargs = base.as_dict()
    if getattr(args, "tol_decide", None) is not None:
        kwargs["decide"] = args.tol_decide
    if getattr(args, "tol_strict", None) is not None:
        kwargs["strict"] = args.tol_strict
    if getattr(args, "cluster_tol", None) is not None:
        kwargs["cluster"] = args.cluster_tol
    try:
        return Tolerances(**kwargs)
    except ValueError as exc:
        raise ParseError(f"bad tolerances: {exc}") from exc


def _thread_cap() -> int | None:
    raw = os.environ.get("KYFAN_THREADS")
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def cmd_norm(args) -> int:
    problem = load_problem(args.problem)
    k = args.k if args.k is not None else problem.k
    m = problem.matrix(args.name)
    value = ky_fan_norm(m, k)
    s = singular_values(m)
    print(f"ky_fan_norm(k={k}) = {value:.12g}")
    print("singular_values = " + " ".join(f"{x:.12g}" for x in s))
    return 0


def cmd_check(args) -> int:
    problem = load_problem(args.problem)
    tol = _tol_from(problem, args)
    field = args.field if args.field is not None else problem.field
    mode = args.mode
    if mode is None:
        mode = "subspace" if problem.subspace is not None else "pair"
    if mode == "subspace" and problem.subspace is None:
        raise ParseError("subspace mode needs a subspace list in the problem")
    t0 = time.perf_counter()
    if mode == "subspace":
        a = problem.matrix("a")
        basis = problem.basis()
        if args.oracle:
            decision = oracle_check_subspace(a, basis, problem.k, tol=tol)
        else:
            decision = check_subspace(a, basis, problem.k, tol=tol,
                                      want_certificate=not args.no_cert)
    else:
        a, b = problem.pair()
        if mode == "parallel":
            if args.oracle:
                decision = oracle_check_parallel(a, b, problem.k, tol=tol)
            else:
                decision = check_parallel(a, b, problem.k, tol=tol,
                                          want_certificate=not args.no_cert)
        elif args.oracle:
            grid = GridSpec(seed=args.seed or 0)
            decision = oracle_check_pair(a, b, problem.k, field=field,
                                         tol=tol, grid=grid)
        elif mode == "blocks":
            decision = check_pair_blocks(a, b, problem.k, tol=tol,
                                         want_certificate=not args.no_cert)
        else:
            decision = check_pair(a, b, problem.k, field=field, tol=tol,
                                  want_certificate=not args.no_cert)
    timings = {"total_s": time.perf_counter() - t0}
    cap = _thread_cap()
    if cap is not None:
        decision.details["threads_cap"] = cap
    report = encode_report(decision, timings=timings, seed=args.seed)
    if args.report:
        save_report(args.report, decision, timings=timings, seed=args.seed)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(decision.summary())
        if problem.label.get("expected"):
            print(f"label_expected={problem.label['expected']}")
    if decision.verdict in _PASS_VERDICTS:
        return 0
    if decision.verdict in _FAIL_VERDICTS:
        return 1
    return 3


def cmd_verify(args) -> int:
    problem = load_problem(args.problem)
    report = load_report(args.report)
    if report.certificate is None:
        print("FAIL certificate=absent")
        return 1
    tol = problem.tolerances or report.tolerances or Tolerances()
    a = problem.matrix("a")
    if problem.subspace is not None:
        second = problem.basis()
    else:
        second = problem.matrix("b")
    outcome = verify_certificate(report.certificate, a, second, problem.k,
                                 tol=tol)
    if args.json:
        print(json.dumps(outcome, indent=2))
    else:
        word = "PASS" if outcome["ok"] else "FAIL"
        print(f"{word} kind={outcome['kind']} clauses={len(outcome['checks'])}")
        for check in outcome["checks"]:
            status = "ok" if check["pass"] else "FAIL"
            print(f"  [{status}] {check['name']}: value={check['value']:.3e} "
                  f"bound={check['bound']:.3e}")
    return 0 if outcome["ok"] else 1


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    n, k = args.n, args.k
    if args.kind == "orthogonal":
        a, b, label = make_orthogonal_pair(n, k, rng, q=args.q, r=args.r,
                                           degenerate=args.degenerate,
                                           field=args.field)
        matrices, subspace = {"a": a, "b": b}, None
    elif args.kind == "nonorthogonal":
        a, b, label = make_nonorthogonal_pair(n, k, rng)
        matrices, subspace = {"a": a, "b": b}, None
    elif args.kind == "parallel":
        a, b, label = make_parallel_pair(n, k, rng)
        matrices, subspace = {"a": a, "b": b}, None
    elif args.kind == "nonparallel":
        a, b, label = make_nonparallel_pair(n, k, rng)
        matrices, subspace = {"a": a, "b": b}, None
    elif args.kind == "singular":
        a, b, label = make_singular_pair(n, k, rng)
        matrices, subspace = {"a": a, "b": b}, None
    else:
        a, basis, label = make_subspace_instance(
            n, k, args.m, rng, orthogonal=not args.negative,
            q=args.q, r=args.r)
        matrices = {"a": a}
        subspace = []
        for i, w in enumerate(basis):
            name = f"w{i}"
            matrices[name] = w
            subspace.append(name)
    label["seed"] = args.seed
    save_problem(args.out, matrices, k, field_name=args.field,
                 subspace=subspace, label=label)
    print(f"wrote {args.out} kind={label['kind']} "
          f"expected={label.get('expected', 'n/a')}")
    return 0


def cmd_sweep_plot(args) -> int:
    problem = load_problem(args.problem)
    a, b = problem.pair()
    if args.grid < 8:
        raise ParseError("--grid must be at least 8")
    frame = build_frame(a, problem.k)
    model = _range_model(frame, b)
    thetas = np.linspace(0.0, 2.0 * np.pi, args.grid, endpoint=False)
    h = model.support(thetas)
    fixed = complex(model.fixed_part)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("theta,h,fixed_re,fixed_im\n")
        for th, hv in zip(thetas, h):
            fh.write(f"{th:.17g},{hv:.17g},{fixed.real:.17g},{fixed.imag:.17g}\n")
    written = [args.out]
    if args.points > 0:
        pts = sample_range_points(a, b, problem.k, count=args.points,
                                  rng=np.random.default_rng(args.seed))
        companion = args.out + ".points.csv"
        with open(companion, "w", encoding="utf-8") as fh:
            fh.write("re,im\n")
            for z in pts:
                fh.write(f"{z.real:.17g},{z.imag:.17g}\n")
        written.append(companion)
    print("wrote " + " ".join(written))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if exc.code is not None else 0
        return 0 if code == 0 else 2
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateRank as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except KyFanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
