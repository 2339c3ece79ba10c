"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 verification
failure.  Errors are reported as one JSON object on standard error.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .aak import aak_reduce
from .config import DEFAULT
from .errors import InputError, NumericalError, VerificationFailed, WfaError
from .extensions import reduce_general
from .hankel import auto_hankel_size, sva_truncation_baseline, truncated_hankel, write_csv
from .wfa import dumps_wfa, evaluate, load_wfa, minimize, to_sva, wfa_to_dict

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _hankel_size(text):
    if text == "auto":
        return "auto"
    try:
        N = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'")
    if N < 1:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'")
    return N


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return v


def _pos_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("expected a positive number")
    return v


def build_parser():
    p = _Parser(prog="wfa-aak", description="Optimal spectral-norm reduction of one-letter weighted automata.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp, states=False):
        sp.add_argument("--input", required=True, help="WFA JSON file")
        sp.add_argument("--output", help="write the main result here instead of stdout")
        sp.add_argument("--tol-mult", type=_pos_float, help="relative tie tolerance for singular numbers")
        sp.add_argument("--tol-circle", type=_pos_float, help="unit-circle exclusion radius")
        if states:
            sp.add_argument("--states", type=_nonneg_int, required=True, help="target number of states")

    sp = sub.add_parser("eval", help="evaluate f(k)")
    common(sp)
    sp.add_argument("--k", type=_nonneg_int, required=True)

    sp = sub.add_parser("minimize", help="minimal realisation")
    common(sp)

    sp = sub.add_parser("sva", help="singular-value canonical form")
    common(sp)

    sp = sub.add_parser("singular-values", help="Hankel singular numbers")
    common(sp)
    sp.add_argument("--hankel-size", type=_hankel_size, help="also report a truncated-Hankel SVD")

    def reduce_opts(sp):
        sp.add_argument("--verify", dest="verify", action="store_true", default=None)
        sp.add_argument("--no-verify", dest="verify", action="store_false")
        sp.add_argument("--report", help="write the JSON report here")
        sp.add_argument("--hankel-size", type=_hankel_size, default="auto")
        sp.add_argument("--samples", type=_nonneg_int, default=1000, help="unimodularity circle samples")
        sp.add_argument("--figures", help="directory for report figures (PNG)")

    sp = sub.add_parser("reduce", help="optimal rank-k reduction")
    common(sp, states=True)
    reduce_opts(sp)

    sp = sub.add_parser("reduce-general", help="reduce an automaton with eigenvalues outside the disc")
    common(sp)
    sp.add_argument("--stable", type=_nonneg_int, required=True, help="target size of the part inside the disc")
    sp.add_argument("--unstable", type=_nonneg_int, required=True, help="target size of the part outside")
    reduce_opts(sp)

    sp = sub.add_parser("compare", help="optimal reduction against truncation baselines")
    common(sp, states=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--hankel-size", type=_hankel_size, default="auto")
    sp.add_argument("--samples", type=_nonneg_int, default=1000)
    sp.add_argument("--figures", help="directory for comparison figures (PNG)")

    sp = sub.add_parser("check", help="certify every admissible reduction of fixtures or random inputs")
    sp.add_argument("--input", action="append", default=[], help="WFA JSON file (repeatable)")
    sp.add_argument("--random", type=_nonneg_int, default=0, help="number of random instances")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=_nonneg_int, default=1)
    sp.add_argument("--min-states", type=_nonneg_int, default=2)
    sp.add_argument("--max-states", type=_nonneg_int, default=6)
    sp.add_argument("--hankel-size", type=_hankel_size, default="auto")
    sp.add_argument("--samples", type=_nonneg_int, default=1000)
    sp.add_argument("--output", help="write the JSON summary here")
    sp.add_argument("--tol-mult", type=_pos_float)
    sp.add_argument("--tol-circle", type=_pos_float)

    sp = sub.add_parser("hankel", help="dump a truncated Hankel matrix as CSV")
    common(sp)
    sp.add_argument("--hankel-size", type=_hankel_size, default=32)
    return p


def _tol(args):
    return DEFAULT.with_(mult=getattr(args, "tol_mult", None), circle=getattr(args, "tol_circle", None))


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj):
    return json.dumps(obj, indent=2, allow_nan=False, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _finite(obj):
    """Replace NaN/inf (e.g. an empty-sample deviation) by None for strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def _prepare(W, tol):
    """Minimal canonical form of the input (``None`` for the zero function)."""
    M = minimize(W, tol=tol)
    if not np.any(M.alpha) or not np.any(M.beta):
        return None
    return to_sva(M, tol=tol)


def cmd_eval(args, tol):
    W = load_wfa(args.input)
    # 15 significant digits hide the last-bit noise of the k products
    _emit(f"{evaluate(W, args.k):.15g}", args.output)


def cmd_minimize(args, tol):
    _emit(dumps_wfa(minimize(load_wfa(args.input), tol=tol)), args.output)


def cmd_sva(args, tol):
    S = to_sva(minimize(load_wfa(args.input), tol=tol), tol=tol)
    d = wfa_to_dict(S.wfa)
    d["singular_numbers"] = [float(x) for x in S.singular_numbers]
    d["signs"] = [int(x) for x in S.sign_vector]
    _emit(_json(d), args.output)


def cmd_singular_values(args, tol):
    W = load_wfa(args.input)
    S = _prepare(W, tol)
    out = {"singular_numbers": [] if S is None else [float(x) for x in S.singular_numbers]}
    if args.hankel_size is not None:
        N = auto_hankel_size(W, tol=tol) if args.hankel_size == "auto" else args.hankel_size
        T = truncated_hankel(W, N, tol=tol)
        out["hankel_truncation"] = {
            "N": T.N,
            "tail_bound": T.tail_bound,
            "singular_values": [float(x) for x in T.singular_values[: max(W.n, 1)]],
        }
    _emit(_json(out), args.output)


def _reduce(args, tol):
    W = load_wfa(args.input)
    S = _prepare(W, tol)
    if S is None:
        raise InputError("the input computes the zero function; nothing to reduce")
    rep = aak_reduce(S, args.states, verify=args.verify, hankel_size=args.hankel_size, samples=args.samples, tol=tol)
    return W, S, rep


def cmd_reduce(args, tol):
    W, S, rep = _reduce(args, tol)
    d = _finite(rep.to_dict())
    if args.figures:
        from .plotting import write_reduction_figures

        d["figures"] = write_reduction_figures(S, rep, args.figures, sva_truncation_baseline(S, rep.k))
    if args.report:
        _emit(_json(d), args.report)
    _emit(dumps_wfa(rep.reduced), args.output)
    if rep.certified is False:
        raise VerificationFailed(f"certificate failed: {', '.join(rep.failures())}")


def cmd_reduce_general(args, tol):
    W = load_wfa(args.input)
    verify = True if args.verify is None else args.verify
    g = reduce_general(W, args.stable, args.unstable, verify=verify, hankel_size=args.hankel_size, samples=args.samples, tol=tol)
    if args.report:
        _emit(_json(_finite(g.to_dict())), args.report)
    _emit(dumps_wfa(g.wfa), args.output)
    bad = [p for p in (g.stable, g.unstable) if p.certified is False]
    if bad:
        raise VerificationFailed("a part reduction failed its certificate")


def compare_rows(W, k, *, hankel_size="auto", samples=1000, tol=DEFAULT):
    """Rows ``{method, rank, spectral_error, is_hankel, certified}``.

    Returns the rows, the canonical form and the reduction report (both
    ``None`` for the zero function, whose rows all have error 0).
    """
    S = _prepare(W, tol)
    if S is None:
        rows = [
            {"method": m, "rank": k, "spectral_error": 0.0, "is_hankel": m != "svd_truncation", "certified": True}
            for m in ("aak", "sva_truncation", "svd_truncation")
        ]
        return rows, None, None
    rep = aak_reduce(S, k, verify=True, hankel_size=hankel_size, samples=samples, tol=tol)
    return rep.to_dict()["baselines"], S, rep


def cmd_compare(args, tol):
    W = load_wfa(args.input)
    rows, S, rep = compare_rows(W, args.states, hankel_size=args.hankel_size, samples=args.samples, tol=tol)
    if args.figures and rep is not None:
        from .plotting import write_reduction_figures

        write_reduction_figures(S, rep, args.figures, sva_truncation_baseline(S, rep.k))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["method", "rank", "spectral_error", "is_hankel", "certified"], lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({**r, "spectral_error": repr(float(r["spectral_error"]))})
        _emit(buf.getvalue(), args.output)
    else:
        _emit(_json(rows), args.output)


def _check_instance(job):
    """Certify every admissible rank of one input; pure function of ``job``."""
    label, wdict, seed, n, hankel_size, samples, tol = job
    from .generators import random_minimal_sva
    from .wfa import wfa_from_dict

    if wdict is None:
        S = random_minimal_sva(np.random.default_rng(seed), n)
    else:
        S = _prepare(wfa_from_dict(wdict), tol)
    out = {"instance": label, "n": 0 if S is None else S.n, "reductions": []}
    if S is None:
        return out
    k = 1
    D = S.singular_numbers
    while k < S.n:
        entry = {"k": k}
        try:
            rep = aak_reduce(S, k, verify=True, hankel_size=hankel_size, samples=samples, tol=tol)
            entry.update(
                r=rep.r,
                sigma_k=rep.sigma_k,
                achieved_error=rep.achieved_error,
                allpass=max(rep.allpass_residuals),
                unimodularity=rep.unimodularity_deviation,
                certified=bool(rep.certified),
                failures=rep.failures(),
            )
            step = rep.r
        except WfaError as exc:
            entry.update(certified=False, error=type(exc).__name__, message=str(exc))
            step = 1
            while k + step < S.n and D[k] - D[k + step] <= tol.mult * D[0]:
                step += 1
        out["reductions"].append(entry)
        k += step
    return out


def cmd_check(args, tol):
    jobs = []
    for path in args.input:
        jobs.append((path, wfa_to_dict(load_wfa(path)), None, None, args.hankel_size, args.samples, tol))
    if args.random:
        rng = np.random.default_rng(args.seed)
        lo, hi = args.min_states, args.max_states
        if not 2 <= lo <= hi:
            raise InputError("need 2 <= --min-states <= --max-states")
        for i in range(args.random):
            n = int(rng.integers(lo, hi + 1))
            seed = int(rng.integers(2**63))
            jobs.append((f"random-{i}", None, seed, n, args.hankel_size, args.samples, tol))
    if not jobs:
        raise InputError("check needs --input or --random")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_check_instance, jobs))
    else:
        results = [_check_instance(j) for j in jobs]
    total = sum(len(r["reductions"]) for r in results)
    failed = sum(1 for r in results for e in r["reductions"] if not e["certified"])
    summary = {"instances": len(results), "reductions": total, "failed": failed, "results": results}
    _emit(_json(_finite(summary)), args.output)
    if failed:
        raise VerificationFailed(f"{failed} of {total} reductions failed certification")


def cmd_hankel(args, tol):
    W = load_wfa(args.input)
    N = auto_hankel_size(W, tol=tol) if args.hankel_size == "auto" else args.hankel_size
    T = truncated_hankel(W, N, tol=tol)
    if args.output:
        write_csv(T, args.output)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in T.entries:
            w.writerow([repr(float(x)) for x in row])
        w.writerow(["singular_values"] + [repr(float(x)) for x in T.singular_values])
        sys.stdout.write(buf.getvalue())


COMMANDS = {
    "eval": cmd_eval,
    "minimize": cmd_minimize,
    "sva": cmd_sva,
    "singular-values": cmd_singular_values,
    "reduce": cmd_reduce,
    "reduce-general": cmd_reduce_general,
    "compare": cmd_compare,
    "check": cmd_check,
    "hankel": cmd_hankel,
}


def _diagnose(code, exc):
    sys.stderr.write(json.dumps({"exit_code": code, "error": type(exc).__name__, "message": str(exc)}) + "\n")


def _dispatch(argv):
    """Run one command; returns ``(exit_code, exception or None)``."""
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.verb](args, _tol(args))
    except VerificationFailed as exc:
        return EXIT_VERIFY, exc
    except (InputError, OSError, json.JSONDecodeError) as exc:
        return EXIT_INPUT, exc
    except (NumericalError, np.linalg.LinAlgError) as exc:
        return EXIT_NUMERICAL, exc
    return EXIT_OK, None


def run(argv=None):
    """Run the command line; returns the exit code.

    Warnings go to standard error as one JSON object per line, followed by
    the error diagnostic when the command fails.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        code, exc = _dispatch(argv)
    for w in caught:
        sys.stderr.write(json.dumps({"warning": w.category.__name__, "message": str(w.message)}) + "\n")
    if exc is not None:
        _diagnose(code, exc)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
