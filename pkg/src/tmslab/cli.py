"""Command-line front end.

Exit status: 0 when every result meets its expectation, 1 when one does
not, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from . import io as tio
from . import spaces as sp
from .errors import TmsLabError

EXIT_MET, EXIT_VIOLATED, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _float_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return tuple(vals)


def _common(p, budget=None, tol=None, eps=None):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    if budget is not None:
        p.add_argument("--budget", type=_positive_int, default=budget)
    if tol is not None:
        p.add_argument("--tol", type=_positive_float, default=tol)
    if eps is not None:
        p.add_argument("--eps", type=_positive_float, default=eps)


MEASURES = ("lebesgue", "diam", "counting")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tmslab", description="Topological measure space toolkit.")
    parser.add_argument("--version", action="version", version=f"tmslab {__version__}")
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = top.add_parser("spaces").add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(g.add_parser("list"))

    g = top.add_parser("measure").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = g.add_parser("estimate")
    p.add_argument("--space", required=True)
    p.add_argument("--set", required=True, dest="set_")
    p.add_argument("--kind", "--measure", dest="measure", choices=MEASURES, default="diam")
    _common(p, budget=100)
    p.add_argument("--tol", type=_positive_float, default=None,
                   help="require the bracket width to be at most this")

    g = top.add_parser("tms").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = g.add_parser("check")
    p.add_argument("--space", required=True)
    p.add_argument("--measure", choices=MEASURES, required=True)
    p.add_argument("--samples", type=_positive_int, default=200)
    p.add_argument("--extended", action="store_true", help="add thin-box probes for axiom iii")
    p.add_argument("--expect", default=None, help="tms_passes or tms_fails_axiom(k)")
    _common(p, budget=60)

    g = top.add_parser("ac").add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("analyze", "falsify"):
        p = g.add_parser(name)
        p.add_argument("--fn", required=True)
        p.add_argument("--space", default=None)
        p.add_argument("--measure", choices=MEASURES, default="lebesgue")
        p.add_argument("--deltas", type=_float_list, default=None)
        p.add_argument("--expect", default=None)
        if name == "analyze":
            p.add_argument("--samples", type=_positive_int, default=10,
                           help="random families per spot-check")
        _common(p, eps=0.01 if name == "analyze" else 0.5)

    g = top.add_parser("linear").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = g.add_parser("check")
    p.add_argument("--map", required=True)
    p.add_argument("--space", default=None, help="domain; must match the map's own domain")
    p.add_argument("--samples", type=_positive_int, default=20)
    _common(p, budget=200, eps=0.01)

    g = top.add_parser("paper").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = g.add_parser("reproduce")
    p.add_argument("--only", default=None, help="comma-separated entry ids")
    _common(p)
    return parser


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _config(args, **extra) -> dict:
    cfg = {"seed": args.seed, "format": args.format}
    for k in ("budget", "tol", "eps", "samples", "measure", "deltas", "space", "fn", "map"):
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = list(v) if isinstance(v, tuple) else v
    cfg.update(extra)
    return cfg


def _result(id_, expected, actual, detail, summary=None) -> dict:
    r = {"id": id_, "expected": expected, "actual": actual, "met": actual in expected.split("|"),
         "detail": detail}
    if summary is not None:
        r["summary"] = summary
    return r


def cmd_spaces_list(args):
    results = []
    for name in sp.NAMED_SPACES:
        results.append(_result(name, "listed", "listed", sp.named_space(name).to_dict()))
    return results


def cmd_measure_estimate(args):
    from .measure import measure_of
    space = tio.load_space(args.space)
    shape = tio.load_shape(args.set_)
    est = measure_of(space, args.measure, shape, args.budget)
    if args.tol is not None:
        expected = "bracket_closes"
        actual = expected if est.width <= args.tol else "bracket_open"
    else:
        expected = actual = "bracket"
    return [_result("measure", expected, actual, est,
                    {"lower": est.lower, "upper": est.upper, "method": est.method})]


def default_tms_expectation(space, kind) -> str:
    if kind == "counting":
        return "tms_fails_axiom(2)"
    if kind == "lebesgue" and isinstance(space, sp.Circle):
        return "tms_fails_axiom(3)"
    return "tms_passes"


def cmd_tms_check(args):
    from .tms import TmsInstance, check_instance
    space = tio.load_space(args.space)
    rep = check_instance(TmsInstance(space, args.measure), args.samples, args.seed,
                         extended=args.extended, budget=args.budget)
    failed = rep.failed_axioms
    actual = "tms_passes" if not failed else f"tms_fails_axiom({failed[0]})"
    expected = args.expect or default_tms_expectation(space, args.measure)
    return [_result("tms", expected, actual, rep, {"failed_axioms": failed})]


def _fn_and_instance(args):
    from .tms import TmsInstance
    domain = tio.load_space(args.space) if args.space else None
    f = tio.load_function(args.fn, domain)
    return f, TmsInstance(f.domain, args.measure)


def _verdict_summary(v) -> dict:
    out = {"status": v.status}
    for k in ("certificate", "L", "eps", "spot_checks_passed"):
        if getattr(v, k, None) is not None:
            out[k] = getattr(v, k)
    if getattr(v, "witnesses", None):
        out["witness_deltas"] = [w.delta for w in v.witnesses]
    return out


def cmd_ac_analyze(args):
    from .ac import analyze
    from .ac.falsify import DEFAULT_DELTAS
    f, inst = _fn_and_instance(args)
    v = analyze(f, inst, args.eps, args.deltas or DEFAULT_DELTAS, n_families=args.samples,
                seed=args.seed)
    expected = args.expect or "certified|falsified"
    return [_result(f"ac:{args.fn if len(args.fn) < 40 else 'fn'}", expected, v.status, v,
                    _verdict_summary(v))]


def cmd_ac_falsify(args):
    from .ac import falsify_ac
    from .ac.falsify import DEFAULT_DELTAS
    f, inst = _fn_and_instance(args)
    v = falsify_ac(f, inst, args.eps, args.deltas or DEFAULT_DELTAS, seed=args.seed)
    expected = args.expect or "falsified"
    return [_result(f"falsify:{args.fn if len(args.fn) < 40 else 'fn'}", expected, v.status, v,
                    _verdict_summary(v))]


def cmd_linear_check(args):
    from .linear import ac_from_bounded, operator_norm
    from .tms import TmsInstance
    from .measure import MeasureKind
    T = tio.load_map(args.map)
    if args.space:
        space = tio.load_space(args.space)
        if space.to_dict() != T.domain.to_dict():
            raise UsageError(f"--space {space.to_dict()} does not match the map's domain "
                             f"{T.domain.to_dict()}")
    est = operator_norm(T, args.budget, args.seed)
    v = ac_from_bounded(T, TmsInstance(T.domain, MeasureKind.DIAM), (1e-1, 1e-2, 1e-3, args.eps),
                        n_families=args.samples, seed=args.seed)
    ok = v.spot_checks_passed and est.lower <= v.L + 1e-6
    detail = {"norm_estimate": est, "verdict": v, "delta_at_eps": v.delta(args.eps)}
    return [_result("linear", "certified", "certified" if ok else "violated", detail,
                    {"norm_lower": est.lower, "norm_upper": est.upper})]


def cmd_paper_reproduce(args):
    from .corpus import entry_ids, reproduce
    only = None
    if args.only:
        only = [s.strip() for s in args.only.split(",") if s.strip()]
        unknown = sorted(set(only) - set(entry_ids()))
        if unknown:
            raise UsageError(f"unknown corpus ids: {unknown}")
    return reproduce(args.seed, only)


COMMANDS = {
    ("spaces", "list"): cmd_spaces_list,
    ("measure", "estimate"): cmd_measure_estimate,
    ("tms", "check"): cmd_tms_check,
    ("ac", "analyze"): cmd_ac_analyze,
    ("ac", "falsify"): cmd_ac_falsify,
    ("linear", "check"): cmd_linear_check,
    ("paper", "reproduce"): cmd_paper_reproduce,
}


def run_command(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        results = COMMANDS[(args.group, args.command)](args)
        report = {"schema_version": tio.SCHEMA_VERSION,
                  "command": f"{args.group} {args.command}",
                  "config": _config(args),
                  "results": results,
                  "summary": {"total": len(results), "met": sum(r["met"] for r in results)}}
        text = tio.emit_report(report, args.out, args.format)
    except UsageError as exc:
        print(f"tmslab: usage error: {exc}", file=stderr)
        return EXIT_ERROR
    except (TmsLabError, ValueError, KeyError, TypeError) as exc:
        print(f"tmslab: error: {exc}", file=stderr)
        return EXIT_ERROR
    if args.out is None:
        stdout.write(text)
    return EXIT_MET if all(r["met"] for r in results) else EXIT_VIOLATED


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
