"""``ctxlab`` command line.

Exit codes: 0 holds / feasible / success, 1 fails / infeasible, 2 usage,
parse or resource error, 3 heuristic-only or nonmonotone result.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .ce import NonMonotoneError, ce_check, ce_optimize, consistent_optimize, nc_check, nc_optimize, threshold_search
from .io import ParseError, functional_arg, probability_arg, scenario_arg
from .limits import Limits, ResourceLimitError, get_limits
from .lp import LPVerificationError
from .probability import ProbabilityError, validate
from .qm import FEASIBLE, HEURISTIC, qm_feasible, qm_optimize
from .scenario import MODES, ScenarioError, exclusivity_graph, power_scenario

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_HEURISTIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- value rendering ----------------------------------------------------------

def number(x) -> dict:
    """JSON form of a value: exact string when there is one, plus a float."""
    if isinstance(x, float):
        return {"exact": None, "decimal": x}
    if isinstance(x, (int, Fraction)):
        return {"exact": str(Fraction(x)), "decimal": float(x)}
    return {"exact": str(x), "decimal": float(x)}


def human(x) -> str:
    if isinstance(x, dict) and "decimal" in x:
        if x["exact"] is None:
            return repr(x["decimal"])
        if x["exact"].lstrip("-").isdigit():
            return x["exact"]
        return f"{x['exact']} ({x['decimal']:.10g})"
    return str(x)


def _scenario_summary(s) -> dict:
    return {"name": s.name, "elements": s.element_count, "measurements": len(s.measurements)}


def _limits(args) -> Limits:
    return get_limits().with_clique_cap(getattr(args, "clique_cap", None))


def _table_payload(p) -> list:
    s = p.scenario
    return [{"outcome": s.describe(o), "value": number(v)} for o, v in p.values.items()]


def _write_witness(path: str | None, payload: dict) -> str | None:
    if not path:
        return None
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_json(payload))
    return path


def render_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# --- commands ---------------------------------------------------------------

def cmd_scenario_info(args) -> tuple[int, dict]:
    s = scenario_arg(args.scenario)
    graphs = {}
    for mode in MODES:
        g = exclusivity_graph(s, mode)
        edges = sum(bin(int(w)).count("1") for row in g.adjacency_words() for w in row) // 2
        graphs[mode] = {"vertices": g.n, "edges": edges}
    result = {
        "measurements": [
            {"context": [b + 1 for b in s.contexts[k]] if s.contexts else None, "cells": len(m.cells)}
            for k, m in enumerate(s.measurements)
        ],
        "exclusivity_graph": graphs,
    }
    return EXIT_OK, {"scenario": _scenario_summary(s), "result": result}


def cmd_check(args) -> tuple[int, dict]:
    s = scenario_arg(args.scenario)
    p = probability_arg(args.prob, s)
    lim = _limits(args)
    bad = validate(p)
    if bad:
        raise ProbabilityError(f"probability table is not valid: {bad[0]}")
    mode = {"copies": args.copies, "exclusivity": args.exclusivity, "method": args.method}
    out = {"scenario": _scenario_summary(s), "mode": mode}
    if args.kind == "ce":
        rep = ce_check(s, p, args.copies, args.exclusivity, limits=lim)
        out["result"] = {
            "status": "holds" if rep.holds else "violated",
            "worst_clique_sum": number(rep.worst_sum),
            "worst_clique": rep.describe_worst(),
            "cliques_visited": rep.clique_count,
        }
        return (EXIT_OK if rep.holds else EXIT_FAIL), out
    if args.kind == "nc":
        res = nc_check(s, p, lim)
        if res.feasible:
            out["result"] = {"status": "feasible",
                             "witness_file": _write_witness(args.witness_out, {
                                 "joint_distribution": [number(w) for w in res.joint.weights]})}
            return EXIT_OK, out
        cert = [{"row": r, "multiplier": number(m)} for r, m in res.certificate_terms()]
        out["result"] = {"status": "infeasible", "certificate": cert,
                         "certificate_file": _write_witness(args.witness_out, {"farkas": cert})}
        return EXIT_FAIL, out
    res = qm_feasible(s, p, args.method, lim)
    result = {"status": res.status, "regime": res.regime, "iterations": res.iterations, "cuts": res.cuts}
    if res.witness is not None:
        wit = {"sing": [number(v) for v in res.witness.sing], "pair": [number(v) for v in res.witness.pair]}
        result["witness_file"] = _write_witness(args.witness_out, wit)
        if res.unverified_note:
            result["unverified_note"] = res.unverified_note
    else:
        cert = [{"row": r, "multiplier": number(m)} for r, m in res.certificate_terms()]
        result["certificate"] = cert
        result["certificate_file"] = _write_witness(args.witness_out, {"farkas": cert})
    out["result"] = result
    code = {FEASIBLE: EXIT_OK, HEURISTIC: EXIT_HEURISTIC}.get(res.status, EXIT_FAIL)
    return code, out


def cmd_optimize(args) -> tuple[int, dict]:
    s = scenario_arg(args.scenario)
    f = functional_arg(args.objective, s)
    lim = _limits(args)
    mode = {"set": args.set, "objective": f.name or args.objective, "exclusivity": args.exclusivity}
    if args.set == "nc":
        r = nc_optimize(s, f, lim)
        value, witness = r.value, {"joint_distribution": [number(w) for w in r.witness.weights]}
    elif args.set == "ce1":
        r = ce_optimize(s, f, args.exclusivity, limits=lim)
        value, witness = r.value, {"table": _table_payload(r.witness)}
    elif args.set == "consistent":
        r = consistent_optimize(s, f)
        value, witness = r.value, {"table": _table_payload(r.witness)}
    else:
        r = qm_optimize(s, f, lim)
        value = r.value
        witness = {"table": _table_payload(r.probability),
                   "sing": [number(v) for v in r.witness.sing], "pair": [number(v) for v in r.witness.pair]}
    result = {"value": number(value), "witness_file": _write_witness(args.witness_out, witness)}
    return EXIT_OK, {"scenario": _scenario_summary(s), "mode": mode, "result": result}


def cmd_threshold(args) -> tuple[int, dict]:
    s = scenario_arg(args.scenario)
    lim = _limits(args)
    t = threshold_search(args.family, s, args.copies, args.exclusivity, args.tol, limits=lim)
    sk = power_scenario(s, args.copies)
    mode = {"family": t.family, "copies": t.copies, "exclusivity": t.mode, "tol": args.tol}
    result = {
        "functional": t.functional,
        "parameter": number(t.parameter),
        "bracket": [number(t.lower), number(t.upper)],
        "value": number(t.value),
        "never_fails": t.never_fails,
        "exact_parameter": t.exact_parameter,
        "exact_value": t.exact_value,
        "binding_clique": [sk.describe(o) for o in t.binding_clique],
        "cliques": t.clique_count,
        "clique_signatures": t.signature_count,
    }
    return EXIT_OK, {"scenario": _scenario_summary(s), "mode": mode, "result": result}


def cmd_bounds_report(args) -> tuple[int, dict]:
    from .report import FAIL, run_report

    only = set(args.rows.split(",")) if args.rows else None
    rows = run_report(_limits(args), only)
    out_rows = []
    for r in rows:
        d = {"row": r.key, "title": r.title, "status": r.status, "checks": r.details}
        if args.timing:
            d["seconds"] = round(r.seconds, 3)
            d["budget_seconds"] = r.budget
        out_rows.append(d)
    failed = [r.key for r in rows if r.status == FAIL]
    result = {"rows": out_rows, "failed": failed, "status": "fail" if failed else "pass"}
    return (EXIT_FAIL if failed else EXIT_OK), {"result": result}


# --- plumbing ---------------------------------------------------------------

def _add_common(p, clique_cap=True):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings")
    if clique_cap:
        p.add_argument("--clique-cap", type=int, default=None, metavar="N",
                       help="abort when more than N maximal cliques are visited")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ctxlab", description="Contextuality bounds: CE, non-contextual and quantum-measure sets.")
    ap.add_argument("--version", action="version", version=f"ctxlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scenario-info", help="sample space, measurements and exclusivity graph sizes")
    p.add_argument("scenario", help="scenario file or preset (chsh, pentagon, cycle(n), ...)")
    _add_common(p, clique_cap=False)
    p.set_defaults(func=cmd_scenario_info)

    p = sub.add_parser("check", help="decide CE, NC or QM membership of a table")
    p.add_argument("kind", choices=("ce", "nc", "qm"))
    p.add_argument("scenario")
    p.add_argument("prob", help="probability file or preset (pr, isotropic(v), uniform_cycle(p), ...)")
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--exclusivity", choices=MODES, default="coarse")
    p.add_argument("--method", choices=("enumerate", "rowgen"), default="enumerate")
    p.add_argument("--witness-out", metavar="FILE", help="write the witness or certificate as JSON")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("optimize", help="maximize a functional over a set")
    p.add_argument("scenario")
    p.add_argument("--set", required=True, choices=("nc", "ce1", "qm", "consistent"))
    p.add_argument("--objective", required=True, help="functional file or preset (chsh, kcbs, gyni)")
    p.add_argument("--exclusivity", choices=MODES, default="coarse")
    p.add_argument("--witness-out", metavar="FILE")
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("threshold", help="largest family parameter whose k-copy product obeys CE")
    p.add_argument("scenario")
    p.add_argument("--family", required=True, choices=("isotropic", "uniform-cycle"))
    p.add_argument("--copies", type=int, default=2)
    p.add_argument("--tol", default="1e-6", help="bracket width on the family parameter")
    p.add_argument("--exclusivity", choices=MODES, default="coarse")
    _add_common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("bounds-report", help="recompute and gate every headline bound")
    p.add_argument("--rows", help="comma-separated row numbers to run (default: all)")
    _add_common(p)
    p.set_defaults(func=cmd_bounds_report)
    return ap


def _print_human(report: dict, out) -> None:
    def emit(key, val, indent=0):
        pad = "  " * indent
        if isinstance(val, dict) and "decimal" in val and "exact" in val:
            print(f"{pad}{key}: {human(val)}", file=out)
        elif isinstance(val, dict):
            print(f"{pad}{key}:", file=out)
            for k, v in val.items():
                emit(k, v, indent + 1)
        elif isinstance(val, list) and val and all(isinstance(v, dict) and "decimal" in v for v in val):
            print(f"{pad}{key}: " + ", ".join(human(v) for v in val), file=out)
        elif isinstance(val, list) and val and all(isinstance(v, str) and "," in v for v in val):
            print(f"{pad}{key}:", file=out)
            for v in val:
                print(f"{pad}  - {v}", file=out)
        elif isinstance(val, list) and val and all(isinstance(v, dict) for v in val):
            print(f"{pad}{key}:", file=out)
            for v in val:
                if "row" in v and "status" in v:
                    print(f"{pad}  [{v['status'].upper():4}] {v['row']}  {v.get('title', '')}", file=out)
                    for k, c in v.get("checks", {}).items():
                        print(f"{pad}         {k}: {c}", file=out)
                    if "seconds" in v:
                        print(f"{pad}         time: {v['seconds']} s (budget {v['budget_seconds']} s)", file=out)
                elif "row" in v:
                    print(f"{pad}  {v['row']}: {human(v['multiplier'])}", file=out)
                elif "outcome" in v:
                    print(f"{pad}  {v['outcome']}: {human(v['value'])}", file=out)
                else:
                    print(f"{pad}  " + ", ".join(f"{k}={human(x)}" for k, x in v.items()), file=out)
        elif isinstance(val, list):
            print(f"{pad}{key}: " + ", ".join(human(v) for v in val), file=out)
        elif val is not None:
            print(f"{pad}{key}: {val}", file=out)

    for key, val in report.items():
        emit(key, val)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    t0 = time.perf_counter()
    try:
        if getattr(args, "clique_cap", None) is not None and args.clique_cap < 1:
            raise UsageError("--clique-cap must be positive")
        if getattr(args, "copies", 1) < 1:
            raise UsageError("--copies must be >= 1")
        if hasattr(args, "tol"):
            try:
                tol = Fraction(args.tol)
            except ValueError:
                raise UsageError(f"--tol {args.tol!r} is not a number") from None
            if tol <= 0:
                raise UsageError("--tol must be positive")
        code, payload = args.func(args)
    except NonMonotoneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HEURISTIC
    except (UsageError, ParseError, ScenarioError, ProbabilityError, ResourceLimitError, ValueError) as exc:
        kind = "resource limit" if isinstance(exc, ResourceLimitError) else "error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except LPVerificationError as exc:  # pragma: no cover - would be a solver bug
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {"command": argv, "exit_code": code}
    report.update(payload)
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    if args.json:
        out.write(render_json(report))
    else:
        _print_human(report, out)
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
