"""Command-line front door.

Exit status: 0 verified/success, 1 refuted/symptom-confirmed, 2 inconclusive,
3 usage or parse error.  Machine output (--format machine) uses the same JSON
shapes as the session service.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import diagnosis as diag
from . import sld
from . import workspace as wsmod
from .dsl import DslError
from .herbrand import working_signature
from .reports import BudgetExceeded, CheckReport
from .specs import ApproxSpec, GuardError
from .syntax import ParseError, atom_to_str, parse_program, parse_query, program_to_str
from .workspace import Workspace, WorkspaceError

EXIT_VERIFIED = 0
EXIT_REFUTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


def _report_exit(report: CheckReport, fmt: str) -> int:
    if fmt == "machine":
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        print(report.render_text())
    if report.verified:
        return EXIT_VERIFIED
    if report.refuted:
        return EXIT_REFUTED
    return EXIT_INCONCLUSIVE


def _add_check_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec")
    p.add_argument("--corr-spec", dest="corr_spec")
    p.add_argument("--lm")
    p.add_argument("--lm-shortest-path", dest="lm_shortest_path", metavar="P,E")
    p.add_argument("--split")
    p.add_argument("--part", type=int)
    p.add_argument("--atom")
    p.add_argument("--query")
    p.add_argument("--rules")
    p.add_argument("--via", choices=("recurrent", "finitetree", "acceptable", "reccovered"))
    p.add_argument("--bound", type=int)
    p.add_argument("--depth", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="declog")
    ap.add_argument("--workspace", default=".", help="workspace directory (default: .)")
    ap.add_argument("--format", choices=("text", "machine"), default=None)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("parse", help="parse a program and print its canonical form")
    p.add_argument("file")

    p = sub.add_parser("model", help="bounded least-model listing, one atom per line")
    p.add_argument("file")
    p.add_argument("--bound", type=int)

    p = sub.add_parser("check", help="run one bounded checker")
    p.add_argument("kind", choices=wsmod.CHECK_KINDS)
    p.add_argument("file", nargs="?")
    _add_check_opts(p)

    p = sub.add_parser("complete", help="combined completeness verdict")
    p.add_argument("file")
    _add_check_opts(p)

    p = sub.add_parser("run", help="run a query, print answers")
    p.add_argument("file", nargs="?")
    p.add_argument("query")
    p.add_argument("--split")
    p.add_argument("--rules")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("tree", help="dump the SLD/csSLD tree for a query")
    p.add_argument("file", nargs="?")
    p.add_argument("query")
    p.add_argument("--split")
    p.add_argument("--rules")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("diagnose", help="declarative diagnosis")
    p.add_argument("kind", choices=(diag.INCORRECTNESS, diag.INCOMPLETENESS))
    p.add_argument("file")
    p.add_argument("--query", required=True)
    p.add_argument("--corr-spec", dest="corr_spec")
    p.add_argument("--compl-spec", dest="compl_spec")
    p.add_argument("--interactive", action="store_true")
    p.add_argument("--answers", help="comma-separated yes/no list (scripted oracle)")
    p.add_argument("--no-symptom-check", action="store_true",
                   help="incompleteness: try every required instance, skip the symptom test")
    p.add_argument("--bound", type=int)
    p.add_argument("--depth", type=int)

    p = sub.add_parser("serve", help="start the session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", help="static directory to serve at /ui (the built frontend)")

    return ap


def _params_from(args, kind: str) -> dict:
    params = {"kind": kind}
    for key in ("spec", "corr_spec", "lm", "lm_shortest_path", "split", "part",
                "atom", "query", "rules", "via", "bound", "depth"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    if getattr(args, "file", None):
        params["program"] = args.file
    return params


def _cmd_parse(ws: Workspace, args, fmt: str) -> int:
    prog = parse_program(Path(ws.program_path(args.file)).read_text())
    if fmt == "machine":
        print(json.dumps({
            "clauses": [{"label": c.label, "text": str(c)} for c in prog.clauses],
            "warnings": prog.warnings,
        }, sort_keys=True))
    else:
        sys.stdout.write(program_to_str(prog))
        for w in prog.warnings:
            print("warning: %s" % w, file=sys.stderr)
    return EXIT_VERIFIED


def _cmd_run(ws: Workspace, args, fmt: str) -> int:
    params = {"query": args.query, "depth": args.depth,
              "split": args.split, "rules": args.rules, "program": args.file}
    tree = wsmod.build_tree(ws, params)
    answers = [" , ".join(atom_to_str(a) for a in ans) if ans else "true"
               for ans in tree.answers]
    if fmt == "machine":
        print(json.dumps({"answers": answers, "truncated": tree.truncated}, sort_keys=True))
    else:
        if not answers:
            print("no answers")
        for a in answers:
            print(a)
        if tree.truncated:
            print("(depth limit hit: answer set may be incomplete)", file=sys.stderr)
    return EXIT_VERIFIED


def _cmd_tree(ws: Workspace, args, fmt: str) -> int:
    params = {"query": args.query, "depth": args.depth,
              "split": args.split, "rules": args.rules, "program": args.file}
    tree = wsmod.build_tree(ws, params)
    if fmt == "machine":
        print(json.dumps(sld.tree_to_json(tree), sort_keys=True))
    else:
        sys.stdout.write(sld.tree_to_text(tree))
    return EXIT_VERIFIED


def _cmd_diagnose(ws: Workspace, args, fmt: str) -> int:
    cfg = ws.config()
    bound = args.bound or cfg["bound"]
    depth = args.depth or cfg["depth"]
    program = ws.program(args.file)
    query = parse_query(args.query)

    corr = ws.spec(args.corr_spec) if args.corr_spec else None
    compl = ws.spec(args.compl_spec) if args.compl_spec else None
    ap = ApproxSpec(s_compl=compl or corr, s_corr=corr or compl) if (corr or compl) else None
    sig = working_signature(program, specs=[s for s in (corr, compl) if s], queries=[query])

    def interactive_ask(atom, _path):
        while True:
            raw = input("%s? [y/n] " % atom_to_str(atom)).strip().lower()
            if raw in ("y", "yes"):
                return True
            if raw in ("n", "no"):
                return False

    if args.kind == diag.INCORRECTNESS:
        tree = diag.proof_tree(program, query, depth)
        if tree is None:
            print("query has no success within depth %d - nothing to diagnose" % depth,
                  file=sys.stderr)
            return EXIT_INCONCLUSIVE
        if args.interactive:
            oracle = diag.callback_oracle(interactive_ask, diag.INCORRECTNESS)
        elif args.answers:
            oracle = diag.scripted_oracle(args.answers.split(","), diag.INCORRECTNESS)
        elif ap is not None:
            oracle = diag.spec_oracle(ap, diag.INCORRECTNESS, bound, sig)
        else:
            print("diagnose incorrectness needs --corr-spec, --interactive or --answers",
                  file=sys.stderr)
            return EXIT_USAGE
        result = diag.diagnose_incorrectness(tree, oracle)
    else:
        if args.interactive:
            oracle = diag.callback_oracle(interactive_ask, diag.INCOMPLETENESS)
        elif args.answers:
            oracle = diag.scripted_oracle(args.answers.split(","), diag.INCOMPLETENESS)
        elif ap is not None:
            oracle = diag.spec_oracle(ap, diag.INCOMPLETENESS, bound, sig)
        else:
            print("diagnose incompleteness needs --compl-spec, --interactive or --answers",
                  file=sys.stderr)
            return EXIT_USAGE
        if compl is None:
            print("diagnose incompleteness needs --compl-spec (the candidate generator)",
                  file=sys.stderr)
            return EXIT_USAGE
        result = diag.diagnose_incompleteness(program, query, compl, oracle, bound, depth,
                                              sig, require_symptom=not args.no_symptom_check)

    if fmt == "machine":
        print(json.dumps(result.to_json(), sort_keys=True))
    else:
        print(result.render_text())
    if result.kind in ("incorrect-clause-instance", "uncovered-atom"):
        return EXIT_REFUTED
    if result.kind == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_VERIFIED


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    ws = Workspace(args.workspace)
    fmt = args.format or ws.config().get("format", "text")
    try:
        if args.cmd == "parse":
            return _cmd_parse(ws, args, fmt)
        if args.cmd == "model":
            bound = args.bound or ws.config()["bound"]
            sys.stdout.write(wsmod.model_listing(ws, args.file, bound))
            return EXIT_VERIFIED
        if args.cmd == "check":
            return _report_exit(wsmod.run_check(ws, _params_from(args, args.kind)), fmt)
        if args.cmd == "complete":
            return _report_exit(wsmod.run_check(ws, _params_from(args, "complete")), fmt)
        if args.cmd == "run":
            return _cmd_run(ws, args, fmt)
        if args.cmd == "tree":
            return _cmd_tree(ws, args, fmt)
        if args.cmd == "diagnose":
            return _cmd_diagnose(ws, args, fmt)
        if args.cmd == "serve":
            import uvicorn

            from .service import create_app

            uvicorn.run(create_app(ws.root, ui_dir=args.ui), host=args.host, port=args.port)
            return EXIT_VERIFIED
    except diag.NotASymptom as e:
        print(str(e))
        return EXIT_VERIFIED
    except (ParseError, DslError, WorkspaceError, GuardError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print("inconclusive: %s" % e, file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
