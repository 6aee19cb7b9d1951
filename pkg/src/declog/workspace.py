"""Workspace loading and named-check execution.

A workspace directory holds programs/*.pl, specs/*.spec, splits/*.split,
rules/*.csel plus sessions/ and jobs/ state written by the service, and an
optional declog.config (key=value) with defaults for bound/depth/format.
Both the CLI and the service resolve artifacts and run checks through here,
so their report payloads are identical.
"""

from __future__ import annotations

from pathlib import Path
from . import dsl, sld, verify
from .herbrand import answers_model_check, bounded_lfp, working_signature
from .reports import Budget, CheckReport
from .specs import LevelMapping, Specification, derive_shortest_path_levels
from .syntax import parse_atom, parse_program, parse_query
from .terms import Program

DEFAULT_BOUND = 6
DEFAULT_DEPTH = 32


class WorkspaceError(Exception):
    """A referenced workspace artifact does not exist."""


class Workspace:
    def __init__(self, root):
        self.root = Path(root)
        self._spec_cache = None
        self._program_cache: dict = {}

    # -- config ------------------------------------------------------------

    def config(self) -> dict:
        cfg = {"bound": DEFAULT_BOUND, "depth": DEFAULT_DEPTH, "format": "text",
               "max_instances": 1_000_000, "max_seconds": 60.0}
        path = self.root / "declog.config"
        if path.exists():
            for line in path.read_text().splitlines():
                line = line.split("%")[0].strip()
                if not line or "=" not in line:
                    continue
                k, v = (x.strip() for x in line.split("=", 1))
                if k in ("bound", "depth", "max_instances"):
                    cfg[k] = int(v)
                elif k == "max_seconds":
                    cfg[k] = float(v)
                else:
                    cfg[k] = v
        return cfg

    def budget(self) -> Budget:
        cfg = self.config()
        return Budget(max_instances=cfg["max_instances"], max_seconds=cfg["max_seconds"])

    # -- artifact resolution --------------------------------------------------

    def program_path(self, name: str) -> Path:
        for candidate in (self.root / name, self.root / "programs" / name,
                          self.root / "programs" / (name + ".pl")):
            if candidate.is_file():
                return candidate
        raise WorkspaceError("program file not found: %s" % name)

    def program(self, name: str) -> Program:
        path = self.program_path(name)
        key = (str(path), path.stat().st_mtime_ns)
        if key not in self._program_cache:
            self._program_cache[key] = parse_program(path.read_text())
        return self._program_cache[key]

    def _load_specs(self):
        if self._spec_cache is not None:
            return self._spec_cache
        raws: list = []
        lms: dict = {}
        spec_dir = self.root / "specs"
        if spec_dir.is_dir():
            for path in sorted(spec_dir.glob("*.spec")):
                sf = dsl.parse_spec_file(path.read_text(), base_dir=path.parent)
                raws.extend(sf.specs)
                for name, lm in sf.lms.items():
                    if name in lms:
                        raise dsl.DslError("duplicate level mapping %r" % name)
                    lms[name] = lm
        self._spec_cache = (dsl.resolve_specs(raws), lms)
        return self._spec_cache

    def spec(self, name: str) -> Specification:
        specs, _ = self._load_specs()
        if name not in specs:
            raise WorkspaceError("unknown specification: %s" % name)
        return specs[name]

    def lm(self, name: str) -> LevelMapping:
        _, lms = self._load_specs()
        if name not in lms:
            raise WorkspaceError("unknown level mapping: %s" % name)
        return lms[name]

    def split(self, name: str) -> verify.Split:
        split_dir = self.root / "splits"
        if split_dir.is_dir():
            for path in sorted(split_dir.glob("*.split")):
                for d in dsl.parse_split_file(path.read_text()):
                    if d.name == name:
                        base = self.program(d.program_path)
                        parts = [(labels, self.spec(sn)) for labels, sn in d.parts]
                        return verify.Split(base, parts, name=name)
        raise WorkspaceError("unknown split: %s" % name)

    def csel(self, name: str) -> sld.CSelectionRule:
        rules_dir = self.root / "rules"
        if rules_dir.is_dir():
            for path in sorted(rules_dir.glob("*.csel")):
                for d in dsl.parse_csel_file(path.read_text()):
                    if d.name == name:
                        return d.rule
        raise WorkspaceError("unknown c-selection rule: %s" % name)

    def resolve_lm(self, params: dict, program: Program) -> LevelMapping:
        if params.get("lm"):
            return self.lm(params["lm"])
        if params.get("lm_shortest_path"):
            p_name, e_name = (x.strip() for x in params["lm_shortest_path"].split(","))
            return derive_shortest_path_levels(program, (p_name, e_name))
        raise WorkspaceError("this check needs --lm or --lm-shortest-path")


CHECK_KINDS = ("correctness", "semicomplete", "recurrent", "acceptable", "reccovered",
               "split", "suitability", "complete", "treecompat", "treecomplete",
               "prunedanswers", "answersmodel")


def build_tree(ws: Workspace, params: dict) -> sld.SldTree:
    query = parse_query(params["query"])
    depth = int(params.get("depth") or ws.config()["depth"])
    if params.get("split"):
        sp = ws.split(params["split"])
        cr = ws.csel(params["rules"]) if params.get("rules") else None
        if cr is None:
            raise WorkspaceError("a csSLD tree needs --rules")
        tree = sld.build_cssld_tree(sp.programs, cr, query, depth)
        tree.programs = tuple(sp.programs)
        return tree
    program = ws.program(params["program"])
    return sld.build_sld_tree(program, query, sld.LEFTMOST, depth)


def run_check(ws: Workspace, params: dict) -> CheckReport:
    """Execute one named check against workspace artifacts."""
    kind = params.get("kind")
    if kind not in CHECK_KINDS:
        raise WorkspaceError("unknown check kind: %s" % kind)
    cfg = ws.config()
    bound = int(params.get("bound") or cfg["bound"])
    depth = int(params.get("depth") or cfg["depth"])
    budget = ws.budget()

    if kind == "split":
        return verify.check_split(ws.split(params["split"]), bound, budget)
    if kind == "suitability":
        sp = ws.split(params["split"])
        atom = parse_atom(params["atom"])
        return verify.check_suitability(sp, int(params["part"]), atom, bound, budget)
    if kind in ("treecompat", "treecomplete", "prunedanswers"):
        tree = build_tree(ws, params)
        if kind == "treecompat":
            sp = ws.split(params["split"])
            return sld.check_tree_compatible(tree, sp, bound, budget=budget)
        spec = ws.spec(params["spec"])
        if kind == "treecomplete":
            sig = None
            if params.get("split"):
                sp = ws.split(params["split"])
                sig = working_signature(sp.base, specs=list(sp.specs) + [spec],
                                        queries=[tree.query])
            return sld.check_tree_complete(tree, spec, bound, sig=sig, budget=budget)
        return verify.check_pruned_answers_correct(tree, spec, bound, budget=budget)

    program = ws.program(params["program"])
    if kind == "answersmodel":
        return answers_model_check(program, bound, depth, budget=budget)
    if kind == "correctness":
        return verify.check_correctness(program, ws.spec(params["spec"]), bound, budget=budget)
    if kind == "semicomplete":
        return verify.check_semi_completeness(program, ws.spec(params["spec"]), bound,
                                              budget=budget)
    if kind == "recurrent":
        return verify.check_recurrent(program, ws.resolve_lm(params, program), bound,
                                      budget=budget)
    if kind == "acceptable":
        return verify.check_acceptable(program, ws.spec(params["spec"]),
                                       ws.resolve_lm(params, program), bound, budget=budget)
    if kind == "reccovered":
        return verify.check_recurrently_covered(program, ws.spec(params["spec"]),
                                                ws.resolve_lm(params, program), bound,
                                                budget=budget)
    # combined completeness verdict
    via = params.get("via") or "finitetree"
    lm = None
    if via in ("recurrent", "acceptable", "reccovered"):
        lm = ws.resolve_lm(params, program)
    corr_spec = ws.spec(params["corr_spec"]) if params.get("corr_spec") else None
    return verify.completeness_verdict(program, ws.spec(params["spec"]), via, bound,
                                       depth=depth, lm=lm, corr_spec=corr_spec, budget=budget)


def model_listing(ws: Workspace, program_name: str, bound: int) -> str:
    program = ws.program(program_name)
    return bounded_lfp(program, bound).to_text()
