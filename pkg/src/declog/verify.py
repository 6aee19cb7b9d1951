"""Bounded, witness-producing checkers for the program-correctness conditions.

Every universal condition is checked over ground instances within the bound
(an instance is "within bound" when each atom argument fits the size bound),
so Verified always means "verified up to bound b".  Search order is clause
order with body variables enumerated in term-size order; the first witness
wins, which keeps witnesses small and runs reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, Optional, Sequence, Tuple

from . import sld
from .herbrand import Signature, _pool_up_to, extend_signature, var_budgets, working_signature
from .reports import (
    Budget,
    BudgetExceeded,
    CheckReport,
    Witness,
    inconclusive,
    refuted,
    verified,
)
from .specs import LevelMapping, Specification, level_of, suitable_for, union_spec
from .syntax import atom_to_str, clause_to_str
from .terms import (
    Atom,
    Clause,
    Program,
    Var,
    apply_atom,
    apply_clause,
    atom_fits,
    atom_ground,
    atom_vars,
    clause_vars,
    mgu,
    rename_apart,
    term_size as term_size_of,
    term_vars,
)


@dataclass
class Split:
    """Subprograms of a base program paired with sub-specifications."""

    base: Program
    parts: list  # list[(clause labels tuple, Specification)]
    name: str = "split"

    def __post_init__(self):
        if not self.parts:
            raise ValueError("a split needs at least one part")
        self.programs = [self.base.restrict(labels) for labels, _ in self.parts]
        self.specs = [spec for _, spec in self.parts]
        self._union = None
        self._sig = None

    def union_spec(self) -> Specification:
        if self._union is None:
            self._union = union_spec(
                "+".join(s.name for s in self.specs), self.specs)
        return self._union

    def signature(self) -> Signature:
        if self._sig is None:
            self._sig = working_signature(self.base, specs=self.specs)
        return self._sig


# --- shared instance enumeration -------------------------------------------------


def _var_pools(vs: Sequence[str], budgets: dict, sig: Signature, bound: int,
               filters: Optional[dict] = None) -> list:
    pools = []
    for v in vs:
        pool = _pool_up_to(sig, budgets.get(v, bound), bound)
        f = filters.get(v) if filters else None
        if f is not None:
            pool = [t for t in pool if f(t)]
        pools.append(pool)
    return pools


def _size_constraints(atoms: Sequence[Atom]) -> dict:
    """For each variable, the argument patterns it occurs in with its
    occurrence count; used to cap candidate sizes against the current
    binding while enumerating (pools are size-ascending, so scans break
    early)."""
    out: dict = {}
    for a in atoms:
        for arg in a.args:
            for v in set(term_vars(arg)):
                n = _occurrences(arg, v)
                out.setdefault(v, []).append((arg, n))
    return out


def _occurrences(t, v: str) -> int:
    if isinstance(t, Var):
        return 1 if t.name == v else 0
    return sum(_occurrences(a, v) for a in t.args)


def _min_size_with(t, binding: dict) -> int:
    from .terms import term_size as _ts

    if isinstance(t, Var):
        got = binding.get(t.name)
        return 1 if got is None else _ts(got)
    return 1 + sum(_min_size_with(a, binding) for a in t.args)


def _dyn_cap(v: str, constraints: dict, binding: dict, bound: int) -> int:
    cap = bound
    for pattern, n in constraints.get(v, ()):
        base = _min_size_with(pattern, binding)  # v unbound: counts 1 per occurrence
        cap = min(cap, (bound - base) // n + 1)
    return cap


def _body_arg_filters(clause: Clause, s: Specification) -> dict:
    """Necessary per-variable filters: a variable standing as a whole argument
    of a body atom must pass the spec's static condition for that argument."""
    filters: dict = {}
    for b in clause.body:
        for i, arg in enumerate(b.args):
            if isinstance(arg, Var):
                f = s.arg_filter(b.pred, len(b.args), i)
                if f is None:
                    continue
                prev = filters.get(arg.name)
                filters[arg.name] = f if prev is None else (lambda t, a=prev, c=f: a(t) and c(t))
    return filters


def _ordered_vars(clause: Clause) -> Tuple[list, dict]:
    """Body variables first (order of first occurrence), then head-only ones;
    maps each body atom to the position after which it is fully ground."""
    vs: list = []
    for b in clause.body:
        atom_vars(b, vs)
    body_count = len(vs)
    atom_vars(clause.head, vs)
    ready: dict = {}
    for bi, b in enumerate(clause.body):
        bvs = atom_vars(b)
        last = max((vs.index(v) for v in bvs), default=-1)
        ready.setdefault(last, []).append(bi)
    return vs, ready


def _implication_scan(clause: Clause, s: Specification, bound: int, sig: Signature,
                      budget: Budget, on_instance: Callable) -> Optional[CheckReport]:
    """Visit every ground instance within the bound whose body atoms all lie
    in s; on_instance(make_instance, head) may return a report to abort with
    (make_instance builds the full ground clause lazily)."""
    vs, ready = _ordered_vars(clause)
    budgets = var_budgets((clause.head,) + tuple(clause.body), bound, bound)
    filters = _body_arg_filters(clause, s)
    pools = _var_pools(vs, budgets, sig, bound, filters)
    all_atoms = (clause.head,) + tuple(clause.body)
    constraints = _size_constraints(all_atoms)
    binding: dict = {}

    # body atoms ground in the clause itself are checked once
    for bi in ready.get(-1, ()):
        ba = clause.body[bi]
        if not atom_fits(ba, bound) or not s.member(ba, budget):
            return None

    nvars = len(vs)
    member = s.member
    tick = budget.tick

    def rec(i: int):
        if i == nvars:
            head = apply_atom(binding, clause.head)
            if not atom_fits(head, bound):
                return None
            return on_instance(lambda: apply_clause(binding, clause), head)
        cap = _dyn_cap(vs[i], constraints, binding, bound)
        checks = ready.get(i, ())
        v = vs[i]
        for t in pools[i]:
            if term_size_of(t) > cap:
                break  # pools ascend by size
            tick()
            binding[v] = t
            ok = True
            for bi in checks:
                ba = apply_atom(binding, clause.body[bi])
                if not atom_fits(ba, bound) or not member(ba):
                    ok = False
                    break
            if ok:
                rep = rec(i + 1)
                if rep is not None:
                    return rep
        binding.pop(v, None)
        return None

    return rec(0)


def _all_instances(clause: Clause, bound: int, sig: Signature, budget: Budget) -> Iterator[Clause]:
    """Every ground instance of the clause with all atoms within the bound."""
    vs = clause_vars(clause)
    all_atoms = (clause.head,) + tuple(clause.body)
    budgets = var_budgets(all_atoms, bound, bound)
    pools = _var_pools(vs, budgets, sig, bound)
    constraints = _size_constraints(all_atoms)
    binding: dict = {}

    def rec(i: int):
        if i == len(vs):
            inst = apply_clause(binding, clause)
            if all(atom_fits(a, bound) for a in (inst.head,) + tuple(inst.body)):
                yield inst
            return
        cap = _dyn_cap(vs[i], constraints, binding, bound)
        for t in pools[i]:
            if term_size_of(t) > cap:
                break
            budget.tick()
            binding[vs[i]] = t
            yield from rec(i + 1)
        binding.pop(vs[i], None)

    yield from rec(0)


def violates_correctness(inst: Clause, s: Specification) -> bool:
    """Single-instance recheck: body in s but head not in s."""
    return all(s.member(b) for b in inst.body) and not s.member(inst.head)


def check_correctness(p: Program, s: Specification, bound: int,
                      sig: Optional[Signature] = None,
                      budget: Optional[Budget] = None) -> CheckReport:
    """Sufficient condition for correctness: for every ground clause instance
    within the bound, body in s implies head in s."""
    if sig is None:
        sig = working_signature(p, specs=[s])
    budget = budget or Budget()
    checked = 0

    def on_instance(make_instance, head: Atom):
        nonlocal checked
        checked += 1
        if not s.member(head):
            inst = make_instance()
            return refuted(
                "check_correctness",
                Witness("clause-instance",
                        "instance of %s has its body in the specification but not its head: %s"
                        % (inst.label, clause_to_str(inst)),
                        {"clause": inst.label, "instance": clause_to_str(inst)}),
                bound, checked)
        return None

    try:
        for c in p.clauses:
            rep = _implication_scan(c, s, bound, sig, budget, on_instance)
            if rep is not None:
                return rep
    except BudgetExceeded as e:
        return inconclusive("check_correctness", str(e), bound, checked)
    return verified("check_correctness", bound, checked)


# --- coverage ---------------------------------------------------------------------


def covering_instances(h: Atom, p: Program, s: Specification, bound: int,
                       sig: Signature, budget: Budget) -> Iterator[Clause]:
    """Ground instances of program clauses with head h and every body atom in
    s; head matched by unification, remaining body variables enumerated up to
    the bound, term-size order, clause order."""
    for c in p.clauses:
        if c.head.pred != h.pred or len(c.head.args) != len(h.args):
            continue
        rc = rename_apart(c, atom_vars(h))
        theta = mgu(rc.head, h)
        if theta is None:
            continue
        grounded = apply_clause(theta, rc)
        vs = clause_vars(grounded)
        budgets = var_budgets(tuple(grounded.body), bound, bound)
        filters = _body_arg_filters(grounded, s)
        pools = _var_pools(vs, budgets, sig, bound, filters)
        for values in product(*pools):
            budget.tick()
            inst = apply_clause(dict(zip(vs, values)), grounded)
            if all(s.member(b, budget) for b in inst.body):
                yield Clause(inst.head, inst.body, c.label)


def is_covered(h: Atom, p: Program, s: Specification, bound: int,
               sig: Optional[Signature] = None, budget: Optional[Budget] = None) -> bool:
    if sig is None:
        sig = working_signature(p, specs=[s])
    budget = budget or Budget()
    return next(covering_instances(h, p, s, bound, sig, budget), None) is not None


def check_covered(h: Atom, p: Program, s: Specification, bound: int,
                  sig: Optional[Signature] = None,
                  budget: Optional[Budget] = None) -> CheckReport:
    """Is h the head of some ground clause instance whose body atoms all lie
    in s?  Verified carries the covering instance; Refuted lists per-clause
    failure reasons."""
    if not atom_ground(h):
        raise ValueError("check_covered requires a ground atom")
    if sig is None:
        sig = working_signature(p, specs=[s])
    budget = budget or Budget()
    try:
        got = next(covering_instances(h, p, s, bound, sig, budget), None)
    except BudgetExceeded as e:
        return inconclusive("check_covered", str(e), bound)
    if got is not None:
        return verified("check_covered", bound, 1,
                        covering_instance=clause_to_str(got), clause=got.label)
    reasons = []
    for c in p.clauses:
        if c.head.pred != h.pred or len(c.head.args) != len(h.args):
            reasons.append("%s: different predicate" % c.label)
        elif mgu(rename_apart(c, atom_vars(h)).head, h) is None:
            reasons.append("%s: head does not unify" % c.label)
        else:
            reasons.append("%s: no body instantiation within the bound lies in %s"
                           % (c.label, s.name))
    return refuted(
        "check_covered",
        Witness("uncovered-atom", "%s is not covered" % atom_to_str(h),
                {"atom": atom_to_str(h)}),
        bound, reason="; ".join(reasons))


def check_semi_completeness(p: Program, s: Specification, bound: int,
                            sig: Optional[Signature] = None,
                            budget: Optional[Budget] = None) -> CheckReport:
    """Every enumerated specified atom must be covered by the program."""
    if sig is None:
        sig = working_signature(p, specs=[s])
    budget = budget or Budget()
    checked = 0
    try:
        for a in s.enumerate(bound, sig, budget):
            checked += 1
            if next(covering_instances(a, p, s, bound, sig, budget), None) is None:
                return refuted(
                    "check_semi_completeness",
                    Witness("uncovered-atom",
                            "specified atom %s is not covered" % atom_to_str(a),
                            {"atom": atom_to_str(a)}),
                    bound, checked)
    except BudgetExceeded as e:
        return inconclusive("check_semi_completeness", str(e), bound, checked)
    return verified("check_semi_completeness", bound, checked)


# --- level-mapping conditions -----------------------------------------------------


def check_recurrent(p: Program, lm: LevelMapping, bound: int,
                    sig: Optional[Signature] = None,
                    budget: Optional[Budget] = None) -> CheckReport:
    """Every ground clause instance within the bound strictly decreases the
    level mapping from head to each body atom."""
    if sig is None:
        sig = working_signature(p)
    budget = budget or Budget()
    checked = 0
    try:
        for c in p.clauses:
            for inst in _all_instances(c, bound, sig, budget):
                checked += 1
                lh = level_of(lm, inst.head)
                if lh is None:
                    return inconclusive(
                        "check_recurrent",
                        "level mapping %s undefined on %s" % (lm.name, atom_to_str(inst.head)),
                        bound, checked)
                for b in inst.body:
                    lb = level_of(lm, b)
                    if lb is None:
                        return inconclusive(
                            "check_recurrent",
                            "level mapping %s undefined on %s" % (lm.name, atom_to_str(b)),
                            bound, checked)
                    if not lh > lb:
                        return refuted(
                            "check_recurrent",
                            Witness("non-decreasing",
                                    "|%s| = %d is not greater than |%s| = %d in instance of %s: %s"
                                    % (atom_to_str(inst.head), lh, atom_to_str(b), lb,
                                       inst.label, clause_to_str(inst)),
                                    {"clause": inst.label, "instance": clause_to_str(inst),
                                     "head_level": lh, "body_level": lb,
                                     "body_atom": atom_to_str(b)}),
                            bound, checked)
    except BudgetExceeded as e:
        return inconclusive("check_recurrent", str(e), bound, checked)
    return verified("check_recurrent", bound, checked)


def check_acceptable(p: Program, s: Specification, lm: LevelMapping, bound: int,
                     sig: Optional[Signature] = None,
                     budget: Optional[Budget] = None) -> CheckReport:
    """Correct w.r.t. s, and every instance decreases into each body atom whose
    preceding body prefix lies in s."""
    if sig is None:
        sig = working_signature(p, specs=[s])
    budget = budget or Budget()
    corr = check_correctness(p, s, bound, sig, budget)
    if not corr.verified:
        rep = CheckReport("check_acceptable", corr.verdict, bound, corr.instances_checked,
                          corr.witness, corr.reason, dict(corr.details))
        rep.details["failed_part"] = "correctness"
        return rep
    checked = 0
    try:
        for c in p.clauses:
            for inst in _all_instances(c, bound, sig, budget):
                checked += 1
                prefix_ok = True
                for i, b in enumerate(inst.body):
                    if prefix_ok:
                        lh = level_of(lm, inst.head)
                        lb = level_of(lm, b)
                        if lh is None or lb is None:
                            bad = inst.head if lh is None else b
                            return inconclusive(
                                "check_acceptable",
                                "level mapping %s undefined on %s" % (lm.name, atom_to_str(bad)),
                                bound, checked)
                        if not lh > lb:
                            return refuted(
                                "check_acceptable",
                                Witness("non-decreasing",
                                        "|%s| = %d is not greater than |%s| = %d (body position %d) in %s"
                                        % (atom_to_str(inst.head), lh, atom_to_str(b), lb,
                                           i + 1, clause_to_str(inst)),
                                        {"clause": inst.label, "instance": clause_to_str(inst),
                                         "position": i + 1, "head_level": lh, "body_level": lb}),
                                bound, checked)
                    if prefix_ok and not s.member(b, budget):
                        prefix_ok = False
    except BudgetExceeded as e:
        return inconclusive("check_acceptable", str(e), bound, checked)
    return verified("check_acceptable", bound, checked)


def check_recurrently_covered(p: Program, s: Specification, lm: LevelMapping, bound: int,
                              sig: Optional[Signature] = None,
                              budget: Optional[Budget] = None) -> CheckReport:
    """Every enumerated specified atom has a covering instance with all levels
    defined, body in s, and a strict level decrease into every body atom.  A
    partial mapping that leaves a needed level undefined refutes."""
    if sig is None:
        sig = working_signature(p, specs=[s])
    budget = budget or Budget()
    checked = 0
    try:
        for a in s.enumerate(bound, sig, budget):
            checked += 1
            la = level_of(lm, a)
            covered = False
            ok = False
            if la is not None:
                for inst in covering_instances(a, p, s, bound, sig, budget):
                    covered = True
                    levels = [level_of(lm, b) for b in inst.body]
                    if all(lb is not None and la > lb for lb in levels):
                        ok = True
                        break
            if not ok:
                if la is None:
                    why = "level mapping %s is undefined on %s" % (lm.name, atom_to_str(a))
                elif not covered:
                    why = "%s is not covered at all" % atom_to_str(a)
                else:
                    why = "no covering instance of %s has defined, strictly smaller body levels" \
                        % atom_to_str(a)
                return refuted(
                    "check_recurrently_covered",
                    Witness("uncovered-atom", why, {"atom": atom_to_str(a)}),
                    bound, checked, reason=why)
    except BudgetExceeded as e:
        return inconclusive("check_recurrently_covered", str(e), bound, checked)
    return verified("check_recurrently_covered", bound, checked)


# --- combined completeness verdicts -------------------------------------------------


STRATEGIES = ("finitetree", "recurrent", "acceptable", "reccovered")


def completeness_verdict(p: Program, s: Specification, strategy: str, bound: int,
                         depth: int = sld.DEFAULT_DEPTH,
                         lm: Optional[LevelMapping] = None,
                         corr_spec: Optional[Specification] = None,
                         sig: Optional[Signature] = None,
                         budget: Optional[Budget] = None) -> CheckReport:
    """Combine the coverage condition with a side condition that upgrades
    semi-completeness to completeness; the verdict text names the route."""
    if strategy not in STRATEGIES:
        raise ValueError("unknown strategy %r (want one of %s)" % (strategy, ", ".join(STRATEGIES)))
    if sig is None:
        sig = working_signature(p, specs=[s] + ([corr_spec] if corr_spec else []))
    budget = budget or Budget()

    if strategy == "reccovered":
        if lm is None:
            raise ValueError("reccovered needs a level mapping")
        rep = check_recurrently_covered(p, s, lm, bound, sig, budget)
        rep.check = "completeness_verdict"
        if rep.verified:
            rep.details["route"] = "every specified atom recurrently covered (level mapping %s)" % lm.name
        return rep

    semi = check_semi_completeness(p, s, bound, sig, budget)
    if not semi.verified:
        rep = CheckReport("completeness_verdict", semi.verdict, bound,
                          semi.instances_checked, semi.witness, semi.reason, dict(semi.details))
        rep.details["failed_part"] = "semi-completeness"
        return rep

    if strategy == "finitetree":
        checked = 0
        try:
            for a in s.enumerate(bound, sig, budget):
                checked += 1
                tree = sld.build_sld_tree(p, (a,), sld.LEFTMOST, depth)
                if tree.truncated:
                    return inconclusive(
                        "completeness_verdict",
                        "no finite search tree established for %s within depth %d"
                        % (atom_to_str(a), depth),
                        bound, checked, failed_part="finite-tree")
        except BudgetExceeded as e:
            return inconclusive("completeness_verdict", str(e), bound, checked)
        return verified("completeness_verdict", bound, checked,
                        route="semi-complete and every specified query has a finite search tree (depth %d)" % depth)

    if strategy == "recurrent":
        if lm is None:
            raise ValueError("recurrent needs a level mapping")
        side = check_recurrent(p, lm, bound, sig, budget)
        if not side.verified:
            rep = CheckReport("completeness_verdict", side.verdict, bound,
                              side.instances_checked, side.witness, side.reason, dict(side.details))
            rep.details["failed_part"] = "recurrence"
            return rep
        return verified("completeness_verdict", bound, side.instances_checked,
                        route="semi-complete and recurrent (level mapping %s)" % lm.name)

    # acceptable; the correctness side may use a different specification
    if lm is None:
        raise ValueError("acceptable needs a level mapping")
    side = check_acceptable(p, corr_spec or s, lm, bound, sig, budget)
    if not side.verified:
        rep = CheckReport("completeness_verdict", side.verdict, bound,
                          side.instances_checked, side.witness, side.reason, dict(side.details))
        rep.details["failed_part"] = "acceptability"
        return rep
    return verified("completeness_verdict", bound, side.instances_checked,
                    route="semi-complete and acceptable w.r.t. %s (level mapping %s)"
                          % ((corr_spec or s).name, lm.name))


# --- split-level checks ---------------------------------------------------------------


def check_split(sp: Split, bound: int, budget: Optional[Budget] = None) -> CheckReport:
    """For each part, every atom of its sub-specification is covered by its
    subprogram w.r.t. the union specification."""
    sig = sp.signature()
    union = sp.union_spec()
    budget = budget or Budget()
    checked = 0
    try:
        for i, (prog_i, spec_i) in enumerate(zip(sp.programs, sp.specs), start=1):
            for a in spec_i.enumerate(bound, sig, budget):
                checked += 1
                if next(covering_instances(a, prog_i, union, bound, sig, budget), None) is None:
                    return refuted(
                        "check_split",
                        Witness("split-atom",
                                "part %d: %s is not covered by its subprogram" % (i, atom_to_str(a)),
                                {"part": i, "atom": atom_to_str(a)}),
                        bound, checked)
    except BudgetExceeded as e:
        return inconclusive("check_split", str(e), bound, checked)
    return verified("check_split", bound, checked, parts=len(sp.parts))


def check_suitability(sp: Split, i: int, a: Atom, bound: int,
                      budget: Optional[Budget] = None) -> CheckReport:
    """Every ground instance of the atom within the bound that lies in the
    union specification must lie in part i's sub-specification."""
    if not 1 <= i <= len(sp.parts):
        raise ValueError("part index %d out of range" % i)
    sig = extend_signature(sp.signature(), queries=[(a,)])
    budget = budget or Budget()
    try:
        ok, wit = suitable_for(a, sp.specs[i - 1], sp.union_spec(), sig, bound, budget)
    except BudgetExceeded as e:
        return inconclusive("check_suitability", str(e), bound)
    if ok:
        return verified("check_suitability", bound, part=i, atom=atom_to_str(a))
    return refuted(
        "check_suitability",
        Witness("unsuitable",
                "instance %s of %s is specified outside part %d"
                % (atom_to_str(wit), atom_to_str(a), i),
                {"part": i, "atom": atom_to_str(a), "instance": atom_to_str(wit)}),
        bound)


def check_pruned_answers_correct(t: sld.SldTree, s: Specification, bound: int,
                                 sig: Optional[Signature] = None,
                                 budget: Optional[Budget] = None) -> CheckReport:
    """At every node where atom A and subprogram i were selected, each ground
    instance (within bound) of a clause of that subprogram whose head is an
    instance of A must satisfy: body in s implies head in s.  Then every
    answer of the tree is correct w.r.t. s."""
    if t.kind != "cssld" or not t.programs:
        raise ValueError("check_pruned_answers_correct needs a csSLD tree with its subprograms")
    if sig is None:
        sig = working_signature(t.programs[0], specs=[s])
    sig = extend_signature(sig, queries=[t.query], specs=[s])
    budget = budget or Budget()
    checked = 0

    try:
        for n in sorted(t.nodes.values(), key=lambda n: n.id):
            if n.selected_program is None or n.selected_index is None:
                continue
            a = n.query[n.selected_index]
            program = t.programs[n.selected_program - 1]
            for c in program.clauses:
                if c.head.pred != a.pred or len(c.head.args) != len(a.args):
                    continue
                rc = rename_apart(c, atom_vars(a))
                theta = mgu(rc.head, a)
                if theta is None:
                    continue
                narrowed = apply_clause(theta, rc)

                def on_instance(make_instance, head: Atom, node=n, label=c.label):
                    nonlocal checked
                    checked += 1
                    if not s.member(head):
                        inst = make_instance()
                        return refuted(
                            "check_pruned_answers_correct",
                            Witness("clause-instance",
                                    "node %d (program %d): instance of %s violates the head condition: %s"
                                    % (node.id, node.selected_program, label, clause_to_str(inst)),
                                    {"node": node.id, "program": node.selected_program,
                                     "clause": label, "instance": clause_to_str(inst)}),
                            bound, checked)
                    return None

                rep = _implication_scan(narrowed, s, bound, sig, budget, on_instance)
                if rep is not None:
                    return rep
    except BudgetExceeded as e:
        return inconclusive("check_pruned_answers_correct", str(e), bound, checked)
    return verified("check_pruned_answers_correct", bound, checked,
                    conclusion="every answer of the tree is correct w.r.t. %s" % s.name)
