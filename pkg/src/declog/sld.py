"""SLD and csSLD tree construction, answer extraction, and tree-level audits.

Trees are complete up to a depth limit (resolution steps along a branch).
Node expansion order and answer order follow clause order with the selected
atom chosen by the selection rule, so dumps are stable across runs.

A csSLD tree expands each node only with the clauses of the subprogram chosen
by the c-selection rule; choosing STOP makes the node a pruned leaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import builtins, specs as specs_mod
from .herbrand import (
    Signature,
    _pool_up_to,
    enumerate_terms,
    extend_signature,
    var_budgets,
    working_signature,
)
from .reports import Budget, BudgetExceeded, CheckReport, Witness, inconclusive, refuted, verified
from .syntax import atom_to_str, query_to_str, term_to_str
from .terms import (
    Atom,
    Clause,
    Program,
    Query,
    Subst,
    Var,
    apply_atom,
    apply_query,
    atom_fits,
    atom_ground,
    clause_vars,
    compose,
    is_variant_query,
    match_atom,
    may_unify,
    mgu,
    query_vars,
    rename_apart,
    restrict,
)

DEFAULT_DEPTH = 64

SUCCESS = "success"
FAILURE = "failure"
PRUNED = "pruned"
DEPTH_LIMIT = "depth-limit"
INNER = "inner"


@dataclass(frozen=True)
class SelectionRule:
    kind: str  # leftmost | rightmost | by-script
    script: tuple = ()  # ordered atom patterns; first match picks the position

    def select(self, q: Query) -> int:
        if self.kind == "leftmost":
            return 0
        if self.kind == "rightmost":
            return len(q) - 1
        for pat in self.script:
            for i, a in enumerate(q):
                if match_atom(pat, a) is not None:
                    return i
        return 0


LEFTMOST = SelectionRule("leftmost")
RIGHTMOST = SelectionRule("rightmost")

STOP = 0  # c-selection target for the empty program


@dataclass(frozen=True)
class CsRule:
    pattern: Atom
    guard: tuple  # tuple of specs.Literal, checked on the matched bindings
    target: int  # 1-based program index, or STOP


@dataclass(frozen=True)
class CSelectionRule:
    """Static clause-selection: the atom strategy picks the position, then the
    first pattern rule matching the selected atom picks the subprogram."""

    rules: tuple  # tuple[CsRule, ...]
    default: int
    atom_strategy: SelectionRule = LEFTMOST
    name: str = ""

    def choose(self, atom: Atom) -> int:
        for r in self.rules:
            b = match_atom(r.pattern, atom)
            if b is None:
                continue
            if all(specs_mod.check_literal(lit, b) for lit in r.guard):
                return r.target
        return self.default


@dataclass
class Node:
    id: int
    query: Query
    status: str
    selected_index: Optional[int] = None
    selected_program: Optional[int] = None  # 1-based; STOP recorded via status
    edges: list = field(default_factory=list)  # (clause_label, mgu: Subst, child_id)


@dataclass
class SldTree:
    kind: str  # sld | cssld
    query: Query
    root: int
    nodes: dict
    answers: list  # deduplicated root-query instances, discovery order
    truncated: bool
    depth: int
    programs: tuple = ()  # csSLD only: the subprograms nodes select from

    def leaf_statuses(self) -> dict:
        out: dict = {}
        for n in self.nodes.values():
            if n.status != INNER:
                out[n.status] = out.get(n.status, 0) + 1
        return out

    def expanded_nodes(self) -> list:
        return [n for n in self.nodes.values() if n.selected_index is not None]


class _Builder:
    def __init__(self, programs: Sequence[Program], crule: Optional[CSelectionRule],
                 sel: SelectionRule, depth: int, max_nodes: int,
                 prune_size_bound: Optional[int] = None):
        self.programs = programs
        self.crule = crule
        self.sel = sel
        self.depth = depth
        self.max_nodes = max_nodes
        self.prune_size_bound = prune_size_bound
        self.nodes: dict = {}
        self.answers: list = []
        self.truncated = False
        self.counter = 0
        all_preds: set = set()
        for p in programs:
            all_preds |= p.predicates()
        self.preds = all_preds

    def new_node(self, q: Query, status: str) -> Node:
        self.counter += 1
        n = Node(self.counter, q, status)
        self.nodes[n.id] = n
        return n

    def add_answer(self, root_query: Query, acc: Subst) -> None:
        ans = apply_query(acc, root_query)
        if not any(is_variant_query(ans, old) for old in self.answers):
            self.answers.append(ans)

    def expand(self, root_query: Query, q: Query, d: int, avoid: set, acc: Subst) -> int:
        if not q:
            node = self.new_node(q, SUCCESS)
            self.add_answer(root_query, acc)
            return node.id
        if self.prune_size_bound is not None and any(
                _min_ground_size_exceeds(a, self.prune_size_bound)
                for a in apply_query(acc, root_query) + q):
            # every answer instance from this subtree outgrows the bound;
            # sound to drop when only bound-limited instances matter
            return self.new_node(q, PRUNED).id
        if d <= 0 or self.counter >= self.max_nodes:
            self.truncated = True
            return self.new_node(q, DEPTH_LIMIT).id

        pos = self.sel.select(q) if self.crule is None else self.crule.atom_strategy.select(q)
        atom = q[pos]
        node = self.new_node(q, INNER)
        node.selected_index = pos

        if builtins.is_builtin(atom.pred, len(atom.args), self.preds):
            if builtins.eval_builtin(atom):
                rest = q[:pos] + q[pos + 1:]
                child = self.expand(root_query, rest, d - 1, avoid, acc)
                node.edges.append(("builtin", {}, child))
            else:
                node.status = FAILURE
            if not node.edges and node.status == INNER:
                node.status = FAILURE
            return node.id

        if self.crule is None:
            program = self.programs[0]
        else:
            target = self.crule.choose(atom)
            if target == STOP:
                node.status = PRUNED
                return node.id
            node.selected_program = target
            program = self.programs[target - 1]

        for c in program.clauses:
            if not may_unify(c.head, atom):
                continue
            rc = rename_apart(c, avoid)
            theta = mgu(atom, rc.head)
            if theta is None:
                continue
            resolvent = apply_query(theta, q[:pos] + tuple(rc.body) + q[pos + 1:])
            child_avoid = avoid | {v for v in _clause_var_names(rc)} | set(query_vars(resolvent))
            child = self.expand(root_query, resolvent, d - 1, child_avoid, compose(acc, theta))
            node.edges.append((c.label, theta, child))
        if not node.edges:
            node.status = FAILURE
        return node.id


def _clause_var_names(c: Clause):
    from .terms import clause_vars

    return clause_vars(c)


def _min_ground_size_exceeds(a: Atom, bound: int) -> bool:
    def min_size(t) -> int:
        if isinstance(t, Var):
            return 1
        return 1 + sum(min_size(x) for x in t.args)

    return any(min_size(t) > bound for t in a.args)


def build_sld_tree(p: Program, q: Query, sel: SelectionRule = LEFTMOST,
                   depth: int = DEFAULT_DEPTH, max_nodes: int = 500_000,
                   prune_size_bound=None) -> SldTree:
    """Complete SLD tree up to the depth limit; depth-limit leaves are recorded,
    not errors.  With prune_size_bound set, queries that no longer have any
    ground instance within that bound become pruned leaves (used internally
    by bounded sweeps)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    b = _Builder([p], None, sel, depth, max_nodes, prune_size_bound)
    root = b.expand(q, q, depth, set(query_vars(q)), {})
    return SldTree("sld", q, root, b.nodes, b.answers, b.truncated, depth)


def build_cssld_tree(programs: Sequence[Program], cr: CSelectionRule, q: Query,
                     depth: int = DEFAULT_DEPTH, max_nodes: int = 500_000) -> SldTree:
    """csSLD tree: each node expands only with the subprogram selected by the
    c-selection rule for its selected atom."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not programs:
        raise ValueError("need at least one subprogram")
    for r in cr.rules:
        if r.target != STOP and not (1 <= r.target <= len(programs)):
            raise ValueError("c-selection target %d out of range" % r.target)
    if cr.default != STOP and not (1 <= cr.default <= len(programs)):
        raise ValueError("default target %d out of range" % cr.default)
    b = _Builder(programs, cr, cr.atom_strategy, depth, max_nodes)
    root = b.expand(q, q, depth, set(query_vars(q)), {})
    return SldTree("cssld", q, root, b.nodes, b.answers, b.truncated, depth,
                   programs=tuple(programs))


def answers(t: SldTree) -> list:
    """Root query instantiated by each success branch, deduplicated up to
    variable renaming."""
    return list(t.answers)


# --- first-success resolution with proof skeletons --------------------------------


def solve_first(p: Program, q: Query, depth: int = DEFAULT_DEPTH):
    """First success (leftmost selection, clause order, depth-first).

    Returns (answer substitution restricted to query variables, skeletons),
    where each skeleton is (atom, clause_label, child_skeletons) fully
    instantiated by the computed answer; None when no success within depth.
    """
    preds = p.predicates()
    avoid = set(query_vars(q))
    cvars = {c.label: clause_vars(c) for c in p.clauses}

    def solve(goals: tuple, subst: Subst, d: int):
        if not goals:
            yield subst, (), d
            return
        if d <= 0:
            return
        first, rest = goals[0], goals[1:]
        a = apply_atom(subst, first)
        if builtins.is_builtin(a.pred, len(a.args), preds):
            if builtins.eval_builtin(a):
                for s2, skels, d2 in solve(rest, subst, d - 1):
                    yield s2, ((a, "builtin", ()),) + skels, d2
            return
        for c in p.clauses:
            if not may_unify(c.head, a):
                continue
            cv = cvars[c.label]
            if avoid.isdisjoint(cv):
                rc = c
                avoid.update(cv)
            else:
                rc = rename_apart(c, avoid)
                avoid.update(_clause_var_names(rc))
            theta = mgu(a, rc.head)
            if theta is None:
                continue
            s2 = compose(subst, theta)
            for s3, body_skels, d2 in solve(tuple(rc.body), s2, d - 1):
                node = (a, c.label, body_skels)
                for s4, rest_skels, d3 in solve(rest, s3, d2):
                    yield s4, (node,) + rest_skels, d3

    for s, skels, _d in solve(q, {}, depth):
        final = restrict(s, query_vars(q))

        def inst(nodes):
            return tuple((apply_atom(s, a), lbl, inst(ch)) for a, lbl, ch in nodes)

        return final, inst(skels)
    return None


def succeeds(p: Program, q: Query, depth: int = DEFAULT_DEPTH,
             memo: Optional[dict] = None) -> Optional[bool]:
    """Three-valued success: True when a derivation is found, False when the
    search space is provably exhausted, None when the depth limit cut some
    branch (unknown).

    Ground subgoals are solved independently (their success binds nothing) and
    may be tabled across calls by passing a shared memo dict; a negative memo
    entry is only recorded when its search was clean, i.e. hit neither the
    depth limit nor an in-progress ancestor call.  Ground subcalls restart
    with the full depth; the depth limit therefore guards recursion through
    non-ground structure rather than overall derivation length.
    """
    preds = p.predicates()
    avoid = set(query_vars(q))
    cvars = {c.label: clause_vars(c) for c in p.clauses}
    if memo is None:
        memo = {}

    def derivable(a: Atom, stack: frozenset):
        got = memo.get(a)
        if got is not None:
            return got, True
        if a in stack:
            return False, False  # cutting loops loses no minimal derivation
        if len(stack) >= depth:
            return False, False  # ground-call nesting is depth-guarded too
        stack = stack | {a}
        clean_all = True
        for c in p.clauses:
            if not may_unify(c.head, a):
                continue
            theta = mgu(c.head, a)
            if theta is None:
                continue
            ok, clean = solve(apply_query(theta, tuple(c.body)), {}, depth, stack)
            if ok:
                memo[a] = True
                return True, True
            clean_all = clean_all and clean
        if clean_all:
            memo[a] = False
        return False, clean_all

    def solve(goals: tuple, subst: Subst, d: int, stack: frozenset):
        if not goals:
            return True, True
        first, rest = goals[0], goals[1:]
        a = apply_atom(subst, first)
        if builtins.is_builtin(a.pred, len(a.args), preds):
            if not builtins.eval_builtin(a):
                return False, True
            return solve(rest, subst, d, stack)
        if atom_ground(a):
            ok, clean = derivable(a, stack)
            if not ok:
                return False, clean
            ok2, clean2 = solve(rest, subst, d, stack)
            return ok2, clean and clean2
        if d <= 0:
            return False, False
        clean_all = True
        for c in p.clauses:
            if not may_unify(c.head, a):
                continue
            cv = cvars[c.label]
            if avoid.isdisjoint(cv):
                rc = c
                avoid.update(cv)
            else:
                rc = rename_apart(c, avoid)
                avoid.update(_clause_var_names(rc))
            theta = mgu(a, rc.head)
            if theta is None:
                continue
            ok, clean = solve(tuple(rc.body) + rest, compose(subst, theta), d - 1, stack)
            if ok:
                return True, True
            clean_all = clean_all and clean
        return False, clean_all

    ok, clean = solve(q, {}, depth, frozenset())
    if ok:
        return True
    return False if clean else None


# --- audits ------------------------------------------------------------------------


def check_tree_compatible(t: SldTree, sp, bound: int, sig: Optional[Signature] = None,
                          budget: Optional[Budget] = None) -> CheckReport:
    """Strict compatibility: at every expanded node the selected subprogram is
    suitable for the selected atom, and no non-empty node selected the empty
    program.  Weak compatibility (STOP allowed when nothing is suitable) is
    reported as a separate detail flag."""
    if sig is None:
        sig = sp.signature()
    sig = extend_signature(sig, queries=[t.query])
    budget = budget or Budget()
    union = sp.union_spec()
    weak_ok = True
    checked = 0
    try:
        for n in sorted(t.nodes.values(), key=lambda n: n.id):
            if n.status == PRUNED and n.query:
                if any(specs_mod.suitable_for(n.query[self_idx(n)], s_i, union, sig, bound, budget)[0]
                       for s_i in sp.specs):
                    weak_ok = False
                return refuted(
                    "check_tree_compatible",
                    Witness("unsuitable", "node %d pruned a non-empty query %s"
                            % (n.id, query_to_str(n.query)),
                            {"node": n.id, "atom": None, "program": 0}),
                    bound, checked, weakly_compatible=weak_ok)
            if n.selected_program is None or n.selected_index is None:
                continue
            atom = n.query[n.selected_index]
            checked += 1
            ok, wit = specs_mod.suitable_for(atom, sp.specs[n.selected_program - 1],
                                             union, sig, bound, budget)
            if not ok:
                return refuted(
                    "check_tree_compatible",
                    Witness("unsuitable",
                            "node %d: program %d not suitable for %s (instance %s is specified elsewhere)"
                            % (n.id, n.selected_program, atom_to_str(atom), atom_to_str(wit)),
                            {"node": n.id, "atom": atom_to_str(atom),
                             "program": n.selected_program, "instance": atom_to_str(wit)}),
                    bound, checked, weakly_compatible=False)
    except BudgetExceeded as e:
        return inconclusive("check_tree_compatible", str(e), bound, checked)
    return verified("check_tree_compatible", bound, checked, weakly_compatible=True)


def self_idx(n: Node) -> int:
    return n.selected_index if n.selected_index is not None else 0


def check_tree_complete(t: SldTree, s, bound: int, sig: Optional[Signature] = None,
                        budget: Optional[Budget] = None) -> CheckReport:
    """Every ground instance of the root query (within bound) that the
    specification satisfies atom-wise must be an instance of some answer."""
    if t.truncated:
        return inconclusive("check_tree_complete",
                            "tree has depth-limit leaves; completeness of a truncated tree is unknowable",
                            bound)
    if sig is None:
        sig = working_signature(_query_program(t.query), specs=[s])
    else:
        sig = extend_signature(sig, queries=[t.query], specs=[s])
    budget = budget or Budget()
    from itertools import product as _product

    vs = query_vars(t.query)
    budgets = var_budgets(list(t.query), bound, bound)
    pools = [_pool_up_to(sig, budgets.get(v, bound), bound) for v in vs]
    checked = 0
    try:
        for values in _product(*pools):
            budget.tick()
            theta = dict(zip(vs, values))
            inst = apply_query(theta, t.query)
            if not all(atom_fits(a, bound) for a in inst):
                continue
            if not all(s.member(a) for a in inst):
                continue
            checked += 1
            if not any(_instance_of_query(ans, inst) for ans in t.answers):
                return refuted(
                    "check_tree_complete",
                    Witness("missing-answer",
                            "%s is required but is not an instance of any answer"
                            % query_to_str(inst),
                            {"query": query_to_str(inst)}),
                    bound, checked)
    except BudgetExceeded as e:
        return inconclusive("check_tree_complete", str(e), bound, checked)
    return verified("check_tree_complete", bound, checked, answers=len(t.answers))


def _query_program(q: Query) -> Program:
    return Program([Clause(a, (), "q%d" % i) for i, a in enumerate(q)])


def _instance_of_query(general: Query, inst: Query) -> bool:
    if len(general) != len(inst):
        return False
    bind: dict = {}
    for g, a in zip(general, inst):
        got = match_atom(g, a, bind)
        if got is None:
            return False
        bind = got
    return True


# --- dumps -------------------------------------------------------------------------


def tree_to_text(t: SldTree) -> str:
    lines: List[str] = []

    def go(node_id: int, indent: int, via: str):
        n = t.nodes[node_id]
        q = query_to_str(n.query) if n.query else "<success>"
        sel = ""
        if n.selected_index is not None and n.status == INNER:
            sel = " sel=%d" % n.selected_index
            if n.selected_program is not None:
                sel += " prog=%d" % n.selected_program
        status = "" if n.status == INNER else " [%s]" % n.status
        lines.append("%s%sn%d: %s%s%s" % ("  " * indent, via, n.id, q, sel, status))
        for label, theta, child in n.edges:
            b = ",".join("%s=%s" % (v, term_to_str(theta[v])) for v in sorted(theta))
            go(child, indent + 1, "%s{%s} " % (label, b))

    go(t.root, 0, "")
    return "\n".join(lines) + "\n"


def tree_to_json(t: SldTree) -> dict:
    def go(node_id: int) -> dict:
        n = t.nodes[node_id]
        return {
            "id": n.id,
            "query": query_to_str(n.query),
            "status": n.status,
            "selected_index": n.selected_index,
            "selected_program": n.selected_program,
            "children": [
                {"clause": label,
                 "mgu": {v: term_to_str(theta[v]) for v in sorted(theta)},
                 "node": go(child)}
                for label, theta, child in n.edges
            ],
        }

    return {
        "kind": t.kind,
        "query": query_to_str(t.query),
        "depth": t.depth,
        "truncated": t.truncated,
        "answers": [query_to_str(a) for a in t.answers],
        "root": go(t.root),
    }
