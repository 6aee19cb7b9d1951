"""Bounded Herbrand semantics.

Ground term/atom enumeration over a fixed signature, the immediate consequence
operator, the bounded least model, and the model-vs-answers cross check.

Every size bound in the toolkit is the node-count term size.  bounded_lfp is
an under-approximation of the bound-restricted least model: it contains the
bound-fitting atoms that have a proof entirely within the bound, so all
verdicts read "up to bound b".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from . import builtins
from .reports import Budget, CheckReport, Witness, inconclusive, refuted, verified
from .syntax import atom_to_str
from .terms import (
    Atom,
    Clause,
    Compound,
    Program,
    Query,
    Subst,
    Term,
    Var,
    apply_atom,
    apply_term,
    atom_fits,
    atom_ground,
    atom_vars,
    clause_vars,
    match_atom,
    query_vars,
    term_size,
    term_vars,
)

FRESH_CONSTANTS = ("$c1", "$c2")


@dataclass(frozen=True)
class Signature:
    """Function and predicate symbols with arities; the Herbrand alphabet."""

    functions: tuple  # tuple[(name, arity)], sorted
    predicates: tuple  # tuple[(name, arity)], sorted

    def __post_init__(self):
        if not any(ar == 0 for _, ar in self.functions):
            raise ValueError("signature needs at least one constant")

    @staticmethod
    def make(functions: Iterable, predicates: Iterable) -> "Signature":
        return Signature(tuple(sorted(set(functions))), tuple(sorted(set(predicates))))

    def constants(self) -> list:
        return [name for name, ar in self.functions if ar == 0]


def program_symbols(p: Program) -> Tuple[set, set]:
    funcs: set = set()
    preds: set = set()

    def walk(t: Term):
        if isinstance(t, Compound):
            funcs.add((t.functor, len(t.args)))
            for a in t.args:
                walk(a)

    for c in p.clauses:
        for a in (c.head,) + tuple(c.body):
            preds.add((a.pred, len(a.args)))
            for t in a.args:
                walk(t)
    return funcs, preds


def query_symbols(q: Query) -> Tuple[set, set]:
    prog = Program([Clause(a, (), "q%d" % i) for i, a in enumerate(q)])
    return program_symbols(prog)


def extend_signature(sig: Signature, queries: Sequence[Query] = (),
                     specs: Sequence = ()) -> Signature:
    funcs = set(sig.functions)
    preds = set(sig.predicates)
    for q in queries:
        f2, p2 = query_symbols(q)
        funcs |= f2
        preds |= p2
    for s in specs:
        f2, p2 = s.symbols()
        funcs |= f2
        preds |= p2
    return Signature.make(funcs, preds)


def working_signature(p: Program, specs: Sequence = (), queries: Sequence[Query] = (),
                      extra_constants: Sequence[str] = FRESH_CONSTANTS,
                      extra_functions: Sequence = ()) -> Signature:
    """Symbols of the program, the given specifications and queries, plus two
    fresh constants.  The alphabet is not restricted to program symbols; the
    fresh constants expose non-intended instances at small bounds."""
    funcs, preds = program_symbols(p)
    for s in specs:
        f2, p2 = s.symbols()
        funcs |= f2
        preds |= p2
    for q in queries:
        f2, p2 = query_symbols(q)
        funcs |= f2
        preds |= p2
    funcs |= {(c, 0) for c in extra_constants}
    funcs |= set(extra_functions)
    return Signature.make(funcs, preds)


# --- ground term enumeration ---------------------------------------------------


@lru_cache(maxsize=256)
def _terms_by_size(sig: Signature, bound: int) -> tuple:
    """by_size[k] = tuple of all ground terms of size exactly k, deterministic."""
    by_size: List[tuple] = [()] * (bound + 1)
    for k in range(1, bound + 1):
        row: List[Term] = []
        for name, ar in sig.functions:
            if ar == 0:
                if k == 1:
                    row.append(Compound(name, ()))
                continue
            if k < 1 + ar:
                continue
            for split in _compositions(k - 1, ar):
                pools = [by_size[s] for s in split]
                if any(not pool for pool in pools):
                    continue
                for args in product(*pools):
                    row.append(Compound(name, args))
        by_size[k] = tuple(row)
    return tuple(by_size)


def _compositions(total: int, parts: int):
    """All ways to write total as an ordered sum of `parts` positive ints."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_terms(sig: Signature, size_bound: int) -> list:
    """All ground terms of size <= size_bound, smallest first, deterministic."""
    if size_bound < 1:
        raise ValueError("size_bound must be >= 1")
    by_size = _terms_by_size(sig, size_bound)
    out: List[Term] = []
    for k in range(1, size_bound + 1):
        out.extend(by_size[k])
    return out


def ground_atoms(sig: Signature, bound: int, preds: Optional[Iterable] = None) -> Iterator[Atom]:
    """All ground atoms whose every argument has size <= bound."""
    pool = enumerate_terms(sig, bound)
    for name, ar in (preds if preds is not None else sig.predicates):
        if ar == 0:
            yield Atom(name, ())
        else:
            for args in product(pool, repeat=ar):
                yield Atom(name, args)


# --- interpretations and T_P ----------------------------------------------------


@dataclass(frozen=True)
class Interp:
    atoms: frozenset
    bound: int

    def __contains__(self, a: Atom) -> bool:
        return a in self.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def by_pred(self) -> dict:
        out: dict = {}
        for a in self.atoms:
            out.setdefault((a.pred, len(a.args)), []).append(a)
        for v in out.values():
            v.sort(key=atom_to_str)
        return out

    def to_text(self) -> str:
        return "\n".join(sorted(atom_to_str(a) for a in self.atoms)) + ("\n" if self.atoms else "")


def empty_interp(bound: int) -> Interp:
    return Interp(frozenset(), bound)


def var_budgets(atoms: Sequence[Atom], bound: int, default: int) -> dict:
    """Per-variable size caps so that each argument pattern can still fit the
    bound with all other variables at minimal size.  Necessary conditions only;
    constructed atoms are size-checked afterwards."""
    budgets: dict = {}

    def min_size(t: Term) -> int:
        if isinstance(t, Var):
            return 1
        return 1 + sum(min_size(a) for a in t.args)

    for a in atoms:
        for arg in a.args:
            base = min_size(arg)
            for v in term_vars(arg):
                slack = bound - (base - 1)
                budgets[v] = min(budgets.get(v, default), max(slack, 0))
    return budgets


def _pool_up_to(sig: Signature, size: int, bound: int) -> list:
    by_size = _terms_by_size(sig, bound)
    out: List[Term] = []
    for k in range(1, min(size, bound) + 1):
        out.extend(by_size[k])
    return out


def clause_consequences(clause: Clause, interp: Interp, bound: int, sig: Signature,
                        program_preds: set, budget: Optional[Budget] = None) -> Iterator[Atom]:
    """Heads of ground instances of the clause whose body holds in interp
    (builtin comparison atoms are evaluated, not looked up), truncated to
    heads that fit the bound."""
    by_pred = getattr(interp, "_index", None)
    if by_pred is None:
        by_pred = interp.by_pred()
        object.__setattr__(interp, "_index", by_pred)

    solutions: List[Subst] = [{}]
    deferred: List[Atom] = []
    for b in clause.body:
        if builtins.is_builtin(b.pred, len(b.args), program_preds):
            deferred.append(b)
            continue
        facts = by_pred.get((b.pred, len(b.args)), [])
        nxt: List[Subst] = []
        for s in solutions:
            ba = apply_atom(s, b)
            if atom_ground(ba):
                if ba in interp:
                    nxt.append(s)
                continue
            for fact in facts:
                if budget:
                    budget.tick()
                m = match_atom(ba, fact)
                if m is not None:
                    s2 = dict(s)
                    s2.update(m)
                    nxt.append(s2)
        solutions = nxt
        if not solutions:
            return

    all_vars = clause_vars(clause)
    for s in solutions:
        free = [v for v in all_vars if v not in s]
        if free:
            budgets = var_budgets(
                [apply_atom(s, clause.head)] + [apply_atom(s, d) for d in deferred],
                bound, bound)
            pools = [_pool_up_to(sig, budgets.get(v, bound), bound) for v in free]
            assignments = product(*pools)
        else:
            assignments = [()]
        for values in assignments:
            if budget:
                budget.tick()
            s2 = dict(s)
            s2.update(zip(free, values))
            ok = True
            for d in deferred:
                if not builtins.eval_builtin(apply_atom(s2, d)):
                    ok = False
                    break
            if not ok:
                continue
            head = apply_atom(s2, clause.head)
            if atom_fits(head, bound):
                yield head


def tp_step(p: Program, i: Interp, bound: int, sig: Optional[Signature] = None,
            budget: Optional[Budget] = None) -> Interp:
    """One application of the immediate consequence operator, within the bound."""
    if sig is None:
        sig = working_signature(p)
    preds = p.predicates()
    out = set(i.atoms)
    for c in p.clauses:
        out.update(clause_consequences(c, i, bound, sig, preds, budget))
    return Interp(frozenset(out), bound)


def bounded_lfp(p: Program, bound: int, sig: Optional[Signature] = None,
                budget: Optional[Budget] = None) -> Interp:
    """Iterate tp_step from the empty interpretation to the (finite) fixpoint."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if sig is None:
        sig = working_signature(p)
    cur = empty_interp(bound)
    while True:
        nxt = tp_step(p, cur, bound, sig, budget)
        if len(nxt) == len(cur):
            return nxt
        cur = nxt


# --- the fresh-symbol condition -------------------------------------------------


def fresh_symbol_condition(p: Program, q: Query, sig: Signature) -> bool:
    """True iff q has k variables and sig has >= k constants absent from p and
    q, or some non-constant function symbol absent from both."""
    k = len(query_vars(q))
    if k == 0:
        return True
    pf, _ = program_symbols(p)
    qf, _ = query_symbols(q)
    used = pf | qf
    fresh_consts = [f for f in sig.functions if f[1] == 0 and f not in used]
    if len(fresh_consts) >= k:
        return True
    return any(ar >= 1 and (name, ar) not in used for name, ar in sig.functions)


# --- model vs answers cross-check ------------------------------------------------


def answers_model_check(p: Program, bound: int, depth: int,
                        sig: Optional[Signature] = None,
                        budget: Optional[Budget] = None,
                        max_tree_nodes: int = 50_000) -> CheckReport:
    """For every ground atom within the bound (predicates of the program's
    signature, builtins excluded): membership in bounded_lfp must coincide
    with depth-limited SLD success under the leftmost rule.

    bounded_lfp holds exactly the atoms with a proof lying entirely within
    the bound, so an SLD success whose proofs all need oversized intermediate
    atoms agrees with the model side; it is counted, not flagged.
    Disagreements explained by the depth limit are reported as inconclusive,
    not failures.
    """
    from . import sld  # local import: sld depends on this module's helpers

    if sig is None:
        sig = working_signature(p, extra_constants=FRESH_CONSTANTS)
    budget = budget or Budget(max_instances=20_000_000)
    model = bounded_lfp(p, bound, sig, budget)
    prog_preds = p.predicates()

    pool = enumerate_terms(sig, bound)
    inconclusive_atoms: List[str] = []
    oversized = 0
    checked = 0

    def classify_success(atom: Atom, rendered: str):
        """SLD succeeds but the atom is outside the bounded model: a genuine
        disagreement needs a proof within the bound, since bounded_lfp holds
        exactly the atoms with such a proof."""
        got = sld.solve_first(p, (atom,), depth)
        if got is not None and _skeleton_within(got[1], bound):
            return refuted(
                "answers_model_check",
                Witness("disagreement", "%s: SLD success, not in bounded model" % rendered,
                        {"atom": rendered, "direction": "sld-not-model"}),
                bound, checked)
        if got is None:
            inconclusive_atoms.append(rendered + " (success not reproduced within depth)")
            return "unknown"
        return "oversized"

    for name, ar in sig.predicates:
        if builtins.is_builtin(name, ar, prog_preds):
            continue
        general = Atom(name, tuple(Var("V%d" % i) for i in range(1, ar + 1)))
        tree = sld.build_sld_tree(p, (general,), sld.LEFTMOST, depth,
                                  max_nodes=max_tree_nodes, prune_size_bound=bound)

        if tree.truncated:
            # the open-query tree blew up; decide each atom by direct search
            memo: dict = {}
            for args in product(pool, repeat=ar):
                budget.tick()
                atom = Atom(name, args)
                checked += 1
                in_model = atom in model
                in_sld = sld.succeeds(p, (atom,), depth, memo=memo)
                rendered = atom_to_str(atom)
                if in_sld is None:
                    if in_model:
                        inconclusive_atoms.append(rendered + " (depth limit)")
                    continue
                if in_model == in_sld:
                    continue
                if in_model:
                    return refuted(
                        "answers_model_check",
                        Witness("disagreement", "%s: in bounded model, no SLD success" % rendered,
                                {"atom": rendered, "direction": "model-not-sld"}),
                        bound, checked)
                res = classify_success(atom, rendered)
                if isinstance(res, CheckReport):
                    return res
                if res == "oversized":
                    oversized += 1
            continue

        sld_set: Set[Atom] = set()
        for ans in tree.answers:
            a = ans[0]
            budgets = var_budgets([a], bound, bound)
            vs = atom_vars(a)
            pools = [_pool_up_to(sig, budgets.get(v, bound), bound) for v in vs]
            for values in product(*pools):
                budget.tick()
                inst = apply_atom(dict(zip(vs, values)), a)
                if atom_fits(inst, bound):
                    sld_set.add(inst)

        for args in product(pool, repeat=ar):
            budget.tick()
            atom = Atom(name, args)
            checked += 1
            in_model = atom in model
            in_sld = atom in sld_set
            if in_model == in_sld:
                continue
            rendered = atom_to_str(atom)
            if in_model and not in_sld:
                return refuted(
                    "answers_model_check",
                    Witness("disagreement", "%s: in bounded model, no SLD success" % rendered,
                            {"atom": rendered, "direction": "model-not-sld"}),
                    bound, checked)
            res = classify_success(atom, rendered)
            if isinstance(res, CheckReport):
                return res
            if res == "oversized":
                oversized += 1

    if inconclusive_atoms:
        return inconclusive(
            "answers_model_check",
            "%d atom(s) undecidable at this bound/depth; first: %s"
            % (len(inconclusive_atoms), inconclusive_atoms[0]),
            bound, checked, inconclusive_atoms=inconclusive_atoms[:20])
    return verified("answers_model_check", bound, checked, depth=depth,
                    oversized_proofs=oversized)


def _skeleton_within(skels, bound: int) -> bool:
    for atom, _label, children in skels:
        if not atom_fits(atom, bound):
            return False
        if not _skeleton_within(children, bound):
            return False
    return True
