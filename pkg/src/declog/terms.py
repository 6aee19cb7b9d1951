"""First-order syntax: terms, atoms, clauses, programs, substitutions, unification.

Terms are immutable and hashable.  A constant is a 0-ary Compound; integer
literals are constants whose functor is the canonical decimal numeral.
Variable names and functor names live in disjoint lexical classes (variables
start with an upper-case letter or underscore).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence, Union


class Var(NamedTuple):
    name: str

    def __str__(self) -> str:
        return self.name


class Compound(NamedTuple):
    functor: str
    args: tuple

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return "%s(%s)" % (self.functor, ", ".join(str(a) for a in self.args))


Term = Union[Var, Compound]

Subst = dict  # variable name -> Term; idempotent when produced by mgu()

_INT_RE = re.compile(r"-?(0|[1-9][0-9]*)$")


def const(name: str) -> Compound:
    return Compound(name, ())


def mkint(n: int) -> Compound:
    return Compound(str(n), ())


def int_value(t: Term) -> Optional[int]:
    """The integer denoted by a canonical integer constant, else None."""
    if isinstance(t, Compound) and not t.args and _INT_RE.match(t.functor):
        return int(t.functor)
    return None


NIL = const("[]")
CONS = "."


def cons(head: Term, tail: Term) -> Compound:
    return Compound(CONS, (head, tail))


def mklist(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for x in reversed(list(items)):
        out = cons(x, out)
    return out


@lru_cache(maxsize=200_000)
def list_elements(t: Term) -> Optional[list]:
    """Elements of a proper list, or None if t is not a list.

    Cached; callers must treat the returned list as read-only.
    """
    out = []
    while True:
        if t == NIL:
            return out
        if isinstance(t, Compound) and t.functor == CONS and len(t.args) == 2:
            out.append(t.args[0])
            t = t.args[1]
        else:
            return None


def is_list(t: Term) -> bool:
    return list_elements(t) is not None


class Atom(NamedTuple):
    pred: str
    args: tuple

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ", ".join(str(a) for a in self.args))


Query = tuple  # tuple[Atom, ...]; the empty tuple is the success query


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()
    label: Optional[str] = None

    def __str__(self) -> str:
        if not self.body:
            return "%s." % (self.head,)
        return "%s :- %s." % (self.head, ", ".join(str(b) for b in self.body))


@dataclass
class Program:
    clauses: list
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        for i, c in enumerate(self.clauses):
            if c.label is None:
                self.clauses[i] = Clause(c.head, c.body, "c%d" % (i + 1))
        labels = [c.label for c in self.clauses]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate clause labels: %r" % labels)

    def procedures(self) -> dict:
        """Clauses grouped by head predicate, source order preserved."""
        out: dict = {}
        for c in self.clauses:
            out.setdefault((c.head.pred, len(c.head.args)), []).append(c)
        return out

    def clause(self, label: str) -> Clause:
        for c in self.clauses:
            if c.label == label:
                return c
        raise KeyError(label)

    def restrict(self, labels: Sequence[str]) -> "Program":
        """Subprogram with the given clause labels, base order preserved."""
        want = set(labels)
        missing = want - {c.label for c in self.clauses}
        if missing:
            raise KeyError("unknown clause labels: %s" % ", ".join(sorted(missing)))
        return Program([c for c in self.clauses if c.label in want])

    def predicates(self) -> set:
        return {(c.head.pred, len(c.head.args)) for c in self.clauses}


# --- size and variable utilities ---------------------------------------------


@lru_cache(maxsize=200_000)
def term_size(t: Term) -> int:
    """Node count: size(constant) = 1, size(f(t1..tn)) = 1 + sum(sizes)."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def atom_fits(a: Atom, bound: int) -> bool:
    """Every argument term has size <= bound."""
    return all(term_size(t) <= bound for t in a.args)


def term_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(term_ground(a) for a in t.args)


def atom_ground(a: Atom) -> bool:
    return all(term_ground(t) for t in a.args)


def term_vars(t: Term, acc: Optional[list] = None) -> list:
    """Variable names in order of first occurrence."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    else:
        for a in t.args:
            term_vars(a, acc)
    return acc


def atom_vars(a: Atom, acc: Optional[list] = None) -> list:
    if acc is None:
        acc = []
    for t in a.args:
        term_vars(t, acc)
    return acc


def clause_vars(c: Clause) -> list:
    acc: list = []
    atom_vars(c.head, acc)
    for b in c.body:
        atom_vars(b, acc)
    return acc


def query_vars(q: Query) -> list:
    acc: list = []
    for a in q:
        atom_vars(a, acc)
    return acc


# --- substitution -------------------------------------------------------------


def apply_term(s: Subst, t: Term) -> Term:
    if isinstance(t, Var):
        r = s.get(t.name)
        return t if r is None else r
    if not t.args:
        return t
    return Compound(t.functor, tuple(apply_term(s, a) for a in t.args))


def apply_atom(s: Subst, a: Atom) -> Atom:
    return Atom(a.pred, tuple(apply_term(s, t) for t in a.args))


def apply_query(s: Subst, q: Query) -> Query:
    return tuple(apply_atom(s, a) for a in q)


def apply_clause(s: Subst, c: Clause) -> Clause:
    return Clause(apply_atom(s, c.head), tuple(apply_atom(s, b) for b in c.body), c.label)


def apply(s: Subst, x):
    """Simultaneous replacement on a Term, Atom, Query or Clause."""
    if isinstance(x, Var) or isinstance(x, Compound):
        return apply_term(s, x)
    if isinstance(x, Atom):
        return apply_atom(s, x)
    if isinstance(x, Clause):
        return apply_clause(s, x)
    if isinstance(x, tuple):
        return apply_query(s, x)
    raise TypeError("cannot apply substitution to %r" % (x,))


def compose(s1: Subst, s2: Subst) -> Subst:
    """Substitution composition: apply(compose(s1,s2), x) == apply(s2, apply(s1, x))."""
    out = {}
    for v, t in s1.items():
        t2 = apply_term(s2, t)
        if not (isinstance(t2, Var) and t2.name == v):
            out[v] = t2
    for v, t in s2.items():
        if v not in s1:
            out[v] = t
    return out


def restrict(s: Subst, names: Iterable[str]) -> Subst:
    keep = set(names)
    return {v: t for v, t in s.items() if v in keep}


# --- unification --------------------------------------------------------------


def unify_terms(pairs, bind: Optional[dict] = None) -> Optional[Subst]:
    """Most general unifier of the given term pairs, with occurs-check.

    The result is idempotent and never binds a variable to itself.
    Returns None on failure (including occurs-check failure).
    """
    bind = dict(bind) if bind else {}

    def walk(t: Term) -> Term:
        while isinstance(t, Var):
            nxt = bind.get(t.name)
            if nxt is None:
                return t
            t = nxt
        return t

    def occurs(name: str, t: Term) -> bool:
        t = walk(t)
        if isinstance(t, Var):
            return t.name == name
        return any(occurs(name, a) for a in t.args)

    stack = list(pairs)
    while stack:
        x, y = stack.pop()
        x = walk(x)
        y = walk(y)
        if isinstance(x, Var):
            if isinstance(y, Var) and y.name == x.name:
                continue
            if occurs(x.name, y):
                return None
            bind[x.name] = y
        elif isinstance(y, Var):
            if occurs(y.name, x):
                return None
            bind[y.name] = x
        else:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))

    def resolve(t: Term) -> Term:
        t = walk(t)
        if isinstance(t, Var):
            return t
        if not t.args:
            return t
        return Compound(t.functor, tuple(resolve(a) for a in t.args))

    out = {}
    for name in bind:
        t = resolve(Var(name))
        if not (isinstance(t, Var) and t.name == name):
            out[name] = t
    return out


def mgu(a: Atom, b: Atom) -> Optional[Subst]:
    """Most general unifier of two atoms, or None."""
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    return unify_terms(list(zip(a.args, b.args)))


def may_unify(a: Atom, b: Atom) -> bool:
    """Cheap structural pre-filter: False only when unification surely fails
    (clashing functors with variables treated as wildcards)."""
    if a.pred != b.pred or len(a.args) != len(b.args):
        return False
    stack = list(zip(a.args, b.args))
    while stack:
        x, y = stack.pop()
        if isinstance(x, Var) or isinstance(y, Var):
            continue
        if x.functor != y.functor or len(x.args) != len(y.args):
            return False
        stack.extend(zip(x.args, y.args))
    return True


def match_term(pattern: Term, t: Term, bind: Optional[dict] = None) -> Optional[Subst]:
    """One-way match: bindings for pattern variables making pattern equal t.

    Nonlinear patterns bind consistently.  Variables of t are opaque: they
    match only a pattern variable.
    """
    bind = dict(bind) if bind is not None else {}
    stack = [(pattern, t)]
    while stack:
        p, x = stack.pop()
        if isinstance(p, Var):
            prev = bind.get(p.name)
            if prev is None:
                bind[p.name] = x
            elif prev != x:
                return None
        elif isinstance(x, Var):
            return None
        else:
            if p.functor != x.functor or len(p.args) != len(x.args):
                return None
            stack.extend(zip(p.args, x.args))
    return bind


def match_atom(pattern: Atom, a: Atom, bind: Optional[dict] = None) -> Optional[Subst]:
    if pattern.pred != a.pred or len(pattern.args) != len(a.args):
        return None
    bind = dict(bind) if bind is not None else {}
    for p, x in zip(pattern.args, a.args):
        got = match_term(p, x, bind)
        if got is None:
            return None
        bind = got
    return bind


def is_variant_query(q1: Query, q2: Query) -> bool:
    """Equal up to consistent variable renaming, both ways."""
    return _var_match_query(q1, q2) and _var_match_query(q2, q1)


def _var_match_query(q1: Query, q2: Query) -> bool:
    if len(q1) != len(q2):
        return False
    fwd: dict = {}
    rev: dict = {}

    def go(t1: Term, t2: Term) -> bool:
        if isinstance(t1, Var):
            if not isinstance(t2, Var):
                return False
            if fwd.setdefault(t1.name, t2.name) != t2.name:
                return False
            if rev.setdefault(t2.name, t1.name) != t1.name:
                return False
            return True
        if isinstance(t2, Var):
            return False
        return (
            t1.functor == t2.functor
            and len(t1.args) == len(t2.args)
            and all(go(a, b) for a, b in zip(t1.args, t2.args))
        )

    for a1, a2 in zip(q1, q2):
        if a1.pred != a2.pred or len(a1.args) != len(a2.args):
            return False
        if not all(go(x, y) for x, y in zip(a1.args, a2.args)):
            return False
    return True


def is_variant_clause(c1: Clause, c2: Clause) -> bool:
    return is_variant_query(
        (c1.head,) + tuple(c1.body), (c2.head,) + tuple(c2.body)
    )


# --- renaming apart -----------------------------------------------------------


def rename_apart(c: Clause, avoid: Iterable[str]) -> Clause:
    """A variant of c sharing no variable name with avoid.

    Every variable is renamed to base-name + lowest free numeric suffix,
    deterministically, so repeated resolution steps produce reproducible trees.
    """
    avoid = set(avoid)
    mapping: dict = {}
    used = set(avoid)
    for name in clause_vars(c):
        k = 1
        while "%s%d" % (name, k) in used:
            k += 1
        new = "%s%d" % (name, k)
        mapping[name] = Var(new)
        used.add(new)
    if not mapping:
        return c
    return apply_clause(mapping, c)
