"""Specifications as decidable, enumerable Herbrand interpretations.

A Specification is a set of rules `head-pattern where guard`; a ground atom is
a member iff it matches some rule head with the guard satisfiable (any-match).
Guards are conjunctions of possibly-negated primitives from a fixed library;
every primitive is decidable on ground arguments, and generating primitives
(concat, len, member, unzip, ...) bind local variables during enumeration.

Level mappings are first-match pattern rules with linear expressions over
termsize/listlen measures, or explicit finite tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from .herbrand import Signature, _pool_up_to, enumerate_terms, var_budgets
from .reports import Budget, CheckReport, Witness, refuted, verified
from .syntax import atom_to_str, term_to_str
from .terms import (
    Atom,
    Compound,
    NIL,
    Program,
    Term,
    Var,
    apply_atom,
    apply_term,
    atom_fits,
    atom_ground,
    atom_vars,
    cons,
    int_value,
    is_list,
    list_elements,
    match_atom,
    match_term,
    mkint,
    term_ground,
    term_size,
    term_vars,
)


class GuardError(Exception):
    pass


@dataclass(frozen=True)
class Literal:
    prim: str
    args: tuple  # term patterns; integer offsets appear as '+'/'-' compounds
    neg: bool = False

    def __str__(self) -> str:
        s = "%s(%s)" % (self.prim, ", ".join(term_to_str(a) for a in self.args))
        return "not " + s if self.neg else s


@dataclass(frozen=True)
class SpecRule:
    head: Atom
    guard: tuple = ()  # tuple[Literal, ...]


class Specification:
    """Named rule set; membership is decidable, enumeration is bounded."""

    def __init__(self, name: str, rules: Sequence[SpecRule]):
        self.name = name
        self.rules = list(rules)
        self._enum_cache: dict = {}
        self._plans: dict = {}
        self._by_pred: dict = {}
        for r in self.rules:
            self._by_pred.setdefault((r.head.pred, len(r.head.args)), []).append(r)

    def __repr__(self) -> str:
        return "Specification(%r, %d rules)" % (self.name, len(self.rules))

    def member(self, a: Atom, budget: Optional[Budget] = None) -> bool:
        """Decide membership of a ground atom.  Budgets are accounted where
        candidates are enumerated, not per membership test; the unused
        parameter is kept so call sites read uniformly.

        A head match binds every head variable, so the guard evaluation order
        is the same on every call; it is compiled once per rule and replayed.
        """
        if not atom_ground(a):
            raise GuardError("membership requires a ground atom: %s" % atom_to_str(a))
        for rule in self._by_pred.get((a.pred, len(a.args)), ()):
            entry = self._plans.get(id(rule))
            if entry is None:
                names = _bare_var_head(rule.head)
                entry = (names, _compile_member_plan(rule))
                self._plans[id(rule)] = entry
            names, plan = entry
            if names is not None:
                b = dict(zip(names, a.args))
            else:
                b = match_atom(rule.head, a)
                if b is None:
                    continue
            if _run_member_plan(plan, b):
                return True
        return False

    def enumerate(self, bound: int, sig: Signature, budget: Optional[Budget] = None) -> list:
        """Exactly the ground member atoms whose every argument fits the bound."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        key = (bound, sig)
        if key in self._enum_cache:
            return self._enum_cache[key]
        ctx = EnumCtx(sig, bound)
        out = set()
        for rule in self.rules:
            head_vars = atom_vars(rule.head)
            budgets = var_budgets([rule.head], bound, bound)
            for b in _solve_guard(rule.guard, {}, ctx, budget, limit=None):
                free = [v for v in head_vars if v not in b]
                pools = [_pool_up_to(sig, budgets.get(v, bound), bound) for v in free]
                for values in product(*pools):
                    if budget:
                        budget.tick()
                    b2 = dict(b)
                    b2.update(zip(free, values))
                    atom = apply_atom(b2, rule.head)
                    if not atom_ground(atom) or not atom_fits(atom, bound):
                        continue
                    if _recheck(rule.guard, b2, budget):
                        out.add(atom)
        result = sorted(out, key=lambda a: (a.pred, atom_to_str(a)))
        self._enum_cache[key] = result
        return result

    def symbols(self) -> Tuple[set, set]:
        funcs: set = set()
        preds: set = set()

        def walk(t: Term):
            if not isinstance(t, Compound):
                return
            # integer-offset arithmetic in guards (N + 1) is measure syntax,
            # not part of the Herbrand alphabet; '-' with a non-integer right
            # operand stays an ordinary pairing functor
            if t.functor in ("+", "-") and len(t.args) == 2 \
                    and int_value(t.args[1]) is not None:
                walk(t.args[0])
                return
            funcs.add((t.functor, len(t.args)))
            for a in t.args:
                walk(a)

        for r in self.rules:
            preds.add((r.head.pred, len(r.head.args)))
            for t in r.head.args:
                walk(t)
            for lit in r.guard:
                for t in lit.args:
                    walk(t)
        return funcs, preds

    def arg_filter(self, pred: str, arity: int, i: int) -> Optional[Callable[[Term], bool]]:
        """A necessary condition on ground terms for argument i of a member
        atom, derived statically from the rules; None when unconstrained.

        Conditions come from the head argument pattern, from positive guard
        literals over just that variable, and from per-argument properties
        forced by any positive primitive the variable is a direct argument of
        (e.g. both operands of concat must be lists)."""
        rules = self._by_pred.get((pred, arity))
        if not rules:
            return lambda t: False
        conds = []
        for r in rules:
            pat = r.head.args[i]
            if isinstance(pat, Var):
                v = pat.name
                checks: list = []
                for l in r.guard:
                    if l.neg:
                        continue
                    if set(_lit_vars(l)) == {v} and l.prim in _CHECK_ONLY_OK:
                        checks.append(lambda t, lit=l, name=v: _check_lit(lit, {name: t}))
                    else:
                        for j, arg in enumerate(l.args):
                            if isinstance(arg, Var) and arg.name == v:
                                prop = _ARG_NECESSARY.get((l.prim, j))
                                if prop is not None:
                                    checks.append(prop)
                if not checks:
                    return None
                conds.append((None, tuple(checks)))
            else:
                conds.append((pat, ()))

        def check(t: Term) -> bool:
            for pat, checks in conds:
                if pat is not None:
                    if match_term(pat, t) is not None:
                        return True
                elif all(c(t) for c in checks):
                    return True
            return False

        return check


def union_spec(name: str, parts: Sequence[Specification]) -> Specification:
    rules: List[SpecRule] = []
    for p in parts:
        rules.extend(p.rules)
    return Specification(name, rules)


@dataclass
class ApproxSpec:
    """The pair (specification for completeness, specification for correctness);
    intended s_compl subset-of M_P subset-of s_corr."""

    s_compl: Specification
    s_corr: Specification


def approx_sanity(ap: ApproxSpec, bound: int, sig: Optional[Signature] = None,
                  budget: Optional[Budget] = None) -> CheckReport:
    """Verified iff every enumerated s_compl atom is an s_corr member."""
    if sig is None:
        from .herbrand import working_signature

        sig = working_signature(Program([]), specs=[ap.s_compl, ap.s_corr])
    n = 0
    for a in ap.s_compl.enumerate(bound, sig, budget):
        n += 1
        if not ap.s_corr.member(a, budget):
            return refuted(
                "approx_sanity",
                Witness("uncovered-atom", "%s is required but not allowed" % atom_to_str(a),
                        {"atom": atom_to_str(a)}),
                bound, n)
    return verified("approx_sanity", bound, n)


# --- guard evaluation ----------------------------------------------------------


@dataclass(frozen=True)
class EnumCtx:
    sig: Signature
    bound: int


def _lit_vars(lit: Literal) -> list:
    acc: list = []
    for t in lit.args:
        term_vars(t, acc)
    return acc


def _resolve(t: Term, b: dict) -> Term:
    return apply_term(b, t)


def _int_of(t: Term) -> Optional[int]:
    """Integer value of a ground int expression: numeral, or numeral +/- numeral."""
    v = int_value(t)
    if v is not None:
        return v
    if isinstance(t, Compound) and t.functor in ("+", "-") and len(t.args) == 2:
        a = _int_of(t.args[0])
        c = _int_of(t.args[1])
        if a is None or c is None:
            return None
        return a + c if t.functor == "+" else a - c
    return None


def listlen(t: Term) -> int:
    """Cons-spine length: listlen([h|t]) = 1 + listlen(t), 0 on any non-cons."""
    n = 0
    while isinstance(t, Compound) and t.functor == "." and len(t.args) == 2:
        n += 1
        t = t.args[1]
    return n


def _peano_nat(t: Term) -> bool:
    while isinstance(t, Compound) and t.functor == "s" and len(t.args) == 1:
        t = t.args[0]
    return t == Compound("0", ())


def _sorted_int_list(t: Term) -> bool:
    elems = list_elements(t)
    if elems is None:
        return False
    vals = [int_value(e) for e in elems]
    if any(v is None for v in vals):
        return False
    return all(x <= y for x, y in zip(vals, vals[1:]))


def _multiset(elems: list) -> dict:
    out: dict = {}
    for e in elems:
        out[e] = out.get(e, 0) + 1
    return out


# Primitives evaluable on arbitrary (possibly non-ground) terms; used for the
# static arg filters and for c-selection rule guards, where checks are syntactic.
_CHECK_ONLY_OK = {"is_list", "nat", "int", "ground", "size_le", "sorted_int",
                  "eq", "neq", "lt_int", "le_int", "int_list"}

# What a positive occurrence as the j-th direct argument of a primitive forces
# on a ground term; sound necessary conditions used for search pruning.
_ARG_NECESSARY: dict = {}


def _init_arg_necessary():
    def nonempty_list(t):
        return is_list(t) and listlen(t) > 0

    def an_int(t):
        return int_value(t) is not None

    for p, props in {
        "is_list": (is_list,),
        "len": (is_list, an_int),
        "concat": (is_list, is_list, is_list),
        "member": (None, nonempty_list),
        "sorted_int": (_sorted_int_list,),
        "perm_multiset": (is_list, is_list),
        "unzip": (is_list, is_list, is_list),
        "elems_in": (is_list, None),
        "nat": (_peano_nat,),
        "int": (an_int,),
        "int_list": (lambda t: is_list(t) and all(int_value(e) is not None
                                                  for e in list_elements(t)),),
        "lt_int": (an_int, an_int),
        "le_int": (an_int, an_int),
    }.items():
        for j, prop in enumerate(props):
            if prop is not None:
                _ARG_NECESSARY[(p, j)] = prop


_init_arg_necessary()


def _p_is_list(args):
    return is_list(args[0])


def _p_nat(args):
    return _peano_nat(args[0])


def _p_int(args):
    return int_value(args[0]) is not None


def _p_int_list(args):
    elems = list_elements(args[0])
    return elems is not None and all(int_value(e) is not None for e in elems)


def _p_ground(args):
    return term_ground(args[0])


def _p_size_le(args):
    k = _int_of(args[1])
    return k is not None and term_size(args[0]) <= k


def _p_sorted_int(args):
    return _sorted_int_list(args[0])


def _p_eq(args):
    return args[0] == args[1]


def _p_neq(args):
    return args[0] != args[1]


def _p_lt_int(args):
    a = _int_of(args[0])
    b = _int_of(args[1])
    return a is not None and b is not None and a < b


def _p_le_int(args):
    a = _int_of(args[0])
    b = _int_of(args[1])
    return a is not None and b is not None and a <= b


def _p_len(args):
    elems = list_elements(args[0])
    n = _int_of(args[1])
    return elems is not None and n is not None and len(elems) == n


def _p_concat(args):
    xs, ys, zs = (list_elements(a) for a in args)
    return xs is not None and ys is not None and zs is not None and xs + ys == zs


def _p_member(args):
    elems = list_elements(args[1])
    return elems is not None and args[0] in elems


def _p_perm_multiset(args):
    xs = list_elements(args[0])
    ys = list_elements(args[1])
    return xs is not None and ys is not None and _multiset(xs) == _multiset(ys)


def _p_unzip(args):
    elems = list_elements(args[0])
    if elems is None:
        return False
    a = list_elements(args[1])
    b = list_elements(args[2])
    return a is not None and b is not None and elems[0::2] == a and elems[1::2] == b


def _p_elems_in(args):
    elems = list_elements(args[0])
    domain = list_elements(args[1])
    return elems is not None and domain is not None and all(e in domain for e in elems)


_CHECK_FNS = {
    "is_list": _p_is_list,
    "nat": _p_nat,
    "int": _p_int,
    "int_list": _p_int_list,
    "ground": _p_ground,
    "size_le": _p_size_le,
    "sorted_int": _p_sorted_int,
    "eq": _p_eq,
    "neq": _p_neq,
    "lt_int": _p_lt_int,
    "le_int": _p_le_int,
    "len": _p_len,
    "concat": _p_concat,
    "member": _p_member,
    "perm_multiset": _p_perm_multiset,
    "unzip": _p_unzip,
    "elems_in": _p_elems_in,
}


def _check_prim(prim: str, args: tuple) -> bool:
    fn = _CHECK_FNS.get(prim)
    if fn is None:
        raise GuardError("unknown guard primitive %r" % prim)
    return fn(args)


def _check_lit(lit: Literal, binding: dict) -> bool:
    args = tuple(_resolve(a, binding) for a in lit.args)
    ok = _check_prim(lit.prim, args)
    return not ok if lit.neg else ok


def check_literal(lit: Literal, binding: dict) -> bool:
    """Syntactic check used by c-selection rule guards: unresolved variables
    stay opaque, so e.g. ground(X) is simply false."""
    return _check_lit(lit, binding)


def _gen_lists(pool: Sequence[Term], size_budget: int) -> Iterator[Term]:
    """Ground lists with elements from pool and term size <= size_budget."""
    if size_budget >= 1:
        yield NIL
    for e in pool:
        cost = 1 + term_size(e)
        if cost + 1 > size_budget:
            continue
        for rest in _gen_lists(pool, size_budget - cost):
            yield cons(e, rest)


def _gen_for(lit: Literal, args: tuple, binding: dict, ctx: Optional[EnumCtx],
             budget: Optional[Budget]) -> Optional[Iterator[dict]]:
    """Bindings extending `binding` that satisfy the positive literal, or None
    when this primitive cannot generate for this argument pattern."""
    prim = lit.prim
    grounded = [term_ground(a) for a in args]

    def matched(pat: Term, value: Term) -> Iterator[dict]:
        m = match_term(pat, value, binding)
        if m is not None:
            yield m

    if prim == "eq":
        if grounded[0] and not grounded[1]:
            return matched(args[1], args[0])
        if grounded[1] and not grounded[0]:
            return matched(args[0], args[1])
        return None

    if prim == "member" and grounded[1]:
        elems = list_elements(args[1])
        if elems is None:
            return iter(())

        def gen_member():
            for e in elems:
                if budget:
                    budget.tick()
                m = match_term(args[0], e, binding)
                if m is not None:
                    yield m

        return gen_member()

    if prim == "len" and grounded[0]:
        elems = list_elements(args[0])
        if elems is None:
            return iter(())
        return matched(args[1], mkint(len(elems)))

    if prim == "concat":
        xs = list_elements(args[0]) if grounded[0] else None
        ys = list_elements(args[1]) if grounded[1] else None
        zs = list_elements(args[2]) if grounded[2] else None
        from .terms import mklist

        if xs is not None and ys is not None:
            return matched(args[2], mklist(xs + ys))
        if zs is not None:

            def gen_splits():
                for k in range(len(zs) + 1):
                    if budget:
                        budget.tick()
                    m = match_term(args[0], mklist(zs[:k]), binding)
                    if m is None:
                        continue
                    m2 = match_term(args[1], mklist(zs[k:]), m)
                    if m2 is not None:
                        yield m2

            return gen_splits()
        return None

    if prim == "unzip" and grounded[0]:
        elems = list_elements(args[0])
        if elems is None:
            return iter(())
        from .terms import mklist

        def gen_unzip():
            m = match_term(args[1], mklist(elems[0::2]), binding)
            if m is not None:
                m2 = match_term(args[2], mklist(elems[1::2]), m)
                if m2 is not None:
                    yield m2

        return gen_unzip()

    if prim == "perm_multiset" and (grounded[0] or grounded[1]):
        src_i, dst_i = (0, 1) if grounded[0] else (1, 0)
        elems = list_elements(args[src_i])
        if elems is None:
            return iter(())
        from .terms import mklist

        def gen_perms():
            seen = set()
            for p in permutations(sorted(elems, key=term_to_str)):
                if p in seen:
                    continue
                seen.add(p)
                if budget:
                    budget.tick()
                m = match_term(args[dst_i], mklist(p), binding)
                if m is not None:
                    yield m

        return gen_perms()

    if ctx is None:
        return None

    # bound-driven generators, enumeration mode only
    pool = enumerate_terms(ctx.sig, max(ctx.bound - 2, 1))

    if prim == "is_list":
        def gen_is_list():
            for t in _gen_lists(pool, ctx.bound):
                if budget:
                    budget.tick()
                m = match_term(args[0], t, binding)
                if m is not None:
                    yield m

        return gen_is_list()

    if prim == "nat":
        def gen_nat():
            t: Term = Compound("0", ())
            size = 1
            while size <= ctx.bound:
                m = match_term(args[0], t, binding)
                if m is not None:
                    yield m
                t = Compound("s", (t,))
                size += 1

        return gen_nat()

    if prim == "int":
        def gen_int():
            for name, ar in ctx.sig.functions:
                if ar == 0 and int_value(Compound(name, ())) is not None:
                    m = match_term(args[0], Compound(name, ()), binding)
                    if m is not None:
                        yield m

        return gen_int()

    if prim == "sorted_int":
        ints = sorted((c for c in (Compound(n, ()) for n, a in ctx.sig.functions if a == 0)
                       if int_value(c) is not None), key=lambda c: int_value(c))

        def gen_sorted():
            from itertools import combinations_with_replacement
            from .terms import mklist

            max_len = (ctx.bound - 1) // 2
            for k in range(0, max_len + 1):
                for combo in combinations_with_replacement(ints, k):
                    if budget:
                        budget.tick()
                    m = match_term(args[0], mklist(combo), binding)
                    if m is not None:
                        yield m

        return gen_sorted()

    if prim == "len" and grounded[1]:
        n = _int_of(args[1])
        if n is None:
            return iter(())

        def gen_len():
            for t in _gen_lists(pool, ctx.bound):
                if listlen(t) != n:
                    continue
                m = match_term(args[0], t, binding)
                if m is not None:
                    yield m

        return gen_len()

    if prim in ("member", "unzip"):
        def gen_via_list():
            for t in _gen_lists(pool, ctx.bound):
                if budget:
                    budget.tick()
                m = match_term(args[0] if prim == "unzip" else args[1], t, binding)
                if m is None:
                    continue
                sub = _gen_for(lit, tuple(_resolve(a, m) for a in lit.args), m, ctx, budget)
                if sub is None:
                    continue
                for m2 in sub:
                    yield m2

        return gen_via_list()

    if prim == "elems_in" and grounded[1]:
        domain = list_elements(args[1])
        if domain is None:
            return iter(())

        def gen_elems():
            for t in _gen_lists(domain, ctx.bound):
                if budget:
                    budget.tick()
                m = match_term(args[0], t, binding)
                if m is not None:
                    yield m

        return gen_elems()

    return None


def _lit_varsets(lit: Literal) -> tuple:
    return tuple(frozenset(term_vars(a)) for a in lit.args)


def _data_gen_newvars(lit: Literal, bound: frozenset) -> Optional[set]:
    """Variables a data-driven generator for this literal would bind, given
    the currently bound set; None when no such generator applies.  Mirrors
    the data-driven cases of _gen_for."""
    vs = _lit_varsets(lit)
    g = [v <= bound for v in vs]
    prim = lit.prim
    if prim == "eq":
        if g[0] and not g[1]:
            return set(vs[1]) - bound
        if g[1] and not g[0]:
            return set(vs[0]) - bound
        return None
    if prim == "member" and g[1]:
        return set(vs[0]) - bound
    if prim == "len" and g[0]:
        return set(vs[1]) - bound
    if prim == "concat":
        if g[0] and g[1]:
            return set(vs[2]) - bound
        if g[2]:
            return (set(vs[0]) | set(vs[1])) - bound
        return None
    if prim == "unzip" and g[0]:
        return (set(vs[1]) | set(vs[2])) - bound
    if prim == "perm_multiset":
        if g[0]:
            return set(vs[1]) - bound
        if g[1]:
            return set(vs[0]) - bound
    return None


def _bare_var_head(head: Atom):
    """Names when every head argument is a distinct bare variable, else None;
    such heads match any ground atom by direct positional binding."""
    names = []
    for t in head.args:
        if not isinstance(t, Var) or t.name in names:
            return None
        names.append(t.name)
    return tuple(names)


def _arg_resolver(t: Term):
    if isinstance(t, Var):
        return lambda b, n=t.name, v=t: b.get(n, v)
    if term_ground(t):
        return lambda b, x=t: x
    return lambda b, x=t: apply_term(b, x)


def _compile_member_plan(rule: SpecRule) -> list:
    """Greedy order: ground checks, then data-driven generators, leftovers
    deferred (they must come out ground, else the spec is not decidable).
    Each op carries precompiled argument resolvers."""
    bound = frozenset(atom_vars(rule.head))
    remaining = list(rule.guard)
    ops: list = []

    def compiled(lit: Literal, kind: str):
        resolvers = tuple(_arg_resolver(a) for a in lit.args)
        return (kind, (_CHECK_FNS[lit.prim], resolvers, lit.neg, lit))

    while remaining:
        for i, lit in enumerate(remaining):
            all_vars = frozenset().union(*_lit_varsets(lit)) if lit.args else frozenset()
            if all_vars <= bound:
                ops.append(compiled(lit, "check"))
                del remaining[i]
                break
            if not lit.neg:
                nv = _data_gen_newvars(lit, bound)
                if nv is not None:
                    # single-result length binding is common; run it in place
                    if (lit.prim == "len" and isinstance(lit.args[1], Var)
                            and lit.args[1].name in nv):
                        ops.append(("bind_len",
                                    (_arg_resolver(lit.args[0]), lit.args[1].name)))
                    else:
                        ops.append(compiled(lit, "gen"))
                    bound = bound | all_vars
                    del remaining[i]
                    break
        else:
            ops.append(("defer", tuple(compiled(l, "check")[1] for l in remaining)))
            remaining = []
    return ops


def _run_member_plan(ops: list, binding: dict, i: int = 0) -> bool:
    n = len(ops)
    b = binding
    while i < n:
        kind, payload = ops[i]
        if kind == "check":
            fn, resolvers, neg, _lit = payload
            args = tuple(r(b) for r in resolvers)
            if fn(args) == neg:
                return False
            i += 1
            continue
        if kind == "bind_len":
            resolver, name = payload
            elems = list_elements(resolver(b))
            if elems is None:
                return False
            b[name] = mkint(len(elems))
            i += 1
            continue
        if kind == "defer":
            for fn, resolvers, neg, lit in payload:
                args = tuple(r(b) for r in resolvers)
                if not all(term_ground(a) for a in args):
                    raise GuardError(
                        "guard literal %s has unbound variables in membership mode" % lit)
                if fn(args) == neg:
                    return False
            i += 1
            continue
        _fn, resolvers, _neg, lit = payload
        args = tuple(r(b) for r in resolvers)
        gen = _gen_for(lit, args, b, None, None)
        if gen is None:
            raise GuardError("guard literal %s is not evaluable here" % lit)
        for b2 in gen:
            if _run_member_plan(ops, b2, i + 1):
                return True
        return False
    return True


def _solve_guard(guard: Sequence[Literal], binding: dict, ctx: Optional[EnumCtx],
                 budget: Optional[Budget], limit: Optional[int]) -> Iterator[dict]:
    """Solutions of the guard conjunction extending `binding`.

    Conjunction order is chosen dynamically: ground literals are checked
    first, then data-driven generators (concat from its operands, member over
    a known list, ...) bind variables, then the bound-driven generators of
    enumeration mode.  Whatever remains is deferred; leftover variables are
    enumerated by the caller (enumeration mode) or make the spec undecidable
    as written (membership mode).
    """
    found = 0

    def finish(b: dict, deferred: tuple) -> Iterator[dict]:
        nonlocal found
        for lit in deferred:
            args = tuple(_resolve(a, b) for a in lit.args)
            if not all(term_ground(a) for a in args):
                if ctx is None:
                    raise GuardError(
                        "guard literal %s has unbound variables in membership mode" % lit)
                continue  # caller enumerates the leftovers and rechecks
            ok = _check_prim(lit.prim, args)
            if lit.neg:
                ok = not ok
            if not ok:
                return
        found += 1
        yield b

    def go(remaining: tuple, b: dict, deferred: tuple) -> Iterator[dict]:
        if limit is not None and found >= limit:
            return
        if not remaining:
            yield from finish(b, deferred)
            return
        resolved = [tuple(_resolve(a, b) for a in lit.args) for lit in remaining]
        for i, lit in enumerate(remaining):
            if all(term_ground(a) for a in resolved[i]):
                ok = _check_prim(lit.prim, resolved[i])
                if lit.neg:
                    ok = not ok
                if ok:
                    yield from go(remaining[:i] + remaining[i + 1:], b, deferred)
                return
        for use_ctx in (None, ctx) if ctx is not None else (None,):
            for i, lit in enumerate(remaining):
                if lit.neg:
                    continue
                gen = _gen_for(lit, resolved[i], b, use_ctx, budget)
                if gen is not None:
                    rest = remaining[:i] + remaining[i + 1:]
                    for b2 in gen:
                        if limit is not None and found >= limit:
                            return
                        yield from go(rest, b2, deferred)
                    return
        yield from finish(b, deferred + tuple(remaining))

    yield from go(tuple(guard), dict(binding), ())


def _recheck(guard: Sequence[Literal], binding: dict, budget: Optional[Budget]) -> bool:
    for lit in guard:
        args = tuple(_resolve(a, binding) for a in lit.args)
        if not all(term_ground(a) for a in args):
            return False
        ok = _check_prim(lit.prim, args)
        if lit.neg:
            ok = not ok
        if not ok:
            return False
    return True


# --- suitability core ------------------------------------------------------------


def suitable_for(atom: Atom, spec_i: Specification, union: Specification,
                 sig: Signature, bound: int, budget: Optional[Budget] = None):
    """Is spec_i suitable for the atom: no ground instance of the atom within
    the bound lies in union minus spec_i.  Returns (ok, counterexample)."""
    vs = atom_vars(atom)
    budgets = var_budgets([atom], bound, bound)
    pools = [_pool_up_to(sig, budgets.get(v, bound), bound) for v in vs]
    for values in product(*pools):
        if budget:
            budget.tick()
        inst = apply_atom(dict(zip(vs, values)), atom)
        if not atom_fits(inst, bound):
            continue
        if union.member(inst, budget) and not spec_i.member(inst, budget):
            return False, inst
    return True, None


# --- level mappings ---------------------------------------------------------------


@dataclass(frozen=True)
class LmExpr:
    terms: tuple  # tuple[(coef: int, measure: 'termsize'|'listlen', var: str)]
    const: int = 0

    def evaluate(self, binding: dict) -> int:
        total = self.const
        for coef, measure, var in self.terms:
            t = binding[var]
            total += coef * (term_size(t) if measure == "termsize" else listlen(t))
        return max(total, 0)

    def __str__(self) -> str:
        parts = ["%d*%s(%s)" % (c, m, v) for c, m, v in self.terms]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


@dataclass(frozen=True)
class LmRule:
    head: Atom
    expr: LmExpr


class LevelMapping:
    """Partial map from ground atoms to naturals; first matching rule wins."""

    def __init__(self, name: str, rules: Sequence[LmRule] = (), table: Optional[dict] = None):
        self.name = name
        self.rules = list(rules)
        self.table = dict(table) if table is not None else None

    def __repr__(self) -> str:
        if self.table is not None:
            return "LevelMapping(%r, table of %d)" % (self.name, len(self.table))
        return "LevelMapping(%r, %d rules)" % (self.name, len(self.rules))


def level_of(lm: LevelMapping, a: Atom) -> Optional[int]:
    """Value of the mapping on a ground atom; None when undefined."""
    if not atom_ground(a):
        raise GuardError("level mappings are defined on ground atoms")
    if lm.table is not None:
        return lm.table.get(a)
    for rule in lm.rules:
        b = match_atom(rule.head, a)
        if b is not None:
            return rule.expr.evaluate(b)
    return None


def derive_shortest_path_levels(edge_facts: Program, pred_names: Tuple[str, str] = ("p", "e")) -> LevelMapping:
    """Table mapping: every edge fact gets level 0; reachability atoms get the
    BFS shortest-path length over the edge graph (0 for each node to itself);
    unreachable pairs stay undefined."""
    p_name, e_name = pred_names
    edges: List[Tuple[Term, Term]] = []
    for c in edge_facts.clauses:
        if c.head.pred != e_name or len(c.head.args) != 2 or c.body:
            continue
        if not atom_ground(c.head):
            raise ValueError("non-ground edge fact: %s" % atom_to_str(c.head))
        edges.append((c.head.args[0], c.head.args[1]))
    nodes: List[Term] = []
    adj: dict = {}
    for u, v in edges:
        for x in (u, v):
            if x not in adj:
                adj[x] = []
                nodes.append(x)
        adj[u].append(v)
    table: dict = {}
    for u, v in edges:
        table[Atom(e_name, (u, v))] = 0
    for start in nodes:
        dist = {start: 0}
        frontier = [start]
        while frontier:
            nxt = []
            for x in frontier:
                for y in adj.get(x, ()):
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        for target, d in dist.items():
            table[Atom(p_name, (start, target))] = d
    return LevelMapping("shortest-path(%s,%s)" % pred_names, table=table)
