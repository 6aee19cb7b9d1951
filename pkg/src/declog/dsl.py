"""Parsers for the workspace text formats.

Specification files (*.spec):

    spec s_append0 {
      app(K, L, M) where is_list(K), is_list(L), is_list(M), concat(K, L, M);
    }
    spec s_append {
      include s_append0;
      app(K, L, M) where not is_list(L), not is_list(M);
    }
    lm app_len { app(T, _, _) = listlen(T); }
    lm sat0_lm { p(_, U) = 2*listlen(U) + 2; }
    table lm graph_lm from 'graph.lmt';   % lines like  p(a,b) = 1.

Split files (*.split):

    split nop {
      program = 'programs/nop.pl';
      part { clauses = c1; spec = s_nop1; }
      part { clauses = c2; spec = s_nop2; }
    }

Clause-selection rule files (*.csel):

    rules nop_cut {
      select leftmost;
      nop(adam, _) -> 1;
      nop(G, _) where ground(G) -> 3;
      default -> 1;
    }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from .sld import LEFTMOST, RIGHTMOST, CSelectionRule, CsRule, STOP, SelectionRule
from .specs import Literal, LevelMapping, LmExpr, LmRule, SpecRule, Specification
from .syntax import ParseError, _Parser, tokenize
from .terms import Atom, Compound, Var, int_value

KNOWN_PRIMS = {
    "is_list", "nat", "int", "int_list", "len", "concat", "member", "sorted_int",
    "perm_multiset", "eq", "neq", "lt_int", "le_int", "ground", "size_le",
    "unzip", "elems_in",
}


class DslError(Exception):
    pass


@dataclass
class RawSpec:
    name: str
    includes: List[str] = field(default_factory=list)
    rules: List[SpecRule] = field(default_factory=list)


@dataclass
class SpecFile:
    specs: List[RawSpec] = field(default_factory=list)
    lms: dict = field(default_factory=dict)  # name -> LevelMapping


@dataclass
class SplitDef:
    name: str
    program_path: str
    parts: List[Tuple[tuple, str]] = field(default_factory=list)  # (labels, spec name)


@dataclass
class CselDef:
    name: str
    rule: CSelectionRule = None


class _DslParser(_Parser):
    def name_token(self) -> str:
        t = self.next()
        if t.kind not in ("name", "var", "qname"):
            raise ParseError("expected a name, got %r" % t.text, t.line, t.col)
        return t.text

    def keyword(self, word: str) -> None:
        t = self.next()
        if t.kind != "name" or t.text != word:
            raise ParseError("expected %r, got %r" % (word, t.text), t.line, t.col)

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == "name" and t.text == word

    def head_atom(self, max_prec: int = 1200) -> Atom:
        term = self.term(max_prec)
        if isinstance(term, Var):
            t = self.peek()
            raise ParseError("a pattern head cannot be a variable",
                             t.line if t else 1, t.col if t else 1)
        return Atom(term.functor, term.args)

    def literal(self) -> Literal:
        neg = False
        if self.at_keyword("not"):
            self.next()
            neg = True
        t = self.next()
        if t.kind not in ("name", "qname"):
            raise ParseError("expected a guard primitive, got %r" % t.text, t.line, t.col)
        prim = t.text
        if prim not in KNOWN_PRIMS:
            raise ParseError("unknown guard primitive %r" % prim, t.line, t.col)
        self.expect("punct", "(")
        args = [self.term()]
        while self.at_punct(","):
            self.next()
            args.append(self.term())
        self.expect("punct", ")")
        return Literal(prim, tuple(args), neg)

    def lm_expr(self) -> LmExpr:
        terms: List[tuple] = []
        const = 0

        def addend(sign: int):
            nonlocal const
            t = self.peek()
            if t is None:
                raise ParseError("expected a level expression", 1, 1)
            if t.kind == "int":
                self.next()
                k = sign * int(t.text)
                if self.at_punct("*"):
                    self.next()
                    m, v = self.measure()
                    terms.append((k, m, v))
                else:
                    const += k
                return
            m, v = self.measure()
            terms.append((sign, m, v))

        addend(1)
        while True:
            if self.at_punct("+"):
                self.next()
                addend(1)
            elif self.at_punct("-"):
                self.next()
                addend(-1)
            else:
                break
        return LmExpr(tuple(terms), const)

    def measure(self) -> Tuple[str, str]:
        t = self.next()
        if t.kind != "name" or t.text not in ("termsize", "listlen"):
            raise ParseError("expected termsize(..) or listlen(..), got %r" % t.text,
                             t.line, t.col)
        self.expect("punct", "(")
        v = self.next()
        if v.kind != "var":
            raise ParseError("level measures take a pattern variable", v.line, v.col)
        self.expect("punct", ")")
        return t.text, v.text


def parse_spec_file(text: str, base_dir: Optional[Path] = None) -> SpecFile:
    p = _DslParser(tokenize(text))
    out = SpecFile()
    while p.peek() is not None:
        if p.at_keyword("spec"):
            p.next()
            raw = RawSpec(p.name_token())
            p.expect("punct", "{")
            while not p.at_punct("}"):
                if p.at_keyword("include"):
                    p.next()
                    raw.includes.append(p.name_token())
                    p.expect("punct", ";")
                    continue
                p.fresh_count = 0
                head = p.head_atom()
                guard: List[Literal] = []
                if p.at_keyword("where"):
                    p.next()
                    guard.append(p.literal())
                    while p.at_punct(","):
                        p.next()
                        guard.append(p.literal())
                p.expect("punct", ";")
                raw.rules.append(SpecRule(head, tuple(guard)))
            p.next()
            out.specs.append(raw)
        elif p.at_keyword("lm"):
            p.next()
            name = p.name_token()
            p.expect("punct", "{")
            rules: List[LmRule] = []
            while not p.at_punct("}"):
                p.fresh_count = 0
                head = p.head_atom(max_prec=699)  # '=' separates head from expression
                p.expect("punct", "=")
                rules.append(LmRule(head, p.lm_expr()))
                p.expect("punct", ";")
            p.next()
            out.lms[name] = LevelMapping(name, rules=rules)
        elif p.at_keyword("table"):
            p.next()
            p.keyword("lm")
            name = p.name_token()
            p.keyword("from")
            rel = p.name_token()
            p.expect("punct", ";")
            if base_dir is None:
                raise DslError("table lm %r needs a base directory to resolve %r" % (name, rel))
            out.lms[name] = parse_table_lm(name, (base_dir / rel).read_text())
        else:
            t = p.peek()
            raise ParseError("expected spec, lm or table, got %r" % t.text, t.line, t.col)
    return out


def parse_table_lm(name: str, text: str) -> LevelMapping:
    """One `atom = value.` entry per line."""
    p = _DslParser(tokenize(text))
    table: dict = {}
    while p.peek() is not None:
        entry = p.term(1200)
        p.expect("end")
        if not (isinstance(entry, Compound) and entry.functor == "=" and len(entry.args) == 2):
            raise DslError("table lm %r: expected `atom = value.` entries" % name)
        atom_t, val_t = entry.args
        v = int_value(val_t)
        if isinstance(atom_t, Var) or v is None or v < 0:
            raise DslError("table lm %r: bad entry %s" % (name, entry))
        table[Atom(atom_t.functor, atom_t.args)] = v
    return LevelMapping(name, table=table)


def resolve_specs(raws: List[RawSpec]) -> dict:
    """Flatten include references into plain rule lists (union semantics)."""
    by_name = {}
    for r in raws:
        if r.name in by_name:
            raise DslError("duplicate specification name %r" % r.name)
        by_name[r.name] = r
    done: dict = {}

    def build(name: str, trail: tuple):
        if name in done:
            return done[name]
        if name in trail:
            raise DslError("include cycle through %r" % name)
        raw = by_name.get(name)
        if raw is None:
            raise DslError("unknown specification %r (referenced by include)" % name)
        rules: List[SpecRule] = []
        for inc in raw.includes:
            rules.extend(build(inc, trail + (name,)).rules)
        rules.extend(raw.rules)
        done[name] = Specification(name, rules)
        return done[name]

    for r in raws:
        build(r.name, ())
    return done


# --- split files -----------------------------------------------------------------


def parse_split_file(text: str) -> List[SplitDef]:
    p = _DslParser(tokenize(text))
    out: List[SplitDef] = []
    while p.peek() is not None:
        p.keyword("split")
        name = p.name_token()
        p.expect("punct", "{")
        p.keyword("program")
        p.expect("punct", "=")
        path = p.name_token()
        p.expect("punct", ";")
        d = SplitDef(name, path)
        while p.at_keyword("part"):
            p.next()
            p.expect("punct", "{")
            p.keyword("clauses")
            p.expect("punct", "=")
            labels = [p.name_token()]
            while p.at_punct(","):
                p.next()
                labels.append(p.name_token())
            p.expect("punct", ";")
            p.keyword("spec")
            p.expect("punct", "=")
            spec_name = p.name_token()
            p.expect("punct", ";")
            p.expect("punct", "}")
            d.parts.append((tuple(labels), spec_name))
        p.expect("punct", "}")
        if not d.parts:
            raise DslError("split %r has no parts" % name)
        out.append(d)
    return out


# --- c-selection rule files ---------------------------------------------------------


def parse_csel_file(text: str) -> List[CselDef]:
    p = _DslParser(tokenize(text))
    out: List[CselDef] = []
    while p.peek() is not None:
        p.keyword("rules")
        name = p.name_token()
        p.expect("punct", "{")
        strategy = LEFTMOST
        rules: List[CsRule] = []
        default = None
        while not p.at_punct("}"):
            if p.at_keyword("select"):
                p.next()
                t = p.next()
                if t.text == "leftmost":
                    strategy = LEFTMOST
                elif t.text == "rightmost":
                    strategy = RIGHTMOST
                else:
                    raise ParseError("expected leftmost or rightmost", t.line, t.col)
                p.expect("punct", ";")
                continue
            if p.at_keyword("default"):
                p.next()
                p.expect("punct", "->")
                default = _target(p)
                p.expect("punct", ";")
                continue
            p.fresh_count = 0
            pattern = p.head_atom()
            guard: List[Literal] = []
            if p.at_keyword("where"):
                p.next()
                guard.append(p.literal())
                while p.at_punct(","):
                    p.next()
                    guard.append(p.literal())
            p.expect("punct", "->")
            target = _target(p)
            p.expect("punct", ";")
            rules.append(CsRule(pattern, tuple(guard), target))
        p.next()
        if default is None:
            raise DslError("rules %r: a default rule is mandatory" % name)
        out.append(CselDef(name, CSelectionRule(tuple(rules), default, strategy, name)))
    return out


def _target(p: _DslParser) -> int:
    t = p.next()
    if t.kind == "int":
        v = int(t.text)
        if v < 1:
            raise ParseError("program indices are 1-based", t.line, t.col)
        return v
    if t.kind == "name" and t.text == "stop":
        return STOP
    raise ParseError("expected a program index or stop, got %r" % t.text, t.line, t.col)
