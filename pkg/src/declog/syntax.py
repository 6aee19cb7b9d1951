"""Surface syntax: tokenizer, program/query parser, and the matching printer.

Grammar (subset of Edinburgh clause syntax):

    program  ::= clause*
    clause   ::= atom '.' | atom ':-' atom (',' atom)* '.'
    term     ::= var | integer | atom-name | atom-name '(' term,* ')'
               | '[' ... ']' list sugar | '(' term ')'
               | term ('-'|'+') term        (left-assoc, tighter)
               | term ('='|'>'|'=<') term   (non-assoc, looser)

'%' starts a line comment.  Cut and negation are rejected.  The printer
emits this same grammar; parse(print(p)) == p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .terms import (
    Atom,
    Clause,
    Compound,
    CONS,
    NIL,
    Program,
    Query,
    Term,
    Var,
    clause_vars,
    list_elements,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("%s (line %d, column %d)" % (message, line, col))
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # name | var | int | qname | punct | end
    text: str
    line: int
    col: int


_PUNCT = [":-", "->", "=<", ">=", "\\+", "=", ">", "<", "-", "+", "*",
          "(", ")", "[", "]", "{", "}", "|", ",", ";"]

_NAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*")
_VAR_RE = re.compile(r"[_A-Z][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while j < n and text[j] != "'":
                buf.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated quoted name", line, col)
            toks.append(Token("qname", "".join(buf), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        m = _INT_RE.match(text, i)
        if m:
            toks.append(Token("int", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _NAME_RE.match(text, i)
        if m:
            toks.append(Token("name", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _VAR_RE.match(text, i)
        if m:
            toks.append(Token("var", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        if ch == "." and (i + 1 >= n or text[i + 1] in " \t\r\n%"):
            toks.append(Token("end", ".", line, col))
            i += 1
            col += 1
            continue
        if ch == "!":
            raise ParseError("cut not supported - use split files", line, col)
        for p in _PUNCT:
            if text.startswith(p, i):
                if p == "\\+":
                    raise ParseError("negation not supported", line, col)
                toks.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            if ch == ".":
                toks.append(Token("punct", ".", line, col))
                i += 1
                col += 1
            else:
                raise ParseError("unexpected character %r" % ch, line, col)
    return toks


# Binary operators usable inside terms; (precedence, left-associative).
INFIX_OPS = {
    "=": (700, False),
    ">": (700, False),
    "=<": (700, False),
    "<": (700, False),
    ">=": (700, False),
    "-": (500, True),
    "+": (500, True),
}


class _Parser:
    def __init__(self, toks: List[Token], fresh_prefix: str = "_G"):
        self.toks = toks
        self.pos = 0
        self.fresh_prefix = fresh_prefix
        self.fresh_count = 0

    def peek(self) -> Optional[Token]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else Token("end", "", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col)
        self.pos += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            raise ParseError("expected %s, got %r" % (text or kind, t.text), t.line, t.col)
        return t

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == "punct" and t.text == text

    def fresh_var(self) -> Var:
        self.fresh_count += 1
        return Var("%s%d" % (self.fresh_prefix, self.fresh_count))

    # term parsing: precedence climbing; max_prec excludes ',' (not an operator here)
    def term(self, max_prec: int = 999) -> Term:
        left = self.primary()
        while True:
            t = self.peek()
            if t is None or t.kind != "punct" or t.text not in INFIX_OPS:
                return left
            prec, left_assoc = INFIX_OPS[t.text]
            if prec > max_prec:
                return left
            self.next()
            right = self.term(prec - 1 if left_assoc else prec - 1)
            left = Compound(t.text, (left, right))
            if not left_assoc:
                nxt = self.peek()
                if nxt is not None and nxt.kind == "punct" and nxt.text in INFIX_OPS \
                        and INFIX_OPS[nxt.text][0] == prec:
                    raise ParseError("operator %r is not associative" % nxt.text, nxt.line, nxt.col)

    def primary(self) -> Term:
        t = self.next()
        if t.kind == "int":
            return Compound(t.text, ())
        if t.kind == "var":
            if t.text == "_":
                return self.fresh_var()
            return Var(t.text)
        if t.kind in ("name", "qname"):
            if self.at_punct("("):
                self.next()
                args = [self.term()]
                while self.at_punct(","):
                    self.next()
                    args.append(self.term())
                self.expect("punct", ")")
                return Compound(t.text, tuple(args))
            return Compound(t.text, ())
        if t.kind == "punct" and t.text == "(":
            inner = self.term(1200)
            self.expect("punct", ")")
            return inner
        if t.kind == "punct" and t.text == "[":
            return self.list_term()
        raise ParseError("unexpected token %r" % t.text, t.line, t.col)

    def list_term(self) -> Term:
        if self.at_punct("]"):
            self.next()
            return NIL
        items = [self.term()]
        while self.at_punct(","):
            self.next()
            items.append(self.term())
        tail: Term = NIL
        if self.at_punct("|"):
            self.next()
            tail = self.term()
        self.expect("punct", "]")
        out = tail
        for x in reversed(items):
            out = Compound(CONS, (x, out))
        return out

    def atom(self) -> Atom:
        t = self.peek()
        term = self.term()
        if isinstance(term, Var):
            raise ParseError("a variable is not an atom", t.line, t.col)
        return Atom(term.functor, term.args)

    def clause(self) -> Clause:
        head = self.atom()
        body: List[Atom] = []
        if self.at_punct(":-"):
            self.next()
            body.append(self.atom())
            while self.at_punct(","):
                self.next()
                body.append(self.atom())
        self.expect("end")
        return Clause(head, tuple(body))


def parse_program(text: str) -> Program:
    """Parse a program; clause labels are auto-assigned c1, c2, ... in source order.

    Collects an arity-inconsistency warning for any symbol used at more than
    one arity.
    """
    toks = tokenize(text)
    p = _Parser(toks)
    clauses = []
    while p.peek() is not None:
        p.fresh_count = 0  # anonymous variables restart per clause
        clauses.append(p.clause())
    prog = Program(clauses)
    prog.warnings.extend(_arity_warnings(prog))
    return prog


def _arity_warnings(prog: Program) -> List[str]:
    seen: dict = {}

    def walk_term(t: Term):
        if isinstance(t, Compound):
            seen.setdefault(("f", t.functor), set()).add(len(t.args))
            for a in t.args:
                walk_term(a)

    for c in prog.clauses:
        for a in (c.head,) + tuple(c.body):
            seen.setdefault(("p", a.pred), set()).add(len(a.args))
            for t in a.args:
                walk_term(t)
    out = []
    for (kind, name), arities in sorted(seen.items()):
        if len(arities) > 1:
            what = "predicate" if kind == "p" else "functor"
            out.append("%s %r used at arities %s" % (what, name, sorted(arities)))
    return out


def parse_query(text: str) -> Query:
    """Parse a comma-separated atom sequence, optional trailing '.'."""
    toks = tokenize(text)
    p = _Parser(toks)
    if p.peek() is None:
        return ()
    atoms = [p.atom()]
    while p.at_punct(","):
        p.next()
        atoms.append(p.atom())
    if p.peek() is not None and p.peek().kind == "end":
        p.next()
    if p.peek() is not None:
        t = p.peek()
        raise ParseError("trailing input %r" % t.text, t.line, t.col)
    return tuple(atoms)


def parse_term(text: str) -> Term:
    toks = tokenize(text)
    p = _Parser(toks)
    t = p.term(1200)
    if p.peek() is not None and p.peek().kind == "end":
        p.next()
    if p.peek() is not None:
        tok = p.peek()
        raise ParseError("trailing input %r" % tok.text, tok.line, tok.col)
    return t


def parse_atom(text: str) -> Atom:
    t = parse_term(text)
    if isinstance(t, Var):
        raise ParseError("a variable is not an atom", 1, 1)
    return Atom(t.functor, t.args)


# --- printing ------------------------------------------------------------------

_PLAIN_NAME = re.compile(r"[a-z][A-Za-z0-9_]*$")
_NUMERAL = re.compile(r"[0-9]+$")


def _name_out(name: str) -> str:
    if _PLAIN_NAME.match(name) or _NUMERAL.match(name) or name == "[]":
        return name
    return "'%s'" % name


def term_to_str(t: Term, max_prec: int = 999) -> str:
    if isinstance(t, Var):
        return t.name
    if t.functor == CONS and len(t.args) == 2:
        return _list_to_str(t)
    if t.functor in INFIX_OPS and len(t.args) == 2:
        prec, left_assoc = INFIX_OPS[t.functor]
        left = term_to_str(t.args[0], prec if left_assoc else prec - 1)
        right = term_to_str(t.args[1], prec - 1)
        s = "%s%s%s" % (left, t.functor, right)
        return "(%s)" % s if prec > max_prec else s
    if not t.args:
        return _name_out(t.functor)
    return "%s(%s)" % (_name_out(t.functor), ",".join(term_to_str(a) for a in t.args))


def _list_to_str(t: Term) -> str:
    items = []
    while isinstance(t, Compound) and t.functor == CONS and len(t.args) == 2:
        items.append(term_to_str(t.args[0]))
        t = t.args[1]
    if t == NIL:
        return "[%s]" % ",".join(items)
    return "[%s|%s]" % (",".join(items), term_to_str(t))


def atom_to_str(a: Atom) -> str:
    return term_to_str(Compound(a.pred, a.args))


def query_to_str(q: Query) -> str:
    return ", ".join(atom_to_str(a) for a in q)


def clause_to_str(c: Clause) -> str:
    if not c.body:
        return "%s." % atom_to_str(c.head)
    return "%s :- %s." % (atom_to_str(c.head), ", ".join(atom_to_str(b) for b in c.body))


def program_to_str(p: Program) -> str:
    return "\n".join(clause_to_str(c) for c in p.clauses) + ("\n" if p.clauses else "")


def term_to_json(t: Term):
    if isinstance(t, Var):
        return {"var": t.name}
    return {"functor": t.functor, "args": [term_to_json(a) for a in t.args]}


def atom_to_json(a: Atom):
    return {"pred": a.pred, "args": [term_to_json(t) for t in a.args]}
