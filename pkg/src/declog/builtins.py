"""Primitive comparison atoms evaluated outside clause resolution.

Atoms like 3 > 1 are ordinary atoms; their truth is supplied here (and by
specifications).  A predicate is only treated as a builtin when the program
defines no clauses for it, so e.g. a program clause P = P keeps '=' ordinary.
"""

from __future__ import annotations

from .terms import Atom, atom_ground, int_value

BUILTIN_PREDS = {(">", 2), ("<", 2), (">=", 2), ("=<", 2)}

_OPS = {
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    "=<": lambda a, b: a <= b,
}


def is_builtin(pred: str, arity: int, program_preds: set) -> bool:
    return (pred, arity) in BUILTIN_PREDS and (pred, arity) not in program_preds


def eval_builtin(a: Atom) -> bool:
    """Truth of a builtin atom; non-ground or non-integer arguments are false."""
    if not atom_ground(a):
        return False
    x = int_value(a.args[0])
    y = int_value(a.args[1])
    if x is None or y is None:
        return False
    return _OPS[a.pred](x, y)
