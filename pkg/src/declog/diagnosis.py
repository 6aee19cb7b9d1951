"""Declarative diagnosis: proof trees, oracles, and the two error-locating
searches (incorrect clause instances, uncovered specified atoms).

Interactive and scripted oracles answer one question at a time; the walk asks
the current node's children left to right and descends as soon as one is
judged incorrect.  A spec-driven oracle costs nothing to consult, so there the
walk judges all children of the current node and descends into the last
incorrect one; both walks stop at a node whose children are all correct and
return that node's clause instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

from . import sld, verify
from .herbrand import Signature, _pool_up_to, var_budgets, working_signature
from .reports import Budget
from .specs import ApproxSpec, Specification
from .syntax import atom_to_str, clause_to_str
from .terms import (
    Atom,
    Clause,
    Program,
    Query,
    apply_atom,
    atom_fits,
    atom_ground,
    atom_vars,
    match_atom,
)

YES = "yes"
NO = "no"


class NotASymptom(Exception):
    pass


class NeedAnswer(Exception):
    """Raised by a scripted oracle that ran out of answers; carries the next
    question so a session can park and resume."""

    def __init__(self, atom: Atom, path: Tuple[int, ...], mode: str):
        super().__init__("need an answer for %s" % atom_to_str(atom))
        self.atom = atom
        self.path = path
        self.mode = mode


@dataclass(frozen=True)
class ProofTree:
    atom: Atom
    clause_label: str  # 'builtin' for evaluated comparison atoms
    children: tuple = ()

    def node_at(self, path: Tuple[int, ...]) -> "ProofTree":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def instance(self) -> Clause:
        return Clause(self.atom, tuple(c.atom for c in self.children), self.clause_label)

    def to_json(self) -> dict:
        return {
            "atom": atom_to_str(self.atom),
            "clause": self.clause_label,
            "children": [c.to_json() for c in self.children],
        }


def proof_tree(p: Program, q: Query, depth: int = sld.DEFAULT_DEPTH) -> Optional[ProofTree]:
    """Proof tree of the first success branch (leftmost, depth-first),
    instantiated by the full computed answer; None when the query fails."""
    if len(q) != 1:
        raise ValueError("proof trees are built for atomic queries")
    got = sld.solve_first(p, q, depth)
    if got is None:
        return None
    _subst, skels = got

    def build(skel) -> ProofTree:
        atom, label, children = skel
        return ProofTree(atom, label, tuple(build(c) for c in children))

    return build(skels[0])


# --- oracles ---------------------------------------------------------------------


INCORRECTNESS = "incorrectness"
INCOMPLETENESS = "incompleteness"


@dataclass
class Oracle:
    kind: str  # spec-driven | scripted | interactive
    mode: str  # incorrectness | incompleteness
    judge_fn: Callable  # (atom, path) -> bool
    eager: bool = False  # judge all children before descending

    def judge(self, atom: Atom, path: Tuple[int, ...] = ()) -> bool:
        return self.judge_fn(atom, path)


def spec_oracle(ap: ApproxSpec, mode: str, bound: int,
                sig: Optional[Signature] = None) -> Oracle:
    """Incorrectness judgements use the specification for correctness (an atom
    is CORRECT iff all its ground instances within the bound are allowed);
    incompleteness judgements use the specification for completeness (an atom
    SHOULD SUCCEED iff some ground instance within the bound is required)."""
    spec = ap.s_corr if mode == INCORRECTNESS else ap.s_compl
    if sig is None:
        sig = working_signature(Program([]), specs=[ap.s_compl, ap.s_corr])

    def judge(atom: Atom, _path) -> bool:
        if atom_ground(atom):
            return spec.member(atom)
        insts = _ground_instances(atom, bound, sig)
        if mode == INCORRECTNESS:
            return all(spec.member(a) for a in insts)
        return any(spec.member(a) for a in insts)

    return Oracle("spec-driven", mode, judge, eager=True)


def scripted_oracle(answers: Sequence[str], mode: str, eager: bool = False) -> Oracle:
    """Fixed yes/no answer list for deterministic tests and session replay;
    raises NeedAnswer when the list runs out."""
    answers = list(answers)
    pos = [0]

    def judge(atom: Atom, path) -> bool:
        if pos[0] >= len(answers):
            raise NeedAnswer(atom, tuple(path), mode)
        a = answers[pos[0]]
        pos[0] += 1
        return a == YES

    return Oracle("scripted", mode, judge, eager=eager)


def callback_oracle(ask: Callable, mode: str) -> Oracle:
    return Oracle("interactive", mode, ask, eager=False)


def _ground_instances(atom: Atom, bound: int, sig: Signature) -> list:
    vs = atom_vars(atom)
    budgets = var_budgets([atom], bound, bound)
    pools = [_pool_up_to(sig, budgets.get(v, bound), bound) for v in vs]
    out = []
    for values in product(*pools):
        inst = apply_atom(dict(zip(vs, values)), atom)
        if atom_fits(inst, bound):
            out.append(inst)
    return out


# --- diagnosis results --------------------------------------------------------------


@dataclass
class Diagnosis:
    kind: str  # incorrect-clause-instance | uncovered-atom | no-error | inconclusive
    clause_label: Optional[str] = None
    instance: Optional[Clause] = None
    atom: Optional[Atom] = None
    procedure: Optional[str] = None
    reason: Optional[str] = None
    transcript: list = field(default_factory=list)  # (question atom string, yes/no)
    mode: str = INCORRECTNESS

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "clause": self.clause_label,
            "instance": clause_to_str(self.instance) if self.instance else None,
            "atom": atom_to_str(self.atom) if self.atom else None,
            "procedure": self.procedure,
            "reason": self.reason,
            "transcript": [list(e) for e in self.transcript],
            "mode": self.mode,
        }

    def render_text(self) -> str:
        if self.kind == "incorrect-clause-instance":
            head = "incorrect clause instance (%s): %s" % (self.clause_label,
                                                           clause_to_str(self.instance))
        elif self.kind == "uncovered-atom":
            head = "uncovered specified atom %s in procedure %s" % (
                atom_to_str(self.atom), self.procedure)
        else:
            head = "%s: %s" % (self.kind, self.reason)
        lines = [head]
        for q, a in self.transcript:
            lines.append("  %s? %s" % (q, a))
        return "\n".join(lines)


# --- incorrectness --------------------------------------------------------------------


def diagnose_incorrectness(t: ProofTree, o: Oracle) -> Diagnosis:
    """Locate an incorrect clause instance in a proof tree for a symptom.

    With a spec-driven oracle the root judgement is verified first; an
    interactive session asserts the symptom by existing.
    """
    transcript: List[Tuple[str, str]] = []

    def ask(node: ProofTree, path) -> bool:
        ans = o.judge(node.atom, path)
        transcript.append((atom_to_str(node.atom), YES if ans else NO))
        return ans

    if o.eager:
        if o.judge(t.atom, ()):
            raise NotASymptom("root %s is not a symptom: the oracle judges it correct"
                              % atom_to_str(t.atom))
        transcript.append((atom_to_str(t.atom), NO))

    current = t
    path: Tuple[int, ...] = ()
    while True:
        bad = None
        bad_i = None
        for i, child in enumerate(current.children):
            if ask(child, path + (i,)):
                continue
            bad, bad_i = child, i
            if not o.eager:
                break
        if bad is None:
            return Diagnosis("incorrect-clause-instance",
                             clause_label=current.clause_label,
                             instance=current.instance(),
                             transcript=transcript, mode=INCORRECTNESS)
        current = bad
        path = path + (bad_i,)


# --- incompleteness --------------------------------------------------------------------


def diagnose_incompleteness(p: Program, symptom: Query, s_compl: Specification,
                            o: Oracle, bound: int, depth: int = sld.DEFAULT_DEPTH,
                            sig: Optional[Signature] = None,
                            require_symptom: bool = True,
                            budget: Optional[Budget] = None) -> Diagnosis:
    """Locate an uncovered specified atom starting from a query missing a
    required answer.

    With require_symptom=False the symptom check is skipped and every required
    instance is tried; this runs the coverage-based search as a proof attempt,
    which can flag atoms of a program that is in fact complete (the
    specification may simply be too weak).
    """
    if len(symptom) != 1:
        raise ValueError("incompleteness diagnosis takes an atomic query")
    if sig is None:
        sig = working_signature(p, specs=[s_compl], queries=[symptom])
    budget = budget or Budget()
    transcript: List[Tuple[str, str]] = []

    tree = sld.build_sld_tree(p, symptom, sld.LEFTMOST, depth)
    if require_symptom and tree.truncated:
        return Diagnosis("inconclusive",
                         reason="search tree for the symptom hit the depth limit (%d)" % depth,
                         transcript=transcript, mode=INCOMPLETENESS)

    required = [a for a in _ground_instances(symptom[0], bound, sig) if s_compl.member(a, budget)]
    missing = [a for a in required
               if not any(match_atom(ans[0], a) is not None for ans in tree.answers)]

    if require_symptom:
        if not missing:
            raise NotASymptom(
                "not a symptom: every required instance of %s is already an answer"
                % atom_to_str(symptom[0]))
        candidates = missing
    else:
        candidates = required

    def derivable(a: Atom) -> bool:
        return sld.solve_first(p, (a,), depth) is not None

    def descend(a: Atom, seen: set) -> Diagnosis:
        if a in seen:
            return Diagnosis("inconclusive",
                             reason="cyclic descent through %s" % atom_to_str(a),
                             transcript=transcript, mode=INCOMPLETENESS)
        seen.add(a)
        inst = next(verify.covering_instances(a, p, s_compl, bound, sig, budget), None)
        if inst is None:
            return Diagnosis("uncovered-atom", atom=a, procedure=a.pred,
                             transcript=transcript, mode=INCOMPLETENESS)
        for b in inst.body:
            if derivable(b):
                continue
            ans = o.judge(b, ())
            transcript.append((atom_to_str(b), YES if ans else NO))
            if ans:
                return descend(b, seen)
        return Diagnosis("inconclusive",
                         reason="%s is covered (by %s) and its covering body is derivable; "
                                "the missing answer may need a larger depth" %
                                (atom_to_str(a), inst.label),
                         transcript=transcript, mode=INCOMPLETENESS)

    last: Optional[Diagnosis] = None
    for a in candidates:
        ans = o.judge(a, ())
        transcript.append((atom_to_str(a), YES if ans else NO))
        if not ans:
            continue
        d = descend(a, set())
        if d.kind == "uncovered-atom":
            return d
        last = d
    if last is not None:
        return last
    return Diagnosis("no-error",
                     reason="no required instance leads to an uncovered atom",
                     transcript=transcript, mode=INCOMPLETENESS)
