import pytest
from hypothesis import given, settings, strategies as st

from declog.syntax import (
    ParseError,
    parse_atom,
    parse_program,
    parse_term,
    program_to_str,
    term_to_str,
)
from declog.terms import Atom, Clause, Compound, Program, Var, const, mklist


def test_parse_single_fact():
    p = parse_program("app([],L,L).")
    assert len(p.clauses) == 1
    assert p.clauses[0].label == "c1"
    assert p.clauses[0].head == parse_atom("app([],L,L)")
    assert p.clauses[0].body == ()


def test_parse_empty_program():
    assert parse_program("").clauses == []


def test_cut_rejected():
    with pytest.raises(ParseError, match="cut not supported"):
        parse_program("p(X) :- q(X), !.")


def test_negation_rejected():
    with pytest.raises(ParseError, match="negation not supported"):
        parse_program("p(X) :- \\+ q(X).")


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as e:
        parse_program("p(a.\nq(b).")
    assert e.value.line == 1 and e.value.col > 1


def test_labels_in_source_order_and_unique():
    p = parse_program("a. b. c.")
    assert [c.label for c in p.clauses] == ["c1", "c2", "c3"]


def test_infix_operators_parse():
    c = parse_program("q(V-P, W) :- V = P.").clauses[0]
    assert c.head == Atom("q", (Compound("-", (Var("V"), Var("P"))), Var("W")))
    assert c.body[0] == Atom("=", (Var("V"), Var("P")))
    c = parse_program("ok :- Y > X, X =< Y.").clauses[0]
    assert c.body[0].pred == ">" and c.body[1].pred == "=<"


def test_nonassoc_comparison_rejected():
    with pytest.raises(ParseError):
        parse_term("a = b = c")


def test_minus_left_assoc():
    assert parse_term("a-b-c") == parse_term("(a-b)-c")
    assert parse_term("a-(b-c)") != parse_term("a-b-c")


def test_list_sugar():
    assert parse_term("[a,b]") == mklist([const("a"), const("b")])
    assert parse_term("[H|T]") == Compound(".", (Var("H"), Var("T")))
    assert parse_term("[a,b|T]") == mklist([const("a"), const("b")], Var("T"))
    assert term_to_str(parse_term("[a,b|T]")) == "[a,b|T]"


def test_quoted_atoms_roundtrip():
    t = parse_term("'$c1'")
    assert t == const("$c1")
    assert term_to_str(t) == "'$c1'"


def test_anonymous_vars_are_fresh():
    c = parse_program("q(_, [A|_]) :- p(_, A).").clauses[0]
    names = [a for a in [c.head.args[0]] if isinstance(a, Var)]
    all_anon = {v for v in (c.head.args[0], c.body[0].args[0]) if isinstance(v, Var)}
    assert len(all_anon) == 2  # distinct fresh variables


def test_arity_warning_collected():
    p = parse_program("p(a). p(a,b).")
    assert any("arities" in w for w in p.warnings)


def test_integer_constants():
    c = parse_program("n(0, 12).").clauses[0]
    assert c.head == Atom("n", (const("0"), const("12")))


FIXTURE_SOURCES = [
    "app([H|K],L,[H|M]) :- app(K,L,M).\napp([],L,L).\n",
    "s([],[],[]).\ns([X|Xs],[X|Ys],Zs) :- s(Xs,Zs,Ys).\n",
    "p(P-P,[]).\nq(V-P,W) :- V=P.\n",
    "insert(X,[Y|Ys],[Y|Zs]) :- Y>X, insert(X,Ys,Zs).\n",
]


@pytest.mark.parametrize("src", FIXTURE_SOURCES)
def test_roundtrip_fixture_sources(src):
    p = parse_program(src)
    again = parse_program(program_to_str(p))
    assert again.clauses == p.clauses


# --- generated round-trips ----------------------------------------------------------

gen_terms = st.recursive(
    st.sampled_from([const("a"), const("$c1"), const("0"), const("[]"),
                     Var("X"), Var("Ys")]),
    lambda sub: st.builds(lambda x: Compound("f", (x,)), sub)
    | st.builds(lambda x, y: Compound(".", (x, y)), sub, sub)
    | st.builds(lambda x, y: Compound("-", (x, y)), sub, sub),
    max_leaves=6,
)
gen_atoms = st.builds(lambda args: Atom("p", tuple(args)), st.lists(gen_terms, min_size=0, max_size=3))
gen_clauses = st.builds(lambda h, b: Clause(h, tuple(b)),
                        gen_atoms, st.lists(gen_atoms, min_size=0, max_size=2))


@given(st.lists(gen_clauses, min_size=0, max_size=4))
@settings(max_examples=150, deadline=None)
def test_parse_print_roundtrip(clauses):
    p = Program(list(clauses))
    text = program_to_str(p)
    again = parse_program(text)
    assert again.clauses == p.clauses
