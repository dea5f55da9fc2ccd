"""Parser/printer tests: frozen ASTs, error offsets, round-trip properties."""

import pytest
from hypothesis import given, strategies as st

from lgnets.syntax import (
    Atom, Binary, Nullary, ParseError, SBinary, SEmpty, SFormula, SUnary,
    SVar, Sequent, Unary,
    LOGICAL_BINARY, LOGICAL_CONNS, LOGICAL_NULLARY, LOGICAL_UNARY,
    STRUCT_BINARY, STRUCT_NULLARY, STRUCT_UNARY, STRUCTURAL_CONNS,
    parse_formula, parse_rule_line, parse_sequent, parse_structure,
    print_formula, print_sequent, print_structure,
)


def test_connective_inventory_is_complete():
    assert len(LOGICAL_CONNS) == 20
    assert len(set(LOGICAL_CONNS)) == 20
    assert len(STRUCTURAL_CONNS) == 10
    assert len(set(STRUCTURAL_CONNS)) == 10
    assert set(LOGICAL_CONNS).isdisjoint(set(STRUCTURAL_CONNS))


def test_parse_structural_sequent():
    seq = parse_sequent("b o c |- (a > e) o d")
    assert seq == Sequent(
        SBinary("o", SFormula(Atom("b")), SFormula(Atom("c"))),
        SBinary("o",
                SBinary(">", SFormula(Atom("a")), SEmpty()),
                SFormula(Atom("d"))),
    )


def test_parse_empty_structure_and_unit():
    seq = parse_sequent("e |- one")
    assert seq == Sequent(SEmpty(), SFormula(Nullary("one")))


def test_parse_formula_nested():
    f = parse_formula("(bot o- a) -o bot")
    assert f == Binary("-o",
                       Binary("o-", Nullary("bot"), Atom("a")),
                       Nullary("bot"))


def test_parse_unary_call_syntax():
    assert parse_formula("dia(box(a))") == Unary("dia", Unary("box", Atom("a")))
    s = parse_structure("z(fl(a))")
    assert s == SUnary("z", SUnary("fl", SFormula(Atom("a"))))


def test_dashed_connectives_tokenize():
    f = parse_formula("(a o- b) v- c")
    assert f == Binary("v-", Binary("o-", Atom("a"), Atom("b")), Atom("c"))
    g = parse_formula("a -v (b -@ c)")
    assert g == Binary("-v", Atom("a"), Binary("-@", Atom("b"), Atom("c")))


def test_no_precedence_is_an_error():
    with pytest.raises(ParseError) as err:
        parse_formula("a * b * c")
    assert err.value.offset == 6


def test_error_offsets():
    with pytest.raises(ParseError) as err:
        parse_formula("(a * b")
    assert err.value.offset == 6
    with pytest.raises(ParseError) as err:
        parse_formula("a $ b")
    assert err.value.offset == 2
    with pytest.raises(ParseError) as err:
        parse_formula("dia a")
    assert err.value.offset == 4


def test_svars_rejected_outside_rules():
    with pytest.raises(ParseError):
        parse_sequent("X |- a")
    seq = parse_sequent("X |- a", svars=True)
    assert seq.ante == SVar("X")


def test_structural_inside_formula_is_an_error():
    with pytest.raises(ParseError):
        parse_formula("a * (b o c)")
    with pytest.raises(ParseError):
        parse_formula("z(a)")


def test_comments_and_whitespace():
    seq = parse_sequent("a |- a  # identity goal")
    assert seq == Sequent(SFormula(Atom("a")), SFormula(Atom("a")))


def test_print_here_golden():
    f = parse_formula("(bot o- a) -o bot")
    assert print_formula(f) == "(bot o- a) -o bot"
    seq = parse_sequent("b o c |- (a > e) o d")
    assert print_sequent(seq) == "b o c |- (a > e) o d"


def test_parse_rule_line():
    parsed = parse_rule_line("gr1 : V |- ((X o Y) < W) => V |- (X o (Y < W))")
    assert parsed is not None
    name, lhs, rhs, reversible = parsed
    assert name == "gr1"
    assert not reversible
    assert lhs.succ == SBinary(
        "<", SBinary("o", SVar("X"), SVar("Y")), SVar("W"))
    assert rhs.succ == SBinary(
        "o", SVar("X"), SBinary("<", SVar("Y"), SVar("W")))
    assert parse_rule_line("   # comment only") is None
    rev = parse_rule_line("idr : (X o e) |- Y <=> X |- Y")
    assert rev is not None and rev[3] is True


def test_notation_dl():
    assert print_formula(parse_formula("(a * b) -o c"), "dl") == "(a ⊗ b) → c"
    assert print_formula(parse_formula("a @ b"), "dl") == "a ⊕ b"
    assert print_formula(parse_formula("rgal(a)"), "dl") == "(a)^0"
    assert print_formula(parse_formula("lgal(a)"), "dl") == "^0(a)"
    assert print_sequent(parse_sequent("z(a) o b |- e"), "dl") == "∘a ; b ⊢ Φ"
    assert print_formula(parse_formula("one"), "dl") == "1"
    assert print_formula(parse_formula("bot"), "dl") == "0"
    # connectives without a display-logic cell fall back to ?token
    assert print_formula(parse_formula("a ^ b"), "dl") == "a ?^ b"


def test_notation_tlg():
    assert print_formula(parse_formula("(a * b) -o c"), "tlg") == "(a • b) \\ c"
    assert print_formula(parse_formula("a o- b"), "tlg") == "a / b"
    assert print_formula(parse_formula("box(a)"), "tlg") == "□↓a"
    assert print_structure(parse_structure("z(a)"), "tlg") == "⟨a⟩"
    assert print_formula(parse_formula("a @ b"), "tlg") == "a ?@ b"


_atoms = st.sampled_from(["a", "b", "c", "t", "i", "np", "s0"])


def _formulas(depth=3):
    base = st.one_of(
        _atoms.map(Atom),
        st.sampled_from(LOGICAL_NULLARY).map(Nullary),
    )
    return st.recursive(
        base,
        lambda kids: st.one_of(
            st.tuples(st.sampled_from(LOGICAL_UNARY), kids)
            .map(lambda t: Unary(*t)),
            st.tuples(st.sampled_from(LOGICAL_BINARY), kids, kids)
            .map(lambda t: Binary(*t)),
        ),
        max_leaves=8,
    )


def _structures():
    base = st.one_of(
        _formulas().map(SFormula),
        st.just(SEmpty()),
    )
    return st.recursive(
        base,
        lambda kids: st.one_of(
            st.tuples(st.sampled_from(STRUCT_UNARY), kids)
            .map(lambda t: SUnary(*t)),
            st.tuples(st.sampled_from(STRUCT_BINARY), kids, kids)
            .map(lambda t: SBinary(*t)),
        ),
        max_leaves=6,
    )


@given(_formulas())
def test_formula_roundtrip(f):
    assert parse_formula(print_formula(f)) == f


@given(_structures())
def test_structure_roundtrip(s):
    assert parse_structure(print_structure(s)) == s


@given(_structures(), _structures())
def test_sequent_roundtrip(ante, succ):
    seq = Sequent(ante, succ)
    assert parse_sequent(print_sequent(seq)) == seq
