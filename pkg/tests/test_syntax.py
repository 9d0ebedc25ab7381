import pytest

from nestednets.attrs import TRUE, Otherwise
from nestednets.notation import Arrow, Case, format_rule
from nestednets.program import Program, corpus_names, corpus_text, dump
from nestednets.syntax import ParseError, parse_nap, parse_program, tokenize


def test_tokens():
    kinds = [(t.kind, t.value) for t in tokenize("f(x') >< Int(a) # note\n | a => 0")]
    assert ("NAME", "x'") in kinds
    assert ("OP", "=>") in kinds
    assert kinds[-1] == ("EOF", "")


def test_unexpected_character():
    with pytest.raises(ParseError) as err:
        tokenize("a $ b")
    assert err.value.line == 1


def test_sections_and_declarations():
    p = parse_program("symbols: f/2, g/1/2\nrules:\nnets:\n")
    assert p.symbols["g"].attr_arity == 2
    assert [s.name for s in p.declared] == ["f", "g"]


def test_undeclared_symbol():
    with pytest.raises(ParseError, match="undeclared"):
        parse_program("rules: foo(r) >< Int(a) -> r ~ Int(a);")


def test_guard_group():
    p = parse_program("symbols: f/1\nrules: f(r) >< Int(a) | a > 0 -> r ~ Int(1) | otherwise -> r ~ Int(0);")
    (rn,) = p.rules
    assert [type(g).__name__ for g, _ in rn.groups] == ["BinOp", "Otherwise"]
    assert all(isinstance(s, Arrow) for _, s in rn.groups)


def test_otherwise_must_be_last():
    with pytest.raises(ParseError, match="otherwise"):
        parse_program("symbols: f/1\nrules: f(r) >< Int(a) | otherwise -> r ~ Int(1) | a > 0 -> r ~ Int(0);")


def test_case_forms():
    a = parse_program("symbols: f/1\nrules: f(r) >< Cons(x)(xs) -> case xs of { Nil -> r ~ Int(x) };")
    b = parse_program("symbols: f/1\nrules: f(r) >< Cons(x)(xs) -> case of xs Nil -> r ~ Int(x);")
    assert a.rules == b.rules
    (_, spray), = a.rules[0].groups
    assert isinstance(spray, Case) and spray.port == "xs"


def test_duplicate_branch_agent():
    with pytest.raises(ParseError, match="twice"):
        parse_program("symbols: f/1\nrules: f(r) >< Cons(x)(xs) -> case xs of "
                      "{ Nil -> r ~ Int(x) Nil -> r ~ Int(0) };")


def test_textual_nap():
    syms = parse_program("symbols: gcd/1, Pair/2").symbols
    nap = parse_nap("gcd(r) >< Pair(p1, p2) if true, p2 - Int(b) if b == 0", syms)
    assert nap.cond is TRUE and nap.connections[0].port == "p2"
    assert str(nap) == "<gcd(r) >< Pair(p1, p2) if true, p2 - Int(b) if b == 0>"
    assert parse_nap(str(nap), syms) == nap


def test_error_position():
    with pytest.raises(ParseError) as err:
        parse_program("symbols: f/1\nrules:\nf(r) >< Int(a) -> r ~ ;")
    assert err.value.line == 3


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trip(name):
    prog = Program.parse(corpus_text(name))
    printed = dump(prog.symbols, prog.notation, prog.nets)
    again = Program.parse(printed)
    assert again.notation == prog.notation
    assert again.nets == prog.nets
    assert [s for s in again.symbols] == [s for s in prog.symbols]


def test_format_rule_reparses():
    prog = Program.parse(corpus_text("gcd"))
    text = "symbols: gcd/1, Pair/2\nrules:\n" + format_rule(prog.notation[0])
    assert Program.parse(text).notation == prog.notation
