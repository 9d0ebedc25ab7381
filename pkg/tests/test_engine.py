import random

import pytest
from hypothesis import given, settings, strategies as st

from nestednets.cnap import ConditionalNap, Rule
from nestednets.engine import (FIFO, LIFO, Blocked, MatchResult, Reducer, RuntimeFault,
                               StepLimitExceeded, Strategy, apply, match, reduce,
                               reduce_all_orders)
from nestednets.net import find_active_pairs, iso
from nestednets.program import Program, load_corpus
from nestednets.terms import format_net

GCD = load_corpus("gcd")
MULT = load_corpus("mult")
SUMUP = load_corpus("sumup")
LAST = load_corpus("lastelt")


def only_pair(net):
    (pair,) = find_active_pairs(net)
    return pair


def unary(n):
    return "Z" if n == 0 else f"S({unary(n - 1)})"


def test_match_gcd_step():
    net = GCD.parse_net("gcd(r) ~ Pair(21, 14)")
    m = match(net, only_pair(net), GCD.rules)
    assert isinstance(m, MatchResult)
    assert m.rule.name == "gcd_Pair.2"
    assert m.env == {"a": 21, "b": 14}
    assert len(m.consumed) == 4
    assert set(m.boundary) == {"r"}


def test_match_gcd_base_case():
    net = GCD.parse_net("gcd(r) ~ Pair(7, 0)")
    m = match(net, only_pair(net), GCD.rules)
    assert m.rule.name == "gcd_Pair.1" and m.env == {"b": 0}


def test_match_either_orientation():
    net = GCD.parse_net("Pair(21, 14) ~ gcd(r)")
    pair = only_pair(net)
    assert match(net, (pair.right, pair.left), GCD.rules).env == {"a": 21, "b": 14}
    assert match(net, (pair.left, pair.right), GCD.rules).env == {"a": 21, "b": 14}


def test_match_blocked_and_no_match():
    net = LAST.parse_net("lastElt(r) ~ Cons(1)(t)")
    assert isinstance(match(net, only_pair(net), LAST.rules), Blocked)
    net = GCD.parse_net("gcd(r) ~ Pair(x, 14)")
    assert isinstance(match(net, only_pair(net), GCD.rules), Blocked)
    net = LAST.parse_net("lastElt(r) ~ Nil")
    assert match(net, only_pair(net), LAST.rules) is None


def test_apply_increment():
    prog = Program.parse("symbols: Inc/1\nrules: Inc(r) >< Int(v) -> r ~ Int(v + 1);")
    net = prog.parse_net("Inc(r) ~ Int(0)")
    m = match(net, only_pair(net), prog.rules)
    apply(net, m)
    assert format_net(net) == "r ~ Int(1)"


def test_apply_eraser():
    net = MULT.parse_net("era ~ Z")
    apply(net, match(net, only_pair(net), MULT.rules))
    assert len(net.agents) == 0 and net.interface == []


def test_apply_gcd_step_shape():
    net = GCD.parse_net("gcd(r) ~ Pair(21, 14)")
    apply(net, match(net, only_pair(net), GCD.rules))
    assert iso(net, GCD.parse_net("gcd(r) ~ Pair(14, 7)"))


def test_apply_connects_through_wires():
    # r ~ p1 where p1 leads to another free port: the two outside ends meet
    net = GCD.parse_net("gcd(r) ~ Pair(s, 0)")
    apply(net, match(net, only_pair(net), GCD.rules))
    assert net.peer("r") == "s" and not net.agents


@pytest.mark.parametrize("a, b", [(21, 14), (14, 21), (5, 0), (0, 5), (17, 5), (30, 30)])
def test_reduce_gcd(a, b):
    import math
    res = reduce(GCD.parse_net(f"gcd(r) ~ Pair({a}, {b})"), GCD.rules)
    assert format_net(res.net) == f"r ~ Int({math.gcd(a, b)})"


def test_reduce_mult():
    res = reduce(MULT.net(), MULT.rules)
    assert iso(res.net, MULT.parse_net(f"r ~ {unary(6)}"))
    assert res.steps == 23


@pytest.mark.parametrize("n", [0, 1, 5, 12])
def test_reduce_sumup(n):
    res = reduce(SUMUP.parse_net(f"sumup(r) ~ Int({n})"), SUMUP.rules)
    assert format_net(res.net) == f"r ~ Int({n * (n + 1) // 2})"


def test_reduce_lastelt():
    res = reduce(LAST.net(), LAST.rules)
    assert format_net(res.net) == "r ~ Int(3)"


def test_blocked_pairs_reported():
    res = reduce(LAST.parse_net("lastElt(r) ~ Cons(1)(Cons(2)(t))"), LAST.rules)
    assert res.steps == 1 and len(res.blocked) == 1
    assert res.notes == ["blocked pairs remain"]


def test_blocked_pair_wakes_up():
    # the list tail is computed by another active pair first
    prog = Program.parse("""symbols: lastElt/1, mk/1
    rules:
    lastElt(r) >< Cons(x)(xs) -> case xs of {
        Nil -> r ~ Int(x)
        Cons(y)(ys) -> lastElt(r) ~ Cons(y)(ys) };
    mk(t) >< Int(n) -> t ~ Cons(n)(Nil);
    """)
    net = prog.parse_net("lastElt(r) ~ Cons(1)(t), mk(t) ~ Int(9)")
    for s in (FIFO, LIFO, Strategy.random(3)):
        res = reduce(net, prog.rules, s)
        assert format_net(res.net) == "r ~ Int(9)" and not res.blocked


def test_step_limit():
    prog = Program.parse("symbols: loop/0\nrules: loop >< Int(a) -> loop ~ Int(a + 1);")
    with pytest.raises(StepLimitExceeded) as err:
        reduce(prog.parse_net("loop ~ Int(0)"), prog.rules, max_steps=50)
    assert len(err.value.trace) == 50


def test_step_limit_not_hit_at_exact_count():
    res = reduce(MULT.net(), MULT.rules, max_steps=23)
    assert res.steps == 23


def test_runtime_fault_names_rule():
    prog = Program.parse("symbols: f/1\nrules: f(r) >< Int(a) -> r ~ Int(10 / a);")
    with pytest.raises(RuntimeFault, match="f_Int.1"):
        reduce(prog.parse_net("f(r) ~ Int(0)"), prog.rules)
    prog = Program.parse("symbols: f/1\nrules: f(r) >< Int(a) | 10 / a > 1 -> r ~ Int(a)"
                         " | otherwise -> r ~ Int(0);")
    with pytest.raises(RuntimeFault):
        reduce(prog.parse_net("f(r) ~ Int(0)"), prog.rules)


def test_trace_format():
    res = reduce(GCD.net(), GCD.rules)
    assert res.trace.format().splitlines() == [
        "#1 gcd_Pair.2 gcd><Pair {b=14,a=21}",
        "#2 gcd_Pair.2 gcd><Pair {b=7,a=14}",
        "#3 gcd_Pair.1 gcd><Pair {b=0}",
    ]


def test_deterministic_given_seed():
    a = reduce(MULT.net(), MULT.rules, Strategy.random(11))
    b = reduce(MULT.net(), MULT.rules, Strategy.random(11))
    assert a.trace.format() == b.trace.format()
    assert format_net(a.net) == format_net(b.net)


def test_input_net_not_modified():
    net = GCD.net()
    before = format_net(net)
    reduce(net, GCD.rules)
    assert format_net(net) == before


def test_defer_strategy():
    s = Strategy("fifo", defer=frozenset({"Add"}))
    res = reduce(MULT.net(), MULT.rules, s, snapshots=True)
    target = MULT.parse_net("Add(r, w) ~ S(S(S(Z))), Add(w, Z) ~ S(S(S(Z)))")
    assert [e.step for e in res.trace if iso(e.net, target)] == [15]
    with pytest.raises(ValueError):
        Strategy("bfs")


def _flipped(rules):
    return [Rule(ConditionalNap(r.lhs.right, r.lhs.left, r.lhs.cond, r.lhs.connections),
                 r.rhs, r.name) for r in rules]


@pytest.mark.parametrize("prog, text", [
    (GCD, "gcd(r) ~ Pair(21, 14)"),
    (MULT, None),
    (SUMUP, "sumup(r) ~ Int(6)"),
    (LAST, "lastElt(r) ~ [5, 1, 4, 2]"),
])
def test_symmetric_matching(prog, text):
    net = prog.parse_net(text) if text else prog.net()
    for rules in (prog.rules, prog.flat_rules):
        a = reduce(net, rules)
        b = reduce(net, _flipped(rules))
        assert iso(a.net, b.net) and a.steps == b.steps


def test_single_redex_confluence():
    rep = reduce_all_orders(MULT.parse_net("era ~ Z"), MULT.rules, trials=5)
    assert rep.ok and rep.runs[0].steps == 1


def test_nonconfluent_rules_detected():
    por = load_corpus("por")
    rep = reduce_all_orders(por.net(), por.rules, trials=10)
    assert not rep.ok
    forms = sorted(format_net(n) for n in rep.distinct_normal_forms())
    assert forms == ["r ~ Int(0)", "r ~ Int(1)"]


def _interface_watch(net):
    names = set(net.interface)

    def observe(step, current, m):
        assert set(current.interface) == names
        current.check()
    return observe


@settings(max_examples=30)
@given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 10**6))
def test_gcd_confluent_on_random_inputs(a, b, seed):
    net = GCD.parse_net(f"gcd(r) ~ Pair({a}, {b})")
    rep = reduce_all_orders(net, GCD.rules, trials=4, seed=seed)
    assert rep.ok


@settings(max_examples=25)
@given(st.lists(st.integers(0, 9), min_size=0, max_size=6), st.integers(0, 10**6))
def test_interface_preserved_every_step(items, seed):
    text = f"lastElt(r) ~ [{', '.join(map(str, items))}]"
    net = LAST.parse_net(text)
    for rules in (LAST.rules, LAST.flat_rules):
        reduce(net, rules, Strategy.random(seed), observer=_interface_watch(net))
