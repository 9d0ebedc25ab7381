import pytest
from hypothesis import assume, given, strategies as st

from nestednets import attrs as ax
from nestednets.attrs import TRUE, BinOp, Lit, Not, Otherwise, Var
from nestednets.syntax import parse_condition, parse_expr

from strategies import envs, exprs


@pytest.mark.parametrize("text, env, expected", [
    ("v + 1", {"v": 0}, 1),
    ("b == 0", {"b": 0}, 1),
    ("a mod b", {"a": 21, "b": 14}, 7),
    ("-7 / 2", {}, -3),
    ("-7 mod 2", {}, -1),
    ("7 mod -2", {}, 1),
    ("1 + 2 * 3", {}, 7),
    ("(1 + 2) * 3", {}, 9),
    ("not(0)", {}, 1),
    ("not(3 > 1)", {}, 0),
    ("2 and 3", {}, 1),
    ("0 or 0", {}, 0),
    ("1 < 2 and 2 < 1 or 1", {}, 1),
    ("a => 3", {"a": 3}, 1),
])
def test_eval(text, env, expected):
    assert ax.eval_expr(parse_expr(text), env) == expected


def test_division_by_zero():
    with pytest.raises(ax.DivisionByZero):
        ax.eval_expr(parse_expr("1 / 0"), {})
    with pytest.raises(ax.DivisionByZero):
        ax.eval_expr(parse_expr("1 mod 0"), {})


def test_unbound_variable():
    with pytest.raises(ax.UnboundVariable):
        ax.eval_expr(Var("x"), {})


def test_short_circuit_skips_division():
    # the guard chain `b == 0` then `not(b == 0) and a mod b > 1` must not fault
    e = parse_expr("not(b == 0) and a mod b > 1")
    assert ax.eval_expr(e, {"a": 5, "b": 0}) == 0
    assert ax.eval_expr(parse_expr("1 or 1 / 0"), {}) == 1


@pytest.mark.parametrize("value, truth", [(0, False), (1, True), (-3, True)])
def test_is_true(value, truth):
    assert ax.is_true(value) is truth


@pytest.mark.parametrize("text, names", [
    ("b == 0", {"b"}),
    ("5", set()),
    ("not(b == 0) and a > 0", {"a", "b"}),
])
def test_free_vars(text, names):
    assert ax.free_vars(parse_expr(text)) == names


def test_wraparound():
    assert ax.eval_expr(BinOp("+", Lit(ax.INT_MAX), Lit(1)), {}) == ax.INT_MIN
    assert ax.eval_expr(BinOp("*", Lit(ax.INT_MIN), Lit(-1)), {}) == ax.INT_MIN


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_div_mod_law(a, b):
    assume(b != 0)
    assert ax.tdiv(a, b) * b + ax.tmod(a, b) == a
    assert abs(ax.tmod(a, b)) < abs(b)


def _safe_eval(e, env):
    try:
        return ax.eval_expr(e, env)
    except ax.EvalError:
        return None


@given(exprs(), envs)
def test_not_negates(e, env):
    v = _safe_eval(e, env)
    assume(v is not None)
    assert ax.is_true(ax.eval_expr(Not(e), env)) is not ax.is_true(v)


@given(exprs(), envs)
def test_compiled_agrees_with_eval(e, env):
    f = ax.compile_expr(e)
    try:
        expected = ax.eval_expr(e, env)
    except ax.EvalError as exc:
        with pytest.raises(type(exc)):
            f(env)
        return
    assert f(env) == expected


@given(exprs())
def test_format_parse_round_trip(e):
    assert parse_expr(ax.format_expr(e)) == e


@given(exprs(), st.dictionaries(st.sampled_from("abc"), st.sampled_from("xyz")))
def test_rename_moves_free_vars(e, mapping):
    assert ax.free_vars(ax.rename(e, mapping)) == {mapping.get(v, v) for v in ax.free_vars(e)}


def test_conditions():
    assert ax.holds(TRUE, {})
    assert ax.compile_condition(TRUE) is None
    prior = (parse_expr("b == 0"),)
    other = Otherwise(prior)
    assert ax.holds(other, {"b": 1}) and not ax.holds(other, {"b": 0})
    assert ax.semantic(other) == Not(parse_expr("b == 0"))
    assert ax.condition_vars(other) == {"b"}
    assert ax.format_condition(other) == "otherwise"
    assert parse_condition("otherwise") == Otherwise()
    assert parse_condition("true") is TRUE
    assert ax.rename_condition(other, {"b": "x"}).prior == (parse_expr("x == 0"),)
