"""Guard-and-case rule notation and its expansion into rules on conditional NAPs.

    gcd(r) >< Pair(p1, p2)
      -> case p2 of {
           Int(b) | b == 0 -> r ~ p1
                  | otherwise -> case p1 of {
                       Int(a) -> gcd(r) ~ Pair(Int(b), Int(a mod b))
                     }
         };

Guards of one group are tried in order, so each is conjoined with the
negation of the guards before it; ``case z of`` extends the pattern with one
connection per branch agent at port ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import attrs as ax
from .attrs import TRUE, Condition, Otherwise
from .cnap import Connection, ConditionalNap, PatternAgent, PatternError, Rule
from .net import NetError, SymbolTable
from .terms import build_net, format_equations, net_to_equations


@dataclass(frozen=True)
class Arrow:
    """``-> N``: the spray ends in a right-hand-side net."""

    equations: tuple


@dataclass(frozen=True)
class Branch:
    agent: PatternAgent
    guards: tuple  # ((Condition, Spray), ...)


@dataclass(frozen=True)
class Case:
    port: str
    branches: tuple  # (Branch, ...)


Spray = "Arrow | Case"


@dataclass(frozen=True)
class RuleNotation:
    left: PatternAgent
    right: PatternAgent
    groups: tuple  # ((Condition, Spray), ...)


class TranslationError(PatternError):
    pass


def parse(text: str, symbols: SymbolTable | None = None) -> list[RuleNotation]:
    """Parse rule notation.  ``text`` may carry its own ``symbols:`` section."""
    from .syntax import parse_program
    return parse_program(text, symbols).rules


def check_guards(conds: Sequence[Condition]) -> None:
    for k, c in enumerate(conds):
        if isinstance(c, Otherwise) and k != len(conds) - 1:
            raise TranslationError("'otherwise' may only be the last guard", clause="guards")


def desugar_guards(conds: Sequence[Condition]) -> list[Condition]:
    """Make a guard group's conditions mutually exclusive.

    The k-th guard becomes ``not(c1 or .. or c(k-1)) and ck``; a trailing
    ``otherwise`` becomes ``Otherwise(prior=(c1, .., c(n-1)))``, which means
    ``not(c1 or .. or c(n-1))`` and still prints as ``otherwise``.
    """
    check_guards(conds)
    out: list[Condition] = []
    prior: list[Condition] = []
    for c in conds:
        if isinstance(c, Otherwise):
            out.append(Otherwise(tuple(prior)))
        elif not prior:
            out.append(c)
        else:
            negated = ax.Not(ax.any_of(ax.semantic(p) for p in prior))
            out.append(negated if c is TRUE else ax.BinOp("and", negated, c))
        prior.append(c)
    return out


def raw_guard(cond: Condition, prior: Sequence[Condition]) -> Condition | None:
    """Inverse of :func:`desugar_guards` for one position, or None if ``cond``
    is not the desugaring of any guard following ``prior``."""
    if not prior:
        return None if isinstance(cond, Otherwise) and cond.prior else cond
    if isinstance(cond, Otherwise):
        return Otherwise() if tuple(cond.prior) == tuple(prior) else None
    negated = ax.Not(ax.any_of(ax.semantic(p) for p in prior))
    if cond == negated:
        return TRUE
    if isinstance(cond, ax.BinOp) and cond.op == "and" and cond.left == negated:
        return cond.right
    return None


# --------------------------------------------------------------------------
# expansion


class _Expansion:
    def __init__(self, rn: RuleNotation, symbols: SymbolTable):
        self.rn = rn
        self.symbols = symbols
        self.rules: list[Rule] = []
        self.memo: dict = {}

    def note(self, nap: ConditionalNap, spray) -> None:
        # the spray paired with an intermediate NAP is unique
        old = self.memo.setdefault(nap, spray)
        if old is not spray:
            raise AssertionError(f"two sprays expand the same pattern {nap}")

    def spray(self, nap: ConditionalNap, spray) -> None:
        self.note(nap, spray)
        if isinstance(spray, Arrow):
            self.arrow(nap, spray)
            return
        z = spray.port
        if z not in nap.free_ports():
            raise TranslationError(f"case on {z!r}, which is not a free port of {nap}")
        seen = set()
        for branch in spray.branches:
            if branch.agent.name in seen:
                raise TranslationError(f"agent {branch.agent.name} appears twice in the "
                                       f"case on {z!r}", clause="case")
            seen.add(branch.agent.name)
            conds = desugar_guards([g for g, _ in branch.guards])
            for cond, (_, sub) in zip(conds, branch.guards):
                ext = nap.extend(Connection(z, branch.agent, cond))
                try:
                    ext.validate()
                except PatternError as exc:
                    raise TranslationError(str(exc)) from None
                self.spray(ext, sub)

    def arrow(self, nap: ConditionalNap, arrow: Arrow) -> None:
        try:
            rhs = build_net(arrow.equations, self.symbols,
                            interface=nap.free_ports(), attr=lambda e: e)
        except NetError as exc:
            raise TranslationError(f"right-hand side of {nap}: {exc}",
                                   clause="interface") from None
        rule = Rule(nap, rhs, f"{nap.left.name}_{nap.right.name}.{len(self.rules) + 1}")
        try:
            rule.validate()
        except PatternError as exc:
            raise TranslationError(str(exc), clause=exc.clause) from None
        self.rules.append(rule)


def t_r(rn: RuleNotation, symbols: SymbolTable | None = None) -> list[Rule]:
    """Expand one notation rule into rules on conditional NAPs.

    Raises TranslationError when an intermediate pattern is ill-formed (a
    case on a port that is not free, a condition over unbound attribute
    variables, repeated variable names) or a right-hand side does not
    preserve the free ports.
    """
    symbols = symbols if symbols is not None else SymbolTable()
    exp = _Expansion(rn, symbols)
    conds = desugar_guards([g for g, _ in rn.groups])
    for cond, (_, spray) in zip(conds, rn.groups):
        base = ConditionalNap(rn.left, rn.right, cond)
        try:
            base.validate()
        except PatternError as exc:
            raise TranslationError(str(exc)) from None
        exp.spray(base, spray)
    return exp.rules


def t_s(nap: ConditionalNap, spray, symbols: SymbolTable | None = None) -> list[Rule]:
    exp = _Expansion(None, symbols if symbols is not None else SymbolTable())
    exp.spray(nap, spray)
    return exp.rules


def translate_program(notations: Sequence[RuleNotation], symbols: SymbolTable) -> list[Rule]:
    """t_r over a whole program, giving every rule a unique name."""
    rules = [r for rn in notations for r in t_r(rn, symbols)]
    counts: dict = {}
    for r in rules:
        k = counts[r.pair] = counts.get(r.pair, 0) + 1
        r.name = f"{r.pair[0]}_{r.pair[1]}.{k}"
    return rules


# --------------------------------------------------------------------------
# flat rules back to notation


def rules_to_notation(rules: Sequence[Rule]) -> list[RuleNotation]:
    """Write connection-free rules as notation, merging consecutive rules on the
    same head whose conditions form one desugared guard chain."""
    out: list[RuleNotation] = []
    head = None
    guards: list = []
    prior: list = []

    def flush():
        if head is not None:
            out.append(RuleNotation(head[0], head[1], tuple(guards)))

    for r in rules:
        if r.lhs.connections:
            raise ValueError(f"rule {r.name} is nested; translate it first")
        spray = Arrow(tuple(net_to_equations(r.rhs, avoid=r.lhs.attr_vars())))
        key = (r.lhs.left, r.lhs.right)
        g = raw_guard(r.lhs.cond, prior) if key == head else None
        if g is None or (guards and isinstance(guards[-1][0], Otherwise)):
            flush()
            head, guards, prior = key, [], []
            g = raw_guard(r.lhs.cond, [])
            if g is None:
                g = ax.semantic(r.lhs.cond)
        guards.append((g, spray))
        prior.append(g)
    flush()
    return out


# --------------------------------------------------------------------------
# printing


def _guard_text(cond: Condition) -> str:
    return ax.format_condition(cond)


def _spray_text(spray, indent: int) -> str:
    if isinstance(spray, Arrow):
        return "-> " + format_equations(spray.equations)
    pad = " " * (indent + 2)
    lines = [f"-> case {spray.port} of {{"]
    for br in spray.branches:
        lines.append(pad + _guards_text(str(br.agent), br.guards, indent + 2))
    lines.append(" " * indent + "}")
    return "\n".join(lines)


def _guards_text(head: str, guards, indent: int) -> str:
    if len(guards) == 1 and guards[0][0] is TRUE:
        return f"{head} {_spray_text(guards[0][1], indent + len(head) + 1)}"
    pad = " " * (indent + len(head) + 1)
    parts = []
    for i, (g, spray) in enumerate(guards):
        text = f"| {_guard_text(g)} "
        body = _spray_text(spray, indent + len(head) + 1 + len(text))
        parts.append((head + " " if i == 0 else pad) + text + body)
    return "\n".join(parts)


def format_rule(rn: RuleNotation) -> str:
    head = f"{rn.left} >< {rn.right}"
    if len(rn.groups) == 1 and rn.groups[0][0] is TRUE:
        return f"{head}\n  {_spray_text(rn.groups[0][1], 2)};"
    lines = []
    for g, spray in rn.groups:
        text = f"  | {_guard_text(g)} "
        lines.append(text + _spray_text(spray, len(text)))
    return head + "\n" + "\n".join(lines) + ";"
