"""Compiling rules on conditional NAPs into flat conditional rules.

The first connection ``z - gamma(ws) if c'`` of a nested rule is peeled off
by a rule on the base pair alone, whose right-hand side plugs a fresh agent
``kappa`` onto ``z``.  ``kappa`` carries the base pair's attributes and its
other free ports, so the rest of the pattern continues as
``kappa >< gamma if c'``:

    gcd(r) >< Pair(p1, p2)                    -> p2 ~ gcd_Pair_tt(r, p1)
    gcd_Pair_tt(r, p1) >< Int(b) | b == 0     -> r ~ p1
                                 | otherwise  -> p1 ~ gcd_Pair_tt_ot(b)(r)
    gcd_Pair_tt_ot(b)(r) >< Int(a)            -> gcd(r) ~ Pair(Int(b), Int(a mod b))

Fresh symbols are keyed on the step they implement, so rules that share a
pattern prefix share its flat rules.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

from . import attrs as ax
from .attrs import TRUE, Otherwise
from .cnap import ConditionalNap, PatternAgent, Rule
from .net import Net, Symbol, SymbolTable


def condition_tag(cond) -> str:
    """``tt`` for true, ``ot`` for otherwise, else a short stable hash."""
    if cond is TRUE:
        return "tt"
    if isinstance(cond, Otherwise):
        return "ot"
    digest = hashlib.sha1(ax.format_condition(cond).encode()).hexdigest()
    return "c" + digest[:6]


@dataclass
class FreshSymbols:
    """The table of intermediate symbols, shared across a whole rule set."""

    symbols: SymbolTable
    by_key: dict = field(default_factory=dict)
    introduced: list = field(default_factory=list)
    orientation: dict = field(default_factory=dict)

    def fresh(self, key: tuple, left: str, right: str, cond, attr_arity: int,
              arity: int) -> Symbol:
        sym = self.by_key.get(key)
        if sym is not None:
            return sym
        # a chain of steps extends the name of the symbol it continues
        if any(s.name == left for s in self.introduced):
            base = f"{left}_{condition_tag(cond)}"
        else:
            base = f"{left}_{right}_{condition_tag(cond)}"
        name, k = base, 1
        while name in self.symbols:
            k += 1
            name = f"{base}_{k}"
        sym = self.symbols.declare(Symbol(name, arity, attr_arity))
        self.by_key[key] = sym
        self.introduced.append(sym)
        return sym

    def orient(self, nap: ConditionalNap) -> ConditionalNap:
        """Write every base pair in the orientation it was first seen in."""
        pair = (nap.left.name, nap.right.name)
        seen = self.orientation.setdefault(frozenset(pair), pair)
        if seen == pair:
            return nap
        return ConditionalNap(nap.right, nap.left, nap.cond, nap.connections)


def step_key(nap: ConditionalNap) -> tuple:
    """What the flat rule for the first step of ``nap`` depends on: the base
    pair with positional variable names, its condition, and the cased port."""
    ports: dict = {}
    avars: dict = {}
    for agent in (nap.left, nap.right):
        for p in agent.port_vars:
            ports[p] = f"p{len(ports)}"
        for v in agent.attr_vars:
            avars[v] = f"a{len(avars)}"
    cond = ax.rename_condition(nap.cond, avars)
    z = ports[nap.connections[0].port] if nap.connections else None
    return (nap.left.name, nap.right.name, repr(cond), z)


def _translate(rule: Rule, table: FreshSymbols) -> list[tuple]:
    """(step key or None, flat rule) pairs for one rule."""
    nap = table.orient(rule.lhs)
    out: list[tuple] = []
    while nap.connections:
        first, rest = nap.connections[0], nap.connections[1:]
        base = ConditionalNap(nap.left, nap.right, nap.cond)
        attr_vars = tuple(nap.left.attr_vars) + tuple(nap.right.attr_vars)
        carried = tuple(p for p in base.free_ports() if p != first.port)
        key = step_key(nap)
        kappa = table.fresh(key, nap.left.name, nap.right.name, nap.cond,
                            len(attr_vars), len(carried))
        rhs = Net(interface=base.free_ports())
        k = rhs.add_agent(kappa, [ax.Var(v) for v in attr_vars])
        rhs.connect((k, 0), first.port)
        for slot, p in enumerate(carried, start=1):
            rhs.connect((k, slot), p)
        out.append((key, Rule(base, rhs, rule.name)))
        nap = ConditionalNap(PatternAgent(kappa, attr_vars, carried), first.agent,
                             first.cond, rest)
    out.append((None, Rule(nap, rule.rhs, rule.name)))
    return out


def translate_rule(rule: Rule, table: FreshSymbols | None = None) -> list[Rule]:
    """Flat rules for one rule, in pattern order: one per connection, then
    the rule's own right-hand side."""
    if table is None:
        table = FreshSymbols(SymbolTable())
    return [r for _, r in _translate(rule, table)]


def translate_ruleset(rules: Sequence[Rule], symbols: SymbolTable
                      ) -> tuple[list[Rule], list[Symbol], SymbolTable]:
    """Flatten a rule set.

    Returns the flat rules, the symbols introduced for them, and a symbol
    table extending ``symbols`` with those.  A flat rule produced by several
    nested rules appears once.  Rules are named ``<left>_<right>.<k>``.
    """
    table = FreshSymbols(symbols.copy())
    flat: list[Rule] = []
    seen: set = set()
    for rule in rules:
        for key, r in _translate(rule, table):
            if key is not None:
                if key in seen:
                    continue
                seen.add(key)
            flat.append(r)
    counts: dict = {}
    named = []
    for r in flat:
        k = counts[r.pair] = counts.get(r.pair, 0) + 1
        named.append(Rule(r.lhs, r.rhs, f"{r.pair[0]}_{r.pair[1]}.{k}"))
    return named, list(table.introduced), table.symbols
