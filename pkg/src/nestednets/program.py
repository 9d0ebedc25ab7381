"""Program files: symbols, rules in notation, and named nets.

    symbols:
      gcd/1, Pair/2
    rules:
      gcd(r) >< Pair(p1, p2) -> case p2 of { ... };
    nets:
      main: gcd(r) ~ Pair(21, 14);

``Int``, ``Cons`` and ``Nil`` are predeclared.  Integer literals in term
position stand for ``Int`` agents and ``[2, 4, 3]`` for a Cons/Nil list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

from .cnap import Diagnostic, PatternError, Rule, check_pairwise_distinct
from .flatten import translate_ruleset
from .net import Net, SymbolTable
from .notation import RuleNotation, format_rule, rules_to_notation, translate_program
from .syntax import parse_net, parse_program
from .terms import build_net, format_equations


@dataclass
class Program:
    symbols: SymbolTable
    notation: list
    nets: dict = field(default_factory=dict)  # name -> equations
    declared: list = field(default_factory=list)
    source: str = ""

    @classmethod
    def parse(cls, text: str) -> "Program":
        p = parse_program(text)
        return cls(p.symbols, list(p.rules), dict(p.nets), list(p.declared), text)

    @classmethod
    def load(cls, path) -> "Program":
        return cls.parse(Path(path).read_text())

    @cached_property
    def rules(self) -> list[Rule]:
        """The notation expanded into rules on conditional NAPs."""
        return translate_program(self.notation, self.symbols)

    @cached_property
    def flattened(self) -> tuple[list[Rule], list, SymbolTable]:
        return translate_ruleset(self.rules, self.symbols)

    @property
    def flat_rules(self) -> list[Rule]:
        return self.flattened[0]

    def check(self, *, strict: bool = False) -> list[Diagnostic]:
        """Expansion failures and sequentiality diagnostics (warnings included)."""
        try:
            rules = self.rules
        except PatternError as exc:
            return [Diagnostic(exc.clause, (), str(exc))]
        return check_pairwise_distinct(rules, strict=strict)

    def net(self, name: str = "main") -> Net:
        if name not in self.nets:
            raise KeyError(f"no net named {name!r}")
        return build_net(self.nets[name], self.symbols)

    def parse_net(self, text: str) -> Net:
        return build_net(parse_net(text, self.symbols), self.symbols)

    def dump_flat(self) -> str:
        """The flattened program as program text."""
        flat, _, symbols = self.flattened
        return dump(symbols, rules_to_notation(flat), self.nets)


def dump(symbols: SymbolTable, notation: list[RuleNotation], nets: dict) -> str:
    lines = ["symbols:"]
    decls = [f"{s.name}/{s.arity}" + (f"/{s.attr_arity}" if s.attr_arity else "")
             for s in symbols.user_symbols()]
    if decls:
        lines.append("  " + ", ".join(decls))
    lines.append("")
    lines.append("rules:")
    for rn in notation:
        lines.append(format_rule(rn))
    if nets:
        lines.append("")
        lines.append("nets:")
        for name, eqs in nets.items():
            lines.append(f"{name}: {format_equations(eqs)};")
    return "\n".join(lines) + "\n"


def corpus_names() -> list[str]:
    root = resources.files(__package__) / "corpus"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".inet"))


def corpus_text(name: str) -> str:
    return (resources.files(__package__) / "corpus" / f"{name}.inet").read_text()


def load_corpus(name: str) -> Program:
    return Program.parse(corpus_text(name))
