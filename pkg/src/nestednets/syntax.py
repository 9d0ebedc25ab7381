"""Lexer and recursive-descent parser for ``.inet`` program text.

    program  ::= section*
    section  ::= 'symbols' ':' decl* | 'rules' ':' rule* | 'nets' ':' netdef*
    decl     ::= NAME '/' INT ['/' INT] [','|';']
    rule     ::= pattern '><' pattern groups ';'
    groups   ::= ('|' guard spray)+ | spray
    guard    ::= 'otherwise' | expr
    spray    ::= '->' net | '->' 'case' NAME 'of' cases | '->' 'case' 'of' NAME cases
    cases    ::= '{' branch+ '}' | branch+
    branch   ::= pattern groups
    net      ::= '(' ')' | eq (',' eq)*
    eq       ::= term '~' term
    term     ::= NAME | NAME '(' args ')' ['(' args ')'] | INT | '-' INT | '[' [expr (',' expr)*] ']'
    netdef   ::= NAME ':' net ';'

Text before any section header is read as rules.  Expression operators, from
loosest to tightest: ``or``; ``and`` (also ``&``); comparisons; ``+ -``;
``* / mod``; unary ``-`` and ``not``.  ``=>`` is read as ``>=`` and
``not(c1, .., cn)`` abbreviates ``not(c1 or .. or cn)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import attrs as ax
from .attrs import TRUE, Otherwise
from .cnap import Connection, ConditionalNap, PatternAgent, PatternError
from .net import NetError, Symbol, SymbolTable
from .notation import Arrow, Branch, Case, RuleNotation, check_guards, TranslationError
from .terms import App, Name, int_term, list_term


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, OP, EOF
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[^\W\d]\w*'*)
  | (?P<op>><|->|=>|==|!=|<=|>=|[<>+\-*/~|(){}\[\],;:&])
""", re.VERBOSE)

KEYWORDS = {"not", "and", "or", "mod", "case", "of", "if", "otherwise", "true", "false"}
SECTIONS = {"symbols", "rules", "nets"}

_BINOPS = {
    "or": "or", "and": "and", "&": "and",
    "==": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">=", "=>": ">=",
    "+": "+", "-": "-", "*": "*", "/": "/", "mod": "mod",
}


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind in ("int", "name", "op"):
            out.append(Token(kind.upper(), value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    out.append(Token("EOF", "", line, pos - line_start + 1))
    return out


@dataclass
class ProgramText:
    """Parsed program: declared symbols, notation rules, net definitions."""

    symbols: SymbolTable
    rules: list = field(default_factory=list)
    nets: dict = field(default_factory=dict)  # name -> list of equations
    declared: list = field(default_factory=list)


class Parser:
    def __init__(self, text: str, symbols: SymbolTable | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.in_angle = False  # inside ``<...>``, a final '>' closes the bracket
        self.symbols = symbols.copy() if symbols is not None else SymbolTable()

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("OP", "NAME") and t.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(f"expected {value!r}, found {self.tok.value or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self, what: str = "name") -> str:
        t = self.tok
        if t.kind != "NAME" or t.value in KEYWORDS:
            self.error(f"expected {what}, found {t.value or 'end of input'!r}")
        self.i += 1
        return t.value

    def integer(self) -> int:
        t = self.tok
        if t.kind != "INT":
            self.error(f"expected integer, found {t.value!r}")
        self.i += 1
        return int(t.value)

    def error(self, message: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(message, t.line, t.col)

    def symbol(self, name: str, tok: Token) -> Symbol:
        sym = self.symbols.get(name)
        if sym is None:
            self.error(f"undeclared symbol {name!r}", tok)
        return sym

    # -- program -----------------------------------------------------------

    def at_section(self) -> bool:
        return self.tok.kind == "NAME" and self.tok.value in SECTIONS and self.peek().value == ":"

    def program(self) -> ProgramText:
        prog = ProgramText(self.symbols)
        section = "rules"
        while self.tok.kind != "EOF":
            if self.at_section():
                section = self.name()
                self.expect(":")
                continue
            if section == "symbols":
                prog.declared.append(self.declaration())
            elif section == "rules":
                prog.rules.append(self.rule())
            else:
                start = self.tok
                name = self.name("net name")
                if name in prog.nets:
                    self.error(f"net {name!r} defined twice", start)
                self.expect(":")
                prog.nets[name] = self.net()
                self.expect(";")
        return prog

    def declaration(self) -> Symbol:
        start = self.tok
        name = self.name("symbol name")
        self.expect("/")
        arity = self.integer()
        attr_arity = self.integer() if self.accept("/") else 0
        self.accept(",") or self.accept(";")
        try:
            return self.symbols.declare(Symbol(name, arity, attr_arity))
        except NetError as exc:
            self.error(str(exc), start)

    # -- expressions -------------------------------------------------------

    def expr(self, min_prec: int = 1):
        left = self.unary()
        while True:
            t = self.tok
            op = _BINOPS.get(t.value) if t.kind in ("OP", "NAME") else None
            if op is None or ax.PRECEDENCE[op] < min_prec or self.closes_angle():
                return left
            self.i += 1
            right = self.expr(ax.PRECEDENCE[op] + 1)
            left = ax.BinOp(op, left, right)

    def unary(self):
        if self.accept("not"):
            if self.at("("):
                self.i += 1
                items = [self.expr()]
                while self.accept(","):
                    items.append(self.expr())
                self.expect(")")
                return ax.Not(ax.any_of(items))
            return ax.Not(self.unary())
        if self.at("-"):
            if self.peek().kind == "INT":
                self.i += 1
                return ax.Lit(ax.wrap(-self.integer()))
            self.i += 1
            return ax.Neg(self.unary())
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return ax.Lit(ax.wrap(int(t.value)))
        if self.accept("true"):
            return ax.Lit(1)
        if self.accept("false"):
            return ax.Lit(0)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        return ax.Var(self.name("expression"))

    def closes_angle(self) -> bool:
        return self.in_angle and self.at(">") and self.peek().kind == "EOF"

    def condition(self):
        if self.accept("otherwise"):
            return Otherwise()
        if self.at("true") and (self.peek().value in ("->", ",", ";", "")
                                or (self.in_angle and self.peek().value == ">")):
            self.i += 1
            return TRUE
        return self.expr()

    # -- agents, terms, nets -----------------------------------------------

    def arguments(self, sym: Symbol, attr_item, port_item) -> tuple[list, list]:
        attrs: list = []
        ports: list = []
        if sym.attr_arity == 0 and sym.arity == 0:
            if self.at("(") and self.peek().value == ")":
                self.i += 2
            return attrs, ports
        start = self.tok
        self.expect("(")
        for k in range(sym.attr_arity):
            if k:
                self.expect(",")
            attrs.append(attr_item())
        if sym.arity:
            if sym.attr_arity:
                if self.accept(")"):
                    self.expect("(")
                else:
                    self.expect(",")
            for k in range(sym.arity):
                if k:
                    self.expect(",")
                ports.append(port_item())
        if not self.at(")"):
            self.error(f"{sym.name} takes {sym.attr_arity} attribute(s) and {sym.arity} "
                       f"port(s)", start)
        self.i += 1
        return attrs, ports

    def pattern(self) -> PatternAgent:
        start = self.tok
        sym = self.symbol(self.name("agent"), start)
        attrs, ports = self.arguments(sym, self.name, self.name)
        return PatternAgent(sym, tuple(attrs), tuple(ports))

    def term(self):
        t = self.tok
        if t.kind == "INT" or (self.at("-") and self.peek().kind == "INT"):
            return int_term(self.unary())
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect("]")
            return list_term(items)
        name = self.name("term")
        sym = self.symbols.get(name)
        if sym is None:
            if self.at("("):
                self.error(f"undeclared symbol {name!r}", t)
            return Name(name)
        if not self.at("(") and (sym.arity or sym.attr_arity):
            self.error(f"{name} is a symbol and cannot name a wire", t)
        attrs, args = self.arguments(sym, self.expr, self.term)
        return App(name, tuple(attrs), tuple(args))

    def net(self) -> tuple:
        if self.at("(") and self.peek().value == ")":
            self.i += 2
            return ()
        eqs = [self.equation()]
        while self.accept(","):
            eqs.append(self.equation())
        return tuple(eqs)

    def equation(self) -> tuple:
        lhs = self.term()
        self.expect("~")
        return (lhs, self.term())

    # -- rule notation -----------------------------------------------------

    def rule(self) -> RuleNotation:
        left = self.pattern()
        self.expect("><")
        right = self.pattern()
        groups = self.groups()
        self.expect(";")
        return RuleNotation(left, right, groups)

    def groups(self) -> tuple:
        start = self.tok
        if not self.at("|"):
            return ((TRUE, self.spray()),)
        out = []
        while self.accept("|"):
            cond = self.condition()
            out.append((cond, self.spray()))
        try:
            check_guards([c for c, _ in out])
        except TranslationError as exc:
            self.error(str(exc), start)
        return tuple(out)

    def spray(self):
        self.expect("->")
        if not self.accept("case"):
            return Arrow(self.net())
        start = self.tok
        if self.accept("of"):
            port = self.name("port")
        else:
            port = self.name("port")
            self.expect("of")
        braced = self.accept("{")
        branches = []
        seen = set()
        while self.tok.kind == "NAME" and not self.at_section():
            t = self.tok
            agent = self.pattern()
            if agent.name in seen:
                self.error(f"agent {agent.name} appears twice in case on {port!r}", t)
            seen.add(agent.name)
            branches.append(Branch(agent, self.groups()))
        if braced:
            self.expect("}")
        if not branches:
            self.error("case without branches", start)
        return Case(port, tuple(branches))

    # -- textual conditional NAPs -------------------------------------------

    def nap(self) -> ConditionalNap:
        self.in_angle = self.accept("<")
        left = self.pattern()
        self.expect("><")
        right = self.pattern()
        cond = self.condition() if self.accept("if") else TRUE
        conns = []
        while self.accept(","):
            port = self.name("port")
            self.expect("-")
            agent = self.pattern()
            c = self.condition() if self.accept("if") else TRUE
            conns.append(Connection(port, agent, c))
        self.accept(">")
        return ConditionalNap(left, right, cond, tuple(conns))


def parse_program(text: str, symbols: SymbolTable | None = None) -> ProgramText:
    return Parser(text, symbols).program()


def parse_expr(text: str):
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.value!r}")
    return e


def parse_condition(text: str):
    p = Parser(text)
    c = p.condition()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.value!r}")
    return c


def parse_nap(text: str, symbols: SymbolTable) -> ConditionalNap:
    """Parse ``alpha(xs) >< beta(ys) if c, z - gamma(ws) if c2, ...``."""
    p = Parser(text, symbols)
    nap = p.nap()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.value!r}")
    return nap


def parse_net(text: str, symbols: SymbolTable) -> tuple:
    p = Parser(text, symbols)
    eqs = p.net()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.value!r}")
    return eqs
