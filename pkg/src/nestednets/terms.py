"""Term syntax for nets.

A net is written as equations ``t ~ u``.  A term ``A(e1, .., ek, t1, .., tn)``
is an agent whose first ``attr_arity`` arguments are attribute expressions
and whose remaining arguments are the terms plugged into its auxiliary
ports; the term itself stands for the agent's principal port.  A bare name
stands for a wire end: a name used once is a free port of the net, a name
used twice is an internal wire.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .attrs import AttrExpr, Lit, eval_expr, format_expr
from .net import CONS, INT, NIL, Net, NetError, Symbol, SymbolTable


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class App:
    symbol: str
    attrs: tuple = ()
    args: tuple = ()


Term = Union[Name, App]
Equation = tuple  # (Term, Term)


def int_term(e: AttrExpr) -> App:
    return App(INT.name, (e,), ())


def list_term(items: Iterable[AttrExpr]) -> App:
    out: Term = App(NIL.name)
    for e in reversed(list(items)):
        out = App(CONS.name, (e,), (out,))
    return out


def names_in(equations: Iterable[Equation]) -> dict[str, int]:
    """Occurrence count of every wire name."""
    counts: dict[str, int] = {}

    def walk(t):
        if isinstance(t, Name):
            counts[t.name] = counts.get(t.name, 0) + 1
        else:
            for u in t.args:
                walk(u)

    for lhs, rhs in equations:
        walk(lhs)
        walk(rhs)
    return counts


class _Connectors:
    """Ends joined through pass-through connectors, resolved to real wires.

    Real ends are net ports.  A connector has two ends ``("c", k, 0)`` and
    ``("c", k, 1)``; whatever is linked to one side is joined to whatever is
    linked to the other.
    """

    def __init__(self):
        self.link: dict = {}
        self.count = 0

    def connector(self) -> tuple:
        k = self.count
        self.count += 1
        return ("c", k, 0), ("c", k, 1)

    def join(self, a, b) -> None:
        if a in self.link or b in self.link:
            raise NetError("wire end used twice")
        self.link[a] = b
        self.link[b] = a

    @staticmethod
    def is_connector(e) -> bool:
        return isinstance(e, tuple) and len(e) == 3 and e[0] == "c"

    def resolve(self, e):
        t = self.link.get(e)
        while t is not None and self.is_connector(t):
            t = self.link.get((t[0], t[1], 1 - t[2]))
        return t

    def wires(self) -> list[tuple]:
        out = []
        seen = set()
        for e in self.link:
            if self.is_connector(e) or e in seen:
                continue
            t = self.resolve(e)
            if t is None:
                continue
            seen.add(e)
            seen.add(t)
            out.append((e, t))
        return out


def build_net(equations: Iterable[Equation], symbols: SymbolTable, *,
              interface: Iterable[str] | None = None,
              attr: Callable[[AttrExpr], object] | None = None) -> Net:
    """Build a net from equations.

    ``interface`` fixes the free-port names (each must occur exactly once);
    when omitted, names occurring once become the interface in order of first
    occurrence.  ``attr`` maps each attribute expression to the stored value;
    the default evaluates it as a closed expression.
    """
    equations = list(equations)
    if attr is None:
        attr = lambda e: eval_expr(e, {})
    counts = names_in(equations)
    if interface is None:
        iface = [n for n, c in counts.items() if c == 1]
    else:
        iface = list(interface)
        for n in iface:
            if counts.get(n, 0) != 1:
                raise NetError(f"free port {n!r} must occur exactly once, "
                               f"found {counts.get(n, 0)}")
    iface_set = set(iface)
    for n, c in counts.items():
        if n not in iface_set and c != 2:
            raise NetError(f"wire name {n!r} must occur exactly twice, found {c}")

    net = Net(interface=list(iface))
    conn = _Connectors()
    pending: dict[str, tuple] = {}

    def end_of(t: Term):
        if isinstance(t, Name):
            if t.name in iface_set:
                return t.name
            if t.name in pending:
                return pending.pop(t.name)
            a, b = conn.connector()
            pending[t.name] = b
            return a
        sym = symbols[t.symbol]
        if len(t.attrs) != sym.attr_arity or len(t.args) != sym.arity:
            raise NetError(
                f"{sym.name} expects {sym.attr_arity} attribute(s) and {sym.arity} "
                f"port(s), got {len(t.attrs)} and {len(t.args)}")
        aid = net.add_agent(sym, [attr(e) for e in t.attrs])
        for slot, u in enumerate(t.args, start=1):
            conn.join((aid, slot), end_of(u))
        return (aid, 0)

    for lhs, rhs in equations:
        conn.join(end_of(lhs), end_of(rhs))
    for p, q in conn.wires():
        net.connect(p, q)
    return net


def net_to_equations(net: Net, *, avoid: Iterable[str] = ()) -> list[Equation]:
    """Equations that rebuild a net isomorphic to ``net``.

    Agents hanging off an auxiliary port by their principal port are written
    inline; every other wire gets a name.  Fails on unwired agent ports, which
    the term syntax cannot express.
    """
    taken = set(net.interface) | set(avoid)
    fresh_count = [0]

    def fresh() -> str:
        while True:
            fresh_count[0] += 1
            n = f"w{fresh_count[0]}"
            if n not in taken:
                taken.add(n)
                return n

    for p in net.ports():
        if isinstance(p, tuple) and net.peer(p) is None:
            raise NetError(f"agent port {p!r} is unwired; cannot print as terms")

    # an agent is inlined into its parent when its principal meets an aux port
    parent = {}
    for aid in net.agents:
        q = net.peer((aid, 0))
        if isinstance(q, tuple) and q[1] != 0:
            parent[aid] = q
    names: dict = {}
    done: set[int] = set()

    def name_wire(p) -> str:
        if p in names:
            return names[p]
        n = fresh()
        names[p] = n
        names[net.peer(p)] = n
        return n

    def term(aid: int) -> Term:
        done.add(aid)
        a = net.agents[aid]
        args = []
        for slot in range(1, a.symbol.arity + 1):
            q = net.peer((aid, slot))
            if isinstance(q, str):
                args.append(Name(q))
            elif q[1] == 0 and q[0] not in done and parent.get(q[0]) == (aid, slot):
                args.append(term(q[0]))
            else:
                args.append(Name(name_wire((aid, slot))))
        return App(a.name, tuple(_as_expr(v) for v in a.attrs), tuple(args))

    eqs: list[Equation] = []
    emitted_iface: set[str] = set()
    for n in net.interface:
        if n in emitted_iface:
            continue
        q = net.peer(n)
        if q is None:
            continue
        if isinstance(q, str):
            eqs.append((Name(n), Name(q)))
            emitted_iface.update((n, q))
        elif q[1] == 0:
            eqs.append((Name(n), term(q[0])))
            emitted_iface.add(n)
    roots = sorted(a for a in net.agents if a not in parent)
    for aid in roots:
        if aid in done:
            continue
        q = net.peer((aid, 0))
        if isinstance(q, tuple) and q[1] == 0:
            left = term(aid)
            eqs.append((left, term(q[0])))
    # remaining agents sit on cycles of principal-to-aux wires
    for aid in sorted(net.agents):
        if aid in done:
            continue
        n = name_wire((aid, 0))
        eqs.append((Name(n), term(aid)))
    return eqs


def _as_expr(v) -> AttrExpr:
    return Lit(v) if isinstance(v, int) else v


def format_term(t: Term, symbols: SymbolTable | None = None) -> str:
    if isinstance(t, Name):
        return t.name
    if not t.attrs and not t.args:
        return t.symbol
    if t.attrs and t.args:
        attrs = ", ".join(format_expr(e) for e in t.attrs)
        args = ", ".join(format_term(u) for u in t.args)
        return f"{t.symbol}({attrs})({args})"
    inner = [format_expr(e) for e in t.attrs] + [format_term(u) for u in t.args]
    return f"{t.symbol}({', '.join(inner)})"


def format_equations(eqs: Iterable[Equation]) -> str:
    eqs = list(eqs)
    if not eqs:
        return "()"
    return ", ".join(f"{format_term(a)} ~ {format_term(b)}" for a, b in eqs)


def format_net(net: Net) -> str:
    return format_equations(net_to_equations(net))
