"""Interaction nets: symbols, agents, wiring and isomorphism.

A port is either ``(agent_id, slot)`` with slot 0 the principal port and
1..arity the auxiliary ports, or a plain string naming a free port of the
net's interface.  Wires are kept as a symmetric port-to-port map, so every
port occurs in at most one wire by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Union

Port = Union[tuple, str]


class NetError(Exception):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int = 0
    attr_arity: int = 0

    def __post_init__(self):
        if self.arity < 0 or self.attr_arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}/{self.attr_arity}"


INT = Symbol("Int", 0, 1)
CONS = Symbol("Cons", 1, 1)
NIL = Symbol("Nil", 0, 0)
BUILTINS = (INT, CONS, NIL)


class SymbolTable:
    """Name -> Symbol map.  Int, Cons and Nil are always present."""

    def __init__(self, symbols: Iterable[Symbol] = ()):
        self._symbols: dict[str, Symbol] = {s.name: s for s in BUILTINS}
        for s in symbols:
            self.declare(s)

    def declare(self, symbol: Symbol) -> Symbol:
        old = self._symbols.get(symbol.name)
        if old is not None and old != symbol:
            raise NetError(f"symbol {symbol.name} redeclared as {symbol} (was {old})")
        self._symbols[symbol.name] = symbol
        return symbol

    def __getitem__(self, name: str) -> Symbol:
        try:
            return self._symbols[name]
        except KeyError:
            raise NetError(f"undeclared symbol {name!r}") from None

    def get(self, name: str, default=None):
        return self._symbols.get(name, default)

    def __contains__(self, name: str) -> bool:
        return name in self._symbols

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self._symbols.values())

    def __len__(self) -> int:
        return len(self._symbols)

    def user_symbols(self) -> list[Symbol]:
        return [s for s in self._symbols.values() if s not in BUILTINS]

    def copy(self) -> "SymbolTable":
        out = SymbolTable()
        out._symbols = dict(self._symbols)
        return out


class Agent(NamedTuple):
    id: int
    symbol: Symbol
    attrs: tuple = ()

    @property
    def name(self) -> str:
        return self.symbol.name


@dataclass(frozen=True, order=True)
class ActivePair:
    left: int
    right: int


@dataclass
class Net:
    """A net: agents, symmetric wiring, and an ordered list of interface names.

    Agent attributes are normally ints; rule right-hand sides reuse this class
    with attribute *expressions* in their place.
    """

    agents: dict = field(default_factory=dict)
    interface: list = field(default_factory=list)
    _peer: dict = field(default_factory=dict, repr=False)
    _next_id: int = field(default=0, repr=False)

    def __post_init__(self):
        if len(set(self.interface)) != len(self.interface):
            raise NetError("interface names must be distinct")

    # -- construction -----------------------------------------------------

    def add_agent(self, symbol: Symbol, attrs=()) -> int:
        attrs = tuple(attrs)
        if len(attrs) != symbol.attr_arity:
            raise NetError(
                f"{symbol.name} takes {symbol.attr_arity} attribute(s), got {len(attrs)}")
        aid = self._next_id
        self._next_id += 1
        self.agents[aid] = Agent(aid, symbol, attrs)
        return aid

    def add_interface(self, name: str) -> str:
        if name in self.interface:
            raise NetError(f"interface name {name!r} already present")
        self.interface.append(name)
        return name

    def _check_port(self, p: Port) -> None:
        if isinstance(p, str):
            if p not in self.interface:
                raise NetError(f"unknown interface name {p!r}")
            return
        aid, slot = p
        agent = self.agents.get(aid)
        if agent is None:
            raise NetError(f"no agent {aid}")
        if not 0 <= slot <= agent.symbol.arity:
            raise NetError(f"slot {slot} out of range for {agent.name}")

    def connect(self, a: Port, b: Port) -> "Net":
        self._check_port(a)
        self._check_port(b)
        if a == b:
            raise NetError(f"cannot wire port {a!r} to itself")
        for p in (a, b):
            if p in self._peer:
                raise NetError(f"port {p!r} is already wired")
        self._peer[a] = b
        self._peer[b] = a
        return self

    def disconnect(self, p: Port) -> Port | None:
        q = self._peer.pop(p, None)
        if q is not None:
            del self._peer[q]
        return q

    def remove_agent(self, aid: int) -> Agent:
        agent = self.agents.pop(aid)
        peer = self._peer
        for slot in range(agent.symbol.arity + 1):
            q = peer.pop((aid, slot), None)
            if q is not None:
                del peer[q]
        return agent

    # -- queries ----------------------------------------------------------

    def peer(self, p: Port) -> Port | None:
        return self._peer.get(p)

    @property
    def wires(self) -> set[frozenset]:
        return {frozenset((a, b)) for a, b in self._peer.items()}

    def ports(self) -> Iterator[Port]:
        for aid, agent in self.agents.items():
            for slot in range(agent.symbol.arity + 1):
                yield (aid, slot)
        yield from self.interface

    def free_ports(self) -> list[Port]:
        return [p for p in self.ports() if p not in self._peer]

    def copy(self) -> "Net":
        out = Net(dict(self.agents), list(self.interface))
        out._peer = dict(self._peer)
        out._next_id = self._next_id
        return out

    def __len__(self) -> int:
        return len(self.agents)

    def symbol_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for a in self.agents.values():
            out[a.name] = out.get(a.name, 0) + 1
        return out

    def check(self) -> None:
        """Assert the wiring invariants; raises NetError on violation."""
        for p, q in self._peer.items():
            if self._peer.get(q) != p:
                raise NetError(f"asymmetric wire {p!r} -> {q!r}")
            self._check_port(p)


def find_active_pairs(net: Net) -> list[ActivePair]:
    pairs = []
    for aid in sorted(net.agents):
        q = net.peer((aid, 0))
        if isinstance(q, tuple) and q[1] == 0 and aid < q[0]:
            pairs.append(ActivePair(aid, q[0]))
    return pairs


def renumber(net: Net, mapping: dict[int, int]) -> Net:
    """Copy of ``net`` with agent ids replaced through ``mapping``."""
    def port(p):
        return p if isinstance(p, str) else (mapping[p[0]], p[1])

    out = Net({}, list(net.interface))
    for aid, a in net.agents.items():
        out.agents[mapping[aid]] = Agent(mapping[aid], a.symbol, a.attrs)
    out._peer = {port(p): port(q) for p, q in net._peer.items()}
    out._next_id = max(out.agents, default=-1) + 1
    return out


# --------------------------------------------------------------------------
# isomorphism


def _signature(net: Net, aid: int) -> tuple:
    a = net.agents[aid]
    slots = []
    for s in range(a.symbol.arity + 1):
        q = net.peer((aid, s))
        if q is None:
            slots.append(None)
        elif isinstance(q, str):
            slots.append(("i", q))
        else:
            slots.append(("a", q[1]))
    return (a.symbol, a.attrs, tuple(slots))


def iso(a: Net, b: Net) -> bool:
    """True iff the nets are equal up to renaming of agent ids.

    Interface names must match exactly; symbols, attributes and the slot
    structure of every wire are preserved by the bijection.
    """
    if set(a.interface) != set(b.interface) or len(a.agents) != len(b.agents):
        return False
    for name in a.interface:
        pa, pb = a.peer(name), b.peer(name)
        if (pa is None) != (pb is None):
            return False
        if isinstance(pa, str) or isinstance(pb, str):
            if pa != pb:
                return False

    sig_a = {x: _signature(a, x) for x in a.agents}
    sig_b = {y: _signature(b, y) for y in b.agents}
    classes: dict[tuple, list[int]] = {}
    for y, s in sig_b.items():
        classes.setdefault(s, []).append(y)
    count_a: dict[tuple, int] = {}
    for s in sig_a.values():
        count_a[s] = count_a.get(s, 0) + 1
    if any(len(classes.get(s, ())) != n for s, n in count_a.items()):
        return False

    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def assign(x: int, y: int, trail: list) -> bool:
        # map x -> y and everything forced by wiring; record new pairs in trail
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            if x in fwd:
                if fwd[x] != y:
                    return False
                continue
            if y in bwd or sig_a[x] != sig_b[y]:
                return False
            fwd[x] = y
            bwd[y] = x
            trail.append(x)
            for s in range(a.agents[x].symbol.arity + 1):
                qa, qb = a.peer((x, s)), b.peer((y, s))
                if isinstance(qa, tuple):
                    if not isinstance(qb, tuple) or qa[1] != qb[1]:
                        return False
                    stack.append((qa[0], qb[0]))
                elif qa != qb:
                    return False
        return True

    def undo(trail: list) -> None:
        for x in trail:
            del bwd[fwd.pop(x)]

    trail: list = []
    for name in a.interface:
        pa, pb = a.peer(name), b.peer(name)
        if isinstance(pa, tuple):
            if pa[1] != pb[1] or not assign(pa[0], pb[0], trail):
                return False

    order = sorted(a.agents, key=lambda x: len(classes[sig_a[x]]))

    def search(i: int) -> bool:
        while i < len(order) and order[i] in fwd:
            i += 1
        if i == len(order):
            return True
        x = order[i]
        for y in classes[sig_a[x]]:
            if y in bwd:
                continue
            t: list = []
            if assign(x, y, t) and search(i + 1):
                return True
            undo(t)
        return False

    return search(0)
