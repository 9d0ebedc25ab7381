"""Matching and reduction of nets under rules on conditional NAPs.

A pair whose pattern matches up to some connection, but whose next pattern
port is not yet wired to a principal port, is *blocked*: it is parked and
looked at again once a rewrite consumes the agent it is waiting on.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from . import attrs as ax
from .cnap import ConditionalNap, Rule, RuleSet
from .net import Agent, Net, iso


class ReductionError(Exception):
    pass


class RuntimeFault(ReductionError):
    """A condition or right-hand-side attribute failed to evaluate."""

    def __init__(self, rule: str, error: Exception):
        super().__init__(f"rule {rule}: {error}")
        self.rule = rule
        self.error = error


class StepLimitExceeded(ReductionError):
    def __init__(self, limit: int, net: Net, trace: "Trace"):
        super().__init__(f"no normal form within {limit} steps")
        self.limit = limit
        self.net = net
        self.trace = trace


# --------------------------------------------------------------------------
# compiled rules


class _CompiledRule:
    __slots__ = ("rule", "name", "left", "right", "base_cond", "conns", "rhs_agents",
                 "rhs_pairs", "rhs_named", "n_conns")

    def __init__(self, rule: Rule):
        self.rule = rule
        self.name = rule.name
        lhs = rule.lhs
        self.left = lhs.left
        self.right = lhs.right
        self.base_cond = ax.compile_condition(lhs.cond)
        self.conns = [(c.port, c.agent, ax.compile_condition(c.cond))
                      for c in lhs.connections]
        self.n_conns = len(self.conns)
        rhs = rule.rhs
        index = {aid: k for k, aid in enumerate(rhs.agents)}
        self.rhs_agents = []
        for aid, agent in rhs.agents.items():
            fs = [ax.compile_expr(e) if not isinstance(e, int) else (lambda env, v=e: v)
                  for e in agent.attrs]
            self.rhs_agents.append((agent.symbol, fs))
        # agent-to-agent wires, and the end each free port name is wired to
        self.rhs_pairs = []
        self.rhs_named = {}
        for p, q in rhs._peer.items():
            if isinstance(p, str):
                self.rhs_named[p] = self._end(q, index)
            elif not isinstance(q, str) and p < q:
                self.rhs_pairs.append((index[p[0]], p[1], index[q[0]], q[1]))

    @staticmethod
    def _end(p, index):
        if isinstance(p, str):
            return p
        return (index[p[0]], p[1])


class Status(Enum):
    MATCH = "match"
    BLOCKED = "blocked"
    NO_MATCH = "no-match"


@dataclass(slots=True)
class MatchResult:
    rule: Rule
    env: dict
    boundary: dict  # free port name -> port outside the matched agents
    consumed: tuple  # matched agent ids, base pair first
    inner: dict = field(repr=False, default_factory=dict)  # free port name -> matched-side port
    compiled: object = field(repr=False, default=None)
    left_symbol: str = ""
    right_symbol: str = ""


@dataclass
class Blocked:
    rule: Rule
    waiting_on: object  # the port the next nested agent should appear at
    watch: tuple  # agent ids whose consumption may unblock the pair


def _bind(net: Net, aid: int, pat, env: dict, inner: dict) -> bool:
    agent = net.agents[aid]
    if agent.symbol is not pat.symbol and agent.symbol != pat.symbol:
        return False
    for var, value in zip(pat.attr_vars, agent.attrs):
        env[var] = value
    for slot, pv in enumerate(pat.port_vars, start=1):
        inner[pv] = (aid, slot)
    return True


def _try(net: Net, cr: _CompiledRule, a: int, b: int):
    """Match one rule with ``a`` as its left agent and ``b`` as its right."""
    env: dict = {}
    inner: dict = {}
    if not (_bind(net, a, cr.left, env, inner) and _bind(net, b, cr.right, env, inner)):
        return None
    try:
        if cr.base_cond is not None and not cr.base_cond(env):
            return None
        consumed = [a, b]
        for port, pat, cond in cr.conns:
            cp = inner.pop(port)
            q = net.peer(cp)
            if not (isinstance(q, tuple) and q[1] == 0):
                inner[port] = cp
                watch = (q[0],) if isinstance(q, tuple) else ()
                return Blocked(cr.rule, cp, watch)
            g = q[0]
            if not _bind(net, g, pat, env, inner):
                return None
            consumed.append(g)
            if cond is not None and not cond(env):
                return None
    except ax.EvalError as exc:
        raise RuntimeFault(cr.name, exc) from None
    peer = net._peer
    boundary = {name: peer.get(cp) for name, cp in inner.items()}
    return MatchResult(cr.rule, env, boundary, tuple(consumed), inner, cr,
                       cr.left.name, cr.right.name)


class Matcher:
    """Rule lookup by the symbols of an active pair, in both orientations."""

    def __init__(self, rules: Iterable[Rule]):
        self.rules = list(rules.rules if isinstance(rules, RuleSet) else rules)
        self.index: dict = {}
        for rule in self.rules:
            cr = _CompiledRule(rule)
            l, r = rule.pair
            self.index.setdefault((l, r), []).append((cr, False))
            self.index.setdefault((r, l), []).append((cr, True))

    def matches(self, net: Net, a: int, b: int) -> tuple[list[MatchResult], list[Blocked]]:
        found: list[MatchResult] = []
        blocked: list[Blocked] = []
        key = (net.agents[a].name, net.agents[b].name)
        seen_rules = set()
        for cr, flip in self.index.get(key, ()):
            res = _try(net, cr, b, a) if flip else _try(net, cr, a, b)
            if res is None:
                continue
            if isinstance(res, Blocked):
                blocked.append(res)
            elif id(cr) not in seen_rules:
                seen_rules.add(id(cr))
                found.append(res)
        return found, blocked


def match(net: Net, pair, rules) -> MatchResult | Blocked | None:
    """First match of an active pair: a MatchResult, a Blocked record when some
    rule may still match once a nested agent arrives, or None (no match)."""
    matcher = rules if isinstance(rules, Matcher) else Matcher(rules)
    a, b = (pair.left, pair.right) if hasattr(pair, "left") else pair
    found, blocked = matcher.matches(net, a, b)
    if found:
        return found[0]
    if blocked:
        return blocked[0]
    return None


# --------------------------------------------------------------------------
# rewriting


def apply(net: Net, m: MatchResult) -> tuple[list[int], list[tuple]]:
    """Rewrite ``net`` in place with a match.

    Returns the ids of the new agents and the wires that were (re)made, so the
    caller can look for new active pairs.  ``m`` must have been matched
    against the current state of ``net``.
    """
    cr = m.compiled if m.compiled is not None else _CompiledRule(m.rule)
    env = m.env
    try:
        values = [(sym, [f(env) for f in fs]) for sym, fs in cr.rhs_agents]
    except ax.EvalError as exc:
        raise RuntimeFault(cr.name, exc) from None

    peer = net._peer
    inner = m.inner
    owner = {cp: name for name, cp in inner.items()}
    ext = m.boundary
    agents = net.agents
    for aid in m.consumed:
        for slot in range(agents.pop(aid).symbol.arity + 1):
            q = peer.pop((aid, slot), None)
            if q is not None:
                del peer[q]
    # arities were checked when the rule was built
    first = net._next_id
    new_ids = list(range(first, first + len(values)))
    for aid, (sym, attrs) in zip(new_ids, values):
        agents[aid] = Agent(aid, sym, tuple(attrs))
    net._next_id = first + len(values)
    named = cr.rhs_named
    if owner.keys().isdisjoint(ext.values()):
        return new_ids, _wire_direct(peer, cr, new_ids, ext)
    made: list[tuple] = []

    def link(p, q):
        peer[p] = q
        peer[q] = p
        made.append((p, q))

    for i, si, j, sj in cr.rhs_pairs:
        link((new_ids[i], si), (new_ids[j], sj))

    limit = len(named) + 1

    def through(x):
        # x is an outside end; follow wires that pass through the rewritten
        # region until a real port (or nothing) is reached
        for _ in range(limit):
            if x is None or x not in owner:
                return x
            e = named[owner[x]]
            if not isinstance(e, str):
                return (new_ids[e[0]], e[1])
            x = ext[e]
        return None

    for name, e in named.items():
        if isinstance(e, str):
            # a wire between two free ports of the pattern
            if name < e:
                a, b = through(ext[name]), through(ext[e])
                if a is not None and b is not None and peer.get(a) is None \
                        and peer.get(b) is None:
                    link(a, b)
            continue
        port = (new_ids[e[0]], e[1])
        if peer.get(port) is None:
            q = through(ext[name])
            if q is not None and peer.get(q) is None:
                link(port, q)
    return new_ids, made


def _wire_direct(peer: dict, cr: _CompiledRule, new_ids: list, ext: dict) -> list[tuple]:
    """Wiring of the right-hand side when no outside wire joins two free
    ports of the pattern, so every outside end is a plain port."""
    made = []
    for i, si, j, sj in cr.rhs_pairs:
        p, q = (new_ids[i], si), (new_ids[j], sj)
        peer[p] = q
        peer[q] = p
        made.append((p, q))
    for name, e in cr.rhs_named.items():
        x = ext[name]
        if x is None:
            continue
        if e.__class__ is str:
            if name < e:
                y = ext[e]
                if y is not None:
                    peer[x] = y
                    peer[y] = x
                    made.append((x, y))
        else:
            p = (new_ids[e[0]], e[1])
            peer[p] = x
            peer[x] = p
            made.append((p, x))
    return made


def instantiate(template: Net, env: Mapping[str, int]) -> Net:
    """Evaluate a rule right-hand side's attribute expressions under ``env``."""
    out = Net(interface=list(template.interface))
    ids = {}
    for aid, a in template.agents.items():
        ids[aid] = out.add_agent(a.symbol, [v if isinstance(v, int) else ax.eval_expr(v, env)
                                            for v in a.attrs])
    for p, q in template._peer.items():
        pp = p if isinstance(p, str) else (ids[p[0]], p[1])
        qq = q if isinstance(q, str) else (ids[q[0]], q[1])
        if out.peer(pp) is None:
            out.connect(pp, qq)
    return out


def pattern_net(nap: ConditionalNap, env: Mapping[str, int]) -> Net:
    """The condition-dropped pattern as a concrete net, attributes from ``env``;
    its interface is the pattern's free ports."""
    out = Net(interface=list(nap.free_ports()))
    inner = {}

    def add(pat):
        aid = out.add_agent(pat.symbol, [env[v] for v in pat.attr_vars])
        for slot, pv in enumerate(pat.port_vars, start=1):
            inner[pv] = (aid, slot)
        return aid

    a, b = add(nap.left), add(nap.right)
    out.connect((a, 0), (b, 0))
    for c in nap.connections:
        g = add(c.agent)
        out.connect(inner.pop(c.port), (g, 0))
    for name, cp in inner.items():
        out.connect(cp, name)
    return out


# --------------------------------------------------------------------------
# strategies and reduction


@dataclass(frozen=True)
class Strategy:
    """Order in which ready active pairs are reduced.

    ``fifo`` and ``lifo`` treat the ready pairs as a queue or a stack;
    ``random`` draws uniformly with a seeded generator.  Pairs involving a
    symbol in ``defer`` are only chosen when nothing else is ready.  When
    several rules match one pair (only possible for rule sets that fail the
    static checks), fifo takes the first, lifo the last and random draws.
    """

    kind: str = "fifo"
    seed: int = 0
    defer: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("fifo", "lifo", "random"):
            raise ValueError(f"unknown strategy {self.kind!r}")

    @classmethod
    def random(cls, seed: int = 0, **kw) -> "Strategy":
        return cls("random", seed, **kw)

    def __str__(self) -> str:
        return f"random({self.seed})" if self.kind == "random" else self.kind


FIFO = Strategy("fifo")
LIFO = Strategy("lifo")


class _Agenda:
    def __init__(self, strategy: Strategy, rng: random.Random):
        self.kind = strategy.kind
        self.rng = rng
        self.items: deque | list = deque() if self.kind == "fifo" else []
        self.push = self.items.append
        if self.kind == "fifo":
            self.pop = self.items.popleft
        elif self.kind == "lifo":
            self.pop = self.items.pop

    def __len__(self) -> int:
        return len(self.items)

    def pop(self):
        # random draw; fifo and lifo bind the container's own pop instead
        items = self.items
        k = self.rng.randrange(len(items))
        items[k], items[-1] = items[-1], items[k]
        return items.pop()


@dataclass(slots=True)
class TraceEntry:
    step: int
    rule: str
    left: str
    right: str
    env: dict
    net: Net | None = None

    def __str__(self) -> str:
        env = ",".join(f"{k}={v}" for k, v in self.env.items())
        return f"#{self.step} {self.rule} {self.left}><{self.right} {{{env}}}"


class Trace(list):
    def format(self) -> str:
        return "\n".join(str(e) for e in self)


@dataclass
class Result:
    net: Net
    trace: Trace
    blocked: list = field(default_factory=list)  # pairs still waiting on a nested agent
    stuck: list = field(default_factory=list)  # active pairs no rule matches

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def notes(self) -> list[str]:
        return ["blocked pairs remain"] if self.blocked else []


class Reducer:
    """Incremental reducer; ``step()`` performs one rewrite."""

    def __init__(self, net: Net, rules, strategy: Strategy = FIFO, *,
                 copy: bool = True, snapshots: bool = False,
                 observer: Callable[[int, Net, MatchResult], None] | None = None):
        self.net = net.copy() if copy else net
        self.matcher = rules if isinstance(rules, Matcher) else Matcher(rules)
        self.strategy = strategy
        self.rng = random.Random(strategy.seed)
        self.agenda = _Agenda(strategy, self.rng)
        self.deferred = _Agenda(strategy, self.rng)
        self.queued: set = set()
        self.blocked: dict = {}
        self.watchers: dict = {}
        self.stuck: set = set()
        self.trace = Trace()
        self.snapshots = snapshots
        self.observer = observer
        self._pending = None
        for aid in sorted(self.net.agents):
            q = self.net.peer((aid, 0))
            if isinstance(q, tuple) and q[1] == 0 and aid < q[0]:
                self._push((aid, q[0]))

    def _push(self, pair) -> None:
        if pair in self.queued:
            return
        self.queued.add(pair)
        defer = self.strategy.defer
        if defer and (self.net.agents[pair[0]].name in defer
                      or self.net.agents[pair[1]].name in defer):
            self.deferred.push(pair)
        else:
            self.agenda.push(pair)

    def _pop(self):
        if self.agenda:
            return self.agenda.pop()
        if self.deferred:
            return self.deferred.pop()
        return None

    def _live(self, pair) -> bool:
        a, b = pair
        return a in self.net.agents and self.net.peer((a, 0)) == (b, 0)

    def _choose(self, found: list[MatchResult]) -> MatchResult:
        if len(found) == 1 or self.strategy.kind == "fifo":
            return found[0]
        if self.strategy.kind == "lifo":
            return found[-1]
        return self.rng.choice(found)

    def _find(self):
        """The next ready pair with its matches, or None when nothing can fire."""
        if self._pending is not None:
            return self._pending
        net = self.net
        while True:
            pair = self._pop()
            if pair is None:
                return None
            self.queued.discard(pair)
            a = pair[0]
            if a not in net.agents or net._peer.get((a, 0)) != (pair[1], 0):
                continue
            found, blocked = self.matcher.matches(net, *pair)
            if found:
                self._pending = (pair, found)
                return self._pending
            if blocked:
                self.blocked[pair] = blocked
                for b in blocked:
                    for aid in b.watch:
                        self.watchers.setdefault(aid, set()).add(pair)
            else:
                self.stuck.add(pair)

    def done(self) -> bool:
        """True when no ready pair matches any rule."""
        return self._find() is None

    def step(self) -> TraceEntry | None:
        """Perform one rewrite; None when no ready pair matches any rule."""
        nxt = self._find()
        if nxt is None:
            return None
        self._pending = None
        pair, found = nxt
        net = self.net
        m = self._choose(found)
        if self.blocked:
            self.blocked.pop(pair, None)
        wake = set()
        if self.watchers:
            for aid in m.consumed:
                wake |= self.watchers.pop(aid, set())
        _, made = apply(net, m)
        # every wire touching a new agent is in ``made``
        for p, q in made:
            if p.__class__ is tuple and q.__class__ is tuple and p[1] == 0 and q[1] == 0:
                self._push((p[0], q[0]) if p[0] < q[0] else (q[0], p[0]))
        for other in sorted(wake):
            if other in self.blocked and self._live(other):
                del self.blocked[other]
                self._push(other)
        entry = TraceEntry(len(self.trace) + 1, m.rule.name, m.left_symbol, m.right_symbol,
                           m.env, net.copy() if self.snapshots else None)
        self.trace.append(entry)
        if self.observer is not None:
            self.observer(entry.step, net, m)
        return entry

    def run(self, max_steps: int | None = 100_000) -> Result:
        while max_steps is None or len(self.trace) < max_steps:
            if self.step() is None:
                return self.result()
        if self.done():
            return self.result()
        raise StepLimitExceeded(max_steps, self.net, self.trace)

    def result(self) -> Result:
        live_blocked = sorted(p for p in self.blocked if self._live(p))
        live_stuck = sorted(p for p in self.stuck if self._live(p))
        return Result(self.net, self.trace, live_blocked, live_stuck)


def reduce(net: Net, rules, strategy: Strategy = FIFO, max_steps: int | None = 100_000,
           **kw) -> Result:
    """Reduce to normal form; raises StepLimitExceeded or RuntimeFault."""
    return Reducer(net, rules, strategy, **kw).run(max_steps)


# --------------------------------------------------------------------------
# confluence runs


@dataclass
class OrderRun:
    strategy: Strategy
    net: Net | None
    steps: int | None
    error: str | None = None


@dataclass
class ConfluenceReport:
    runs: list

    @property
    def all_iso(self) -> bool:
        nets = [r.net for r in self.runs]
        if any(n is None for n in nets):
            return False
        return all(iso(nets[0], n) for n in nets[1:])

    @property
    def steps_equal(self) -> bool:
        return len({r.steps for r in self.runs}) == 1 and self.runs[0].steps is not None

    @property
    def ok(self) -> bool:
        return self.all_iso and self.steps_equal

    def distinct_normal_forms(self) -> list[Net]:
        reps: list[Net] = []
        for r in self.runs:
            if r.net is not None and not any(iso(r.net, x) for x in reps):
                reps.append(r.net)
        return reps


def reduce_all_orders(net: Net, rules, trials: int = 20, seed: int = 0,
                      max_steps: int | None = 100_000) -> ConfluenceReport:
    """Reduce under fifo, lifo and ``trials`` seeded random orders."""
    matcher = rules if isinstance(rules, Matcher) else Matcher(rules)
    strategies = [FIFO, LIFO] + [Strategy.random(seed + k) for k in range(trials)]
    runs = []
    for s in strategies:
        try:
            res = reduce(net, matcher, s, max_steps)
            runs.append(OrderRun(s, res.net, res.steps))
        except ReductionError as exc:
            runs.append(OrderRun(s, None, None, str(exc)))
    return ConfluenceReport(runs)
