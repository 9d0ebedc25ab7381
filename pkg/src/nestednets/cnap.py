"""Conditional nested active pairs (NAPs), rules over them, and static checks.

A conditional NAP is a conditional active pair ``alpha(xs) >< beta(ys) if c``
extended by an ordered list of connections ``z - gamma(ws) if c'``, each
plugging the principal port of ``gamma`` into a port ``z`` that is still free.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from . import attrs as ax
from .attrs import TRUE, Condition, Otherwise
from .net import Net, Symbol, SymbolTable


class PatternError(Exception):
    """A NAP or rule violates its well-formedness conditions."""

    def __init__(self, message: str, clause: str = "3.1"):
        super().__init__(message)
        self.clause = clause


@dataclass(frozen=True)
class PatternAgent:
    symbol: Symbol
    attr_vars: tuple = ()
    port_vars: tuple = ()

    def __post_init__(self):
        if len(self.attr_vars) != self.symbol.attr_arity:
            raise PatternError(f"{self.symbol.name} needs {self.symbol.attr_arity} "
                               f"attribute variable(s), got {len(self.attr_vars)}")
        if len(self.port_vars) != self.symbol.arity:
            raise PatternError(f"{self.symbol.name} needs {self.symbol.arity} "
                               f"port name(s), got {len(self.port_vars)}")

    @property
    def name(self) -> str:
        return self.symbol.name

    def renamed(self, ports: Mapping[str, str], attrs: Mapping[str, str]) -> "PatternAgent":
        return PatternAgent(self.symbol,
                            tuple(attrs.get(v, v) for v in self.attr_vars),
                            tuple(ports.get(p, p) for p in self.port_vars))

    def __str__(self) -> str:
        if self.attr_vars and self.port_vars:
            return f"{self.name}({', '.join(self.attr_vars)})({', '.join(self.port_vars)})"
        parts = list(self.attr_vars) + list(self.port_vars)
        return f"{self.name}({', '.join(parts)})" if parts else self.name


@dataclass(frozen=True)
class Connection:
    port: str
    agent: PatternAgent
    cond: Condition = TRUE

    def __str__(self) -> str:
        return f"{self.port} - {self.agent}{_if(self.cond)}"


def _if(cond: Condition) -> str:
    return f" if {ax.format_condition(cond)}"


@dataclass(frozen=True)
class ConditionalNap:
    left: PatternAgent
    right: PatternAgent
    cond: Condition = TRUE
    connections: tuple = ()

    # -- structure ---------------------------------------------------------

    def agents(self) -> list[PatternAgent]:
        return [self.left, self.right] + [c.agent for c in self.connections]

    def attr_vars(self) -> list[str]:
        return [v for a in self.agents() for v in a.attr_vars]

    def port_names(self) -> list[str]:
        return [p for a in self.agents() for p in a.port_vars]

    def free_ports(self) -> list[str]:
        """Free port names, in introduction order."""
        used = {c.port for c in self.connections}
        return [p for p in self.port_names() if p not in used]

    def prefix(self, k: int) -> "ConditionalNap":
        return replace(self, connections=self.connections[:k])

    def extend(self, conn: Connection) -> "ConditionalNap":
        return replace(self, connections=self.connections + (conn,))

    def conditions(self) -> list[Condition]:
        return [self.cond] + [c.cond for c in self.connections]

    def validate(self) -> None:
        """Check the inductive formation conditions; raise PatternError."""
        ports = list(self.left.port_vars) + list(self.right.port_vars)
        if len(set(ports)) != len(ports):
            raise PatternError(f"port names of the base pair are not distinct in {self}")
        avars = list(self.left.attr_vars) + list(self.right.attr_vars)
        if len(set(avars)) != len(avars):
            raise PatternError(f"attribute variables repeat in {self}")
        if not ax.condition_vars(self.cond) <= set(avars):
            raise PatternError(f"condition {ax.format_condition(self.cond)} uses unbound "
                               f"attribute variables in {self}")
        free = list(ports)
        seen_ports = set(ports)
        for conn in self.connections:
            if conn.port not in free:
                raise PatternError(f"connection at {conn.port!r}: not a free port of the "
                                   f"pattern built so far in {self}")
            free.remove(conn.port)
            for w in conn.agent.port_vars:
                if w in seen_ports:
                    raise PatternError(f"port name {w!r} is not fresh in {self}")
                seen_ports.add(w)
                free.append(w)
            if len(set(conn.agent.port_vars)) != len(conn.agent.port_vars):
                raise PatternError(f"port names of {conn.agent} are not distinct")
            for v in conn.agent.attr_vars:
                if v in avars:
                    raise PatternError(f"attribute variable {v!r} repeats in {self}")
                avars.append(v)
            if not ax.condition_vars(conn.cond) <= set(avars):
                raise PatternError(f"condition {ax.format_condition(conn.cond)} uses "
                                   f"unbound attribute variables in {self}")

    def __str__(self) -> str:
        parts = [f"{self.left} >< {self.right}{_if(self.cond)}"]
        parts += [str(c) for c in self.connections]
        return "<" + ", ".join(parts) + ">"


def drop_conditions(nap: ConditionalNap) -> ConditionalNap:
    return ConditionalNap(nap.left, nap.right, TRUE,
                          tuple(Connection(c.port, c.agent, TRUE) for c in nap.connections))


def all_sub(nap: ConditionalNap) -> list[ConditionalNap]:
    """Every prefix of ``nap``, from the bare pair to ``nap`` itself."""
    return [nap.prefix(k) for k in range(len(nap.connections) + 1)]


def canonical_renaming(nap: ConditionalNap) -> tuple[dict, dict]:
    """The (ports, attribute variables) renaming used by :func:`canonical`."""
    left, right = _oriented(nap)
    ports: dict[str, str] = {}
    avars: dict[str, str] = {}
    for agent in [left, right] + [c.agent for c in nap.connections]:
        for p in agent.port_vars:
            ports.setdefault(p, f"p{len(ports)}")
        for v in agent.attr_vars:
            avars.setdefault(v, f"a{len(avars)}")
    return ports, avars


def _oriented(nap: ConditionalNap) -> tuple[PatternAgent, PatternAgent]:
    if nap.right.name < nap.left.name:
        return nap.right, nap.left
    return nap.left, nap.right


def canonical(nap: ConditionalNap) -> ConditionalNap:
    """Rename ports and attribute variables positionally and fix orientation.

    Two NAPs that differ only in variable names, or in which agent of the
    base pair is written first, have equal canonical forms.
    """
    ports, avars = canonical_renaming(nap)
    left, right = _oriented(nap)
    return ConditionalNap(
        left.renamed(ports, avars), right.renamed(ports, avars),
        ax.rename_condition(nap.cond, avars),
        tuple(Connection(ports[c.port], c.agent.renamed(ports, avars),
                         ax.rename_condition(c.cond, avars))
              for c in nap.connections))


# --------------------------------------------------------------------------
# rules


@dataclass
class Rule:
    """``lhs -> rhs``: the RHS is a net template whose interface is the set of
    free ports of the LHS and whose attributes are expressions over the LHS
    attribute variables."""

    lhs: ConditionalNap
    rhs: Net
    name: str = ""

    def validate(self) -> None:
        self.lhs.validate()
        free = self.lhs.free_ports()
        if set(free) != set(self.rhs.interface):
            raise PatternError(
                f"rule {self.name}: free ports {sorted(free)} of the left-hand side differ "
                f"from the right-hand side interface {sorted(self.rhs.interface)}",
                clause="interface")
        bound = set(self.lhs.attr_vars())
        for agent in self.rhs.agents.values():
            for e in agent.attrs:
                if isinstance(e, int):
                    continue
                missing = ax.free_vars(e) - bound
                if missing:
                    raise PatternError(f"rule {self.name}: unbound attribute variable(s) "
                                       f"{sorted(missing)} in the right-hand side",
                                       clause="rhs")
        for p in self.rhs.ports():
            if self.rhs.peer(p) is None:
                raise PatternError(f"rule {self.name}: port {p!r} of the right-hand side "
                                   f"is not wired", clause="rhs")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.lhs.left.name, self.lhs.right.name)

    def __str__(self) -> str:
        from .terms import format_net
        return f"{self.lhs} -> {format_net(self.rhs)}"


@dataclass
class RuleSet:
    rules: list
    symbols: SymbolTable = field(default_factory=SymbolTable)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


# --------------------------------------------------------------------------
# disjointness


class Verdict(Enum):
    DISJOINT = "proven-disjoint"
    OVERLAPPING = "proven-overlapping"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DisjointResult:
    verdict: Verdict
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.verdict is Verdict.DISJOINT


def _literals(cond: Condition) -> tuple[set, set]:
    """Expressions a condition forces true (pos) and false (neg), syntactically."""
    pos: set = set()
    neg: set = set()

    def true(e) -> None:
        if e in pos:
            return
        pos.add(e)
        if isinstance(e, ax.BinOp) and e.op == "and":
            true(e.left)
            true(e.right)
        elif isinstance(e, ax.Not):
            false(e.operand)

    def false(e) -> None:
        if e in neg:
            return
        neg.add(e)
        if isinstance(e, ax.BinOp) and e.op == "or":
            false(e.left)
            false(e.right)
        elif isinstance(e, ax.Not):
            true(e.operand)

    if isinstance(cond, Otherwise):
        for c in cond.prior:
            false(ax.semantic(c))
    elif cond is not TRUE:
        true(cond)
    return pos, neg


_SMALL = [0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7, 8, -8]
_BOUNDARY = [10, -10, 16, 100, -100, 1000, ax.INT_MAX, ax.INT_MIN]


def sample_envs(variables: Sequence[str], *, seed: int = 0, random_samples: int = 400):
    """Environments for falsification: small values in order of magnitude, then
    boundary values, then seeded random integers."""
    variables = sorted(variables)
    if not variables:
        yield {}
        return
    grid = _SMALL if len(variables) <= 2 else _SMALL[:7]
    for values in itertools.product(grid, repeat=len(variables)):
        yield dict(zip(variables, values))
    for v in _BOUNDARY:
        yield {name: v for name in variables}
    rng = random.Random(seed)
    for _ in range(random_samples):
        yield {name: rng.choice((rng.randint(-50, 50), rng.randint(-10**6, 10**6)))
               for name in variables}


def _holds(cond: Condition, env) -> bool | None:
    try:
        return ax.holds(cond, env)
    except ax.EvalError:
        return None


def disjoint(c1: Condition, c2: Condition, variables: Iterable[str] = (), *,
             seed: int = 0) -> DisjointResult:
    """Three-valued disjointness of two conditions.

    Guard chains are recognised syntactically: a condition that has ``c`` as a
    conjunct is disjoint from one that has ``not(c)`` (or ``not(.. or c or ..)``,
    or ``otherwise`` after ``c``) as a conjunct.  Otherwise sampled
    environments look for a common model, which proves overlap.
    """
    if (isinstance(c1, Otherwise) and not c1.prior) or (isinstance(c2, Otherwise) and not c2.prior):
        # a bare otherwise is read relative to the other guard of its group
        return DisjointResult(Verdict.DISJOINT)
    p1, n1 = _literals(c1)
    p2, n2 = _literals(c2)
    if p1 & n2 or p2 & n1:
        return DisjointResult(Verdict.DISJOINT)
    names = set(variables) | ax.condition_vars(c1) | ax.condition_vars(c2)
    for env in sample_envs(names, seed=seed):
        if _holds(c1, env) and _holds(c2, env):
            return DisjointResult(Verdict.OVERLAPPING, env)
    return DisjointResult(Verdict.UNKNOWN)


# --------------------------------------------------------------------------
# subnets


def _structural_prefix(a: ConditionalNap, b: ConditionalNap) -> bool:
    da, db = drop_conditions(a), drop_conditions(b)
    return len(da.connections) <= len(db.connections) and \
        da == db.prefix(len(da.connections))


def subnet_verdict(a: ConditionalNap, b: ConditionalNap, *, seed: int = 0) -> bool | None:
    """Is ``a`` a subnet of ``b``?  None when availability implication is
    neither shown structurally nor refuted by sampling."""
    ca, cb = canonical(a), canonical(b)
    if not _structural_prefix(ca, cb):
        return False
    conds_b = cb.conditions()
    if all(c is TRUE or c in conds_b for c in ca.conditions()):
        return True
    # look for an environment where b is available and a is not
    for env in sample_envs(cb.attr_vars(), seed=seed):
        if all(_holds(c, env) for c in conds_b) and \
                not all(_holds(c, env) for c in ca.conditions()):
            return False
    return None


def subnet(a: ConditionalNap, b: ConditionalNap) -> bool:
    """True iff ``a`` is a subnet of ``b``: the condition-dropped ``a`` is a prefix
    of the condition-dropped ``b`` and ``a`` is available whenever ``b`` is.

    Availability is established structurally (every condition of ``a`` is
    ``true`` or also a condition of ``b``); undecided cases count as False.
    """
    return subnet_verdict(a, b) is True


# --------------------------------------------------------------------------
# sequentiality and pairwise distinctness


@dataclass
class Diagnostic:
    clause: str  # "1a" | "2a" | "2b" | "2c" | "subnet" | "duplicate"
    naps: tuple
    message: str
    witness: dict | None = None
    severity: str = "error"

    def as_dict(self) -> dict:
        out = {"clause": self.clause, "severity": self.severity,
               "naps": [str(n) for n in self.naps], "message": self.message}
        if self.witness is not None:
            out["witness"] = dict(self.witness)
        return out

    def __str__(self) -> str:
        w = f" witness {self.witness}" if self.witness is not None else ""
        return f"[{self.severity} {self.clause}] {self.message}{w}"


def _pairwise_conditions(group, clause: str, strict: bool, out: list) -> None:
    """Disjointness of every pair of (nap, canonical nap, condition) in one group."""
    for (n1, k1, c1), (n2, k2, c2) in itertools.combinations(group, 2):
        res = disjoint(c1, c2, set(k1.attr_vars()) | set(k2.attr_vars()))
        # report in the first rule's own variable names
        back = {v: k for k, v in canonical_renaming(n2)[1].items()}
        back.update({v: k for k, v in canonical_renaming(n1)[1].items()})
        c1, c2 = ax.rename_condition(c1, back), ax.rename_condition(c2, back)
        if res.verdict is Verdict.OVERLAPPING:
            witness = {back.get(k, k): v for k, v in res.witness.items()}
            out.append(Diagnostic(clause, (n1, n2),
                                  f"conditions {ax.format_condition(c1)} and "
                                  f"{ax.format_condition(c2)} overlap", witness))
        elif res.verdict is Verdict.UNKNOWN:
            out.append(Diagnostic(clause, (n1, n2),
                                  f"could not decide whether {ax.format_condition(c1)} and "
                                  f"{ax.format_condition(c2)} are disjoint",
                                  severity="error" if strict else "warning"))


def check_local_sequentiality(naps: Iterable[ConditionalNap], *,
                              strict: bool = False) -> list[Diagnostic]:
    """Diagnostics for the local-sequentiality clauses; empty when the set is
    sequential.  NAPs are compared up to variable renaming."""
    canon: dict[ConditionalNap, ConditionalNap] = {}
    for n in naps:
        canon.setdefault(canonical(n), n)
    out: list[Diagnostic] = []

    bases: dict = {}
    siblings: dict = {}
    extension_ports: dict = {}
    for c, orig in canon.items():
        if not c.connections:
            key = drop_conditions(c)
            bases.setdefault(key, []).append((orig, c, c.cond))
            continue
        parent = c.prefix(len(c.connections) - 1)
        last = c.connections[-1]
        if parent not in canon:
            out.append(Diagnostic("2b", (orig,),
                                  f"prefix {parent} of {orig} is not in the set"))
        key = (parent, last.port, drop_conditions(c).connections[-1].agent)
        siblings.setdefault(key, []).append((orig, c, last.cond))
        extension_ports.setdefault(parent, {}).setdefault(last.port, orig)

    for group in bases.values():
        _pairwise_conditions(group, "1a", strict, out)
    for group in siblings.values():
        _pairwise_conditions(group, "2a", strict, out)
    for parent, ports in extension_ports.items():
        if len(ports) > 1:
            naps_ = tuple(ports.values())
            out.append(Diagnostic("2c", naps_,
                                  f"extensions of {parent} attach at different ports "
                                  f"{sorted(ports)}"))
    return out


def check_pairwise_distinct(rules: Sequence[Rule], *, strict: bool = False) -> list[Diagnostic]:
    naps = [n for r in rules for n in all_sub(r.lhs)]
    out = check_local_sequentiality(naps, strict=strict)
    canon = [canonical(r.lhs) for r in rules]
    for i, j in itertools.combinations(range(len(rules)), 2):
        if canon[i] == canon[j]:
            out.append(Diagnostic("duplicate", (rules[i].lhs, rules[j].lhs),
                                  f"rules {rules[i].name or i} and {rules[j].name or j} "
                                  f"have the same left-hand side"))
            continue
        for a, b in ((i, j), (j, i)):
            v = subnet_verdict(rules[a].lhs, rules[b].lhs)
            if v is True:
                out.append(Diagnostic("subnet", (rules[a].lhs, rules[b].lhs),
                                      f"left-hand side of {rules[a].name or a} is a subnet "
                                      f"of {rules[b].name or b}"))
            elif v is None:
                out.append(Diagnostic("subnet", (rules[a].lhs, rules[b].lhs),
                                      f"could not decide whether {rules[a].name or a} is a "
                                      f"subnet of {rules[b].name or b}",
                                      severity="error" if strict else "warning"))
    return out


def errors(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]
