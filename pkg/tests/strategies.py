"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from nestednets import attrs as ax
from nestednets.net import CONS, INT, NIL, Net, Symbol

VARS = ("a", "b", "c")

small_ints = st.integers(min_value=-20, max_value=20)


def exprs(max_leaves: int = 12):
    leaves = st.one_of(st.sampled_from(VARS).map(ax.Var), small_ints.filter(lambda v: v >= 0).map(ax.Lit))

    def extend(children):
        return st.one_of(
            children.map(ax.Neg),
            children.map(ax.Not),
            st.tuples(st.sampled_from(sorted(ax.BINARY_OPS)), children, children)
              .map(lambda t: ax.BinOp(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


envs = st.fixed_dictionaries({v: small_ints for v in VARS})

PAIR = Symbol("Pair", 2, 0)
SUC = Symbol("S", 1, 0)
ZERO = Symbol("Z", 0, 0)
NET_SYMBOLS = (INT, CONS, NIL, PAIR, SUC, ZERO)


@st.composite
def nets(draw, max_agents: int = 8):
    """Random nets: agents of a few symbols, ports paired up at random, and
    the leftover ports exposed as interface names."""
    n = draw(st.integers(min_value=0, max_value=max_agents))
    net = Net()
    for _ in range(n):
        sym = draw(st.sampled_from(NET_SYMBOLS))
        net.add_agent(sym, [draw(st.integers(0, 3)) for _ in range(sym.attr_arity)])
    ports = [p for p in net.ports()]
    order = draw(st.permutations(ports))
    n_wires = draw(st.integers(0, len(order) // 2))
    for k in range(n_wires):
        net.connect(order[2 * k], order[2 * k + 1])
    for k, p in enumerate(order[2 * n_wires:]):
        name = f"x{k}"
        net.add_interface(name)
        net.connect(p, name)
    return net


def random_net(rng, max_agents: int = 8) -> Net:
    """The same distribution as :func:`nets`, drawn from a ``random.Random``."""
    net = Net()
    for _ in range(rng.randint(0, max_agents)):
        sym = rng.choice(NET_SYMBOLS)
        net.add_agent(sym, [rng.randint(0, 3) for _ in range(sym.attr_arity)])
    ports = list(net.ports())
    rng.shuffle(ports)
    n_wires = rng.randint(0, len(ports) // 2)
    for k in range(n_wires):
        net.connect(ports[2 * k], ports[2 * k + 1])
    for k, p in enumerate(ports[2 * n_wires:]):
        net.add_interface(f"x{k}")
        net.connect(p, f"x{k}")
    return net


def random_expr(rng, depth: int = 3):
    if depth == 0 or rng.random() < 0.3:
        return ax.Var(rng.choice(VARS)) if rng.random() < 0.6 else ax.Lit(rng.randint(0, 5))
    kind = rng.random()
    if kind < 0.15:
        return ax.Not(random_expr(rng, depth - 1))
    if kind < 0.2:
        return ax.Neg(random_expr(rng, depth - 1))
    op = rng.choice(sorted(ax.BINARY_OPS))
    return ax.BinOp(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))


def shuffled(net: Net, rng) -> Net:
    """``net`` with its agent ids permuted."""
    from nestednets.net import renumber
    ids = list(net.agents)
    perm = ids[:]
    rng.shuffle(perm)
    return renumber(net, {i: 1000 + j for i, j in zip(ids, perm)})
