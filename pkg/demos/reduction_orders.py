#!/usr/bin/env python3
"""Order independence: fifo, lifo and seeded random schedules agree.

Rules that pass the static checks never compete for an active pair, so
every schedule performs the same rewrites in a different order.
"""

from nestednets.engine import Strategy, reduce, reduce_all_orders
from nestednets.net import iso
from nestednets.program import load_corpus
from nestednets.terms import format_net


def main():
    mult = load_corpus("mult")
    net = mult.parse_net("Mult(r, S(S(S(S(Z))))) ~ S(S(S(Z)))")
    print(f"Net: {format_net(net)}")
    rep = reduce_all_orders(net, mult.rules, trials=20, seed=7)
    for run in rep.runs[:5]:
        print(f"  {str(run.strategy):>10}: {run.steps} steps, {format_net(run.net)}")
    print(f"  ... {len(rep.runs)} schedules in all")
    print(f"All normal forms isomorphic: {rep.all_iso}; step counts equal: {rep.steps_equal}")
    print()

    # holding Add pairs back until nothing else is ready exposes the
    # intermediate sum Add(S3Z, Add(S3Z, Z)) of 2 * 3
    mult = load_corpus("mult")
    target = mult.parse_net("Add(r, w) ~ S(S(S(Z))), Add(w, Z) ~ S(S(S(Z)))")
    res = reduce(mult.net(), mult.rules, Strategy("fifo", defer=frozenset({"Add"})),
                 snapshots=True)
    for entry in res.trace:
        mark = "  <- Add(S3Z, Add(S3Z, Z))" if iso(entry.net, target) else ""
        print(f"  {entry}{mark}")
    print(f"Result: {format_net(res.net)}")


if __name__ == "__main__":
    main()
