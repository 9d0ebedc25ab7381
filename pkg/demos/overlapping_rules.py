#!/usr/bin/env python3
"""Why the static checks matter: f(0, y) = 0 and f(x, 0) = 1.

Both rules apply to f(0, 0).  The checker reports the overlap with a
witness; with the checks bypassed, different schedules pick different
rules and the program has two answers.
"""

from nestednets.engine import reduce_all_orders
from nestednets.program import load_corpus
from nestednets.terms import format_net


def main():
    por = load_corpus("por")
    print("Diagnostics")
    print("-----------")
    for d in por.check():
        print(f"  {d}")
    print()

    rep = reduce_all_orders(por.net(), por.rules, trials=10)
    print("Normal forms reached with the checks bypassed")
    print("---------------------------------------------")
    for nf in rep.distinct_normal_forms():
        who = [str(r.strategy) for r in rep.runs if r.net is not None and
               format_net(r.net) == format_net(nf)]
        print(f"  {format_net(nf)}  ({', '.join(who)})")


if __name__ == "__main__":
    main()
