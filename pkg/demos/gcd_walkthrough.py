#!/usr/bin/env python3
"""Euclid's algorithm as one nested rule, reduced step by step.

The gcd rule cases on both components of a pair before it fires, so a
single rewrite consumes gcd, Pair and up to two Int agents at once.
"""

from nestednets.engine import reduce
from nestednets.program import load_corpus
from nestednets.terms import format_net


def main():
    gcd = load_corpus("gcd")
    print("Rules in notation")
    print("-----------------")
    print(gcd.source.split("rules:")[1].split("nets:")[0].strip())
    print()

    print("Expanded into rules on conditional patterns")
    print("-------------------------------------------")
    for rule in gcd.rules:
        print(f"{rule.name}: {rule.lhs}")
    print()

    net = gcd.net()
    print(f"Start: {format_net(net)}")
    res = reduce(net, gcd.rules, snapshots=True)
    for entry in res.trace:
        print(f"  {entry}")
        print(f"    -> {format_net(entry.net)}")
    print(f"Normal form after {res.steps} steps: {format_net(res.net)}")


if __name__ == "__main__":
    main()
