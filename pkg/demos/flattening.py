#!/usr/bin/env python3
"""Compiling nested patterns to flat rules with intermediate agents.

Each connection of a nested pattern becomes one flat rule that plugs a
fresh agent onto the cased port.  The flat program takes more steps but
reaches the same normal form.
"""

from nestednets.engine import reduce
from nestednets.net import iso
from nestednets.program import load_corpus
from nestednets.terms import format_net


def main():
    for name in ("gcd", "lastelt", "sumup"):
        prog = load_corpus(name)
        flat, introduced, _ = prog.flattened
        print(f"{name}: {len(prog.rules)} nested rules -> {len(flat)} flat rules")
        print(f"  introduced: {', '.join(s.name for s in introduced)}")
        net = prog.net()
        nested_res = reduce(net, prog.rules)
        flat_res = reduce(net, flat)
        same = iso(nested_res.net, flat_res.net)
        print(f"  nested: {format_net(nested_res.net)} in {nested_res.steps} steps")
        print(f"  flat:   {format_net(flat_res.net)} in {flat_res.steps} steps")
        print(f"  same normal form: {same}")
        print()

    print("The flattened gcd program as text")
    print("---------------------------------")
    print(load_corpus("gcd").dump_flat())


if __name__ == "__main__":
    main()
