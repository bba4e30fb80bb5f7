#!/usr/bin/env python3
"""Intersection numbers with the cycle z for a few hand-made paths."""

from torusflow.blowup import Arc, BlowupPath, crossings, lift_path
from torusflow.points import I, MINUS_I, RationalPoint as P
from torusflow.solid_torus import CycleZ, full_turn, lens_identity, validate_cycle

z = CycleZ()
for p in z.window():
    print(f"{p.label:16s} {p.start} -> {p.end}  coefficient {p.coefficient:+d}")

for c in validate_cycle():
    print(("ok  " if c.passed else "FAIL"), c.name, "-", c.detail)

a, solid, x_side = lens_identity()
print(f"full turn at (1/2, 0): solid {solid}, complement {x_side}, a = {a}")

straight = lift_path([P(0, "1/4"), P(1, "1/4")])
print("straight path (0,1/4) -> (1,1/4):", sum(x.contribution for x in crossings(straight, z)))
for x in crossings(straight, z):
    print("   ", x.chain_label, x.location, "sign", x.sign)

half = BlowupPath([Arc(P(0, 0), MINUS_I, I, True)])
print("half turn at (0,0) through +1:", sum(x.contribution for x in crossings(half, z)))

# a full turn counts the same at every lattice circle
for c in (P(0, 0), P("1/2", 0), P(0, "1/2"), P("1/2", "1/2")):
    print("full turn at", c, ":", sum(x.contribution for x in crossings(full_turn(c), z)))
