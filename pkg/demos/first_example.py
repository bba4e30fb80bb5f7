#!/usr/bin/env python3
"""Walk through the B = [[5,2],[2,1]] bundle from classes to the mod 4 total."""

from torusflow.torus_bundle import (
    Monodromy, RepPoint, boundary_coords, check_central_obstruction, enumerate_reps,
    find_curve, pair_vector, sf_mod4,
)

B = Monodromy(5, 2, 2, 1)
print("det(B + I) =", B.det_plus_identity)

reps = enumerate_reps(B)
for r in reps:
    print("  ", r, "reducible" if r.reducible else "irreducible")

phi, psi = RepPoint("3/4", "1/4"), RepPoint("1/4", "1/4")

# the pair vector fixes the splitting curve up to sign
for other in (psi, -psi):
    w = pair_vector(B, phi, other)
    c = find_curve(B, phi, other)
    print(f"(phi - {other})(B+I) = {w}  ->  (p, q) = ({c.p}, {c.q}), (r, s) = ({c.r}, {c.s})")

curve = find_curve(B, phi, psi)
for x in (phi, psi):
    bc = boundary_coords(B, x, curve)
    print(f"{x}: alpha = {bc.alpha}, beta = {bc.beta}, central = {bc.central}")

rep = check_central_obstruction(B, phi, psi, window=2)
print(f"{rep.central_choices}/{rep.choices} conjugate choices central on the boundary")

res = sf_mod4(B, phi, psi)
print("solid torus:", res.sf_solid)
print("complement :", res.sf_x_mod4, "mod 4")
print("corrections:", res.corrections_mod4, "mod 4")
print("total      :", res.total_mod4, "mod 4")
for e in res.trace:
    print("   ", e.kind, e.where, e.value, e.note)
