#!/usr/bin/env python3
"""Mod 4 totals over the example monodromies and a random batch."""

import sys
from collections import Counter

from torusflow.torus_bundle import EXAMPLE_MONODROMIES, ordered_pairs, random_monodromies, sf_mod4_for_classes

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
totals = Counter()
for B in list(EXAMPLE_MONODROMIES) + random_monodromies(20, seed=seed):
    pairs = ordered_pairs(B)
    for phi, psi in pairs:
        for policy in ("plus", "minus"):
            for k in range(-2, 3):
                res = sf_mod4_for_classes(B, phi, psi, policy, k, check=False)
                totals[res.total_mod4] += 1
    print(B.to_json(), "det(B+I) =", B.det_plus_identity, "ordered pairs:", len(pairs))
print("totals mod 4:", dict(totals))
