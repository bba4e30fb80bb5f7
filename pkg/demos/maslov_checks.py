#!/usr/bin/env python3
"""Finite-dimensional Maslov indices behind the solid-torus normalization."""

import math
from fractions import Fraction

import numpy as np

from torusflow.points import Direction, I, MINUS_I, MINUS_ONE, ONE, RationalPoint
from torusflow.solid_torus import circle_mas, flow_flat_solid
from torusflow.symplectic import LagrangianFrame, LagrangianPath, SymplecticSpace, maslov_index
from torusflow.torus_spectrum import k_limit_gap

sp = SymplecticSpace.standard(1)
H = LagrangianFrame(sp, np.array([[1], [0]]))
rot = LagrangianPath.rotation(H, lambda t: math.pi * t)
print("half rotation against its start:", maslov_index(rot, LagrangianPath.constant(H)).value)

# a graph family whose single eigenvalue crosses zero upward
g = LagrangianPath.from_function(sp, lambda t: np.array([[1.0], [t - 0.5]]))
print("upward crossing:", maslov_index(LagrangianPath.constant(H), g).value)

for th in (ONE, MINUS_ONE, I, MINUS_I):
    print(f"theta = {th.label():>2}: K+ half-turn vs check L_S {flow_flat_solid(th):+d},"
          f" K- vs check L_X {circle_mas(th):+d}")

# K+ is the limit of the positive spectral subspace approaching along theta
for t in (8, 16, 32, 64):
    print(f"t = 1/{t}: gap {k_limit_gap(RationalPoint('1/2', 0), Direction(3, 4), Fraction(1, t)):.3g}")
