"""Empirical resolvent constant on the unit torus with control band 0.4 < y < 0.6.

Run: python demos/torus_resolvent.py
"""
import numpy as np

from flatbilliards.bz import sweep

lambdas = np.linspace(10, 500, 50)
for n in (256, 512):
    res = sweep(1.0, 1.0, lambdas, (0.4, 0.6), n, seed=0, workers=4)
    ratios = np.array([r.ratio for r in res])
    k = int(ratios.argmax())
    print(f"grid {n}^2: max ratio {ratios.max():.6f} at lambda {lambdas[k]:.1f}, median {np.median(ratios):.6f}")
