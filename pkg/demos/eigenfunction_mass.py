"""How much of each Laplace eigenfunction sits near the corners.

Computes the first 60 Dirichlet eigenfunctions on the square and the L-shape
and prints the smallest mass found within eps = 0.25 of the vertices.

Run: python demos/eigenfunction_mass.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from flatbilliards import control_constant, corpus
from flatbilliards.reports import svg_scatter, write_atomic

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
for name in ("square", "l_shape"):
    p = corpus.get(name, exact=False)
    rep = control_constant(p, 0.25, "dirichlet", 60, 0.03)
    print(f"{name}: c_hat = {rep.c_hat:.5f} at eigenpair {rep.argmin + 1}, "
          f"lambda range {np.sqrt(rep.lambdas[0]):.2f}..{np.sqrt(rep.lambdas[-1]):.2f}, "
          f"{rep.n_vertices} mesh vertices")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_atomic(str(out / f"{name}_mass.svg"),
                     svg_scatter(np.sqrt(rep.lambdas), rep.ratios, "lambda", "mass ratio", {"eps": 0.25}, logy=True))
