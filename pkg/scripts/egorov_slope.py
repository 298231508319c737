"""Egorov error against h for V = cos x, plus the exactly solvable free case."""

import math

import numpy as np

from qchaos import quantization as Q

a = Q.gaussian_symbol(0.0, 0.0, 1.0, 1.0)
hs = (0.2, 0.1, 0.05)
grids = [Q.GridSpec(int(round(256 * 0.2 / h)), 4 * math.pi, h) for h in hs]
for name, V, dV in (("cos", np.cos, lambda x: -np.sin(x)),
                    ("zero", np.zeros_like, np.zeros_like)):
    rep = Q.egorov_check(a, V, dV, grids, 1.0)
    errs = ", ".join(f"{e:.3e}" for e in rep.errors)
    print(f"V={name}: errors {errs}; slope {rep.slope:.3f}")
