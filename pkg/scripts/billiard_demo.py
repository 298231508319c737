"""Orbit statistics on the disk, the Sinai table and the Bunimovich stadium."""

import math

import numpy as np

from qchaos import billiard as BL
from qchaos import geometry as G

disk = G.disk()
g = BL.separation_growth(disk, BL.state_from_boundary(disk, 0.0, 0.8), 1e-6, 100)
print(f"disk: {g.model} growth, slope {g.slope:.4e} (R2 {g.r2_linear:.6f})")

sinai = G.sinai()
g = BL.separation_growth(sinai, BL.BilliardState((0.0, 30.0), (0.0, 1.0)), 1e-9, 12)
print(f"Sinai: {g.model} growth, rate {g.rate:.3f} per obstacle hit (log 3 = {math.log(3):.3f})")

stadium = G.bunimovich(1.0)
s0 = BL.random_state(stadium, np.random.default_rng(1))
res = BL.birkhoff_average(stadium, s0, lambda p: (p[:, 0] < 0).astype(float), 2e4 * math.pi)
print(f"stadium: time share of the left half {res.value:.4f} over {res.collisions} collisions")
