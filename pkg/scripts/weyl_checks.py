"""Level counts against Weyl predictions for the rectangle, the disk and the oscillator."""

import math

from qchaos import geometry as G
from qchaos import spectral_stats as SS
from qchaos.analytic_spectra import disk_eigenvalues, rectangle_eigenvalues

lam, _ = rectangle_eigenvalues(1.0, 1.0, "dirichlet", 1e4)
fit = SS.weyl_fit(lam, G.rectangle())
print(f"unit square: c1 {fit.c1:.6f} (1/4pi {1 / (4 * math.pi):.6f}), c2 {fit.c2:.4f} "
      f"(-L/4pi {fit.perimeter_reference:.4f})")

rows = disk_eigenvalues(4000.0)
lam = sorted(r[0] for r in rows for _ in range(r[3]))
fit = SS.weyl_fit(lam, G.disk())
print(f"unit disk:   c1 {fit.c1:.6f} (1/4 {0.25:.6f}), c2 {fit.c2:.4f} "
      f"(-L/4pi {fit.perimeter_reference:.4f})")

for h in (0.05, 0.02, 0.01):
    vol = SS.phase_volume(SS.quadratic_form, [(-1.25, 1.25)] * 4, 0.0, 1.0, samples=400_000).volume
    print(f"h={h}: 1-D {SS.sho_level_count(1, h)} vs {SS.sho_weyl_prediction(1, h):.1f}, "
          f"2-D {SS.sho_level_count(2, h)} vs {vol / (2 * math.pi * h) ** 2:.1f}")
