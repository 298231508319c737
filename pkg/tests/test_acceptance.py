"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line with its measurements and then
asserts.  Tolerances and runtime limits are pinned in ``LIMITS`` and the
constants next to each test.  Run with ``pytest tests/test_acceptance.py -s``
or read the lines in the captured output.
"""

import math
import time

import numpy as np
import pytest
from scipy import special as sp

from qchaos import billiard as BL
from qchaos import geometry as G
from qchaos import numeric_spectra as NS
from qchaos import qe_diagnostics as QE
from qchaos import quantization as Q
from qchaos import spectral_stats as SS
from qchaos.analytic_spectra import rectangle_eigenvalues
from qchaos.cli import garding_symbols, stadium_windows

pytestmark = pytest.mark.acceptance

# criterion -> runtime limit in seconds
LIMITS = {1: 5, 2: 10, 3: 60, 4: 5, 5: 10, 6: 5, 7: 30, 8: 2, 9: 120, 10: 30, 11: 600, 12: 900}


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, elapsed: float, detail: str) -> None:
        within = elapsed < LIMITS[n]
        verdict = "PASS" if ok and within else "FAIL"
        line = f"{verdict} criterion {n:2d} ({elapsed:.1f}s / {LIMITS[n]}s): {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert within, f"criterion {n} took {elapsed:.1f}s, limit {LIMITS[n]}s"
        assert ok, line
    return emit


def test_c01_weyl_rectangle(report):
    t0 = time.perf_counter()
    lam, _ = rectangle_eigenvalues(1.0, 1.0, "dirichlet", 1e4)
    fit = SS.weyl_fit(lam, G.rectangle())
    ref = 1 / (4 * math.pi)
    err = abs(fit.c1 - ref) / ref
    report(1, err <= 0.02, time.perf_counter() - t0,
           f"{len(lam)} levels, c1 = {fit.c1:.6f} vs 1/4pi = {ref:.6f} (rel {err:.2e}, tol 2e-2)")


def test_c02_weyl_oscillator(report):
    t0 = time.perf_counter()
    rows, ok = [], True
    for h in (0.05, 0.02, 0.01):
        n1 = SS.sho_level_count(1, h)
        p1 = SS.sho_weyl_prediction(1, h)
        e1 = abs(n1 - p1) / p1
        vol = SS.phase_volume(SS.quadratic_form, [(-1.25, 1.25)] * 4, 0.0, 1.0,
                              samples=400_000, seed=1).volume
        n2 = SS.sho_level_count(2, h)
        p2 = vol / (2 * math.pi * h) ** 2
        e2 = abs(n2 - p2) / p2
        ok &= e1 <= 0.02 and e2 <= 0.05
        rows.append(f"h={h}: 1-D {n1}/{p1:.1f} ({e1:.1%}), 2-D {n2}/{p2:.1f} ({e2:.1%})")
    report(2, ok, time.perf_counter() - t0, "; ".join(rows) + " (tol 2% / 5%)")


def test_c03_mps_disk_oracle(report):
    t0 = time.perf_counter()
    res = NS.mps_solve(G.disk(), (5.0, 120.0))
    elapsed = time.perf_counter() - t0
    ref = []
    for k in range(12):
        for z in sp.jn_zeros(k, 6):
            if 5.0 <= z * z <= 120.0:
                ref += [z * z] * (1 if k == 0 else 2)
    ref = np.sort(ref)
    got = res.spectrum.eigenvalues
    same = len(got) == len(ref)
    err = float(np.max(np.abs(got - ref) / ref)) if same else float("inf")
    report(3, same and err <= 1e-6, elapsed,
           f"{len(got)} eigenvalues vs {len(ref)} Bessel zeros, max rel error {err:.2e} (tol 1e-6)")


def test_c04_instability_dichotomy(report):
    t0 = time.perf_counter()
    eps = 1e-6
    disk = G.disk()
    g = BL.separation_growth(disk, BL.state_from_boundary(disk, 0.0, 0.8), eps, 100)
    slope_err = abs(g.slope - 2 * eps) / (2 * eps)
    sinai = G.sinai(180, 30)
    e0 = 1e-9
    s = BL.separation_growth(sinai, BL.BilliardState((0.0, 30.0), (0.0, 1.0)), e0, 12)
    first = s.collisions <= 6
    beats = bool(np.all(s.separations[first] > 3.0 ** s.collisions[first] * e0))
    ok = g.r2_linear > 0.999 and slope_err < 1e-3 and int(first.sum()) == 6 and beats
    report(4, ok, time.perf_counter() - t0,
           f"disk R2 {g.r2_linear:.6f}, slope {g.slope:.4e} vs 2eps {2 * eps:.1e}; "
           f"Sinai ratios to 3^n eps0 for n<=6: "
           + ", ".join(f"{v:.1f}" for v in s.separations[first] / (3.0 ** s.collisions[first] * e0)))


def test_c05_birkhoff(report):
    t0 = time.perf_counter()
    d = G.bunimovich(1.0)
    a, r = d.params["half_width"], d.params["radius"]
    regions = {
        "left half": lambda p: (p[:, 0] < 0).astype(float),
        "upper right": lambda p: ((p[:, 0] > 0) & (p[:, 1] > 0)).astype(float),
        "rectangle part": QE.indicator_box(-a, -r, a, r),
        "central disk": QE.indicator_disk((0.0, 0.0), 0.8),
    }
    nodes, w = G.quadrature(d, 96)
    s0 = BL.random_state(d, np.random.default_rng(2024))
    T = 1e4 * 2 * (a + r)
    traj = BL.trace_length(d, s0, T)
    rows, ok = [], not traj.corner
    for name, f in regions.items():
        frac = float(np.sum(w * f(nodes))) / d.area
        val = BL.birkhoff_average(d, s0, f, T).value
        rel = abs(val - frac) / frac
        ok &= rel <= 0.05
        rows.append(f"{name} {val:.4f}/{frac:.4f} ({rel:.1%})")
    report(5, ok, time.perf_counter() - t0,
           f"{len(traj)} collisions; " + "; ".join(rows) + " (tol 5%)")


def test_c06_quantization_identities(report):
    t0 = time.perf_counter()
    g = Q.GridSpec(256, 12.0, 0.1)
    tdef = 0.0
    for a in (Q.x_symbol(np.cos, lambda x: -np.sin(x)),
              Q.x_symbol(lambda x: np.exp(-x * x), lambda x: -2 * x * np.exp(-x * x))):
        mats = [Q.quantize(a, g, t).matrix for t in (0.0, 0.25, 0.5, 1.0)]
        tdef = max(tdef, max(float(np.max(np.abs(m - mats[0]))) for m in mats))
    herm = max(Q.quantize(s, g).hermitian_defect()
               for s in (Q.gaussian_symbol(0.3, -0.2, 1.0, 1.0),
                         Q.gaussian_symbol(-1.0, 0.5, 0.7, 1.0, amp=2.0)))
    ccr = Q.canonical_commutator_defect(g)
    ok = tdef <= 1e-10 and herm <= 1e-10 and ccr <= 1e-8
    report(6, ok, time.perf_counter() - t0,
           f"t-dependence {tdef:.1e}, hermitian defect {herm:.1e} (tol 1e-10), "
           f"[X,P]-ih {ccr:.1e} (tol 1e-8)")


def test_c07_moyal_order(report):
    t0 = time.perf_counter()
    hs = (0.2, 0.1, 0.05)
    pairs = [(Q.gaussian_symbol(0.0, 0.0, 1.5, 1.2), Q.gaussian_symbol(0.5, -0.3, 1.5, 1.2)),
             (Q.gaussian_symbol(0.0, 0.0, 2.0, 1.2), Q.gaussian_symbol(0.5, 0.3, 1.5, 1.2))]
    grids = [Q.GridSpec(int(128 * 0.2 / h), 12.0, h) for h in hs]
    assert max(g.N for g in grids) <= 512
    slopes = [Q.moyal_order(a, b, grids).slope for a, b in pairs]
    ok = all(1.6 <= s <= 2.4 for s in slopes)
    report(7, ok, time.perf_counter() - t0,
           "first-remainder slopes " + ", ".join(f"{s:.3f}" for s in slopes) + " (range 1.6-2.4)")


def test_c08_uncertainty(report):
    t0 = time.perf_counter()
    g = Q.GridSpec(512, 40.0, 1.0)
    ratios = [Q.uncertainty_check(Q.gaussian_state(g, 0.0, 0.0, w), g).ratio
              for w in (0.5, 1.0, 2.0)]
    chirp = Q.gaussian_state(g) * np.exp(1j * g.x ** 3 / 10)
    cr = Q.uncertainty_check(chirp, g).ratio
    ok = all(abs(r - 1) <= 1e-3 for r in ratios) and cr > 1.05
    report(8, ok, time.perf_counter() - t0,
           "Gaussian ratios " + ", ".join(f"{r:.6f}" for r in ratios)
           + f" (tol 1e-3), chirp {cr:.3f} (> 1.05)")


def test_c09_egorov(report):
    t0 = time.perf_counter()
    hs = (0.2, 0.1, 0.05)
    grids = [Q.GridSpec(int(round(256 * 0.2 / h)), 4 * math.pi, h) for h in hs]
    rep = Q.egorov_check(Q.gaussian_symbol(0.0, 0.0, 1.0, 1.0), np.cos,
                         lambda x: -np.sin(x), grids, 1.0)
    report(9, rep.slope >= 0.8, time.perf_counter() - t0,
           f"N = {[g.N for g in grids]}, errors " + ", ".join(f"{e:.2e}" for e in rep.errors)
           + f", slope {rep.slope:.3f} (>= 0.8)")


def test_c10_garding(report):
    t0 = time.perf_counter()
    hs = (0.2, 0.1, 0.05)
    grids = [Q.GridSpec(int(128 * 0.2 / h), 4 * math.pi, h) for h in hs]
    rows, ok = [], True
    for name, sym in garding_symbols().items():
        r = Q.garding_check(sym, grids, 1.0)
        ok &= r.min_eigenvalues[-1] >= 0.9 and r.nondecreasing
        rows.append(f"{name}: " + ", ".join(f"{m:.5f}" for m in r.min_eigenvalues))
    report(10, ok, time.perf_counter() - t0,
           "; ".join(rows) + " (h = 0.2, 0.1, 0.05; >= 0.9 and nondecreasing)")


def test_c11_spacing(report):
    t0 = time.perf_counter()
    b = math.pi / math.e
    lam, _ = rectangle_eigenvalues(1.0, b, "dirichlet", 4 * math.pi * 5600 / b)
    rect = SS.spacing_test(SS.unfold(lam[:5000], G.rectangle(1.0, b)))
    res = NS.mps_solve(G.bunimovich(1.0), (1.0, 720.0), NS.MPSConfig(sector="odd-odd"))
    fit = SS.weyl_fit(res.spectrum, area=res.problem.domain.area,
                      perimeter=res.problem.weyl_perimeter)
    stad = SS.spacing_test(SS.unfold(res.spectrum, fit=fit))
    n = len(res.spectrum)
    ok = rect.ks_poisson < 0.05 and n >= 200 and stad.ks_goe < stad.ks_poisson
    report(11, ok, time.perf_counter() - t0,
           f"rectangle KS to e^-s {rect.ks_poisson:.4f} (< 0.05); stadium {n} levels, "
           f"KS GOE {stad.ks_goe:.4f} vs Poisson {stad.ks_poisson:.4f}")


QE_STARTS = (50.0, 250.0, 1250.0)
QE_MODES = 50


def test_c12_qe_and_bouncing_balls(report):
    t0 = time.perf_counter()
    d = G.bunimovich(1.0)
    cfg = NS.MPSConfig(sector="odd-odd")
    windows = stadium_windows(d, QE_STARTS, QE_MODES, cfg)
    q = windows[0].problem.domain
    quad = G.quadrature(q, 96)
    rect, frac = QE.stadium_rect(q)
    A = QE.ObservableSpec(QE.indicator_box(*rect), alpha=frac, name="rectangle part")
    reps = [QE.qe_variance(A, w.pairs[:QE_MODES], quad) for w in windows]
    eps = [r.eps for r in reps]
    full_rect, full_frac = QE.stadium_rect(d)
    best = None
    for w in windows:
        for p in w.pairs[:QE_MODES]:
            ras = NS.eigenfunction_raster(NS.sector_pair_on_stadium(p), d, 128, 64)
            sc = QE.bouncing_ball_score(ras, full_rect, full_frac)
            if sc.flagged and (best is None or sc.concentration > best[1].concentration):
                best = (p.eigenvalue, sc)
    drop = 1 - eps[-1] / eps[0]
    dens = reps[-1].split.density
    flag_ok = best is not None and best[1].concentration > 0.5
    ok = drop >= 0.4 and dens >= 0.9 and flag_ok
    flag_txt = (f"flagged mode lambda={best[0]:.3f} concentration {best[1].concentration:.3f}"
                if best else "no flagged mode")
    report(12, ok, time.perf_counter() - t0,
           "eps " + ", ".join(f"{e:.4f}" for e in eps)
           + f" (drop {drop:.1%}, need 40%); top-window density {dens:.3f} (>= 0.9); "
           + flag_txt)
