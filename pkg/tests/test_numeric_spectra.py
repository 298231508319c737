import json
import math

import numpy as np
import pytest
from scipy import special as sp

from qchaos import geometry as G
from qchaos.analytic_spectra import disk_modes, rectangle_eigenvalues, rectangle_modes
from qchaos.errors import ConditioningError, InvalidParameter
from qchaos.numeric_spectra import (BasisSet, MPSConfig, MPSProblem, desymmetrize,
                                    eigenfunction_density, eigenfunction_raster, mps_solve,
                                    pairs_from_dict, sector_pair_on_stadium, tension_scan)

STADIUM = G.bunimovich(1.0)


@pytest.fixture(scope="module")
def stadium_window():
    return mps_solve(STADIUM, (100, 160), MPSConfig(sector="odd-odd"))


def relative_residual(pair, d):
    pts, _ = G.quadrature(d, 32)
    return pair.boundary_residual / np.max(np.abs(pair(pts)))


# ---------------------------------------------------------------- configuration

@pytest.mark.parametrize("kw", [dict(B=4), dict(B=100, M_b=150), dict(B=100, M_i=50),
                                dict(sector="odd"), dict(basis="chebyshev"), dict(scan_step=-1.0),
                                dict(polish="always"), dict(mfs_min_sources=4)])
def test_config_validation(kw):
    with pytest.raises(InvalidParameter):
        MPSConfig(**kw)


def test_sectors_need_a_stadium():
    with pytest.raises(InvalidParameter):
        MPSProblem(G.disk(), MPSConfig(sector="odd-odd"))


def test_multiply_connected_rejected():
    with pytest.raises(InvalidParameter):
        MPSProblem(G.sinai(), MPSConfig())


def test_bad_window():
    with pytest.raises(InvalidParameter):
        mps_solve(G.disk(), (6.0, 5.0))
    with pytest.raises(InvalidParameter):
        mps_solve(G.disk(), (0.0, 5.0))


def test_desymmetrize():
    q = desymmetrize(STADIUM)
    assert q.preset == "quarter_stadium" and q.area == pytest.approx(STADIUM.area / 4)
    assert desymmetrize(G.disk()).preset == "disk"


# ---------------------------------------------------------------- bases

def fd_helmholtz(bs, k, pts, step=1e-4):
    c = bs(k, pts)
    lap = -4 * c
    for v in ([step, 0], [-step, 0], [0, step], [0, -step]):
        lap = lap + bs(k, pts + np.array(v))
    return lap / step ** 2 + k * k * c


@pytest.mark.parametrize("bs", [BasisSet("fourier_bessel", 10, origin=(0.3, 0.2)),
                                BasisSet("plane_wave", 12),
                                BasisSet("plane_wave", 12, "odd-even"),
                                BasisSet("fundamental", 0, "even-odd",
                                         sources=[(3.0 + 0.1 * i, 1.9) for i in range(10)])],
                         ids=["fb", "pw", "pw-sector", "mfs"])
def test_basis_functions_solve_helmholtz(bs):
    pts = np.random.default_rng(0).uniform(0.1, 1.0, (15, 2))
    k = 4.3
    res = fd_helmholtz(bs, k, pts)
    assert np.max(np.abs(res)) < 1e-4 * k * k * max(1.0, np.max(np.abs(bs(k, pts))))


@pytest.mark.parametrize("sector", ["odd-odd", "even-even", "odd-even", "even-odd"])
def test_sector_parities(sector):
    bs = BasisSet("plane_wave", 9, sector)
    mfs = BasisSet("fundamental", 0, sector, sources=[(2.0, 2.0 + 0.1 * i) for i in range(9)])
    p = np.random.default_rng(1).uniform(0.1, 1.0, (6, 2))
    px = -1 if sector.split("-")[0] == "odd" else 1
    py = -1 if sector.split("-")[1] == "odd" else 1
    for b in (bs, mfs):
        v = b(3.1, p)
        assert np.allclose(b(3.1, p * [-1, 1]), px * v)
        assert np.allclose(b(3.1, p * [1, -1]), py * v)


def test_basis_size_rules():
    assert BasisSet("fourier_bessel", 10).size == 21
    assert BasisSet("plane_wave", 10).size == 20
    assert BasisSet("plane_wave", 10, "odd-odd").size == 10
    with pytest.raises(InvalidParameter):
        BasisSet("fourier_bessel", 10, "odd-odd")
    with pytest.raises(InvalidParameter):
        BasisSet("fundamental", 10)


# ---------------------------------------------------------------- oracle comparisons

def test_disk_ground_state():
    r = mps_solve(G.disk(), (5, 6))
    assert len(r.spectrum) == 1
    assert r.spectrum.eigenvalues[0] == pytest.approx(sp.jn_zeros(0, 1)[0] ** 2, rel=1e-6)
    assert len(r.curve.minima) == 1


def test_disk_empty_window():
    r = mps_solve(G.disk(), (5.9, 6.0))
    assert len(r.spectrum) == 0 and r.pairs == [] and not r.warning


def test_unit_square_ground_state():
    r = mps_solve(G.rectangle(), (19, 21))
    assert r.spectrum.eigenvalues.tolist() == pytest.approx([2 * math.pi ** 2], rel=1e-6)


def test_unit_square_double_eigenvalue():
    r = mps_solve(G.rectangle(), (48, 52))
    assert len(r.curve.minima) == 1 and r.curve.minima[0][2] == 2
    assert r.spectrum.eigenvalues == pytest.approx([5 * math.pi ** 2] * 2, rel=1e-6)


def test_rectangle_matches_lattice_one_to_one():
    d = G.rectangle(1.0, 0.7)
    r = mps_solve(d, (1, 300))
    ref, _ = rectangle_eigenvalues(1.0, 0.7, "dirichlet", 300)
    assert len(r.spectrum) == len(ref)
    assert np.max(np.abs(r.spectrum.eigenvalues - ref) / ref) < 1e-6


def test_exact_basis_modes_normalised_and_vanish_on_boundary():
    for d, window in ((G.disk(), (10, 60)), (G.rectangle(1.0, 0.8), (20, 120))):
        r = mps_solve(d, window)
        pts, w = G.quadrature(d, 64)
        for p in r.pairs:
            assert np.sum(w * p(pts) ** 2) == pytest.approx(1.0, abs=1e-6)
            assert relative_residual(p, d) <= 1e-4
            assert p.tension < r.problem.threshold


def test_degenerate_disk_modes_are_orthogonal():
    r = mps_solve(G.disk(), (14, 15.5))
    assert len(r.pairs) == 2
    pts, w = G.quadrature(G.disk(), 64)
    a, b = (p(pts) for p in r.pairs)
    assert abs(np.sum(w * a * b)) < 1e-5


def test_coarse_scan_raises_weyl_warning():
    r = tension_scan(G.disk(), (5, 120), MPSConfig(scan_step=1.5))
    found = sum(m[2] for m in r.minima)
    assert r.predicted > 1.2 * found and r.warning


def test_tension_floor_is_a_conditioning_error():
    class Flat:
        threshold = 1e-6

        def k_grid(self, a, b):
            return np.linspace(a, b, 10)

        def tension(self, k):
            return 1e-14

        def predicted_count(self, a, b):
            return 0.0
    with pytest.raises(ConditioningError):
        tension_scan(G.disk(), (5, 6), MPSConfig(), problem=Flat())


# ---------------------------------------------------------------- stadium

def test_stadium_window_follows_sector_weyl(stadium_window):
    r = stadium_window
    n = len(r.spectrum)
    assert n >= 18
    assert abs(n - r.curve.predicted) <= 0.1 * r.curve.predicted


def test_stadium_fifty_levels_follow_weyl():
    r = mps_solve(STADIUM, (100, 260), MPSConfig(sector="odd-odd", polish="off"))
    n = len(r.spectrum)
    assert n >= 45
    assert abs(n - r.curve.predicted) <= 0.1 * r.curve.predicted


def test_sectors_reassemble_full_spectrum():
    total = 0
    for sector in ("odd-odd", "even-even", "odd-even", "even-odd"):
        total += len(mps_solve(STADIUM, (1, 100), MPSConfig(sector=sector, polish="off")).spectrum)
    lam = 100.0
    full = STADIUM.area * lam / (4 * math.pi) - STADIUM.perimeter * math.sqrt(lam) / (4 * math.pi)
    assert total >= 100
    assert abs(total - full) <= 0.05 * full


def test_polished_stadium_modes(stadium_window):
    r = stadium_window
    q = r.problem.domain
    for p in r.pairs:
        assert p.basis.kind == "fundamental"
        assert relative_residual(p, q) <= 1e-4
        assert p.tension < r.problem.cfg.polish_threshold


def test_polishing_agrees_with_plane_waves(stadium_window):
    raw = mps_solve(STADIUM, (100, 160), MPSConfig(sector="odd-odd", polish="off"))
    a, b = raw.spectrum.eigenvalues, stadium_window.spectrum.eigenvalues
    assert len(a) == len(b)
    assert np.max(np.abs(a - b) / b) < 1e-4


def test_stadium_rasters_integrate_to_one(stadium_window):
    for p in stadium_window.pairs[:4]:
        full = eigenfunction_density(sector_pair_on_stadium(p), STADIUM, 256, 128)
        assert full.values.min() >= 0
        assert abs(full.values.sum() * full.cell_area - 1.0) < 0.02
        quarter = eigenfunction_density(p, stadium_window.problem.domain, 128, 128)
        assert abs(quarter.values.sum() * quarter.cell_area - 1.0) < 0.02


def test_mps_result_round_trip(stadium_window):
    data = json.loads(stadium_window.to_json())
    assert set(data) >= {"domain", "sector", "window", "eigenvalues", "tension", "cfg", "modes"}
    back = pairs_from_dict(stadium_window.problem.domain, data)
    pts = np.array([[0.3, 0.4], [1.0, 1.1], [2.0, 0.2]])
    for a, b in zip(stadium_window.pairs, back):
        assert np.allclose(a(pts), b(pts), atol=1e-12)


def test_plane_wave_round_trip():
    r = mps_solve(G.disk(), (5, 16))
    back = pairs_from_dict(r.problem.domain, json.loads(r.to_json()))
    pts = np.array([[0.1, 0.2], [-0.5, 0.3]])
    for a, b in zip(r.pairs, back):
        assert np.allclose(a(pts), b(pts), atol=1e-12)


# ---------------------------------------------------------------- rasters

def test_rectangle_ground_state_single_bump():
    d = G.rectangle()
    ras = eigenfunction_density(rectangle_modes(1, 1, "dirichlet", 1)[0], d, 64, 64)
    i, j = np.unravel_index(np.argmax(ras.values), ras.values.shape)
    assert {i, j} <= {31, 32}
    # unimodal along the central row and column
    row = ras.values[32]
    assert np.all(np.diff(row[:32]) >= 0) and np.all(np.diff(row[32:]) <= 0)
    assert abs(ras.values.sum() * ras.cell_area - 1) < 0.02


def test_disk_radial_nodal_circle():
    mode = [m for m in disk_modes(10) if m.index[:2] == (0, 2)][0]
    ras = eigenfunction_raster(mode, G.disk(), 401, 401)
    xs, _ = ras.centers()
    row = ras.values[200]
    right = xs > 0
    r, v = xs[right], row[right]
    inside = r < 1
    flips = np.nonzero(np.diff(np.sign(v[inside])) != 0)[0]
    assert len(flips) == 1
    ratio = sp.jn_zeros(0, 2)
    assert abs(r[inside][flips[0]] - ratio[0] / ratio[1]) <= 2 * (xs[1] - xs[0])


def test_raster_text_format():
    ras = eigenfunction_density(rectangle_modes(1, 1, "dirichlet", 1)[0], G.rectangle(), 4, 3)
    lines = ras.to_text().strip().split("\n")
    assert json.loads(lines[0]) == {"nx": 4, "ny": 3, "bbox": [0.0, 0.0, 1.0, 1.0]}
    assert len(lines) == 4 and all(len(l.split(",")) == 4 for l in lines[1:])


def test_raster_zero_outside_domain():
    ras = eigenfunction_raster(disk_modes(1)[0], G.disk(), 32, 32)
    assert ras.values[0, 0] == 0.0 and ras.values[16, 16] > 0
