import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special as sp

from qchaos import geometry as G
from qchaos.analytic_spectra import disk_eigenvalues, rectangle_eigenvalues
from qchaos.errors import BoxTooSmall, InsufficientData, InvalidParameter
from qchaos.spectral_stats import (SpectrumWindow, count_in, count_levels, phase_volume,
                                   poisson_cdf, quadratic_form, sho_level_count, sho_weyl_prediction,
                                   spacing_sample, spacing_test, unfold, weyl_fit, wigner_cdf,
                                   wigner_pdf)


def rect_window(a=1.0, b=1.0, lmax=1e4):
    lam, _ = rectangle_eigenvalues(a, b, "dirichlet", lmax)
    return SpectrumWindow(lam, G.rectangle(a, b).to_dict())


def disk_levels(lmax):
    return np.array([r[0] for r in disk_eigenvalues(lmax) for _ in range(r[3])])


# ---------------------------------------------------------------- windows and counting

def test_window_sorts_and_validates():
    w = SpectrumWindow([3.0, 1.0, 2.0], tension=[0.3, 0.1, 0.2])
    assert w.eigenvalues.tolist() == [1.0, 2.0, 3.0]
    assert w.tension.tolist() == [0.1, 0.2, 0.3]
    with pytest.raises(InvalidParameter):
        SpectrumWindow([1.0, -2.0])
    with pytest.raises(InvalidParameter):
        SpectrumWindow([1.0, float("nan")])


def test_window_round_trip():
    w = SpectrumWindow([1.0, 2.5], {"preset": "disk"}, (0.0, 3.0), "odd-odd", [1e-9, 2e-9],
                       {"B": 40}, None, None, (0.1, 0.2, 0.3))
    back = SpectrumWindow.from_dict(w.to_dict())
    assert back.to_dict() == w.to_dict()


def test_staircase_csv():
    lines = SpectrumWindow([1.0, 4.0]).staircase_csv().strip().split("\n")
    assert lines == ["lambda,N", "1.0,1", "4.0,2"]


def test_count_unit_square_below_20():
    assert count_levels(rect_window(lmax=100), 20.0) == 1


def test_count_empty():
    assert count_levels(SpectrumWindow([]), 10.0) == 0
    assert count_in([], 0, 1) == 0


def test_count_is_strict_and_count_in_inclusive():
    w = SpectrumWindow([1.0, 2.0, 2.0, 3.0])
    assert count_levels(w, 2.0) == 1
    assert count_in(w, 2.0, 3.0) == 3


def test_disk_count_against_scipy_zeros():
    ref = sum(1 if k == 0 else 2 for k in range(10) for z in sp.jn_zeros(k, 5) if z * z < 30)
    assert count_levels(disk_levels(60.0), 30.0) == ref


@given(st.lists(st.floats(0, 100), max_size=40), st.floats(0, 100), st.floats(0, 100))
def test_count_monotone(vals, a, b):
    lo, hi = sorted((a, b))
    assert count_levels(vals, lo) <= count_levels(vals, hi)
    assert count_in(vals, lo, hi) == count_levels(vals, np.nextafter(hi, np.inf)) - count_levels(vals, lo)


# ---------------------------------------------------------------- Weyl

def test_weyl_fit_unit_square():
    f = weyl_fit(rect_window(), G.rectangle())
    assert f.reference == pytest.approx(1 / (4 * math.pi))
    assert f.rel_error < 0.02
    assert f.c2 == pytest.approx(f.perimeter_reference, rel=0.1)


def test_weyl_fit_disk_500_levels():
    lev = disk_levels(2400.0)[:500]
    f = weyl_fit(lev, G.disk())
    assert len(lev) == 500
    assert f.c1 == pytest.approx(0.25, rel=0.03)


def test_weyl_fit_needs_levels():
    with pytest.raises(InsufficientData):
        weyl_fit(np.arange(1, 20.0))


def test_sho_1d_count():
    h = 0.01
    assert sho_level_count(1, h, 1.0) == 50
    assert sho_weyl_prediction(1, h, 1.0) == pytest.approx(1 / (2 * h))


def test_sho_1d_count_matches_phase_volume():
    h = 0.05
    vol = phase_volume(quadratic_form, [(-1.5, 1.5)] * 2, 0.0, 1.0, samples=200_000, seed=1)
    pred = vol.volume / (2 * math.pi * h)
    assert abs(sho_level_count(1, h) - pred) <= 0.05 * pred


# ---------------------------------------------------------------- phase volumes

def test_phase_volume_unit_disk():
    v = phase_volume(quadratic_form, [(-1.5, 1.5)] * 2, 0.0, 1.0, samples=400_000, seed=2)
    assert abs(v.volume - math.pi) <= 3 * v.se


def test_phase_volume_four_ball():
    b = 1.3
    v = phase_volume(quadratic_form, [(-1.6, 1.6)] * 4, 0.0, b, samples=400_000, seed=3)
    assert abs(v.volume - b * b * math.pi ** 2 / 2) <= 3 * v.se


def test_phase_volume_empty_shell():
    v = phase_volume(quadratic_form, [(-1, 1)] * 2, 5.0, 6.0, samples=100_000)
    assert v.volume == 0.0


def test_phase_volume_box_too_small():
    with pytest.raises(BoxTooSmall):
        phase_volume(quadratic_form, [(-0.8, 0.8)] * 2, 0.0, 1.0)


def test_phase_volume_validation():
    with pytest.raises(InvalidParameter):
        phase_volume(quadratic_form, [(-2, 2)] * 2, 0.0, 1.0, samples=1000)
    with pytest.raises(InvalidParameter):
        phase_volume(quadratic_form, [(2, -2)] * 2, 0.0, 1.0)


@given(st.floats(0.2, 1.5), st.floats(0.05, 0.8))
def test_phase_volume_nested(b1, gap):
    b2 = b1 + gap
    box = [(-1.6, 1.6)] * 2
    v1 = phase_volume(quadratic_form, box, 0.0, b1, samples=100_000, seed=5)
    v2 = phase_volume(quadratic_form, box, 0.0, b2, samples=100_000, seed=5)
    # common random numbers make the nested shells monotone sample by sample
    assert v2.volume >= v1.volume


# ---------------------------------------------------------------- reference laws

def test_wigner_normalised_with_unit_mean():
    mass, _ = integrate.quad(wigner_pdf, 0, np.inf)
    mean, _ = integrate.quad(lambda s: s * wigner_pdf(s), 0, np.inf)
    assert mass == pytest.approx(1.0, abs=1e-6) and mean == pytest.approx(1.0, abs=1e-6)


def test_cdfs_match_pdfs():
    s = np.linspace(0, 4, 9)
    assert np.allclose([integrate.quad(wigner_pdf, 0, v)[0] for v in s], wigner_cdf(s), atol=1e-10)
    assert np.allclose(poisson_cdf(s), 1 - np.exp(-s))


# ---------------------------------------------------------------- unfolding and spacing tests

def test_unfolded_rectangle_mean_spacing():
    lam, _ = rectangle_eigenvalues(1.0, math.pi / math.e, "dirichlet", 5e5)
    w = SpectrumWindow(lam[:5001])
    s = unfold(w, G.rectangle(1.0, math.pi / math.e))
    assert len(s.spacings) == 5000
    assert s.mean == pytest.approx(1.0, abs=0.02)
    assert np.all(np.diff(s.unfolded) >= 0)
    n = len(s.unfolded)
    i = np.arange(n // 2, n)
    assert np.max(np.abs(s.unfolded[i] - i) / i) < 0.05


def test_irrational_rectangle_is_poisson():
    lam, _ = rectangle_eigenvalues(1.0, math.pi / math.e, "dirichlet", 5e5)
    v = spacing_test(unfold(SpectrumWindow(lam[:5001])))
    assert v.ks_poisson < 0.05 and v.verdict == "poisson"


def test_synthetic_exponential_spacings():
    s = np.random.default_rng(11).exponential(size=5000)
    v = spacing_test(spacing_sample(s))
    assert v.ks_poisson < 0.03 and v.verdict == "poisson"


def test_synthetic_wigner_spacings():
    u = np.random.default_rng(12).uniform(size=3000)
    s = np.sqrt(-4 * np.log1p(-u) / math.pi)
    v = spacing_test(spacing_sample(s))
    assert v.ks_goe < 0.03 and v.verdict == "goe"


def test_spacing_test_needs_samples():
    with pytest.raises(InsufficientData):
        spacing_test(spacing_sample(np.ones(50)))


def test_inconclusive_when_close():
    # a law halfway between the two references
    rng = np.random.default_rng(0)
    s = np.where(rng.uniform(size=4000) < 0.5, rng.exponential(size=4000),
                 np.sqrt(-4 * np.log1p(-rng.uniform(size=4000)) / math.pi))
    v = spacing_test(spacing_sample(s))
    assert v.verdict == "inconclusive"


def test_ecdf_csv():
    text = spacing_sample([0.5, 1.5, 1.0] * 40).ecdf_csv().split("\n")
    assert text[0] == "s,ecdf" and text[-2].endswith(",1.0")


@given(st.lists(st.floats(1.0, 1e4), min_size=60, max_size=120, unique=True))
def test_unfold_monotone(vals):
    s = unfold(np.array(vals))
    fit = s.fit
    # c1 lambda + c2 sqrt(lambda) is monotone wherever its derivative is positive
    ev = np.sort(vals)
    deriv = fit.c1 + 0.5 * fit.c2 / np.sqrt(ev)
    mono = np.all(deriv > 0)
    if mono:
        assert np.all(np.diff(s.unfolded) >= -1e-9)
