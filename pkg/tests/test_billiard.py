import math

import numpy as np
import pytest

from qchaos import geometry as G
from qchaos.billiard import (BilliardState, birkhoff_average, random_state, reflect,
                             separation_growth, state_from_boundary, tangent_angle, trace,
                             trace_length)
from qchaos.errors import InvalidIncidence, InvalidParameter


def unfolded_impacts(p, d, a, b, n):
    """Impact points of a rectangle orbit from the straight line in the unfolded plane."""
    p, d = np.asarray(p, float), np.asarray(d, float)
    times = []
    for c, v, side in ((p[0], d[0], a), (p[1], d[1], b)):
        if v == 0:
            continue
        k = np.arange(-n - 2, n + 3) * side
        t = (k - c) / v
        times.append(t[t > 1e-12])
    t = np.sort(np.concatenate(times))[:n]
    q = p + t[:, None] * d

    def fold(u, L):
        m = np.mod(u, 2 * L)
        return np.where(m <= L, m, 2 * L - m)

    return np.c_[fold(q[:, 0], a), fold(q[:, 1], b)]


def test_reflect_head_on():
    assert reflect((0, -1), (0, 1)) == pytest.approx((0, 1))


def test_reflect_mirror():
    r = 1 / math.sqrt(2)
    assert reflect((r, -r), (0, 1)) == pytest.approx((r, r), abs=1e-15)


def test_reflect_outgoing_raises():
    with pytest.raises(InvalidIncidence):
        reflect((0, 1), (0, 1))
    with pytest.raises(InvalidIncidence):
        reflect((1, 0), (0, 1))


def test_disk_tangent_angle_preserved_on_reflection():
    d = G.disk()
    traj = trace(d, state_from_boundary(d, 0.3, 0.7), 20)
    assert all(abs(tangent_angle(d, r) - 0.7) < 1e-12 for r in traj)


def test_disk_fifth_impact():
    d = G.disk()
    alpha = math.pi / 3
    traj = trace(d, state_from_boundary(d, 0.0, alpha), 5)
    x, y = traj[4].point
    phi = math.atan2(y, x) % (2 * math.pi)
    want = (10 * math.pi / 3) % (2 * math.pi)
    assert abs((phi - want + math.pi) % (2 * math.pi) - math.pi) < 5e-9


@pytest.mark.parametrize("alpha", [0.1, 0.77, 1.3, 2.9])
def test_disk_angular_recursion(alpha):
    d = G.disk()
    traj = trace(d, state_from_boundary(d, 0.0, alpha), 200)
    for n, rec in enumerate(traj, start=1):
        phi = math.atan2(rec.point[1], rec.point[0])
        err = abs((phi - 2 * n * alpha + math.pi) % (2 * math.pi) - math.pi)
        assert err < 1e-9 * n


def test_disk_alpha_conserved_long_run():
    d = G.disk()
    alpha = 0.912345
    traj = trace(d, state_from_boundary(d, 0.0, alpha), 10_000)
    errs = [abs(tangent_angle(d, r) - alpha) for r in traj]
    assert max(errs) < 1e-10


def test_rectangle_vertical_orbit():
    d = G.rectangle(1, 1)
    traj = trace(d, BilliardState((0.5, 0.5), (0, 1)), 10)
    assert np.all(traj.points[:, 0] == 0.5)
    assert np.allclose(traj.points[::2, 1], 1.0) and np.allclose(traj.points[1::2, 1], 0.0)


@pytest.mark.parametrize("d", [G.rectangle(), G.disk(), G.bunimovich(), G.sinai()],
                         ids=lambda d: d.preset)
def test_cumulative_length_is_sum_of_chords(d, rng):
    traj = trace(d, random_state(d, rng), 300)
    chords = np.array([r.chord for r in traj])
    assert np.all(chords > 0)
    assert np.allclose(np.cumsum(chords), [r.cumlen for r in traj], rtol=1e-12)
    for r in traj:
        _, n = d.boundary_point_and_normal(r.s)
        assert reflect(r.d_in, n) == pytest.approx(r.d_out, abs=1e-12)


@pytest.mark.parametrize("start,direction", [((0.3, 0.2), (0.6, 0.8)),
                                             ((0.71, 0.13), (math.cos(1.1), math.sin(1.1))),
                                             ((0.5, 0.5), (math.cos(0.3), -math.sin(0.3)))])
def test_rectangle_matches_unfolded_line(start, direction):
    d = G.rectangle(1.0, 1.0)
    s0 = BilliardState(start, direction)
    traj = trace(d, s0, 60)
    oracle = unfolded_impacts(s0.position, s0.direction, 1.0, 1.0, 60)
    assert np.allclose(traj.points, oracle, atol=1e-9)


def test_rectangle_separation_bounded_linear():
    d = G.rectangle(1.0, 1.0)
    s0 = BilliardState((0.3, 0.2), (math.cos(0.9), math.sin(0.9)))
    eps = 1e-7
    c, s = math.cos(eps), math.sin(eps)
    dx, dy = s0.direction
    s1 = BilliardState(s0.position, (c * dx - s * dy, s * dx + c * dy))
    a = unfolded_impacts(s0.position, s0.direction, 1, 1, 40)
    b = unfolded_impacts(s1.position, s1.direction, 1, 1, 40)
    L = np.array([r.cumlen for r in trace(d, s0, 40)])
    sep = np.hypot(*(a - b).T)
    same = np.all(np.isclose(a, 0) == np.isclose(b, 0), axis=1)
    # displacement of the unfolded line is eps * length up to the incidence-angle factor
    bound = eps * L / min(abs(dx), abs(dy)) * 1.01
    assert np.all(sep[same] <= bound[same])
    g = separation_growth(d, s0, eps, 20)
    assert g.model == "linear"
    assert g.separations.max() < 1e-4


def test_disk_separation_slope():
    d = G.disk()
    eps = 1e-6
    g = separation_growth(d, state_from_boundary(d, 0.0, 0.8), eps, 100)
    assert g.model == "linear"
    assert g.slope == pytest.approx(2 * eps, rel=1e-6)
    assert g.r2_linear > 0.999
    assert np.allclose(g.separations, 2 * eps * g.collisions, rtol=1e-5)


def test_sinai_vertical_orbit_exponential():
    d = G.sinai(180, 30)
    eps = 1e-9
    g = separation_growth(d, BilliardState((0.0, 30.0), (0.0, 1.0)), eps, 12)
    n = g.collisions
    grow = g.separations > 3.0 ** n * eps
    assert len(n) >= 6 and grow.all()
    assert g.model == "exponential"
    assert g.rate > math.log(3)


def test_separation_growth_validation():
    d = G.disk()
    s = state_from_boundary(d, 0.0, 0.5)
    with pytest.raises(InvalidParameter):
        separation_growth(d, s, 0.0, 20)
    with pytest.raises(InvalidParameter):
        separation_growth(d, s, 1e-2, 20)
    with pytest.raises(InvalidParameter):
        separation_growth(d, s, 1e-6, 5)


def test_corner_terminates():
    d = G.rectangle(1, 1)
    traj = trace(d, BilliardState((0.5, 0.5), (1, 1)), 10)
    assert traj.corner and len(traj) == 1
    res = birkhoff_average(d, BilliardState((0.5, 0.5), (1, 1)), lambda p: np.ones(len(p)), 50.0)
    assert res.corner and res.value == pytest.approx(1.0)


def test_birkhoff_constant(rng):
    d = G.bunimovich()
    res = birkhoff_average(d, random_state(d, rng), lambda p: np.ones(len(p)), 500.0)
    assert res.value == pytest.approx(1.0, abs=1e-14)
    assert res.length == pytest.approx(500.0)


def test_birkhoff_left_half_bunimovich():
    d = G.bunimovich(1.0)
    s0 = random_state(d, np.random.default_rng(7))
    res = birkhoff_average(d, s0, lambda p: (p[:, 0] < 0).astype(float), 2 * math.pi * 1e4)
    assert not res.corner
    assert abs(res.value - 0.5) <= 0.05 * 0.5


def test_birkhoff_vertical_orbit_misses_strip():
    d = G.rectangle(1, 1)
    res = birkhoff_average(d, BilliardState((0.5, 0.5), (0, 1)),
                           lambda p: (p[:, 0] < 0.25).astype(float), 100.0)
    assert res.value == 0.0


def test_birkhoff_linear_observable_exact_on_chord():
    # one chord from (0.5,0.5) up to y=1: mean of y is 0.75
    d = G.rectangle(1, 1)
    res = birkhoff_average(d, BilliardState((0.5, 0.5), (0, 1)), lambda p: p[:, 1], 0.5)
    assert res.value == pytest.approx(0.75, abs=1e-14)


@pytest.mark.parametrize("d,n", [(G.disk(), 50), (G.rectangle(1.0, 0.8), 50), (G.bunimovich(), 20)],
                         ids=["disk", "rectangle", "bunimovich"])
def test_time_reversal(d, n, rng):
    fwd = trace(d, random_state(d, rng), n)
    last = fwd[n - 1]
    back = trace(d, BilliardState(last.point, (-last.d_in[0], -last.d_in[1])), n)
    for i in range(n - 1):
        assert np.allclose(back[i].point, fwd[n - 2 - i].point, atol=1e-6)


def test_trace_length_reaches_T(rng):
    d = G.disk()
    traj = trace_length(d, random_state(d, rng), 100.0)
    assert traj[-1].cumlen >= 100.0 > traj[-2].cumlen


def test_csv_columns():
    d = G.disk()
    text = trace(d, state_from_boundary(d, 0.0, 0.5), 3).to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "n,s,x,y,dx_out,dy_out,chord,cumlen"
    assert len(lines) == 4


def test_random_state_seeded():
    d = G.sinai()
    a = random_state(d, np.random.default_rng(1))
    b = random_state(d, np.random.default_rng(1))
    assert a == b and d.contains(a.position)
