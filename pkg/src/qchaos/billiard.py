"""Billiard flow: specular reflection, trajectory tracing, separation growth and time averages."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import BoundaryMissed, InvalidIncidence, InvalidParameter
from .geometry import Domain

HIT_TMIN = 1e-12
CORNER_TOL = 1e-10


@dataclass(frozen=True)
class BilliardState:
    position: tuple[float, float]
    direction: tuple[float, float]

    def __post_init__(self):
        px, py = map(float, self.position)
        dx, dy = map(float, self.direction)
        n = math.hypot(dx, dy)
        if not n > 0:
            raise InvalidParameter("direction must be non-zero")
        if abs(n - 1.0) > 1e-12:
            dx, dy = dx / n, dy / n
        object.__setattr__(self, "position", (px, py))
        object.__setattr__(self, "direction", (dx, dy))


@dataclass(frozen=True)
class CollisionRecord:
    n: int
    s: float
    point: tuple[float, float]
    d_in: tuple[float, float]
    d_out: tuple[float, float]
    chord: float
    cumlen: float
    piece: int


@dataclass
class Trajectory:
    """Collision records of one orbit; ``corner`` is set when a corner stopped it early."""

    start: BilliardState
    records: list[CollisionRecord] = field(default_factory=list)
    corner: bool = False

    def __len__(self):
        return len(self.records)

    def __iter__(self) -> Iterator[CollisionRecord]:
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def points(self) -> np.ndarray:
        return np.array([r.point for r in self.records]).reshape(-1, 2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "s", "x", "y", "dx_out", "dy_out", "chord", "cumlen"])
        for r in self.records:
            w.writerow([r.n, repr(r.s), repr(r.point[0]), repr(r.point[1]),
                        repr(r.d_out[0]), repr(r.d_out[1]), repr(r.chord), repr(r.cumlen)])
        return buf.getvalue()


def reflect(direction, normal) -> tuple[float, float]:
    """Specular reflection ``d - 2 <d, n> n`` of an incoming direction off a wall with inward normal ``n``."""
    dx, dy = float(direction[0]), float(direction[1])
    nx, ny = float(normal[0]), float(normal[1])
    dot = dx * nx + dy * ny
    if dot >= 0.0:
        raise InvalidIncidence(f"direction {direction} is not incoming for normal {normal}")
    rx, ry = dx - 2.0 * dot * nx, dy - 2.0 * dot * ny
    r = math.hypot(rx, ry)
    return (rx / r, ry / r)


def state_from_boundary(d: Domain, s: float, alpha: float) -> BilliardState:
    """Start on the boundary at arclength ``s`` heading inward at angle ``alpha`` to the tangent."""
    i, u = d.locate(s)
    p = d.pieces[i]
    tx, ty = p.tangent(u)
    nx, ny = p.normal(u)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return BilliardState(p.point(u), (ca * tx + sa * nx, ca * ty + sa * ny))


def random_state(d: Domain, rng: np.random.Generator) -> BilliardState:
    pos = d.sample_interior(1, rng)[0]
    th = rng.uniform(0.0, 2 * math.pi)
    return BilliardState((pos[0], pos[1]), (math.cos(th), math.sin(th)))


def _next_hit(d: Domain, px, py, dx, dy):
    best = None
    tmin = HIT_TMIN * max(1.0, d.scale)
    for i, piece in enumerate(d.pieces):
        for t, u in piece.ray_hits(px, py, dx, dy, tmin):
            if best is None or t < best[0]:
                best = (t, i, u)
    return best


def _at_corner(d: Domain, x, y) -> bool:
    for cx, cy in d.corners:
        if abs(x - cx) <= CORNER_TOL and abs(y - cy) <= CORNER_TOL:
            return True
    return False


def iterate(d: Domain, s0: BilliardState):
    """Yield ``(record, corner_hit)`` for successive impacts; stops after a corner."""
    px, py = s0.position
    dx, dy = s0.direction
    cum = 0.0
    n = 0
    while True:
        hit = _next_hit(d, px, py, dx, dy)
        if hit is None:
            raise BoundaryMissed(f"no boundary intersection from {(px, py)} along {(dx, dy)}")
        t, i, u = hit
        piece = d.pieces[i]
        x, y = piece.point(u)
        chord = math.hypot(x - px, y - py)
        cum += chord
        n += 1
        if _at_corner(d, x, y):
            yield CollisionRecord(n, d.piece_start(i) + u, (x, y), (dx, dy), (dx, dy), chord, cum, i), True
            return
        nx, ny = piece.normal(u)
        dot = dx * nx + dy * ny
        if dot >= 0.0:
            # grazing roundoff: treat as tangential touch and continue straight
            out = (dx, dy)
        else:
            out = reflect((dx, dy), (nx, ny))
        yield CollisionRecord(n, d.piece_start(i) + u, (x, y), (dx, dy), out, chord, cum, i), False
        px, py = x, y
        dx, dy = out


def trace(d: Domain, s0: BilliardState, n_collisions: int) -> Trajectory:
    if n_collisions < 1:
        raise InvalidParameter("n_collisions must be >= 1")
    traj = Trajectory(s0)
    for rec, corner in iterate(d, s0):
        traj.records.append(rec)
        if corner:
            traj.corner = True
            break
        if len(traj.records) >= n_collisions:
            break
    return traj


def trace_length(d: Domain, s0: BilliardState, T: float) -> Trajectory:
    """Trace until the cumulative path length reaches ``T``."""
    traj = Trajectory(s0)
    for rec, corner in iterate(d, s0):
        traj.records.append(rec)
        if corner:
            traj.corner = True
            break
        if rec.cumlen >= T:
            break
    return traj


def tangent_angle(d: Domain, rec: CollisionRecord) -> float:
    """Angle between the outgoing direction and the boundary tangent at the impact."""
    i = rec.piece
    u = rec.s - d.piece_start(i)
    tx, ty = d.pieces[i].tangent(u)
    c = abs(rec.d_out[0] * tx + rec.d_out[1] * ty)
    return math.acos(min(1.0, c))


# ---------------------------------------------------------------- separation growth

@dataclass
class GrowthFit:
    collisions: np.ndarray
    separations: np.ndarray
    model: str
    slope: float
    intercept: float
    rate: float
    r2_linear: float
    r2_exponential: float
    aic_linear: float
    aic_exponential: float
    saturated_at: int | None
    partial: bool


def _boundary_coordinate(d: Domain, rec: CollisionRecord) -> tuple[int, float]:
    piece = d.pieces[rec.piece]
    if piece.kind == "arc":
        return rec.piece, math.atan2(rec.point[1] - piece.center[1], rec.point[0] - piece.center[0])
    return rec.piece, rec.s


def _fit(n, y):
    A = np.c_[n, np.ones_like(n)]
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res_lin = y - A @ coef
    ly = np.log(y)
    ecoef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    res_exp = y - np.exp(A @ ecoef)
    tss = np.sum((y - y.mean()) ** 2)
    m = len(y)

    def aic(res):
        rss = max(float(np.sum(res ** 2)), 1e-300)
        return m * math.log(rss / m) + 4

    r2 = lambda res: 1.0 - float(np.sum(res ** 2)) / tss if tss > 0 else 1.0
    return coef, ecoef, r2(res_lin), r2(res_exp), aic(res_lin), aic(res_exp)


def separation_growth(d: Domain, s0: BilliardState, eps: float, N: int,
                      saturation: float = 0.1) -> GrowthFit:
    """Track how an angular perturbation ``eps`` of the launch direction spreads.

    Separations are boundary-coordinate distances between the two orbits at
    matching collisions: polar angle about the arc centre on arcs, arclength on
    segments.  On domains with arcs only arc collisions are tracked (the
    circle for the disk, the obstacle for Sinai).  Tracking stops once the two
    orbits hit different pieces or the separation exceeds ``saturation``.
    """
    if not 0 < eps <= 1e-3:
        raise InvalidParameter("eps must lie in (0, 1e-3]")
    if N < 10:
        raise InvalidParameter("N must be >= 10")
    c, s = math.cos(eps), math.sin(eps)
    dx, dy = s0.direction
    s1 = BilliardState(s0.position, (c * dx - s * dy, s * dx + c * dy))
    has_arcs = any(p.kind == "arc" for p in d.pieces)
    ns, seps = [], []
    saturated = None
    partial = False
    it0, it1 = iterate(d, s0), iterate(d, s1)
    count = 0
    tracked = 0
    while tracked < N:
        try:
            (r0, c0), (r1, c1) = next(it0), next(it1)
        except StopIteration:
            partial = True
            break
        count += 1
        if r0.piece != r1.piece:
            saturated = count
            break
        if has_arcs and d.pieces[r0.piece].kind != "arc":
            if c0 or c1:
                partial = True
                break
            continue
        _, a = _boundary_coordinate(d, r0)
        _, b = _boundary_coordinate(d, r1)
        diff = b - a
        if d.pieces[r0.piece].kind == "arc":
            diff = (diff + math.pi) % (2 * math.pi) - math.pi
        tracked += 1
        ns.append(tracked)
        seps.append(abs(diff))
        if abs(diff) > saturation:
            saturated = count
            break
        if c0 or c1:
            partial = True
            break
    n = np.asarray(ns, dtype=float)
    y = np.asarray(seps, dtype=float)
    if len(y) < 3 or np.any(y <= 0):
        pos = y > 0
        n, y = n[pos], y[pos]
    if len(y) < 3:
        raise InvalidParameter("too few tracked collisions to fit a growth model")
    coef, ecoef, r2l, r2e, al, ae = _fit(n, y)
    model = "linear" if al <= ae else "exponential"
    return GrowthFit(n, y, model, float(coef[0]), float(coef[1]), float(ecoef[0]),
                     r2l, r2e, al, ae, saturated, partial or len(ns) < N)


# ---------------------------------------------------------------- time averages

@dataclass
class BirkhoffResult:
    value: float
    length: float
    collisions: int
    corner: bool


_GL8 = np.polynomial.legendre.leggauss(8)


def birkhoff_average(d: Domain, s0: BilliardState, f: Callable[[np.ndarray], np.ndarray],
                     T: float) -> BirkhoffResult:
    """Time average ``(1/T) int_0^T f(x(t)) dt`` with 8-point Gauss-Legendre per chord."""
    if not T > 0:
        raise InvalidParameter("path length T must be positive")
    traj = trace_length(d, s0, T)
    starts = np.array([s0.position] + [r.point for r in traj.records[:-1]])
    dirs = np.array([r.d_in for r in traj.records])
    lengths = np.array([r.chord for r in traj.records])
    total = float(lengths.sum())
    if total > T:
        lengths[-1] -= total - T
        total = T
    x, w = _GL8
    frac = 0.5 * (x + 1.0)
    pts = starts[:, None, :] + (lengths[:, None, None] * frac[None, :, None]) * dirs[:, None, :]
    vals = np.asarray(f(pts.reshape(-1, 2)), dtype=float).reshape(len(lengths), 8)
    integral = float(np.sum(vals @ (0.5 * w) * lengths))
    return BirkhoffResult(integral / total, total, len(traj), traj.corner)
