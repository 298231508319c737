"""Planar domains bounded by closed chains of line segments and circular arcs.

A :class:`Domain` is a list of closed loops. The first loop is the outer
boundary, traversed counterclockwise; further loops are obstacles traversed
clockwise, so that the left-hand normal of every piece points into the region.
Arclength ``s`` runs over all loops in order.
"""

from __future__ import annotations

import inspect
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence, Union

import numpy as np

from .errors import InvalidGeometry, InvalidParameter, OutOfRange

CLOSURE_TOL = 1e-12
BOUNDARY_TOL = 1e-12
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Segment:
    p0: tuple[float, float]
    p1: tuple[float, float]

    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "p0", (float(self.p0[0]), float(self.p0[1])))
        object.__setattr__(self, "p1", (float(self.p1[0]), float(self.p1[1])))
        if self.length <= 0:
            raise InvalidGeometry("segment has zero length")

    @cached_property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    @property
    def start(self):
        return self.p0

    @property
    def end(self):
        return self.p1

    def point(self, u: float) -> tuple[float, float]:
        f = u / self.length
        return (self.p0[0] + f * (self.p1[0] - self.p0[0]),
                self.p0[1] + f * (self.p1[1] - self.p0[1]))

    def tangent(self, u: float = 0.0) -> tuple[float, float]:
        L = self.length
        return ((self.p1[0] - self.p0[0]) / L, (self.p1[1] - self.p0[1]) / L)

    def normal(self, u: float = 0.0) -> tuple[float, float]:
        tx, ty = self.tangent(u)
        return (-ty, tx)

    def reversed(self) -> "Segment":
        return Segment(self.p1, self.p0)

    def ray_hits(self, px, py, dx, dy, tmin):
        """Forward intersections ``(t, u)`` of the ray ``p + t d`` with ``t > tmin``."""
        ex, ey = self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]
        den = dx * ey - dy * ex
        if den == 0.0:
            return []
        wx, wy = self.p0[0] - px, self.p0[1] - py
        t = (wx * ey - wy * ex) / den
        f = (wx * dy - wy * dx) / den
        if t <= tmin or f < -1e-12 or f > 1.0 + 1e-12:
            return []
        return [(t, min(max(f, 0.0), 1.0) * self.length)]

    def snap(self, x, y, u):
        return self.point(u)

    def distance(self, q: np.ndarray) -> np.ndarray:
        a = np.asarray(self.p0)
        e = np.asarray(self.p1) - a
        f = np.clip(((q - a) @ e) / (e @ e), 0.0, 1.0)
        return np.hypot(*(q - a - f[:, None] * e).T)

    def crossings(self, q: np.ndarray) -> np.ndarray:
        (x0, y0), (x1, y1) = self.p0, self.p1
        qx, qy = q[:, 0], q[:, 1]
        span = ((y0 <= qy) & (qy < y1)) | ((y1 <= qy) & (qy < y0))
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x0 + (qy - y0) * (x1 - x0) / (y1 - y0)
        return span & (xi > qx)

    def polyline(self, n: int = 2) -> np.ndarray:
        f = np.linspace(0.0, 1.0, n)[:, None]
        return np.asarray(self.p0) + f * (np.asarray(self.p1) - np.asarray(self.p0))

    def signed_area_term(self) -> float:
        (x0, y0), (x1, y1) = self.p0, self.p1
        return 0.5 * (x0 * y1 - x1 * y0)

    def to_dict(self) -> dict:
        return {"kind": "segment", "p0": list(self.p0), "p1": list(self.p1)}


@dataclass(frozen=True)
class Arc:
    """Circular arc starting at angle ``start`` and sweeping ``sweep`` radians.

    ``sweep > 0`` is counterclockwise; ``0 < |sweep| <= 2*pi``.
    """

    center: tuple[float, float]
    radius: float
    start_angle: float
    sweep: float

    kind = "arc"

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise InvalidGeometry("arc radius must be positive")
        if not 0 < abs(self.sweep) <= TWO_PI + 1e-15:
            raise InvalidGeometry("arc angular extent must lie in (0, 2*pi]")

    @property
    def orientation(self) -> int:
        return 1 if self.sweep > 0 else -1

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.sweep

    @cached_property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def _angle(self, u):
        return self.start_angle + self.orientation * u / self.radius

    def point(self, u: float) -> tuple[float, float]:
        th = self._angle(u)
        return (self.center[0] + self.radius * math.cos(th),
                self.center[1] + self.radius * math.sin(th))

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(self.length)

    def tangent(self, u: float = 0.0) -> tuple[float, float]:
        th = self._angle(u)
        s = self.orientation
        return (-s * math.sin(th), s * math.cos(th))

    def normal(self, u: float = 0.0) -> tuple[float, float]:
        tx, ty = self.tangent(u)
        return (-ty, tx)

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.end_angle, -self.sweep)

    def _param(self, x, y):
        phi = math.atan2(y - self.center[1], x - self.center[0])
        rel = (self.orientation * (phi - self.start_angle)) % TWO_PI
        return rel * self.radius

    def ray_hits(self, px, py, dx, dy, tmin):
        cx, cy = self.center
        wx, wy = px - cx, py - cy
        b = dx * wx + dy * wy
        c = wx * wx + wy * wy - self.radius * self.radius
        disc = b * b - c
        if disc < 0.0:
            return []
        sq = math.sqrt(disc)
        # stable pair of roots of t^2 + 2bt + c = 0
        q = -(b + math.copysign(sq, b)) if (b != 0.0 or sq != 0.0) else 0.0
        roots = [q] if q == 0.0 else [q, c / q]
        out = []
        slack = 1e-12 * max(1.0, self.radius)
        for t in roots:
            if t <= tmin:
                continue
            u = self._param(px + t * dx, py + t * dy)
            if u > self.length + slack:
                if abs(self.sweep) >= TWO_PI or TWO_PI * self.radius - u < slack:
                    u = 0.0
                else:
                    continue
            out.append((t, min(u, self.length)))
        return out

    def snap(self, x, y, u):
        return self.point(u)

    def _ccw_range(self) -> tuple[float, float]:
        if self.sweep > 0:
            return self.start_angle, self.start_angle + self.sweep
        return self.start_angle + self.sweep, self.start_angle

    def distance(self, q: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center)
        v = q - c
        rho = np.hypot(v[:, 0], v[:, 1])
        a, b = self._ccw_range()
        rel = np.mod(np.arctan2(v[:, 1], v[:, 0]) - a, TWO_PI)
        inside = rel <= (b - a) + 1e-15
        d_end = np.minimum(np.hypot(*(q - np.asarray(self.start)).T),
                           np.hypot(*(q - np.asarray(self.end)).T))
        return np.where(inside, np.abs(rho - self.radius), d_end)

    def _monotone_parts(self):
        a, b = self._ccw_range()
        cuts = [a]
        k = math.ceil((a - math.pi / 2) / math.pi)
        while True:
            ang = math.pi / 2 + k * math.pi
            if ang >= b:
                break
            if ang > a:
                cuts.append(ang)
            k += 1
        cuts.append(b)
        return list(zip(cuts[:-1], cuts[1:]))

    def crossings(self, q: np.ndarray) -> np.ndarray:
        cx, cy = self.center
        r = self.radius
        qx, qy = q[:, 0], q[:, 1]
        hit = np.zeros(len(q), dtype=int)
        for a, b in self._monotone_parts():
            ya, yb = cy + r * _clean_sin(a), cy + r * _clean_sin(b)
            side = 1.0 if math.cos(0.5 * (a + b)) >= 0 else -1.0
            lo, hi = min(ya, yb), max(ya, yb)
            span = (lo <= qy) & (qy < hi)
            xi = cx + side * np.sqrt(np.maximum(r * r - (qy - cy) ** 2, 0.0))
            hit += span & (xi > qx)
        return hit

    def polyline(self, n: int = 33) -> np.ndarray:
        th = self.start_angle + np.linspace(0.0, self.sweep, n)
        return np.c_[self.center[0] + self.radius * np.cos(th),
                     self.center[1] + self.radius * np.sin(th)]

    def signed_area_term(self) -> float:
        cx, cy = self.center
        r = self.radius
        t0, t1 = self.start_angle, self.end_angle
        return 0.5 * (r * cx * (math.sin(t1) - math.sin(t0))
                      - r * cy * (math.cos(t1) - math.cos(t0))
                      + r * r * (t1 - t0))

    def to_dict(self) -> dict:
        return {"kind": "arc", "center": list(self.center), "radius": self.radius,
                "start": self.start_angle, "end": self.end_angle,
                "orientation": self.orientation}


Piece = Union[Segment, Arc]


def _clean_sin(a: float) -> float:
    v = math.sin(a)
    if abs(v) < 1e-14:
        return 0.0
    if abs(abs(v) - 1.0) < 1e-14:
        return math.copysign(1.0, v)
    return v


def piece_from_dict(d: dict) -> Piece:
    kind = d.get("kind")
    if kind == "segment":
        return Segment(tuple(d["p0"]), tuple(d["p1"]))
    if kind == "arc":
        sign = int(d.get("orientation", 1))
        sweep = sign * ((sign * (d["end"] - d["start"])) % TWO_PI)
        if sweep == 0.0:
            sweep = sign * TWO_PI
        return Arc(tuple(d["center"]), float(d["radius"]), float(d["start"]), sweep)
    raise InvalidGeometry(f"unknown piece kind {kind!r}")


def _close(p, q, tol=CLOSURE_TOL):
    return abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol


def _is_smooth_junction(a: Piece, b: Piece) -> bool:
    na, nb = a.normal(a.length), b.normal(0.0)
    return abs(na[0] - nb[0]) < 1e-9 and abs(na[1] - nb[1]) < 1e-9


@dataclass(frozen=True, eq=False)
class Domain:
    loops: tuple[tuple[Piece, ...], ...]
    preset: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        loops = tuple(tuple(loop) for loop in self.loops)
        if not loops or any(len(loop) == 0 for loop in loops):
            raise InvalidGeometry("domain needs at least one non-empty loop")
        for loop in loops:
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if not _close(a.end, b.start):
                    raise InvalidGeometry(f"chain not closed: {a.end} != {b.start}")
        object.__setattr__(self, "loops", loops)
        areas = [sum(p.signed_area_term() for p in loop) for loop in loops]
        if areas[0] <= 0 or any(a >= 0 for a in areas[1:]):
            raise InvalidGeometry("outer loop must be counterclockwise, obstacles clockwise")
        object.__setattr__(self, "area", float(sum(areas)))
        if self.area <= 0:
            raise InvalidGeometry("domain area must be positive")
        lengths = [p.length for p in self.pieces]
        object.__setattr__(self, "perimeter", float(sum(lengths)))
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(lengths)]))

    @cached_property
    def pieces(self) -> tuple[Piece, ...]:
        return tuple(p for loop in self.loops for p in loop)

    @cached_property
    def corners(self) -> tuple[tuple[float, float], ...]:
        """Junction points where the boundary normal jumps."""
        out = []
        for loop in self.loops:
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if not _is_smooth_junction(a, b):
                    out.append(b.start)
        return tuple(out)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        pts = np.vstack([p.polyline(257) if p.kind == "arc" else p.polyline()
                         for p in self.loops[0]])
        return (float(pts[:, 0].min()), float(pts[:, 1].min()),
                float(pts[:, 0].max()), float(pts[:, 1].max()))

    @property
    def scale(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return max(x1 - x0, y1 - y0)

    def piece_start(self, i: int) -> float:
        return float(self._cum[i])

    def locate(self, s: float) -> tuple[int, float]:
        """Piece index and local arclength for global arclength ``s``."""
        if not 0.0 <= s < self.perimeter:
            raise OutOfRange(f"arclength {s} outside [0, {self.perimeter})")
        i = int(np.searchsorted(self._cum, s, side="left")) - 1
        i = min(max(i, 0), len(self.pieces) - 1)
        return i, min(s - self._cum[i], self.pieces[i].length)

    def boundary_point_and_normal(self, s: float):
        i, u = self.locate(s)
        p = self.pieces[i]
        return np.array(p.point(u)), np.array(p.normal(u))

    def boundary_distance(self, q) -> np.ndarray:
        q = np.atleast_2d(np.asarray(q, dtype=float))
        return np.min([p.distance(q) for p in self.pieces], axis=0)

    def contains(self, q):
        """Even-odd containment; points within 1e-12 of the boundary count as inside."""
        arr = np.asarray(q, dtype=float)
        single = arr.ndim == 1
        pts = np.atleast_2d(arr)
        count = np.zeros(len(pts), dtype=int)
        for p in self.pieces:
            count += p.crossings(pts)
        inside = (count % 2 == 1) | (self.boundary_distance(pts) <= BOUNDARY_TOL)
        return bool(inside[0]) if single else inside

    def interior_point(self) -> np.ndarray:
        hint = self.params.get("_interior")
        if hint is not None:
            return np.asarray(hint, dtype=float)
        x0, y0, x1, y1 = self.bbox
        grid = np.stack(np.meshgrid(np.linspace(x0, x1, 41), np.linspace(y0, y1, 41)), -1).reshape(-1, 2)
        ok = self.contains(grid)
        if not ok.any():
            raise InvalidGeometry("could not find an interior point")
        cand = grid[ok]
        return cand[np.argmax(self.boundary_distance(cand))]

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        x0, y0, x1, y1 = self.bbox
        out, have = [], 0
        while have < n:
            m = max(64, int(1.3 * (n - have) * (x1 - x0) * (y1 - y0) / self.area))
            cand = rng.uniform((x0, y0), (x1, y1), size=(m, 2))
            cand = cand[self.contains(cand)]
            out.append(cand)
            have += len(cand)
        return np.vstack(out)[:n]

    def to_dict(self) -> dict:
        params = {k: v for k, v in self.params.items() if not k.startswith("_")}
        return {"preset": self.preset, "params": params,
                "pieces": [[p.to_dict() for p in loop] for loop in self.loops]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------- presets

def _require_positive(**kw):
    for k, v in kw.items():
        if not (isinstance(v, (int, float, np.floating)) and v > 0 and math.isfinite(v)):
            raise InvalidParameter(f"{k} must be positive, got {v!r}")


def rectangle(a: float = 1.0, b: float = 1.0) -> Domain:
    """Rectangle ``[0, a] x [0, b]``."""
    _require_positive(a=a, b=b)
    v = [(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)]
    pieces = [Segment(v[i], v[(i + 1) % 4]) for i in range(4)]
    return Domain((tuple(pieces),), "rectangle", {"a": a, "b": b, "_interior": (a / 2, b / 2)})


def disk(r: float = 1.0) -> Domain:
    _require_positive(r=r)
    return Domain(((Arc((0.0, 0.0), r, 0.0, TWO_PI),),), "disk", {"r": r, "_interior": (0.0, 0.0)})


def _stadium_loop(a: float, r: float):
    # rectangle [-a, a] x [-r, r] with caps of radius r centred at (+-a, 0)
    return (
        Segment((-a, -r), (a, -r)),
        Arc((a, 0.0), r, -math.pi / 2, math.pi),
        Segment((a, r), (-a, r)),
        Arc((-a, 0.0), r, math.pi / 2, math.pi),
    )


def bunimovich(t: float = 1.0) -> Domain:
    """Stadium ``([-t pi/2, t pi/2] x [-pi/2, pi/2])`` with half-disk caps of radius ``pi/2``."""
    _require_positive(t=t)
    a, r = t * math.pi / 2, math.pi / 2
    return Domain((_stadium_loop(a, r),), "bunimovich",
                  {"t": t, "half_width": a, "radius": r, "_interior": (0.0, 0.0)})


def stadium(w: float = 2.0, h_rect: float | None = None, r: float = 1.0) -> Domain:
    """Stadium with central rectangle of width ``w`` and height ``h_rect = 2 r``."""
    _require_positive(w=w, r=r)
    if h_rect is None:
        h_rect = 2 * r
    _require_positive(h_rect=h_rect)
    if abs(h_rect - 2 * r) > 1e-12 * max(1.0, r):
        raise InvalidParameter("stadium caps require h_rect == 2 r")
    return Domain((_stadium_loop(w / 2, r),), "stadium",
                  {"w": w, "h_rect": h_rect, "r": r, "half_width": w / 2, "radius": r,
                   "_interior": (0.0, 0.0)})


def quarter_stadium(half_width: float, radius: float) -> Domain:
    """First-quadrant quarter of a stadium; the axes are symmetry lines."""
    _require_positive(half_width=half_width, radius=radius)
    a, r = half_width, radius
    loop = (
        Segment((0.0, 0.0), (a + r, 0.0)),
        Arc((a, 0.0), r, 0.0, math.pi / 2),
        Segment((a, r), (0.0, r)),
        Segment((0.0, r), (0.0, 0.0)),
    )
    return Domain((loop,), "quarter_stadium",
                  {"half_width": a, "radius": r, "_interior": (a / 2, r / 2)})


def sinai(side: float = 180.0, r_inner: float = 30.0) -> Domain:
    """Square of the given side centred at the origin with a disk obstacle at the centre."""
    _require_positive(side=side, r_inner=r_inner)
    if r_inner >= side / 2:
        raise InvalidParameter("sinai obstacle radius must be below half the side")
    h = side / 2
    v = [(-h, -h), (h, -h), (h, h), (-h, h)]
    outer = tuple(Segment(v[i], v[(i + 1) % 4]) for i in range(4))
    inner = (Arc((0.0, 0.0), r_inner, 0.0, -TWO_PI),)
    mid = 0.5 * (h + r_inner)
    return Domain((outer, inner), "sinai",
                  {"side": side, "r_inner": r_inner, "_interior": (mid, mid)})


def triangle(vertices: Sequence[Sequence[float]]) -> Domain:
    v = [tuple(map(float, p)) for p in vertices]
    if len(v) != 3:
        raise InvalidParameter("triangle needs three vertices")
    cross = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0])
    if abs(cross) < 1e-14:
        raise InvalidParameter("degenerate triangle")
    if cross < 0:
        v = [v[0], v[2], v[1]]
    pieces = tuple(Segment(v[i], v[(i + 1) % 3]) for i in range(3))
    c = tuple(np.mean(v, axis=0))
    return Domain((pieces,), "triangle", {"vertices": [list(p) for p in v], "_interior": c})


def _check_simple(loops) -> None:
    pieces = [p for loop in loops for p in loop]
    polys = [p.polyline(65 if p.kind == "arc" else 2) for p in pieces]
    n = len(pieces)
    # adjacency: consecutive pieces within a loop share an endpoint
    adjacent = set()
    k = 0
    for loop in loops:
        m = len(loop)
        for i in range(m):
            adjacent.add((k + i, k + (i + 1) % m))
            adjacent.add((k + (i + 1) % m, k + i))
        k += m
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in adjacent:
                continue
            if _polylines_cross(polys[i], polys[j]):
                raise InvalidGeometry(f"boundary pieces {i} and {j} intersect")


def _polylines_cross(a: np.ndarray, b: np.ndarray) -> bool:
    p, r = a[:-1], np.diff(a, axis=0)
    q, s = b[:-1], np.diff(b, axis=0)
    rxs = r[:, None, 0] * s[None, :, 1] - r[:, None, 1] * s[None, :, 0]
    qp = q[None, :, :] - p[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[..., 0] * s[None, :, 1] - qp[..., 1] * s[None, :, 0]) / rxs
        u = (qp[..., 0] * r[:, None, 1] - qp[..., 1] * r[:, None, 0]) / rxs
    return bool(np.any((rxs != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)))


def custom(loops: Sequence[Sequence[Piece]]) -> Domain:
    """Domain from explicit chains; orientation is fixed up, self-intersections rejected."""
    fixed = []
    for i, loop in enumerate(loops):
        loop = tuple(loop)
        area = sum(p.signed_area_term() for p in loop)
        want_positive = i == 0
        if (area > 0) != want_positive:
            loop = tuple(p.reversed() for p in reversed(loop))
        fixed.append(loop)
    _check_simple(fixed)
    return Domain(tuple(fixed), "custom", {})


PRESETS = {
    "rectangle": rectangle,
    "disk": disk,
    "bunimovich": bunimovich,
    "stadium": stadium,
    "quarter_stadium": quarter_stadium,
    "sinai": sinai,
    "triangle": triangle,
}


def build_domain(preset: str, **params: Any) -> Domain:
    try:
        factory = PRESETS[preset]
    except KeyError:
        raise InvalidParameter(f"unknown domain preset {preset!r}") from None
    allowed = inspect.signature(factory).parameters
    extra = sorted(set(params) - set(allowed))
    if extra:
        raise InvalidParameter(f"preset {preset!r} does not take {', '.join(extra)}")
    return factory(**params)


def domain_from_dict(d: dict) -> Domain:
    preset = d.get("preset", "custom")
    if preset != "custom" and d.get("params") is not None and preset in PRESETS:
        # derived entries (half_width, radius, ...) are recomputed by the factory
        allowed = inspect.signature(PRESETS[preset]).parameters
        return build_domain(preset, **{k: v for k, v in d["params"].items() if k in allowed})
    loops = [[piece_from_dict(p) for p in loop] for loop in d["pieces"]]
    return custom(loops)


def domain_from_json(text: str) -> Domain:
    return domain_from_dict(json.loads(text))


def contains(d: Domain, q) -> bool:
    return d.contains(q)


def boundary_point_and_normal(d: Domain, s: float):
    return d.boundary_point_and_normal(s)


# ---------------------------------------------------------------- quadrature

def _gl(n: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _tensor(nx, ny, x0, x1, y0, y1):
    x, wx = _gl(nx, x0, x1)
    y, wy = _gl(ny, y0, y1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return np.c_[X.ravel(), Y.ravel()], np.outer(wx, wy).ravel()


def _polar(n, center, r, th0, th1):
    rr, wr = _gl(n, 0.0, r)
    th, wt = _gl(n, th0, th1)
    R, T = np.meshgrid(rr, th, indexing="ij")
    pts = np.c_[center[0] + (R * np.cos(T)).ravel(), center[1] + (R * np.sin(T)).ravel()]
    return pts, (np.outer(wr * rr, wt)).ravel()


def quadrature(d: Domain, n: int = 64, rng: np.random.Generator | None = None):
    """Nodes and weights integrating smooth functions over ``d``.

    Gauss-Legendre tensor rules (polar, r-weighted on disks and caps) for the
    presets; scrambled Sobol points for anything else.
    """
    p = d.params
    if d.preset == "rectangle":
        return _tensor(n, n, 0.0, p["a"], 0.0, p["b"])
    if d.preset == "disk":
        rr, wr = _gl(n, 0.0, p["r"])
        m = 2 * n
        th = TWO_PI * (np.arange(m) + 0.5) / m
        R, T = np.meshgrid(rr, th, indexing="ij")
        pts = np.c_[(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()]
        return pts, np.outer(wr * rr, np.full(m, TWO_PI / m)).ravel()
    if d.preset in ("bunimovich", "stadium"):
        a, r = p["half_width"], p["radius"]
        parts = [_tensor(n, n, -a, a, -r, r),
                 _polar(n, (a, 0.0), r, -math.pi / 2, math.pi / 2),
                 _polar(n, (-a, 0.0), r, math.pi / 2, 3 * math.pi / 2)]
        return np.vstack([q[0] for q in parts]), np.concatenate([q[1] for q in parts])
    if d.preset == "quarter_stadium":
        a, r = p["half_width"], p["radius"]
        parts = [_tensor(n, n, 0.0, a, 0.0, r), _polar(n, (a, 0.0), r, 0.0, math.pi / 2)]
        return np.vstack([q[0] for q in parts]), np.concatenate([q[1] for q in parts])
    if d.preset == "triangle":
        v = np.asarray(p["vertices"])
        u, wu = _gl(n, 0.0, 1.0)
        U, V = np.meshgrid(u, u, indexing="ij")
        # Duffy map of the unit square onto the reference triangle
        s, t = U.ravel(), (V * (1 - U)).ravel()
        w = np.outer(wu, wu).ravel() * (1 - U.ravel())
        e1, e2 = v[1] - v[0], v[2] - v[0]
        jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
        pts = v[0] + s[:, None] * (v[1] - v[0]) + t[:, None] * (v[2] - v[0])
        return pts, w * jac
    from scipy.stats import qmc

    rng = rng if rng is not None else np.random.default_rng(0)
    x0, y0, x1, y1 = d.bbox
    m = int(2 ** math.ceil(math.log2(max(n * n * 4, 1024))))
    pts = qmc.scale(qmc.Sobol(2, scramble=True, seed=rng).random(m), (x0, y0), (x1, y1))
    pts = pts[d.contains(pts)]
    return pts, np.full(len(pts), d.area / len(pts))
