"""Quantum-ergodicity statistics over eigenfunction windows."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import geometry as G
from .errors import InsufficientData, InvalidParameter, NormalizationError, ResolutionError


@dataclass(frozen=True)
class ObservableSpec:
    """A position multiplier ``a(x, y)`` (``kind="position"``) or a 1-D grid symbol.

    ``alpha`` is the reference average subtracted when centring; ``sup`` bounds
    ``|a|`` when known.
    """

    func: Callable
    kind: str = "position"
    alpha: float = 0.0
    mean_zero: bool = False
    sup: float | None = None
    name: str = "a"

    def __post_init__(self):
        if self.kind not in ("position", "symbol"):
            raise InvalidParameter(f"unknown observable kind {self.kind!r}")
        if not math.isfinite(self.alpha):
            raise InvalidParameter("reference average must be finite")

    def centered(self) -> "ObservableSpec":
        if self.mean_zero:
            return self
        f, al = self.func, self.alpha
        if self.kind == "position":
            def g(pts):
                return f(pts) - al
        else:
            from .quantization import Symbol
            g = Symbol(lambda x, p: f(x, p) - al, f.dx, f.dp, f.p_support, f.real, f"{f.name}-avg")
        sup = None if self.sup is None else self.sup + abs(al)
        return ObservableSpec(g, self.kind, 0.0, True, sup, f"{self.name}-avg")


def position_observable(func: Callable, d: G.Domain, name: str = "a", sup: float | None = None,
                        quad_n: int = 64) -> ObservableSpec:
    """Multiplier with its space average over ``d`` as reference value."""
    nodes, w = G.quadrature(d, quad_n)
    alpha = float(np.sum(w * func(nodes))) / d.area
    return ObservableSpec(func, "position", alpha, False, sup, name)


def indicator_box(x0: float, y0: float, x1: float, y1: float) -> Callable:
    def f(pts):
        pts = np.asarray(pts, dtype=float)
        return ((pts[..., 0] >= x0) & (pts[..., 0] <= x1)
                & (pts[..., 1] >= y0) & (pts[..., 1] <= y1)).astype(float)
    return f


def indicator_halfplane(normal, offset: float) -> Callable:
    """Indicator of ``<normal, q> < offset``."""
    n = np.asarray(normal, dtype=float)

    def f(pts):
        return (np.asarray(pts, dtype=float) @ n < offset).astype(float)
    return f


def indicator_disk(center, radius: float) -> Callable:
    c = np.asarray(center, dtype=float)

    def f(pts):
        q = np.asarray(pts, dtype=float) - c
        return (np.hypot(q[..., 0], q[..., 1]) < radius).astype(float)
    return f


def _norm_check(sq: float, tol: float = 1e-3):
    if abs(math.sqrt(sq) - 1.0) > tol:
        raise NormalizationError(f"eigenfunction norm {math.sqrt(sq):.6g} differs from 1")


def matrix_element(A: ObservableSpec, phi, quad=None, grid=None) -> float | complex:
    """``<A phi, phi>``.

    Position observables need ``quad = (nodes, weights)`` over the domain and
    give ``int a |phi|^2``.  Symbol observables take ``phi`` as grid samples and
    ``grid`` as the :class:`~qchaos.quantization.GridSpec`.
    """
    if A.kind == "position":
        if quad is None:
            raise InvalidParameter("position observables need a quadrature rule")
        nodes, w = quad
        v = np.asarray(phi(nodes), dtype=float)
        dens = w * v * v
        _norm_check(float(np.sum(dens)))
        return float(np.sum(dens * A.func(nodes)))
    from .quantization import quantize
    if grid is None:
        raise InvalidParameter("symbol observables need a grid")
    f = np.asarray(phi, dtype=complex)
    _norm_check(grid.norm(f) ** 2)
    Q = quantize(A.func, grid)
    val = complex(np.vdot(f, Q.matrix @ f) * grid.dx)
    if Q.hermitian:
        return val.real
    return val


def expectation_values(A: ObservableSpec, modes: Sequence, quad=None, grid=None) -> np.ndarray:
    return np.array([matrix_element(A, m, quad, grid) for m in modes])


# ---------------------------------------------------------------- variance and subsequences

@dataclass
class SubsetSplit:
    gamma: np.ndarray
    lam: np.ndarray
    density: float
    chebyshev_ok: bool


def density_one_subset(values, eps: float, normalization: float | None = None) -> SubsetSplit:
    """Split modes into ``Gamma = {|v|^2 >= sqrt(eps)}`` and its complement."""
    v = np.asarray(values)
    n = len(v)
    if n == 0:
        return SubsetSplit(np.array([], int), np.array([], int), 1.0, True)
    norm = 1.0 / n if normalization is None else normalization
    thr = math.sqrt(max(eps, 0.0))
    in_gamma = (np.abs(v) ** 2 >= thr) if thr > 0 else np.zeros(n, bool)
    gamma = np.flatnonzero(in_gamma)
    lam = np.flatnonzero(~in_gamma)
    return SubsetSplit(gamma, lam, len(lam) / n, bool(len(gamma) * norm <= thr + 1e-15))


@dataclass
class QEReport:
    window: tuple[float, float]
    eigenvalues: np.ndarray
    values: np.ndarray
    eps: float
    normalization: str
    weight: float
    split: SubsetSplit
    observable: str = ""
    mass: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        g = set(self.split.gamma.tolist())
        return {"window": list(map(float, self.window)), "observable": self.observable,
                "eps": self.eps, "normalization": self.normalization, "weight": self.weight,
                "density_lambda": self.split.density, "chebyshev_ok": self.split.chebyshev_ok,
                "modes": [{"lambda": float(l), "value": float(np.real(v)), "gamma": i in g}
                          for i, (l, v) in enumerate(zip(self.eigenvalues, self.values))],
                "mass": self.mass, "notes": self.notes}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        g = set(self.split.gamma.tolist())
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "value", "gamma"])
        for i, (l, v) in enumerate(zip(self.eigenvalues, self.values)):
            w.writerow([repr(float(l)), repr(float(np.real(v))), int(i in g)])
        return buf.getvalue()


def variance(values, normalization: str = "cesaro", h: float | None = None,
             dim: int = 2) -> tuple[float, float]:
    """``(eps, weight)`` with weight ``1/#modes`` or ``(2 pi h)^dim``."""
    v = np.asarray(values)
    if normalization == "cesaro":
        weight = 1.0 / len(v)
    elif normalization == "semiclassical":
        if h is None or h <= 0:
            raise InvalidParameter("semiclassical normalisation needs h > 0")
        weight = (2 * math.pi * h) ** dim
    else:
        raise InvalidParameter(f"unknown normalisation {normalization!r}")
    return float(weight * np.sum(np.abs(v) ** 2)), weight


def qe_variance(A: ObservableSpec, modes: Sequence, quad=None, grid=None,
                normalization: str = "cesaro", h: float | None = None, dim: int = 2,
                min_modes: int = 20) -> QEReport:
    """Variance of centred expectation values over a window of modes."""
    if len(modes) < min_modes:
        raise InsufficientData(f"need at least {min_modes} modes, got {len(modes)}")
    Ac = A.centered()
    vals = expectation_values(Ac, modes, quad, grid)
    eps, weight = variance(vals, normalization, h, dim)
    lams = np.array([getattr(m, "eigenvalue", np.nan) for m in modes], dtype=float)
    split = density_one_subset(vals, eps, weight)
    notes = [f"normalisation: {normalization}"]
    if A.kind == "position":
        notes.append("reference value is the space average (uniform momentum on each energy circle)")
    return QEReport((float(np.nanmin(lams)), float(np.nanmax(lams))), lams, vals, eps,
                    normalization, weight, split, A.name, notes=notes)


# ---------------------------------------------------------------- mass ratios

@dataclass
class MassRatio:
    mass: float
    volume_ratio: float

    @property
    def gap(self) -> float:
        return abs(self.mass - self.volume_ratio)


def mass_ratio(phi, S, d: G.Domain, quad=None, quad_n: int = 64) -> MassRatio:
    """``int_S |phi|^2`` against ``Vol(S)/Vol(d)``.

    ``S`` is a :class:`~qchaos.geometry.Domain` or an indicator callable.
    """
    nodes, w = quad if quad is not None else G.quadrature(d, quad_n)
    ind = (np.asarray(S.contains(nodes), dtype=float) if isinstance(S, G.Domain)
           else np.asarray(S(nodes), dtype=float))
    vol = float(np.sum(w * ind))
    if vol <= 0:
        raise InvalidParameter("subregion has zero area")
    v = np.asarray(phi(nodes), dtype=float)
    dens = w * v * v
    total = float(np.sum(dens))
    _norm_check(total)
    return MassRatio(float(np.sum(dens * ind)) / total, vol / float(np.sum(w)))


# ---------------------------------------------------------------- bouncing balls

@dataclass
class BouncingBallScore:
    rect_mass: float
    concentration: float
    flagged: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def vertical_concentration(values: np.ndarray, bbox, half_angle_deg: float = 15.0) -> float:
    """Fraction of non-DC spectral energy of a raster within the cones about the ``k_y`` axis."""
    ny, nx = values.shape
    x0, y0, x1, y1 = bbox
    P = np.abs(np.fft.fft2(values)) ** 2
    kx = np.fft.fftfreq(nx, d=(x1 - x0) / nx)
    ky = np.fft.fftfreq(ny, d=(y1 - y0) / ny)
    KX, KY = np.meshgrid(kx, ky)
    P[0, 0] = 0.0
    total = P.sum()
    if total == 0:
        return 0.0
    cone = np.abs(KX) <= math.tan(math.radians(half_angle_deg)) * np.abs(KY)
    return float(P[cone].sum() / total)


def bouncing_ball_score(raster, rect, rect_fraction: float, half_angle_deg: float = 15.0,
                        mass_margin: float = 0.2, min_concentration: float = 0.5) -> BouncingBallScore:
    """Score a signed eigenfunction raster for bouncing-ball character.

    ``rect = (x0, y0, x1, y1)`` is the straight part of the stadium and
    ``rect_fraction`` its share of the area.
    """
    vals = np.asarray(raster.values, dtype=float)
    if raster.nx < 64 or raster.ny < 64:
        raise ResolutionError("bouncing-ball scoring needs rasters of at least 64 x 64")
    xs, ys = raster.centers()
    X, Y = np.meshgrid(xs, ys)
    inside = (X >= rect[0]) & (X <= rect[2]) & (Y >= rect[1]) & (Y <= rect[3])
    dens = vals ** 2
    total = dens.sum()
    rm = float(dens[inside].sum() / total) if total > 0 else 0.0
    conc = vertical_concentration(vals, raster.bbox, half_angle_deg)
    flagged = rm > rect_fraction + mass_margin and conc > min_concentration
    return BouncingBallScore(rm, conc, bool(flagged))


def stadium_rect(d: G.Domain) -> tuple[tuple[float, float, float, float], float]:
    """Straight part of a stadium (full or quarter) and its area fraction."""
    a, r = d.params["half_width"], d.params["radius"]
    if d.preset == "quarter_stadium":
        rect = (0.0, 0.0, a, r)
    else:
        rect = (-a, -r, a, r)
    x0, y0, x1, y1 = rect
    return rect, (x1 - x0) * (y1 - y0) / d.area
