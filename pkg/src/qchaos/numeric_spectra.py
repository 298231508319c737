"""Dirichlet Helmholtz eigenvalues of planar domains by the method of particular solutions.

Each trial wavenumber ``k`` gives a basis of exact Helmholtz solutions.  The
tension ``t(k)`` is the smallest ratio ``||u||_boundary / ||u||_interior``
over the span of that basis, computed as a generalised singular value from a
pivoted QR factorisation of the stacked collocation matrices.  Eigenvalues
are the near-zero minima of ``t``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg as la
from scipy.optimize import minimize_scalar
from scipy.special import jv, y0

from . import geometry as G
from .analytic_spectra import EigenPair
from .errors import ConditioningError, InvalidParameter
from .spectral_stats import SpectrumWindow

SECTORS = ("none", "odd-odd", "even-even", "odd-even", "even-odd")
STADIUM_PRESETS = ("bunimovich", "stadium", "quarter_stadium")

# Sector names give the parity in x, then in y.
_PARITY = {"odd-odd": (np.sin, np.sin), "even-even": (np.cos, np.cos),
           "odd-even": (np.sin, np.cos), "even-odd": (np.cos, np.sin)}


@dataclass(frozen=True)
class MPSConfig:
    """Solver settings.

    ``B`` caps the basis size; the size actually used grows with ``k``.
    ``scan_step`` is a step in ``k``; ``None`` picks 5% of the mean level
    spacing.  ``threshold=None`` uses 1e-6, or 1e-2 on stadium domains where
    plane waves cannot resolve the curvature jump at the arc junctions.

    ``polish`` re-solves each accepted minimum in a basis of fundamental
    solutions ``Y_0(k |x - y_j|)`` with sources ``y_j`` pushed outside the
    boundary (``"auto"``: on stadium domains only).  ``mfs_density`` is the
    number of sources per unit of ``k`` times boundary length and
    ``mfs_offset`` their distance from the boundary in wavelengths, with at
    least ``mfs_min_sources`` sources.
    """

    basis: str = "auto"
    B: int = 120
    M_b: int = 360
    M_i: int = 150
    scan_step: float | None = None
    threshold: float | None = None
    sector: str = "none"
    seed: int = 0
    rtol: float = 1e-14
    refine_tol: float = 1e-10
    max_multiplicity: int = 4
    polish: str = "auto"
    polish_threshold: float = 1e-3
    mfs_density: float = 1.5
    mfs_offset: float = 0.4
    mfs_min_sources: int = 200

    def __post_init__(self):
        if self.basis not in ("auto", "fourier_bessel", "plane_wave"):
            raise InvalidParameter(f"unknown basis {self.basis!r}")
        if self.sector not in SECTORS:
            raise InvalidParameter(f"unknown sector {self.sector!r}")
        if self.B < 8:
            raise InvalidParameter("basis size B must be at least 8")
        if self.M_b < 2 * self.B:
            raise InvalidParameter("need M_b >= 2 B boundary points")
        if self.M_i < self.B:
            raise InvalidParameter("need M_i >= B interior points")
        if self.scan_step is not None and self.scan_step <= 0:
            raise InvalidParameter("scan_step must be positive")
        if self.polish not in ("auto", "mfs", "off"):
            raise InvalidParameter(f"unknown polish mode {self.polish!r}")
        if not (self.mfs_density > 0 and self.mfs_offset > 0):
            raise InvalidParameter("mfs_density and mfs_offset must be positive")
        if self.mfs_min_sources < 8:
            raise InvalidParameter("mfs_min_sources must be at least 8")


def desymmetrize(d: G.Domain) -> G.Domain:
    """Quarter of a stadium centred at the origin; other domains are returned unchanged."""
    if d.preset in ("bunimovich", "stadium"):
        return G.quarter_stadium(d.params["half_width"], d.params["radius"])
    return d


def _on_axis(piece) -> bool:
    if not isinstance(piece, G.Segment):
        return False
    (x0, y0), (x1, y1) = piece.p0, piece.p1
    return (abs(x0) < 1e-12 and abs(x1) < 1e-12) or (abs(y0) < 1e-12 and abs(y1) < 1e-12)


def _images(sector: str):
    """Reflections ``(sx, sy)`` with the sign each contributes in the given sector."""
    if sector == "none":
        return [(1.0, 1.0, 1.0)]
    px, py = (-1.0 if s == "odd" else 1.0 for s in sector.split("-"))
    return [(1.0, 1.0, 1.0), (-1.0, 1.0, px), (1.0, -1.0, py), (-1.0, -1.0, px * py)]


class BasisSet:
    """Real Helmholtz solutions.

    ``fourier_bessel``: ``J_n(k r)`` times ``cos``/``sin`` about ``origin``.
    ``plane_wave``: ``B`` directions, symmetrised per sector.
    ``fundamental``: ``Y_0(k |x - y_j|)`` for exterior ``sources``, summed over
    the sector's mirror images.
    """

    def __init__(self, kind: str, B: int, sector: str = "none", origin=(0.0, 0.0), sources=None):
        if kind not in ("fourier_bessel", "plane_wave", "fundamental"):
            raise InvalidParameter(f"unknown basis {kind!r}")
        if kind == "fundamental":
            if sources is None:
                raise InvalidParameter("a fundamental-solution basis needs source points")
            sources = np.asarray(sources, dtype=float).reshape(-1, 2)
            B = len(sources)
        if B < 8:
            raise InvalidParameter("basis size must be at least 8")
        if kind == "fourier_bessel" and sector != "none":
            raise InvalidParameter("Fourier-Bessel bases carry no symmetry sector")
        self.kind, self.B, self.sector = kind, int(B), sector
        self.origin = np.asarray(origin, dtype=float)
        self.sources = sources

    @property
    def size(self) -> int:
        if self.kind == "fundamental":
            return self.B
        if self.kind == "fourier_bessel" or self.sector == "none":
            return 2 * self.B + (1 if self.kind == "fourier_bessel" else 0)
        return self.B

    def __call__(self, k: float, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "fundamental":
            out = np.zeros((len(pts), self.B))
            for sx, sy, sign in _images(self.sector):
                R = np.hypot(pts[:, :1] - sx * self.sources[None, :, 0],
                             pts[:, 1:] - sy * self.sources[None, :, 1])
                out += sign * y0(k * R)
            return out
        if self.kind == "fourier_bessel":
            dx = pts[:, 0] - self.origin[0]
            dy = pts[:, 1] - self.origin[1]
            r = np.hypot(dx, dy)
            th = np.arctan2(dy, dx)
            n = np.arange(self.B + 1)
            J = jv(n[None, :], k * r[:, None])
            return np.hstack([J[:, :1], J[:, 1:] * np.cos(n[1:] * th[:, None]),
                              J[:, 1:] * np.sin(n[1:] * th[:, None])])
        if self.sector == "none":
            th = np.pi * np.arange(self.B) / self.B
            ph = k * (np.outer(pts[:, 0], np.cos(th)) + np.outer(pts[:, 1], np.sin(th)))
            return np.hstack([np.cos(ph), np.sin(ph)])
        fx, fy = _PARITY[self.sector]
        th = (np.arange(self.B) + 0.5) * (np.pi / 2) / self.B
        return fx(k * np.outer(pts[:, 0], np.cos(th))) * fy(k * np.outer(pts[:, 1], np.sin(th)))


@dataclass
class TensionCurve:
    lam: np.ndarray
    tension: np.ndarray
    minima: list[tuple[float, float, int]] = field(default_factory=list)
    predicted: float = 0.0
    warning: bool = False

    def to_dict(self) -> dict:
        return {"lambda": self.lam.tolist(), "tension": self.tension.tolist(),
                "minima": [list(m) for m in self.minima], "predicted": self.predicted,
                "warning": self.warning}


@dataclass(frozen=True)
class MPSEigenPair(EigenPair):
    tension: float = float("nan")
    boundary_residual: float = float("nan")
    k: float = float("nan")
    coeffs: np.ndarray | None = field(default=None, repr=False)
    basis: BasisSet | None = field(default=None, repr=False, compare=False)


class MPSProblem:
    """Collocation data for one domain and configuration."""

    def __init__(self, d: G.Domain, cfg: MPSConfig):
        self.cfg = cfg
        self.sector = cfg.sector
        if cfg.sector != "none":
            d = desymmetrize(d)
            if d.preset != "quarter_stadium":
                raise InvalidParameter("symmetry sectors are available for stadium domains only")
        if len(d.loops) != 1:
            raise InvalidParameter("the MPS solver handles simply connected domains only")
        self.domain = d
        kind = cfg.basis
        if kind == "auto":
            kind = "plane_wave" if d.preset in STADIUM_PRESETS else "fourier_bessel"
        if kind == "fourier_bessel" and cfg.sector != "none":
            raise InvalidParameter("symmetry sectors need the plane-wave basis")
        self.kind = kind
        x0, y0, x1, y1 = d.bbox
        if kind == "fourier_bessel":
            self.origin = np.array([(x0 + x1) / 2, (y0 + y1) / 2])
        else:
            self.origin = np.zeros(2)
        corners = np.array([[x0, y0], [x0, y1], [x1, y0], [x1, y1]])
        self.rmax = float(np.max(np.hypot(*(corners - self.origin).T)))
        if cfg.threshold is not None:
            self.threshold = cfg.threshold
        else:
            self.threshold = 1e-2 if d.preset in STADIUM_PRESETS else 1e-6
        self.polish = cfg.polish == "mfs" or (cfg.polish == "auto" and d.preset in STADIUM_PRESETS)

        self.pieces = [p for p in d.pieces if cfg.sector == "none" or not _on_axis(p)]
        self.pts_b, self.w_b = self._boundary_points(cfg.M_b)
        rng = np.random.default_rng(cfg.seed)
        self.pts_i = d.sample_interior(cfg.M_i, rng)
        self.w_i = math.sqrt(d.area / cfg.M_i)
        self.fine_b, _ = self._boundary_points(4 * cfg.M_b)
        # Dirichlet length minus Neumann length for the Weyl correction term.
        self.weyl_perimeter = sum(p.length for p in self.pieces)
        if cfg.sector != "none":
            for p in d.pieces:
                if _on_axis(p):
                    on_x_axis = abs(p.p0[1]) < 1e-12 and abs(p.p1[1]) < 1e-12
                    parity = cfg.sector.split("-")[1 if on_x_axis else 0]
                    self.weyl_perimeter += p.length if parity == "odd" else -p.length

    def _boundary_points(self, M: int):
        lengths = np.array([p.length for p in self.pieces])
        counts = np.maximum(1, np.round(M * lengths / lengths.sum()).astype(int))
        pts, w = [], []
        for p, m in zip(self.pieces, counts):
            u = (np.arange(m) + 0.5) / m
            pts.extend(p.point(float(v) * p.length) for v in u)
            w.extend([p.length / m] * m)
        return np.array(pts), np.sqrt(np.array(w))

    def basis(self, k: float) -> BasisSet:
        if self.kind == "fourier_bessel":
            B = int(min(self.cfg.B, math.ceil(k * self.rmax) + 12))
        else:
            B = int(min(self.cfg.B, max(20, math.ceil(k * self.rmax) + 15)))
        return BasisSet(self.kind, B, self.sector, self.origin)

    def _factor(self, k: float, bs: BasisSet | None = None, pts_b=None, w_b=None):
        bs = bs or self.basis(k)
        if pts_b is None:
            pts_b, w_b = self.pts_b, self.w_b
        Ab = bs(k, pts_b) * w_b[:, None]
        Ai = bs(k, self.pts_i) * self.w_i
        Q, R, P = la.qr(np.vstack([Ab, Ai]), mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        r = int(np.count_nonzero(diag > diag[0] * self.cfg.rtol)) if diag.size else 0
        return bs, Q[: len(Ab), :r], R[:r, :r], P[:r]

    def tensions(self, k: float, bs: BasisSet | None = None, pts_b=None, w_b=None) -> np.ndarray:
        """All generalised singular values at ``k`` in increasing order."""
        _, QB, _, _ = self._factor(k, bs, pts_b, w_b)
        s = np.sort(la.svd(QB, compute_uv=False))
        s = np.minimum(s, 1 - 1e-16)
        return s / np.sqrt(1 - s * s)

    def tension(self, k: float, bs: BasisSet | None = None, pts_b=None, w_b=None) -> float:
        return float(self.tensions(k, bs, pts_b, w_b)[0])

    def null_vectors(self, k: float, count: int, bs: BasisSet | None = None, pts_b=None, w_b=None):
        bs, QB, R, P = self._factor(k, bs, pts_b, w_b)
        _, s, Vt = la.svd(QB, full_matrices=False)
        order = np.argsort(s)[:count]
        out = []
        for j in order:
            c = np.zeros(bs.size)
            c[P] = la.solve_triangular(R, Vt[j])
            sj = min(s[j], 1 - 1e-16)
            out.append((sj / math.sqrt(1 - sj * sj), c))
        return bs, out

    def mfs_setup(self, k: float):
        """Exterior sources and matching collocation points for polishing near ``k``."""
        length = sum(p.length for p in self.pieces)
        n = max(self.cfg.mfs_min_sources, int(math.ceil(self.cfg.mfs_density * k * length)))
        # far sources cannot resolve the arc junctions at low k
        off = min(self.cfg.mfs_offset * 2 * math.pi / k, 0.06 * self.domain.scale)
        pts, nrm = self._boundary_frame(n)
        bs = BasisSet("fundamental", n, self.sector, sources=pts - off * nrm)
        pb, w = self._boundary_points(2 * n)
        return bs, pb, w

    def _boundary_frame(self, M: int):
        lengths = np.array([p.length for p in self.pieces])
        counts = np.maximum(1, np.round(M * lengths / lengths.sum()).astype(int))
        pts, nrm = [], []
        for p, m in zip(self.pieces, counts):
            for v in (np.arange(m) + 0.5) / m:
                pts.append(p.point(float(v) * p.length))
                nrm.append(p.normal(float(v) * p.length))
        return np.array(pts), np.array(nrm)

    def polish_minimum(self, k0: float, half_width: float):
        """Minimise the fundamental-solution tension on ``[k0 - w, k0 + w]``.

        Returns ``(k, tensions, basis, boundary points, weights)``.
        """
        bs, pb, w = self.mfs_setup(k0)
        res = minimize_scalar(lambda k: self.tension(k, bs, pb, w), method="bounded",
                              bounds=(k0 - half_width, k0 + half_width),
                              options={"xatol": max(1e-13, 1e-12 * k0)})
        k = float(res.x)
        return k, self.tensions(k, bs, pb, w), bs, pb, w

    def predicted_count(self, lam_lo: float, lam_hi: float) -> float:
        A, Lp = self.domain.area, self.weyl_perimeter

        def N(lam):
            return A * lam / (4 * math.pi) - Lp * math.sqrt(lam) / (4 * math.pi)
        return max(0.0, N(lam_hi) - N(lam_lo))

    def k_grid(self, k_lo: float, k_hi: float) -> np.ndarray:
        if self.cfg.scan_step is not None:
            n = max(2, int(math.ceil((k_hi - k_lo) / self.cfg.scan_step)) + 1)
            return np.linspace(k_lo, k_hi, n)
        A = self.domain.area
        ks = [k_lo]
        while ks[-1] < k_hi:
            ks.append(ks[-1] + min(0.05, 0.05 * 2 * math.pi / (A * max(ks[-1], 1e-3))))
        ks[-1] = max(ks[-1], k_hi)
        return np.array(ks)


def _window(window) -> tuple[float, float]:
    lo, hi = float(window[0]), float(window[1])
    if not (0 < lo < hi) or not math.isfinite(hi):
        raise InvalidParameter("window must satisfy 0 < lambda_lo < lambda_hi")
    return lo, hi


def tension_scan(d: G.Domain, window, cfg: MPSConfig = MPSConfig(),
                 problem: MPSProblem | None = None) -> TensionCurve:
    """Dense scan of ``t`` over the window followed by golden-section refinement of each dip."""
    lo, hi = _window(window)
    pb = problem or MPSProblem(d, cfg)
    k_lo, k_hi = math.sqrt(lo), math.sqrt(hi)
    ks = pb.k_grid(k_lo, k_hi)
    dk = ks[1] - ks[0] if len(ks) > 1 else 0.01
    ks = np.concatenate([[max(1e-6, k_lo - dk)], ks, [k_hi + (ks[-1] - ks[-2] if len(ks) > 1 else dk)]])
    ts = np.array([pb.tension(k) for k in ks])
    if np.median(ts) < 1e-10:
        raise ConditioningError("tension sits at the numerical floor across the window; "
                                "reduce the basis size B")
    minima: list[tuple[float, float, int]] = []
    for i in range(1, len(ks) - 1):
        if not (ts[i] < ts[i - 1] and ts[i] <= ts[i + 1]):
            continue
        res = minimize_scalar(pb.tension, bracket=(ks[i - 1], ks[i], ks[i + 1]),
                              method="golden", tol=cfg.refine_tol)
        k0 = float(res.x)
        tv = pb.tensions(k0)
        if tv[0] >= pb.threshold:
            continue
        lam = k0 * k0
        if not lo <= lam <= hi:
            continue
        if minima and abs(lam - minima[-1][0]) <= 1e-7 * lam:
            continue
        mult = int(min(cfg.max_multiplicity, np.count_nonzero(tv < pb.threshold)))
        minima.append((lam, float(tv[0]), mult))
    found = sum(m[2] for m in minima)
    predicted = pb.predicted_count(lo, hi)
    warn = predicted >= 1 and predicted > 1.2 * found
    return TensionCurve(ks ** 2, ts, minima, predicted, bool(warn))


@dataclass
class MPSResult:
    spectrum: SpectrumWindow
    pairs: list[MPSEigenPair]
    curve: TensionCurve
    problem: MPSProblem = field(repr=False)

    @property
    def warning(self) -> bool:
        return self.curve.warning

    def to_dict(self, with_coeffs: bool = True) -> dict:
        out = self.spectrum.to_dict()
        out["warning"] = self.warning
        out["predicted"] = self.curve.predicted
        if with_coeffs:
            out["modes"] = [_mode_dict(p) for p in self.pairs]
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _mode_dict(p: MPSEigenPair) -> dict:
    out = {"eigenvalue": p.eigenvalue, "k": p.k, "tension": p.tension,
           "boundary_residual": p.boundary_residual, "norm": p.norm,
           "basis_size": p.index[2], "coeffs": p.coeffs.tolist()}
    if p.basis is not None and p.basis.kind == "fundamental":
        out["basis"] = "fundamental"
        out["sources"] = p.basis.sources.tolist()
    return out


def _make_pair(pb: MPSProblem, bs: BasisSet, k: float, t: float, c: np.ndarray,
               idx: int, j: int, nodes, weights) -> MPSEigenPair:
    vals = bs(k, nodes) @ c
    nrm = math.sqrt(float(np.sum(weights * vals * vals)))
    c = c / nrm
    res = float(np.max(np.abs(bs(k, pb.fine_b) @ c)))

    def ev(pts, bs=bs, k=k, c=c):
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        return (bs(k, pts.reshape(-1, 2)) @ c).reshape(shape)
    return MPSEigenPair(k * k, "dirichlet", (idx, j, bs.B), ev, nrm, "mps", t, res, k, c, bs)


def _polish(pb: MPSProblem, minima, window):
    """Re-locate plane-wave minima with the fundamental-solution basis.

    A minimum keeps its plane-wave values when polishing does not lower the
    tension below ``polish_threshold``; minima that polish onto the same
    eigenvalue are merged.
    """
    lo, hi = window
    ks = [math.sqrt(m[0]) for m in minima]
    out = []
    for i, (lam, t, mult) in enumerate(minima):
        k0 = ks[i]
        gaps = [abs(k0 - ks[j]) for j in (i - 1, i + 1) if 0 <= j < len(ks)]
        half = min([0.5 * g for g in gaps] + [0.05 * 2 * math.pi / (pb.domain.area * k0), 0.01])
        k, tv, bs, pts_b, w_b = pb.polish_minimum(k0, half)
        if not (tv[0] < pb.cfg.polish_threshold and tv[0] < t and lo <= k * k <= hi):
            out.append((lam, t, mult))
            continue
        m = int(min(pb.cfg.max_multiplicity, np.count_nonzero(tv < pb.cfg.polish_threshold)))
        if out and abs(k * k - out[-1][0]) <= 1e-9 * k * k:
            continue
        out.append((k * k, float(tv[0]), m, (bs, pts_b, w_b)))
    return out


def mps_solve(d: G.Domain, window, cfg: MPSConfig = MPSConfig(), quad_n: int = 64) -> MPSResult:
    """Eigenvalues in ``window`` with L2-normalised eigenfunctions.

    Degenerate eigenvalues are returned once per dimension of the near-null
    singular subspace.  An empty window gives an empty result.
    """
    pb = MPSProblem(d, cfg)
    curve = tension_scan(d, window, cfg, pb)
    if pb.polish:
        curve.minima = _polish(pb, curve.minima, _window(window))
    nodes, weights = G.quadrature(pb.domain, quad_n)
    pairs: list[MPSEigenPair] = []
    for idx, (lam, _, mult, *polished) in enumerate(curve.minima):
        k = math.sqrt(lam)
        if polished:
            bs, pts_b, w_b = polished[0]
            _, vecs = pb.null_vectors(k, mult, bs, pts_b, w_b)
        else:
            bs, vecs = pb.null_vectors(k, mult)
        for j, (t, c) in enumerate(vecs):
            pairs.append(_make_pair(pb, bs, k, t, c, idx, j, nodes, weights))
    curve.minima = [tuple(m[:3]) for m in curve.minima]
    spec = SpectrumWindow(np.array([p.eigenvalue for p in pairs]), pb.domain.to_dict(),
                          _window(window), cfg.sector,
                          np.array([p.tension for p in pairs]),
                          {**asdict(cfg), "threshold": pb.threshold, "basis": pb.kind})
    return MPSResult(spec, pairs, curve, pb)


def pairs_from_dict(d: G.Domain, data: dict) -> list[MPSEigenPair]:
    """Rebuild evaluable eigenpairs from :meth:`MPSResult.to_dict` output."""
    c = data["cfg"]
    cfg = MPSConfig(**{k: c[k] for k in MPSConfig.__dataclass_fields__ if k in c})
    pb = MPSProblem(d, replace(cfg, basis=c.get("basis", cfg.basis)))
    out = []
    for i, m in enumerate(data.get("modes", [])):
        if m.get("basis") == "fundamental":
            bs = BasisSet("fundamental", 0, pb.sector, sources=m["sources"])
        else:
            bs = BasisSet(pb.kind, m["basis_size"], pb.sector, pb.origin)
        coeffs = np.asarray(m["coeffs"], dtype=float)

        def ev(pts, bs=bs, k=m["k"], c=coeffs):
            pts = np.asarray(pts, dtype=float)
            return (bs(k, pts.reshape(-1, 2)) @ c).reshape(pts.shape[:-1])
        out.append(MPSEigenPair(m["eigenvalue"], "dirichlet", (i, 0, m["basis_size"]), ev,
                                m["norm"], "mps", m["tension"], m["boundary_residual"],
                                m["k"], coeffs, bs))
    return out


# ---------------------------------------------------------------- rasters

@dataclass
class Raster:
    """Row-major samples on an ``ny x nx`` cell-centred grid over ``bbox``."""

    values: np.ndarray
    bbox: tuple[float, float, float, float]

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def cell_area(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return (x1 - x0) * (y1 - y0) / (self.nx * self.ny)

    def centers(self):
        x0, y0, x1, y1 = self.bbox
        xs = x0 + (np.arange(self.nx) + 0.5) * (x1 - x0) / self.nx
        ys = y0 + (np.arange(self.ny) + 0.5) * (y1 - y0) / self.ny
        return xs, ys

    def header(self) -> dict:
        return {"nx": self.nx, "ny": self.ny, "bbox": list(map(float, self.bbox))}

    def to_text(self) -> str:
        lines = [json.dumps(self.header())]
        lines += [",".join(repr(float(v)) for v in row) for row in self.values]
        return "\n".join(lines) + "\n"


def raster_points(bbox, nx: int, ny: int):
    x0, y0, x1, y1 = bbox
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    X, Y = np.meshgrid(xs, ys)
    return np.stack([X, Y], axis=-1)


def eigenfunction_raster(pair, d: G.Domain, nx: int = 128, ny: int = 128) -> Raster:
    """Signed eigenfunction values on the bounding box of ``d``; zero outside ``d``."""
    pts = raster_points(d.bbox, nx, ny)
    flat = pts.reshape(-1, 2)
    inside = np.asarray(d.contains(flat), dtype=bool)
    vals = np.zeros(len(flat))
    if inside.any():
        vals[inside] = np.asarray(pair(flat[inside]), dtype=float).ravel()
    return Raster(vals.reshape(ny, nx), d.bbox)


def eigenfunction_density(pair, d: G.Domain, nx: int = 128, ny: int = 128) -> Raster:
    """``|phi|^2`` raster over the bounding box of ``d``."""
    r = eigenfunction_raster(pair, d, nx, ny)
    return Raster(r.values ** 2, r.bbox)


def sector_pair_on_stadium(pair: MPSEigenPair) -> MPSEigenPair:
    """Same eigenfunction renormalised on the full stadium (quarter norm divided by 4)."""
    c = pair.coeffs / 2.0
    base = pair.evaluator

    def ev(pts, base=base):
        return 0.5 * base(pts)
    return replace(pair, evaluator=ev, coeffs=c, norm=pair.norm * 2.0)
