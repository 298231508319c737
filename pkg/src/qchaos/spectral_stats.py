"""Level counting, Weyl-law fits, phase-space volumes and spacing statistics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .errors import BoxTooSmall, InsufficientData, InvalidParameter


@dataclass
class SpectrumWindow:
    """Sorted eigenvalues with their provenance.

    ``source`` describes where the levels came from (a serialised domain or
    a quantised Hamiltonian); ``h`` and ``dim`` are set for semiclassical
    spectra.
    """

    eigenvalues: np.ndarray
    source: dict = field(default_factory=dict)
    window: tuple[float, float] | None = None
    sector: str = "none"
    tension: np.ndarray | None = None
    cfg: dict | None = None
    h: float | None = None
    dim: int | None = None
    unfolding: tuple[float, float, float] | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).ravel()
        if not np.all(np.isfinite(ev)) or np.any(ev < 0):
            raise InvalidParameter("eigenvalues must be finite and non-negative")
        order = np.argsort(ev, kind="stable")
        self.eigenvalues = ev[order]
        if self.tension is not None:
            self.tension = np.asarray(self.tension, dtype=float).ravel()[order]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "domain": self.source,
            "sector": self.sector,
            "window": None if self.window is None else [float(v) for v in self.window],
            "eigenvalues": self.eigenvalues.tolist(),
            "tension": None if self.tension is None else self.tension.tolist(),
            "cfg": self.cfg,
            "h": self.h,
            "dim": self.dim,
            "unfolding": None if self.unfolding is None else list(self.unfolding),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumWindow":
        return cls(np.asarray(d["eigenvalues"], dtype=float), d.get("domain") or {},
                   None if d.get("window") is None else tuple(d["window"]),
                   d.get("sector", "none"),
                   None if d.get("tension") is None else np.asarray(d["tension"]),
                   d.get("cfg"), d.get("h"), d.get("dim"),
                   None if d.get("unfolding") is None else tuple(d["unfolding"]))

    def staircase_csv(self) -> str:
        """``(lambda, N)`` rows with ``N`` counting levels up to and including ``lambda``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "N"])
        for i, lam in enumerate(self.eigenvalues):
            w.writerow([repr(float(lam)), i + 1])
        return buf.getvalue()


def _values(w) -> np.ndarray:
    return w.eigenvalues if isinstance(w, SpectrumWindow) else np.sort(np.asarray(w, dtype=float))


def count_levels(w, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam``."""
    return int(np.searchsorted(_values(w), lam, side="left"))


def count_in(w, a: float, b: float) -> int:
    """Number of eigenvalues with ``a <= E <= b``."""
    ev = _values(w)
    return int(np.searchsorted(ev, b, side="right") - np.searchsorted(ev, a, side="left"))


# ---------------------------------------------------------------- Weyl fits

@dataclass
class WeylFit:
    c1: float
    c2: float
    c3: float
    reference: float | None
    rel_error: float | None
    perimeter_reference: float | None
    levels: int

    def smooth(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.c1 * lam + self.c2 * np.sqrt(lam) + self.c3

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("c1", "c2", "c3", "reference", "rel_error", "perimeter_reference", "levels")}


def weyl_fit(w, d=None, area: float | None = None, perimeter: float | None = None,
             min_levels: int = 50) -> WeylFit:
    """Least-squares fit ``N(lambda) = c1 lambda + c2 sqrt(lambda) + c3`` on staircase midpoints.

    The reference slope is ``area / 4 pi`` (taken from ``d`` when given) and the
    Dirichlet perimeter reference is ``-perimeter / 4 pi``.
    """
    ev = _values(w)
    if len(ev) < min_levels:
        raise InsufficientData(f"Weyl fit needs at least {min_levels} levels, got {len(ev)}")
    if d is not None:
        area = d.area if area is None else area
        perimeter = d.perimeter if perimeter is None else perimeter
    counts = np.arange(len(ev)) + 0.5
    M = np.column_stack([ev, np.sqrt(ev), np.ones_like(ev)])
    (c1, c2, c3), *_ = np.linalg.lstsq(M, counts, rcond=None)
    ref = None if area is None else area / (4 * math.pi)
    rel = None if ref is None else float(abs(c1 - ref) / ref)
    pref = None if perimeter is None else -perimeter / (4 * math.pi)
    return WeylFit(float(c1), float(c2), float(c3), ref, rel, pref, len(ev))


def sho_level_count(dim: int, h: float, b: float = 1.0) -> int:
    """``#{E <= b}`` for the oscillator ``-h^2 Laplacian + |x|^2`` by exact enumeration."""
    from .analytic_spectra import sho_eigenvalues
    return int(len(sho_eigenvalues(dim, h, b)))


def sho_weyl_prediction(dim: int, h: float, b: float = 1.0) -> float:
    """``b^n / (n! (2h)^n)``."""
    return b ** dim / (math.factorial(dim) * (2 * h) ** dim)


# ---------------------------------------------------------------- phase volumes

@dataclass
class VolumeEstimate:
    volume: float
    se: float
    samples: int
    face_fraction: float


def phase_volume(xi: Callable[[np.ndarray], np.ndarray], box: Sequence[tuple[float, float]],
                 a: float, b: float, samples: int = 100_000, seed: int = 0,
                 face_samples: int = 20_000, face_tol: float = 1e-3) -> VolumeEstimate:
    """Monte Carlo volume of ``{a <= xi <= b}`` inside ``box``.

    ``xi`` maps an ``(M, dim)`` array to ``M`` values.  The box is probed on its
    faces as well; if at least ``face_tol`` of the face samples fall in the
    shell the box is declared too small.
    """
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 1] <= box[:, 0]):
        raise InvalidParameter("box must be a list of (lo, hi) pairs with lo < hi")
    if samples < 100_000:
        raise InvalidParameter("phase_volume needs at least 1e5 samples")
    dim = len(box)
    rng = np.random.default_rng(seed)
    lo, hi = box[:, 0], box[:, 1]
    vol_box = float(np.prod(hi - lo))

    faces = rng.uniform(lo, hi, size=(face_samples, dim))
    axis = rng.integers(0, dim, face_samples)
    side = rng.integers(0, 2, face_samples)
    faces[np.arange(face_samples), axis] = np.where(side == 1, hi[axis], lo[axis])
    fv = xi(faces)
    frac = float(np.mean((fv >= a) & (fv <= b)))
    if frac >= face_tol:
        raise BoxTooSmall(f"{100 * frac:.2f}% of face samples lie in the level region")

    hits = 0
    chunk = 50_000
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        v = xi(rng.uniform(lo, hi, size=(m, dim)))
        hits += int(np.count_nonzero((v >= a) & (v <= b)))
        done += m
    p = hits / samples
    return VolumeEstimate(vol_box * p, vol_box * math.sqrt(p * (1 - p) / samples), samples, frac)


def quadratic_form(x: np.ndarray) -> np.ndarray:
    """``|x|^2 + |p|^2`` for rows ``(x_1..x_n, p_1..p_n)``."""
    return np.sum(np.asarray(x) ** 2, axis=1)


# ---------------------------------------------------------------- unfolding and spacings

def poisson_pdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, np.exp(-s), 0.0)


def poisson_cdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, 1 - np.exp(-s), 0.0)


def wigner_pdf(s):
    """GOE Wigner surmise ``(pi/2) s exp(-pi s^2 / 4)``."""
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, 0.5 * math.pi * s * np.exp(-math.pi * s * s / 4), 0.0)


def wigner_cdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, 1 - np.exp(-math.pi * s * s / 4), 0.0)


@dataclass
class SpacingSample:
    spacings: np.ndarray
    unfolded: np.ndarray
    fit: WeylFit | None = None

    @property
    def mean(self) -> float:
        return float(np.mean(self.spacings))

    def ecdf(self) -> tuple[np.ndarray, np.ndarray]:
        s = np.sort(self.spacings)
        return s, np.arange(1, len(s) + 1) / len(s)

    def ecdf_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "ecdf"])
        for s, F in zip(*self.ecdf()):
            w.writerow([repr(float(s)), repr(float(F))])
        return buf.getvalue()


def unfold(w, d=None, fit: WeylFit | None = None, min_levels: int = 50) -> SpacingSample:
    """Map levels through the fitted smooth counting function and take consecutive gaps."""
    ev = _values(w)
    if fit is None:
        fit = weyl_fit(ev, d, min_levels=min_levels)
    x = fit.smooth(ev)
    return SpacingSample(np.diff(x), x, fit)


def spacing_sample(spacings) -> SpacingSample:
    s = np.asarray(spacings, dtype=float)
    return SpacingSample(s, np.concatenate([[0.0], np.cumsum(s)]))


@dataclass
class SpacingVerdict:
    ks_poisson: float
    ks_goe: float
    verdict: str
    n: int
    mean: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def spacing_test(sample: SpacingSample, gap: float = 0.05) -> SpacingVerdict:
    """KS distances of the spacings to the Poisson and Wigner-surmise laws."""
    s = np.asarray(sample.spacings, dtype=float)
    if len(s) < 100:
        raise InsufficientData(f"spacing test needs at least 100 spacings, got {len(s)}")
    kp = float(stats.kstest(s, poisson_cdf).statistic)
    kg = float(stats.kstest(s, wigner_cdf).statistic)
    if abs(kp - kg) <= gap:
        verdict = "inconclusive"
    else:
        verdict = "poisson" if kp < kg else "goe"
    return SpacingVerdict(kp, kg, verdict, len(s), float(np.mean(s)))
