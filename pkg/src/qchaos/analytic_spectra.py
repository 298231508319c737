"""Closed-form Laplacian eigenpairs: circle, rectangle, disk and the harmonic oscillator."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameter
from .special import bessel_j, bessel_zeros_below, hermite_function


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue together with an evaluable, L2-normalised eigenfunction.

    ``evaluator`` maps an array of points (shape ``(M, 2)`` for planar modes,
    ``(M,)`` angles on the circle, ``(M,)`` or ``(M, n)`` for the oscillator)
    to function values.
    """

    eigenvalue: float
    bc: str
    index: tuple
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    norm: float = 1.0
    family: str = ""

    def __call__(self, pts):
        return self.evaluator(np.asarray(pts, dtype=float))


def _check_count(count):
    if int(count) != count or count < 1:
        raise InvalidParameter("count must be a positive integer")


# ---------------------------------------------------------------- rectangle

def rectangle_eigenvalues(a: float, b: float, bc: str = "dirichlet", lmax: float = 1e4):
    """All rectangle eigenvalues ``<= lmax`` with their ``(j, k)`` indices, sorted."""
    if bc not in ("dirichlet", "neumann"):
        raise InvalidParameter(f"unknown boundary condition {bc!r}")
    start = 1 if bc == "dirichlet" else 0
    jmax = int(math.floor(a * math.sqrt(lmax) / math.pi))
    kmax = int(math.floor(b * math.sqrt(lmax) / math.pi))
    j = np.arange(start, jmax + 1)
    k = np.arange(start, kmax + 1)
    J, K = np.meshgrid(j, k, indexing="ij")
    lam = (J * math.pi / a) ** 2 + (K * math.pi / b) ** 2
    keep = lam <= lmax
    J, K, lam = J[keep], K[keep], lam[keep]
    order = np.lexsort((K, J, lam))
    return lam[order], np.c_[J[order], K[order]]


def _rect_mode(a, b, bc, j, k):
    if bc == "dirichlet":
        c = 2.0 / math.sqrt(a * b)

        def f(p, j=j, k=k):
            return c * np.sin(j * math.pi * p[..., 0] / a) * np.sin(k * math.pi * p[..., 1] / b)
    else:
        c = math.sqrt((1 if j == 0 else 2) * (1 if k == 0 else 2) / (a * b))

        def f(p, j=j, k=k):
            return c * np.cos(j * math.pi * p[..., 0] / a) * np.cos(k * math.pi * p[..., 1] / b)
    return f, c


def rectangle_modes(a: float, b: float, bc: str = "dirichlet", count: int = 10) -> list[EigenPair]:
    """The ``count`` lowest modes of ``[0, a] x [0, b]``; ties ordered by ``(j, k)``."""
    if not (a > 0 and b > 0):
        raise InvalidParameter("rectangle sides must be positive")
    _check_count(count)
    lmax = 4 * math.pi * count / (a * b) + 2 * (math.pi / min(a, b)) ** 2
    while True:
        lam, idx = rectangle_eigenvalues(a, b, bc, lmax)
        if len(lam) >= count:
            break
        lmax *= 2
    out = []
    for l, (j, k) in zip(lam[:count], idx[:count]):
        f, c = _rect_mode(a, b, bc, int(j), int(k))
        out.append(EigenPair(float(l), bc, (int(j), int(k)), f, c, "rectangle"))
    return out


# ---------------------------------------------------------------- disk

def disk_eigenvalues(lmax: float, radius: float = 1.0):
    """Dirichlet disk eigenvalues ``<= lmax`` as rows ``(lambda, k, m, multiplicity)``."""
    xmax = math.sqrt(lmax) * radius
    rows = []
    k = 0
    while k < xmax:
        for m, z in enumerate(bessel_zeros_below(k, xmax), start=1):
            rows.append(((z / radius) ** 2, k, m, 1 if k == 0 else 2))
        k += 1
    rows.sort()
    return rows


def disk_modes(count: int = 10, radius: float = 1.0) -> list[EigenPair]:
    """Lowest ``count`` Dirichlet modes of the disk; ``k >= 1`` gives a cos/sin pair."""
    _check_count(count)
    lmax = 4.0 * count / radius ** 2 + 20.0
    while True:
        rows = disk_eigenvalues(lmax, radius)
        if sum(r[3] for r in rows) >= count:
            break
        lmax *= 2
    out = []
    for lam, k, m, mult in rows:
        z = math.sqrt(lam) * radius
        if k == 0:
            c = 1.0 / (math.sqrt(math.pi) * radius * abs(bessel_j(1, z)))
            parts = [("c", c)]
        else:
            c = math.sqrt(2.0) / (math.sqrt(math.pi) * radius * abs(bessel_j(k + 1, z)))
            parts = [("c", c), ("s", c)]
        for kind, cc in parts:
            def f(p, k=k, s=math.sqrt(lam), cc=cc, kind=kind):
                r = np.hypot(p[..., 0], p[..., 1])
                th = np.arctan2(p[..., 1], p[..., 0])
                ang = np.cos(k * th) if kind == "c" else np.sin(k * th)
                return cc * bessel_j(k, s * r) * ang
            out.append(EigenPair(float(lam), "dirichlet", (k, m, kind), f, cc, "disk"))
            if len(out) == count:
                return out
    return out


# ---------------------------------------------------------------- circle

def circle_modes(count: int = 10) -> list[EigenPair]:
    """Modes ``e^{i n theta} / sqrt(2 pi)`` on the unit circle, ordered ``0, 1, -1, 2, -2, ...``."""
    _check_count(count)
    out = []
    c = 1.0 / math.sqrt(2 * math.pi)
    for i in range(count):
        n = (i + 1) // 2 * (1 if i % 2 else -1)

        def f(theta, n=n):
            return c * np.exp(1j * n * np.asarray(theta))
        out.append(EigenPair(float(n * n), "none", (n,), f, c, "circle"))
    return out


# ---------------------------------------------------------------- oscillator

def _multi_indices(dim, count):
    out = []
    total = 0
    while len(out) < count:
        level = sorted(a for a in itertools.product(range(total + 1), repeat=dim) if sum(a) == total)
        out.extend(level)
        total += 1
    return out[:count]


def sho_modes(dim: int = 1, h: float = 1.0, count: int = 10) -> list[EigenPair]:
    """Eigenpairs of ``-h^2 Laplacian + |x|^2`` in ``dim`` dimensions: ``E = (2|alpha| + dim) h``."""
    if dim not in (1, 2):
        raise InvalidParameter("harmonic oscillator modes are provided for dim 1 or 2")
    if not h > 0:
        raise InvalidParameter("h must be positive")
    _check_count(count)
    out = []
    for alpha in _multi_indices(dim, count):
        energy = (2 * sum(alpha) + dim) * h

        def f(x, alpha=alpha):
            x = np.asarray(x, dtype=float)
            if dim == 1 and x.ndim == 1:
                x = x[:, None]
            val = np.full(x.shape[0], h ** (-dim / 4))
            for i, a in enumerate(alpha):
                val = val * hermite_function(a, x[:, i] / math.sqrt(h))
            return val
        out.append(EigenPair(float(energy), "none", tuple(alpha), f, h ** (-dim / 4), "sho"))
    return out


def sho_eigenvalues(dim: int, h: float, emax: float) -> np.ndarray:
    """All oscillator energies ``(2|alpha| + dim) h <= emax`` with multiplicity."""
    nmax = int(math.floor((emax / h - dim) / 2 + 1e-9))
    if nmax < 0:
        return np.empty(0)
    levels = np.arange(nmax + 1)
    mult = np.array([math.comb(n + dim - 1, dim - 1) for n in levels])
    return np.repeat((2 * levels + dim) * h, mult)
