"""Discrete one-dimensional semiclassical calculus on a periodic grid.

The grid has ``N`` points ``x_j = -L/2 + j L/N`` and momenta
``p_k = 2 pi h k / L`` for ``k in [-N/2, N/2)``.  Symbols are quantised by
the discretised t-quantisation integral

    A[m, n] = (1/N) sum_k a(z_mn, p_k) exp(2 pi i k (m - n) / N)

with ``z_mn = x_n + t (x_m - x_n)``.  Two midpoint conventions exist:

* ``"torus"`` (default): ``x_m - x_n`` is the minimal-image difference and
  ``z`` is wrapped into the box, so kernels of localised symbols do not leak
  across the periodic seam.  Needed whenever operator norms are measured.
* ``"direct"``: the literal ``t x_m + (1 - t) x_n``; exact for polynomial
  symbols such as ``x p`` but couples the two ends of the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AliasingError, InvalidParameter, NeedsDerivatives, ResolutionError

ArrayFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


# ---------------------------------------------------------------- grid

@dataclass(frozen=True)
class GridSpec:
    N: int
    L: float
    h: float

    def __post_init__(self):
        N = int(self.N)
        if N < 64 or N > 1024 or N & (N - 1):
            raise InvalidParameter("N must be a power of two between 64 and 1024")
        if not (self.L > 0 and self.h > 0):
            raise InvalidParameter("L and h must be positive")
        object.__setattr__(self, "N", N)

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dp(self) -> float:
        return 2 * math.pi * self.h / self.L

    @property
    def x(self) -> np.ndarray:
        return -self.L / 2 + np.arange(self.N) * self.dx

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2)

    @property
    def p(self) -> np.ndarray:
        """Momenta in increasing order."""
        return self.k * self.dp

    @property
    def p_fft(self) -> np.ndarray:
        """Momenta in FFT order (``k mod N``)."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N) * self.dp

    @property
    def p_max(self) -> float:
        return math.pi * self.h * self.N / self.L

    def norm(self, f) -> float:
        return math.sqrt(float(np.sum(np.abs(f) ** 2)) * self.dx)

    def momentum_norm(self, F) -> float:
        return math.sqrt(float(np.sum(np.abs(F) ** 2)) * self.dp)

    def inner(self, f, g) -> complex:
        return complex(np.vdot(f, g) * self.dx)


def scaled_grid(h: float, L: float, N_ref: int, h_ref: float) -> GridSpec:
    """Grid with ``N`` proportional to ``1/h`` (fixed momentum band)."""
    N = int(round(N_ref * h_ref / h))
    return GridSpec(N, L, h)


# ---------------------------------------------------------------- Fourier transform

def _sign(g: GridSpec) -> np.ndarray:
    return np.where(g.k % 2 == 0, 1.0, -1.0)


def sft(f, g: GridSpec) -> np.ndarray:
    """Semiclassical Fourier transform ``int exp(-i x p / h) f(x) dx`` sampled at ``g.p``."""
    f = np.asarray(f, dtype=complex)
    return g.dx * _sign(g) * np.fft.fftshift(np.fft.fft(f))


def isft(F, g: GridSpec) -> np.ndarray:
    """Inverse of :func:`sft`: ``(2 pi h)^-1 int exp(i x p / h) F(p) dp``."""
    F = np.asarray(F, dtype=complex)
    return np.fft.ifft(np.fft.ifftshift(_sign(g) * F)) / g.dx


def edge_window(g: GridSpec, fraction: float = 0.1) -> np.ndarray:
    """Smooth cutoff equal to 1 inside and rolling off (erf) across the outer ``fraction`` of the box."""
    from scipy.special import erf
    if not 0 < fraction < 1:
        raise InvalidParameter("fraction must lie in (0, 1)")
    half = g.L / 2
    mid = half * (1 - fraction / 2)
    return 0.5 * (1 - erf((np.abs(g.x) - mid) / (fraction * half / 4)))


# ---------------------------------------------------------------- symbols

@dataclass(frozen=True)
class Symbol:
    """Classical observable ``a(x, p)`` with optional analytic partial derivatives.

    ``p_support`` is the momentum radius outside which ``a`` is negligible;
    ``None`` means the symbol is a polynomial or Fourier multiplier handled
    exactly by the grid.
    """

    func: ArrayFn
    dx: ArrayFn | None = None
    dp: ArrayFn | None = None
    p_support: float | None = None
    real: bool = True
    name: str = ""

    def __call__(self, x, p):
        x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
        return np.broadcast_to(self.func(x, p), x.shape)

    def __add__(self, other: "Symbol") -> "Symbol":
        return Symbol(lambda x, p: self(x, p) + other(x, p),
                      _sum(self.dx, other.dx), _sum(self.dp, other.dp),
                      _max_support(self.p_support, other.p_support),
                      self.real and other.real, f"({self.name}+{other.name})")

    def __mul__(self, other: "Symbol | float") -> "Symbol":
        if not isinstance(other, Symbol):
            c = other
            return Symbol(lambda x, p: c * self(x, p),
                          None if self.dx is None else (lambda x, p: c * self.dx(x, p)),
                          None if self.dp is None else (lambda x, p: c * self.dp(x, p)),
                          self.p_support, self.real and np.isrealobj(c), f"{c}*{self.name}")
        a, b = self, other

        def deriv(da, db):
            if da is None or db is None:
                return None
            return lambda x, p: da(x, p) * b(x, p) + a(x, p) * db(x, p)
        return Symbol(lambda x, p: a(x, p) * b(x, p), deriv(a.dx, b.dx), deriv(a.dp, b.dp),
                      _min_support(a.p_support, b.p_support), a.real and b.real,
                      f"{a.name}*{b.name}")

    __rmul__ = __mul__

    def conj(self) -> "Symbol":
        if self.real:
            return self
        return Symbol(lambda x, p: np.conj(self(x, p)),
                      None if self.dx is None else (lambda x, p: np.conj(self.dx(x, p))),
                      None if self.dp is None else (lambda x, p: np.conj(self.dp(x, p))),
                      self.p_support, False, f"conj({self.name})")


def _sum(f, g):
    if f is None or g is None:
        return None
    return lambda x, p: f(x, p) + g(x, p)


def _max_support(a, b):
    if a is None or b is None:
        return None
    return max(a, b)


def _min_support(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def x_symbol(func, deriv=None, name="a(x)") -> Symbol:
    """Symbol depending on position only."""
    return Symbol(lambda x, p: func(x) + 0 * p,
                  None if deriv is None else (lambda x, p: deriv(x) + 0 * p),
                  lambda x, p: np.zeros(np.shape(x)), None, True, name)


def gaussian_symbol(x0=0.0, p0=0.0, sx=1.0, sp=1.0, amp=1.0) -> Symbol:
    """``amp * exp(-(x-x0)^2/sx^2 - (p-p0)^2/sp^2)`` with analytic partials."""
    def f(x, p):
        return amp * np.exp(-((x - x0) / sx) ** 2 - ((p - p0) / sp) ** 2)
    return Symbol(f, lambda x, p: -2 * (x - x0) / sx ** 2 * f(x, p),
                  lambda x, p: -2 * (p - p0) / sp ** 2 * f(x, p),
                  abs(p0) + 5.0 * sp, True, f"gauss({x0},{p0})")


X_SYMBOL = Symbol(lambda x, p: x + 0 * p, lambda x, p: np.ones(np.shape(x)),
                  lambda x, p: np.zeros(np.shape(x)), None, True, "x")
P_SYMBOL = Symbol(lambda x, p: p + 0 * x, lambda x, p: np.zeros(np.shape(x)),
                  lambda x, p: np.ones(np.shape(x)), None, True, "p")


def poisson_bracket(a: Symbol, b: Symbol, allow_fd: bool = False, fd_step: float = 1e-5) -> Symbol:
    """``{a, b} = a_p b_x - a_x b_p`` from analytic partials (so ``{x, p} = -1``).

    Missing partials raise :class:`NeedsDerivatives` unless ``allow_fd``; the
    finite-difference fallback uses central differences with a Richardson
    comparison at half the step.
    """
    parts = []
    for s in (a, b):
        if s.dx is None or s.dp is None:
            if not allow_fd:
                raise NeedsDerivatives(f"symbol {s.name!r} lacks analytic partials")
            parts.append((_fd(s, 0, fd_step), _fd(s, 1, fd_step)))
        else:
            parts.append((s.dx, s.dp))
    (ax, ap), (bx, bp) = parts
    return Symbol(lambda x, p: ap(x, p) * bx(x, p) - ax(x, p) * bp(x, p),
                  None, None, _min_support(a.p_support, b.p_support),
                  a.real and b.real, f"{{{a.name},{b.name}}}")


def _fd(s: Symbol, axis: int, step: float):
    def d(x, p, step=step):
        def cd(hh):
            if axis == 0:
                return (s(x + hh, p) - s(x - hh, p)) / (2 * hh)
            return (s(x, p + hh) - s(x, p - hh)) / (2 * hh)
        d1, d2 = cd(step), cd(step / 2)
        scale = max(1.0, float(np.max(np.abs(d2))))
        if np.max(np.abs(d1 - d2)) > 1e-5 * scale:
            raise NeedsDerivatives("finite-difference partials failed the Richardson check")
        return (4 * d2 - d1) / 3
    return d


# ---------------------------------------------------------------- operators

@dataclass
class QOperator:
    matrix: np.ndarray
    grid: GridSpec
    hermitian: bool = False

    def __matmul__(self, other):
        if isinstance(other, QOperator):
            return QOperator(self.matrix @ other.matrix, self.grid)
        return self.matrix @ np.asarray(other)

    def __sub__(self, other: "QOperator") -> "QOperator":
        return QOperator(self.matrix - other.matrix, self.grid)

    def __add__(self, other: "QOperator") -> "QOperator":
        return QOperator(self.matrix + other.matrix, self.grid, self.hermitian and other.hermitian)

    def __mul__(self, c) -> "QOperator":
        return QOperator(c * self.matrix, self.grid, self.hermitian and np.isrealobj(c))

    __rmul__ = __mul__

    @property
    def H(self) -> "QOperator":
        return QOperator(self.matrix.conj().T, self.grid, self.hermitian)

    def norm(self) -> float:
        """Operator norm (largest singular value)."""
        return operator_norm(self.matrix)

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def operator_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2))


def commutator(A: QOperator, B: QOperator) -> QOperator:
    return QOperator(A.matrix @ B.matrix - B.matrix @ A.matrix, A.grid)


def _kernel_table(a: Symbol, g: GridSpec) -> np.ndarray:
    # F[q, d] = (1/N) sum_k a(z_q, p_k) e^{2 pi i k d / N},  z_q = -L/2 + q dx/2
    z = -g.L / 2 + 0.5 * g.dx * np.arange(2 * g.N)
    S = a(z[:, None], g.p_fft[None, :])
    return np.fft.ifft(S, axis=1)


def quantize(a: Symbol, g: GridSpec, t: float = 0.5, convention: str = "torus") -> QOperator:
    """Matrix of the t-quantisation ``Op_t(a)`` on grid ``g`` (``t = 1/2`` is Weyl)."""
    if convention not in ("torus", "direct"):
        raise InvalidParameter(f"unknown convention {convention!r}")
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter("t must lie in [0, 1]")
    if a.p_support is not None and a.p_support > g.p_max:
        raise AliasingError(f"symbol support |p| <= {a.p_support} exceeds band {g.p_max:.4g}")
    N = g.N
    m = np.arange(N)[:, None]
    n = np.arange(N)[None, :]
    d = m - n
    two_t = 2 * t
    if abs(two_t - round(two_t)) < 1e-14:
        F = _kernel_table(a, g)
        tt = int(round(two_t))
        if convention == "direct":
            q = 2 * n + tt * d
            A = F[q, d % N]
        else:
            dw = (d + N // 2) % N - N // 2
            q = (2 * n + tt * dw) % (2 * N)
            A = F[q, dw % N]
            seam = dw == -(N // 2)
            if np.any(seam):
                q2 = (2 * n + tt * (N // 2)) % (2 * N)
                A = np.where(seam, 0.5 * (A + F[q2, dw % N]), A)
    else:
        A = _quantize_general(a, g, t, convention)
    herm = bool(a.real and abs(t - 0.5) < 1e-15)
    return QOperator(np.ascontiguousarray(A), g, herm)


def _quantize_general(a: Symbol, g: GridSpec, t: float, convention: str) -> np.ndarray:
    N = g.N
    x = g.x
    A = np.zeros((N, N), dtype=complex)
    phase_k = g.k
    for dd in range(-(N // 2), N // 2) if convention == "torus" else range(-N + 1, N):
        n = np.arange(N) if convention == "torus" else np.arange(max(0, -dd), min(N, N - dd))
        m = (n + dd) % N
        z = x[n] + t * dd * g.dx
        if convention == "torus":
            z = (z + g.L / 2) % g.L - g.L / 2
        vals = a(z[:, None], g.p[None, :])
        A[m, n] = vals @ np.exp(2j * np.pi * phase_k * dd / N) / N
    return A


def symmetrized_xp(g: GridSpec) -> np.ndarray:
    """``(1/2)(X P + P X)`` with ``P`` the spectral ``h D`` matrix."""
    X = np.diag(g.x)
    P = quantize(P_SYMBOL, g).matrix
    return 0.5 * (X @ P + P @ X)


# ---------------------------------------------------------------- checks

def _slope(hs, errs) -> float:
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    ok = errs > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(hs[ok]), np.log(errs[ok]), 1)[0])


@dataclass
class CheckReport:
    name: str
    h_list: list[float]
    errors: list[float]
    slope: float
    passed: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "h_list": list(map(float, self.h_list)),
               "errors": list(map(float, self.errors)), "slope": self.slope,
               "pass": bool(self.passed)}
        out.update(self.extra)
        return out


def gaussian_state(g: GridSpec, x0=0.0, p0=0.0, width=None) -> np.ndarray:
    """Normalised Gaussian wave packet of position width ``width`` (default ``sqrt(h)``)."""
    s = math.sqrt(g.h) if width is None else width
    x = g.x
    f = np.exp(-((x - x0) ** 2) / (2 * s * s) + 1j * p0 * x / g.h)
    return f / g.norm(f)


def canonical_commutator_defect(g: GridSpec, states: Sequence[np.ndarray] | None = None) -> float:
    """``max ||([X, P] - i h) f|| / ||f||`` over localised band-limited states.

    The identity cannot hold as a matrix equation (a commutator is
    traceless), so it is tested on wave packets well inside the box.
    """
    X = quantize(X_SYMBOL, g, convention="direct")
    P = quantize(P_SYMBOL, g)
    C = commutator(X, P).matrix
    if states is None:
        states = [gaussian_state(g, x0, p0, w)
                  for x0 in (-0.1 * g.L, 0.0, 0.1 * g.L)
                  for p0 in (-0.3 * g.p_max, 0.0, 0.3 * g.p_max)
                  for w in (0.5 * math.sqrt(g.h), math.sqrt(g.h), 2 * math.sqrt(g.h))]
        edge = np.abs(g.p) > 0.9 * g.p_max
        states = [f for f in states
                  if np.abs(sft(f, g))[edge].max() < 1e-13 * np.abs(sft(f, g)).max()]
        if not states:
            raise ResolutionError("no default wave packet fits inside the momentum band")
    worst = 0.0
    for f in states:
        r = C @ f - 1j * g.h * f
        worst = max(worst, g.norm(r) / g.norm(f))
    return worst


@dataclass
class MoyalReport:
    product: QOperator
    err_leading: float
    err_first: float


def moyal_product(a: Symbol, b: Symbol, g: GridSpec) -> MoyalReport:
    """Compare ``Op(a) Op(b)`` with ``Op(ab)`` and the first-order Moyal symbol in operator norm.

    The first-order symbol is ``ab + (h / 2i){a, b}``, which gives
    ``x # p = xp + i h / 2``.
    """
    A, B = quantize(a, g), quantize(b, g)
    AB = A @ B
    ab = a * b
    pb = poisson_bracket(a, b)
    first = Symbol(lambda x, p: ab(x, p) + (g.h / 2j) * pb(x, p),
                   p_support=_min_support(a.p_support, b.p_support), real=False)
    e0 = operator_norm(AB.matrix - quantize(ab, g).matrix)
    e1 = operator_norm(AB.matrix - quantize(first, g).matrix)
    return MoyalReport(AB, e0, e1)


def moyal_order(a: Symbol, b: Symbol, grids: Sequence[GridSpec]) -> CheckReport:
    """First-remainder norms across ``grids``; ``log2`` ratios should sit near 2."""
    e1 = [moyal_product(a, b, g).err_first for g in grids]
    hs = [g.h for g in grids]
    ratios = [math.log2(e1[i] / e1[i + 1]) * math.log(2) / math.log(hs[i] / hs[i + 1])
              for i in range(len(e1) - 1)]
    ok = all(1.6 <= r <= 2.4 for r in ratios)
    return CheckReport("moyal_order", hs, e1, _slope(hs, e1), ok, {"ratios": ratios})


def band_projector(g: GridSpec, fraction: float) -> np.ndarray:
    """Orthogonal projector onto grid functions with momenta ``|p| <= fraction * p_max``."""
    mask = np.abs(g.p_fft) <= fraction * g.p_max
    F = np.fft.fft(np.eye(g.N), axis=0)
    return np.fft.ifft(mask[:, None] * F, axis=0)


def commutator_check(a: Symbol, b: Symbol, grids: Sequence[GridSpec],
                     min_slope: float = 2.5, band_fraction: float | None = None) -> CheckReport:
    """Remainder ``||[Op a, Op b] - (h/i) Op{a,b}||`` across ``h``; flags slopes below ``min_slope``.

    ``band_fraction`` compresses the remainder to momenta ``|p| <= fraction * p_max``,
    which removes the wrap-around of unbounded symbols such as ``p^2`` at the
    band edge.
    """
    pb = poisson_bracket(a, b)
    errs = []
    for g in grids:
        C = commutator(quantize(a, g), quantize(b, g)).matrix
        R = C - (g.h / 1j) * quantize(pb, g).matrix
        if band_fraction is not None:
            Pi = band_projector(g, band_fraction)
            R = Pi @ R @ Pi
        errs.append(operator_norm(R))
    hs = [g.h for g in grids]
    scale = max(operator_norm(quantize(pb, g).matrix) * g.h for g in grids)
    exact = max(errs) < 1e-9 * max(1.0, scale)
    slope = _slope(hs, errs)
    low = not exact and not slope >= min_slope
    return CheckReport("commutator", hs, errs, slope, not low,
                       {"exact": exact, "flag_low_order": low, "band_fraction": band_fraction})


@dataclass
class UncertaintyResult:
    lhs: float
    rhs: float
    ratio: float


def uncertainty_check(f, g: GridSpec) -> UncertaintyResult:
    """``(h/2)||f|| ||F_h f||`` against ``||x f|| ||p F_h f||``."""
    f = np.asarray(f, dtype=complex)
    nf = g.norm(f)
    if nf == 0:
        raise InvalidParameter("uncertainty check needs a non-zero state")
    F = sft(f, g)
    lhs = 0.5 * g.h * nf * g.momentum_norm(F)
    rhs = g.norm(g.x * f) * g.momentum_norm(g.p * F)
    return UncertaintyResult(lhs, rhs, rhs / lhs)


@dataclass
class GardingResult:
    h_list: list[float]
    min_eigenvalues: list[float]
    lower_bound: float
    nondecreasing: bool


def garding_check(a: Symbol, grids: Sequence[GridSpec], c: float, noise: float = 1e-3) -> GardingResult:
    """Smallest eigenvalue of the Weyl quantisation of a real symbol with ``a >= c``."""
    if not a.real:
        raise InvalidParameter("Garding check needs a real symbol")
    grids = sorted(grids, key=lambda g: -g.h)
    mins = []
    for g in grids:
        Q = quantize(a, g)
        M = 0.5 * (Q.matrix + Q.matrix.conj().T)
        mins.append(float(np.linalg.eigvalsh(M)[0]))
    mono = all(mins[i + 1] >= mins[i] - noise for i in range(len(mins) - 1))
    return GardingResult([g.h for g in grids], mins, c, mono)


# ---------------------------------------------------------------- Egorov

def verlet_step(x, p, dt, dV):
    p = p - 0.5 * dt * dV(x)
    x = x + dt * p
    p = p - 0.5 * dt * dV(x)
    return x, p


_YOSHIDA = (1.0 / (2 - 2 ** (1 / 3)), -(2 ** (1 / 3)) / (2 - 2 ** (1 / 3)), 1.0 / (2 - 2 ** (1 / 3)))


def hamiltonian_flow(x, p, t: float, dV, dt: float, order: int = 4):
    """Flow of ``p^2/2 + V(x)`` by Stormer-Verlet steps (Yoshida composition when ``order=4``)."""
    x = np.array(x, dtype=float, copy=True)
    p = np.array(p, dtype=float, copy=True)
    if t == 0:
        return x, p
    steps = max(1, int(math.ceil(abs(t) / dt)))
    h = t / steps
    coeffs = _YOSHIDA if order == 4 else (1.0,)
    for _ in range(steps):
        for c in coeffs:
            x, p = verlet_step(x, p, c * h, dV)
    return x, p


def flowed_symbol(a: Symbol, t: float, dV, L: float, tol: float = 1e-8,
                  probe: int = 4000, seed: int = 0, p_range: float = 8.0):
    """``a o Phi^t`` on the torus of length ``L`` with a step verified by halving.

    Returns the symbol and the step used; the step is halved until halving
    changes probe samples of ``a o Phi^t`` by less than ``tol``.
    """
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-L / 2, L / 2, probe)
    ps = rng.uniform(-p_range, p_range, probe)

    def wrap(x):
        return (x + L / 2) % L - L / 2

    def sample(dt):
        X, P = hamiltonian_flow(xs, ps, t, dV, dt)
        return a(wrap(X), P)

    dt = 0.05
    prev = sample(dt)
    while True:
        cur = sample(dt / 2)
        if np.max(np.abs(cur - prev)) < tol or dt < 1e-5:
            break
        dt /= 2
        prev = cur
    dt_used = dt / 2

    def func(x, p):
        X, P = hamiltonian_flow(x, p, t, dV, dt_used)
        return a(wrap(X), P)
    return Symbol(func, p_support=None, real=a.real, name=f"{a.name}oPhi^{t}"), dt_used


def propagator(Xi: QOperator, t: float) -> np.ndarray:
    """``exp(-i t Xi / h)`` for hermitian ``Xi`` by eigendecomposition."""
    N = Xi.matrix.shape[0]
    if t == 0:
        return np.eye(N, dtype=complex)
    w, V = np.linalg.eigh(0.5 * (Xi.matrix + Xi.matrix.conj().T))
    return (V * np.exp(-1j * t * w / Xi.grid.h)) @ V.conj().T


@dataclass
class EgorovStep:
    h: float
    N: int
    error: float
    dt: float


def _quantize_table(S: np.ndarray, g: GridSpec) -> np.ndarray:
    # Weyl matrix (torus convention) from samples S[q, k] = a(z_q, p_fft[k]).
    N = g.N
    F = np.fft.ifft(S, axis=1)
    d = np.arange(N)[:, None] - np.arange(N)[None, :]
    n = np.arange(N)[None, :]
    dw = (d + N // 2) % N - N // 2
    A = F[(2 * n + dw) % (2 * N), dw % N]
    seam = dw == -(N // 2)
    q2 = (2 * n + N // 2) % (2 * N)
    return np.where(seam, 0.5 * (A + F[q2, dw % N]), A)


def egorov_error(a: Symbol, V, dV, g: GridSpec, t: float, band_tol: float = 1e-8) -> EgorovStep:
    """``|| U(-t) Op(a) U(t) - Op(a o Phi^t) ||`` with ``U(t) = exp(-i t Xi / h)``."""
    xe = np.array([-g.L / 2, g.L / 2])
    if abs(V(xe[0]) - V(xe[1])) > 1e-9 * max(1.0, abs(V(xe[0]))):
        raise InvalidParameter("potential must be L-periodic on the grid")
    if t == 0:
        return EgorovStep(g.h, g.N, 0.0, 0.0)
    xi = Symbol(lambda x, p: 0.5 * p * p + V(x), real=True, name="xi")
    Xi = quantize(xi, g)
    A = quantize(a, g).matrix
    at, dt = flowed_symbol(a, t, dV, g.L, p_range=g.p_max)
    z = -g.L / 2 + 0.5 * g.dx * np.arange(2 * g.N)
    S = at(z[:, None], g.p_fft[None, :])
    edge = np.abs(g.p_fft) > 0.9 * g.p_max
    mag = np.abs(S)
    if mag[:, edge].max() > band_tol * max(mag.max(), 1e-300):
        raise AliasingError("flowed symbol reaches the edge of the momentum band")
    U = propagator(Xi, t)
    At = U.conj().T @ A @ U
    return EgorovStep(g.h, g.N, operator_norm(At - _quantize_table(S, g)), dt)


def egorov_check(a: Symbol, V, dV, grids: Sequence[GridSpec], t: float,
                 min_slope: float = 0.8) -> CheckReport:
    steps = [egorov_error(a, V, dV, g, t) for g in grids]
    hs = [s.h for s in steps]
    errs = [s.error for s in steps]
    slope = _slope(hs, errs) if t != 0 else float("nan")
    passed = t == 0 or slope >= min_slope
    return CheckReport("egorov", hs, errs, slope, passed,
                       {"t": t, "N": [s.N for s in steps], "dt": [s.dt for s in steps]})


# ---------------------------------------------------------------- diagnostics

def symbol_raster(a: Symbol, g: GridSpec) -> np.ndarray:
    """Samples ``a(x_j, p_k)`` as a ``(len(p), len(x))`` array."""
    return a(g.x[None, :], g.p[:, None])


def husimi(psi, g: GridSpec, nx: int = 64, np_: int = 64) -> np.ndarray:
    """``|<coherent state at (x0, p0), psi>|^2`` on an ``np_ x nx`` phase-space raster."""
    psi = np.asarray(psi, dtype=complex)
    x0 = np.linspace(-g.L / 2, g.L / 2, nx, endpoint=False)
    p0 = np.linspace(-g.p_max, g.p_max, np_, endpoint=False)
    x = g.x
    env = (math.pi * g.h) ** -0.25 * np.exp(-((x[None, :] - x0[:, None]) ** 2) / (2 * g.h))
    out = np.empty((np_, nx))
    for i, pp in enumerate(p0):
        coh = env * np.exp(1j * pp * x[None, :] / g.h)
        out[i] = np.abs(coh.conj() @ psi * g.dx) ** 2
    return out
