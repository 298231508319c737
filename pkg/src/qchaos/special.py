"""Bessel functions of integer order, their zeros, and Hermite functions.

``J_k`` uses the power series up to ``x = 12``.  Beyond that ``J_0`` and
``J_1`` come from the Hankel asymptotic expansion and higher orders from
forward recurrence while ``k < x``; for ``k >= x`` the values come from
Miller's backward recurrence normalised against the forward value at the
largest order below ``x``.  The Gamma function in the series is the
factorial ``(k+i)!`` for integer order.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameter

SERIES_CUTOFF = 12.0


def _series(k: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    term = np.power(half, k) / math.factorial(k)
    total = term.copy()
    q = half * half
    for i in range(1, 200):
        term = -term * q / (i * (k + i))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel01(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        P = np.ones_like(x)
        Q = np.zeros_like(x)
        term = np.ones_like(x)
        live = np.ones(x.shape, dtype=bool)
        for m in range(1, 60):
            nxt = term * (mu - (2 * m - 1) ** 2) / (m * 8.0 * x)
            # stop each element at its smallest term (optimal truncation)
            live &= np.abs(nxt) < np.abs(term)
            term = nxt
            if not live.any() or np.all(np.abs(term[live]) < 1e-17):
                break
            contrib = np.where(live, term, 0.0)
            if m % 2 == 0:
                P += (-1) ** (m // 2) * contrib
            else:
                Q += (-1) ** ((m - 1) // 2) * contrib
        chi = x - (0.5 * nu + 0.25) * math.pi
        out.append(np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi)))
    return out[0], out[1]


def _large(k: int, x: np.ndarray) -> np.ndarray:
    j0, j1 = _hankel01(x)
    if k == 0:
        return j0
    if k == 1:
        return j1
    res = np.empty_like(x)
    # forward recurrence where stable (k < x)
    fwd = k < x
    if np.any(fwd):
        xf = x[fwd]
        a, b = j0[fwd], j1[fwd]
        for n in range(1, k):
            a, b = b, (2.0 * n / xf) * b - a
        res[fwd] = b
    back = ~fwd
    if np.any(back):
        xb = x[back]
        nlow = np.floor(xb).astype(int) - 1  # order with nlow < x
        top = int(k + 30 + 2 * math.sqrt(40 * k))
        a = np.zeros_like(xb)
        b = np.full_like(xb, 1e-300)
        val_k = np.zeros_like(xb)
        val_low = np.zeros_like(xb)
        for n in range(top, 0, -1):
            a, b = b, (2.0 * n / xb) * b - a
            # b now holds the unnormalised J_{n-1}
            if n - 1 == k:
                val_k = b.copy()
            hit = nlow == n - 1
            val_low = np.where(hit, b, val_low)
            big = np.abs(b) > 1e250
            if np.any(big):
                a = np.where(big, a * 1e-250, a)
                val_k = np.where(big & (n - 1 <= k), val_k * 1e-250, val_k)
                val_low = np.where(big & (n - 1 <= nlow), val_low * 1e-250, val_low)
                b = np.where(big, b * 1e-250, b)
        # forward recurrence is stable up to nlow < x; one sweep covers every point
        a, b = _hankel01(xb)
        true_low = np.where(nlow == 0, a, b)
        for n in range(1, int(nlow.max())):
            a, b = b, (2.0 * n / xb) * b - a
            true_low = np.where(nlow == n + 1, b, true_low)
        res[back] = val_k * true_low / val_low
    return res


def bessel_j(k: int, x):
    """Bessel function of the first kind ``J_k(x)`` for integer ``k >= 0`` and ``x >= 0``."""
    if int(k) != k or k < 0:
        raise InvalidParameter("order must be a non-negative integer")
    k = int(k)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise InvalidParameter("bessel_j requires x >= 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_CUTOFF
    if np.any(small):
        out[small] = _series(k, flat[small])
    if np.any(~small):
        out[~small] = _large(k, flat[~small])
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def bessel_zeros_below(k: int, xmax: float, step: float = 0.2) -> np.ndarray:
    """All positive zeros of ``J_k`` in ``(0, xmax]``, each refined by bisection to 1e-13."""
    if xmax <= k:
        return np.empty(0)
    grid = np.arange(max(step, float(k)), xmax + step, step)
    vals = bessel_j(k, grid)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    roots = [_bisect(k, grid[i], grid[i + 1]) for i in idx]
    exact = grid[vals == 0.0]
    roots = np.sort(np.concatenate([roots, exact]))
    return roots[(roots > 0) & (roots <= xmax)]


def _bisect(k, lo, hi, tol=1e-13):
    flo = bessel_j(k, lo)
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        fm = bessel_j(k, mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bessel_zero(k: int, m: int) -> float:
    """The ``m``-th positive zero of ``J_k`` (bracket widened up to ``10 (m + k)``)."""
    if m < 1:
        raise InvalidParameter("zero index m must be >= 1")
    xmax = max(k + math.pi * (m + 1), 4.0)
    limit = 10.0 * (m + k) + 10.0
    while True:
        z = bessel_zeros_below(k, xmax)
        if len(z) >= m:
            return float(z[m - 1])
        if xmax >= limit:
            raise RuntimeError(f"could not bracket zero {m} of J_{k}")
        xmax = min(2 * xmax, limit)


def hermite_function(n: int, y):
    """Normalised Hermite function ``H_n(y) exp(-y^2/2) / sqrt(2^n n! sqrt(pi))``."""
    y = np.asarray(y, dtype=float)
    h_prev = np.zeros_like(y)
    h = np.ones_like(y)
    for m in range(n):
        h_prev, h = h, 2.0 * y * h - 2.0 * m * h_prev
    log_c = -0.5 * (n * math.log(2.0) + math.lgamma(n + 1) + 0.5 * math.log(math.pi))
    return h * np.exp(log_c - 0.5 * y * y)
