"""Overflow-safe modified spherical Bessel functions in log space.

The stability modes live on an annulus [K, R] where the two basis
solutions of z'' = (1 + k(k+1)/r^2) z are r*i_k(r) and r*k_k(r), with
i_k, k_k the modified spherical Bessel functions of the first and second
kinds.  For degrees up to a few hundred at moderate radii these under-
and overflow doubles by hundreds of orders of magnitude, so all values
are produced as logarithms via scaled recurrences: Miller's downward
recurrence for i_k (normalized with i_0 = sinh(r)/r) and the upward
recurrence for k_k (stable in that direction).

Row index convention: row j holds order j-1, so orders -1..kmax are
available (order -1 is needed by the derivative identities).
"""

from __future__ import annotations

import numpy as np


def _log_i0(r):
    """log(sinh(r)/r), stable for large and small r."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    big = r > 20.0
    tiny = r < 1e-4
    mid = ~(big | tiny)
    out[big] = r[big] - np.log(2.0 * r[big]) + np.log1p(-np.exp(-2.0 * r[big]))
    out[tiny] = np.log1p(r[tiny] ** 2 / 6.0 * (1.0 + r[tiny] ** 2 / 20.0))
    out[mid] = np.log(np.sinh(r[mid]) / r[mid])
    return out


def _log_im1(r):
    """log(cosh(r)/r), i.e. order -1 of the first kind."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    big = r > 20.0
    out[big] = r[big] - np.log(2.0 * r[big]) + np.log1p(np.exp(-2.0 * r[big]))
    out[~big] = np.log(np.cosh(r[~big])) - np.log(r[~big])
    return out


def log_mod_sph_i(kmax: int, r) -> np.ndarray:
    """log i_n(r) for orders n = -1..kmax; shape (kmax+2, len(r))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0.0):
        raise ValueError("radii must be positive")
    nr = r.size
    out = np.empty((kmax + 2, nr))
    out[0] = _log_im1(r)
    out[1] = _log_i0(r)
    if kmax == 0:
        return out

    # Miller downward recurrence with running renormalization: start
    # well above kmax, recurse f_{n-1} = f_{n+1} + ((2n+1)/r) f_n, then
    # anchor to the known i_0.
    nstart = kmax + 25 + int(2.0 * np.sqrt((kmax + 1.0) * float(np.max(r))))
    logrel = np.empty((nstart + 1, nr))
    scale = np.zeros(nr)
    fp = np.zeros(nr)   # f_{n+1} / exp(scale)
    fc = np.ones(nr)    # f_n / exp(scale)
    logrel[nstart] = 0.0
    for n in range(nstart, 0, -1):
        fm = fp + ((2 * n + 1) / r) * fc
        scale = scale + np.log(fm)
        logrel[n - 1] = scale
        fp = fc / fm
        fc = np.ones(nr)
    anchor = out[1] - logrel[0]
    out[2:] = logrel[1 : kmax + 1] + anchor
    return out


def log_mod_sph_k(kmax: int, r) -> np.ndarray:
    """log k_n(r) for orders n = -1..kmax; shape (kmax+2, len(r))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0.0):
        raise ValueError("radii must be positive")
    nr = r.size
    out = np.empty((kmax + 2, nr))
    log_k0 = np.log(np.pi / 2.0) - np.log(r) - r
    out[0] = log_k0  # k_{-1} = k_0
    out[1] = log_k0
    if kmax >= 1:
        out[2] = log_k0 + np.log1p(1.0 / r)
    if kmax <= 1:
        return out

    scale = log_k0.copy()
    a = np.ones(nr)                # k_{n-1} / exp(scale)
    b = np.exp(out[2] - scale)     # k_n / exp(scale)
    for n in range(1, kmax):
        c = a + ((2 * n + 1) / r) * b
        scale = scale + np.log(c)
        out[n + 2] = scale
        a = b / c
        b = np.ones(nr)
    return out
