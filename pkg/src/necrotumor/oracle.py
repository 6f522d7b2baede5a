"""Obstacle-problem oracle: independent finite-difference solutions of
the nutrient variational inequality, used to cross-validate the closed
forms.

The nutrient problem on a ball is the complementarity system

    sigma >= sigma_hat,  -Lap sigma + sigma >= 0,
    (sigma - sigma_hat) (-Lap sigma + sigma) = 0,   sigma = 1 on r = R,

solved by projected SOR on a conservative radial discretization
(`solve_radial_vi`) and, for perturbed axisymmetric domains
r = R (1 + eps P_k(cos theta)), on a boundary-fitted mapped grid
(`solve_axisym_vi`).  The hot sweep loops live in the compiled kernels
(pure-Python fallback selected at import, see kernels.BACKEND).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import eval_legendre, roots_legendre

from . import kernels
from .params import ModelParams, kinetics_g


class ConvergenceError(RuntimeError):
    """Projected SOR did not reach the update tolerance."""


@dataclass(frozen=True)
class VISolution:
    """Converged radial obstacle solve."""

    R: float
    r: np.ndarray
    sigma: np.ndarray
    free_boundary: float  # 0.0 when the active set is empty
    sweeps: int
    max_update: float
    complementarity: float  # max_i min(residual_i, sigma_i - sigma_hat)

    @property
    def h(self) -> float:
        return float(self.r[1] - self.r[0])


def _radial_operator(R: float, n: int):
    """Rows of A = -Lap_h + I on r_i = i h, i = 0..n-1 (sigma_n = 1
    eliminated into the rhs).  Conservative form r^-2 (r^2 sigma')';
    the center row uses Lap sigma(0) ~ 6 (sigma_1 - sigma_0) / h^2."""
    h = R / n
    r = np.arange(n) * h
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    rhs = np.zeros(n)
    diag[0] = 6.0 / h ** 2 + 1.0
    upper[0] = -6.0 / h ** 2
    i = np.arange(1, n)
    rp = (r[i] + 0.5 * h) ** 2 / (r[i] ** 2 * h ** 2)
    rm = (r[i] - 0.5 * h) ** 2 / (r[i] ** 2 * h ** 2)
    lower[i] = -rm
    diag[i] = rp + rm + 1.0
    upper[i] = -rp
    rhs[n - 1] = rp[-1] * 1.0  # Dirichlet sigma(R) = 1
    upper[n - 1] = 0.0
    return h, r, lower, diag, upper, rhs


def _extract_free_boundary(r, d, h):
    """Free-boundary radius from d = sigma - sigma_hat >= 0.

    d vanishes quadratically at the contact point, so linear
    interpolation of d is degenerate there; interpolate sqrt(d), which
    crosses zero linearly, through the first two clearly inactive
    nodes."""
    slack = 1e-9
    active = d <= slack
    if not active.any():
        return 0.0
    ia = int(np.nonzero(active)[0][-1])
    # skip the nodes closest to the contact point, where d is of the
    # same size as the discretization error; two cells out the relative
    # noise in sqrt(d) is far smaller
    i1 = min(ia + 2, d.size - 2)
    i2 = min(i1 + 2, d.size - 1)
    s1 = np.sqrt(max(d[i1], 0.0))
    s2 = np.sqrt(max(d[i2], 0.0))
    if s2 <= s1:
        return float(r[ia])
    return float(r[i1] - s1 * (r[i2] - r[i1]) / (s2 - s1))


def solve_radial_vi(R: float, p: ModelParams, n: int = 256,
                    tol: float = 1e-12, omega: float | None = None,
                    max_sweeps: int | None = None) -> VISolution:
    """Projected-SOR solve of the radial nutrient obstacle problem.

    omega defaults to the 1D-optimal 2/(1 + sin(pi/n)); pass 1.5 for
    the plain fixed-relaxation variant.
    """
    if R <= 0.0:
        raise ValueError("R must be positive")
    if n < 64:
        raise ValueError("n must be at least 64")
    h, r, lower, diag, upper, rhs = _radial_operator(R, n)
    if omega is None:
        omega = 2.0 / (1.0 + np.sin(np.pi / n))
    if max_sweeps is None:
        max_sweeps = 50 * n
    x = np.full(n, 1.0)
    sweeps, maxupd = kernels.psor_tridiag(
        lower, diag, upper, rhs, x, p.sigma_hat, omega, tol, max_sweeps
    )
    if maxupd >= tol:
        raise ConvergenceError(
            f"projected SOR stalled at update {maxupd:.3e} after {sweeps} sweeps"
        )
    sigma = np.concatenate([x, [1.0]])
    rfull = np.concatenate([r, [R]])
    # complementarity: min(A sigma - f, sigma - sigma_hat) ~ 0 nodewise
    resid = diag * x - rhs
    resid[1:] += lower[1:] * x[:-1]
    resid[:-1] += upper[:-1] * x[1:]
    comp = float(np.max(np.abs(np.minimum(resid, x - p.sigma_hat))))
    fb = _extract_free_boundary(rfull, sigma - p.sigma_hat, h)
    return VISolution(R=R, r=rfull, sigma=sigma, free_boundary=fb,
                      sweeps=sweeps, max_update=maxupd, complementarity=comp)


def solve_pressure(R: float, p: ModelParams, vi: VISolution):
    """Direct tridiagonal solve of -Lap pi = g(sigma), pi(R) = 0,
    pi'(0) = 0 on the oracle grid.

    Returns (pi samples on vi.r, boundary flux pi'(R) by a one-sided
    second-order difference).
    """
    n = vi.r.size - 1
    h, r, lower, diag, upper, _ = _radial_operator(R, n)
    # strip the +I zeroth-order term: operator here is -Lap only
    diag = diag - 1.0
    g = kinetics_g(vi.sigma[:-1], p)
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    pi = solve_banded((1, 1), ab, g)
    pi_full = np.concatenate([pi, [0.0]])
    # second-order one-sided difference at r = R (where pi = 0)
    flux = (-4.0 * pi_full[-2] + pi_full[-3]) / (2.0 * h)
    return pi_full, float(flux)


def discrete_F(R: float, p: ModelParams, vi: VISolution) -> float:
    """Growth functional F(R) = R^-3 int_0^R g(sigma) r^2 dr evaluated
    on the oracle solution, with no reference to the closed forms.

    g jumps by nu at the contact point, so the integral is split there:
    the -nu background is integrated exactly, the proliferation part by
    trapezoid over the inactive nodes plus the partial contact cell
    (where sigma - sigma_hat = O(h^2) can be neglected)."""
    fb = vi.free_boundary
    integral = -p.nu * R ** 3 / 3.0
    if fb == 0.0:
        live = slice(0, None)
        prolif = (vi.sigma[live] - p.sigma_tilde) * vi.r[live] ** 2
        integral += p.mu * np.trapezoid(prolif, vi.r[live])
    else:
        ia = int(np.searchsorted(vi.r, fb))
        prolif = (vi.sigma[ia:] - p.sigma_tilde) * vi.r[ia:] ** 2
        integral += p.mu * np.trapezoid(prolif, vi.r[ia:])
        # partial cell [fb, r_ia]: sigma ~ sigma_hat there
        integral += p.mu * (p.sigma_hat - p.sigma_tilde) * (vi.r[ia] ** 3 - fb ** 3) / 3.0
    return float(integral / R ** 3)


# ---------------------------------------------------------------------------
# axisymmetric mapped-domain solve


def _theta_weights(theta, theta_m, theta_p):
    """First and second derivative weights of the non-uniform 3-point
    stencil (m, c, p) at each node."""
    dm = theta - theta_m
    dp = theta_p - theta
    w1m = -dp / (dm * (dm + dp))
    w1c = (dp - dm) / (dm * dp)
    w1p = dm / (dp * (dm + dp))
    w2m = 2.0 / (dm * (dm + dp))
    w2c = -2.0 / (dm * dp)
    w2p = 2.0 / (dp * (dm + dp))
    return (w1m, w1c, w1p), (w2m, w2c, w2p)


@dataclass(frozen=True)
class AxisymSolution:
    """Converged mapped-grid obstacle solve on r <= R (1 + eps P_k)."""

    R: float
    eps: float
    k: int
    s: np.ndarray           # radial mapped coordinate, 0..1
    x: np.ndarray           # Gauss-Legendre nodes in cos(theta)
    wx: np.ndarray          # matching quadrature weights
    a: np.ndarray           # outer radius per column, R (1 + eps P_k)
    u: np.ndarray           # (ns+1, nt) nutrient samples
    free_boundary: np.ndarray  # per-column contact radius (physical r)
    sweeps: int
    max_update: float
    touched_center: bool


def solve_axisym_vi(R: float, p: ModelParams, eps: float, k: int,
                    ns: int = 256, nt: int = 64, tol: float = 1e-10,
                    omega: float = 1.7,
                    max_sweeps: int | None = None) -> AxisymSolution:
    """Projected-SOR obstacle solve on the axisymmetric mapped grid.

    The domain r <= a(theta) = R (1 + eps P_k(cos theta)) is pulled back
    to the rectangle (s, theta) in [0,1] x (0,pi) by the per-column
    stretch r = s a(theta); theta runs over Gauss-Legendre nodes in
    cos theta (so Legendre projections of the measured free boundary
    are exact quadratures) and the poles are handled by even reflection.
    The mapped operator is

      Lap = a^-2 [ (1+lam^2) d_ss + (2 + lam^2 - lam' - lam cot) s^-1 d_s
                   - 2 lam s^-1 d_s d_theta + s^-2 (d_theta^2 + cot d_theta) ],

    lam = a'/a.  All rows are scaled by (s a)^2, which keeps the
    projection step valid (positive row scaling preserves the
    complementarity system).
    """
    if abs(eps) > 0.05:
        raise ValueError("eps must satisfy |eps| <= 0.05")
    if not 0 <= k <= 8:
        raise ValueError("k must be in 0..8")
    if max_sweeps is None:
        max_sweeps = 50 * max(ns, nt)

    x, wx = roots_legendre(nt)       # ascending in x = cos theta
    theta = np.arccos(x)[::-1]       # ascending in theta
    x = x[::-1].copy()
    wx = wx[::-1].copy()
    sin_t = np.sin(theta)
    cot_t = x / sin_t

    Pk = eval_legendre(k, x)
    if k == 0:
        dPk = np.zeros_like(x)
    else:
        # (1-x^2) P_k'(x) = k (P_{k-1}(x) - x P_k(x))
        dPk = k * (eval_legendre(k - 1, x) - x * Pk) / (1.0 - x * x)
    a = R * (1.0 + eps * Pk)
    da = R * eps * dPk * (-sin_t)            # da/dtheta
    lam = da / a
    # lam'(theta) by the same non-uniform stencil used for u
    theta_m = np.concatenate([[-theta[0]], theta[:-1]])
    theta_p = np.concatenate([theta[1:], [2.0 * np.pi - theta[-1]]])
    (w1m, w1c, w1p), (w2m, w2c, w2p) = _theta_weights(theta, theta_m, theta_p)
    lam_m = np.concatenate([[-lam[0]], lam[:-1]])     # lam is odd at poles
    lam_p = np.concatenate([lam[1:], [-lam[-1]]])
    dlam = w1m * lam_m + w1c * lam + w1p * lam_p

    hs = 1.0 / ns
    s = np.arange(ns + 1) * hs
    si = s[1:ns][:, None]            # interior radial nodes

    # row scaling (s a)^2; operator rows: (s a)^2 (u - Lap u)
    c_ss = (1.0 + lam * lam)[None, :] * si ** 2 / hs ** 2
    c_s = (2.0 + lam * lam - dlam - lam * cot_t)[None, :] * si / (2.0 * hs)
    c_st = -2.0 * lam[None, :] * si / (2.0 * hs)      # times u_theta
    zero = (si * a[None, :]) ** 2                     # times u itself

    coef = np.zeros((ns - 1, nt, 9))
    # radial second difference and advection (slots 1, 4, 7)
    coef[:, :, 1] += -(c_ss - c_s)
    coef[:, :, 4] += 2.0 * c_ss + zero
    coef[:, :, 7] += -(c_ss + c_s)
    # theta second difference + cot advection (slots 3, 4, 5)
    t2 = w2m + cot_t * w1m, w2c + cot_t * w1c, w2p + cot_t * w1p
    coef[:, :, 3] += -t2[0][None, :]
    coef[:, :, 4] += -t2[1][None, :]
    coef[:, :, 5] += -t2[2][None, :]
    # mixed term: c_st * (u_theta at i+1 minus u_theta at i-1)
    coef[:, :, 6] += -c_st * w1m[None, :]
    coef[:, :, 7] += -c_st * w1c[None, :]
    coef[:, :, 8] += -c_st * w1p[None, :]
    coef[:, :, 0] += c_st * w1m[None, :]
    coef[:, :, 1] += c_st * w1c[None, :]
    coef[:, :, 2] += c_st * w1p[None, :]
    # pole reflection: the ghost column coincides with the node itself,
    # so fold its weight into the same-theta slot
    for jj, src, dst in ((0, (0, 3, 6), (1, 4, 7)),
                         (nt - 1, (2, 5, 8), (1, 4, 7))):
        for sl_src, sl_dst in zip(src, dst):
            coef[:, jj, sl_dst] += coef[:, jj, sl_src]
            coef[:, jj, sl_src] = 0.0

    # shared center node: Lap u(0) ~ 6 (mean_sphere u - u0) / r1bar^2
    W = wx.sum()
    r1sq = float(np.dot(wx, (hs * a) ** 2) / W)
    center_coef = -(6.0 / r1sq) * (wx / W)
    center_diag = 6.0 / r1sq + 1.0

    u = np.full((ns + 1, nt), 1.0)
    u[ns, :] = 1.0
    jm = np.concatenate([[0], np.arange(nt - 1)]).astype(np.int64)
    jp = np.concatenate([np.arange(1, nt), [nt - 1]]).astype(np.int64)
    sweeps, maxupd = kernels.psor_grid(
        np.ascontiguousarray(coef), jm, jp, u, center_coef, center_diag,
        p.sigma_hat, omega, tol, max_sweeps,
    )
    if maxupd >= tol:
        raise ConvergenceError(
            f"axisymmetric projected SOR stalled at {maxupd:.3e} "
            f"after {sweeps} sweeps"
        )
    fb = np.empty(nt)
    for j in range(nt):
        # interpolation runs in the mapped coordinate s, scaled per column
        fb[j] = a[j] * _extract_free_boundary(s, u[:, j] - p.sigma_hat, hs)
    touched = bool(u[0, 0] <= p.sigma_hat + 1e-9)
    return AxisymSolution(R=R, eps=eps, k=k, s=s, x=x, wx=wx, a=a, u=u,
                          free_boundary=fb, sweeps=sweeps, max_update=maxupd,
                          touched_center=touched)


def project_legendre(values: np.ndarray, sol: AxisymSolution, k: int) -> float:
    """Degree-k Legendre coefficient of a per-column sample, using the
    grid's exact Gauss-Legendre quadrature in cos(theta)."""
    Pk = eval_legendre(k, sol.x)
    return float((2 * k + 1) / 2.0 * np.dot(sol.wx, values * Pk))


def measure_mode_gain(R: float, p: ModelParams, k: int,
                      eps_values=(0.01, 0.02), ns: int = 256, nt: int = 64,
                      tol: float = 1e-10, K_ref: float | None = None) -> dict:
    """Free-boundary response gain of mode k measured from the
    axisymmetric oracle.

    For each eps the domain boundary is perturbed to R (1 + eps P_k),
    the contact set boundary is extracted per column, and its change
    against the eps = 0 solve on the same grid (systematic
    discretization error cancels in the difference) is projected onto
    P_k.  Gains are normalized as relative inner amplitude per relative
    outer amplitude, (eta_k / K) / eps, matching
    spectrum.ModeSolution.zeta_gain.  Two eps values give the Richardson
    value 2 G(eps1) - G(eps2) with eps2 = 2 eps1.
    """
    base = solve_axisym_vi(R, p, 0.0, k, ns=ns, nt=nt, tol=tol)
    if K_ref is None:
        K_ref = float(np.dot(base.wx, base.free_boundary) / base.wx.sum())
    if K_ref <= 0.0:
        raise ValueError("no necrotic core at this radius; gain undefined")
    gains = {}
    for eps in eps_values:
        sol = solve_axisym_vi(R, p, eps, k, ns=ns, nt=nt, tol=tol)
        delta = sol.free_boundary - base.free_boundary
        gains[eps] = project_legendre(delta, sol, k) / (eps * K_ref)
    out = {"gains": gains, "K_ref": K_ref, "ns": ns, "nt": nt}
    ev = sorted(gains)
    if len(ev) == 2 and abs(ev[1] - 2.0 * ev[0]) < 1e-12 * ev[1]:
        out["richardson"] = 2.0 * gains[ev[0]] - gains[ev[1]]
    return out
