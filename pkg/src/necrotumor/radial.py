"""Closed-form radial fields and the scalar nonlinear equations.

Everything here is exact up to root-finding tolerance: the nutrient
profile U(r,R), the necrotic radius K(R), the onset radius Rstar, the
mean-proliferation function F(R) driving the radius ODE, the pressure
field V(r,R), and the stationary radius Rs (unique root of F).

The integral of U(eta,R)*eta^2 over the living shell has an elementary
antiderivative, so V and its derivatives need no quadrature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .params import ARTIFACT_VERSION, ModelParams, g_at_supply


def _sinhc(r):
    """sinh(r)/r with the removable singularity at r=0."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 1e-4
    rs = np.where(small, 1.0, r)
    out = np.where(small, 1.0 + r * r / 6.0 * (1.0 + r * r / 20.0), np.sinh(rs) / rs)
    return out if out.ndim else float(out)


def solve_Rstar(p: ModelParams, tol: float = 1e-12) -> float:
    """Onset radius: the unique positive root of sinh(R)/R = 1/sigma_hat.

    sinh(R)/R is strictly increasing from 1, and 1/sigma_hat > 1, so the
    root exists and is unique.
    """
    target = 1.0 / p.sigma_hat
    hi = 2.0 + np.arccosh(target)
    while np.sinh(hi) / hi < target:
        hi *= 2.0
    root = brentq(lambda R: _sinhc(R) - target, 1e-12, hi, xtol=tol, rtol=8.9e-16)
    return float(root)


def solve_K(R: float, p: ModelParams, tol: float = 1e-12) -> float:
    """Necrotic radius K(R): 0 for R <= Rstar, else the unique root in
    (0,R) of sinh(R-K) + K*cosh(R-K) = R/sigma_hat."""
    if R <= 0.0:
        raise ValueError(f"R must be positive: R={R}")
    Rstar = solve_Rstar(p, tol)
    if R <= Rstar:
        return 0.0

    target = R / p.sigma_hat

    if R < 30.0:

        def resid(K):
            x = R - K
            return np.sinh(x) + K * np.cosh(x) - target

    else:
        # same equation scaled by exp(-(R-K)) to avoid overflow; the
        # scaling is positive so the unique sign change is preserved
        def resid(K):
            x = R - K
            e = np.exp(-2.0 * x)
            return 0.5 * (1.0 - e) + 0.5 * K * (1.0 + e) - target * np.exp(-x)

    # the unscaled residual is strictly decreasing in K
    # (d/dK = -K sinh(R-K)); positive at K=0 exactly when R > Rstar
    # and negative at K=R
    K = brentq(resid, 0.0, R, xtol=tol, rtol=8.9e-16)
    return float(K)


def eval_U(r, R: float, p: ModelParams, K: float | None = None):
    """Radial nutrient concentration U(r,R) for 0 <= r <= R."""
    if K is None:
        K = solve_K(R, p)
    r = np.asarray(r, dtype=float)
    if K == 0.0:
        out = (R / np.sinh(R)) * _sinhc(r)
    else:
        x = r - K
        living = p.sigma_hat * (np.sinh(x) + K * np.cosh(x)) / np.where(r > 0, r, 1.0)
        out = np.where(r < K, p.sigma_hat, living)
    return out if out.ndim else float(out)


def eval_U_r(r, R: float, p: ModelParams, K: float | None = None):
    """Radial derivative of U(r,R)."""
    if K is None:
        K = solve_K(R, p)
    r = np.asarray(r, dtype=float)
    if K == 0.0:
        small = np.abs(r) < 1e-4
        rs = np.where(small, 1.0, r)
        core = np.where(
            small,
            r / 3.0 * (1.0 + r * r / 10.0),
            (rs * np.cosh(rs) - np.sinh(rs)) / (rs * rs),
        )
        out = (R / np.sinh(R)) * core
    else:
        x = r - K
        rs = np.where(r > 0, r, 1.0)
        dliving = (
            p.sigma_hat
            * ((np.cosh(x) + K * np.sinh(x)) * rs - (np.sinh(x) + K * np.cosh(x)))
            / (rs * rs)
        )
        out = np.where(r < K, 0.0, dliving)
    return out if out.ndim else float(out)


def eval_U_rr(r, R: float, p: ModelParams, K: float | None = None):
    """Second radial derivative; uses the ODE U'' = U - 2U'/r in the
    living shell and 0 in the core."""
    if K is None:
        K = solve_K(R, p)
    r = np.asarray(r, dtype=float)
    U = np.asarray(eval_U(r, R, p, K))
    Ur = np.asarray(eval_U_r(r, R, p, K))
    rs = np.where(np.abs(r) > 1e-12, r, 1.0)
    interior = U - 2.0 * Ur / rs
    at_zero = U / 3.0  # limit of U'' at r=0 in the no-core case
    out = np.where(np.abs(r) <= 1e-12, at_zero, interior)
    if K > 0.0:
        out = np.where(r < K, 0.0, out)
    return out if out.ndim else float(out)


def _shell_moment(r, R: float, K: float, p: ModelParams):
    """Antiderivative-based integral of U(eta,R)*eta^2 from r to R,
    valid for K <= r <= R (necrotic branch only)."""
    def P(eta):
        x = eta - K
        return p.sigma_hat * (
            (eta * np.cosh(x) - np.sinh(x)) + K * (eta * np.sinh(x) - np.cosh(x))
        )

    return P(R) - P(r)


def _shell_first_moment(r, R: float, K: float, p: ModelParams):
    """Integral of U(eta,R)*eta from r to R for K <= r <= R."""
    def Q(eta):
        x = eta - K
        return p.sigma_hat * (np.cosh(x) + K * np.sinh(x))

    return Q(R) - Q(r)


def eval_F(R: float, p: ModelParams, K: float | None = None) -> float:
    """Mean net proliferation over the ball of radius R."""
    if R <= 0.0:
        raise ValueError(f"R must be positive: R={R}")
    if K is None:
        K = solve_K(R, p)
    if K == 0.0:
        if R < 1e-4:
            core = 1.0 / 3.0 - R * R / 45.0 + 2.0 * R ** 4 / 945.0
        else:
            core = (R / np.tanh(R) - 1.0) / (R * R)
        return float(p.mu * (core - p.sigma_hat / 3.0))
    x = R - K
    G = ((x) * np.cosh(x) + (R * K - 1.0) * np.sinh(x) + K ** 3 / 3.0) / R ** 3
    return float(p.mu * p.sigma_hat * G - (p.nu / 3.0) * (K / R) ** 3 - p.mu * p.sigma_hat / 3.0)


def _coeff_D(R: float, K: float, p: ModelParams) -> float:
    return -(p.mu * p.sigma_tilde * K ** 3) / 3.0 - p.mu * _shell_moment(K, R, K, p)


def eval_V(r, R: float, p: ModelParams, K: float | None = None):
    """Surface-tension-free pressure V(r,R) for R > Rstar.

    Outer branch D(1/R - 1/r) - (mu*sigma_tilde+nu)(R^2-r^2)/6
    - mu * int_r^R U(eta) eta^2 (1/r - 1/eta) d eta, with the double
    integral reduced to single integrals by swapping order; inner branch
    C + (nu/6) r^2 with C from value matching at K (slope matching is
    automatic).
    """
    if K is None:
        K = solve_K(R, p)
    if K == 0.0:
        raise ValueError(f"eval_V requires a necrotic core: R={R} <= Rstar")
    r = np.asarray(r, dtype=float)
    D = _coeff_D(R, K, p)

    rs = np.maximum(r, K)  # clamp so the outer formula is only fed r >= K
    W = _shell_moment(rs, R, K, p) / rs - _shell_first_moment(rs, R, K, p)
    outer = (
        D * (1.0 / R - 1.0 / rs)
        - (p.mu * p.sigma_tilde + p.nu) * (R * R - rs * rs) / 6.0
        - p.mu * W
    )
    VK = (
        D * (1.0 / R - 1.0 / K)
        - (p.mu * p.sigma_tilde + p.nu) * (R * R - K * K) / 6.0
        - p.mu * (_shell_moment(K, R, K, p) / K - _shell_first_moment(K, R, K, p))
    )
    C = VK - p.nu * K * K / 6.0
    inner = C + p.nu * r * r / 6.0
    out = np.where(r < K, inner, outer)
    return out if out.ndim else float(out)


def eval_V_r(r, R: float, p: ModelParams, K: float | None = None):
    """Radial derivative of V(r,R)."""
    if K is None:
        K = solve_K(R, p)
    if K == 0.0:
        raise ValueError(f"eval_V_r requires a necrotic core: R={R} <= Rstar")
    r = np.asarray(r, dtype=float)
    D = _coeff_D(R, K, p)
    rs = np.maximum(r, K)
    outer = (
        D / (rs * rs)
        + (p.mu * p.sigma_tilde + p.nu) * rs / 3.0
        + p.mu * _shell_moment(rs, R, K, p) / (rs * rs)
    )
    inner = p.nu * r / 3.0
    out = np.where(r < K, inner, outer)
    return out if out.ndim else float(out)


def eval_V_rr(r, R: float, p: ModelParams, K: float | None = None):
    """Second radial derivative of V(r,R)."""
    if K is None:
        K = solve_K(R, p)
    if K == 0.0:
        raise ValueError(f"eval_V_rr requires a necrotic core: R={R} <= Rstar")
    r = np.asarray(r, dtype=float)
    D = _coeff_D(R, K, p)
    rs = np.maximum(r, K)
    U = np.asarray(eval_U(rs, R, p, K))
    outer = (
        -2.0 * D / rs ** 3
        + (p.mu * p.sigma_tilde + p.nu) / 3.0
        - 2.0 * p.mu * _shell_moment(rs, R, K, p) / rs ** 3
        - p.mu * U
    )
    inner = np.full_like(np.asarray(r, dtype=float), p.nu / 3.0)
    out = np.where(r < K, inner, outer)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial profile with analytic derivative access."""

    params: ModelParams
    R: float
    K: float
    grid: np.ndarray
    sigma: np.ndarray
    pi: np.ndarray | None = None

    def sigma_at(self, r):
        return eval_U(r, self.R, self.params, self.K)

    def sigma_prime(self, r):
        return eval_U_r(r, self.R, self.params, self.K)

    def sigma_pp(self, r):
        return eval_U_rr(r, self.R, self.params, self.K)

    def pi_at(self, r):
        return eval_V(r, self.R, self.params, self.K)

    def pi_prime(self, r):
        return eval_V_r(r, self.R, self.params, self.K)


def sample_profile(R: float, p: ModelParams, n: int = 512,
                   with_pressure: bool = True) -> RadialProfile:
    K = solve_K(R, p)
    grid = np.linspace(0.0, R, n)
    sigma = np.asarray(eval_U(grid, R, p, K))
    pi = np.asarray(eval_V(grid, R, p, K)) if (with_pressure and K > 0.0) else None
    return RadialProfile(p, R, K, grid, sigma, pi)


@dataclass(frozen=True)
class StationaryState:
    """Stationary radius, necrotic radius, and the profile at Rs."""

    params: ModelParams
    R_s: float
    K_s: float
    profile: RadialProfile
    sigma_s_prime_at_Rs: float
    g_at_1: float

    def sigma(self, r):
        return self.profile.sigma_at(r)

    def sigma_prime(self, r):
        return self.profile.sigma_prime(r)

    def pi_prime(self, r):
        return self.profile.pi_prime(r)

    def pi(self, r):
        """Stationary pressure gamma/Rs + V(r,Rs)."""
        return self.params.gamma / self.R_s + np.asarray(self.profile.pi_at(r))

    def as_dict(self) -> dict:
        return {
            "R_s": self.R_s,
            "K_s": self.K_s,
            "sigma_s_prime_at_Rs": self.sigma_s_prime_at_Rs,
            "g_at_1": self.g_at_1,
            "F_residual": eval_F(self.R_s, self.params),
            "pi_prime_residual": float(self.profile.pi_prime(self.R_s)),
            "params": self.params.as_dict(),
        }


def solve_Rs(p: ModelParams, tol: float = 1e-12, n_profile: int = 512) -> StationaryState:
    """Stationary radius: the unique positive root of F, always > Rstar."""
    Rstar = solve_Rstar(p, tol)
    lo = Rstar
    hi = 2.0 * Rstar
    while eval_F(hi, p) > 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("failed to bracket Rs")
    R_s = float(brentq(lambda R: eval_F(R, p), lo, hi, xtol=tol, rtol=8.9e-16))
    K_s = solve_K(R_s, p, tol)
    profile = sample_profile(R_s, p, n=n_profile)
    return StationaryState(
        params=p,
        R_s=R_s,
        K_s=K_s,
        profile=profile,
        sigma_s_prime_at_Rs=float(eval_U_r(R_s, R_s, p, K_s)),
        g_at_1=g_at_supply(p),
    )


def export_profile_csv(path, profile: RadialProfile, tol: float = 1e-12):
    """CSV columns (r, sigma, pi) with a parameter-echo header comment."""
    p = profile.params
    with open(path, "w") as fh:
        fh.write(
            f"# necrotumor v{ARTIFACT_VERSION} radial profile "
            f"R={profile.R!r} K={profile.K!r} "
            f"sigma_hat={p.sigma_hat!r} mu={p.mu!r} nu={p.nu!r} gamma={p.gamma!r} "
            f"tol={tol!r}\n"
        )
        fh.write("r,sigma,pi\n")
        pi = profile.pi if profile.pi is not None else np.full_like(profile.grid, np.nan)
        for r, s, q in zip(profile.grid, profile.sigma, pi):
            fh.write(f"{r!r},{s!r},{q!r}\n")


def export_state_json(path, state: StationaryState):
    payload = {"version": ARTIFACT_VERSION}
    payload.update(state.as_dict())
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
