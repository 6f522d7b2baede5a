"""Linear-stability spectrum about the radial stationary state.

Per spherical-harmonic degree k the mode profile ubar_k solves

    ubar'' + (2(k+1)/r) ubar' = ubar,  ubar(Ks)=0, ubar(Rs)=1,

whose substitution z = ubar * (r/Rs)^(k+1) turns it into a modified
spherical Bessel equation, solved in closed form via the log-space
recurrences in :mod:`necrotumor.bessel` (stable up to degrees of a few
hundred).  The pressure-mode flux vbar_k'(Rs) follows by quadrature, the
eigenvalue a_k(gamma) and the neutral surface tension gamma_k by
algebra, and gamma_star = max_{k>=2} gamma_k with a certified tail
bound (vbar_k'(Rs) is strictly decreasing in k).

A shooting/BVP route for the same ODEs is kept as an independent
cross-check (`solve_ubar_bvp`, `vbar_prime_R_ivp`).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp
from scipy.special import roots_legendre

from .bessel import log_mod_sph_i, log_mod_sph_k
from .params import ARTIFACT_VERSION, ModelParams
from .radial import StationaryState, solve_K


class PrecisionLossWarning(UserWarning):
    """Emitted when the closed-form and ODE mode solutions disagree."""


def _gauss_points(n, a, b):
    x, w = roots_legendre(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _adaptive_gauss(f, a, b, tol=1e-12, n0=64, nmax=8192):
    """Gauss-Legendre integral of a vectorized integrand, doubling the
    node count until two consecutive estimates agree to tol."""
    n = n0
    x, w = _gauss_points(n, a, b)
    prev = float(np.dot(w, f(x)))
    while n < nmax:
        n *= 2
        x, w = _gauss_points(n, a, b)
        cur = float(np.dot(w, f(x)))
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur, abs(cur - prev)
        prev = cur
    return prev, np.inf


class ModeSolution:
    """Closed-form solution of the degree-k mode problem on [Ks, Rs]."""

    def __init__(self, k: int, state: StationaryState, tol: float = 1e-12):
        if state.K_s <= 0.0:
            raise ValueError("mode problem requires a necrotic core (Ks > 0)")
        self.k = int(k)
        self.state = state
        self.tol = tol
        self.K = state.K_s
        self.R = state.R_s
        KR = np.array([self.K, self.R])
        Li = log_mod_sph_i(self.k, KR)
        Lk = log_mod_sph_k(self.k, KR)
        # row k+1 is order k, row k is order k-1
        self._Li_K, self._Li_R = Li[self.k + 1]
        self._Lim1_K, self._Lim1_R = Li[self.k]
        self._Lk_K, self._Lk_R = Lk[self.k + 1]
        self._Lkm1_K, self._Lkm1_R = Lk[self.k]
        # 1 - ratio(k_k at R/K) * ratio(i_k at K/R), both ratios in (0,1)
        self._log_den = np.log1p(
            -np.exp(self._Lk_R - self._Lk_K + self._Li_K - self._Li_R)
        )

    def ubar(self, r):
        """ubar_k(r) on [Ks, Rs], vectorized."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        Li = log_mod_sph_i(self.k, r)
        Lk = log_mod_sph_k(self.k, r)
        X = Lk[self.k + 1] - self._Lk_K + self._Li_K - Li[self.k + 1]
        with np.errstate(divide="ignore"):  # log1p(-1) = -inf at r=K
            logu = (
                self.k * (np.log(self.R) - np.log(r))
                + Li[self.k + 1]
                - self._Li_R
                + np.log1p(-np.exp(np.minimum(X, 0.0)))
                - self._log_den
            )
        out = np.exp(logu)
        return out if out.size > 1 else float(out[0])

    def ubar_prime(self, r):
        """d/dr ubar_k(r), vectorized."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        Li = log_mod_sph_i(self.k, r)
        Lk = log_mod_sph_k(self.k, r)
        k = self.k
        lead = (k + 1) * (np.log(self.R) - np.log(r)) - self._Li_R - self._log_den
        t1 = r * np.exp(Li[k] + lead)
        t2 = k * np.exp(Li[k + 1] + lead)
        t3 = r * np.exp(self._Li_K + Lk[k] - self._Lk_K + lead)
        t4 = k * np.exp(self._Li_K + Lk[k + 1] - self._Lk_K + lead)
        zterm = (t1 - t2 + t3 + t4) / self.R
        u = np.atleast_1d(self.ubar(r))
        out = zterm - (k + 1) / r * u
        return out if out.size > 1 else float(out[0])

    @cached_property
    def ubar_prime_K(self) -> float:
        return float(self.ubar_prime(self.K))

    @cached_property
    def ubar_prime_R(self) -> float:
        return float(self.ubar_prime(self.R))

    @cached_property
    def vbar_prime_R(self) -> float:
        """Outer pressure-mode flux via the jump relation and quadrature."""
        p = self.state.params
        k, K, R = self.k, self.K, self.R
        jump = (p.sigma_hat - p.sigma_tilde) / p.sigma_hat
        log_ratio = 2.0 * (k + 1) * (np.log(K) - np.log(R))
        term1 = jump * np.exp(np.log(self.ubar_prime_K) + log_ratio)

        def integrand(tau):
            return np.exp(
                np.log(np.maximum(np.atleast_1d(self.ubar(tau)), 1e-300))
                + 2.0 * (k + 1) * (np.log(tau) - np.log(R))
            )

        integral, _ = _adaptive_gauss(integrand, K, R, tol=self.tol)
        return float(term1 + integral)

    @cached_property
    def gamma_k(self) -> float | None:
        """Neutral surface tension; defined for k >= 2."""
        if self.k < 2:
            return None
        p = self.state.params
        R = self.R
        return (
            2.0
            * R ** 3
            / (self.k * (self.k - 1) * (self.k + 2))
            * (self.state.g_at_1 - p.mu * self.state.sigma_s_prime_at_Rs * self.vbar_prime_R)
        )

    def a_of(self, gamma: float) -> float:
        """Eigenvalue a_k(gamma) of the linearized boundary dynamics."""
        p = self.state.params
        k, R = self.k, self.R
        return (
            -gamma / (2.0 * R * R) * k * (k - 1) * (k + 2)
            - p.mu * R * self.state.sigma_s_prime_at_Rs * self.vbar_prime_R
            + self.state.g_at_1 * R
        )

    @cached_property
    def zeta_gain(self) -> float:
        """First-order inner-boundary amplitude per unit outer-mode
        amplitude: [Rs sigma_s'(Rs)/(sigma_hat Ks)] (Ks/Rs)^k ubar'(Ks+)."""
        p = self.state.params
        pref = self.R * self.state.sigma_s_prime_at_Rs / (p.sigma_hat * self.K)
        return float(
            pref * np.exp(self.k * (np.log(self.K) - np.log(self.R))
                          + np.log(self.ubar_prime_K))
        )


def solve_ubar(k: int, state: StationaryState, tol: float = 1e-10,
               cross_check: bool = False) -> ModeSolution:
    """Mode profile by the closed-form route; optionally cross-checked
    against a direct BVP solve of the mode ODE."""
    mode = ModeSolution(k, state, tol=tol)
    if cross_check:
        grid, u_bvp = solve_ubar_bvp(k, state, tol=tol)
        err = float(np.max(np.abs(np.atleast_1d(mode.ubar(grid)) - u_bvp)))
        if err > 1e3 * tol:
            warnings.warn(
                f"mode k={k}: closed form and BVP solve disagree by {err:.3e}",
                PrecisionLossWarning,
            )
    return mode


def solve_ubar_bvp(k: int, state: StationaryState, tol: float = 1e-10, n: int = 257):
    """Independent collocation solve of the mode ODE; returns (grid, values)."""
    K, R = state.K_s, state.R_s

    def rhs(r, y):
        return np.vstack([y[1], y[0] - 2.0 * (k + 1) / r * y[1]])

    def bc(ya, yb):
        return np.array([ya[0], yb[0] - 1.0])

    r0 = np.linspace(K, R, n)
    y0 = np.vstack([(r0 - K) / (R - K), np.full_like(r0, 1.0 / (R - K))])
    sol = solve_bvp(rhs, bc, r0, y0, tol=tol, max_nodes=200000)
    if not sol.success:
        raise RuntimeError(f"BVP solve failed for mode k={k}: {sol.message}")
    grid = np.linspace(K, R, n)
    return grid, sol.sol(grid)[0]


def vbar_prime_R_ivp(k: int, mode: ModeSolution, tol: float = 1e-10) -> float:
    """Cross-check of the outer flux: integrate w' = ubar - 2(k+1)/r w
    from the necrotic interface with the jump initial slope."""
    p = mode.state.params
    K, R = mode.K, mode.R
    w0 = (p.sigma_hat - p.sigma_tilde) / p.sigma_hat * mode.ubar_prime_K

    def rhs(r, w):
        return [float(mode.ubar(r)) - 2.0 * (k + 1) / r * w[0]]

    sol = solve_ivp(rhs, (K, R), [w0], rtol=tol, atol=1e-14, method="DOP853")
    if not sol.success:
        raise RuntimeError(f"flux integration failed for mode k={k}")
    return float(sol.y[0, -1])


def solve_vbar_prime(k: int, mode: ModeSolution, state: StationaryState,
                     p: ModelParams, tol: float = 1e-12) -> float:
    return mode.vbar_prime_R


def eval_ak(k: int, gamma: float, mode: ModeSolution) -> float:
    return mode.a_of(gamma)


def eval_gamma_k(k: int, mode: ModeSolution) -> float:
    if k < 2:
        raise ValueError("gamma_k is defined for k >= 2")
    return mode.gamma_k


def mode_response_zeta(k: int, state: StationaryState, p: ModelParams | None = None) -> float:
    return ModeSolution(k, state).zeta_gain


def find_gamma_star(state: StationaryState, k_max: int = 256, tol: float = 1e-12,
                    k_cap: int = 2048):
    """gamma_star = max_{k>=2} gamma_k with a certified tail bound.

    vbar_k'(Rs) decreases in k, so for k > k_max each gamma_k is below
    the gamma_k formula evaluated with vbar_{k_max}'(Rs); if that bound
    at k_max+1 is below the found maximum, no larger k can win.  k_max
    is raised automatically (up to k_cap) until certified.

    Returns (gamma_star, argmax_k, certified, modes_by_k).
    """
    if k_max < 8:
        raise ValueError("k_max must be at least 8")
    p = state.params
    modes: dict[int, ModeSolution] = {}
    while True:
        for k in range(2, k_max + 1):
            if k not in modes:
                modes[k] = ModeSolution(k, state, tol=tol)
        gammas = {k: modes[k].gamma_k for k in range(2, k_max + 1)}
        argmax_k = max(gammas, key=gammas.get)
        gamma_star = gammas[argmax_k]
        kb = k_max + 1
        tail_bound = (
            2.0 * state.R_s ** 3 / (kb * (kb - 1) * (kb + 2))
            * (state.g_at_1
               - p.mu * state.sigma_s_prime_at_Rs * modes[k_max].vbar_prime_R)
        )
        if tail_bound < gamma_star:
            return gamma_star, argmax_k, True, modes
        if 2 * k_max > k_cap:
            warnings.warn(
                f"gamma_star tail not certified at k_max={k_max}",
                PrecisionLossWarning,
            )
            return gamma_star, argmax_k, False, modes
        k_max *= 2


def apply_multiplier(ak_by_degree, coeffs):
    """Apply the Fourier-multiplier table {a_k} to spherical-harmonic
    coefficients given as an array indexed [k, l] (l-degenerate)."""
    coeffs = np.asarray(coeffs, dtype=float)
    ak = np.asarray([ak_by_degree[k] for k in range(coeffs.shape[0])])
    return ak[:, None] * coeffs


@dataclass
class SpectrumReport:
    """Eigenvalue table, thresholds, and the stability verdict."""

    params: ModelParams
    R_s: float
    K_s: float
    k_max: int
    k_table: np.ndarray
    vbar_prime_R: np.ndarray
    gamma_k: np.ndarray      # nan for k < 2
    a_k: np.ndarray          # at the configured gamma
    gamma_star: float
    argmax_k: int
    certified: bool
    verdict: str

    def to_json_dict(self) -> dict:
        return {
            "version": ARTIFACT_VERSION,
            "params": self.params.as_dict(),
            "R_s": self.R_s,
            "K_s": self.K_s,
            "k_max": self.k_max,
            "gamma_star": self.gamma_star,
            "argmax_k": self.argmax_k,
            "tail_certified": self.certified,
            "verdict": self.verdict,
        }

    def export_csv(self, path):
        p = self.params
        with open(path, "w") as fh:
            fh.write(
                f"# necrotumor v{ARTIFACT_VERSION} spectrum "
                f"R_s={self.R_s!r} K_s={self.K_s!r} "
                f"sigma_hat={p.sigma_hat!r} mu={p.mu!r} nu={p.nu!r} gamma={p.gamma!r}\n"
            )
            fh.write("k,vbar_prime_R,gamma_k,a_k\n")
            for i, k in enumerate(self.k_table):
                fh.write(
                    f"{k},{self.vbar_prime_R[i]!r},{self.gamma_k[i]!r},{self.a_k[i]!r}\n"
                )

    def export_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


def compute_spectrum(state: StationaryState, gamma: float | None = None,
                     k_max: int = 256, k_report: int = 64,
                     tol: float = 1e-12) -> SpectrumReport:
    """Full spectrum run: per-mode table for k = 0..k_report, gamma_star
    over k <= k_max, verdict at the configured gamma."""
    p = state.params
    if gamma is None:
        gamma = p.gamma
    gamma_star, argmax_k, certified, modes = find_gamma_star(state, k_max=k_max, tol=tol)
    for k in range(0, k_report + 1):
        if k not in modes:
            modes[k] = ModeSolution(k, state, tol=tol)
    ks = np.arange(0, k_report + 1)
    vb = np.array([modes[k].vbar_prime_R for k in ks])
    gk = np.array([modes[k].gamma_k if k >= 2 else np.nan for k in ks])
    ak = np.array([modes[k].a_of(gamma) for k in ks])
    unstable = [int(k) for k in ks if k != 1 and ak[k] > 0.0]
    if not unstable:
        verdict = "stable modulo translations"
    else:
        verdict = f"unstable (a_k > 0 for k in {unstable})"
    return SpectrumReport(
        params=p,
        R_s=state.R_s,
        K_s=state.K_s,
        k_max=k_max,
        k_table=ks,
        vbar_prime_R=vb,
        gamma_k=gk,
        a_k=ak,
        gamma_star=gamma_star,
        argmax_k=argmax_k,
        certified=certified,
        verdict=verdict,
    )


def radial_core_sensitivity(state: StationaryState, h: float = 1e-6) -> float:
    """Finite-difference oracle for the k=0 gain: (dK/dR)(Rs) * Rs/Ks."""
    p = state.params
    dK = (solve_K(state.R_s + h, p) - solve_K(state.R_s - h, p)) / (2.0 * h)
    return dK * state.R_s / state.K_s
