"""Tumor-radius dynamics R'(t) = R F(R) for the radial model.

F is continuous but only piecewise-smooth: its derivative jumps at
R = R* where the necrotic core appears.  The integrator therefore runs
with a terminal event at R = R* and restarts on the other branch, so
the adaptive stepper never straddles the kink.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .params import ARTIFACT_VERSION, ModelParams
from .radial import eval_F, solve_K, solve_Rs, solve_Rstar


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of R' = R F(R)."""

    params: ModelParams
    R0: float
    t: np.ndarray
    R: np.ndarray
    K: np.ndarray
    onset_time: float | None  # first time R(t) >= R*; None if never reached

    def as_dict(self) -> dict:
        return {
            "version": ARTIFACT_VERSION,
            "params": self.params.as_dict(),
            "R0": self.R0,
            "T": float(self.t[-1]),
            "R_final": float(self.R[-1]),
            "K_final": float(self.K[-1]),
            "onset_time": self.onset_time,
        }

    def export_csv(self, path):
        p = self.params
        with open(path, "w") as fh:
            fh.write(
                f"# necrotumor v{ARTIFACT_VERSION} trajectory R0={self.R0!r} "
                f"sigma_hat={p.sigma_hat!r} mu={p.mu!r} nu={p.nu!r}\n"
            )
            fh.write("t,R,K\n")
            for ti, Ri, Ki in zip(self.t, self.R, self.K):
                fh.write(f"{ti!r},{Ri!r},{Ki!r}\n")

    def export_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)
            fh.write("\n")


def integrate(p: ModelParams, R0: float, T: float, n_samples: int = 512,
              rtol: float = 1e-10, atol: float = 1e-12) -> Trajectory:
    """Integrate R' = R F(R) on [0, T] from R(0) = R0 > 0.

    Splits the integration at crossings of R = R* (necrotic onset or
    extinction of the core) so each RK45 segment sees a smooth right
    side.  Samples are taken from the dense output on a uniform grid.
    """
    if R0 <= 0.0:
        raise ValueError("R0 must be positive")
    if T <= 0.0:
        raise ValueError("T must be positive")
    Rstar = solve_Rstar(p)

    def rhs(t, y):
        return [y[0] * eval_F(y[0], p)]

    def crossing(t, y):
        return y[0] - Rstar

    crossing.terminal = True

    t_grid = np.linspace(0.0, T, n_samples)
    ts = [np.array([0.0])]
    Rs_ = [np.array([R0])]
    onset = 0.0 if R0 >= Rstar else None
    t0, y0 = 0.0, R0
    for _ in range(16):  # R' = R F(R) is monotone toward R_s; at most a
        # couple of segments occur, the cap is just a safety net
        sol = solve_ivp(rhs, (t0, T), [y0], method="RK45", rtol=rtol,
                        atol=atol, dense_output=True, events=crossing)
        if not sol.success:
            raise RuntimeError(f"radius integration failed: {sol.message}")
        seg = t_grid[(t_grid > t0) & (t_grid <= sol.t[-1])]
        if seg.size:
            ts.append(seg)
            Rs_.append(sol.sol(seg)[0])
        if sol.status != 1:  # reached T without an event
            break
        t0 = float(sol.t_events[0][0])
        if onset is None and R0 < Rstar:
            onset = t0
        if t0 >= T:
            break
        # restart just past the kink, on the side the flow is headed,
        # so the terminal event does not refire at the restart point
        direction = 1.0 if eval_F(Rstar, p) > 0.0 else -1.0
        y0 = Rstar * (1.0 + direction * 1e-13)
        t0 = np.nextafter(t0, T)
    t = np.concatenate(ts)
    R = np.concatenate(Rs_)
    K = np.array([solve_K(Ri, p) for Ri in R])
    return Trajectory(params=p, R0=R0, t=t, R=R, K=K, onset_time=onset)


def onset_time(p: ModelParams, R0: float, T_max: float = 1e4,
               rtol: float = 1e-10) -> float | None:
    """Time at which the necrotic core first appears (R reaches R*)
    starting from R0 < R*; None if R never reaches R* by T_max."""
    Rstar = solve_Rstar(p)
    if R0 >= Rstar:
        return 0.0

    def rhs(t, y):
        return [y[0] * eval_F(y[0], p)]

    def crossing(t, y):
        return y[0] - Rstar

    crossing.terminal = True
    sol = solve_ivp(rhs, (0.0, T_max), [R0], method="RK45", rtol=rtol,
                    atol=1e-12, events=crossing)
    if not sol.success:
        raise RuntimeError(f"radius integration failed: {sol.message}")
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return None


def converged_radius_error(p: ModelParams, R0: float, T: float = 200.0) -> float:
    """|R(T) - R_s| for a run from R0; convergence diagnostic."""
    st = solve_Rs(p)
    traj = integrate(p, R0, T)
    return abs(float(traj.R[-1]) - st.R_s)
