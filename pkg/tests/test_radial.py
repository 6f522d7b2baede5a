import math

import numpy as np
import pytest
from scipy.integrate import quad

from necrotumor.params import ModelParams, kinetics_g
from necrotumor.radial import (
    eval_F,
    eval_U,
    eval_U_r,
    eval_U_rr,
    eval_V,
    eval_V_r,
    eval_V_rr,
    export_profile_csv,
    export_state_json,
    sample_profile,
    solve_K,
    solve_Rs,
    solve_Rstar,
)

P1 = ModelParams(0.5, 1.0, 0.25)
P2 = ModelParams(0.3, 2.0, 0.3)

# regression constants recorded from converged bracketing solves
RSTAR_P1 = 2.1773189849653063
RS_P1 = 5.776463954445257
KS_P1 = 4.34858291474316


class TestRstar:
    def test_known_inverse_point(self):
        # sinh(1)/1 = 1/sigma_hat with sigma_hat = 1/sinh(1)
        p = ModelParams(1.0 / math.sinh(1.0), 1.0, 0.1)
        assert solve_Rstar(p) == pytest.approx(1.0, abs=1e-12)

    def test_defining_equation(self):
        R = solve_Rstar(P1)
        assert math.sinh(R) / R == pytest.approx(1.0 / P1.sigma_hat, rel=1e-13)
        assert R == pytest.approx(RSTAR_P1, rel=1e-14)

    def test_monotone_in_threshold(self):
        mk = lambda s: solve_Rstar(ModelParams(s, 1.0, 0.05))
        assert mk(0.999) < mk(0.9) < mk(0.5) < mk(0.1)


class TestSolveK:
    def test_zero_below_onset(self):
        R = solve_Rstar(P1)
        assert solve_K(0.5 * R, P1) == 0.0
        assert solve_K(R, P1) == pytest.approx(0.0, abs=1e-7)

    def test_defining_equation(self):
        for p in (P1, P2):
            for R in (4.0, 7.0, 25.0):
                K = solve_K(R, p)
                resid = math.sinh(R - K) + K * math.cosh(R - K) - R / p.sigma_hat
                assert abs(resid) < 1e-9 * (R / p.sigma_hat)

    def test_regression_value(self):
        assert solve_K(4.0, P1) == pytest.approx(2.5019369049851137, rel=1e-12)

    def test_large_radius_no_overflow(self):
        K = solve_K(2000.0, P1)
        assert 0.0 < K < 2000.0
        # thin living shell: R - K approaches a finite limit
        assert 2000.0 - K < 10.0

    def test_strictly_increasing(self):
        # sampled monotonicity of the inner radius in R
        Rstar = solve_Rstar(P1)
        Rgrid = np.linspace(1.01 * Rstar, 40.0, 200)
        Ks = np.array([solve_K(R, P1) for R in Rgrid])
        assert np.all(np.diff(Ks) > 0.0)


class TestNutrientProfile:
    def test_boundary_value(self):
        for p in (P1, P2):
            for R in (1.0, 4.0, 10.0):
                assert eval_U(R, R, p) == pytest.approx(1.0, rel=1e-12)

    def test_bounds(self):
        for p in (P1, P2):
            for R in (1.5, 4.0, 12.0):
                r = np.linspace(0.0, R, 2001)
                u = np.asarray(eval_U(r, R, p))
                assert np.all(u >= p.sigma_hat - 1e-12)
                assert np.all(u <= 1.0 + 1e-12)

    def test_constant_on_core(self):
        K = solve_K(6.0, P1)
        r = np.linspace(0.0, 0.999 * K, 50)
        assert np.allclose(eval_U(r, 6.0, P1), P1.sigma_hat, atol=1e-14)

    def test_center_regularity(self):
        # below onset the profile is sinh r/(r) scaled; smooth at 0
        R = 1.5
        assert eval_U(0.0, R, P1) == pytest.approx(
            R / math.sinh(R) * 1.0, rel=1e-12
        )
        assert eval_U_r(0.0, R, P1) == pytest.approx(0.0, abs=1e-14)

    def test_interface_continuity(self):
        R = 8.0
        K = solve_K(R, P1)
        eps = 1e-8
        assert eval_U(K + eps, R, P1) == pytest.approx(P1.sigma_hat, abs=1e-14)
        assert eval_U_r(K + eps, R, P1) == pytest.approx(0.0, abs=1e-7)

    def test_branch_continuity_at_onset(self):
        Rstar = solve_Rstar(P2)
        r = np.linspace(0.0, Rstar * (1 - 1e-7), 30)
        below = np.asarray(eval_U(r, Rstar * (1 - 1e-7), P2))
        above = np.asarray(eval_U(r, Rstar * (1 + 1e-7), P2))
        assert np.max(np.abs(below - above)) < 1e-5

    def test_satisfies_ode(self):
        # Lap U = U on the living shell: U'' + 2U'/r - U = 0
        for p, R in ((P1, 5.0), (P2, 9.0)):
            K = solve_K(R, p)
            r = np.linspace(K + 0.05, R - 0.01, 40)
            resid = (
                np.asarray(eval_U_rr(r, R, p))
                + 2.0 / r * np.asarray(eval_U_r(r, R, p))
                - np.asarray(eval_U(r, R, p))
            )
            assert np.max(np.abs(resid)) < 1e-10


class TestPressureProfile:
    def test_zero_at_boundary(self):
        for p, R in ((P1, 5.0), (P2, 8.0)):
            assert eval_V(R, R, p) == pytest.approx(0.0, abs=1e-12)

    def test_interface_slope(self):
        for p, R in ((P1, 5.0), (P2, 8.0)):
            K = solve_K(R, p)
            assert eval_V_r(K, R, p) == pytest.approx(p.nu * K / 3.0, rel=1e-10)

    def test_poisson_residual(self):
        # -Lap V = g(U) pointwise via the analytic second derivative
        for p, R in ((P1, 5.0), (P2, 10.0)):
            K = solve_K(R, p)
            r = np.concatenate([
                np.linspace(0.05, K - 0.05, 25),
                np.linspace(K + 0.05, R - 0.01, 25),
            ])
            lap = np.asarray(eval_V_rr(r, R, p)) + 2.0 / r * np.asarray(
                eval_V_r(r, R, p)
            )
            g = np.array([kinetics_g(eval_U(ri, R, p), p) for ri in r])
            assert np.max(np.abs(lap + g)) < 1e-6

    def test_double_integral_reduction(self):
        # V(r) = int_r^R eta^-2 int_0^eta g(U(xi)) xi^2 dxi deta; the
        # implementation reduces this to elementary antiderivatives.
        # Verify against direct nested quadrature at three radii.
        p, R = P1, 5.0
        K = solve_K(R, p)

        def inner(eta):
            val, _ = quad(
                lambda xi: kinetics_g(eval_U(xi, R, p, K), p) * xi * xi,
                0.0, eta, points=[K] if K < eta else None, limit=200,
            )
            return val / eta ** 2

        for r in (0.7, K, 0.5 * (K + R)):
            direct, _ = quad(inner, r, R, points=[K] if r < K else None,
                             limit=200)
            assert eval_V(r, R, p) == pytest.approx(direct, abs=5e-9)

    def test_requires_necrotic_core(self):
        with pytest.raises(ValueError):
            eval_V(0.5, 1.0, P1)  # R below onset, K = 0


class TestGrowthFunctional:
    def test_small_radius_limit(self):
        for p in (P1, P2):
            target = p.mu * (1.0 - p.sigma_hat) / 3.0
            assert eval_F(1e-6, p) == pytest.approx(target, rel=1e-9)

    def test_series_matches_closed_form(self):
        # the series branch and the sinh/cosh branch agree near the seam
        # (the closed form loses ~7 digits to cancellation there, which
        # is exactly why the series branch exists)
        for p in (P1, P2):
            lo = eval_F(0.99e-4, p)
            hi = eval_F(1.01e-4, p)
            assert lo == pytest.approx(hi, rel=1e-7)

    def test_quadrature_identity(self):
        # F(R) = R^-3 int_0^R g(U) r^2 dr
        for p in (P1, P2):
            for R in (4.0, 7.5):
                K = solve_K(R, p)
                val, _ = quad(
                    lambda rr: kinetics_g(eval_U(rr, R, p, K), p) * rr * rr,
                    0.0, R, points=[K], limit=200,
                )
                assert eval_F(R, p) == pytest.approx(val / R ** 3, abs=1e-10)

    def test_strictly_decreasing(self):
        for p in (P1, P2):
            grid = np.logspace(-2, math.log10(2000.0), 64)
            vals = np.array([eval_F(R, p) for R in grid])
            assert np.all(np.diff(vals) < 0.0)

    def test_sign_change_at_Rs(self):
        st = solve_Rs(P1)
        assert eval_F(0.99 * st.R_s, P1) > 0.0
        assert eval_F(1.01 * st.R_s, P1) < 0.0


class TestStationaryState:
    def test_regression_values(self):
        st = solve_Rs(P1)
        assert st.R_s == pytest.approx(RS_P1, rel=1e-12)
        assert st.K_s == pytest.approx(KS_P1, rel=1e-12)

    def test_above_onset(self):
        for p in (P1, P2):
            st = solve_Rs(p)
            assert st.R_s > solve_Rstar(p)
            assert 0.0 < st.K_s < st.R_s

    def test_both_root_characterizations(self):
        # F(R_s) = 0 and pi'(R_s) = 0 identify the same radius
        for p in (P1, P2):
            st = solve_Rs(p)
            assert abs(eval_F(st.R_s, p)) < 1e-13
            assert abs(st.pi_prime(st.R_s)) < 1e-12

    def test_curvature_at_boundary(self):
        # pi''(R_s) = -g(1)
        for p in (P1, P2):
            st = solve_Rs(p)
            assert eval_V_rr(st.R_s, st.R_s, p) == pytest.approx(
                -st.g_at_1, rel=1e-10
            )


class TestExports:
    def test_profile_csv_header_and_idempotence(self, tmp_path):
        prof = sample_profile(5.0, P1, n=64)
        path = tmp_path / "profile.csv"
        export_profile_csv(path, prof)
        first = path.read_bytes()
        assert first.startswith(b"# necrotumor v")
        assert b"sigma_hat=0.5" in first.splitlines()[0]
        export_profile_csv(path, prof)
        assert path.read_bytes() == first

    def test_state_json(self, tmp_path):
        import json

        st = solve_Rs(P1)
        path = tmp_path / "state.json"
        export_state_json(path, st)
        data = json.loads(path.read_text())
        assert data["version"]
        assert data["R_s"] == pytest.approx(RS_P1)
        assert abs(data["F_residual"]) < 1e-13
