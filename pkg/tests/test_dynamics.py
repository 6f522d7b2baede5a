import json

import numpy as np
import pytest

from necrotumor.dynamics import converged_radius_error, integrate, onset_time
from necrotumor.params import ModelParams
from necrotumor.radial import solve_Rs, solve_Rstar

P1 = ModelParams(0.5, 1.0, 0.25)
P2 = ModelParams(0.3, 2.0, 0.3)


@pytest.fixture(scope="module")
def st1():
    return solve_Rs(P1)


def test_equilibrium_is_fixed(st1):
    traj = integrate(P1, st1.R_s, 50.0)
    assert np.max(np.abs(traj.R - st1.R_s)) < 1e-8


def test_growth_from_below(st1):
    traj = integrate(P1, 0.5 * st1.R_s, 200.0)
    assert np.all(np.diff(traj.R) > -1e-12)
    # no overshoot beyond integrator tolerance
    assert np.all(traj.R <= st1.R_s + 1e-9)
    assert abs(traj.R[-1] - st1.R_s) < 1e-5


def test_decay_from_above(st1):
    traj = integrate(P1, 2.0 * st1.R_s, 200.0)
    assert np.all(np.diff(traj.R) < 1e-12)
    assert traj.R[-1] > st1.R_s - 1e-9
    assert abs(traj.R[-1] - st1.R_s) < 1e-5


def test_inner_radius_tracks_outer(st1):
    traj = integrate(P1, 0.5 * st1.R_s, 200.0)
    Rstar = solve_Rstar(P1)
    assert np.all(traj.K[traj.R <= Rstar] == 0.0)
    grown = traj.K[traj.R > Rstar * 1.001]
    assert np.all(np.diff(grown) > -1e-10)
    assert traj.K[-1] == pytest.approx(st1.K_s, abs=1e-5)


def test_onset_time_finite_below_onset():
    for p in (P1, P2):
        Rstar = solve_Rstar(p)
        t = onset_time(p, 0.25 * Rstar)
        assert t is not None and 0.0 < t < 100.0
        traj = integrate(p, 0.25 * Rstar, 2.0 * t)
        assert traj.onset_time == pytest.approx(t, rel=1e-6)


def test_onset_time_zero_above_onset():
    Rstar = solve_Rstar(P1)
    assert onset_time(P1, 2.0 * Rstar) == 0.0


def test_smooth_across_onset():
    # the integrator restarts at R = R*; the sampled radius must still
    # be monotone and continuous through the switch
    Rstar = solve_Rstar(P1)
    traj = integrate(P1, 0.5 * Rstar, 60.0)
    assert np.all(np.diff(traj.R) > -1e-12)
    assert np.max(np.abs(np.diff(traj.R))) < 0.2  # no jumps


def test_second_parameter_set_converges():
    assert converged_radius_error(P2, 6.0, T=200.0) < 1e-6


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        integrate(P1, -1.0, 10.0)
    with pytest.raises(ValueError):
        integrate(P1, 1.0, 0.0)


def test_exports(tmp_path):
    traj = integrate(P1, 1.0, 10.0, n_samples=32)
    csv = tmp_path / "traj.csv"
    traj.export_csv(csv)
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("# necrotumor v")
    assert lines[1] == "t,R,K"
    traj.export_json(tmp_path / "traj.json")
    data = json.loads((tmp_path / "traj.json").read_text())
    assert data["R0"] == 1.0
    assert data["onset_time"] == pytest.approx(traj.onset_time)
    # idempotence: identical bytes on re-export
    before = csv.read_bytes()
    traj.export_csv(csv)
    assert csv.read_bytes() == before
