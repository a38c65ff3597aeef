"""Radial solver tests: RHS oracles, propagation, convergence, breakdown."""

import numpy as np
import pytest

from charshock.eos import make_chaplygin, make_polytropic
from charshock.errors import CflViolation, EosDomain
from charshock.radial import (
    RadialField,
    RunHistory,
    advance,
    energy_functional,
    radial_rhs,
    run_until,
)
from charshock.shortpulse import build_annulus_data, bump_seeds

EOS = make_polytropic(2.0)


@pytest.fixture(scope="module")
def pulse_run():
    """Small reference run shared by several tests."""
    data = build_annulus_data(bump_seeds(c=1.0, delta=0.05), r_grid_n=512)
    return run_until(data, a=0.0, eos=EOS, t_end=-1.7, r_min=1.35,
                     sample_dt=0.0025)


def test_zero_field_is_stationary():
    r = np.linspace(0.5, 3.0, 400)
    fld = RadialField(t=-2.0, r_grid=r, phi=np.zeros_like(r),
                      dtphi=np.zeros_like(r))
    rhs_phi, rhs_dtphi = radial_rhs(fld, a=0.3, eos=EOS)
    assert np.all(rhs_phi == 0.0)
    assert np.all(rhs_dtphi == 0.0)


def test_harmonic_profile_rhs_quadratic_in_amplitude():
    """phi = eps/r is harmonic: the static RHS is O(eps^2)."""
    r = np.linspace(1.0, 3.0, 2001)
    sups = []
    for eps in (1e-2, 1e-3):
        fld = RadialField(t=-2.0, r_grid=r, phi=eps / r,
                          dtphi=np.zeros_like(r))
        _, rhs_dtphi = radial_rhs(fld, a=0.0, eos=EOS)
        sups.append(np.max(np.abs(rhs_dtphi[5:-5])))
    assert sups[0] / sups[1] >= 50.0    # quadratic would give 100
    assert sups[1] <= 1e-5


def test_rhs_matches_cartesian_contraction():
    """The radial reduction equals the 3D contraction of the metric.

    For smooth radial (phi, dtphi) the solved-for d2phi/dt2 must satisfy
    g^{ab} d_a d_b phi = (a/eta^2)(dtphi - |grad phi|^2) with the spatial
    part of the contraction evaluated by 3D Cartesian finite differences.
    """
    a_damp = 0.3

    def phi_f(r):
        return 0.03 * np.exp(-((r - 2.0) / 0.3) ** 2)

    def dtphi_f(r):
        return 0.02 * np.exp(-((r - 2.1) / 0.25) ** 2)

    r = np.linspace(1.0, 3.2, 4401)
    fld = RadialField(t=-2.0, r_grid=r, phi=phi_f(r), dtphi=dtphi_f(r))
    _, dtt_radial = radial_rhs(fld, a=a_damp, eos=EOS)

    rng = np.random.default_rng(3)
    residuals = {}
    for hs in (2e-3, 1e-3):
        res = []
        for _ in range(12):
            x = rng.normal(size=3)
            x *= rng.uniform(1.7, 2.4) / np.linalg.norm(x)
            rr = np.linalg.norm(x)
            # spatial Hessian and gradients by central differences
            eye = np.eye(3)
            grad = np.array([
                (phi_f(np.linalg.norm(x + hs * eye[i]))
                 - phi_f(np.linalg.norm(x - hs * eye[i]))) / (2 * hs)
                for i in range(3)])
            grad_dt = np.array([
                (dtphi_f(np.linalg.norm(x + hs * eye[i]))
                 - dtphi_f(np.linalg.norm(x - hs * eye[i]))) / (2 * hs)
                for i in range(3)])
            hess = np.empty((3, 3))
            for i in range(3):
                for j in range(3):
                    hess[i, j] = (
                        phi_f(np.linalg.norm(x + hs * (eye[i] + eye[j])))
                        - phi_f(np.linalg.norm(x + hs * (eye[i] - eye[j])))
                        - phi_f(np.linalg.norm(x - hs * (eye[i] - eye[j])))
                        + phi_f(np.linalg.norm(x - hs * (eye[i] + eye[j])))
                    ) / (4 * hs * hs)
            dtphi_val = dtphi_f(rr)
            h = dtphi_val - 0.5 * grad @ grad + a_damp * phi_f(rr)
            eta_sq = EOS.eta_sq(h)
            v = -grad
            dtt = np.interp(rr, r, dtt_radial)
            contraction = (-dtt / eta_sq
                           - 2.0 * (v @ grad_dt) / eta_sq
                           + np.trace(hess)
                           - (v @ hess @ v) / eta_sq)
            source = a_damp * (dtphi_val - grad @ grad) / eta_sq
            res.append(abs(contraction - source))
        residuals[hs] = max(res)
    # residual is FD truncation error: second order in the stencil width
    assert residuals[2e-3] / residuals[1e-3] >= 3.0
    assert residuals[1e-3] <= 1e-4


def test_eos_domain_breakdown():
    r = np.linspace(1.0, 3.0, 500)
    fld = RadialField(t=-2.0, r_grid=r, phi=np.zeros_like(r),
                      dtphi=np.full_like(r, 0.6))
    with pytest.raises(EosDomain):
        radial_rhs(fld, a=0.0, eos=make_chaplygin())   # h = 0.6 >= 1/2


def test_cfl_violation():
    r = np.linspace(1.0, 3.0, 200)
    fld = RadialField(t=-2.0, r_grid=r, phi=np.zeros_like(r),
                      dtphi=np.zeros_like(r))
    with pytest.raises(CflViolation):
        advance(fld, dt=0.5, a=0.0, eos=EOS)


def test_run_until_records_breakdown():
    """Data outside the EOS domain terminates with status and last time."""
    data = build_annulus_data(bump_seeds(c=-60.0, delta=0.2), r_grid_n=512)
    hist = run_until(data, a=0.0, eos=EOS, t_end=-1.9, points_per_delta=16,
                     r_min=1.5)
    assert hist.status == "EosDomain"
    assert hist.last_good_time == -2.0


def test_front_speed(pulse_run):
    """The pulse front moves inward at the rest-state sound speed 1."""
    hist = pulse_run
    dr = hist.r_grid[1] - hist.r_grid[0]
    fld = hist.frame(hist.times[-1])
    idx = np.where(np.abs(fld.dtphi) > 1e-8)[0]
    front = hist.r_grid[idx[0]]
    # the inner support edge of the seed sits at 2 + 0.1 delta
    edge = 2.0 + 0.1 * hist.delta - (fld.t + 2.0)
    assert edge - 8.0 * dr <= front <= edge + dr


def test_domain_of_dependence(pulse_run):
    """Interior of the backward light cone stays identically trivial."""
    hist = pulse_run
    dr = hist.r_grid[1] - hist.r_grid[0]
    for t in hist.times[:: len(hist.times) // 8]:
        fld = hist.frame(float(t))
        mask = hist.r_grid < 2.0 - (t + 2.0) - 3.0 * dr
        assert np.max(np.abs(fld.phi[mask])) <= 1e-10


def test_energy_functional_nearly_nonincreasing(pulse_run):
    hist = pulse_run
    e0 = energy_functional(hist.frame(-2.0), EOS, 0.0)
    e1 = energy_functional(hist.frame(float(hist.times[-1])), EOS, 0.0)
    assert e1 <= e0 * (1.0 + 1e-3)


def test_second_derivative_growth(pulse_run):
    """max |d2phi/dr2| increases monotonically while the pulse steepens."""
    hist = pulse_run
    dr = hist.r_grid[1] - hist.r_grid[0]
    n = len(hist.times)
    maxima = []
    for t in hist.times[int(0.8 * n):: 10]:
        fld = hist.frame(float(t))
        d2 = np.diff(fld.phi, 2) / dr**2
        maxima.append(np.max(np.abs(d2)))
    assert all(b > a for a, b in zip(maxima, maxima[1:]))


def test_smallness_propagation():
    """sup |dtphi| and sup |phi| scale like delta at fixed pre-shock time."""
    sups = {}
    for delta in (0.1, 0.05):
        data = build_annulus_data(bump_seeds(c=0.5, delta=delta), r_grid_n=512)
        hist = run_until(data, a=0.0, eos=EOS, t_end=-1.8,
                         points_per_delta=32, r_min=1.6)
        fld = hist.frame(-1.8)
        sups[delta] = (np.max(np.abs(fld.dtphi)), np.max(np.abs(fld.phi)))
    assert sups[0.05][0] / sups[0.1][0] == pytest.approx(0.5, abs=0.15)
    # phi carries an extra factor delta
    assert sups[0.05][1] / sups[0.1][1] == pytest.approx(0.25, abs=0.1)


def test_self_convergence():
    """Grid doubling shrinks the pre-shock error by >= 8x (>= 3rd order)."""
    data = build_annulus_data(bump_seeds(c=0.5, delta=0.1), r_grid_n=512)
    sols = {}
    for ppd in (16, 32, 64):
        hist = run_until(data, a=0.0, eos=EOS, t_end=-1.8,
                         points_per_delta=ppd, r_min=1.6)
        fld = hist.frame(-1.8)
        sols[ppd] = (hist.r_grid, fld.phi)
    r_fine, phi_fine = sols[64]
    errs = []
    for ppd in (16, 32):
        r, phi = sols[ppd]
        errs.append(np.max(np.abs(phi - np.interp(r, r_fine, phi_fine))))
    assert errs[0] / errs[1] >= 8.0


def test_history_save_load_round_trip(tmp_path, pulse_run):
    path = tmp_path / "run.npz"
    pulse_run.save(path)
    loaded = RunHistory.load(path)
    assert np.array_equal(loaded.phi, pulse_run.phi)
    assert np.array_equal(loaded.times, pulse_run.times)
    assert loaded.status == pulse_run.status
    assert loaded.eos_meta["family"] == "polytropic"
    assert loaded.eos_meta["gamma"] == 2.0
    assert loaded.delta == pulse_run.delta
