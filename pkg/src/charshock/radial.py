"""Method-of-lines solver for the damped potential-flow wave equation in
spherical symmetry.

State variables are the potential phi and its time derivative dtphi on a
uniform radial grid.  The evolution equation, obtained by contracting the
inverse acoustical metric with the Hessian of phi and keeping the damping
source, is

    d(dtphi)/dt = 2 dphi * d(dtphi)/dr
                  + eta^2 (d2phi + (2/r) dphi)
                  - dphi^2 * d2phi
                  - a (dtphi - dphi^2)

with dphi = d(phi)/dr, enthalpy h = dtphi - dphi^2/2 + a*phi and sound
speed eta = eta(h) from the equation of state.  Spatial derivatives are
4th-order central differences; time stepping is classical RK4 under a CFL
restriction based on the fastest characteristic speed eta + |v_r|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eos import EquationOfState
from .errors import CflViolation, EosDomain, NonFiniteField, OutOfDomain

__all__ = [
    "RadialField",
    "RunHistory",
    "radial_rhs",
    "advance",
    "run_until",
    "energy_functional",
]

_N_PIN = 3  # inner grid points held at zero (deep inside the trivial region)


def d1(f, dx):
    """Fourth-order first derivative, one-sided at the edges."""
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dx)
    out[:2] = (-25 * f[:2] + 48 * f[1:3] - 36 * f[2:4] + 16 * f[3:5] - 3 * f[4:6]) / (12 * dx)
    out[-2:] = (25 * f[-2:] - 48 * f[-3:-1] + 36 * f[-4:-2] - 16 * f[-5:-3] + 3 * f[-6:-4]) / (12 * dx)
    return out


def d2(f, dx):
    """Fourth-order second derivative, one-sided at the edges."""
    out = np.empty_like(f)
    out[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * dx**2)
    # 4th-order one-sided second derivative (7-point)
    c = np.array([469.0, -3132.0, 5265.0, -5080.0, 2970.0, -972.0, 137.0]) / 180.0
    out[0] = c @ f[:7] / dx**2
    out[1] = c @ f[1:8] / dx**2
    out[-1] = c[::-1] @ f[-7:] / dx**2
    out[-2] = c[::-1] @ f[-8:-1] / dx**2
    return out


@dataclass
class RadialField:
    t: float
    r_grid: np.ndarray
    phi: np.ndarray
    dtphi: np.ndarray

    def derived(self, eos: EquationOfState, a: float):
        """Pointwise derived quantities: dphi, h, eta_sq, v_r."""
        dphi = d1(self.phi, self.r_grid[1] - self.r_grid[0])
        h = self.dtphi - 0.5 * dphi**2 + a * self.phi
        eta_sq = eos.eta_sq(h)
        return {"dphi": dphi, "h": h, "eta_sq": eta_sq, "v_r": -dphi}


def radial_rhs(fld: RadialField, a: float, eos: EquationOfState):
    """Time derivatives (d phi/dt, d dtphi/dt) of the radial system."""
    r = fld.r_grid
    dr = r[1] - r[0]
    phi, dtphi = fld.phi, fld.dtphi
    dphi = d1(phi, dr)
    d2phi = d2(phi, dr)
    ddtphi = d1(dtphi, dr)

    h = dtphi - 0.5 * dphi**2 + a * phi
    lo, hi = eos.h_bounds()
    if np.min(h) <= lo or np.max(h) >= hi:
        raise EosDomain(
            f"enthalpy left admissible interval ({lo}, {hi}) at t={fld.t:.6f}")
    eta_sq = eos.eta_sq(h)

    rhs_phi = dtphi.copy()
    rhs_dtphi = (2.0 * dphi * ddtphi
                 + eta_sq * (d2phi + 2.0 * dphi / r)
                 - dphi**2 * d2phi
                 - a * (dtphi - dphi**2))

    # inner boundary: pinned to zero, deep inside the trivial region
    rhs_phi[:_N_PIN] = 0.0
    rhs_dtphi[:_N_PIN] = 0.0

    # outer boundary: characteristic outflow for the outgoing spherical wave,
    # (dt + lam * (dr + 1/r)) dtphi = 0 with lam = eta + v_r
    lam = np.sqrt(eta_sq[-2:]) - dphi[-2:]
    rhs_dtphi[-2:] = -lam * (ddtphi[-2:] + dtphi[-2:] / r[-2:])

    if not (np.all(np.isfinite(rhs_phi)) and np.all(np.isfinite(rhs_dtphi))):
        raise NonFiniteField(f"non-finite right-hand side at t={fld.t:.6f}")
    return rhs_phi, rhs_dtphi


def advance(fld: RadialField, dt: float, a: float, eos: EquationOfState):
    """One classical RK4 step; enforces the CFL precondition."""
    der = fld.derived(eos, a)
    speed = np.max(np.sqrt(der["eta_sq"]) + np.abs(der["v_r"]))
    dr = fld.r_grid[1] - fld.r_grid[0]
    if dt > 0.9 * dr / speed + 1e-15:
        raise CflViolation(
            f"dt={dt:.3e} exceeds CFL limit {0.9 * dr / speed:.3e}")

    def f(phi, dtphi, t):
        return radial_rhs(RadialField(t, fld.r_grid, phi, dtphi), a, eos)

    p, q, t = fld.phi, fld.dtphi, fld.t
    k1p, k1q = f(p, q, t)
    k2p, k2q = f(p + 0.5 * dt * k1p, q + 0.5 * dt * k1q, t + 0.5 * dt)
    k3p, k3q = f(p + 0.5 * dt * k2p, q + 0.5 * dt * k2q, t + 0.5 * dt)
    k4p, k4q = f(p + dt * k3p, q + dt * k3q, t + dt)
    phi_new = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
    dtphi_new = q + dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
    if not (np.all(np.isfinite(phi_new)) and np.all(np.isfinite(dtphi_new))):
        raise NonFiniteField(f"non-finite field after step to t={t + dt:.6f}")
    return RadialField(t + dt, fld.r_grid, phi_new, dtphi_new)


@dataclass
class RunHistory:
    r_grid: np.ndarray
    times: np.ndarray                 # snapshot times, ascending
    phi: np.ndarray                   # (n_snapshots, n_r)
    dtphi: np.ndarray
    a: float
    delta: float
    status: str                       # 'Completed' | 'EosDomain' | 'NonFinite'
    last_good_time: float
    eos_meta: dict = field(default_factory=dict)
    filter_strength: float = 0.0

    def frame(self, t):
        """Fields at time t by cubic (4-point Lagrange) interpolation.

        Linear interpolation in t systematically smooths the pulse: the
        relative bias is (omega*dt)^2/8 with omega ~ 1/delta, which does
        not vanish when the snapshot cadence is scaled with delta.  Cubic
        interpolation drops this to (omega*dt)^4.  Falls back to linear
        when fewer than four snapshots are stored.
        """
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise IndexError(f"time {t} outside stored range "
                             f"[{times[0]}, {times[-1]}]")
        i = int(np.clip(np.searchsorted(times, t) - 1, 0, len(times) - 2))
        if len(times) < 4:
            w = (t - times[i]) / (times[i + 1] - times[i])
            w = min(max(w, 0.0), 1.0)
            phi = (1 - w) * self.phi[i] + w * self.phi[i + 1]
            dtphi = (1 - w) * self.dtphi[i] + w * self.dtphi[i + 1]
            return RadialField(t, self.r_grid, phi, dtphi)
        lo = int(np.clip(i - 1, 0, len(times) - 4))
        ts = times[lo:lo + 4]
        weights = np.empty(4)
        for k in range(4):
            others = np.delete(ts, k)
            weights[k] = np.prod((t - others) / (ts[k] - others))
        phi = np.tensordot(weights, self.phi[lo:lo + 4], axes=1)
        dtphi = np.tensordot(weights, self.dtphi[lo:lo + 4], axes=1)
        return RadialField(t, self.r_grid, phi, dtphi)

    def save(self, path):
        np.savez_compressed(
            path, r_grid=self.r_grid, times=self.times, phi=self.phi,
            dtphi=self.dtphi, a=self.a, delta=self.delta,
            status=self.status, last_good_time=self.last_good_time,
            eos_family=self.eos_meta.get("family", ""),
            eos_gamma=self.eos_meta.get("gamma", np.nan),
            filter_strength=self.filter_strength)

    @classmethod
    def load(cls, path):
        z = np.load(path)
        gamma = float(z["eos_gamma"])
        meta = {"family": str(z["eos_family"])}
        if np.isfinite(gamma):
            meta["gamma"] = gamma
        return cls(r_grid=z["r_grid"], times=z["times"], phi=z["phi"],
                   dtphi=z["dtphi"], a=float(z["a"]), delta=float(z["delta"]),
                   status=str(z["status"]),
                   last_good_time=float(z["last_good_time"]), eos_meta=meta,
                   filter_strength=float(z["filter_strength"]))


def energy_functional(fld: RadialField, eos: EquationOfState, a: float):
    """int ((dtphi)^2 + eta^2 (dphi)^2) r^2 dr, a Lyapunov-type functional."""
    der = fld.derived(eos, a)
    r = fld.r_grid
    integrand = (fld.dtphi**2 + der["eta_sq"] * der["dphi"]**2) * r**2
    return float(np.trapezoid(integrand, r))


def _filter6(f, eps):
    """Sixth-order low-pass filter; interior points only."""
    out = f.copy()
    out[3:-3] -= eps / 64.0 * (f[:-6] - 6 * f[1:-5] + 15 * f[2:-4]
                               - 20 * f[3:-3] + 15 * f[4:-2]
                               - 6 * f[5:-1] + f[6:])
    return out


def run_until(data, a, eos, t_end, cfl=0.4, points_per_delta=64,
              r_min=0.05, pad=1.0, sample_dt=None, filter_strength=0.0):
    """Evolve short-pulse data from t = -2 to t_end, storing snapshots.

    data: ShortPulseData providing phi_at / dtphi_at evaluators and delta.
    Snapshots are stored every sample_dt (default delta/20) plus the first
    and last time reached.  Breakdowns (EOS domain exit, non-finite fields)
    terminate the run with status and last_good_time recorded.
    """
    delta = data.delta
    if t_end >= 0.0:
        raise CflViolation(f"t_end must be negative, got {t_end}")
    dr = delta / points_per_delta
    r_max = data.r_grid[-1] + pad
    n = int(np.ceil((r_max - r_min) / dr))
    r = r_min + dr * np.arange(n + 1)
    fld = RadialField(t=-2.0, r_grid=r, phi=data.phi_at(r),
                      dtphi=data.dtphi_at(r))

    if sample_dt is None:
        sample_dt = delta / 20.0
    sample_times = np.arange(-2.0, t_end + 1e-12, sample_dt)
    if sample_times[-1] < t_end - 1e-12:
        sample_times = np.append(sample_times, t_end)

    snaps_t, snaps_p, snaps_q = [fld.t], [fld.phi.copy()], [fld.dtphi.copy()]
    status, next_i = "Completed", 1
    try:
        while fld.t < t_end - 1e-12:
            der = fld.derived(eos, a)
            speed = np.max(np.sqrt(der["eta_sq"]) + np.abs(der["v_r"]))
            dt = min(cfl * (r[1] - r[0]) / speed,
                     sample_times[next_i] - fld.t)
            fld = advance(fld, dt, a, eos)
            if filter_strength > 0.0:
                fld.phi = _filter6(fld.phi, filter_strength)
                fld.dtphi = _filter6(fld.dtphi, filter_strength)
            if fld.t >= sample_times[next_i] - 1e-12:
                snaps_t.append(fld.t)
                snaps_p.append(fld.phi.copy())
                snaps_q.append(fld.dtphi.copy())
                next_i = min(next_i + 1, len(sample_times) - 1)
    except OutOfDomain:
        status = "EosDomain"
    except NonFiniteField:
        status = "NonFinite"

    meta = {"family": eos.family}
    if eos.gamma is not None:
        meta["gamma"] = eos.gamma
    return RunHistory(
        r_grid=r, times=np.asarray(snaps_t), phi=np.asarray(snaps_p),
        dtphi=np.asarray(snaps_q), a=a, delta=delta, status=status,
        last_good_time=snaps_t[-1], eos_meta=meta,
        filter_strength=filter_strength)
