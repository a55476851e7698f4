"""Radial ground state of -Dw + w = mu w^3 on R^3.

The unique positive radial decaying solution W_mu solves, in the radial
variable s = |x|,

    w'' + (2/s) w' - w + mu w^3 = 0,   w'(0) = 0,   w -> 0,

and obeys the exact scaling W_mu = mu^(-1/2) W_1 and the far-field law
w(s) ~ c_mu e^(-s)/s.  Note that e^(-s)/s solves the linearized equation
w'' + (2/s)w' - w = 0 exactly in three dimensions, so the tail model is
accurate to O(e^(-3s)) with no algebraic correction.

The solver shoots from s = 0 and bisects w(0) between overshoot (the
trajectory crosses zero) and undershoot (the trajectory turns upward).
Double-precision shooting cannot stay on the decaying branch forever: the
bisection leaves an O(tol) error on w(0) that the growing mode e^(+s)
amplifies, so past some radius the integrated trajectory is noise.  The
profile therefore stores raw integration only up to an adaptively detected
`tail_cutoff` and continues with the tail model beyond it, which keeps the
table positive, monotone, and residual-accurate over the whole grid.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import PchipInterpolator


class GroundStateError(Exception):
    """Shooting or quadrature failure while constructing a profile."""


@dataclass(frozen=True)
class RadialProfile:
    """Tabulated ground state with tail model and mass integrals.

    grid/values/derivs cover [0, s_max] at uniform step; beyond
    `tail_cutoff` the stored values come from the model
    tail_amplitude * e^(-s)/s.  mass2 = int W^2, mass4 = int W^4 over R^3,
    interaction_base = int W^3(y) e^(y1) dy.
    """

    mu: float
    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    tail_amplitude: float
    tail_cutoff: float
    mass2: float
    mass4: float
    interaction_base: float
    fitted_tail_rate: float  # diagnostic; the stored model forces rate = 1

    @cached_property
    def _interp(self) -> PchipInterpolator:
        # monotone cubic on the tabulated part below the cutoff
        mask = self.grid <= self.tail_cutoff + 1e-12
        return PchipInterpolator(self.grid[mask], self.values[mask], extrapolate=False)

    def __call__(self, s):
        return profile_value(self, s)

    def derivative(self, s):
        """dW/ds, interpolated below the cutoff, model derivative beyond."""
        s = np.asarray(s, dtype=float)
        inside = s <= self.tail_cutoff
        out = np.empty(s.shape, dtype=float)
        if np.any(inside):
            out[inside] = self._interp.derivative()(np.clip(s[inside], 0.0, None))
        if np.any(~inside):
            st = s[~inside]
            c = self.tail_amplitude
            out[~inside] = -c * np.exp(-st) * (1.0 / st + 1.0 / st**2)
        return out if out.shape else float(out)


def _shoot(w0: float, mu: float, s_stop: float, rtol: float = 1e-12):
    """Integrate the radial equation from the series start at s=0.

    Returns +1 if the trajectory crossed zero (w0 too large), -1 if it
    turned upward while positive (w0 too small), 0 if neither happened
    by s_stop.
    """

    def rhs(s, y):
        w, dw = y
        if s < 1e-12:
            # series regularization: w(s) ~ w0 + (w0 - mu w0^3) s^2 / 6
            return (dw, (w - mu * w**3) / 3.0)
        return (dw, -2.0 / s * dw + w - mu * w**3)

    def crossed(s, y):
        return y[0]

    crossed.terminal = True
    crossed.direction = -1

    def upturn(s, y):
        return y[1]

    upturn.terminal = True
    upturn.direction = 1

    sol = solve_ivp(
        rhs,
        (0.0, s_stop),
        (w0, 0.0),
        method="DOP853",
        rtol=rtol,
        atol=1e-16,
        events=(crossed, upturn),
        dense_output=False,
    )
    if not sol.success:
        raise GroundStateError(f"integration failed during shooting: {sol.message}")
    if sol.t_events[0].size:
        return 1
    if sol.t_events[1].size:
        return -1
    return 0


def solve_ground_state(mu: float, s_max: float = 30.0, tol: float = 1e-12) -> RadialProfile:
    """Shoot for W_mu and tabulate it on [0, s_max] with step 0.01.

    Bisects w(0) until the bracket is below `tol`, integrates once more for
    the table, detects the radius where the growing mode starts polluting
    the trajectory, and splices the e^(-s)/s tail there.
    """
    if mu <= 0:
        raise GroundStateError("mu must be positive")
    if s_max < 20:
        raise GroundStateError("s_max must be at least 20")
    if not (0 < tol <= 1e-8):
        raise GroundStateError("tol must lie in (0, 1e-8]")

    # W_mu = mu^(-1/2) W_1, so the scaled bracket is universal
    scale = mu ** -0.5
    lo, hi = 0.8 * scale, 8.0 * scale
    if hi > 50.0 * scale:
        raise GroundStateError("initial bracket too wide, shooting would overflow")
    probe_stop = min(s_max, 20.0)
    for _ in range(40):
        if _shoot(lo, mu, probe_stop) == -1:
            break
        lo *= 0.8
    else:
        raise GroundStateError("could not bracket w(0) from below")
    for _ in range(40):
        if _shoot(hi, mu, probe_stop) == 1:
            break
        hi *= 1.25
    else:
        raise GroundStateError("could not bracket w(0) from above")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break  # hit double-precision resolution
        flag = _shoot(mid, mu, probe_stop)
        if flag == 1:
            hi = mid
        else:
            # an undecided trajectory is indistinguishable from undershoot
            lo = mid
    w0 = 0.5 * (lo + hi)

    step = 0.01
    grid = np.round(np.arange(0.0, s_max + step / 2, step), 10)

    def rhs(s, y):
        w, dw = y
        if s < 1e-12:
            return (dw, (w - mu * w**3) / 3.0)
        return (dw, -2.0 / s * dw + w - mu * w**3)

    sol = solve_ivp(
        rhs, (0.0, s_max), (w0, 0.0), method="DOP853", rtol=1e-12, atol=1e-16, t_eval=grid
    )
    if not sol.success or sol.y.shape[1] != grid.size:
        raise GroundStateError("final tabulation integration failed")
    raw_w, raw_dw = sol.y

    cutoff, c_mu, fitted_rate = _fit_tail(grid, raw_w, s_max)

    tail = grid > cutoff
    values = raw_w.copy()
    derivs = raw_dw.copy()
    st = grid[tail]
    values[tail] = c_mu * np.exp(-st) / st
    derivs[tail] = -c_mu * np.exp(-st) * (1.0 / st + 1.0 / st**2)

    if np.any(values <= 0) or np.any(np.diff(values) >= 0):
        raise GroundStateError("profile is not positive decreasing; bad s_max or tol")

    mass2, mass4 = _radial_moments(grid, values, c_mu, s_max, mu)
    interaction_base = _interaction_base(grid, values, c_mu, mu)

    return RadialProfile(
        mu=mu,
        grid=grid,
        values=values,
        derivs=derivs,
        tail_amplitude=c_mu,
        tail_cutoff=cutoff,
        mass2=mass2,
        mass4=mass4,
        interaction_base=interaction_base,
        fitted_tail_rate=fitted_rate,
    )


def _fit_tail(grid, raw_w, s_max):
    """Locate the clean-trajectory horizon and fit the tail amplitude.

    q(s) = w(s) s e^s is constant on the true tail.  Starting from s = 8 the
    routine walks outward until q drifts more than 0.1% from its reference
    level, which marks the onset of growing-mode pollution; the amplitude is
    then fit (with rate and power pinned at 1) on the 4-unit window ending
    one unit below that cutoff, where the pollution is e^2 times smaller.
    """
    s8 = np.searchsorted(grid, 8.0)
    q = raw_w[s8:] * grid[s8:] * np.exp(grid[s8:])
    ref = np.median(q[: np.searchsorted(grid[s8:], 10.0)])
    bad = np.nonzero(np.abs(q / ref - 1.0) > 1e-3)[0]
    cutoff = grid[s8 + bad[0]] - 0.5 if bad.size else min(grid[-1] - 2.0, 0.9 * s_max)
    cutoff = float(np.clip(cutoff, 10.0, s_max - 2.0))

    window = (grid >= cutoff - 5.0) & (grid <= cutoff - 1.0)
    c_mu = float(np.exp(np.mean(np.log(raw_w[window]) + grid[window] + np.log(grid[window]))))

    # free-rate fit on the same window, stored as a diagnostic only
    A = np.column_stack([np.ones(window.sum()), -grid[window]])
    coef, *_ = np.linalg.lstsq(A, np.log(raw_w[window] * grid[window]), rcond=None)
    return cutoff, c_mu, float(coef[1])


def _radial_moments(grid, values, c_mu, s_max, mu):
    """mass2/mass4 by composite Simpson plus analytic tail beyond s_max."""
    f2 = 4.0 * np.pi * grid**2 * values**2
    f4 = 4.0 * np.pi * grid**2 * values**4
    mass2 = simpson(f2, x=grid)
    mass4 = simpson(f4, x=grid)
    # coarsened estimate for the refinement error bound
    mass2_c = simpson(f2[::2], x=grid[::2])
    mass4_c = simpson(f4[::2], x=grid[::2])
    # int_{s_max}^inf 4 pi c^2 e^(-2s) ds and the corresponding quartic piece
    mass2 += 4.0 * np.pi * c_mu**2 * np.exp(-2.0 * s_max) / 2.0
    mass4 += 4.0 * np.pi * c_mu**4 * np.exp(-4.0 * s_max) / (4.0 * s_max**2)
    if abs(mass2 - mass2_c) > 1e-6 * abs(mass2) * 4 or abs(mass4 - mass4_c) > 1e-6 * abs(mass4) * 4:
        raise GroundStateError("moment quadrature did not converge under refinement")
    return float(mass2), float(mass4)


def _interaction_base(grid, values, c_mu, mu):
    """int W^3(y) e^(y1) dy by the exact angular reduction.

    Integrating e^(s cos t) sin t over [0, pi] gives 2 sinh(s)/s, so the 3D
    integral collapses to 4 pi int s w^3(s) sinh(s) ds.  Simpson on the
    native table grid keeps interpolation out of the loop; the integrand
    decays like e^(-2s), so truncation at s_max sits below the refinement
    floor, which the coarsened-grid estimate certifies.
    """
    f = 4.0 * np.pi * grid * values**3 * np.sinh(grid)
    full = simpson(f, x=grid)
    coarse = simpson(f[::2], x=grid[::2])
    if abs(full - coarse) > 4e-6 * abs(full):
        raise GroundStateError("interaction_base quadrature did not converge")
    return float(full)


def profile_value(profile: RadialProfile, s):
    """W_mu(s) for any s >= 0: interpolated table, then c e^(-s)/s."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    out = np.empty(s.shape, dtype=float)
    inside = s <= profile.tail_cutoff
    if np.any(inside):
        out[inside] = profile._interp(np.clip(s[inside], 0.0, None))
    if np.any(~inside):
        st = np.minimum(s[~inside], 700.0)
        out[~inside] = profile.tail_amplitude * np.exp(-st) / s[~inside]
    return float(out[0]) if scalar else out


def profile_moments(profile: RadialProfile):
    """(mass2, mass4, interaction_base) as stored on the profile."""
    return profile.mass2, profile.mass4, profile.interaction_base


def decay_fit(profile: RadialProfile, window=(8.0, 15.0)):
    """Least-squares fit of log w = log A - rate*s - power*log s on a window.

    Returns (amplitude, rate, power, rms_residual).
    """
    lo, hi = float(window[0]), float(window[1])
    if lo <= 5.0:
        raise GroundStateError("fit window must start above s = 5")
    if hi > profile.grid[-1] + 1e-12:
        raise GroundStateError("fit window must lie inside the tabulated range")
    mask = (profile.grid >= lo) & (profile.grid <= hi)
    if mask.sum() < 5 or (hi - lo) < 1.0:
        raise GroundStateError("fit window too narrow, fit would be ill-conditioned")
    s = profile.grid[mask]
    y = np.log(profile.values[mask])
    A = np.column_stack([np.ones(s.size), -s, -np.log(s)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(np.exp(coef[0])), float(coef[1]), float(coef[2]), float(np.sqrt(np.mean(resid**2)))


def save_profile(profile: RadialProfile, csv_path, config_hash: str | None = None):
    """Write the `s,w,dw` table plus a JSON sidecar with the scalar fields."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if config_hash is not None:
            fh.write(f"# config_sha256 = {config_hash}\n")
        writer.writerow(["s", "w", "dw"])
        for s, w, dw in zip(profile.grid, profile.values, profile.derivs):
            writer.writerow([f"{s:.17g}", f"{w:.17g}", f"{dw:.17g}"])
    sidecar = {
        "mu": profile.mu,
        "tail_amplitude": profile.tail_amplitude,
        "tail_cutoff": profile.tail_cutoff,
        "mass2": profile.mass2,
        "mass4": profile.mass4,
        "interaction_base": profile.interaction_base,
    }
    if config_hash is not None:
        sidecar["config_sha256"] = config_hash
    with open(csv_path.with_suffix(".json"), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_profile(csv_path) -> RadialProfile:
    """Rebuild a profile from save_profile output."""
    csv_path = Path(csv_path)
    rows = []
    with open(csv_path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("s,"):
                continue
            rows.append([float(x) for x in line.strip().split(",")])
    table = np.array(rows)
    with open(csv_path.with_suffix(".json")) as fh:
        meta = json.load(fh)
    return RadialProfile(
        mu=meta["mu"],
        grid=table[:, 0],
        values=table[:, 1],
        derivs=table[:, 2],
        tail_amplitude=meta["tail_amplitude"],
        tail_cutoff=meta["tail_cutoff"],
        mass2=meta["mass2"],
        mass4=meta["mass4"],
        interaction_base=meta["interaction_base"],
        fitted_tail_rate=float("nan"),
    )
