"""Critical points of the reduced per-slice energy in (r, h) or (r, rho, h).

Two gradient conventions coexist and both are kept:

* form "a4": gradient of  A0 + A1/r^m - 2 C_beta (k/r) e^(-lam r)
  - D_beta (k/r) e^(-2rh), the same basis the oracle fit uses (default).
* form "f1": gradient of  A0 + A1/r^m - 2 C_beta e^(-lam r)
  - C_beta e^(-2rh), the prefactor-free convention.
* form "display": the published first-order system verbatim.  Its r-equation
  is not the exact derivative of the f1 energy (the ring term differs by a
  factor k); gradient_consistency reports the mismatch instead of silently
  correcting it.

Here lam = 2 pi sqrt(1-h^2)/k and A1 absorbs the potential coefficient
(the fitted a*A1 when it comes from a fit).  Solvers: damped Newton with a
numerical Jacobian, and the two-step fixed-point map that solves the ring
balance for r and then the vertical balance for h.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .expansion import ExpansionConstants, Provenance

_TWO_PI = 2.0 * math.pi


class SolverError(Exception):
    """Divergence, singular Jacobian away from a root, or a map guard."""


class NoCriticalPoint(Exception):
    """The gradient provably cannot vanish for these constants."""


class Curvature(enum.Enum):
    Max = "Max"
    Min = "Min"
    Saddle = "Saddle"
    Degenerate = "Degenerate"


@dataclass(frozen=True)
class ReducedCriticalPoint:
    r_star: float
    h_star: float
    rho_star: float | None
    grad_norm: float
    iterations: int
    in_window: bool
    curvature: Curvature

    def as_dict(self) -> dict:
        return {
            "r_star": self.r_star,
            "h_star": self.h_star,
            "rho_star": self.rho_star,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "in_window": self.in_window,
            "curvature": self.curvature.value,
        }


def window_center(k: int, m: float) -> tuple[float, float]:
    """Centers of the admissible scaling windows: r ~ m/(2 pi) k ln k,
    h ~ pi (m+2)/(m k)."""
    return (m / _TWO_PI) * k * math.log(k), math.pi * (m + 2.0) / (m * k)


def in_window(k: int, r: float, h: float, m: float,
              delta: float | None = None, delta1: float | None = None) -> bool:
    """Membership in the scaling window around the asymptotic centers.

    Defaults delta = m/(8 pi) and delta1 = pi (m+2)/(4 m) put a 25% relative
    collar on each normalized coordinate.
    """
    if delta is None:
        delta = m / (8.0 * math.pi)
    if delta1 is None:
        delta1 = math.pi * (m + 2.0) / (4.0 * m)
    r_norm = r / (k * math.log(k))
    h_norm = h * k
    return bool(abs(r_norm - m / _TWO_PI) <= delta
                and abs(h_norm - math.pi * (m + 2.0) / m) <= delta1)


def _lam(k: int, h: float) -> float:
    return _TWO_PI * math.sqrt(1.0 - h * h) / k


def reduced_energy(c: ExpansionConstants, m: float, k: int, r: float, h: float,
                   form: str = "a4") -> float:
    """Per-slice reduced energy for the chosen gradient convention."""
    if r <= 0.0 or not (0.0 < h < 1.0):
        raise ValueError("need r > 0 and h in (0, 1)")
    ring = math.exp(-_lam(k, h) * r)
    vert = math.exp(-2.0 * r * h)
    if form == "a4":
        return (c.A0 + c.A1 / r**m
                - 2.0 * c.C_beta * (k / r) * ring
                - c.D_beta * (k / r) * vert)
    if form == "f1":
        return c.A0 + c.A1 / r**m - 2.0 * c.C_beta * ring - c.C_beta * vert
    if form == "display":
        raise ValueError("the display form is a gradient convention only; "
                         "its matching energy is form 'f1'")
    raise ValueError(f"unknown form {form!r}")


def reduced_gradient(c: ExpansionConstants, m: float, k: int, r: float, h: float,
                     form: str = "a4") -> tuple[float, float]:
    """(dE/dr, dE/dh) of the per-slice reduced energy.

    "a4" and "f1" are exact partial derivatives of the matching
    reduced_energy; "display" reproduces the published system verbatim,
    whose r-component carries the ring term without the 1/k.
    """
    if r <= 0.0 or not (0.0 < h < 1.0):
        raise ValueError("need r > 0 and h in (0, 1)")
    root = math.sqrt(1.0 - h * h)
    lam = _TWO_PI * root / k
    ring = math.exp(-lam * r)
    vert = math.exp(-2.0 * r * h)
    alg = -m * c.A1 / r ** (m + 1.0)

    if form == "a4":
        f_r = (alg
               + 2.0 * c.C_beta * ring * (_TWO_PI * root + k / r) / r
               + c.D_beta * vert * (2.0 * h * k + k / r) / r)
        f_h = (-2.0 * _TWO_PI * c.C_beta * (h / root) * ring
               + 2.0 * c.D_beta * k * vert)
        return f_r, f_h
    if form == "f1":
        f_r = (alg
               + 2.0 * lam * c.C_beta * ring
               + 2.0 * h * c.C_beta * vert)
        f_h = (-2.0 * _TWO_PI * c.C_beta * (r * h / (k * root)) * ring
               + 2.0 * r * c.C_beta * vert)
        return f_r, f_h
    if form == "display":
        f_r = (alg
               + 2.0 * _TWO_PI * c.C_beta * root * ring
               + 2.0 * c.C_beta * h * vert)
        f_h = (-2.0 * _TWO_PI * c.C_beta * (r * h / (k * root)) * ring
               + 2.0 * r * c.C_beta * vert)
        return f_r, f_h
    raise ValueError(f"unknown form {form!r}")


def _fd_gradient(c, m, k, r, h, form, step=1e-4):
    # 4th-order stencil: the e^{-2rh} channel has |d^3/dh^3| ~ (2r)^3 times
    # its value, which a plain central difference resolves only to ~1e-5
    # relative at r ~ 30; two-step Richardson keeps truncation below 1e-9
    def rich(f, s):
        return (8.0 * (f(s) - f(-s)) - (f(2.0 * s) - f(-2.0 * s))) / (12.0 * s)

    er = step * max(1.0, abs(r))
    eh = step
    fr = rich(lambda s: reduced_energy(c, m, k, r + s, h, form), er)
    fh = rich(lambda s: reduced_energy(c, m, k, r, h + s, form), eh)
    return fr, fh


def gradient_consistency(c: ExpansionConstants, m: float, k: int, r: float,
                         h: float, form: str = "a4") -> dict:
    """Relative deviation of the analytic gradient from central differences.

    Deviations are measured against the gradient's overall scale, not
    component by component: a single component crossing zero says nothing
    about formula agreement but would make its own relative error blow up.
    The display form is checked against the f1 energy (the only candidate it
    could derive from); any mismatch is reported here, never corrected.
    """
    energy_form = "f1" if form == "display" else form
    ar, ah = reduced_gradient(c, m, k, r, h, form)
    nr, nh = _fd_gradient(c, m, k, r, h, energy_form)
    scale = max(abs(ar), abs(ah), abs(nr), abs(nh), 1e-300)
    out = {"r": abs(ar - nr) / scale, "h": abs(ah - nh) / scale}
    out["matches"] = bool(out["r"] < 1e-6 and out["h"] < 1e-6)
    return out


def _hessian(energy, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central-difference Hessian with per-coordinate step 1e-5 * scale."""
    n = len(x)
    hs = np.array([step * max(1.0, abs(v)) for v in x])
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n); ei[i] = hs[i]
            ej = np.zeros(n); ej[j] = hs[j]
            fpp = energy(x + ei + ej)
            fpm = energy(x + ei - ej)
            fmp = energy(x - ei + ej)
            fmm = energy(x - ei - ej)
            H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * hs[i] * hs[j])
    return H


def _classify(H: np.ndarray) -> Curvature:
    eig = np.linalg.eigvalsh(H)
    scale = float(np.max(np.abs(eig)))
    if scale == 0.0 or np.any(np.abs(eig) < 1e-6 * scale):
        return Curvature.Degenerate
    if np.all(eig > 0.0):
        return Curvature.Min
    if np.all(eig < 0.0):
        return Curvature.Max
    return Curvature.Saddle


def _sync_curvature(c, m, k, r, h, form):
    energy_form = "f1" if form == "display" else form

    def e(x):
        return reduced_energy(c, m, k, x[0], x[1], energy_form)

    return _classify(_hessian(e, np.array([r, h])))


def _guard_sync_constants(c: ExpansionConstants, form: str):
    if c.C_beta <= 0.0:
        raise NoCriticalPoint(
            "C_beta <= 0 leaves the r-gradient single-signed; no root exists")
    if form == "a4" and c.D_beta <= 0.0:
        raise NoCriticalPoint(
            "D_beta <= 0 leaves the h-gradient single-signed; no root exists")


def solve_newton(c: ExpansionConstants, m: float, k: int,
                 initial: tuple[float, float], form: str = "a4",
                 tol: float = 1e-10, max_iter: int = 200) -> ReducedCriticalPoint:
    """Damped Newton on reduced_gradient with a numerical Jacobian."""
    _guard_sync_constants(c, form)
    r, h = float(initial[0]), float(initial[1])
    if r <= 0.0 or not (0.0 < h < 1.0):
        raise ValueError("initial point must satisfy r > 0, 0 < h < 1")

    def F(x):
        return np.array(reduced_gradient(c, m, k, x[0], x[1], form))

    x = np.array([r, h])
    fx = F(x)
    for it in range(1, max_iter + 1):
        norm = float(np.linalg.norm(fx))
        if norm < tol:
            return ReducedCriticalPoint(
                r_star=float(x[0]), h_star=float(x[1]), rho_star=None,
                grad_norm=norm, iterations=it - 1,
                in_window=in_window(k, x[0], x[1], m),
                curvature=_sync_curvature(c, m, k, x[0], x[1], form))
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1e-5 * max(1.0, abs(x[j]))
            J[:, j] = (F(x + e) - F(x - e)) / (2.0 * e[j])
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian away from a root") from None
        lam = 1.0
        for _ in range(40):
            trial = x + lam * step
            if trial[0] > 0.0 and 0.0 < trial[1] < 1.0:
                ftrial = F(trial)
                if np.linalg.norm(ftrial) < norm:
                    x, fx = trial, ftrial
                    break
            lam *= 0.5
        else:
            raise SolverError(f"line search stalled at iteration {it}")
    raise SolverError(f"Newton did not converge in {max_iter} iterations")


def solve_contraction(c: ExpansionConstants, m: float, k: int,
                      initial: tuple[float, float] | None = None,
                      form: str = "a4", tol: float = 1e-10,
                      max_iter: int = 500, k_min: int = 8,
                      simultaneous: bool = False,
                      damping: float = 1.0) -> ReducedCriticalPoint:
    """Fixed-point iteration on the two balance equations.

    Each sweep solves the ring balance for r at frozen h, then the vertical
    balance for h at the new r (simultaneous=True keeps the old r instead).
    The per-form targets are the exact algebraic consequences of setting the
    matching gradient to zero, so the fixed point is a gradient root.
    Guards: both exponential targets must stay in (0, 1), and the step size
    must not grow for 5 consecutive sweeps.
    """
    _guard_sync_constants(c, form)
    if k < k_min:
        raise ValueError(f"contraction map needs k >= {k_min}")
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    if initial is None:
        initial = window_center(k, m)
    r, h = float(initial[0]), float(initial[1])
    if r <= 0.0 or not (0.0 < h < 1.0):
        raise ValueError("initial point must satisfy r > 0, 0 < h < 1")

    def ring_target(rr, hh):
        root = math.sqrt(1.0 - hh * hh)
        if form == "f1":
            denom = 4.0 * c.C_beta * math.pi * (root + hh * hh / root)
            return m * c.A1 * k / (denom * rr ** (m + 1.0))
        denom = c.C_beta * (2.0 * _TWO_PI * root
                            + 2.0 * _TWO_PI * hh * hh / root
                            + 2.0 * k / rr
                            + _TWO_PI * hh / (rr * root))
        return (m * c.A1 / rr**m) / denom

    def vert_target(rr, hh):
        root = math.sqrt(1.0 - hh * hh)
        base = (_TWO_PI * hh / (root * k)) * math.exp(-_lam(k, hh) * rr)
        if form == "f1":
            return base
        return base * c.C_beta / c.D_beta

    prev_dist = math.inf
    growth = 0
    for it in range(1, max_iter + 1):
        H_star = ring_target(r, h)
        if not 0.0 < H_star < 1.0:
            raise SolverError(
                f"ring target {H_star:.3e} left (0,1) at iterate ({r:.6g}, {h:.6g})")
        r_new = -k * math.log(H_star) / (_TWO_PI * math.sqrt(1.0 - h * h))
        G_star = vert_target(r if simultaneous else r_new, h)
        if not 0.0 < G_star < 1.0:
            raise SolverError(
                f"vertical target {G_star:.3e} left (0,1) at iterate ({r:.6g}, {h:.6g})")
        h_new = -math.log(G_star) / (2.0 * r_new)
        h_new = min(max(h_new, 1e-12), 1.0 - 1e-9)

        dist = abs(r_new - r) + r * abs(h_new - h)
        r = r + damping * (r_new - r)
        h = h + damping * (h_new - h)
        if dist < tol:
            grad = reduced_gradient(c, m, k, r, h, form)
            return ReducedCriticalPoint(
                r_star=r, h_star=h, rho_star=None,
                grad_norm=float(np.hypot(*grad)), iterations=it,
                in_window=in_window(k, r, h, m),
                curvature=_sync_curvature(c, m, k, r, h, form))
        if dist > prev_dist:
            growth += 1
            if growth >= 5:
                raise SolverError(
                    f"non-contraction: step grew 5 sweeps running (last {dist:.3e})")
        else:
            growth = 0
        prev_dist = dist
    raise SolverError(f"contraction did not converge in {max_iter} sweeps")


def _seg_gradient(c: ExpansionConstants, m: float, n: float, k: int,
                  r: float, rho: float, h: float) -> np.ndarray:
    root = math.sqrt(1.0 - h * h)
    lam = _TWO_PI * root / k
    ring_r, ring_p = math.exp(-lam * r), math.exp(-lam * rho)
    vert_r, vert_p = math.exp(-2.0 * r * h), math.exp(-2.0 * rho * h)
    f_r = (-m * c.B1 / r ** (m + 1.0)
           + c.C1 * ring_r * (_TWO_PI * root + k / r) / r
           + c.D1 * vert_r * (2.0 * h * k + k / r) / r)
    f_p = (-n * c.B2 / rho ** (n + 1.0)
           + c.C2 * ring_p * (_TWO_PI * root + k / rho) / rho
           + c.D2 * vert_p * (2.0 * h * k + k / rho) / rho)
    f_h = (-_TWO_PI * (h / root) * (c.C1 * ring_r + c.C2 * ring_p)
           + 2.0 * k * (c.D1 * vert_r + c.D2 * vert_p))
    return np.array([f_r, f_p, f_h])


def seg_reduced_energy(c: ExpansionConstants, m: float, n: float, k: int,
                       r: float, rho: float, h: float) -> float:
    lam = _lam(k, h)
    return (c.B0 + c.B1 / r**m + c.B2 / rho**n
            - c.C1 * (k / r) * math.exp(-lam * r)
            - c.D1 * (k / r) * math.exp(-2.0 * r * h)
            - c.C2 * (k / rho) * math.exp(-lam * rho)
            - c.D2 * (k / rho) * math.exp(-2.0 * rho * h))


def solve_segregated(c: ExpansionConstants, m: float, n: float, k: int,
                     initial: tuple[float, float, float], tol: float = 1e-10,
                     max_iter: int = 200) -> ReducedCriticalPoint:
    """Damped Newton on the three-variable segregated gradient."""
    if c.C1 <= 0.0 or c.C2 <= 0.0:
        raise NoCriticalPoint(
            "both ring coefficients must be positive for an interior root")
    x = np.array([float(initial[0]), float(initial[1]), float(initial[2])])
    if x[0] <= 0.0 or x[1] <= 0.0 or not (0.0 < x[2] < 1.0):
        raise ValueError("initial point must satisfy r, rho > 0, 0 < h < 1")

    def F(v):
        return _seg_gradient(c, m, n, k, v[0], v[1], v[2])

    fx = F(x)
    for it in range(1, max_iter + 1):
        norm = float(np.linalg.norm(fx))
        if norm < tol:
            def e(v):
                return seg_reduced_energy(c, m, n, k, v[0], v[1], v[2])

            return ReducedCriticalPoint(
                r_star=float(x[0]), h_star=float(x[2]), rho_star=float(x[1]),
                grad_norm=norm, iterations=it - 1,
                in_window=(in_window(k, x[0], x[2], m)
                           and in_window(k, x[1], x[2], n)),
                curvature=_classify(_hessian(e, x)))
        J = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1e-5 * max(1.0, abs(x[j]))
            J[:, j] = (F(x + e) - F(x - e)) / (2.0 * e[j])
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian away from a root") from None
        lam = 1.0
        for _ in range(40):
            trial = x + lam * step
            if trial[0] > 0.0 and trial[1] > 0.0 and 0.0 < trial[2] < 1.0:
                ftrial = F(trial)
                if np.linalg.norm(ftrial) < norm:
                    x, fx = trial, ftrial
                    break
            lam *= 0.5
        else:
            raise SolverError(f"line search stalled at iteration {it}")
    raise SolverError(f"Newton did not converge in {max_iter} iterations")


def scaling_sweep(c: ExpansionConstants, m: float, k_list,
                  solver: str = "newton", form: str = "a4") -> list[dict]:
    """Solve for each k and report normalized window coordinates.

    Failures do not abort the sweep; the row carries the error text and the
    normalized columns are left empty.
    """
    rows = []
    for k in k_list:
        row = {"k": int(k), "r_star": None, "h_star": None, "rho_star": None,
               "grad_norm": None, "iters": None, "in_window": None,
               "curvature": None, "r_norm": None, "h_norm": None, "error": ""}
        try:
            if solver == "newton":
                cp = solve_newton(c, m, int(k), window_center(int(k), m), form=form)
            elif solver == "contraction":
                cp = solve_contraction(c, m, int(k), form=form)
            else:
                raise ValueError(f"unknown solver {solver!r}")
            row.update(
                r_star=cp.r_star, h_star=cp.h_star, rho_star=cp.rho_star,
                grad_norm=cp.grad_norm, iters=cp.iterations,
                in_window=cp.in_window, curvature=cp.curvature.value,
                r_norm=cp.r_star / (k * math.log(k)), h_norm=cp.h_star * k)
        except (SolverError, NoCriticalPoint, ValueError) as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


def plant_sync_root(k: int, r_star: float, h_star: float | None,
                    C_beta: float = 1.0, m: float = 2.0,
                    form: str = "a4") -> tuple[ExpansionConstants, tuple[float, float]]:
    """Constants whose reduced gradient vanishes exactly at a chosen point.

    For form "a4" both coordinates are free: D_beta comes from the vertical
    balance and A1 from the ring balance.  For form "f1" the vertical
    balance ties h to r (no free D_beta), so pass h_star=None and take the
    solved value from the returned point.
    """
    if C_beta <= 0.0:
        raise ValueError("plants need C_beta > 0")
    if r_star <= 0.0:
        raise ValueError("r_star must be positive")
    if form == "a4":
        if h_star is None or not (0.0 < h_star < 1.0):
            raise ValueError("a4 plants need h_star in (0, 1)")
        root = math.sqrt(1.0 - h_star * h_star)
        lam = _TWO_PI * root / k
        ring, vert = math.exp(-lam * r_star), math.exp(-2.0 * r_star * h_star)
        d_beta = _TWO_PI * h_star * C_beta * ring / (root * k * vert)
        f_r_rest = (2.0 * C_beta * ring * (_TWO_PI * root + k / r_star) / r_star
                    + d_beta * vert * (2.0 * h_star * k + k / r_star) / r_star)
        a1 = f_r_rest * r_star ** (m + 1.0) / m
        c = ExpansionConstants(A0=1.0, A1=a1, C_beta=C_beta, D_beta=d_beta,
                               provenance=Provenance.Analytic)
        return c, (r_star, h_star)
    if form == "f1":
        if h_star is not None:
            raise ValueError("f1 plants solve for h_star; pass None")

        def vert_gap(hh):
            # log form of e^(-2rh) = (2 pi h/(root k)) e^(-lam r)
            root = math.sqrt(1.0 - hh * hh)
            return (2.0 * r_star * hh - _lam(k, hh) * r_star
                    - math.log(root * k / (_TWO_PI * hh)))

        h_solved = brentq(vert_gap, 1e-6, 1.0 - 1e-9, xtol=1e-14)
        root = math.sqrt(1.0 - h_solved * h_solved)
        lam = _TWO_PI * root / k
        ring, vert = math.exp(-lam * r_star), math.exp(-2.0 * r_star * h_solved)
        a1 = (2.0 * lam * C_beta * ring + 2.0 * h_solved * C_beta * vert) \
            * r_star ** (m + 1.0) / m
        c = ExpansionConstants(A0=1.0, A1=a1, C_beta=C_beta,
                               provenance=Provenance.Analytic)
        return c, (r_star, h_solved)
    raise ValueError(f"unknown form {form!r}")


def plant_segregated_root(k: int, r_star: float, rho_star: float, h_star: float,
                          C1: float = 1.0, C2: float = 1.0, m: float = 2.0,
                          n: float = 2.0) -> tuple[ExpansionConstants,
                                                   tuple[float, float, float]]:
    """Segregated constants with a planted interior gradient root.

    The vertical balance is split per species (each ring's attraction
    cancels its own top-bottom term), which pins D1, D2; B1, B2 then follow
    from the two radial balances.
    """
    if C1 <= 0.0 or C2 <= 0.0:
        raise ValueError("plants need C1, C2 > 0")
    if r_star <= 0.0 or rho_star <= 0.0 or not (0.0 < h_star < 1.0):
        raise ValueError("need r_star, rho_star > 0 and h_star in (0, 1)")
    root = math.sqrt(1.0 - h_star * h_star)
    lam = _TWO_PI * root / k

    def split(radius, C, power):
        ring, vert = math.exp(-lam * radius), math.exp(-2.0 * radius * h_star)
        # the segregated vertical channel carries no factor 2 on the ring
        # side (one species per ring), unlike the synchronized balance
        D = math.pi * h_star * C * ring / (root * k * vert)
        rest = (C * ring * (_TWO_PI * root + k / radius) / radius
                + D * vert * (2.0 * h_star * k + k / radius) / radius)
        B = rest * radius ** (power + 1.0) / power
        return D, B

    D1, B1 = split(r_star, C1, m)
    D2, B2 = split(rho_star, C2, n)
    c = ExpansionConstants(B0=1.0, B1=B1, B2=B2, C1=C1, D1=D1, C2=C2, D2=D2,
                           provenance=Provenance.Analytic)
    return c, (r_star, rho_star, h_star)
