"""Multi-bump ansatz fields: pointwise values, Laplacians, residuals.

A synchronized field is (u, v) = (alpha S, gamma S) with S the signed sum
of base-profile bumps at the configuration points.  A segregated field
gives each component its own bump set and profile, u from W_mu1 on the
species-one circle and v from W_mu2 on the interleaved circle.  Laplacians
are analytic through the bumpwise identity DW_mu = W_mu - mu W_mu^3.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._quad import wedge_integrate_multi
from .coupling import CouplingParams
from .geometry import BumpConfiguration, Family
from .ground_state import RadialProfile, profile_value


@dataclass(frozen=True)
class AnsatzField:
    config: BumpConfiguration
    coupling: CouplingParams
    profile: RadialProfile                    # base profile for u (and v when co-located)
    profile2: RadialProfile | None = None     # second species, segregated families only

    def __post_init__(self):
        seg = self.config.family in (Family.Segregated, Family.SignChangingSeg)
        if seg and self.profile2 is None:
            raise ValueError("segregated fields need a second profile")

    @property
    def segregated(self) -> bool:
        return self.config.family in (Family.Segregated, Family.SignChangingSeg)


def _bump_values(profile: RadialProfile, centers: np.ndarray, points: np.ndarray):
    """(N, B) profile values at the distances from points to bump centers."""
    diff = points[:, None, :] - centers[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return profile_value(profile, dist.ravel()).reshape(dist.shape)


def _species_sums(profile, centers, signs, pts):
    """Signed bump sum and its cubic companion from one distance pass."""
    w = _bump_values(profile, centers, pts)
    sv = np.asarray(signs, dtype=float)
    return w @ sv, (w - profile.mu * w**3) @ sv


def eval_field(field: AnsatzField, points):
    """(u, v) at one point or an (N, 3) batch."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    signs = np.asarray(field.config.signs, dtype=float)
    if field.segregated:
        u = _bump_values(field.profile, field.config.positions(), pts) @ signs
        v = _bump_values(field.profile2, field.config.positions_second(), pts) @ signs
    else:
        s = _bump_values(field.profile, field.config.positions(), pts) @ signs
        u, v = field.coupling.alpha * s, field.coupling.gamma * s
    if np.asarray(points).ndim == 1:
        return float(u[0]), float(v[0])
    return u, v


def eval_laplacian(field: AnsatzField, points):
    """(Du, Dv) via DW_mu = W_mu - mu W_mu^3 applied bump by bump."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    signs = field.config.signs
    if field.segregated:
        _, lu = _species_sums(field.profile, field.config.positions(), signs, pts)
        _, lv = _species_sums(field.profile2, field.config.positions_second(), signs, pts)
    else:
        _, cub = _species_sums(field.profile, field.config.positions(), signs, pts)
        lu, lv = field.coupling.alpha * cub, field.coupling.gamma * cub
    if np.asarray(points).ndim == 1:
        return float(lu[0]), float(lv[0])
    return lu, lv


@dataclass(frozen=True)
class ResidualNorm:
    ell_u: float
    ell_v: float
    total: float
    error_estimate: float


def residual_norm(field: AnsatzField, potP, potQ, level: int = 1) -> ResidualNorm:
    """L^2 norms of the strong-form residuals of the ansatz.

    R_u = -Du + P u - mu1 u^3 - beta u v^2 and the v-counterpart, integrated
    over the symmetry wedge (times 2K).  This is an order-of-magnitude
    stand-in for the dual norm of the error functional, not a
    norm-equivalent quantity; only scaling exponents should be read off it.
    """
    cpl = field.coupling
    mu1, mu2, beta = cpl.mu1, cpl.mu2, cpl.beta
    cfg = field.config
    cos_p, sin_p = np.cos(cfg.phase), np.sin(cfg.phase)

    def density(raw_pts):
        pts = raw_pts
        if cfg.phase != 0.0:
            # align the wedge with the configuration's phase
            pts = np.empty_like(raw_pts)
            pts[:, 0] = cos_p * raw_pts[:, 0] - sin_p * raw_pts[:, 1]
            pts[:, 1] = sin_p * raw_pts[:, 0] + cos_p * raw_pts[:, 1]
            pts[:, 2] = raw_pts[:, 2]
        signs = cfg.signs
        if field.segregated:
            u, cu = _species_sums(field.profile, cfg.positions(), signs, pts)
            v, cv = _species_sums(field.profile2, cfg.positions_second(), signs, pts)
            lu, lv = cu, cv
        else:
            s, cub = _species_sums(field.profile, cfg.positions(), signs, pts)
            u, v = cpl.alpha * s, cpl.gamma * s
            lu, lv = cpl.alpha * cub, cpl.gamma * cub
        radii = np.sqrt(np.einsum("ij,ij->i", pts, pts))
        ru = -lu + potP(radii) * u - mu1 * u**3 - beta * u * v**2
        rv = -lv + potQ(radii) * v - mu2 * v**3 - beta * u**2 * v
        return np.stack([ru**2, rv**2], axis=-1)

    margin = 12.0
    rmax = cfg.r if cfg.rho is None else max(cfg.r, cfg.rho)
    rho_max = rmax * np.sqrt(1.0 - cfg.h**2) + margin
    z_max = rmax * cfg.h + margin

    orders = (6 + 3 * level, 9 + 3 * level)
    coarse = wedge_integrate_multi(density, cfg.k, rho_max, z_max, orders[0])
    fine = wedge_integrate_multi(density, cfg.k, rho_max, z_max, orders[1])
    ell_u, ell_v = np.sqrt(np.abs(fine))
    err = float(np.sum(np.abs(np.sqrt(np.abs(fine)) - np.sqrt(np.abs(coarse)))))
    return ResidualNorm(float(ell_u), float(ell_v), float(np.hypot(ell_u, ell_v)), err)


def dump_field_csv(field: AnsatzField, points, path, config_hash: str | None = None):
    """Write `x,y,z,u,v` samples for plotting."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    u, v = eval_field(field, pts)
    with open(path, "w", newline="") as fh:
        if config_hash is not None:
            fh.write(f"# config_sha256 = {config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z", "u", "v"])
        for p, uu, vv in zip(pts, u, v):
            writer.writerow([f"{p[0]:.17g}", f"{p[1]:.17g}", f"{p[2]:.17g}",
                             f"{uu:.17g}", f"{vv:.17g}"])
