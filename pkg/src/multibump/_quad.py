"""Shared Gauss-Legendre quadrature helpers.

Configurations here are invariant under rotation by 2 pi / K about the
z-axis and under z -> -z (densities are even in the field sign), so volume
integrals reduce to 2K times the integral over the wedge

    Omega = { (rho, phi, z) : phi in [-pi/K, pi/K], z >= 0 },

truncated where the integrand is below the e^(-2*margin) floor.  In
cylindrical coordinates the wedge is a tensor box, so tensor-product
Gauss-Legendre panels integrate it without any double counting; panel
widths stay near the bump length scale (about 2) and refinement raises the
order on the same partition.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss


def _edges(lo: float, hi: float, width: float) -> np.ndarray:
    n = max(1, int(np.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, n + 1)


def wedge_integrate(density, K: int, rho_max: float, z_max: float, order: int,
                    width: float = 2.0) -> float:
    """2K * integral of density over the wedge, GL tensor panels.

    density maps an (N, 3) array of cartesian points to N values.  The
    summation order is fixed (panel loop, then einsum) so repeated runs are
    bit-identical.
    """
    xg, wg = leggauss(order)
    phi_half = np.pi / K
    # angular panel count follows the outer arc length
    n_phi = max(2, int(np.ceil(2.0 * phi_half * rho_max / width)))
    phi_edges = np.linspace(-phi_half, phi_half, n_phi + 1)
    rho_edges = _edges(0.0, rho_max, width)
    z_edges = _edges(0.0, z_max, width)

    total = 0.0
    for i in range(len(rho_edges) - 1):
        rm, rh = 0.5 * (rho_edges[i] + rho_edges[i + 1]), 0.5 * (rho_edges[i + 1] - rho_edges[i])
        R = rm + rh * xg
        for j in range(len(phi_edges) - 1):
            pm, ph = 0.5 * (phi_edges[j] + phi_edges[j + 1]), 0.5 * (phi_edges[j + 1] - phi_edges[j])
            P = pm + ph * xg
            cosP, sinP = np.cos(P), np.sin(P)
            for l in range(len(z_edges) - 1):
                zm, zh = 0.5 * (z_edges[l] + z_edges[l + 1]), 0.5 * (z_edges[l + 1] - z_edges[l])
                Z = zm + zh * xg
                pts = np.empty((order, order, order, 3))
                pts[..., 0] = R[:, None, None] * cosP[None, :, None]
                pts[..., 1] = R[:, None, None] * sinP[None, :, None]
                pts[..., 2] = Z[None, None, :]
                vals = density(pts.reshape(-1, 3)).reshape(order, order, order)
                vals = vals * R[:, None, None]  # cylindrical Jacobian
                total += rh * ph * zh * np.einsum("i,j,l,ijl->", wg, wg, wg, vals)
    return 2.0 * K * total


def wedge_integrate_multi(density, K: int, rho_max: float, z_max: float, order: int,
                          width: float = 2.0) -> np.ndarray:
    """Vector-valued wedge_integrate: density maps (N, 3) to (N, C).

    Shares one field evaluation across all C component integrands; same
    fixed summation order as the scalar version.
    """
    xg, wg = leggauss(order)
    phi_half = np.pi / K
    n_phi = max(2, int(np.ceil(2.0 * phi_half * rho_max / width)))
    phi_edges = np.linspace(-phi_half, phi_half, n_phi + 1)
    rho_edges = _edges(0.0, rho_max, width)
    z_edges = _edges(0.0, z_max, width)

    total = None
    for i in range(len(rho_edges) - 1):
        rm, rh = 0.5 * (rho_edges[i] + rho_edges[i + 1]), 0.5 * (rho_edges[i + 1] - rho_edges[i])
        R = rm + rh * xg
        for j in range(len(phi_edges) - 1):
            pm, ph = 0.5 * (phi_edges[j] + phi_edges[j + 1]), 0.5 * (phi_edges[j + 1] - phi_edges[j])
            P = pm + ph * xg
            cosP, sinP = np.cos(P), np.sin(P)
            for l in range(len(z_edges) - 1):
                zm, zh = 0.5 * (z_edges[l] + z_edges[l + 1]), 0.5 * (z_edges[l + 1] - z_edges[l])
                Z = zm + zh * xg
                pts = np.empty((order, order, order, 3))
                pts[..., 0] = R[:, None, None] * cosP[None, :, None]
                pts[..., 1] = R[:, None, None] * sinP[None, :, None]
                pts[..., 2] = Z[None, None, :]
                vals = np.asarray(density(pts.reshape(-1, 3)))
                vals = vals.reshape(order, order, order, -1)
                vals = vals * R[:, None, None, None]
                piece = rh * ph * zh * np.einsum("i,j,l,ijlc->c", wg, wg, wg, vals)
                total = piece if total is None else total + piece
    return 2.0 * K * total


def pair_integrate(f, t_lo: float, t_hi: float, r_max: float, order: int,
                   width: float = 2.0) -> float:
    """Integral of an axisymmetric function over R^3 about the t-axis.

    f maps broadcastable (T, R) arrays (axial and transverse coordinates)
    to values; the 2 pi R Jacobian is applied here.
    """
    xg, wg = leggauss(order)
    t_edges = _edges(t_lo, t_hi, width)
    r_edges = _edges(0.0, r_max, width)
    total = 0.0
    for i in range(len(t_edges) - 1):
        tm, th = 0.5 * (t_edges[i] + t_edges[i + 1]), 0.5 * (t_edges[i + 1] - t_edges[i])
        T = tm + th * xg
        for j in range(len(r_edges) - 1):
            rm, rh = 0.5 * (r_edges[j] + r_edges[j + 1]), 0.5 * (r_edges[j + 1] - r_edges[j])
            R = rm + rh * xg
            vals = 2.0 * np.pi * R[None, :] * f(T[:, None], R[None, :])
            total += th * rh * np.einsum("i,j,ij->", wg, wg, vals)
    return total
