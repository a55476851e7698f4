import math

import numpy as np
import pytest

from multibump.coupling import CouplingParams
from multibump.energy import (
    Potential,
    builtin_potential,
    cross_species_overlap,
    energy_direct,
    pair_interaction,
    potential_correction,
)
from multibump.field import AnsatzField
from multibump.geometry import BumpConfiguration, Family, synchronized_config

FLAT = builtin_potential(0.0, 2.0)


def _sync_energy(profile, mu1, mu2, beta, k, r, h, potP=FLAT, potQ=FLAT,
                 refinement=0, phase=0.0):
    cpl = CouplingParams.create(mu1, mu2, beta)
    conf = BumpConfiguration(Family.Synchronized, k, r, h, phase=phase)
    return energy_direct(AnsatzField(conf, cpl, profile), potP, potQ,
                         refinement=refinement)


def test_potential_validation_and_values():
    with pytest.raises(ValueError):
        Potential(-1.0, 2.0)
    with pytest.raises(ValueError):
        Potential(1.0, 1.0)
    p = builtin_potential(2.0, 3.0)
    assert p(0.0) == 3.0
    assert p(2.0) == pytest.approx(1.0 + 2.0 / 9.0)
    assert p(np.array([1e6]))[0] == pytest.approx(1.0, abs=1e-12)


def test_breakdown_sums_to_total(profile1):
    e = _sync_energy(profile1, 1.0, 1.0, 0.0, 3, 9.0, 0.5,
                     potP=builtin_potential(1.0, 2.0))
    parts = (e.kinetic_potential_u + e.kinetic_potential_v
             - e.quartic_u - e.quartic_v - e.cross)
    assert e.total == pytest.approx(parts, rel=1e-12)
    assert e.error_estimate >= 0.0


def test_far_apart_rings_are_additive(profile1):
    # with P = Q = 1 the energy is extensive in the bump count once the
    # bumps stop talking to each other (spacing >= 25 here, tails ~ e^-25);
    # the comparison is only as sharp as the two quadratures
    e2 = _sync_energy(profile1, 1.0, 1.0, 0.0, 2, 25.0, 0.5)
    e4 = _sync_energy(profile1, 1.0, 1.0, 0.0, 4, 25.0, 0.5)
    tol = 5.0 * (e4.error_estimate + 2.0 * e2.error_estimate)
    assert abs(e4.total - 2.0 * e2.total) < tol


def test_isolated_bump_energy_matches_moments(profile1):
    # at (1, 1, 0) with alpha = gamma = 1 and P = Q = 1 the per-bump energy
    # collapses to mass4 - mass4/2 via int |grad W|^2 + W^2 = int W^4
    e = _sync_energy(profile1, 1.0, 1.0, 0.0, 2, 25.0, 0.5)
    per_bump = e.total / 4.0
    assert per_bump == pytest.approx(0.5 * profile1.mass4, rel=5e-4)


def test_mu_scaling_of_the_total(profile1):
    lo = _sync_energy(profile1, 1.0, 1.0, 0.0, 3, 9.0, 0.5)
    hi = _sync_energy(profile1, 4.0, 4.0, 0.0, 3, 9.0, 0.5)
    # alpha^2 = 1/4 scales every density on the shared grid pointwise, so
    # the ratio is exact even where the quadrature itself is not
    assert hi.total == pytest.approx(lo.total / 4.0, rel=1e-9)


def test_rotation_invariance_through_the_phase(profile1):
    base = _sync_energy(profile1, 1.0, 2.0, -0.5, 5, 9.0, 0.4,
                        potP=builtin_potential(1.0, 2.0))
    turned = _sync_energy(profile1, 1.0, 2.0, -0.5, 5, 9.0, 0.4,
                          potP=builtin_potential(1.0, 2.0), phase=0.7321)
    assert abs(turned.total - base.total) < 1e-8 * abs(base.total)


def test_refinement_errors_shrink_monotonically(profile1):
    errs = [_sync_energy(profile1, 1.0, 1.0, 0.0, 2, 8.0, 0.5,
                         potP=builtin_potential(1.0, 2.0),
                         refinement=lvl).error_estimate
            for lvl in (0, 1, 2)]
    assert errs[0] > errs[1] > errs[2] > 0.0


def test_pair_interaction_decay_constants(profile1):
    # frozen from a level-converged run; guards the quadrature path
    assert pair_interaction(profile1, 8.0) == pytest.approx(3.877950874e-3, rel=1e-6)
    assert pair_interaction(profile1, 10.0) == pytest.approx(4.198603508e-4, rel=1e-6)
    with pytest.raises(ValueError):
        pair_interaction(profile1, 2.0)


def test_pair_interaction_follows_the_exponential_law(profile1):
    # g(d) ~ C e^-d / d: one decade of d halves nothing cleanly, so test
    # the local log-slope d ln g / d d = -(1 + 1/d)
    d = 10.0
    g1, g2 = pair_interaction(profile1, d - 0.5), pair_interaction(profile1, d + 0.5)
    slope = math.log(g2 / g1)
    assert slope == pytest.approx(-(1.0 + 1.0 / d), rel=0.02)


def test_potential_correction_scales_like_the_moment(profile1):
    pot = builtin_potential(1.0, 2.0)
    big = 40.0
    got = potential_correction(profile1, pot, big)
    assert got == pytest.approx(profile1.mass2 / big**2, rel=0.02)
    with pytest.raises(ValueError):
        potential_correction(profile1, pot, 5.0)


def test_cross_species_overlap_rate(profile1, profile4):
    ds = np.array([6.0, 7.0, 8.0])
    vals = [cross_species_overlap(profile1, profile4, d) for d in ds]
    rate = -np.polyfit(ds, np.log(vals), 1)[0]
    # int W1^2 W2^2 around two centers decays like e^{-2d} (up to powers)
    assert rate > 1.9
