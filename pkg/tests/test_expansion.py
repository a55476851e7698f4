import math

import numpy as np
import pytest

from multibump.coupling import CouplingParams
from multibump.expansion import (
    ExpansionConstants,
    FitError,
    PotParams,
    Provenance,
    analytic_a1_candidates,
    fit_cross_coefficient,
    fit_expansion_constants,
    remainder_bound,
    ring_interaction_term,
    seg_expansion,
    sign_changing_expansion,
    sync_expansion,
)

TRUE = ExpansionConstants(A0=75.0, A1=37.0, A2=18.0, C_beta=46.0, D_beta=29.0,
                          B0=40.0, B1=25.0, B2=21.0,
                          C1=33.0, D1=17.0, C2=28.0, D2=13.0)


def _grid(ks=(4, 6), rs=(8.0, 10.0, 12.0, 14.0), hs=(0.45, 0.6)):
    return [(k, r, h) for k in ks for h in hs for r in rs]


def test_fit_recovers_planted_constants_distinct_powers():
    pot = PotParams(a=1.0, m=2.0, b=0.5, n=3.0)
    samples = [(k, r, h, sync_expansion(TRUE, pot, k, r, h))
               for k, r, h in _grid()]
    c = fit_expansion_constants(samples, pot)
    assert c.provenance is Provenance.Fitted
    assert not c.merged_powers
    assert c.A0 == pytest.approx(TRUE.A0, rel=1e-9)
    assert c.A1 == pytest.approx(TRUE.A1, rel=1e-8)
    assert c.A2 == pytest.approx(TRUE.A2, rel=1e-8)
    assert c.C_beta == pytest.approx(TRUE.C_beta, rel=1e-8)
    assert c.D_beta == pytest.approx(TRUE.D_beta, rel=1e-8)
    assert c.fit_residual < 1e-9 * TRUE.A0


def test_fit_merges_equal_powers_and_splits_evenly():
    pot = PotParams(a=1.0, m=2.0, b=1.0, n=2.0)
    samples = [(k, r, h, sync_expansion(TRUE, pot, k, r, h))
               for k, r, h in _grid()]
    c = fit_expansion_constants(samples, pot)
    assert c.merged_powers
    combined = pot.a * TRUE.A1 + pot.b * TRUE.A2
    assert c.combined_power_coeff == pytest.approx(combined, rel=1e-8)
    assert c.A1 == pytest.approx(c.A2)
    assert c.A1 == pytest.approx(0.5 * combined, rel=1e-8)


def test_fit_adjudicates_against_the_analytic_candidates(profile1):
    pot = PotParams(a=1.0, m=2.0, b=1.0, n=2.0)
    cpl = CouplingParams.create(1.0, 1.0, 0.0)
    cands = analytic_a1_candidates(pot, cpl, profile1)
    assert cands["full"] == pytest.approx(2.0 * profile1.mass2, rel=1e-14)
    planted = ExpansionConstants(A0=75.0, A1=cands["full"] / 2.0,
                                 A2=cands["full"] / 2.0,
                                 C_beta=46.0, D_beta=29.0)
    samples = [(k, r, h, sync_expansion(planted, pot, k, r, h))
               for k, r, h in _grid()]
    c = fit_expansion_constants(samples, pot, coupling=cpl, profile=profile1)
    assert c.a1_adjudication == "full"


def test_fit_preconditions():
    pot = PotParams(a=1.0, m=2.0, b=0.5, n=3.0)
    good = [(k, r, h, sync_expansion(TRUE, pot, k, r, h))
            for k, r, h in _grid()]
    with pytest.raises(FitError, match="at least 8"):
        fit_expansion_constants(good[:7], pot)
    squeezed = [(k, 10.0 + 0.1 * i, h, 1.0)
                for i, (k, _, h) in enumerate(_grid())]
    with pytest.raises(FitError, match="factor 1.5 in r"):
        fit_expansion_constants(squeezed, pot)
    # one k, one h, two r values: exponential arguments span < 2 and the
    # sample-count gate is already satisfied
    narrow = [(4, r, 0.5, sync_expansion(TRUE, pot, 4, r, 0.5))
              for r in (8.0, 12.0)] * 4
    with pytest.raises(FitError, match="exponential argument"):
        fit_expansion_constants(narrow, pot)
    # three distinct rows cannot identify five columns
    thin = [(4, r, 0.5, sync_expansion(TRUE, pot, 4, r, 0.5))
            for r in (6.0, 10.0, 24.0)] * 3
    with pytest.raises(FitError, match="rank deficient"):
        fit_expansion_constants(thin[:9], pot)


def test_sign_changing_identity_is_exact():
    pot = PotParams(a=1.0, m=2.0, b=0.5, n=3.0)
    for l, r, h in ((2, 9.0, 0.4), (3, 14.0, 0.55), (5, 22.0, 0.2)):
        sc = sign_changing_expansion(TRUE, pot, l, r, h)
        sync = sync_expansion(TRUE, pot, 2 * l, r, h)
        ring = ring_interaction_term(TRUE, 2 * l, r, h)
        # the sign flip is implemented as literally adding the neighbor
        # channel back twice, so the composed form is bitwise equal ...
        assert sc == sync + 2.0 * ring
        # ... while re-subtracting only holds to the total's ulp scale
        assert sc - sync == pytest.approx(2.0 * ring, abs=1e-12 * abs(sync))


def test_sign_changing_needs_at_least_two_pairs():
    with pytest.raises(ValueError):
        sign_changing_expansion(TRUE, PotParams(1.0, 2.0, 1.0, 2.0), 1, 9.0, 0.4)


def test_ring_term_positive_and_decaying():
    vals = [ring_interaction_term(TRUE, 6, r, 0.5) for r in (8.0, 12.0, 16.0)]
    assert all(v > 0 for v in vals)
    assert vals[0] > vals[1] > vals[2]
    # rate check against the closed form lam = 2 pi sqrt(1 - h^2) / k
    lam = 2.0 * math.pi * math.sqrt(1.0 - 0.25) / 6.0
    measured = math.log(vals[0] / vals[1]) / 4.0
    assert measured == pytest.approx(lam + math.log(12.0 / 8.0) / 4.0, rel=1e-12)


def test_remainder_bound_shrinks_and_dominates_next_order():
    pot = PotParams(1.0, 2.0, 1.0, 2.0)
    bounds = [remainder_bound(TRUE, pot, 6, r, 0.5) for r in (8.0, 12.0, 16.0)]
    assert bounds[0] > bounds[1] > bounds[2] > 0.0
    # sigma defaults to the constants' sigma; passing it explicitly wins
    assert remainder_bound(TRUE, pot, 6, 10.0, 0.5, sigma=1.0) \
        < remainder_bound(TRUE, pot, 6, 10.0, 0.5, sigma=0.25)


def test_geometry_gates():
    pot = PotParams(1.0, 2.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        sync_expansion(TRUE, pot, 6, -1.0, 0.5)
    with pytest.raises(ValueError):
        sync_expansion(TRUE, pot, 6, 10.0, 1.0)


def test_seg_expansion_symmetry_and_cross_fit():
    pot = PotParams(a=1.0, m=2.0, b=1.0, n=2.0)
    sym = ExpansionConstants(B0=40.0, B1=25.0, B2=25.0,
                             C1=33.0, D1=17.0, C2=33.0, D2=17.0)
    a = seg_expansion(sym, pot, 5, 11.0, 13.0, 0.4)
    b = seg_expansion(sym, pot, 5, 13.0, 11.0, 0.4)
    assert a == pytest.approx(b, rel=1e-14)

    truth = 7.5
    samples = []
    for (k, r, h) in _grid(ks=(4, 5), rs=(9.0, 11.0, 13.0), hs=(0.4,)):
        rho = r + 1.0
        e = seg_expansion(TRUE, pot, k, r, rho, h, cross_coeff=truth)
        samples.append((k, r, rho, h, e))
    got = fit_cross_coefficient(samples, TRUE, pot)
    assert got == pytest.approx(truth, rel=1e-10)
