import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multibump.coupling import (
    CouplingParams,
    InadmissibleCoupling,
    WindowClass,
    analytic_constants,
    classify_beta,
    synchronized_amplitudes,
)

mus = st.floats(min_value=0.2, max_value=5.0, allow_nan=False)
unit = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


def _admissible_beta(mu1, mu2, t, branch):
    """Map t in (0,1) onto one of the two admissible open intervals."""
    if branch:
        return max(mu1, mu2) + 3.0 * t
    lo, hi = -math.sqrt(mu1 * mu2), min(mu1, mu2)
    return lo + t * (hi - lo)


@given(mus, mus, unit, st.booleans())
@settings(max_examples=200, deadline=None)
def test_amplitude_identities(mu1, mu2, t, branch):
    beta = _admissible_beta(mu1, mu2, t, branch)
    if not (-math.sqrt(mu1 * mu2) < beta < min(mu1, mu2) or beta > max(mu1, mu2)):
        return  # endpoint collapse from rounding
    alpha, gamma = synchronized_amplitudes(mu1, mu2, beta)
    a2, g2 = alpha * alpha, gamma * gamma
    # near the admissibility endpoints mu1 mu2 - beta^2 cancels, so the
    # achievable residual grows with the condition number of that division
    cond = (mu1 * mu2 + beta * beta) / abs(mu1 * mu2 - beta * beta)
    tol = 100.0 * 2.3e-16 * max(1.0, cond)
    assert abs(mu1 * a2 + beta * g2 - 1.0) < tol
    assert abs(beta * a2 + mu2 * g2 - 1.0) < tol


@given(mus, mus, unit, st.booleans())
@settings(max_examples=100, deadline=None)
def test_swap_symmetry(mu1, mu2, t, branch):
    beta = _admissible_beta(mu1, mu2, t, branch)
    if not (-math.sqrt(mu1 * mu2) < beta < min(mu1, mu2) or beta > max(mu1, mu2)):
        return
    alpha, gamma = synchronized_amplitudes(mu1, mu2, beta)
    gamma2, alpha2 = synchronized_amplitudes(mu2, mu1, beta)
    assert alpha == pytest.approx(alpha2, rel=1e-14)
    assert gamma == pytest.approx(gamma2, rel=1e-14)


def test_known_amplitudes():
    alpha, gamma = synchronized_amplitudes(2.0, 2.0, 1.0)
    assert alpha == pytest.approx(math.sqrt(1.0 / 3.0), rel=1e-14)
    assert gamma == pytest.approx(math.sqrt(1.0 / 3.0), rel=1e-14)
    alpha, gamma = synchronized_amplitudes(1.0, 1.0, 0.0)
    assert (alpha, gamma) == (1.0, 1.0)


def test_inadmissible_beta_raises():
    for beta in (1.0, math.sqrt(2.0), 1.5, -2.0):
        # the closed gap [min, max] and beta <= -sqrt(mu1 mu2)
        with pytest.raises(InadmissibleCoupling):
            synchronized_amplitudes(1.0, 2.0, beta)


def test_window_classification():
    assert classify_beta(1.0, 2.0, -0.5) is WindowClass.Repulsive
    assert classify_beta(1.0, 2.0, 0.5) is WindowClass.AttractiveSmall
    assert classify_beta(1.0, 2.0, 3.0) is WindowClass.AttractiveLarge
    # beta = 0 decouples the system; it belongs to no attraction window
    assert classify_beta(1.0, 2.0, 0.0) is WindowClass.Outside
    assert classify_beta(1.0, 2.0, 1.5) is WindowClass.Outside


def test_params_carry_the_caveat():
    p = CouplingParams.create(1.0, 2.0, -0.5)
    assert "exceptional sequence" in p.caveat
    assert p.window_class is WindowClass.Repulsive


def test_analytic_constants_decoupled_case(profile1):
    p = CouplingParams.create(1.0, 1.0, 0.0)
    a0, a1c, a2c = analytic_constants(p, profile1)
    assert a0 == pytest.approx(profile1.mass4, rel=1e-14)
    assert a1c[0] == pytest.approx(profile1.mass2, rel=1e-14)
    assert a1c[1] == pytest.approx(0.5 * profile1.mass2, rel=1e-14)
    assert a2c == a1c
