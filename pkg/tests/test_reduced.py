import math

import numpy as np
import pytest

from multibump.expansion import ExpansionConstants
from multibump.reduced import (
    Curvature,
    NoCriticalPoint,
    SolverError,
    gradient_consistency,
    in_window,
    plant_segregated_root,
    plant_sync_root,
    reduced_energy,
    reduced_gradient,
    scaling_sweep,
    solve_contraction,
    solve_newton,
    solve_segregated,
    window_center,
)

OPERATING = ExpansionConstants(A0=75.589, A1=37.7945, C_beta=46.2403,
                               D_beta=46.2403)


def test_newton_recovers_a4_plant():
    c, (r0, h0) = plant_sync_root(12, 18.0, 0.3, C_beta=40.0)
    cp = solve_newton(c, 2.0, 12, (r0 * 1.06, h0 * 0.94))
    assert cp.r_star == pytest.approx(r0, abs=1e-8)
    assert cp.h_star == pytest.approx(h0, abs=1e-10)
    assert cp.grad_norm < 1e-10
    assert cp.rho_star is None
    assert cp.curvature in (Curvature.Max, Curvature.Min, Curvature.Saddle)


def test_newton_recovers_f1_plant():
    c, (r0, h0) = plant_sync_root(12, 18.0, None, C_beta=40.0, form="f1")
    cp = solve_newton(c, 2.0, 12, (r0 * 1.05, min(h0 * 1.05, 0.95)), form="f1")
    assert cp.r_star == pytest.approx(r0, abs=1e-7)
    assert cp.h_star == pytest.approx(h0, abs=1e-9)


def test_contraction_agrees_with_newton_on_a_plant():
    k = 16
    r0 = k * math.log(k) / math.pi
    h0 = 2.0 * math.pi / k
    c, (r0, h0) = plant_sync_root(k, r0, h0, C_beta=40.0)
    newton = solve_newton(c, 2.0, k, (r0 * 1.05, h0 * 0.95))
    contr = solve_contraction(c, 2.0, k, initial=(r0 * 1.05, h0 * 0.95))
    assert contr.r_star == pytest.approx(newton.r_star, rel=1e-6)
    assert contr.h_star == pytest.approx(newton.h_star, rel=1e-6)


def test_contraction_from_the_fixed_point_stays_put():
    c, (r0, h0) = plant_sync_root(16, 20.0, 0.35, C_beta=40.0)
    cp = solve_contraction(c, 2.0, 16, initial=(r0, h0))
    assert cp.iterations == 1
    assert cp.r_star == pytest.approx(r0, abs=1e-12)
    assert cp.h_star == pytest.approx(h0, abs=1e-12)


def test_contraction_guards():
    c, _ = plant_sync_root(16, 20.0, 0.35, C_beta=40.0)
    with pytest.raises(ValueError, match="k >="):
        solve_contraction(c, 2.0, 6)
    flat = ExpansionConstants(A0=1.0, A1=5.0, C_beta=0.0, D_beta=0.0)
    with pytest.raises(NoCriticalPoint):
        solve_contraction(flat, 2.0, 16)
    with pytest.raises(NoCriticalPoint):
        solve_newton(flat, 2.0, 16, (20.0, 0.3))


def test_gradient_matches_energy_by_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(10):
        c = ExpansionConstants(A0=1.0, A1=rng.uniform(5.0, 50.0),
                               C_beta=rng.uniform(5.0, 100.0),
                               D_beta=rng.uniform(5.0, 100.0))
        k = int(rng.integers(6, 17))
        r = rng.uniform(8.0, 30.0)
        h = rng.uniform(0.1, 0.8)
        for form in ("a4", "f1"):
            out = gradient_consistency(c, 2.0, k, r, h, form=form)
            assert out["matches"], (form, k, r, h, out)


def test_display_form_mismatch_is_reported_not_corrected():
    c = ExpansionConstants(A0=1.0, A1=20.0, C_beta=30.0, D_beta=30.0)
    k, r, h = 10, 14.0, 0.35
    out = gradient_consistency(c, 2.0, k, r, h, form="display")
    assert not out["matches"]
    # the discrepancy is exactly the missing 1/k on the ring channel:
    # display_r = f1_r + (k - 1) * (2 lam C_beta e^{-lam r})
    disp_r = reduced_gradient(c, 2.0, k, r, h, form="display")[0]
    f1_r = reduced_gradient(c, 2.0, k, r, h, form="f1")[0]
    lam = 2.0 * math.pi * math.sqrt(1.0 - h * h) / k
    ring_channel = 2.0 * lam * c.C_beta * math.exp(-lam * r)
    assert disp_r == pytest.approx(f1_r + (k - 1.0) * ring_channel, rel=1e-12)
    with pytest.raises(ValueError):
        reduced_energy(c, 2.0, k, r, h, form="display")


def test_segregated_plant_and_symmetry():
    c, (r0, p0, h0) = plant_segregated_root(8, 12.0, 14.0, 0.35,
                                            C1=40.0, C2=35.0)
    # grad tol 1e-12 keeps the positional error below 1e-8 through the
    # Jacobian's conditioning
    cp = solve_segregated(c, 2.0, 2.0, 8, (12.5, 13.4, 0.33), tol=1e-12)
    assert cp.r_star == pytest.approx(r0, abs=1e-8)
    assert cp.rho_star == pytest.approx(p0, abs=1e-8)
    assert cp.h_star == pytest.approx(h0, abs=1e-8)

    c, _ = plant_segregated_root(8, 12.0, 12.0, 0.35, C1=40.0, C2=40.0)
    cp = solve_segregated(c, 2.0, 2.0, 8, (12.6, 11.5, 0.33))
    assert abs(cp.r_star - cp.rho_star) < 1e-8


def test_segregated_needs_positive_ring_constants():
    flat = ExpansionConstants(B0=1.0, B1=5.0, B2=5.0)
    with pytest.raises(NoCriticalPoint):
        solve_segregated(flat, 2.0, 2.0, 8, (12.0, 12.0, 0.3))


def test_sweep_reports_failures_per_row():
    rows = scaling_sweep(OPERATING, 2.0, [10, 3], solver="newton")
    assert rows[0]["error"] == "" and rows[0]["curvature"] is not None
    assert rows[0]["r_norm"] == pytest.approx(
        rows[0]["r_star"] / (10 * math.log(10)))
    bad = rows[1]
    assert bad["k"] == 3 and bad["error"] != "" and bad["r_star"] is None


def test_window_center_matches_closed_forms():
    r, h = window_center(20, 2.0)
    assert r == pytest.approx(20.0 * math.log(20.0) / math.pi)
    assert h == pytest.approx(2.0 * math.pi / 20.0)
    assert in_window(20, r, h, 2.0)
    assert not in_window(20, 2.0 * r, h, 2.0)


def test_window_residence_of_the_solved_points():
    # the solved critical point should sit inside the 25% collar around
    # the window center once k is large enough
    for k in (20, 40):
        cp = solve_newton(OPERATING, 2.0, k, window_center(k, 2.0))
        assert cp.in_window, (k, cp.r_star / (k * math.log(k)), cp.h_star * k)
