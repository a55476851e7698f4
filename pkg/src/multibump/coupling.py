"""Coupling algebra: synchronized amplitudes and admissible beta windows.

For the system -Du + P u = mu1 u^3 + beta u v^2, -Dv + Q v = mu2 v^3 +
beta u^2 v with constant potentials, the pair (alpha W, gamma W) solves it
exactly when

    mu1 alpha^2 + beta gamma^2 = 1,    beta alpha^2 + mu2 gamma^2 = 1,

whose solution is alpha = sqrt((mu2 - beta)/(mu1 mu2 - beta^2)) and
gamma = sqrt((mu1 - beta)/(mu1 mu2 - beta^2)), defined exactly for
beta in (-sqrt(mu1 mu2), min(mu1, mu2)) union (max(mu1, mu2), inf).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .ground_state import RadialProfile


class InadmissibleCoupling(Exception):
    """beta outside the range where the amplitudes are defined."""


class WindowClass(enum.Enum):
    Repulsive = "Repulsive"                # beta in (-sqrt(mu1 mu2), 0)
    AttractiveSmall = "AttractiveSmall"    # beta in (0, min(mu1, mu2))
    AttractiveLarge = "AttractiveLarge"    # beta in (max(mu1, mu2), inf)
    Outside = "Outside"


# The admissible negative window excludes an unknown exceptional sequence
# {beta_i}; it has measure zero and cannot be computed, so classification
# ignores it and every report carries this caveat.
EXCEPTIONAL_SEQUENCE_CAVEAT = (
    "window classification ignores the exceptional sequence {beta_i} inside "
    "the negative branch (measure zero, not computable)"
)


@dataclass(frozen=True)
class CouplingParams:
    mu1: float
    mu2: float
    beta: float
    alpha: float
    gamma: float
    window_class: WindowClass
    caveat: str = EXCEPTIONAL_SEQUENCE_CAVEAT

    @classmethod
    def create(cls, mu1: float, mu2: float, beta: float) -> "CouplingParams":
        alpha, gamma = synchronized_amplitudes(mu1, mu2, beta)
        return cls(mu1, mu2, beta, alpha, gamma, classify_beta(mu1, mu2, beta))


def _amplitudes_defined(mu1: float, mu2: float, beta: float) -> bool:
    if mu1 <= 0 or mu2 <= 0:
        return False
    lo, mid_lo, mid_hi = -math.sqrt(mu1 * mu2), min(mu1, mu2), max(mu1, mu2)
    return (lo < beta < mid_lo) or (beta > mid_hi)


def synchronized_amplitudes(mu1: float, mu2: float, beta: float):
    """(alpha, gamma) of the synchronized pair (alpha W, gamma W)."""
    if not _amplitudes_defined(mu1, mu2, beta):
        raise InadmissibleCoupling(
            f"beta={beta} outside (-sqrt(mu1 mu2), min(mu1,mu2)) u (max(mu1,mu2), inf)"
        )
    den = mu1 * mu2 - beta * beta
    alpha = math.sqrt((mu2 - beta) / den)
    gamma = math.sqrt((mu1 - beta) / den)
    return alpha, gamma


def classify_beta(mu1: float, mu2: float, beta: float) -> WindowClass:
    """Partition of the admissible beta ranges; symmetric in (mu1, mu2)."""
    if mu1 <= 0 or mu2 <= 0:
        return WindowClass.Outside
    if -math.sqrt(mu1 * mu2) < beta < 0:
        return WindowClass.Repulsive
    if 0 < beta < min(mu1, mu2):
        return WindowClass.AttractiveSmall
    if beta > max(mu1, mu2):
        return WindowClass.AttractiveLarge
    return WindowClass.Outside


def analytic_constants(params: CouplingParams, profile: RadialProfile):
    """Closed-form expansion constants, with both A1/A2 normalizations.

    A0 uses the coefficient (mu1 + mu2 - 2 beta) / (2 (mu1 mu2 - beta^2)),
    which equals (alpha^2 + gamma^2)/2 and counts both the top and the
    bottom bump of a slice; this bookkeeping is confirmed numerically by
    the two-far-bumps quadrature test.  The A1/A2 normalization carries a
    factor-of-two ambiguity (alpha^2 vs alpha^2/2 times int W^2), so both
    candidates are returned and the expansion fit adjudicates.
    """
    mass2, mass4 = profile.mass2, profile.mass4
    a0 = (params.mu1 + params.mu2 - 2.0 * params.beta) / (
        2.0 * (params.mu1 * params.mu2 - params.beta**2)
    ) * mass4
    a1_candidates = (params.alpha**2 * mass2, 0.5 * params.alpha**2 * mass2)
    a2_candidates = (params.gamma**2 * mass2, 0.5 * params.gamma**2 * mass2)
    return a0, a1_candidates, a2_candidates
