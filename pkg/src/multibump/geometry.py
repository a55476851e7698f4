"""Cylinder bump configurations and their distances and symmetry sectors.

All 2k points of a synchronized family lie on the sphere of radius r: the
top circle has radius r sqrt(1-h^2) at height +rh, the bottom circle sits
at -rh.  Species-two points of a segregated family use the same heights at
radius rho with angles offset by pi/k.  Positions are stored parametrically
(k, r, rho, h, index) and materialized on demand so formulas and point sets
cannot drift apart.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Family(enum.Enum):
    Synchronized = "Synchronized"
    Segregated = "Segregated"
    SignChangingSync = "SignChangingSync"
    SignChangingSeg = "SignChangingSeg"


@dataclass(frozen=True)
class BumpConfiguration:
    family: Family
    k: int            # bumps per circle
    r: float
    h: float
    rho: float | None = None          # segregated second-species radius
    signs: tuple = ()                 # one sign per bump, top ring then bottom
    phase: float = 0.0                # rigid rotation of the whole ring about e3

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if not (0.0 < self.h < 1.0):
            raise ValueError("h must lie in (0, 1)")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.family in (Family.Segregated, Family.SignChangingSeg):
            if self.rho is None or self.rho <= 0:
                raise ValueError("segregated families need rho > 0")
        if not self.signs:
            n = 2 * self.k
            if self.family in (Family.SignChangingSync, Family.SignChangingSeg):
                if self.k % 2:
                    raise ValueError("sign-changing rings need an even bump count")
                ring = tuple((-1) ** j for j in range(self.k))
                object.__setattr__(self, "signs", ring + ring)
            else:
                object.__setattr__(self, "signs", (1,) * n)

    def positions(self) -> np.ndarray:
        """(2k, 3) species-one points, top ring first."""
        return synchronized_positions(self.k, self.r, self.h, phase=self.phase)

    def positions_second(self) -> np.ndarray:
        """(2k, 3) species-two points for segregated families."""
        if self.rho is None:
            raise ValueError("configuration has no second species")
        return segregated_positions(self.k, self.rho, self.h, phase=self.phase)

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.family.value,
                "k": self.k,
                "r": self.r,
                "rho": self.rho,
                "h": self.h,
                "signs": list(self.signs),
                "phase": self.phase,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "BumpConfiguration":
        d = json.loads(text)
        return cls(
            family=Family(d["family"]),
            k=d["k"],
            r=d["r"],
            h=d["h"],
            rho=d.get("rho"),
            signs=tuple(d.get("signs") or ()),
            phase=d.get("phase", 0.0),
        )


def synchronized_config(k: int, r: float, h: float) -> BumpConfiguration:
    return BumpConfiguration(Family.Synchronized, k, r, h)


def segregated_config(k: int, r: float, rho: float, h: float) -> BumpConfiguration:
    return BumpConfiguration(Family.Segregated, k, r, h, rho=rho)


def sign_changing_config(l: int, r: float, h: float) -> BumpConfiguration:
    """2l bumps per ring with alternating signs."""
    if l < 1:
        raise ValueError("l must be a positive integer")
    return BumpConfiguration(Family.SignChangingSync, 2 * l, r, h)


def synchronized_positions(k: int, r: float, h: float, phase: float = 0.0) -> np.ndarray:
    if not (0.0 < h < 1.0):
        raise ValueError("h must lie in (0, 1)")
    ang = 2.0 * np.pi * np.arange(k) / k + phase
    rad = r * math.sqrt(1.0 - h * h)
    top = np.column_stack([rad * np.cos(ang), rad * np.sin(ang), np.full(k, r * h)])
    bottom = top.copy()
    bottom[:, 2] = -r * h
    return np.vstack([top, bottom])


def segregated_positions(k: int, rho: float, h: float, phase: float = 0.0) -> np.ndarray:
    if not (0.0 < h < 1.0):
        raise ValueError("h must lie in (0, 1)")
    ang = (2.0 * np.arange(k) + 1.0) * np.pi / k + phase
    rad = rho * math.sqrt(1.0 - h * h)
    top = np.column_stack([rad * np.cos(ang), rad * np.sin(ang), np.full(k, rho * h)])
    bottom = top.copy()
    bottom[:, 2] = -rho * h
    return np.vstack([top, bottom])


def neighbor_distance(k: int, r: float, h: float) -> float:
    """Distance between adjacent bumps on one circle: 2 r sqrt(1-h^2) sin(pi/k)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return 2.0 * r * math.sqrt(1.0 - h * h) * math.sin(math.pi / k)


def vertical_distance(r: float, h: float) -> float:
    """Top-to-bottom gap of a slice: 2 r h."""
    return 2.0 * r * h


class CrossDistance(NamedTuple):
    exact: float
    approx: float  # drops the h^2 (r - rho)^2 term


def cross_distance(k: int, r: float, rho: float, h: float) -> CrossDistance:
    """|x_bar_1 - y_bar_1| between the two species' nearest top points.

    exact  = sqrt((1-h^2)(r^2 + rho^2 - 2 r rho cos(pi/k)) + h^2 (r-rho)^2)
    approx = sqrt((1-h^2)(r^2 + rho^2 - 2 r rho cos(pi/k)))
    """
    planar = (1.0 - h * h) * (r * r + rho * rho - 2.0 * r * rho * math.cos(math.pi / k))
    return CrossDistance(
        exact=math.sqrt(planar + h * h * (r - rho) ** 2),
        approx=math.sqrt(planar),
    )


class SectorMembership(NamedTuple):
    in_sector: bool
    z_positive: bool
    on_axis: bool


def sector_membership(point, j: int, k: int) -> SectorMembership:
    """Cone test for membership in the j-th angular sector (1-based).

    The sector axis points at angle 2(j-1) pi / k; a point belongs when the
    planar angle to the axis is at most pi/k.  Points on the y3-axis have no
    well-defined angle and are flagged as boundary.
    """
    x, y, z = float(point[0]), float(point[1]), float(point[2])
    rho = math.hypot(x, y)
    if rho == 0.0:
        return SectorMembership(False, z >= 0.0, True)
    theta = 2.0 * (j - 1) * math.pi / k
    dot = (x * math.cos(theta) + y * math.sin(theta)) / rho
    return SectorMembership(dot >= math.cos(math.pi / k) - 1e-15, z >= 0.0, False)
