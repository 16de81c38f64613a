"""Three-term path cost: length, obstacle clearance and altitude corridor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scenario import Bounds, Obstacle, Scenario, decode

DEFAULT_BETA = (1.0, 100.0, 10.0)
DEFAULT_VIOLATION_COST = 1e6


@dataclass(frozen=True)
class CostWeights:
    """Weights for (length, obstacle, altitude) plus the ground-strike penalty.

    ``violation_cost`` replaces the infinite penalty for a segment at or
    below ground level. Keep it well above any cost a non-violating path can
    reach; the default of 1e6 is orders of magnitude above that for
    scenes up to a few kilometres across.
    """

    beta: tuple[float, float, float] = DEFAULT_BETA
    violation_cost: float = DEFAULT_VIOLATION_COST

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != 3:
            raise ValueError(f"beta needs 3 weights, got {len(beta)}")
        if any(not math.isfinite(b) or b < 0 for b in beta) or not any(b > 0 for b in beta):
            raise ValueError(f"beta must be finite, >= 0 and not all zero: {beta}")
        if not (math.isfinite(self.violation_cost) and self.violation_cost > 0):
            raise ValueError("violation_cost must be a positive finite number")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_dict(cls, data: dict | None) -> "CostWeights":
        data = data or {}
        return cls(tuple(data.get("beta", DEFAULT_BETA)),
                   float(data.get("violation_cost", DEFAULT_VIOLATION_COST)))

    def to_dict(self) -> dict:
        return {"beta": list(self.beta), "violation_cost": self.violation_cost}


@dataclass(frozen=True)
class CostBreakdown:
    j1: float
    j2: float
    j3: float
    total: float
    violated: bool

    @property
    def collision_free(self) -> bool:
        return self.j2 == 0.0

    def to_dict(self) -> dict:
        return {"j1": self.j1, "j2": self.j2, "j3": self.j3,
                "total": self.total, "violated": self.violated}


def _midpoints(path: np.ndarray) -> np.ndarray:
    return 0.5 * (path[:-1] + path[1:])


def path_length(path) -> float:
    p = np.asarray(path, dtype=float)
    return float(np.sqrt(((p[1:] - p[:-1]) ** 2).sum(axis=1)).sum())


def _obstacle_arrays(obstacles: Sequence[Obstacle]) -> tuple[np.ndarray, np.ndarray]:
    centers = np.array([o.center for o in obstacles], dtype=float).reshape(-1, 3)
    radii = np.array([o.safe_radius for o in obstacles], dtype=float)
    return centers, radii


def _clearance(mids: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> float:
    if radii.size == 0:
        return 0.0
    diff = mids[:, None, :] - centers[None, :, :]
    d = np.sqrt(np.einsum("lkc,lkc->lk", diff, diff))
    return float(np.maximum(1.0 - d / radii, 0.0).sum()) / (mids.shape[0] * radii.size)


def obstacle_cost(path, obstacles: Sequence[Obstacle]) -> float:
    """Mean over (segment, obstacle) pairs of the relative intrusion depth.

    Distance is measured from the obstacle center to the segment midpoint.
    An empty obstacle list costs 0.
    """
    centers, radii = _obstacle_arrays(obstacles)
    return _clearance(_midpoints(np.asarray(path, dtype=float)), centers, radii)


def _altitude(heights: np.ndarray, z_min: float, z_max: float,
              violation_cost: float) -> tuple[float, bool]:
    lo, hi = heights.min(), heights.max()
    if z_min <= lo and hi <= z_max:
        return 0.0, False
    grounded = heights <= 0.0
    above = np.maximum(heights - z_max, 0.0)
    below = np.where(grounded, 0.0, np.maximum(z_min - heights, 0.0))
    n_ground = int(grounded.sum())
    return float(above.sum() + below.sum() + n_ground * violation_cost), n_ground > 0


def altitude_cost(path, bounds: Bounds, violation_cost: float = DEFAULT_VIOLATION_COST
                  ) -> tuple[float, bool]:
    """Corridor deviation summed over segment midpoint altitudes.

    A midpoint at or below ground adds ``violation_cost`` and sets the flag.
    """
    heights = _midpoints(np.asarray(path, dtype=float))[:, 2]
    return _altitude(heights, bounds.z_min, bounds.z_max, violation_cost)


class PathCost:
    """Cost of gene vectors over one scenario, with obstacle arrays cached."""

    def __init__(self, scenario: Scenario, weights: CostWeights | None = None):
        self.scenario = scenario
        self.weights = weights or CostWeights()
        self._centers, self._radii = _obstacle_arrays(scenario.obstacles)

    def __call__(self, genes) -> CostBreakdown:
        path = decode(genes, self.scenario)
        mids = _midpoints(path)
        b1, b2, b3 = self.weights.beta
        seg = path[1:] - path[:-1]
        j1 = float(np.sqrt(np.einsum("lc,lc->l", seg, seg)).sum())
        j2 = _clearance(mids, self._centers, self._radii)
        j3, violated = _altitude(mids[:, 2], self.scenario.bounds.z_min,
                                 self.scenario.bounds.z_max, self.weights.violation_cost)
        total = b1 * j1 + b2 * j2 + b3 * j3
        if violated:
            total += self.weights.violation_cost
        return CostBreakdown(j1, j2, j3, total, violated)


def evaluate(candidate, scenario: Scenario, weights: CostWeights | None = None) -> CostBreakdown:
    """Cost of a candidate (or a bare gene vector). Pure; never mutates input."""
    genes = getattr(candidate, "genes", candidate)
    return PathCost(scenario, weights)(genes)
