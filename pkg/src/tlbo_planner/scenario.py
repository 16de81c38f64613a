"""World model for 3D waypoint planning and the gene <-> path encoding.

A path is ``start, w_1, ..., w_W, goal``. Only the ``W`` interior waypoints
are decision variables; they are flattened into a gene vector laid out as
``[x_1, y_1, z_1, x_2, y_2, z_2, ...]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple, Sequence

import numpy as np


class ScenarioError(ValueError):
    """Invalid scenario data. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class EncodingError(ValueError):
    pass


class Point3(NamedTuple):
    x: float
    y: float
    z: float


def _point(value: Any, name: str) -> Point3:
    try:
        x, y, z = (float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(name, f"expected three numbers, got {value!r}") from exc
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise ScenarioError(name, "components must be finite")
    return Point3(x, y, z)


def segment_midpoint(a: Sequence[float], b: Sequence[float]) -> Point3:
    return Point3((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0)


@dataclass(frozen=True)
class Obstacle:
    """Spherical keep-out zone; ``safe_radius`` already includes clearance."""

    center: Point3
    safe_radius: float

    def __post_init__(self):
        if not (math.isfinite(self.safe_radius) and self.safe_radius > 0):
            raise ScenarioError("safe_radius", f"must be > 0, got {self.safe_radius}")

    def contains(self, p: Sequence[float]) -> bool:
        return math.dist(self.center, p) < self.safe_radius


@dataclass(frozen=True)
class Bounds:
    lower: Point3
    upper: Point3
    z_min: float
    z_max: float

    def __post_init__(self):
        for axis in range(3):
            if not self.lower[axis] < self.upper[axis]:
                raise ScenarioError(
                    "bounds", f"lower must be < upper on axis {'xyz'[axis]}")
        if not 0 < self.z_min < self.z_max:
            raise ScenarioError("z_min", "need 0 < z_min < z_max")
        if self.z_min < self.lower.z or self.z_max > self.upper.z:
            raise ScenarioError("z_max", "[z_min, z_max] must lie within [lower.z, upper.z]")

    def contains(self, p: Sequence[float]) -> bool:
        return all(self.lower[a] <= p[a] <= self.upper[a] for a in range(3))


@dataclass(frozen=True)
class Scenario:
    bounds: Bounds
    obstacles: tuple[Obstacle, ...]
    start: Point3
    goal: Point3
    num_interior_waypoints: int
    description: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.num_interior_waypoints < 1:
            raise ScenarioError("num_interior_waypoints", "must be >= 1")
        if self.start == self.goal:
            raise ScenarioError("goal", "start and goal coincide")
        for name in ("start", "goal"):
            p = getattr(self, name)
            if not self.bounds.contains(p):
                raise ScenarioError(name, f"{tuple(p)} is outside the world bounds")
            for k, obs in enumerate(self.obstacles):
                if obs.contains(p):
                    raise ScenarioError(name, f"{tuple(p)} is inside obstacle {k}")

    @property
    def dim(self) -> int:
        return 3 * self.num_interior_waypoints

    def gene_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-gene box; altitude genes are restricted to the flight corridor."""
        b = self.bounds
        lo = np.tile([b.lower.x, b.lower.y, b.z_min], self.num_interior_waypoints)
        hi = np.tile([b.upper.x, b.upper.y, b.z_max], self.num_interior_waypoints)
        return lo.astype(float), hi.astype(float)

    def without_obstacles(self) -> "Scenario":
        return Scenario(self.bounds, (), self.start, self.goal,
                        self.num_interior_waypoints, self.description)

    def to_dict(self) -> dict:
        b = self.bounds
        out = {
            "bounds": {"lower": list(b.lower), "upper": list(b.upper),
                       "z_min": b.z_min, "z_max": b.z_max},
            "obstacles": [{"center": list(o.center), "safe_radius": o.safe_radius}
                          for o in self.obstacles],
            "start": list(self.start),
            "goal": list(self.goal),
            "num_interior_waypoints": self.num_interior_waypoints,
        }
        if self.description:
            out["description"] = self.description
        return out


@dataclass(frozen=True, eq=False)
class Candidate:
    """One learner: a gene vector plus its cached cost (``None`` until evaluated).

    ``genes`` is stored as a read-only float array.
    """

    genes: np.ndarray
    cost: Any = None

    def __post_init__(self):
        g = np.array(self.genes, dtype=float)
        g.flags.writeable = False
        object.__setattr__(self, "genes", g)

    @property
    def evaluated(self) -> bool:
        return self.cost is not None

    @property
    def total(self) -> float:
        if self.cost is None:
            raise ValueError("candidate has not been evaluated")
        return self.cost.total


def encode(waypoints: Sequence[Sequence[float]], scenario: Scenario | None = None) -> np.ndarray:
    if scenario is not None and len(waypoints) != scenario.num_interior_waypoints:
        raise EncodingError(
            f"expected {scenario.num_interior_waypoints} waypoints, got {len(waypoints)}")
    genes = np.asarray(waypoints, dtype=float)
    if genes.ndim != 2 or genes.shape[1] != 3:
        raise EncodingError(f"waypoints must be a sequence of 3D points, got shape {genes.shape}")
    return genes.reshape(-1).copy()


def decode_waypoints(genes: Sequence[float]) -> list[Point3]:
    g = np.asarray(genes, dtype=float)
    if g.ndim != 1 or g.size % 3:
        raise EncodingError(f"gene length {g.size} is not a multiple of 3")
    return [Point3(*map(float, row)) for row in g.reshape(-1, 3)]


def decode(genes: Sequence[float], scenario: Scenario) -> np.ndarray:
    """Full path ``P_0..P_L`` as an ``(L+1, 3)`` array, ``L = W + 1``."""
    g = np.asarray(genes, dtype=float)
    if g.shape != (scenario.dim,):
        raise EncodingError(f"expected {scenario.dim} genes, got shape {g.shape}")
    path = np.empty((scenario.num_interior_waypoints + 2, 3))
    path[0] = scenario.start
    path[1:-1] = g.reshape(-1, 3)
    path[-1] = scenario.goal
    return path


def scenario_from_dict(data: dict) -> Scenario:
    def need(mapping, key, where=""):
        if key not in mapping:
            raise ScenarioError(where + key, "missing")
        return mapping[key]

    if not isinstance(data, dict):
        raise ScenarioError("<root>", "expected a JSON object")
    b = need(data, "bounds")
    try:
        z_min = float(need(b, "z_min", "bounds."))
        z_max = float(need(b, "z_max", "bounds."))
    except (TypeError, ValueError) as exc:
        raise ScenarioError("bounds", str(exc)) from exc
    bounds = Bounds(_point(need(b, "lower", "bounds."), "bounds.lower"),
                    _point(need(b, "upper", "bounds."), "bounds.upper"), z_min, z_max)
    obstacles = []
    for k, o in enumerate(data.get("obstacles", [])):
        try:
            radius = float(need(o, "safe_radius", f"obstacles[{k}]."))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"obstacles[{k}].safe_radius", str(exc)) from exc
        try:
            obstacles.append(Obstacle(_point(need(o, "center", f"obstacles[{k}]."),
                                             f"obstacles[{k}].center"), radius))
        except ScenarioError as exc:
            raise ScenarioError(f"obstacles[{k}].{exc.field}", str(exc)) from exc
    w = need(data, "num_interior_waypoints")
    if isinstance(w, bool) or not isinstance(w, int):
        raise ScenarioError("num_interior_waypoints", f"expected an integer, got {w!r}")
    return Scenario(bounds, tuple(obstacles),
                    _point(need(data, "start"), "start"),
                    _point(need(data, "goal"), "goal"), w,
                    str(data.get("description", "")))


def load_scenario(path: str | Path) -> Scenario:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError("<file>", f"{path}: not valid JSON ({exc})") from exc
    return scenario_from_dict(data)


def canonical_path() -> Path:
    return Path(__file__).with_name("data") / "canonical.json"


def load_canonical() -> Scenario:
    return load_scenario(canonical_path())
