"""Analytic test functions for checking the optimizers away from path costs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .tlbo import Problem


def sphere(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.dot(x, x))


def rastrigin(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


@dataclass(frozen=True)
class BenchFunction:
    name: str
    dim: int
    lower: float
    upper: float
    optimum_value: float
    fn: Callable[[np.ndarray], float]

    def problem(self) -> Problem:
        return Problem(np.full(self.dim, self.lower), np.full(self.dim, self.upper),
                       self.fn, name=self.name)


# name -> (function, symmetric half-width of the search box)
_REGISTRY = {
    "sphere": (sphere, 100.0),
    "rastrigin": (rastrigin, 5.12),
}


def available() -> list[str]:
    return sorted(_REGISTRY)


def get_benchfn(name: str, dim: int) -> BenchFunction:
    try:
        fn, half = _REGISTRY[name.lower()]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; choose from {available()}") from None
    if dim < 2:
        raise ValueError("benchmark dimension must be >= 2")
    return BenchFunction(name.lower(), dim, -half, half, 0.0, fn)
