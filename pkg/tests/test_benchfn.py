import numpy as np
import pytest

from tlbo_planner.benchfn import available, get_benchfn, rastrigin, sphere
from tlbo_planner.harness import run_benchfn
from tlbo_planner.tlbo import OptimizerConfig


def test_known_values():
    assert sphere(np.zeros(10)) == 0.0
    assert rastrigin(np.zeros(10)) == 0.0
    assert sphere([1.0, 2.0]) == 5.0
    # cos(2 pi) = 1 at integer points: 10*2 + (1 - 10) + (4 - 10)
    assert rastrigin([1.0, 2.0]) == pytest.approx(5.0, abs=1e-12)


def test_registry():
    assert available() == ["rastrigin", "sphere"]
    f = get_benchfn("Sphere", 10)
    assert (f.name, f.dim, f.optimum_value) == ("sphere", 10, 0.0)
    with pytest.raises(ValueError):
        get_benchfn("ackley", 10)
    with pytest.raises(ValueError):
        get_benchfn("sphere", 1)


@pytest.mark.parametrize("variant", ["tlbo", "mstlbo", "random_search"])
def test_origin_in_population_is_found_immediately(variant):
    trace = run_benchfn("sphere", variant, OptimizerConfig(max_fes=300), dim=10,
                        initial_population=[np.zeros(10)])
    assert trace[0].best_cost == 0.0 and trace[-1].best_cost == 0.0


def test_optimizer_makes_progress_on_sphere():
    trace = run_benchfn("sphere", "mstlbo", OptimizerConfig(max_fes=3000, seed=1), dim=5)
    assert trace[-1].best_cost < 1e-3 * trace[0].best_cost
