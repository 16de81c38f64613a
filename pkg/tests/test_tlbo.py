import math

import numpy as np
import pytest

from conftest import ScriptedRng
from tlbo_planner.benchfn import sphere
from tlbo_planner.cost import CostWeights
from tlbo_planner.scenario import Candidate
from tlbo_planner.tlbo import (OptimizerConfig, Problem, ScalarCost, class_mean, greedy_accept,
                               init_population, learner_phase_step, path_problem,
                               pick_two_others, run, solve, teacher_phase_step, teacher_update,
                               uniform_genes)


def box(dim=3, lo=-10.0, hi=10.0, fn=sphere):
    return Problem(np.full(dim, lo), np.full(dim, hi), fn)


def evaluated(genes, total):
    return Candidate(genes, ScalarCost(total))


class Counting:
    def __init__(self, fn):
        self.fn, self.calls = fn, 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(population_size=3)
    with pytest.raises(ValueError):
        OptimizerConfig(population_size=10, max_fes=5)
    with pytest.raises(ValueError):
        OptimizerConfig(variant="pso")
    with pytest.raises(ValueError):
        OptimizerConfig(learner_style="triple")
    assert OptimizerConfig(variant="MSTLBO").variant == "mstlbo"


def test_uniform_genes_endpoints():
    lo, hi = np.array([1.0, -2.0]), np.array([3.0, 2.0])
    assert uniform_genes([0, 0], lo, hi).tolist() == lo.tolist()
    assert uniform_genes([1, 1], lo, hi).tolist() == hi.tolist()


def test_init_degenerate_axis():
    p = Problem([0.0, 4.0, -1.0], [1.0, 4.0, 1.0], sphere)
    state = init_population(p, OptimizerConfig(population_size=8, max_fes=100))
    assert all(c.genes[1] == 4.0 for c in state.population)


def test_init_population_contract():
    p = box(5)
    cfg = OptimizerConfig(population_size=12, max_fes=100, seed=7)
    a, b = init_population(p, cfg), init_population(p, cfg)
    assert a.fes == 12 and len(a.population) == 12
    assert all(c.evaluated for c in a.population)
    assert a.best.total == min(c.total for c in a.population)
    assert all(np.array_equal(x.genes, y.genes) for x, y in zip(a.population, b.population))
    genes = np.array([c.genes for c in a.population])
    assert np.all(genes >= p.lower) and np.all(genes <= p.upper)


def test_class_mean():
    same = [evaluated([1.0, 2.0, 3.0], 0)] * 4
    assert class_mean(same).tolist() == [1.0, 2.0, 3.0]
    two = [evaluated([0, 0, 0], 0), evaluated([2, 4, 6], 0)]
    assert class_mean(two).tolist() == [1.0, 2.0, 3.0]
    rng = np.random.default_rng(1)
    pop = [evaluated(g, 0) for g in rng.normal(size=(9, 4))]
    perm = [pop[i] for i in rng.permutation(9)]
    assert np.allclose(class_mean(pop), class_mean(perm), rtol=0, atol=1e-15)


def test_teacher_update_by_hand():
    # 2 + 0.5 * (5 - 1 * 3)
    assert teacher_update(2.0, 5.0, 3.0, 1, 0.5) == 3.0


def test_teacher_step_zero_r_and_zero_direction():
    p = box(3)
    a = evaluated([1.0, -2.0, 3.0], 14.0)
    # first draw 0.2 -> T_F = 1, then r = 0 for every gene
    out = teacher_phase_step(a, np.array([5.0, 5, 5]), np.zeros(3), ScriptedRng([0.2, 0, 0, 0]), p)
    assert out.genes.tolist() == a.genes.tolist()
    m = np.array([4.0, 1.0, 0.5])
    out = teacher_phase_step(a, m, m, ScriptedRng([0.1, 0.9, 0.3, 0.7]), p)
    assert out.genes.tolist() == a.genes.tolist()
    assert not out.evaluated


def test_teacher_factor_drawn_from_round_rule():
    p = box(1, -100, 100)
    a = evaluated([0.0], 0.0)
    # draw >= 0.5 rounds 1 + draw to T_F = 2
    out = teacher_phase_step(a, np.array([10.0]), np.array([3.0]), ScriptedRng([0.5, 1.0]), p)
    assert out.genes.tolist() == [10.0 - 2 * 3.0]
    out = teacher_phase_step(a, np.array([10.0]), np.array([3.0]), ScriptedRng([0.49, 1.0]), p)
    assert out.genes.tolist() == [7.0]


def test_learner_step_by_hand():
    p = box(1)
    out = learner_phase_step(evaluated([1.0], 9), evaluated([4.0], 1), evaluated([2.0], 5),
                             ScriptedRng([0.5]), p)
    assert out.genes.tolist() == [2.0]


def test_learner_step_zero_difference_and_symmetry():
    p = box(3)
    rng = np.random.default_rng(0)
    a, m, n = (evaluated(g, c) for g, c in zip(rng.normal(size=(3, 3)), (3.0, 1.0, 2.0)))
    same = learner_phase_step(a, m, evaluated(m.genes, 5.0), rng, p)
    assert same.genes.tolist() == a.genes.tolist()
    draws = list(np.random.default_rng(5).random(3))
    x = learner_phase_step(a, m, n, ScriptedRng(draws), p)
    y = learner_phase_step(a, n, m, ScriptedRng(draws), p)
    assert x.genes.tolist() == y.genes.tolist()


def test_steps_clamp_and_do_not_mutate():
    p = box(2, -1, 1)
    a = evaluated([0.9, -0.9], 1.0)
    before = a.genes.copy()
    out = teacher_phase_step(a, np.array([50.0, -50.0]), np.zeros(2), ScriptedRng([0.1, 1, 1]), p)
    assert out.genes.tolist() == [1.0, -1.0]
    assert np.array_equal(a.genes, before)


def _state(n=4, max_fes=10):
    return init_population(box(2), OptimizerConfig(population_size=n, max_fes=max_fes))


def test_greedy_accept_rules():
    p = box(2)
    state = _state()
    old = evaluated([3.0, 4.0], 25.0)
    better = greedy_accept(old, Candidate([0.0, 1.0]), p, state)
    assert better.total == 1.0 and state.fes == 5
    tie = greedy_accept(old, Candidate([4.0, 3.0]), p, state)
    assert tie is old and state.fes == 6
    state.fes = state.max_fes
    assert greedy_accept(old, Candidate([0.0, 0.0]), p, state) is old
    assert state.fes == state.max_fes and state.exhausted


def test_greedy_accept_updates_best():
    p = box(2)
    state = _state()
    got = greedy_accept(state.population[0], Candidate([0.0, 0.0]), p, state)
    assert state.best is got and got.total == 0.0


def test_pick_two_others():
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(2000):
        i = int(rng.integers(5))
        m, n = pick_two_others(rng, 5, i)
        assert len({i, m, n}) == 3 and 0 <= m < 5 and 0 <= n < 5
        seen.add((i, m, n))
    assert len(seen) == 5 * 4 * 3


def test_best_of_initial_population(line_scenario):
    cfg = OptimizerConfig(population_size=10, max_fes=10, variant="tlbo")
    best, trace = run(line_scenario, cfg, CostWeights((1, 1, 1)), initial_population=[[5, 0, 5]])
    assert best.genes.tolist() == [5.0, 0.0, 5.0] and best.total == 10.0
    assert len(trace) == 1


@pytest.mark.parametrize("variant", ["tlbo", "mstlbo", "random_search"])
def test_run_invariants(variant):
    counter = Counting(sphere)
    p = Problem(np.full(6, -5.0), np.full(6, 5.0), counter)
    cfg = OptimizerConfig(population_size=10, max_fes=997, seed=3, variant=variant)
    state = solve(p, cfg)
    assert state.fes == counter.calls == 997
    best = state.trace.best
    assert np.all(np.diff(best) <= 0)
    assert state.best.total == min(c.total for c in state.population) == best[-1]
    genes = np.array([c.genes for c in state.population])
    assert np.all(genes >= -5) and np.all(genes <= 5)
    assert np.all(np.diff(state.trace.fes) > 0)


@pytest.mark.parametrize("variant", ["tlbo", "mstlbo", "random_search"])
def test_run_deterministic(canonical, variant):
    cfg = OptimizerConfig(population_size=8, max_fes=600, seed=11, variant=variant)
    b1, t1 = run(canonical, cfg)
    b2, t2 = run(canonical, cfg)
    assert t1.records == t2.records
    assert np.array_equal(b1.genes, b2.genes)


def test_tlbo_iteration_uses_2n_evaluations():
    p = box(4)
    state = solve(p, OptimizerConfig(population_size=6, max_fes=6 + 2 * 6 * 3, variant="tlbo"))
    assert state.trace.fes.tolist() == [6, 18, 30, 42]


def test_path_problem_bounds(canonical):
    p = path_problem(canonical)
    lo, hi = canonical.gene_bounds()
    assert np.array_equal(p.lower, lo) and np.array_equal(p.upper, hi)


def test_tlbo_straightens_obstacle_free_path(canonical):
    free = canonical.without_obstacles()
    straight = math.dist(free.start, free.goal)
    for seed in range(5):
        best, _ = run(free, OptimizerConfig(max_fes=20_000, seed=seed, variant="tlbo"))
        assert best.cost.j1 <= 1.05 * straight
