"""Classic teaching-learning-based optimization and the shared run loop.

Random stream order for a run seeded with ``seed`` (numpy PCG64):

1. population init, one ``random((N, D))`` block;
2. MS-TLBO only: the chaos seed value;
3. per outer iteration, the phase draws in candidate order.

Every proposal is clamped to the gene box before it is evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np

from .cost import CostWeights, PathCost
from .scenario import Candidate, Scenario

VARIANTS = ("tlbo", "mstlbo", "random_search")
LEARNER_STYLES = ("pair", "classic")
SUBJECT_LAYOUTS = ("axis", "per_waypoint")


@dataclass(frozen=True)
class OptimizerConfig:
    population_size: int = 30
    max_fes: int = 20_000
    seed: int = 0
    variant: str = "mstlbo"
    # one r per update (per subject for MS-TLBO) instead of one per gene
    scalar_r: bool = False
    subject_layout: str = "axis"
    number_of_subject: int | None = None
    mutation_scale: float = 0.1
    learner_style: str = "pair"

    def __post_init__(self):
        object.__setattr__(self, "variant", str(self.variant).lower())
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.population_size < 4:
            raise ValueError("population_size must be >= 4")
        if self.max_fes < self.population_size:
            raise ValueError("max_fes must be >= population_size")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.learner_style not in LEARNER_STYLES:
            raise ValueError(f"learner_style must be one of {LEARNER_STYLES}")
        if self.subject_layout not in SUBJECT_LAYOUTS:
            raise ValueError(f"subject_layout must be one of {SUBJECT_LAYOUTS}")
        if self.number_of_subject is not None and self.number_of_subject < 1:
            raise ValueError("number_of_subject must be >= 1")
        if not self.mutation_scale >= 0:
            raise ValueError("mutation_scale must be >= 0")

    def replace(self, **changes) -> "OptimizerConfig":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class ScalarCost:
    total: float


class Problem:
    """A box-bounded minimisation problem.

    ``objective`` maps a gene vector to either a float or an object with a
    ``total`` attribute (such as :class:`~tlbo_planner.cost.CostBreakdown`).
    """

    def __init__(self, lower, upper, objective: Callable[[np.ndarray], Any], name: str = ""):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if np.any(self.lower > self.upper):
            raise ValueError("lower must be <= upper")
        self.objective = objective
        self.name = name

    @property
    def dim(self) -> int:
        return self.lower.size

    def clamp(self, genes: np.ndarray) -> np.ndarray:
        return np.minimum(np.maximum(genes, self.lower), self.upper)

    def cost(self, genes: np.ndarray):
        out = self.objective(genes)
        return ScalarCost(float(out)) if isinstance(out, (int, float, np.floating)) else out


def path_problem(scenario: Scenario, weights: CostWeights | None = None) -> Problem:
    lo, hi = scenario.gene_bounds()
    return Problem(lo, hi, PathCost(scenario, weights), name="path")


class TraceRecord(NamedTuple):
    iteration: int
    fes: int
    best_cost: float
    mean_cost: float


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, iteration: int, fes: int, best_cost: float, mean_cost: float):
        self.records.append(TraceRecord(iteration, fes, float(best_cost), float(mean_cost)))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def fes(self) -> np.ndarray:
        return np.array([r.fes for r in self.records])

    @property
    def best(self) -> np.ndarray:
        return np.array([r.best_cost for r in self.records])


@dataclass
class OptimizerState:
    population: list[Candidate]
    best: Candidate
    fes: int
    max_fes: int
    rng: np.random.Generator
    chaos: Any = None
    trace: ConvergenceTrace = field(default_factory=ConvergenceTrace)
    iteration: int = 0

    @property
    def exhausted(self) -> bool:
        return self.fes >= self.max_fes

    def evaluate(self, problem: Problem, genes) -> Candidate | None:
        """Evaluate ``genes`` and charge one FES; ``None`` once the budget is spent."""
        if self.exhausted:
            return None
        self.fes += 1
        return Candidate(genes, problem.cost(genes))

    def consider(self, candidate: Candidate):
        if candidate.total < self.best.total:
            self.best = candidate

    def record(self):
        totals = [c.total for c in self.population]
        self.trace.append(self.iteration, self.fes, self.best.total, float(np.mean(totals)))


def uniform_genes(u, lower, upper) -> np.ndarray:
    """Map unit draws onto the box: ``u * (upper - lower) + lower``."""
    lower = np.asarray(lower, dtype=float)
    return np.asarray(u, dtype=float) * (np.asarray(upper, dtype=float) - lower) + lower


def init_population(problem: Problem, config: OptimizerConfig,
                    initial: Sequence[Sequence[float]] | None = None,
                    rng: np.random.Generator | None = None) -> OptimizerState:
    """Draw and evaluate ``N`` uniform candidates.

    Rows of ``initial`` (if given) replace the first drawn rows; the draw
    itself still happens so the random stream does not depend on ``initial``.
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    n = config.population_size
    genes = uniform_genes(rng.random((n, problem.dim)), problem.lower, problem.upper)
    if initial is not None:
        seeded = np.asarray(initial, dtype=float).reshape(-1, problem.dim)
        if len(seeded) > n:
            raise ValueError("more initial candidates than population_size")
        genes[: len(seeded)] = problem.clamp(seeded)
    population = [Candidate(g, problem.cost(g)) for g in genes]
    best = min(population, key=lambda c: c.total)
    state = OptimizerState(population, best, n, config.max_fes, rng)
    state.record()
    return state


def class_mean(population: Sequence[Candidate]) -> np.ndarray:
    return np.mean([c.genes for c in population], axis=0)


def teacher_update(genes, teacher, mean, teaching_factor, r) -> np.ndarray:
    return genes + r * (teacher - teaching_factor * mean)


def teacher_phase_step(candidate: Candidate, teacher, mean, rng: np.random.Generator,
                       problem: Problem, scalar_r: bool = False) -> Candidate:
    """Pull a learner toward the teacher and away from the class mean."""
    a = candidate.genes
    t = getattr(teacher, "genes", teacher)
    tf = 1 + int(rng.random() >= 0.5)
    r = rng.random() if scalar_r else rng.random(a.size)
    return Candidate(problem.clamp(teacher_update(a, t, mean, tf, r)))


def learner_phase_step(candidate: Candidate, m: Candidate, n: Candidate,
                       rng: np.random.Generator, problem: Problem,
                       scalar_r: bool = False) -> Candidate:
    """Step along the difference between two classmates, toward the better one."""
    a = candidate.genes
    r = rng.random() if scalar_r else rng.random(a.size)
    if m.total < n.total:
        new = a + r * (m.genes - n.genes)
    else:
        new = a + r * (n.genes - m.genes)
    return Candidate(problem.clamp(new))


def pick_two_others(rng: np.random.Generator, n_pop: int, i: int) -> tuple[int, int]:
    """Two distinct indices, both different from ``i``, uniformly at random."""
    m = int(rng.random() * (n_pop - 1))
    m += m >= i
    n = int(rng.random() * (n_pop - 2))
    for taken in sorted((i, m)):
        n += n >= taken
    return m, n


def greedy_accept(old: Candidate, proposed: Candidate, problem: Problem,
                  state: OptimizerState) -> Candidate:
    """Keep ``proposed`` only on strict improvement.

    With the budget spent the proposal is not evaluated and ``old`` comes
    back; callers detect termination through ``state.exhausted``.
    """
    trial = state.evaluate(problem, proposed.genes)
    if trial is None or not trial.total < old.total:
        return old
    state.consider(trial)
    return trial


def tlbo_iteration(state: OptimizerState, problem: Problem, config: OptimizerConfig) -> OptimizerState:
    pop = state.population
    mean = class_mean(pop)
    for i in range(len(pop)):
        if state.exhausted:
            break
        proposed = teacher_phase_step(pop[i], state.best, mean, state.rng, problem, config.scalar_r)
        pop[i] = greedy_accept(pop[i], proposed, problem, state)
    for i in range(len(pop)):
        if state.exhausted:
            break
        m, n = pick_two_others(state.rng, len(pop), i)
        proposed = learner_phase_step(pop[i], pop[m], pop[n], state.rng, problem, config.scalar_r)
        pop[i] = greedy_accept(pop[i], proposed, problem, state)
    state.iteration += 1
    state.record()
    return state


def random_search_iteration(state: OptimizerState, problem: Problem,
                            config: OptimizerConfig) -> OptimizerState:
    """``N`` fresh uniform samples, each replacing the worst member if better."""
    pop = state.population
    for _ in range(len(pop)):
        trial = state.evaluate(problem, uniform_genes(state.rng.random(problem.dim),
                                                      problem.lower, problem.upper))
        if trial is None:
            break
        worst = max(range(len(pop)), key=lambda j: pop[j].total)
        if trial.total < pop[worst].total:
            pop[worst] = trial
            state.consider(trial)
    state.iteration += 1
    state.record()
    return state


def solve(problem: Problem | Scenario, config: OptimizerConfig,
          weights: CostWeights | None = None,
          initial_population: Sequence[Sequence[float]] | None = None) -> OptimizerState:
    """Run one optimisation to budget exhaustion and return the final state."""
    from . import mstlbo

    if isinstance(problem, Scenario):
        problem = path_problem(problem, weights)
    state = init_population(problem, config, initial_population)
    if config.variant == "mstlbo":
        state.chaos = mstlbo.init_chaos(state.rng)
        layout = mstlbo.SubjectLayout.from_config(config, problem.dim)
        step = lambda: mstlbo.mstlbo_iteration(state, problem, config, layout)
    elif config.variant == "tlbo":
        step = lambda: tlbo_iteration(state, problem, config)
    else:
        step = lambda: random_search_iteration(state, problem, config)
    while not state.exhausted:
        step()
    return state


def run(problem: Problem | Scenario, config: OptimizerConfig,
        weights: CostWeights | None = None,
        initial_population: Sequence[Sequence[float]] | None = None
        ) -> tuple[Candidate, ConvergenceTrace]:
    state = solve(problem, config, weights, initial_population)
    return state.best, state.trace
