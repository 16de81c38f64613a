"""Multi-subject TLBO.

The classic teacher phase is replaced by a single chaotic local search
around the teacher whose result can evict the worst learner. The learner
phase then works subject by subject, where a subject is a fixed slice of
the gene vector (by default all x, all y and all z coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Candidate
from .tlbo import (OptimizerConfig, OptimizerState, Problem, greedy_accept,
                   pick_two_others)

_FIXED_POINTS = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class ChaosState:
    x: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"chaos value must lie in [0, 1], got {self.x}")


def chaos_step(state: ChaosState) -> ChaosState:
    """One step of the logistic map at r = 4."""
    return ChaosState(4.0 * state.x * (1.0 - state.x))


def init_chaos(rng: np.random.Generator) -> ChaosState:
    """Seed value in (0.01, 0.99), away from points that collapse the orbit.

    0.25 and 0.75 land on the fixed point 0.75; 0.5 maps to 1 and then 0.
    """
    while True:
        x = 0.01 + 0.98 * rng.random()
        if all(abs(x - p) > 1e-6 for p in _FIXED_POINTS):
            return ChaosState(x)


def mutation_probability(fes: int, max_fes: int) -> float:
    return 1.0 - fes / max_fes


def mutation_offset(chaos: ChaosState) -> float:
    return 2.0 * chaos.x - 1.0


def mutate_teacher(teacher: Candidate, chaos: ChaosState, fes: int, max_fes: int,
                   rng: np.random.Generator, problem: Problem,
                   scale: float = 0.1) -> tuple[Candidate, ChaosState]:
    """Chaotic perturbation of the teacher.

    Each gene mutates with probability ``1 - fes/max_fes``. A mutated gene
    moves by ``(2x - 1) * scale * (upper - lower)`` using the current chaos
    value ``x``, after which the map advances. One uniform draw per gene is
    always taken, so the stream length does not depend on the probability.

    Returns the unevaluated proposal and the advanced chaos state.
    """
    prob = mutation_probability(fes, max_fes)
    hits = rng.random(teacher.genes.size) < prob
    genes = teacher.genes.copy()
    span = problem.upper - problem.lower
    for k in np.flatnonzero(hits):
        genes[k] += mutation_offset(chaos) * scale * span[k]
        chaos = chaos_step(chaos)
    return Candidate(problem.clamp(genes)), chaos


def worst_index(population) -> int:
    return max(range(len(population)), key=lambda j: population[j].total)


def elite_replace_worst(population: list[Candidate], proposed: Candidate, problem: Problem,
                        state: OptimizerState) -> list[Candidate]:
    """Evaluate ``proposed``; it replaces the worst learner on strict improvement."""
    trial = state.evaluate(problem, proposed.genes)
    if trial is None:
        return population
    w = worst_index(population)
    if trial.total < population[w].total:
        population[w] = trial
        state.consider(trial)
    return population


@dataclass(frozen=True, eq=False)
class SubjectLayout:
    """Partition of gene indices into subjects."""

    slices: tuple[np.ndarray, ...]

    def __post_init__(self):
        slices = tuple(np.asarray(s, dtype=int) for s in self.slices)
        if not slices or any(s.size == 0 for s in slices):
            raise ValueError("a layout needs at least one subject and no empty subjects")
        flat = np.sort(np.concatenate(slices))
        if not np.array_equal(flat, np.arange(flat.size)):
            raise ValueError("subjects must cover every gene index exactly once")
        object.__setattr__(self, "slices", slices)
        # draw k (subjects visited in order, genes in slice order) lands on gene order[k]
        order = np.concatenate(slices)
        object.__setattr__(self, "_draw_of_gene", np.argsort(order, kind="stable"))
        object.__setattr__(self, "_subject_of_gene",
                           np.concatenate([np.full(s.size, j) for j, s in enumerate(slices)])[
                               self._draw_of_gene])

    def spread(self, r: np.ndarray) -> np.ndarray:
        """Route draws to genes: one per subject (``len(r) == S``) or one per gene."""
        if r.size == len(self.slices):
            return r[self._subject_of_gene]
        return r[self._draw_of_gene]

    def __len__(self):
        return len(self.slices)

    @property
    def dim(self) -> int:
        return sum(s.size for s in self.slices)

    @classmethod
    def axis(cls, dim: int, n_subjects: int = 3) -> "SubjectLayout":
        """Strided subjects: gene ``k`` belongs to subject ``k % n_subjects``."""
        return cls(tuple(np.arange(j, dim, n_subjects) for j in range(min(n_subjects, dim))))

    @classmethod
    def per_waypoint(cls, dim: int, n_subjects: int | None = None) -> "SubjectLayout":
        """Contiguous subjects; by default one per 3D waypoint."""
        if n_subjects is None:
            n_subjects = max(dim // 3, 1)
        return cls(tuple(np.array_split(np.arange(dim), min(n_subjects, dim))))

    @classmethod
    def from_config(cls, config: OptimizerConfig, dim: int) -> "SubjectLayout":
        if config.subject_layout == "axis":
            return cls.axis(dim, config.number_of_subject or 3)
        return cls.per_waypoint(dim, config.number_of_subject)


def multi_subject_learner_step(candidate: Candidate, partner: Candidate, layout: SubjectLayout,
                               rng: np.random.Generator, problem: Problem,
                               scalar_r: bool = False, costs: tuple[float, float] | None = None,
                               reference: tuple[Candidate, Candidate] | None = None) -> Candidate:
    """Per-subject learner update of ``candidate``.

    With ``reference=None`` the update for each subject slice is
    ``a + r * (a - b)`` when the candidate beats its partner, else
    ``a + r * (b - a)``. Passing ``reference=(m, n)`` instead steps along
    ``m - n`` (or ``n - m``) as in the classic learner phase; ``costs`` then
    refers to ``(m, n)``. The branch is chosen once from whole-candidate
    costs. ``r`` is drawn per gene, or once per subject with ``scalar_r``.
    """
    first, second = (candidate, partner) if reference is None else reference
    if costs is None:
        costs = (first.total, second.total)
    r = layout.spread(rng.random(len(layout) if scalar_r else layout.dim))
    if costs[0] < costs[1]:
        new = candidate.genes + r * (first.genes - second.genes)
    else:
        new = candidate.genes + r * (second.genes - first.genes)
    return Candidate(problem.clamp(new))


def _pick_partner(rng: np.random.Generator, n_pop: int, i: int) -> int:
    k = int(rng.random() * (n_pop - 1))
    return k + (k >= i)


def mstlbo_iteration(state: OptimizerState, problem: Problem, config: OptimizerConfig,
                     layout: SubjectLayout | None = None) -> OptimizerState:
    """One outer iteration: chaos update, elite probe, multi-subject learner phase.

    Consumes at most ``1 + N`` evaluations.
    """
    if layout is None:
        layout = SubjectLayout.from_config(config, problem.dim)
    pop = state.population
    state.chaos = chaos_step(state.chaos)
    if not state.exhausted:
        proposed, state.chaos = mutate_teacher(state.best, state.chaos, state.fes, state.max_fes,
                                               state.rng, problem, config.mutation_scale)
        elite_replace_worst(pop, proposed, problem, state)
    for i in range(len(pop)):
        if state.exhausted:
            break
        if config.learner_style == "classic":
            m, n = pick_two_others(state.rng, len(pop), i)
            proposed = multi_subject_learner_step(pop[i], pop[m], layout, state.rng, problem,
                                                  config.scalar_r, reference=(pop[m], pop[n]))
        else:
            k = _pick_partner(state.rng, len(pop), i)
            proposed = multi_subject_learner_step(pop[i], pop[k], layout, state.rng, problem,
                                                  config.scalar_r)
        pop[i] = greedy_accept(pop[i], proposed, problem, state)
    state.iteration += 1
    state.record()
    return state
