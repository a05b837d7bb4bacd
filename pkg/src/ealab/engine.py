"""Simulators for the (mu+lambda)-EA, the (1+1)-EA and RLS with strict acceptance.

Individuals are handled as raw ``bytes`` of 0/1 values internally; the public
entry points accept :class:`~ealab.bitcore.BitString` for initial solutions.
Every simulator counts fitness evaluations: ``mu`` for initialisation plus
``lambda`` per generation (one per generation for single-solution methods).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import bitcore
from .bitcore import BitString, TabulatedObjective
from .errors import DomainError, UsageError

__all__ = [
    "ParentSelector",
    "SurvivorSelector",
    "RunOutcome",
    "Problem",
    "resolve_problem",
    "selection_weights",
    "elitist_truncation",
    "run_mu_lambda_ea",
    "generation_step",
    "run_one_plus_one",
    "run_rls_neq",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10**9


class ParentSelector(str, Enum):
    UNIFORM = "uniform-random"
    PROPORTIONAL = "fitness-proportional"
    BEST = "best-only"


class SurvivorSelector(str, Enum):
    ELITIST = "elitist-truncation"
    KEEP_BEST_RANDOM = "uniform-random-keep-best"

    @property
    def deterministic(self) -> bool:
        return self is SurvivorSelector.ELITIST


@dataclass(frozen=True)
class RunOutcome:
    evaluations: int
    generations: int
    hit: bool
    final_best_fitness: float


@dataclass(frozen=True)
class Problem:
    """A fitness function on raw 0/1 bytes together with its optimum value."""

    name: str
    n: int
    fitness: Callable[[bytes], float]
    optimum_value: float


def _onemax_raw(raw: bytes) -> int:
    return raw.count(1)


def _leadingones_raw(raw: bytes) -> int:
    i = raw.find(0)
    return len(raw) if i < 0 else i


_RAW_BUILTINS = {"onemax": _onemax_raw, "leadingones": _leadingones_raw}


def resolve_problem(f, n: int) -> Problem:
    """Turn a builtin name or a :class:`TabulatedObjective` into a :class:`Problem`."""
    if n < 1:
        raise UsageError("n must be positive")
    if isinstance(f, Problem):
        if f.n != n:
            raise UsageError(f"problem has n={f.n}, expected {n}")
        return f
    if isinstance(f, str):
        name = f.lower()
        if name not in _RAW_BUILTINS:
            raise UsageError(f"unknown problem {f!r}; choose from {sorted(_RAW_BUILTINS)}")
        return Problem(name, n, _RAW_BUILTINS[name], n)
    if isinstance(f, TabulatedObjective):
        if f.n != n:
            raise UsageError(f"table has n={f.n}, expected {n}")
        if bitcore.find_unique_optimum(f) is None:
            raise DomainError("objective has no unique global optimum")
        values = f.values
        return Problem(
            "table", n, lambda raw: values[bitcore.key_of_bytes(raw)], max(values)
        )
    raise UsageError(f"unsupported objective {f!r}")


def make_rng(rng) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


def selection_weights(policy, fitnesses: Sequence[float]) -> list:
    """Exact per-member parent-selection probabilities as Fractions.

    Fitness-proportional selection shifts fitnesses by their minimum when any
    value is negative and falls back to uniform when all weights vanish.
    """
    policy = ParentSelector(policy)
    mu = len(fitnesses)
    if policy is ParentSelector.UNIFORM:
        return [Fraction(1, mu)] * mu
    if policy is ParentSelector.BEST:
        best = max(fitnesses)
        winners = [i for i, v in enumerate(fitnesses) if v == best]
        w = Fraction(1, len(winners))
        return [w if v == best else Fraction(0) for v in fitnesses]
    exact = [Fraction(v) for v in fitnesses]
    low = min(exact)
    if low < 0:
        exact = [v - low for v in exact]
    total = sum(exact)
    if total == 0:
        return [Fraction(1, mu)] * mu
    return [v / total for v in exact]


def _sampler(policy: ParentSelector):
    if policy is ParentSelector.UNIFORM:
        return lambda pop, rng: pop[rng.randrange(len(pop))]
    if policy is ParentSelector.BEST:

        def best(pop, rng):
            top = max(f for f, _ in pop)
            return rng.choice([m for m in pop if m[0] == top])

        return best

    def proportional(pop, rng):
        weights = [float(w) for w in selection_weights(policy, [f for f, _ in pop])]
        return rng.choices(pop, weights=weights)[0]

    return proportional


def _ranked(parents, offspring):
    # best first; ties prefer offspring, then the smaller key (bytes order == key order)
    pool = [(-f, 0, raw) for f, raw in offspring]
    pool += [(-f, 1, raw) for f, raw in parents]
    pool.sort()
    return pool


def elitist_truncation(parents, offspring, mu: int) -> list:
    """Keep the ``mu`` best of parents and offspring as ``(fitness, raw)`` pairs."""
    return [(-nf, raw) for nf, _, raw in _ranked(parents, offspring)[:mu]]


def _keep_best_random(parents, offspring, mu, rng):
    ranked = _ranked(parents, offspring)
    kept = [ranked[0]] + rng.sample(ranked[1:], mu - 1)
    return [(-nf, raw) for nf, _, raw in kept]


def _initial(init, count: int, n: int, rng: random.Random) -> list:
    if init is None:
        return [bitcore.bytes_of_key(rng.getrandbits(n), n) for _ in range(count)]
    if isinstance(init, (BitString, str, bytes)):
        init = [init]
    members = [bitcore.as_bytes(s) for s in init]
    if len(members) != count or any(len(m) != n for m in members):
        raise UsageError(f"init must hold {count} bitstrings of length {n}")
    return members


def _flipper(mutation: str):
    if mutation == "fast":
        return bitcore.flip_positions_fast
    if mutation == "reference":
        return bitcore.flip_positions
    raise UsageError("mutation must be 'fast' or 'reference'")


def _mutate(raw: bytes, positions) -> bytes:
    buf = bytearray(raw)
    for i in positions:
        buf[i] ^= 1
    return bytes(buf)


def _generation(pop, n, lam, fit, pick, flips, survivors, rng):
    offspring = []
    for _ in range(lam):
        pf, praw = pick(pop, rng)
        positions = flips(n, rng)
        if positions:
            child = _mutate(praw, positions)
            offspring.append((fit(child), child))
        else:
            offspring.append((pf, praw))
    if survivors is SurvivorSelector.ELITIST:
        return elitist_truncation(pop, offspring, len(pop))
    return _keep_best_random(pop, offspring, len(pop), rng)


def generation_step(
    f,
    population: Sequence[BitString],
    lam: int,
    parents=ParentSelector.UNIFORM,
    survivors=SurvivorSelector.ELITIST,
    rng=None,
    mutation: str = "fast",
) -> list:
    """One generation of the (mu+lambda)-EA; returns the new population sorted by key."""
    population = list(population)
    n = len(population[0])
    problem = resolve_problem(f, n)
    rng = make_rng(rng)
    pop = [(problem.fitness(raw), raw) for raw in _initial(population, len(population), n, rng)]
    new = _generation(
        pop, n, lam, problem.fitness, _sampler(ParentSelector(parents)), _flipper(mutation),
        SurvivorSelector(survivors), rng,
    )
    return sorted((BitString.from_bytes(raw) for _, raw in new), key=lambda b: b.key)


def run_mu_lambda_ea(
    f,
    n: int,
    mu: int,
    lam: int,
    parents=ParentSelector.UNIFORM,
    survivors=SurvivorSelector.ELITIST,
    rng=None,
    budget: int = DEFAULT_BUDGET,
    init=None,
    mutation: str = "fast",
    on_generation: Optional[Callable[[int, list], None]] = None,
) -> RunOutcome:
    """Run the (mu+lambda)-EA until the optimum enters the population.

    Parameters
    ----------
    f : str or TabulatedObjective
        ``"onemax"``, ``"leadingones"`` or a table with a unique optimum.
    n, mu, lam : int
        String length, parent and offspring population sizes.
    parents, survivors : ParentSelector, SurvivorSelector
        Reproduction and replacement policies.
    rng : random.Random or int, optional
        Random stream or seed.
    budget : int
        Maximum number of fitness evaluations.  A generation that would
        exceed it is not started and the run is reported with ``hit=False``.
    init : sequence of BitString, optional
        Initial population; drawn uniformly at random when omitted.
    mutation : {"fast", "reference"}
        Sampler for standard bit mutation; both have the same distribution.
    on_generation : callable, optional
        Called as ``on_generation(t, population)`` after initialisation and
        after every generation, with ``(fitness, raw bytes)`` members.

    Returns
    -------
    RunOutcome
    """
    if mu < 1 or lam < 1:
        raise UsageError("mu and lambda must be positive")
    if budget < mu:
        raise UsageError(f"budget ({budget}) must be at least mu ({mu})")
    problem = resolve_problem(f, n)
    parents = ParentSelector(parents)
    survivors = SurvivorSelector(survivors)
    rng = make_rng(rng)
    flips = _flipper(mutation)
    fit, opt = problem.fitness, problem.optimum_value
    pick = _sampler(parents)

    pop = [(fit(raw), raw) for raw in _initial(init, mu, n, rng)]
    evaluations, generation = mu, 0
    best = max(v for v, _ in pop)
    if on_generation is not None:
        on_generation(0, pop)
    while best != opt and evaluations + lam <= budget:
        pop = _generation(pop, n, lam, fit, pick, flips, survivors, rng)
        evaluations += lam
        generation += 1
        best = max(v for v, _ in pop)
        if on_generation is not None:
            on_generation(generation, pop)
    return RunOutcome(evaluations, generation, best == opt, best)


def run_one_plus_one(
    f,
    n: int,
    rng=None,
    budget: int = DEFAULT_BUDGET,
    init=None,
    strict_acceptance: bool = False,
    mutation: str = "fast",
) -> RunOutcome:
    """(1+1)-EA; offspring replace the parent on ties unless ``strict_acceptance``."""
    if budget < 1:
        raise UsageError("budget must be at least 1")
    problem = resolve_problem(f, n)
    rng = make_rng(rng)
    flips = _flipper(mutation)
    fit, opt = problem.fitness, problem.optimum_value
    (x,) = _initial(init, 1, n, rng)
    fx = fit(x)
    evaluations = 1
    while fx != opt and evaluations < budget:
        evaluations += 1
        positions = flips(n, rng)
        if not positions:
            continue
        y = _mutate(x, positions)
        fy = fit(y)
        if fy > fx or (fy == fx and not strict_acceptance):
            x, fx = y, fy
    return RunOutcome(evaluations, evaluations - 1, fx == opt, fx)


def run_rls_neq(f, n: int, rng=None, budget: int = DEFAULT_BUDGET, init=None) -> RunOutcome:
    """Randomised local search flipping one uniform bit, accepting strict improvements."""
    if budget < 1:
        raise UsageError("budget must be at least 1")
    problem = resolve_problem(f, n)
    rng = make_rng(rng)
    fit, opt = problem.fitness, problem.optimum_value
    (x,) = _initial(init, 1, n, rng)
    fx = fit(x)
    evaluations = 1
    while fx != opt and evaluations < budget:
        evaluations += 1
        y = _mutate(x, (rng.randrange(n),))
        fy = fit(y)
        if fy > fx:
            x, fx = y, fy
    return RunOutcome(evaluations, evaluations - 1, fx == opt, fx)
