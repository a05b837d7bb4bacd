"""Trial orchestration: repeated runs, scaling tables and population comparisons.

Trial ``i`` always runs with seed ``base_seed XOR splitmix64(i)``, so results
do not depend on how trials are distributed over worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .. import engine
from ..bitcore import TabulatedObjective
from ..engine import ParentSelector, RunOutcome, SurvivorSelector
from ..errors import UsageError
from .stats import TrialStats

CSV_COLUMNS = (
    "algorithm",
    "problem",
    "n",
    "mu",
    "lambda",
    "seed",
    "trial",
    "evaluations",
    "generations",
    "hit",
)
ALGORITHMS = ("mu-lambda-ea", "one-plus-one", "rls")
MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(base_seed: int, trial: int) -> int:
    return (base_seed ^ splitmix64(trial)) & MASK64


@dataclass(frozen=True)
class ExperimentSpec:
    algorithm: str = "one-plus-one"
    problem: Union[str, TabulatedObjective] = "onemax"
    n: tuple = (10,)
    mu: int = 1
    lam: int = 1
    parents: str = ParentSelector.UNIFORM.value
    survivors: str = SurvivorSelector.ELITIST.value
    trials: int = 300
    seed: int = 0
    budget: int = engine.DEFAULT_BUDGET
    out: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        n = (self.n,) if isinstance(self.n, int) else tuple(self.n)
        object.__setattr__(self, "n", n)
        self.validate()

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise UsageError(f"algorithm: must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.trials < 1:
            raise UsageError("trials: must be at least 1")
        if not self.n or any(v < 1 for v in self.n):
            raise UsageError("n: every value must be at least 1")
        if self.mu < 1 or self.lam < 1:
            raise UsageError("mu/lambda: must be positive")
        if self.budget < self.mu:
            raise UsageError("budget: must be at least mu")
        if self.workers < 1:
            raise UsageError("workers: must be at least 1")
        ParentSelector(self.parents)
        SurvivorSelector(self.survivors)

    @property
    def problem_name(self) -> str:
        return self.problem if isinstance(self.problem, str) else "table"

    def effective_mu_lambda(self):
        if self.algorithm == "mu-lambda-ea":
            return self.mu, self.lam
        return 1, 1


def run_single(spec: ExperimentSpec, n: int, trial: int) -> RunOutcome:
    seed = trial_seed(spec.seed, trial)
    if spec.algorithm == "mu-lambda-ea":
        return engine.run_mu_lambda_ea(
            spec.problem, n, spec.mu, spec.lam, spec.parents, spec.survivors, seed, spec.budget
        )
    if spec.algorithm == "one-plus-one":
        return engine.run_one_plus_one(spec.problem, n, seed, spec.budget)
    return engine.run_rls_neq(spec.problem, n, seed, spec.budget)


def _run_chunk(args):
    spec, n, trials = args
    return [run_single(spec, n, t) for t in trials]


def _outcomes(spec: ExperimentSpec, n: int) -> list:
    if spec.workers == 1:
        return [run_single(spec, n, t) for t in range(spec.trials)]
    chunks = [list(range(w, spec.trials, spec.workers)) for w in range(spec.workers)]
    out = [None] * spec.trials
    with ProcessPoolExecutor(spec.workers) as pool:
        for idx, results in zip(chunks, pool.map(_run_chunk, [(spec, n, c) for c in chunks])):
            for t, r in zip(idx, results):
                out[t] = r
    return out


@dataclass
class TrialBatch:
    spec: ExperimentSpec
    stats: dict = field(default_factory=dict)
    outcomes: dict = field(default_factory=dict)

    def rows(self) -> list:
        mu, lam = self.spec.effective_mu_lambda()
        rows = []
        for n, runs in self.outcomes.items():
            for t, o in enumerate(runs):
                rows.append(
                    {
                        "algorithm": self.spec.algorithm,
                        "problem": self.spec.problem_name,
                        "n": n,
                        "mu": mu,
                        "lambda": lam,
                        "seed": trial_seed(self.spec.seed, t),
                        "trial": t,
                        "evaluations": o.evaluations,
                        "generations": o.generations,
                        "hit": int(o.hit),
                    }
                )
            st = self.stats[n]
            gens = TrialStats.from_outcomes(runs, "generations")
            rows.append(
                {
                    "algorithm": self.spec.algorithm,
                    "problem": self.spec.problem_name,
                    "n": n,
                    "mu": mu,
                    "lambda": lam,
                    "seed": self.spec.seed,
                    "trial": "mean",
                    "evaluations": "" if st.mean is None else repr(st.mean),
                    "generations": "" if gens.mean is None else repr(gens.mean),
                    "hit": st.count,
                }
            )
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())
        return buf.getvalue()


def run_trials(spec: ExperimentSpec) -> TrialBatch:
    """Run ``spec.trials`` independent runs for every ``n`` in the spec."""
    batch = TrialBatch(spec)
    for n in spec.n:
        runs = _outcomes(spec, n)
        batch.outcomes[n] = runs
        batch.stats[n] = TrialStats.from_outcomes(runs)
    if spec.out:
        Path(spec.out).write_text(batch.to_csv())
    return batch


SCALING_MODELS = {
    "nlogn": lambda n: n * math.log(n),
    "n2": lambda n: float(n * n),
}


@dataclass
class ScalingTable:
    model: str
    rows: list  # (n, mean, ratio)

    @property
    def spread(self) -> float:
        ratios = [r for _, _, r in self.rows]
        return max(ratios) / min(ratios)

    def to_csv(self) -> str:
        lines = ["n,mean_evaluations,ratio"]
        lines += [f"{n},{m!r},{r!r}" for n, m, r in self.rows]
        lines.append(f"# model={self.model} spread={self.spread!r}")
        return "\n".join(lines) + "\n"


def scaling_experiment(
    spec: ExperimentSpec, model: Union[str, Callable[[int], float]] = "nlogn"
) -> ScalingTable:
    """Mean evaluations divided by ``g(n)`` for each n; reports the max/min spread."""
    if len(spec.n) < 3:
        raise UsageError("n: a scaling experiment needs at least 3 values")
    if callable(model):
        g, label = model, getattr(model, "__name__", "custom")
    else:
        if model not in SCALING_MODELS:
            raise UsageError(f"model: choose from {sorted(SCALING_MODELS)}")
        g, label = SCALING_MODELS[model], model
    batch = run_trials(replace(spec, out=None))
    rows = []
    for n in spec.n:
        mean = batch.stats[n].mean
        rows.append((n, mean, mean / g(n) if mean is not None else math.nan))
    table = ScalingTable(label, rows)
    if spec.out:
        Path(spec.out).write_text(table.to_csv())
    return table


@dataclass
class SlowdownCell:
    mu: int
    lam: int
    stats: TrialStats
    low: float
    high: float
    slower: bool


@dataclass
class SlowdownTable:
    n: int
    problem: str
    z: float
    cells: list

    def cell(self, mu: int, lam: int) -> SlowdownCell:
        return next(c for c in self.cells if (c.mu, c.lam) == (mu, lam))

    def to_csv(self) -> str:
        lines = ["mu,lambda,mean_evaluations,sd,low,high,median,timeouts,slower_than_1_1"]
        for c in self.cells:
            s = c.stats
            lines.append(
                f"{c.mu},{c.lam},{s.mean!r},{s.sd!r},{c.low!r},{c.high!r},"
                f"{s.median!r},{s.timeouts},{int(c.slower)}"
            )
        lines.append(f"# n={self.n} problem={self.problem} z={self.z}")
        return "\n".join(lines) + "\n"


def slowdown_experiment(
    n: int,
    grid: Sequence[tuple],
    problem="onemax",
    trials: int = 300,
    seed: int = 0,
    z: float = 3.0,
    parents=ParentSelector.UNIFORM.value,
    survivors=SurvivorSelector.ELITIST.value,
    budget: int = engine.DEFAULT_BUDGET,
    workers: int = 1,
    out: Optional[str] = None,
) -> SlowdownTable:
    """Mean evaluations per ``(mu, lambda)`` cell against the (1+1) cell.

    A cell is flagged slower when its ``mean +- z * se`` interval lies
    strictly above the (1+1) cell's interval.
    """
    grid = [tuple(g) for g in grid]
    if (1, 1) not in grid:
        raise UsageError("grid: must include (1, 1)")
    stats = {}
    for mu, lam in grid:
        spec = ExperimentSpec(
            "mu-lambda-ea", problem, (n,), mu, lam, parents, survivors, trials, seed, budget,
            None, workers,
        )
        stats[(mu, lam)] = run_trials(spec).stats[n]
    base = stats[(1, 1)].interval(z)
    cells = []
    for mu, lam in grid:
        st = stats[(mu, lam)]
        iv = st.interval(z) or (math.nan, math.nan)
        slower = (mu, lam) != (1, 1) and base is not None and iv[0] > base[1]
        cells.append(SlowdownCell(mu, lam, st, iv[0], iv[1], bool(slower)))
    name = problem if isinstance(problem, str) else "table"
    table = SlowdownTable(n, name, z, cells)
    if out:
        Path(out).write_text(table.to_csv())
    return table
