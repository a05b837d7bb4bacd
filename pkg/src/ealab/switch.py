"""Switch analysis: compare the hitting time of a target chain with a reference chain.

Given a mapping from target states to reference states, both sides of the
one-step comparison condition are evaluated exactly for every generation,
their difference accumulated into a gap series, and the resulting bound
checked against the target chain's exact DCFHT.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from . import bounds, markov
from .bitcore import BitString, TabulatedObjective
from .engine import ParentSelector, SurvivorSelector
from .errors import DomainError, ResourceError, UsageError
from .markov import TransitionModel

__all__ = [
    "Alignment",
    "AlignedMapping",
    "SwitchReport",
    "classify_alignment",
    "best_solution_mapping",
    "pushforward",
    "eq1_lhs",
    "eq1_rhs",
    "rho_series",
    "proof_rho_t",
    "improvement_prob_p",
    "leadingones_reference",
    "population_comparison",
]


class Alignment(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    OPTIMAL = "optimal"
    NEITHER = "neither"

    @property
    def is_left(self) -> bool:
        return self in (Alignment.LEFT, Alignment.OPTIMAL)

    @property
    def is_right(self) -> bool:
        return self in (Alignment.RIGHT, Alignment.OPTIMAL)


def classify_alignment(mapping: Mapping, target_optima, reference_optima) -> Alignment:
    """Alignment class of ``mapping`` (a dict over every target state).

    Left-aligned maps every optimal target state to a reference optimum;
    right-aligned maps every non-optimal target state outside the reference
    optima; optimal-aligned is both.
    """
    target_optima = set(target_optima)
    reference_optima = set(reference_optima)
    left = all(mapping[x] in reference_optima for x in mapping if x in target_optima)
    right = all(mapping[x] not in reference_optima for x in mapping if x not in target_optima)
    if left and right:
        return Alignment.OPTIMAL
    if left:
        return Alignment.LEFT
    if right:
        return Alignment.RIGHT
    return Alignment.NEITHER


def best_solution_mapping(x: Sequence[BitString]) -> BitString:
    """Member with the most one-bits; ties go to the smallest key."""
    if not x:
        raise UsageError("population must be non-empty")
    return min(x, key=lambda y: (-y.ones, y.key))


@dataclass(frozen=True)
class AlignedMapping:
    """State map between two models, stored as reference indices per target index."""

    image: tuple
    alignment: Alignment

    @classmethod
    def from_function(
        cls, target: TransitionModel, reference: TransitionModel, phi: Callable
    ) -> "AlignedMapping":
        try:
            image = tuple(reference.index[phi(s)] for s in target.states)
        except KeyError as exc:
            raise DomainError(f"mapping leaves the reference state space: {exc}") from None
        as_dict = {i: j for i, j in enumerate(image)}
        return cls(image, classify_alignment(as_dict, target.targets, reference.targets))

    @classmethod
    def identity(cls, model: TransitionModel) -> "AlignedMapping":
        return cls(tuple(range(model.size)), Alignment.OPTIMAL)


def pushforward(pi: Sequence, mapping: AlignedMapping, reference_size: int, exact=True) -> list:
    """Reference-side distribution ``pi_phi(u) = pi(phi^-1(u))``."""
    out = [Fraction(0) if exact else 0.0] * reference_size
    for i, p in enumerate(pi):
        if p:
            out[mapping.image[i]] += p
    return out


def eq1_lhs(target: TransitionModel, pi_t: Sequence, mapping: AlignedMapping, reference_cfht):
    """Expected reference CFHT of the mapped successor of a ``pi_t`` draw."""
    total = 0
    for x, px in enumerate(pi_t):
        if not px:
            continue
        inner = 0
        for succ, p in target.rows[x].items():
            inner += p * reference_cfht[mapping.image[succ]]
        total += px * inner
    return total


def eq1_rhs(reference: TransitionModel, pi_phi_t: Sequence, reference_cfht):
    """Expected reference CFHT after one reference step from ``pi_phi_t``."""
    total = 0
    for u, pu in enumerate(pi_phi_t):
        if not pu:
            continue
        inner = 0
        for y, p in reference.rows[u].items():
            inner += p * reference_cfht[y]
        total += pu * inner
    return total


@dataclass
class SwitchReport:
    """Outcome of one switch-analysis comparison.

    ``composed_bound`` is ``reference_dcfht + rho``.  The gap series is
    truncated once the non-absorbed target mass drops to ``tail_eps``; the
    omitted tail of ``rho`` is at most ``tail_slack`` in absolute value, and
    ``verdict`` checks the comparison inequality against
    ``exact_target_dcfht`` after allowing for that slack.
    """

    rho_t: list
    lhs: list
    rhs: list
    residual: list
    rho: object
    reference_dcfht: object
    composed_bound: object
    direction: str
    exact_target_dcfht: object
    tail_mass: object
    tail_slack: object
    certified: bool
    verdict: bool
    claimed_rho_t: list = field(default_factory=list)
    claimed_holds: Optional[bool] = None
    claimed_bound: object = None

    @property
    def horizon(self) -> int:
        return len(self.rho_t) - 1

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("t,lhs,rhs,rho_t,cumulative_rho\n")
        running = 0
        for t, (a, b, r) in enumerate(zip(self.lhs, self.rhs, self.rho_t)):
            running += r
            out.write(f"{t},{float(a)!r},{float(b)!r},{float(r)!r},{float(running)!r}\n")
        out.write(
            f"# summary direction={self.direction} reference_dcfht={float(self.reference_dcfht)!r} "
            f"rho={float(self.rho)!r} composed_bound={float(self.composed_bound)!r} "
            f"exact_target_dcfht={float(self.exact_target_dcfht)!r} "
            f"tail_mass={float(self.tail_mass)!r} certified={self.certified} "
            f"verdict={self.verdict}\n"
        )
        return out.getvalue()


def rho_series(
    target: TransitionModel,
    reference: TransitionModel,
    mapping: AlignedMapping,
    pi0: Optional[Sequence] = None,
    horizon: int = 100_000,
    tail_eps=None,
    direction: str = "lower",
    claimed_rho: Optional[Callable[[int, object], object]] = None,
) -> SwitchReport:
    """Evaluate the per-step gap ``rho_t = lhs_t - rhs_t`` and compose the bound.

    Parameters
    ----------
    target, reference : TransitionModel
        Absorbing chains; the same arithmetic mode is required.
    mapping : AlignedMapping
        Must be left- or right-aligned.
    pi0 : sequence, optional
        Start distribution of the target chain (default ``target.initial``).
    horizon : int
        Largest ``t`` evaluated.
    tail_eps : number, optional
        Stop once ``1 - pi_t(targets) <= tail_eps``.  Defaults to 1e-12 in
        exact mode and 1e-9 in float mode.
    direction : {"lower", "upper"}
    claimed_rho : callable, optional
        ``claimed_rho(t, target_mass_t)``; when given, every step is checked
        for ``lhs_t - rhs_t >= claimed`` (``<=`` for upper bounds) and the
        claimed values are summed up to the horizon.

    Raises
    ------
    ResourceError
        If the non-absorbed mass is still above ``tail_eps`` at ``horizon``.
    """
    if direction not in ("lower", "upper"):
        raise UsageError("direction must be 'lower' or 'upper'")
    if target.exact != reference.exact:
        raise UsageError("target and reference must use the same arithmetic mode")
    if not (markov.is_absorbing(target) and markov.is_absorbing(reference)):
        raise UsageError("both chains must be absorbing")
    if mapping.alignment is Alignment.NEITHER:
        raise DomainError("mapping is neither left- nor right-aligned")
    exact = target.exact
    if tail_eps is None:
        tail_eps = Fraction(1, 10**12) if exact else 1e-9
    elif exact:
        tail_eps = Fraction(str(tail_eps)) if isinstance(tail_eps, float) else Fraction(tail_eps)
    if pi0 is None:
        pi0 = target.initial

    ref_cfht = markov.solve_cfht(reference).cfht
    target_report = markov.solve_cfht(target, pi0)
    exact_dcfht = target_report.dcfht

    pi = list(pi0)
    lhs_s, rhs_s, rho_s, res_s, claimed = [], [], [], [], []
    claimed_ok = True
    for t in range(horizon + 1):
        if t:
            pi = markov.step_distribution(target, pi)
        mass = markov.target_mass(target, pi)
        residual = markov.nontarget_mass(target, pi)
        pi_phi = pushforward(pi, mapping, reference.size, exact)
        lhs = eq1_lhs(target, pi, mapping, ref_cfht)
        rhs = eq1_rhs(reference, pi_phi, ref_cfht)
        gap = lhs - rhs
        lhs_s.append(lhs)
        rhs_s.append(rhs)
        rho_s.append(gap)
        res_s.append(residual)
        if claimed_rho is not None:
            c = claimed_rho(t, mass)
            claimed.append(c)
            if (direction == "lower" and gap < c) or (direction == "upper" and gap > c):
                claimed_ok = False
        if residual <= tail_eps:
            break
    else:
        raise ResourceError(
            f"non-absorbed mass {float(res_s[-1]):.3g} exceeds tail_eps at horizon {horizon}; "
            "increase the horizon"
        )

    rho = sum(rho_s)
    pi0_phi = pushforward(pi0, mapping, reference.size, exact)
    ref_dcfht = sum(p * e for p, e in zip(pi0_phi, ref_cfht))
    composed = ref_dcfht + rho

    # sum_{t > T} (1 - pi_t) is known exactly from the solved target chain
    tail_sum = exact_dcfht - sum(res_s)
    if tail_sum < 0:
        tail_sum = 0 * tail_sum
    certified = mapping.alignment.is_left
    slack = 2 * max(ref_cfht) * tail_sum
    if direction == "lower":
        verdict = composed - slack <= exact_dcfht
    else:
        verdict = composed + slack >= exact_dcfht

    report = SwitchReport(
        rho_t=rho_s,
        lhs=lhs_s,
        rhs=rhs_s,
        residual=res_s,
        rho=rho,
        reference_dcfht=ref_dcfht,
        composed_bound=composed,
        direction=direction,
        exact_target_dcfht=exact_dcfht,
        tail_mass=res_s[-1],
        tail_slack=slack,
        certified=certified,
        verdict=bool(verdict and certified),
    )
    if claimed_rho is not None:
        report.claimed_rho_t = claimed
        report.claimed_holds = claimed_ok
        report.claimed_bound = ref_dcfht + sum(claimed)
    return report


def proof_rho_t(n: int, lam: int, optimal_mass) -> Fraction:
    """Per-step gap guaranteed for the population EA against RLS on LeadingOnes.

    Equals ``(n * (S - n) + 1) * (1 - optimal_mass)`` where ``S`` is
    :func:`ealab.bounds.lemma5_sum` ``(n, lam)``.
    """
    if n < 1 or lam < 1:
        raise UsageError("n and lambda must be positive")
    s = bounds.lemma5_sum_exact(n, lam)
    return (n * (s - n) + 1) * (1 - Fraction(optimal_mass))


def improvement_prob_p(j_list: Sequence[int], i: int, n: int) -> Fraction:
    """Probability that the largest number of zero-bits flipped by any offspring is ``i``.

    ``j_list`` holds the zero-bit counts of the selected parents in
    non-decreasing order; offspring are produced independently.
    """
    j_list = list(j_list)
    if not j_list:
        raise UsageError("j_list must be non-empty")
    if any(a > b for a, b in zip(j_list, j_list[1:])):
        raise UsageError("j_list must be sorted in non-decreasing order")
    if j_list[-1] > n or j_list[0] < 0:
        raise UsageError("zero counts must lie in [0, n]")
    if not 0 <= i <= j_list[0]:
        raise UsageError("i must satisfy 0 <= i <= j_list[0]")

    def cdf(k):
        if k < 0:
            return Fraction(0)
        out = Fraction(1)
        for j in j_list:
            out *= bounds.tail_sum_f(j, min(k, j), n)
        return out

    return cdf(i) - cdf(i - 1)


def leadingones_reference(n: int, exact: bool = True) -> TransitionModel:
    """Absorbing chain of strict-acceptance RLS on LeadingOnes."""
    return markov.make_absorbing(
        markov.enumerate_rls_chain(TabulatedObjective.leadingones(n), exact)
    )


def population_comparison(
    f: TabulatedObjective,
    mu: int,
    lam: int,
    parents=ParentSelector.UNIFORM,
    survivors=SurvivorSelector.ELITIST,
    exact: bool = True,
    tail_eps=None,
    horizon: int = 100_000,
) -> SwitchReport:
    """Compare the (mu+lambda)-EA on ``f`` with RLS on LeadingOnes.

    Uses the best-member mapping and checks every step against
    :func:`proof_rho_t`.  ``f`` must have its optimum at the all-ones string.
    """
    n = f.n
    target = markov.make_absorbing(
        markov.enumerate_ea_chain(f, mu, lam, parents, survivors, exact)
    )
    reference = leadingones_reference(n, exact)
    mapping = AlignedMapping.from_function(target, reference, best_solution_mapping)
    coeff = proof_rho_t(n, lam, 0)
    if not exact:
        coeff = float(coeff)
    return rho_series(
        target,
        reference,
        mapping,
        horizon=horizon,
        tail_eps=tail_eps,
        direction="lower",
        claimed_rho=lambda t, mass: coeff * (1 - mass),
    )
