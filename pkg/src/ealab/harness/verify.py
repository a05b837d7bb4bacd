"""Cross-module verification suites behind the ``*-verify`` commands."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List

from .. import bounds, markov, switch
from ..bitcore import TabulatedObjective, onemax
from ..errors import DomainError, UsageError

SUITES = ("markov", "switch", "lemma")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    checks: List[Check] = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def summary(self) -> str:
        fail = self.first_failure
        return json.dumps(
            {
                "suite": self.suite,
                "passed": self.passed,
                "checks": len(self.checks),
                "failed": sum(not c.passed for c in self.checks),
                "first_failure": None if fail is None else fail.name,
            }
        )


def _markov_checks(res: SuiteResult):
    for n in range(2, 9):
        m = markov.enumerate_rls_chain(TabulatedObjective.leadingones(n))
        rep = markov.solve_cfht(m)
        ok = all(e == n * s.zeros for e, s in zip(rep.cfht, m.states))
        res.checks.append(Check(f"rls-leadingones-cfht n={n}", ok))
    for n in range(3, 9):
        full = markov.enumerate_ea_chain(TabulatedObjective.onemax(n), 1, 1)
        quotient = markov.lump_states(full, lambda pop: onemax(pop[0]))
        e_full = markov.solve_cfht(full).cfht
        e_quot = markov.solve_cfht(quotient).cfht
        ok = all(e == e_quot[quotient.index[onemax(s[0])]] for s, e in zip(full.states, e_full))
        res.checks.append(Check(f"one-plus-one-onemax-lumping n={n}", ok))
    m = markov.enumerate_rls_chain(TabulatedObjective.leadingones(3))
    try:
        markov.lump_states(m, lambda s: TabulatedObjective.leadingones(3)(s))
        res.checks.append(Check("rls-leadingones-fitness-levels-rejected", False, "accepted"))
    except DomainError as exc:
        res.checks.append(Check("rls-leadingones-fitness-levels-rejected", True, str(exc)))
    fm = markov.enumerate_ea_chain(TabulatedObjective.onemax(3), 2, 2, exact=False)
    series = markov.dcfht_series(fm, fm.initial, 400)
    direct = markov.dcfht(fm)
    ok = abs(series.total - direct) <= 1e-9
    res.checks.append(Check("series-vs-solve n=3 mu=2 lambda=2", ok, f"{series.total!r} vs {direct!r}"))


def _switch_checks(res: SuiteResult):
    for n in (2, 3):
        for mu, lam in ((1, 1), (2, 1), (2, 2)):
            rep = switch.population_comparison(TabulatedObjective.onemax(n), mu, lam)
            res.artifacts.append(((n, mu, lam), rep))
            tag = f"n={n} mu={mu} lambda={lam}"
            res.checks.append(Check(f"switch-verdict {tag}", rep.verdict))
            res.checks.append(Check(f"switch-per-step-gap {tag}", bool(rep.claimed_holds)))
            coeff = switch.proof_rho_t(n, lam, 0)
            closed = rep.reference_dcfht + coeff * rep.exact_target_dcfht
            res.checks.append(
                Check(f"switch-closed-form-bound {tag}", closed <= rep.exact_target_dcfht)
            )
            eq4 = bounds.eq4_generation_bound(n, mu, lam)
            res.checks.append(Check(f"switch-eq4-bound {tag}", eq4 <= rep.exact_target_dcfht))


def lemma_grid() -> list:
    """Verdicts over the default parameter grids."""
    out = []
    for n in range(1, 31):
        for i in range(0, 11):
            out.append(bounds.check_lemma4(n, i, 200))
    for n in (16, 64, 256, 1024):
        for c in (1, 2):
            out.append(bounds.check_lemma5(n, c))
    for n in range(1, 65):
        for k in range(1, 10):
            out.append(bounds.check_lemma6(n, Fraction(k, 20)))
    for n in range(2, 31):
        for i in range(2, n + 1):
            out.append(bounds.chernoff_tail_check(n, i))
    return out


def _lemma_checks(res: SuiteResult):
    verdicts = lemma_grid()
    res.artifacts.extend(verdicts)
    for lemma in ("lemma4", "lemma5", "lemma6", "chernoff"):
        group = [v for v in verdicts if v.lemma == lemma]
        bad = next((v for v in group if not v.holds), None)
        res.checks.append(
            Check(f"{lemma} grid ({len(group)} points)", bad is None, "" if bad is None else str(bad.witness))
        )
    for n in range(1, 21):
        for mu in range(1, 9):
            total = sum(bounds.initial_phi_mass(n, mu, j) for j in range(n + 1))
            if total != 1:
                res.checks.append(Check(f"initial-mass-sums n={n} mu={mu}", False, str(total)))
                return
    res.checks.append(Check("initial-mass-sums n<=20 mu<=8", True))
    ok = all(
        bounds.initial_reference_dcfht(n, 2**k) > bounds.initial_dcfht_lower(n, 2**k)
        for n in range(4, 21)
        for k in range(0, 9)
    )
    res.checks.append(Check("initial-dcfht-above-lower n in [4,20]", ok))


_RUNNERS: dict = {"markov": _markov_checks, "switch": _switch_checks, "lemma": _lemma_checks}


def verify_suites(suite: str) -> SuiteResult:
    """Run one suite; ``exit_code`` is 0 when every check passes and 1 otherwise."""
    if suite not in _RUNNERS:
        raise UsageError(f"unknown suite {suite!r}; choose from {SUITES}")
    res = SuiteResult(suite)
    _RUNNERS[suite](res)
    return res
