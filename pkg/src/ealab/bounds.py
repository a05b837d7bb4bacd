"""Closed-form quantities behind the population lower bound, with exact checkers.

Quantities that are equalities are computed as :class:`fractions.Fraction`.
Inequalities against transcendental right-hand sides are decided with
mpmath at ``PRECISION_DIGITS`` significant digits.  Huge rational powers fall
back to log-domain mpmath evaluation, and the returned verdict says so.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import mpmath

from .errors import DomainError, UsageError

__all__ = [
    "LemmaVerdict",
    "Theorem2Bound",
    "tail_sum_f",
    "check_lemma4",
    "lemma5_sum",
    "lemma5_sum_exact",
    "lemma5_threshold",
    "check_lemma5",
    "binomial_upper_tail",
    "chernoff_bound",
    "chernoff_tail_check",
    "entropy_H",
    "check_lemma6",
    "initial_phi_mass",
    "initial_reference_dcfht",
    "initial_reference_dcfht_by_mass",
    "initial_dcfht_lower",
    "eq4_generation_bound",
    "theorem2_bound",
    "verdicts_to_csv",
]

PRECISION_DIGITS = 60
EXACT_BITS_BUDGET = 1_000_000


@dataclass
class LemmaVerdict:
    lemma: str
    params: dict
    holds: bool
    worst_margin: object
    witness: Optional[dict] = None
    exact: bool = True

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def csv_row(self) -> str:
        params = ";".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.lemma},{params},{self.holds},{_fmt(self.worst_margin)}"


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return repr(float(x))
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 17)
    return repr(x)


def verdicts_to_csv(verdicts: Iterable[LemmaVerdict]) -> str:
    out = io.StringIO()
    out.write("lemma,params,holds,margin\n")
    for v in verdicts:
        out.write(v.csv_row() + "\n")
    return out.getvalue()


def _binomial_terms(m: int, n: int) -> list:
    """Integer numerators ``C(m,k) (n-1)^(m-k)`` over the common denominator ``n^m``."""
    return [math.comb(m, k) * (n - 1) ** (m - k) for k in range(m + 1)]


def tail_sum_f(m: int, i: int, n: int) -> Fraction:
    """``P(Bin(m, 1/n) <= i)`` as an exact fraction."""
    if n < 1 or m < 0:
        raise UsageError("need n >= 1 and m >= 0")
    if not 0 <= i <= m:
        raise UsageError(f"need 0 <= i <= m, got i={i}, m={m}")
    num = sum(math.comb(m, k) * (n - 1) ** (m - k) for k in range(i + 1))
    return Fraction(num, n**m)


def check_lemma4(n: int, i: int, m_max: int) -> LemmaVerdict:
    """Check ``tail_sum_f(m+1, i, n) <= tail_sum_f(m, i, n)`` for ``i <= m < m_max``."""
    if m_max < i:
        raise UsageError("m_max must be at least i")
    params = {"n": n, "i": i, "m_max": m_max}
    worst = None
    prev = tail_sum_f(i, i, n)
    for m in range(i, m_max):
        cur = tail_sum_f(m + 1, i, n)
        margin = prev - cur
        if worst is None or margin < worst:
            worst = margin
        if margin < 0:
            return LemmaVerdict("lemma4", params, False, margin, {"m": m})
        prev = cur
    return LemmaVerdict("lemma4", params, True, Fraction(0) if worst is None else worst)


def _cdf_numerators(n: int) -> list:
    """``N_i`` with ``P(Bin(n, 1/n) <= i) = N_i / n^n`` for ``i = 0..n``."""
    out, acc = [], 0
    for t in _binomial_terms(n, n):
        acc += t
        out.append(acc)
    return out


def lemma5_sum_exact(n: int, lam: int) -> Fraction:
    """``sum_{i<n} P(Bin(n,1/n) <= i)^lam`` in exact arithmetic."""
    if n < 1 or lam < 1:
        raise UsageError("n and lambda must be positive")
    cdf = _cdf_numerators(n)
    return Fraction(sum(c**lam for c in cdf[:n]), (n**n) ** lam)


def _lemma5_sum_mp(n: int, lam: int):
    terms = _binomial_terms(n, n)
    denom = mpmath.mpf(n) ** n
    upper = 0
    total = mpmath.mpf(0)
    # accumulate the upper tail from the top so 1 - cdf never cancels
    uppers = []
    for t in reversed(terms):
        upper += t
        uppers.append(upper)
    uppers.reverse()  # uppers[k] = sum_{j >= k} terms[j]
    for i in range(n):
        tail = mpmath.mpf(uppers[i + 1]) / denom
        total += mpmath.exp(lam * mpmath.log1p(-tail))
    return total


def lemma5_sum(n: int, lam: int, bits_budget: int = EXACT_BITS_BUDGET):
    """Left-hand side of the population lemma.

    Returns a Fraction when the exact value fits ``bits_budget`` bits of
    denominator and an ``mpmath.mpf`` otherwise.
    """
    if n < 1 or lam < 1:
        raise UsageError("n and lambda must be positive")
    if n * lam * max(1, n.bit_length()) <= bits_budget:
        return lemma5_sum_exact(n, lam)
    with mpmath.workdps(PRECISION_DIGITS):
        return +_lemma5_sum_mp(n, lam)


def lemma5_threshold(n: int, c) -> int:
    """``ceil(e (c+1) ln n / ln ln n)``."""
    if n < 3:
        raise DomainError("threshold needs n >= 3 so that ln ln n > 0")
    with mpmath.workdps(PRECISION_DIGITS):
        c = mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
        value = mpmath.e * (c + 1) * mpmath.log(n) / mpmath.log(mpmath.log(n))
        return int(mpmath.ceil(value))


def check_lemma5(n: int, c, lam: Optional[int] = None) -> LemmaVerdict:
    """Compare :func:`lemma5_sum` with ``n - lemma5_threshold(n, c)``; ``lam`` defaults to ``n**c``."""
    if lam is None:
        lam = int(n**c)
    if lam > n**c:
        raise DomainError(f"lambda={lam} exceeds n^c")
    rhs = n - lemma5_threshold(n, c)
    lhs = lemma5_sum(n, lam)
    exact = isinstance(lhs, Fraction)
    margin = lhs - rhs
    params = {"n": n, "c": c, "lambda": lam}
    holds = bool(margin >= 0)
    return LemmaVerdict("lemma5", params, holds, margin, None if holds else dict(params), exact)


def binomial_upper_tail(n: int, i: int) -> Fraction:
    """``P(Bin(n, 1/n) >= i)`` exactly."""
    if i <= 0:
        return Fraction(1)
    if i > n:
        return Fraction(0)
    return Fraction(sum(_binomial_terms(n, n)[i:]), n**n)


def chernoff_bound(i: int):
    """``e^(i-1) / i^i`` in extended precision."""
    with mpmath.workdps(PRECISION_DIGITS):
        return mpmath.exp(i - 1) / mpmath.mpf(i) ** i


def chernoff_tail_check(n: int, i: int) -> LemmaVerdict:
    if i < 1:
        raise UsageError("i must be at least 1")
    tail = binomial_upper_tail(n, i)
    with mpmath.workdps(PRECISION_DIGITS):
        margin = chernoff_bound(i) - mpmath.mpf(tail.numerator) / tail.denominator
    params = {"n": n, "i": i}
    holds = bool(margin >= 0)
    return LemmaVerdict("chernoff", params, holds, margin, None if holds else dict(params), False)


def _as_fraction(x) -> Fraction:
    # floats go through their shortest repr so 0.45 means 9/20, not its binary neighbour
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def entropy_H(eps):
    """Binary entropy ``-eps log2 eps - (1-eps) log2 (1-eps)``."""
    e = _as_fraction(eps)
    if not 0 < e < 1:
        raise UsageError("eps must lie in (0, 1)")
    with mpmath.workdps(PRECISION_DIGITS):
        x = mpmath.mpf(e.numerator) / e.denominator
        return -x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2)


def check_lemma6(n: int, eps) -> LemmaVerdict:
    """``sum_{k <= floor(eps n)} C(n, k) <= 2^(H(eps) n)``."""
    e = _as_fraction(eps)
    if not 0 < e < Fraction(1, 2):
        raise UsageError("eps must lie in (0, 1/2)")
    if n < 1:
        raise UsageError("n must be positive")
    cut = math.floor(e * n)
    lhs = sum(math.comb(n, k) for k in range(cut + 1))
    with mpmath.workdps(PRECISION_DIGITS):
        rhs = mpmath.power(2, entropy_H(e) * n)
        margin = rhs - lhs
    params = {"n": n, "eps": str(e)}
    holds = bool(margin >= 0)
    return LemmaVerdict("lemma6", params, holds, margin, None if holds else dict(params), False)


def _at_least_zeros(n: int, j: int) -> int:
    """Number of length-n strings with at least ``j`` zero-bits."""
    return sum(math.comb(n, k) for k in range(j, n + 1))


def initial_phi_mass(n: int, mu: int, j: int) -> Fraction:
    """Probability that the best of ``mu`` uniform strings has exactly ``j`` zero-bits."""
    if mu < 1:
        raise UsageError("mu must be positive")
    if not 0 <= j <= n:
        raise UsageError("need 0 <= j <= n")
    hi = _at_least_zeros(n, j) ** mu
    lo = _at_least_zeros(n, j + 1) ** mu
    return Fraction(hi - lo, 2 ** (n * mu))


def initial_reference_dcfht(n: int, mu: int) -> Fraction:
    """Reference hitting time ``n * E[min zeros]`` averaged over uniform initial populations."""
    if mu < 1:
        raise UsageError("mu must be positive")
    total = sum(_at_least_zeros(n, j) ** mu for j in range(1, n + 1))
    return Fraction(n * total, 2 ** (n * mu))


def initial_reference_dcfht_by_mass(n: int, mu: int) -> Fraction:
    return sum((initial_phi_mass(n, mu, j) * n * j for j in range(n + 1)), Fraction(0))


def initial_dcfht_lower(n: int, mu: int) -> float:
    """``n^2/4 * exp(-mu / (1.13^n - 1))``."""
    if n < 2:
        raise UsageError("n must be at least 2")
    if mu < 1:
        raise UsageError("mu must be positive")
    return n * n / 4 * math.exp(-mu / (1.13**n - 1))


def eq4_generation_bound(n: int, mu: int, lam: int) -> Fraction:
    """Generation lower bound ``E'_0 / (n (n - S))`` before the threshold relaxation."""
    s = lemma5_sum_exact(n, lam)
    return initial_reference_dcfht(n, mu) / (n * (n - s))


@dataclass(frozen=True)
class Theorem2Bound:
    """Components of the composed running-time lower bound, never merged.

    ``population_term`` is ``mu + lam * generation_bound``; ``black_box_term``
    is ``n ln n`` with its unknown constant set to 1 (an externally cited
    result, reported for scale only).
    """

    population_term: float
    black_box_term: float
    generation_bound: float
    threshold: int
    notes: dict = field(default_factory=dict)


def theorem2_bound(n: int, mu: int, lam: int, c) -> Theorem2Bound:
    if n < 3:
        raise DomainError("the bound needs n >= 3")
    if mu < 1 or lam < 1:
        raise UsageError("mu and lambda must be positive")
    if lam > n**c:
        raise DomainError(f"lambda={lam} exceeds n^c={n**c}")
    m = lemma5_threshold(n, c)
    gens = n / (4 * m) * math.exp(-mu / (1.13**n - 1))
    return Theorem2Bound(
        population_term=mu + lam * gens,
        black_box_term=n * math.log(n),
        generation_bound=gens,
        threshold=m,
        notes={"black_box_constant": "symbolic, set to 1"},
    )
