"""Running-time laboratory for population-based evolutionary algorithms.

Simulators for the (mu+lambda)-EA, the (1+1)-EA and strict-acceptance RLS on
pseudo-Boolean functions, exact Markov-chain hitting times, a numerical
switch-analysis comparator, and exact checks of the supporting inequalities.
"""

from .bitcore import BitString, TabulatedObjective, leadingones, onemax
from .engine import (
    ParentSelector,
    RunOutcome,
    SurvivorSelector,
    run_mu_lambda_ea,
    run_one_plus_one,
    run_rls_neq,
)
from .errors import DomainError, ResourceError, UsageError

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "TabulatedObjective",
    "onemax",
    "leadingones",
    "ParentSelector",
    "SurvivorSelector",
    "RunOutcome",
    "run_mu_lambda_ea",
    "run_one_plus_one",
    "run_rls_neq",
    "DomainError",
    "ResourceError",
    "UsageError",
]
