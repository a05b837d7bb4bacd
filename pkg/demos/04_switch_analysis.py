"""Comparing the population EA with RLS on LeadingOnes, step by step."""

from ealab import markov, switch
from ealab.bitcore import TabulatedObjective

rep = switch.population_comparison(TabulatedObjective.onemax(3), mu=2, lam=2)
print("exact expected generations:", float(rep.exact_target_dcfht))
print("reference start value     :", float(rep.reference_dcfht))
print("composed bound            :", float(rep.composed_bound), "horizon", rep.horizon)
print("bound from the proof gaps :", float(rep.claimed_bound))
print("verdict:", rep.verdict, " per-step gap holds:", rep.claimed_holds)

for t in range(5):
    print(f"t={t}  rho_t={float(rep.rho_t[t]): .5f}  claimed={float(rep.claimed_rho_t[t]): .5f}")

# the closed form used in the proof
print("proof_rho_t(3, 2, 0) =", switch.proof_rho_t(3, 2, 0))

# a chain compared with itself has zero gap at every step
m = markov.make_absorbing(markov.enumerate_ea_chain(TabulatedObjective.leadingones(3), 2, 1))
self_rep = switch.rho_series(m, m, switch.AlignedMapping.identity(m))
print("self-comparison max |rho_t|:", max(abs(r) for r in self_rep.rho_t))

print(rep.to_csv().splitlines()[0])
