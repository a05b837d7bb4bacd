"""Exact Markov chains and hitting times on small instances."""

from ealab import markov
from ealab.bitcore import TabulatedObjective, leadingones, onemax
from ealab.errors import DomainError

# RLS on LeadingOnes: the expected time from y is n times its number of zeros
m = markov.enumerate_rls_chain(TabulatedObjective.leadingones(4))
rep = markov.solve_cfht(m)
for s, e in list(zip(m.states, rep.cfht))[:6]:
    print(s, e)
print("uniform start:", rep.dcfht)

# the (2+2)-EA on OneMax with n = 3, states are populations
ea = markov.enumerate_ea_chain(TabulatedObjective.onemax(3), 2, 2)
print("states:", ea.size, "targets:", len(ea.targets))
print("expected generations from a uniform start:", markov.dcfht(ea), "=", float(markov.dcfht(ea)))

# the same quantity as a series of non-absorbed masses
absorbing = markov.make_absorbing(ea)
series = markov.dcfht_series(absorbing, absorbing.initial, 60)
print("series estimate:", series.total)

# fitness levels of the (1+1)-EA on OneMax give an exact quotient chain
full = markov.enumerate_ea_chain(TabulatedObjective.onemax(6), 1, 1)
levels = markov.lump_states(full, lambda pop: onemax(pop[0]))
print("quotient states:", levels.states, "cfht:", [float(e) for e in markov.solve_cfht(levels).cfht])

# LeadingOnes levels under RLS are not lumpable
try:
    markov.lump_states(m, leadingones)
except DomainError as exc:
    print("rejected:", exc)

# models round-trip through their text form
print(markov.TransitionModel.from_text(m.to_text()).rows == m.rows)
