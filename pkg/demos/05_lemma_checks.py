"""The closed-form inequalities behind the lower bound, checked exactly."""

from fractions import Fraction

from ealab import bounds

print("P(Bin(2, 1/2) <= 1) =", bounds.tail_sum_f(2, 1, 2))
print(bounds.check_lemma4(10, 3, 200))

for n in (16, 64, 256):
    v = bounds.check_lemma5(n, 1)
    print(f"n={n}: sum - (n - threshold) = {float(v.worst_margin):.3f}, threshold {bounds.lemma5_threshold(n, 1)}")

print(bounds.chernoff_tail_check(20, 4))
print("H(1/4) =", bounds.entropy_H(Fraction(1, 4)))
print(bounds.check_lemma6(4, Fraction(1, 4)))

# distribution of the fewest zeros among mu uniform strings
n, mu = 8, 4
masses = [bounds.initial_phi_mass(n, mu, j) for j in range(n + 1)]
print("masses:", [round(float(p), 4) for p in masses], "sum", sum(masses))
print("start value:", float(bounds.initial_reference_dcfht(n, mu)), "> lower", bounds.initial_dcfht_lower(n, mu))

b = bounds.theorem2_bound(100, 1, 100, 1)
print("population term:", b.population_term, " n ln n term:", b.black_box_term, b.notes)

print(bounds.verdicts_to_csv([bounds.check_lemma4(5, 2, 30), bounds.check_lemma6(30, 0.3)]))
