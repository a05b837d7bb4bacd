"""Running the (mu+lambda)-EA, the (1+1)-EA and RLS."""

import math
import statistics

from ealab import run_mu_lambda_ea, run_one_plus_one, run_rls_neq

n = 50
out = run_mu_lambda_ea("onemax", n, mu=4, lam=8, rng=1)
print(out)
print("evaluations = mu + lam * generations:", out.evaluations == 4 + 8 * out.generations)

# watch the best fitness climb
trace = []
run_mu_lambda_ea("leadingones", 20, 2, 2, rng=3, on_generation=lambda t, pop: trace.append(max(v for v, _ in pop)))
print("best LeadingOnes value every 25 generations:", trace[::25])

# the (1+1)-EA on OneMax needs about e n ln n - 1.89 n evaluations
for n in (25, 50, 100):
    runs = [run_one_plus_one("onemax", n, seed).evaluations for seed in range(100)]
    approx = math.e * n * math.log(n) - 1.89 * n
    print(f"n={n:4d}  mean={statistics.fmean(runs):8.1f}  approx={approx:8.1f}")

# RLS on LeadingOnes: every zero bit costs n steps on average
n = 30
runs = [run_rls_neq("leadingones", n, seed).generations for seed in range(300)]
print(f"RLS, LeadingOnes n={n}: mean generations {statistics.fmean(runs):.1f}, n*n/2 = {n * n / 2}")

# a budget stops the run early
print(run_one_plus_one("leadingones", 200, rng=0, budget=1000))
