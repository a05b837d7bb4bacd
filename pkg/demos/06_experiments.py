"""Trial batches, scaling tables and the population slowdown comparison."""

from ealab.harness import ExperimentSpec, run_trials, scaling_experiment, slowdown_experiment

spec = ExperimentSpec(algorithm="mu-lambda-ea", problem="onemax", n=(32,), mu=2, lam=4, trials=50, seed=7)
batch = run_trials(spec)
print(batch.stats[32])
print(batch.to_csv().splitlines()[0])

# mean evaluations over n ln n should settle to a constant
table = scaling_experiment(ExperimentSpec(n=(32, 64, 128), trials=100, seed=1), "nlogn")
print(table.to_csv())

# larger populations cost more evaluations on OneMax
slow = slowdown_experiment(60, [(1, 1), (2, 4), (10, 100)], trials=100, seed=1)
print(slow.to_csv())
