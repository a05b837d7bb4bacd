"""Bitstrings, the two benchmark objectives and the mutation operators."""

import random
from collections import Counter

import numpy as np

from ealab.bitcore import (
    BitString,
    TabulatedObjective,
    bitwise_mutate,
    find_unique_optimum,
    hamming,
    leadingones,
    onemax,
    single_bit_flip,
)

s = BitString.from_str("1101")
print(s, "onemax =", onemax(s), "leadingones =", leadingones(s), "key =", s.key)

# LeadingOnes never exceeds OneMax
rng = random.Random(0)
strings = [BitString.from_key(rng.randrange(2**12), 12) for _ in range(1000)]
print("LO <= OM on 1000 random strings:", all(leadingones(x) <= onemax(x) for x in strings))

# standard bit mutation flips each bit with probability 1/n
n = 10
x = BitString((0,) * n)
flips = np.array([bitwise_mutate(x, rng).bits for _ in range(20000)])
print("per-bit flip rate:", flips.mean(axis=0).round(3), "target", 1 / n)
print("Hamming distances:", sorted(Counter(hamming(x, bitwise_mutate(x, rng)) for _ in range(20000)).items()))

# RLS proposals are always one bit away
print("single flips:", Counter(hamming(x, single_bit_flip(x, rng)) for _ in range(1000)))

# tabulated objectives and their unique optimum
table = TabulatedObjective.leadingones(4)
print(table.to_text().splitlines()[:4], "...")
print("optimum:", find_unique_optimum(table))
flat = TabulatedObjective.from_function(3, lambda y: 0)
print("constant table optimum:", find_unique_optimum(flat))
