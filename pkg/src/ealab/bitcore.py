"""Bitstrings, benchmark objectives and mutation operators.

Bit position 1 is the leftmost bit.  The integer *key* of a bitstring reads
the leftmost bit as the most significant one, so sorting by key and sorting
the raw ``bytes`` form lexicographically give the same order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import DomainError, UsageError

__all__ = [
    "BitString",
    "TabulatedObjective",
    "onemax",
    "leadingones",
    "bitwise_mutate",
    "bitwise_mutate_fast",
    "single_bit_flip",
    "flip_positions",
    "flip_positions_fast",
    "find_unique_optimum",
    "mutation_probability",
    "hamming",
]

MAX_TABLE_N = 20

# maps the raw 0/1 byte values to ASCII digits so int(..., 2) can parse them
_TO_ASCII = bytes.maketrans(b"\x00\x01", b"01")
_FROM_ASCII = bytes.maketrans(b"01", b"\x00\x01")


@dataclass(frozen=True)
class BitString:
    """Immutable fixed-length binary string.

    Parameters
    ----------
    bits : tuple of int
        The digits, leftmost first.  Every entry must be 0 or 1.
    """

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise UsageError("a BitString needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise UsageError(f"bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        return cls(tuple(int(c) for c in text.strip()))

    @classmethod
    def from_key(cls, key: int, n: int) -> "BitString":
        if n < 1 or not 0 <= key < (1 << n):
            raise UsageError(f"key {key} out of range for n={n}")
        return cls(tuple((key >> (n - 1 - i)) & 1 for i in range(n)))

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BitString":
        return cls(tuple(raw))

    @classmethod
    def ones_string(cls, n: int) -> "BitString":
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def key(self) -> int:
        return int(self.to_bytes().translate(_TO_ASCII), 2)

    @property
    def ones(self) -> int:
        return sum(self.bits)

    @property
    def zeros(self) -> int:
        return self.n - self.ones

    def to_bytes(self) -> bytes:
        return bytes(self.bits)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __str__(self):
        return "".join(map(str, self.bits))


BitLike = Union[BitString, bytes, bytearray, Sequence[int], str]


def as_bytes(s: BitLike) -> bytes:
    if isinstance(s, BitString):
        return s.to_bytes()
    if isinstance(s, (bytes, bytearray)):
        return bytes(s)
    if isinstance(s, str):
        return s.strip().encode().translate(_FROM_ASCII)
    return bytes(s)


def key_of_bytes(raw: bytes) -> int:
    """Integer key of a raw 0/1 byte string (leftmost bit most significant)."""
    return int(raw.translate(_TO_ASCII), 2)


def bytes_of_key(key: int, n: int) -> bytes:
    return format(key, f"0{n}b").encode().translate(_FROM_ASCII)


def onemax(s: BitLike) -> int:
    """Number of one-bits."""
    return as_bytes(s).count(1)


def leadingones(s: BitLike) -> int:
    """Length of the longest all-ones prefix."""
    raw = as_bytes(s)
    first_zero = raw.find(0)
    return len(raw) if first_zero < 0 else first_zero


def hamming(a: BitLike, b: BitLike) -> int:
    ra, rb = as_bytes(a), as_bytes(b)
    if len(ra) != len(rb):
        raise UsageError("hamming distance needs equal lengths")
    return sum(x != y for x, y in zip(ra, rb))


def mutation_probability(n: int, distance: int):
    """Exact probability that standard bit mutation moves a string by ``distance``
    to one *specific* string at that Hamming distance."""
    p = Fraction(1, n)
    return p**distance * (1 - p) ** (n - distance)


def flip_positions(n: int, rng: random.Random) -> list:
    """Positions flipped by standard bit mutation; one uniform draw per bit."""
    p = 1.0 / n
    return [i for i in range(n) if rng.random() < p]


def flip_positions_fast(n: int, rng: random.Random) -> list:
    """Same distribution as :func:`flip_positions`, sampled by geometric skips.

    The gap to the next flipped position of a Bernoulli(1/n) sequence is
    geometric, so the expected cost is O(1 + number of flips) draws instead of n.
    """
    if n == 1:
        return [0]
    log_q = math.log1p(-1.0 / n)
    out = []
    pos = -1
    while True:
        pos += 1 + int(math.log(1.0 - rng.random()) / log_q)
        if pos >= n:
            return out
        out.append(pos)


def _apply_flips(raw: bytes, positions: Iterable[int]) -> bytes:
    buf = bytearray(raw)
    for i in positions:
        buf[i] ^= 1
    return bytes(buf)


def bitwise_mutate(s: BitString, rng: random.Random) -> BitString:
    """Flip each bit independently with probability 1/n (reference sampler)."""
    return BitString.from_bytes(_apply_flips(s.to_bytes(), flip_positions(s.n, rng)))


def bitwise_mutate_fast(s: BitString, rng: random.Random) -> BitString:
    return BitString.from_bytes(
        _apply_flips(s.to_bytes(), flip_positions_fast(s.n, rng))
    )


def single_bit_flip(s: BitString, rng: random.Random) -> BitString:
    """Flip exactly one uniformly chosen position."""
    return BitString.from_bytes(_apply_flips(s.to_bytes(), (rng.randrange(s.n),)))


@dataclass(frozen=True)
class TabulatedObjective:
    """Explicit fitness table over all ``2**n`` bitstrings, indexed by key."""

    n: int
    values: tuple

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("n must be positive")
        values = tuple(self.values)
        if len(values) != 1 << self.n:
            raise UsageError(f"expected {1 << self.n} values, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise DomainError("fitness values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, n: int, func: Callable[[BitString], float]):
        if n > MAX_TABLE_N:
            raise UsageError(f"tables are limited to n <= {MAX_TABLE_N}")
        return cls(n, tuple(func(BitString.from_key(k, n)) for k in range(1 << n)))

    @classmethod
    def onemax(cls, n: int) -> "TabulatedObjective":
        return cls(n, tuple(bin(k).count("1") for k in range(1 << n)))

    @classmethod
    def leadingones(cls, n: int) -> "TabulatedObjective":
        return cls.from_function(n, leadingones)

    def __call__(self, s: BitLike) -> float:
        if isinstance(s, BitString):
            return self.values[s.key]
        return self.values[key_of_bytes(as_bytes(s))]

    def to_text(self) -> str:
        lines = [f"n={self.n}"]
        for k, v in enumerate(self.values):
            lines.append(f"{format(k, f'0{self.n}b')} {_format_value(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TabulatedObjective":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n="):
            raise UsageError("first line must be 'n=<int>'")
        n = int(lines[0][2:])
        body = lines[1:]
        if len(body) != 1 << n:
            raise UsageError(f"expected {1 << n} rows, got {len(body)}")
        values = []
        for expected, line in enumerate(body):
            bits, value = line.split()
            if len(bits) != n or int(bits, 2) != expected:
                raise UsageError(f"row {expected + 1}: rows must be in ascending key order")
            values.append(_parse_value(value))
        return cls(n, tuple(values))


def _format_value(v) -> str:
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def find_unique_optimum(f: TabulatedObjective):
    """Return the unique maximiser of ``f`` as a BitString, or None on ties."""
    if f.n > MAX_TABLE_N:
        raise UsageError(f"enumeration is limited to n <= {MAX_TABLE_N}")
    best = max(f.values)
    winners = [k for k, v in enumerate(f.values) if v == best]
    if len(winners) != 1:
        return None
    return BitString.from_key(winners[0], f.n)
