"""Exact transition models of RLS and the (mu+lambda)-EA, and hitting-time solvers.

Models are stored as sparse rows (``dict`` from successor index to
probability).  In exact mode every probability is a :class:`fractions.Fraction`
and every solve is carried out in rational arithmetic; float mode uses the
same code paths with ``float`` entries and numpy for the linear algebra.
"""

from __future__ import annotations

import io
import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Optional, Sequence

import networkx as nx
import numpy as np

from . import bitcore
from .bitcore import BitString, TabulatedObjective
from .engine import ParentSelector, SurvivorSelector, elitist_truncation, selection_weights
from .errors import DomainError, ResourceError, UsageError

__all__ = [
    "TransitionModel",
    "ChainReport",
    "enumerate_rls_chain",
    "enumerate_ea_chain",
    "make_absorbing",
    "solve_cfht",
    "evolve_distribution",
    "dcfht",
    "dcfht_series",
    "lump_states",
    "target_mass",
    "nontarget_mass",
    "DEFAULT_WORK_BOUND",
]

DEFAULT_WORK_BOUND = 2 * 10**7
FLOAT_ROW_TOL = 1e-12


@dataclass
class TransitionModel:
    """Finite Markov chain with a designated target set.

    Attributes
    ----------
    states : list
        State encodings.  Chains over bitstrings use :class:`BitString`;
        population chains use sorted tuples of :class:`BitString`.
    rows : list of dict
        ``rows[i][j]`` is the probability of moving from state ``i`` to ``j``.
    targets : frozenset of int
        Indices of target states.
    exact : bool
        True when every entry is a Fraction.
    initial : list, optional
        Start distribution used by default for DCFHT queries.
    """

    states: list
    rows: list
    targets: frozenset
    exact: bool = True
    initial: Optional[list] = None
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.targets = frozenset(self.targets)
        self.index = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise UsageError("state encodings must be unique")
        if len(self.rows) != len(self.states):
            raise UsageError("one row per state is required")
        self.check_stochastic()

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    def check_stochastic(self):
        for i, row in enumerate(self.rows):
            if any(p < 0 for p in row.values()):
                raise DomainError(f"negative probability in row {i}")
            total = sum(row.values())
            if self.exact:
                if total != 1:
                    raise DomainError(f"row {i} ({self.encode(i)}) sums to {total}")
            elif abs(total - 1.0) > FLOAT_ROW_TOL:
                raise DomainError(f"row {i} ({self.encode(i)}) sums to {total!r}")

    def dense(self) -> np.ndarray:
        P = np.zeros((self.size, self.size))
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                P[i, j] = float(p)
        return P

    def to_float(self) -> "TransitionModel":
        rows = [{j: float(p) for j, p in row.items()} for row in self.rows]
        initial = None if self.initial is None else [float(p) for p in self.initial]
        return TransitionModel(list(self.states), rows, self.targets, False, initial)

    def encode(self, i: int) -> str:
        return _encode_state(self.states[i])

    def to_text(self) -> str:
        """Serialise as ``states <k>``, one encoding per line, then sparse rows.

        A final ``targets`` line lists the target indices.
        """
        out = io.StringIO()
        out.write(f"states {self.size}\n")
        for i in range(self.size):
            out.write(self.encode(i) + "\n")
        for i, row in enumerate(self.rows):
            for j in sorted(row):
                p = Fraction(row[j])
                out.write(f"{i} {j} {p.numerator}/{p.denominator}\n")
        out.write("targets " + " ".join(map(str, sorted(self.targets))) + "\n")
        return out.getvalue()

    @classmethod
    def from_text(cls, text: str, exact: bool = True) -> "TransitionModel":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "states":
            raise UsageError("first line must be 'states <k>'")
        k = int(head[1])
        states = [_decode_state(s) for s in lines[1 : 1 + k]]
        rows = [dict() for _ in range(k)]
        targets = ()
        for line in lines[1 + k :]:
            parts = line.split()
            if parts[0] == "targets":
                targets = tuple(int(t) for t in parts[1:])
                continue
            i, j, p = int(parts[0]), int(parts[1]), Fraction(parts[2])
            rows[i][j] = p if exact else float(p)
        return cls(states, rows, frozenset(targets), exact)


def _encode_state(state) -> str:
    if isinstance(state, tuple):
        return ",".join(str(s) for s in state)
    return str(state)


def _decode_state(text: str):
    if "," in text:
        return tuple(BitString.from_str(s) for s in text.split(","))
    return BitString.from_str(text)


@dataclass
class ChainReport:
    """Per-state conditional first hitting times plus the DCFHT of ``initial``."""

    cfht: list
    dcfht: object
    mode: str
    states: list = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("state,cfht\n")
        for s, e in zip(self.states, self.cfht):
            out.write(f"{_encode_state(s)},{_fmt(e)}\n")
        out.write(f"dcfht,{_fmt(self.dcfht)}\n")
        return out.getvalue()


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(v)


def _num(exact: bool):
    return Fraction if exact else float


def enumerate_rls_chain(f: TabulatedObjective, exact: bool = True) -> TransitionModel:
    """Chain of RLS with strict acceptance on a tabulated objective.

    From every string each strictly better Hamming neighbour receives
    probability 1/n; the remaining mass stays put.
    """
    n = f.n
    if n > 14:
        raise UsageError("RLS chains are enumerated for n <= 14 only")
    opt = bitcore.find_unique_optimum(f)
    if opt is None:
        raise DomainError("objective has no unique global optimum")
    num = _num(exact)
    step = num(1) / n
    values = f.values
    rows = []
    for key in range(1 << n):
        row = {}
        for bit in range(n):
            nb = key ^ (1 << (n - 1 - bit))
            if values[nb] > values[key]:
                row[nb] = step
        stay = num(1) - sum(row.values())
        if stay:
            row[key] = stay
        rows.append(row)
    states = [BitString.from_key(k, n) for k in range(1 << n)]
    initial = [num(1) / (1 << n)] * (1 << n)
    return TransitionModel(states, rows, frozenset({opt.key}), exact, initial)


def _mutation_table(n: int, exact: bool) -> list:
    """``table[d]`` = probability that bit mutation hits one given string at distance d."""
    if exact:
        return [bitcore.mutation_probability(n, d) for d in range(n + 1)]
    p = 1.0 / n
    return [p**d * (1 - p) ** (n - d) for d in range(n + 1)]


def enumerate_ea_chain(
    f: TabulatedObjective,
    mu: int,
    lam: int,
    parents=ParentSelector.UNIFORM,
    survivors=SurvivorSelector.ELITIST,
    exact: bool = True,
    work_bound: int = DEFAULT_WORK_BOUND,
) -> TransitionModel:
    """Exact one-generation kernel of the (mu+lambda)-EA over population multisets.

    States are sorted tuples of ``mu`` BitStrings.  Offspring are i.i.d.
    draws from the parent-selection/mutation mixture, so only offspring
    multisets need enumerating, weighted by their multinomial coefficient.
    Survivor selection must be deterministic; it reuses
    :func:`ealab.engine.elitist_truncation` so the chain and the simulator
    break ties identically.
    """
    if mu < 1 or lam < 1:
        raise UsageError("mu and lambda must be positive")
    survivors = SurvivorSelector(survivors)
    if not survivors.deterministic:
        raise UsageError(f"survivor policy {survivors.value!r} is stochastic; cannot enumerate")
    n = f.n
    space = 1 << n
    n_states = math.comb(space + mu - 1, mu)
    work = n_states * space * lam
    # the offspring-multiset loop is the real cost; bound it as well
    loop = n_states * math.comb(space + lam - 1, lam)
    if max(work, loop) > work_bound:
        raise ResourceError(
            f"work estimate {max(work, loop)} exceeds bound {work_bound}; "
            "reduce n, mu or lambda, or raise work_bound"
        )
    opt = bitcore.find_unique_optimum(f)
    if opt is None:
        raise DomainError("objective has no unique global optimum")

    num = _num(exact)
    values = f.values
    raws = [bitcore.bytes_of_key(k, n) for k in range(space)]
    mut = _mutation_table(n, exact)
    popcount = [bin(k).count("1") for k in range(space)]
    keyed_states = list(itertools.combinations_with_replacement(range(space), mu))
    index = {s: i for i, s in enumerate(keyed_states)}
    offspring_sets = list(itertools.combinations_with_replacement(range(space), lam))
    coef = []
    for combo in offspring_sets:
        c = math.factorial(lam)
        for m in Counter(combo).values():
            c //= math.factorial(m)
        coef.append(c)

    rows = []
    for state in keyed_states:
        weights = selection_weights(parents, [values[k] for k in state])
        if not exact:
            weights = [float(w) for w in weights]
        q = [num(0)] * space
        for w, pk in zip(weights, state):
            if not w:
                continue
            for child in range(space):
                q[child] += w * mut[popcount[pk ^ child]]
        parent_pop = [(values[k], raws[k]) for k in state]
        row = defaultdict(num)
        for combo, c in zip(offspring_sets, coef):
            prob = num(c)
            for child in combo:
                prob *= q[child]
            if not prob:
                continue
            kept = elitist_truncation(parent_pop, [(values[k], raws[k]) for k in combo], mu)
            succ = tuple(sorted(bitcore.key_of_bytes(raw) for _, raw in kept))
            row[index[succ]] += prob
        if not exact:
            total = sum(row.values())
            row = {j: p / total for j, p in row.items()}
        rows.append(dict(row))

    states = [tuple(BitString.from_key(k, n) for k in s) for s in keyed_states]
    targets = frozenset(i for i, s in enumerate(keyed_states) if opt.key in s)
    initial = []
    denom = space**mu
    for s in keyed_states:
        c = math.factorial(mu)
        for m in Counter(s).values():
            c //= math.factorial(m)
        initial.append(Fraction(c, denom) if exact else c / denom)
    return TransitionModel(states, rows, targets, exact, initial)


def make_absorbing(m: TransitionModel) -> TransitionModel:
    """Replace every target row by a unit self-loop."""
    if not m.targets:
        raise UsageError("model has no target states")
    one = Fraction(1) if m.exact else 1.0
    rows = [({i: one} if i in m.targets else dict(row)) for i, row in enumerate(m.rows)]
    return TransitionModel(list(m.states), rows, m.targets, m.exact, m.initial)


def is_absorbing(m: TransitionModel) -> bool:
    return all(set(m.rows[i]) <= m.targets for i in m.targets)


def _unreachable(m: TransitionModel) -> list:
    reverse = defaultdict(list)
    for i, row in enumerate(m.rows):
        for j, p in row.items():
            if p:
                reverse[j].append(i)
    seen = set(m.targets)
    stack = list(m.targets)
    while stack:
        j = stack.pop()
        for i in reverse[j]:
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return [i for i in range(m.size) if i not in seen]


def _solve_block_exact(A: list, b: list) -> list:
    """Gauss-Jordan elimination over Fractions; returns None when singular."""
    k = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(k):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * c for a, c in zip(M[r], M[col])]
    return [M[r][k] for r in range(k)]


def solve_cfht(m: TransitionModel, pi0: Optional[Sequence] = None) -> ChainReport:
    """Expected steps to the target set from every state.

    Solves ``(I - Q) E = 1`` on the non-target states, one strongly
    connected component at a time in reverse topological order, so chains
    that only move "upwards" reduce to back-substitution.

    Raises
    ------
    DomainError
        If some state cannot reach the target set, or a block is singular.
    """
    if not m.targets:
        raise UsageError("model has no target states")
    bad = _unreachable(m)
    if bad:
        shown = ", ".join(m.encode(i) for i in bad[:5])
        raise DomainError(f"{len(bad)} state(s) cannot reach a target, e.g. {shown}")

    num = _num(m.exact)
    E = [num(0)] * m.size
    free = [i for i in range(m.size) if i not in m.targets]
    graph = nx.DiGraph()
    graph.add_nodes_from(free)
    for i in free:
        for j, p in m.rows[i].items():
            if p and j != i and j not in m.targets:
                graph.add_edge(i, j)
    cond = nx.condensation(graph)
    for comp in reversed(list(nx.topological_sort(cond))):
        members = sorted(cond.nodes[comp]["members"])
        pos = {s: r for r, s in enumerate(members)}
        k = len(members)
        A = [[num(0)] * k for _ in range(k)]
        b = [num(1)] * k
        for r, i in enumerate(members):
            A[r][r] += 1
            for j, p in m.rows[i].items():
                if j in pos:
                    A[r][pos[j]] -= p
                elif j not in m.targets:
                    b[r] += p * E[j]
        if m.exact:
            sol = _solve_block_exact(A, b)
        else:
            try:
                sol = list(np.linalg.solve(np.array(A, dtype=float), np.array(b, dtype=float)))
            except np.linalg.LinAlgError:
                sol = None
        if sol is None:
            shown = ", ".join(m.encode(i) for i in members[:5])
            raise DomainError(f"singular hitting-time system on states {shown}")
        for i, e in zip(members, sol):
            E[i] = e
    if pi0 is None:
        pi0 = m.initial
    total = None if pi0 is None else sum(p * e for p, e in zip(pi0, E))
    return ChainReport(E, total, m.mode, list(m.states))


def _check_distribution(m: TransitionModel, pi):
    if len(pi) != m.size:
        raise UsageError(f"distribution has {len(pi)} entries, model has {m.size} states")
    if any(p < 0 for p in pi):
        raise DomainError("distribution has negative mass")
    total = sum(pi)
    if (m.exact and total != 1) or (not m.exact and abs(total - 1) > FLOAT_ROW_TOL):
        raise DomainError(f"distribution sums to {total}")


def step_distribution(m: TransitionModel, pi: Sequence) -> list:
    num = _num(m.exact)
    out = [num(0)] * m.size
    for i, p in enumerate(pi):
        if p:
            for j, q in m.rows[i].items():
                out[j] += p * q
    return out


def evolve_distribution(m: TransitionModel, pi0: Sequence, t: int) -> list:
    """Distribution after ``t`` steps, ``pi0 P^t``."""
    _check_distribution(m, pi0)
    pi = list(pi0)
    for _ in range(t):
        pi = step_distribution(m, pi)
    return pi


def target_mass(m: TransitionModel, pi: Sequence):
    return sum(pi[i] for i in m.targets)


def nontarget_mass(m: TransitionModel, pi: Sequence):
    """``1 - target_mass`` summed directly, which avoids cancellation in float mode."""
    return sum(p for i, p in enumerate(pi) if i not in m.targets)


def dcfht(m: TransitionModel, pi0: Optional[Sequence] = None):
    """Expected hitting time when the start state is drawn from ``pi0``."""
    if pi0 is None:
        pi0 = m.initial
    if pi0 is None:
        raise UsageError("no start distribution given and the model has none")
    _check_distribution(m, pi0)
    return solve_cfht(m, pi0).dcfht


@dataclass
class SeriesEstimate:
    partial_sum: object
    residual_mass: object
    tail_estimate: float
    horizon: int

    @property
    def total(self) -> float:
        return float(self.partial_sum) + self.tail_estimate


def dcfht_series(m: TransitionModel, pi0: Sequence, horizon: int) -> SeriesEstimate:
    """Sum of non-absorbed mass ``1 - pi_t(targets)`` for ``t = 0..horizon``.

    The tail beyond the horizon is extrapolated geometrically from the ratio
    of the last two residuals.  Requires an absorbing model.
    """
    if not is_absorbing(m):
        raise UsageError("dcfht_series needs an absorbing model")
    _check_distribution(m, pi0)
    pi = list(pi0)
    total = 0
    prev = None
    residual = None
    for t in range(horizon + 1):
        if t:
            pi = step_distribution(m, pi)
        residual = nontarget_mass(m, pi)
        total += residual
        if t < horizon:
            prev = residual
    tail = 0.0
    if residual > 0 and prev:
        ratio = float(residual) / float(prev)
        if ratio < 1:
            tail = float(residual) * ratio / (1 - ratio)
        else:
            tail = math.inf
    return SeriesEstimate(total, residual, tail, horizon)


def lump_states(m: TransitionModel, key: Callable[[Hashable], Hashable]) -> TransitionModel:
    """Quotient chain over the labels ``key(state)``.

    Every pair of states sharing a label must send equal total mass into
    every label class (exactly in exact mode); otherwise a DomainError names
    a witness pair.
    """
    labels = [key(s) for s in m.states]
    try:
        classes = sorted(set(labels))
    except TypeError:
        classes = list(dict.fromkeys(labels))
    cls_index = {c: r for r, c in enumerate(classes)}
    num = _num(m.exact)

    flows = []
    for i, row in enumerate(m.rows):
        flow = defaultdict(num)
        for j, p in row.items():
            flow[cls_index[labels[j]]] += p
        flows.append({c: p for c, p in flow.items() if p})

    rep = {}
    for i, lab in enumerate(labels):
        c = cls_index[lab]
        if c not in rep:
            rep[c] = i
            continue
        r = rep[c]
        if (i in m.targets) != (r in m.targets):
            raise DomainError(
                f"class {lab!r} mixes target and non-target states: "
                f"{m.encode(r)} vs {m.encode(i)}"
            )
        if not _same_flow(flows[r], flows[i], m.exact):
            raise DomainError(
                f"not lumpable: {m.encode(r)} and {m.encode(i)} share label {lab!r} "
                f"but move to classes with masses {_show(flows[r], classes)} "
                f"vs {_show(flows[i], classes)}"
            )
    rows = [flows[rep[c]] for c in range(len(classes))]
    targets = frozenset(cls_index[labels[i]] for i in m.targets)
    initial = None
    if m.initial is not None:
        initial = [num(0)] * len(classes)
        for i, p in enumerate(m.initial):
            initial[cls_index[labels[i]]] += p
    return TransitionModel(classes, rows, targets, m.exact, initial)


def _same_flow(a: dict, b: dict, exact: bool) -> bool:
    if exact:
        return a == b
    return all(abs(a.get(c, 0.0) - b.get(c, 0.0)) <= FLOAT_ROW_TOL for c in set(a) | set(b))


def _show(flow: dict, classes: list) -> dict:
    return {classes[c]: str(p) for c, p in sorted(flow.items())}
