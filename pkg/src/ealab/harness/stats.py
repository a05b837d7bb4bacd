"""Summary statistics over repeated runs."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Optional

from ..engine import RunOutcome

Z95 = 1.96


@dataclass(frozen=True)
class TrialStats:
    """Aggregate of the runs that hit the optimum; timeouts are only counted.

    ``half_width`` is the 95% normal-approximation half-width of the mean.
    """

    count: int
    mean: Optional[float]
    sd: Optional[float]
    half_width: Optional[float]
    median: Optional[float]
    timeouts: int

    @property
    def stderr(self) -> Optional[float]:
        if self.count < 2 or self.sd is None:
            return None
        return self.sd / math.sqrt(self.count)

    def interval(self, z: float = Z95):
        """``(mean - z*se, mean + z*se)``; None when there is no estimate."""
        se = self.stderr
        if se is None:
            return None
        return self.mean - z * se, self.mean + z * se

    @classmethod
    def from_values(cls, values: Iterable[float], timeouts: int = 0) -> "TrialStats":
        values = list(values)
        if not values:
            return cls(0, None, None, None, None, timeouts)
        mean = statistics.fmean(values)
        sd = statistics.stdev(values) if len(values) > 1 else 0.0
        half = Z95 * sd / math.sqrt(len(values))
        return cls(len(values), mean, sd, half, statistics.median(values), timeouts)

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[RunOutcome], field: str = "evaluations"):
        outcomes = list(outcomes)
        hits = [getattr(o, field) for o in outcomes if o.hit]
        return cls.from_values(hits, timeouts=len(outcomes) - len(hits))
