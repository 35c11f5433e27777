"""Pareto dominance and fast non-dominated sorting.

Vectors carry a per-objective sense (minimize or maximize).  ``a`` dominates
``b`` when ``a`` is at least as good on every objective and strictly better
on at least one, each objective judged under its own sense.  Sorting peels
the set into fronts: front 0 is the non-dominated set, front i+1 is the set
dominated only by earlier fronts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import ContractError


class Sense(Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


@dataclass(frozen=True)
class ObjectiveVector:
    """One candidate's objective values plus their optimization senses."""

    values: tuple[float, ...]
    senses: tuple[Sense, ...]

    def __post_init__(self):
        if len(self.values) != len(self.senses):
            raise ContractError(
                f"objective arity mismatch: {len(self.values)} values, {len(self.senses)} senses"
            )
        if len(self.values) < 2:
            raise ContractError("objective vectors need at least two objectives")
        for v in self.values:
            if not math.isfinite(v):
                raise ContractError(f"objective values must be finite, got {v}")

    def minimized(self) -> tuple[float, ...]:
        """Values with maximized objectives negated, so lower is always better."""
        return tuple(
            -v if s is Sense.MAXIMIZE else v for v, s in zip(self.values, self.senses)
        )


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff ``a`` Pareto-dominates ``b``; senses must match."""
    if a.senses != b.senses:
        raise ContractError("cannot compare vectors with different senses")
    av = a.minimized()
    bv = b.minimized()
    return all(x <= y for x, y in zip(av, bv)) and any(x < y for x, y in zip(av, bv))


@dataclass(frozen=True)
class ParetoFronts:
    """Front partition; ``fronts[i]`` holds input indices, ascending."""

    fronts: tuple[tuple[int, ...], ...]

    def front_of(self, index: int) -> int:
        for rank, front in enumerate(self.fronts):
            if index in front:
                return rank
        raise ContractError(f"index {index} not in any front")


def non_dominated_sort(points: Sequence[ObjectiveVector]) -> ParetoFronts:
    """Fast non-dominated sort (all-pairs bookkeeping, then front peeling).

    For each point p, ``dominated_by[p]`` counts its dominators and ``beats[p]``
    lists the points it dominates; points with zero dominators seed front 0 and
    counts are decremented front by front.  Duplicates are mutually
    non-dominating and land in the same front.  Within a front, indices keep
    input order.
    """
    if not points:
        raise ContractError("non_dominated_sort requires at least one point")
    senses = points[0].senses
    for p in points:
        if p.senses != senses:
            raise ContractError("all points must share the same objective senses")
    mins = [p.minimized() for p in points]
    n = len(points)
    beats: list[list[int]] = [[] for _ in range(n)]
    dominated_by = [0] * n
    for i in range(n):
        mi = mins[i]
        for j in range(i + 1, n):
            mj = mins[j]
            i_le = True
            j_le = True
            i_lt = False
            j_lt = False
            for x, y in zip(mi, mj):
                if x < y:
                    j_le = False
                    i_lt = True
                elif y < x:
                    i_le = False
                    j_lt = True
            if i_le and i_lt:
                beats[i].append(j)
                dominated_by[j] += 1
            elif j_le and j_lt:
                beats[j].append(i)
                dominated_by[i] += 1
    current = [i for i in range(n) if dominated_by[i] == 0]
    fronts = []
    while current:
        fronts.append(tuple(sorted(current)))
        nxt = []
        for i in current:
            for j in beats[i]:
                dominated_by[j] -= 1
                if dominated_by[j] == 0:
                    nxt.append(j)
        current = nxt
    return ParetoFronts(fronts=tuple(fronts))


def pareto_front(points: Sequence[ObjectiveVector]) -> tuple[int, ...]:
    """Indices of the non-dominated subset (front 0), in input order."""
    return non_dominated_sort(points).fronts[0]
