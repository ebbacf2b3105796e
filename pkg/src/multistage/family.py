"""Feasible families, profit functions and multistage instances.

Every family contains the empty set.  Families are enumerable by
construction; the enumeration order is by increasing bitmask, so the empty
set always comes first.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence

from .core import (BonusModel, CapacityError, Evolution, ObjectSet,
                   parse_rational)

DEFAULT_ENUMERATION_CAP = 2 ** 20
ALL_SUBSETS_MAX_N = 20
SUBMODULARITY_MAX_N = 12


class FeasibleFamily:
    """Base class; subclasses are frozen dataclasses with an ``n`` field."""

    n: int
    kind: str = ""

    def contains(self, s: ObjectSet) -> bool:
        raise NotImplementedError

    def _generate(self, cap: int) -> list[int]:
        """Masks of all members, any order, raising CapacityError past ``cap``."""
        raise NotImplementedError

    def enumerate(self, cap: Optional[int] = None) -> list[ObjectSet]:
        return list(_enumerate_cached(self, DEFAULT_ENUMERATION_CAP if cap is None else cap))

    def __iter__(self) -> Iterator[ObjectSet]:
        return iter(self.enumerate())


@functools.lru_cache(maxsize=8192)
def _enumerate_cached(family: FeasibleFamily, cap: int) -> tuple[ObjectSet, ...]:
    masks = sorted(family._generate(cap))
    return tuple(ObjectSet(m, family.n) for m in masks)


def enumerate_family(family: FeasibleFamily, cap: Optional[int] = None) -> list[ObjectSet]:
    return family.enumerate(cap)


def _downward_closed_masks(n: int, can_add, cap: int) -> list[int]:
    # DFS adding objects in increasing index order; each set is produced once.
    out = [0]
    stack = [(0, 0)]  # (mask, next index to try, 0-based)
    while stack:
        mask, start = stack.pop()
        for i in range(start, n):
            if can_add(mask, i):
                new = mask | (1 << i)
                out.append(new)
                if len(out) > cap:
                    raise CapacityError(f"family has more than {cap} feasible sets")
                stack.append((new, i + 1))
    return out


@dataclass(frozen=True)
class ExplicitFamily(FeasibleFamily):
    n: int
    sets: tuple[ObjectSet, ...]
    kind = "explicit"

    def __init__(self, n: int, sets: Sequence):
        normalized = {}
        for s in sets:
            if not isinstance(s, ObjectSet):
                s = ObjectSet.of(s, n)
            if s.n != n:
                raise ValueError(f"set {s!r} has n={s.n}, family has n={n}")
            if s.mask in normalized:
                raise ValueError(f"duplicate feasible set {s!r}")
            normalized[s.mask] = s
        # the empty set is feasible in every subset maximization problem
        normalized.setdefault(0, ObjectSet.empty(n))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "sets", tuple(normalized[m] for m in sorted(normalized)))

    @cached_property
    def _masks(self) -> frozenset[int]:
        return frozenset(s.mask for s in self.sets)

    def contains(self, s: ObjectSet) -> bool:
        return s.n == self.n and s.mask in self._masks

    def _generate(self, cap: int) -> list[int]:
        if len(self.sets) > cap:
            raise CapacityError(f"family has more than {cap} feasible sets")
        return [s.mask for s in self.sets]


@dataclass(frozen=True)
class AllSubsets(FeasibleFamily):
    n: int
    kind = "all"

    def contains(self, s: ObjectSet) -> bool:
        return s.n == self.n

    def _generate(self, cap: int) -> list[int]:
        if self.n > ALL_SUBSETS_MAX_N or 2 ** self.n > cap:
            raise CapacityError(f"2^{self.n} subsets exceed the enumeration cap")
        return list(range(2 ** self.n))


@dataclass(frozen=True)
class CardinalityAtMost(FeasibleFamily):
    n: int
    k: int
    kind = "cardinality"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("cardinality bound must be nonnegative")

    def contains(self, s: ObjectSet) -> bool:
        return s.n == self.n and len(s) <= self.k

    def _generate(self, cap: int) -> list[int]:
        return _downward_closed_masks(self.n, lambda m, i: m.bit_count() < self.k, cap)


@dataclass(frozen=True)
class Knapsack(FeasibleFamily):
    n: int
    weights: tuple[Fraction, ...]
    capacity: Fraction
    kind = "knapsack"

    def __init__(self, n: int, weights: Sequence, capacity):
        weights = tuple(parse_rational(w) for w in weights)
        capacity = parse_rational(capacity)
        if len(weights) != n:
            raise ValueError(f"expected {n} weights, got {len(weights)}")
        if any(w < 0 for w in weights) or capacity < 0:
            raise ValueError("knapsack weights and capacity must be nonnegative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "capacity", capacity)

    def weight(self, s: ObjectSet) -> Fraction:
        return sum((self.weights[i - 1] for i in s.members), Fraction(0))

    def contains(self, s: ObjectSet) -> bool:
        return s.n == self.n and self.weight(s) <= self.capacity

    def _generate(self, cap: int) -> list[int]:
        loads = {0: Fraction(0)}

        def can_add(mask, i):
            w = loads[mask] + self.weights[i]
            if w <= self.capacity:
                loads[mask | (1 << i)] = w
                return True
            return False

        return _downward_closed_masks(self.n, can_add, cap)


@dataclass(frozen=True)
class MatchingEdges(FeasibleFamily):
    """Objects are the edges, in order; a set is feasible iff it is a matching."""

    n: int
    edges: tuple[tuple[int, int], ...]
    kind = "matching"

    def __init__(self, edges: Sequence[Sequence[int]], n: Optional[int] = None):
        edges = tuple((int(u), int(v)) for u, v in edges)
        if n is not None and n != len(edges):
            raise ValueError(f"n={n} but {len(edges)} edges given")
        if any(u == v for u, v in edges):
            raise ValueError("self-loops are not matchable")
        object.__setattr__(self, "n", len(edges))
        object.__setattr__(self, "edges", edges)

    def contains(self, s: ObjectSet) -> bool:
        if s.n != self.n:
            return False
        seen: set[int] = set()
        for i in s.members:
            u, v = self.edges[i - 1]
            if u in seen or v in seen:
                return False
            seen.update((u, v))
        return True

    def _generate(self, cap: int) -> list[int]:
        covered = {0: frozenset()}

        def can_add(mask, i):
            u, v = self.edges[i]
            vs = covered[mask]
            if u in vs or v in vs:
                return False
            covered[mask | (1 << i)] = vs | {u, v}
            return True

        return _downward_closed_masks(self.n, can_add, cap)


class ProfitFunction:
    n: int
    kind: str = ""

    def __call__(self, s: ObjectSet) -> Fraction:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearProfit(ProfitFunction):
    weights: tuple[Fraction, ...]
    kind = "linear"

    def __init__(self, weights: Sequence):
        weights = tuple(parse_rational(w) for w in weights)
        if any(w < 0 for w in weights):
            raise ValueError("profits must be nonnegative")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.weights)

    def __call__(self, s: ObjectSet) -> Fraction:
        if s.n != self.n:
            raise ValueError(f"set has n={s.n}, profit has n={self.n}")
        return sum((self.weights[i - 1] for i in s.members), Fraction(0))


@dataclass(frozen=True)
class TableProfit(ProfitFunction):
    """Explicit profits per set; unlisted sets are worth 0."""

    n: int
    entries: tuple[tuple[int, Fraction], ...]
    kind = "table"

    def __init__(self, n: int, values):
        items = values.items() if hasattr(values, "items") else values
        table: dict[int, Fraction] = {}
        for s, v in items:
            if isinstance(s, ObjectSet):
                if s.n != n:
                    raise ValueError(f"set {s!r} has n={s.n}, profit has n={n}")
                mask = s.mask
            elif isinstance(s, int):
                mask = ObjectSet(s, n).mask
            else:
                mask = ObjectSet.of(s, n).mask
            v = parse_rational(v)
            if v < 0:
                raise ValueError("profits must be nonnegative")
            if mask in table:
                raise ValueError(f"duplicate profit entry for {ObjectSet(mask, n)!r}")
            if v:
                table[mask] = v
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", tuple(sorted(table.items())))

    @cached_property
    def _lookup(self) -> dict[int, Fraction]:
        return dict(self.entries)

    def __call__(self, s: ObjectSet) -> Fraction:
        if s.n != self.n:
            raise ValueError(f"set has n={s.n}, profit has n={self.n}")
        return self._lookup.get(s.mask, Fraction(0))


def zero_profit(n: int) -> LinearProfit:
    return LinearProfit([0] * n)


@dataclass(frozen=True)
class StageInstance:
    family: FeasibleFamily
    profit: ProfitFunction

    def __post_init__(self):
        if self.family.n != self.profit.n:
            raise ValueError(f"family n={self.family.n} != profit n={self.profit.n}")

    @property
    def n(self) -> int:
        return self.family.n

    def candidates(self, cap: Optional[int] = None) -> tuple[tuple[ObjectSet, Fraction], ...]:
        """Every feasible set with its profit, in enumeration order."""
        return _candidates_cached(self, DEFAULT_ENUMERATION_CAP if cap is None else cap)


@functools.lru_cache(maxsize=8192)
def _candidates_cached(stage: StageInstance, cap: int):
    return tuple((s, stage.profit(s)) for s in stage.family.enumerate(cap))


@dataclass(frozen=True)
class MultistageInstance:
    n: int
    T: int
    bonus: BonusModel
    stages: tuple[StageInstance, ...]
    evolution: Evolution = Evolution.GE

    def __init__(self, n: int, T: int, bonus, stages: Sequence[StageInstance],
                 evolution=Evolution.GE):
        bonus = BonusModel(bonus)
        evolution = Evolution(evolution)
        stages = tuple(stages)
        if T < 1:
            raise ValueError("need at least one time step")
        if len(stages) != T:
            raise ValueError(f"T={T} but {len(stages)} stages given")
        for t, st in enumerate(stages, start=1):
            if st.n != n:
                raise ValueError(f"stage {t} has n={st.n}, instance has n={n}")
        if evolution is Evolution.SSFS and any(st.family != stages[0].family for st in stages):
            raise ValueError("SSFS instance must use one feasible family at every step")
        for name, value in (("n", n), ("T", T), ("bonus", bonus),
                            ("stages", stages), ("evolution", evolution)):
            object.__setattr__(self, name, value)

    def stage(self, t: int) -> StageInstance:
        """1-based stage access."""
        if not 1 <= t <= self.T:
            raise IndexError(t)
        return self.stages[t - 1]

    def with_stages(self, stages: Sequence[StageInstance], evolution=None) -> "MultistageInstance":
        return MultistageInstance(self.n, len(stages), self.bonus, stages,
                                  self.evolution if evolution is None else evolution)


# -- structural validators -------------------------------------------------

def subset_feasibility_witness(family: FeasibleFamily, cap: Optional[int] = None):
    """Return ``(S, S minus one object)`` with S feasible and the smaller set not, or None.

    Checking single-object removals suffices: downward closure then follows
    by induction on set size.
    """
    members = family.enumerate(cap)
    masks = {s.mask for s in members}
    for s in members:
        m = s.mask
        while m:
            low = m & -m
            if s.mask & ~low not in masks:
                return s, ObjectSet(s.mask & ~low, s.n)
            m ^= low
    return None


def is_subset_feasible(family: FeasibleFamily, cap: Optional[int] = None) -> bool:
    if isinstance(family, (AllSubsets, CardinalityAtMost, Knapsack, MatchingEdges)):
        return True
    return subset_feasibility_witness(family, cap) is None


def submodularity_witness(profit: ProfitFunction, n: Optional[int] = None):
    """Return a pair ``(S, S')`` violating submodularity over all of 2^N, or None.

    Uses the local form: p(X+i) + p(X+j) >= p(X+i+j) + p(X) for every X and
    distinct i, j outside X, which is equivalent to the pairwise inequality.
    """
    n = profit.n if n is None else n
    if n != profit.n:
        raise ValueError(f"n={n} but profit has n={profit.n}")
    if n > SUBMODULARITY_MAX_N:
        raise CapacityError(f"submodularity check limited to n <= {SUBMODULARITY_MAX_N}")
    if isinstance(profit, LinearProfit):
        return None
    values = [profit(ObjectSet(m, n)) for m in range(2 ** n)]
    for x in range(2 ** n):
        for i in range(n):
            bi = 1 << i
            if x & bi:
                continue
            for j in range(i + 1, n):
                bj = 1 << j
                if x & bj:
                    continue
                if values[x | bi] + values[x | bj] < values[x | bi | bj] + values[x]:
                    return ObjectSet(x | bi, n), ObjectSet(x | bj, n)
    return None


def is_submodular(profit: ProfitFunction, n: Optional[int] = None) -> bool:
    return submodularity_witness(profit, n) is None


@dataclass(frozen=True)
class AssumptionReport:
    """Per-stage outcome of the subset-feasibility and submodularity checks."""

    subset_feasible: tuple[bool, ...]
    submodular: tuple[bool, ...]
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return all(self.subset_feasible) and all(self.submodular)


def check_assumptions(inst: MultistageInstance, cap: Optional[int] = None) -> AssumptionReport:
    sf, sm, witnesses = [], [], {}
    for t, stage in enumerate(inst.stages, start=1):
        w = None if is_subset_feasible(stage.family, cap) else subset_feasibility_witness(stage.family, cap)
        sf.append(w is None)
        if w is not None:
            witnesses[("subset_feasibility", t)] = w
        w = submodularity_witness(stage.profit)
        sm.append(w is None)
        if w is not None:
            witnesses[("submodularity", t)] = w
    return AssumptionReport(tuple(sf), tuple(sm), witnesses)
