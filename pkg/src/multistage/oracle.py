"""Exact single-step and two-step maximization by enumeration.

All queries break ties the same way: larger cardinality first, then the
lexicographically smallest member list (``ObjectSet.order_key``).  Pairs
compare by the key of the first set, then the second.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import BonusModel, ObjectSet
from .family import StageInstance


@dataclass(frozen=True)
class AugmentedQuery:
    """Maximize ``p(S) + sum_{i in S} per_item_bonus[i]`` over feasible S, optionally S within ``restrict_to``."""

    base: StageInstance
    per_item_bonus: tuple[Fraction, ...]
    restrict_to: Optional[ObjectSet] = None

    def __init__(self, base: StageInstance, per_item_bonus: Optional[Sequence] = None,
                 restrict_to: Optional[ObjectSet] = None):
        n = base.n
        bonus = tuple(Fraction(b) for b in (per_item_bonus if per_item_bonus is not None else [0] * n))
        if len(bonus) != n:
            raise ValueError(f"per_item_bonus needs {n} entries, got {len(bonus)}")
        if restrict_to is not None and restrict_to.n != n:
            raise ValueError("restrict_to lives on a different ground set")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "per_item_bonus", bonus)
        object.__setattr__(self, "restrict_to", restrict_to)


def _better(value, key, best_value, best_key) -> bool:
    return best_value is None or value > best_value or (value == best_value and key < best_key)


def argmax(query: AugmentedQuery, cap: Optional[int] = None) -> tuple[ObjectSet, Fraction]:
    allowed = None if query.restrict_to is None else query.restrict_to.mask
    weights = query.per_item_bonus
    has_bonus = any(weights)
    best = best_value = best_key = None
    for s, p in query.base.candidates(cap):
        if allowed is not None and s.mask & ~allowed:
            continue
        value = p + sum((weights[i - 1] for i in s.members), Fraction(0)) if has_bonus else p
        key = s.order_key()
        if _better(value, key, best_value, best_key):
            best, best_value, best_key = s, value, key
    # the empty set is always feasible and always inside restrict_to
    return best, best_value


def best_single(stage: StageInstance, cap: Optional[int] = None) -> tuple[ObjectSet, Fraction]:
    """The plain per-step optimum ``S*_t`` and its profit."""
    return argmax(AugmentedQuery(stage), cap)


def argmax_restricted(stage: StageInstance, within: ObjectSet,
                      cap: Optional[int] = None) -> tuple[ObjectSet, Fraction]:
    return argmax(AugmentedQuery(stage, restrict_to=within), cap)


def argmax_last(stage: StageInstance, prev: ObjectSet, bonus: BonusModel,
                cap: Optional[int] = None) -> tuple[ObjectSet, Fraction]:
    """Maximize ``p(S) + b(prev, S)``."""
    if prev.n != stage.n:
        raise ValueError("prev lives on a different ground set")
    best = best_value = best_key = None
    for s, p in stage.candidates(cap):
        value = p + bonus(prev, s)
        key = s.order_key()
        if _better(value, key, best_value, best_key):
            best, best_value, best_key = s, value, key
    return best, best_value


def argmax_pair(s1: StageInstance, s2: StageInstance, bonus: BonusModel,
                cap: Optional[int] = None) -> tuple[ObjectSet, ObjectSet, Fraction]:
    """Best two-step sequence ``(S, S')`` maximizing ``p1(S) + p2(S') + b(S, S')``."""
    if s1.n != s2.n:
        raise ValueError("stages live on different ground sets")
    second = s2.candidates(cap)
    best = None
    best_value = best_key = None
    for a, pa in s1.candidates(cap):
        ka = a.order_key()
        for b, pb in second:
            value = pa + pb + bonus(a, b)
            key = (ka, b.order_key())
            if _better(value, key, best_value, best_key):
                best, best_value, best_key = (a, b), value, key
    return best[0], best[1], best_value
