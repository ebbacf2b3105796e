"""Ground types, transition bonuses and the sequence value function.

Subsets of the ground set ``{1, ..., n}`` are stored as integer bitmasks
(bit ``i - 1`` set iff object ``i`` is a member).  Profits and values are
``fractions.Fraction`` throughout; nothing in the scored path touches floats.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

if TYPE_CHECKING:
    from .family import MultistageInstance

Rational = Fraction


class MultistageError(Exception):
    """Base class for all library errors."""


class FeasibilityError(MultistageError):
    def __init__(self, t: int, message: str = ""):
        self.t = t
        super().__init__(message or f"solution at step {t} is infeasible")


class CapacityError(MultistageError):
    """Enumeration would exceed the configured cap."""


class ModelMisuseError(MultistageError):
    """A policy was run on a model it is not defined for."""


class AssumptionViolation(ModelMisuseError):
    """Subset feasibility or submodularity does not hold."""


class DegenerateHorizonError(ModelMisuseError):
    pass


class ProtocolError(MultistageError):
    """The online game protocol (lookahead, history) was violated."""


class PrecisionError(MultistageError):
    pass


class BonusModel(enum.Enum):
    HAMMING = "hamming"
    INTERSECTION = "intersection"

    def __call__(self, a: "ObjectSet", b: "ObjectSet") -> int:
        if self is BonusModel.HAMMING:
            return hamming_bonus(a, b)
        return intersection_bonus(a, b)


class Evolution(enum.Enum):
    SSFS = "ssfs"
    GE = "ge"


@dataclass(frozen=True)
class ObjectSet:
    """An immutable subset of ``{1, ..., n}``."""

    mask: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("ground-set size must be nonnegative")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} has members outside 1..{self.n}")

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> "ObjectSet":
        mask = 0
        for i in members:
            if not 1 <= i <= n:
                raise ValueError(f"member {i} outside 1..{n}")
            mask |= 1 << (i - 1)
        return cls(mask, n)

    @classmethod
    def empty(cls, n: int) -> "ObjectSet":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "ObjectSet":
        return cls((1 << n) - 1, n)

    @cached_property
    def members(self) -> tuple[int, ...]:
        out = []
        m, i = self.mask, 1
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return tuple(out)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i: object) -> bool:
        return isinstance(i, int) and 1 <= i <= self.n and bool(self.mask >> (i - 1) & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def _check(self, other: "ObjectSet") -> None:
        if self.n != other.n:
            raise ValueError(f"ground-set sizes differ: {self.n} != {other.n}")

    def __and__(self, other: "ObjectSet") -> "ObjectSet":
        self._check(other)
        return ObjectSet(self.mask & other.mask, self.n)

    def __or__(self, other: "ObjectSet") -> "ObjectSet":
        self._check(other)
        return ObjectSet(self.mask | other.mask, self.n)

    def __sub__(self, other: "ObjectSet") -> "ObjectSet":
        self._check(other)
        return ObjectSet(self.mask & ~other.mask, self.n)

    def complement(self) -> "ObjectSet":
        return ObjectSet(~self.mask & ((1 << self.n) - 1), self.n)

    def issubset(self, other: "ObjectSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    @cached_property
    def _order_key(self) -> tuple:
        return (-len(self), self.members)

    def order_key(self) -> tuple:
        """Tie-break key: larger sets first, then lexicographically smallest members."""
        return self._order_key

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


def hamming_bonus(a: ObjectSet, b: ObjectSet) -> int:
    """Number of objects whose in/out decision agrees between ``a`` and ``b``."""
    a._check(b)
    return a.n - (a.mask ^ b.mask).bit_count()


def intersection_bonus(a: ObjectSet, b: ObjectSet) -> int:
    a._check(b)
    return (a.mask & b.mask).bit_count()


@dataclass(frozen=True)
class SolutionSequence:
    steps: tuple[ObjectSet, ...]

    def __init__(self, steps: Sequence[ObjectSet]):
        steps = tuple(steps)
        if len({s.n for s in steps}) > 1:
            raise ValueError("all steps must share the same ground-set size")
        object.__setattr__(self, "steps", steps)

    @property
    def T(self) -> int:
        return len(self.steps)

    def __getitem__(self, t: int) -> ObjectSet:
        """1-based access: ``seq[1]`` is the first step."""
        if not 1 <= t <= self.T:
            raise IndexError(t)
        return self.steps[t - 1]

    def __iter__(self) -> Iterator[ObjectSet]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class ValueBreakdown:
    total: Fraction
    profits: tuple[Fraction, ...]
    bonuses: tuple[Fraction, ...]


def sequence_value(inst: "MultistageInstance", seq: SolutionSequence) -> ValueBreakdown:
    """Evaluate ``sum_t p_t(S_t) + sum_t b(S_t, S_{t+1})`` for a feasible sequence."""
    if seq.T != inst.T:
        raise ValueError(f"sequence has {seq.T} steps, instance has {inst.T}")
    profits = []
    for t, (stage, s) in enumerate(zip(inst.stages, seq.steps), start=1):
        if s.n != inst.n:
            raise ValueError(f"step {t} uses n={s.n}, instance has n={inst.n}")
        if not stage.family.contains(s):
            raise FeasibilityError(t, f"step {t}: {s!r} is not feasible")
        profits.append(stage.profit(s))
    bonuses = [Fraction(inst.bonus(a, b)) for a, b in zip(seq.steps, seq.steps[1:])]
    return ValueBreakdown(sum(profits, Fraction(0)) + sum(bonuses, Fraction(0)),
                          tuple(profits), tuple(bonuses))


def parse_rational(value) -> Fraction:
    """Read an exact rational from an int, a ``"p/q"`` string or a decimal literal.

    Floats are rejected: their binary expansion is not what the user typed.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot read {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"
