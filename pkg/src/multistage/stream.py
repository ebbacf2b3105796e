"""Online game loop: stage sources, the lookahead-guarded view, and ``drive``.

A source emits stage ``s`` given the policy's choices ``S_1..S_{s-1-k}``
where ``k`` is the policy's lookahead.  The policy deciding ``S_t`` may look
at stages ``1..t+k`` through a :class:`StageView` and nothing else.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Protocol, Sequence, Union

from .core import (BonusModel, Evolution, FeasibilityError, ObjectSet,
                   ProtocolError, SolutionSequence)
from .family import MultistageInstance, StageInstance

UNBOUNDED = math.inf

Ratio = Union[Fraction, float]


def competitive_ratio(optimum: Fraction, value: Fraction) -> Ratio:
    """``optimum / value``; ``UNBOUNDED`` when the policy earns nothing but the optimum does."""
    if value > 0:
        return Fraction(optimum) / Fraction(value)
    if optimum > 0:
        return UNBOUNDED
    return Fraction(1)


class StageSource(Protocol):
    n: int
    T: int
    bonus: BonusModel
    evolution: Evolution
    max_lookahead: int

    def reset(self, lookahead: int) -> None: ...

    def stage(self, s: int, history: Sequence[ObjectSet]) -> StageInstance: ...

    def realized_instance(self) -> MultistageInstance: ...

    def descriptor(self) -> dict: ...


class InstanceSource:
    """A fixed instance; any lookahead is supported."""

    max_lookahead = 10 ** 9

    def __init__(self, instance: MultistageInstance, name: str = "instance"):
        self.instance = instance
        self.name = name
        self.n, self.T = instance.n, instance.T
        self.bonus, self.evolution = instance.bonus, instance.evolution

    def reset(self, lookahead: int) -> None:
        pass

    def stage(self, s: int, history: Sequence[ObjectSet]) -> StageInstance:
        return self.instance.stage(s)

    def realized_instance(self) -> MultistageInstance:
        return self.instance

    def descriptor(self) -> dict:
        return {"source": "instance", "name": self.name,
                "evolution": self.evolution.value, "bonus": self.bonus.value}


class StageView:
    """What a policy may see while deciding: stages ``1..limit`` only."""

    def __init__(self, n: int, T: int, bonus: BonusModel, evolution: Evolution, lookahead: int):
        self.n, self.T = n, T
        self.bonus, self.evolution = bonus, evolution
        self.lookahead = lookahead
        self.limit = 0
        self.max_accessed = 0
        self._stages: dict[int, StageInstance] = {}

    def _publish(self, s: int, stage: StageInstance) -> None:
        self._stages[s] = stage

    def stage(self, s: int) -> StageInstance:
        if not 1 <= s <= self.limit:
            raise ProtocolError(f"stage {s} is not visible (visible: 1..{self.limit})")
        self.max_accessed = max(self.max_accessed, s)
        return self._stages[s]

    __getitem__ = stage


class OnlinePolicy:
    """Base class for online policies.

    Subclasses set ``name``, ``lookahead`` and ``randomized`` and implement
    ``start`` (called once per run, with the view before any stage is
    visible) and ``choose``.
    """

    name = "policy"
    lookahead = 0
    randomized = False
    seed: Optional[int] = None

    def start(self, view: StageView) -> None:
        pass

    def choose(self, t: int, view: StageView) -> ObjectSet:
        raise NotImplementedError


class RunTrace:
    def __init__(self, sequence: SolutionSequence, instance: MultistageInstance, max_accessed: list[int]):
        self.sequence = sequence
        self.instance = instance
        self.max_accessed = max_accessed


def drive(policy: OnlinePolicy, source: StageSource) -> RunTrace:
    k = policy.lookahead
    if k > source.max_lookahead:
        raise ProtocolError(f"{policy.name} needs lookahead {k}, source supports {source.max_lookahead}")
    source.reset(k)
    T = source.T
    view = StageView(source.n, T, source.bonus, source.evolution, k)
    history: list[ObjectSet] = []
    emitted = 0
    accessed = []
    policy.start(view)
    for t in range(1, T + 1):
        horizon = min(t + k, T)
        while emitted < horizon:
            s = emitted + 1
            view._publish(s, source.stage(s, tuple(history[:max(0, s - 1 - k)])))
            emitted = s
        view.limit = horizon
        choice = policy.choose(t, view)
        if not isinstance(choice, ObjectSet) or choice.n != source.n:
            raise FeasibilityError(t, f"step {t}: {policy.name} returned {choice!r}")
        if not view._stages[t].family.contains(choice):
            raise FeasibilityError(t, f"step {t}: {policy.name} chose infeasible {choice!r}")
        if view.max_accessed > horizon:
            raise ProtocolError(f"step {t}: stage {view.max_accessed} observed beyond lookahead")
        accessed.append(view.max_accessed)
        history.append(choice)
    return RunTrace(SolutionSequence(history), source.realized_instance(), accessed)


def run_online(policy: OnlinePolicy, instance: MultistageInstance) -> SolutionSequence:
    return drive(policy, InstanceSource(instance)).sequence
