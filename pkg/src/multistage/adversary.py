"""Adaptive adversaries that force the lower bounds on the competitive ratio.

An adversary is a stage source whose stage ``s`` is a pure function of the
policy's choices ``S_1..S_{s-1-k}`` (``k`` = the policy's lookahead).  Once a
stage is emitted it is recorded and never revised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import mpmath

from .core import (BonusModel, Evolution, FeasibilityError, ObjectSet,
                   PrecisionError, ProtocolError, SolutionSequence,
                   parse_rational, sequence_value)
from .family import (AllSubsets, CardinalityAtMost, ExplicitFamily, Knapsack,
                     LinearProfit, MultistageInstance, StageInstance,
                     TableProfit, zero_profit)
from .offline import offline_optimum
from .stream import Ratio, competitive_ratio


class Adversary:
    kind = "adversary"
    max_lookahead = 0
    n: int
    T: int
    bonus: BonusModel
    evolution: Evolution

    def __init__(self, lookahead: int = 0):
        self.reset(lookahead)

    # -- protocol -----------------------------------------------------------

    def reset(self, lookahead: int) -> None:
        if not 0 <= lookahead <= self.max_lookahead:
            raise ProtocolError(f"{self.kind} supports lookahead up to {self.max_lookahead}, not {lookahead}")
        self.lookahead = lookahead
        self.history: tuple[ObjectSet, ...] = ()
        self.emitted: dict[int, tuple[tuple[ObjectSet, ...], StageInstance]] = {}

    def next_stage(self, t: int, observed_choices: Sequence[ObjectSet]) -> StageInstance:
        observed = tuple(observed_choices)
        if not 1 <= t <= self.T:
            raise ProtocolError(f"stage {t} outside horizon 1..{self.T}")
        expected = max(0, t - 1 - self.lookahead)
        if len(observed) != expected:
            raise ProtocolError(f"stage {t} must be emitted after exactly {expected} choices, got {len(observed)}")
        common = min(len(observed), len(self.history))
        if observed[:common] != self.history[:common]:
            raise ProtocolError("observed choices contradict the recorded history")
        if len(observed) > len(self.history):
            self.history = observed
        if t in self.emitted:
            if self.emitted[t][0] != observed:
                raise ProtocolError(f"stage {t} was already emitted for a different history")
            return self.emitted[t][1]
        stage = self._build(t, observed)
        if not stage.family.contains(ObjectSet.empty(self.n)):
            raise AssertionError("adversary emitted a family without the empty set")
        self.emitted[t] = (observed, stage)
        return stage

    stage = next_stage

    def _build(self, t: int, history: tuple[ObjectSet, ...]) -> StageInstance:
        raise NotImplementedError

    def realized_instance(self) -> MultistageInstance:
        missing = [t for t in range(1, self.T + 1) if t not in self.emitted]
        if missing:
            raise ProtocolError(f"stages {missing} have not been emitted yet")
        return MultistageInstance(self.n, self.T, self.bonus,
                                  [self.emitted[t][1] for t in range(1, self.T + 1)],
                                  self.evolution)

    def params(self) -> dict:
        return {}

    def descriptor(self) -> dict:
        d = {"source": "adversary", "kind": self.kind, "n": self.n, "T": self.T,
             "evolution": self.evolution.value, "bonus": self.bonus.value}
        d.update({k: str(v) for k, v in self.params().items()})
        return d

    def target_ratio(self) -> Optional[Ratio]:
        """The lower bound the construction is designed to force (None if only asymptotic)."""
        return None

    def certified_ratio(self, seq: SolutionSequence) -> Ratio:
        inst = self.realized_instance()
        value = sequence_value(inst, seq).total
        return competitive_ratio(offline_optimum(inst).optimum_value, value)

    def play_choices(self, choices: Sequence[ObjectSet]) -> SolutionSequence:
        """Feed a fixed choice sequence through the protocol (scripted play)."""
        self.reset(self.lookahead)
        hist: list[ObjectSet] = []
        for t in range(1, self.T + 1):
            for s in range(t, min(t + self.lookahead, self.T) + 1):
                if s not in self.emitted:
                    self.next_stage(s, hist[:max(0, s - 1 - self.lookahead)])
            if not self.emitted[t][1].family.contains(choices[t - 1]):
                raise FeasibilityError(t)
            hist.append(choices[t - 1])
        return SolutionSequence(hist)


def _explicit(n: int, sets) -> ExplicitFamily:
    return ExplicitFamily(n, [ObjectSet.of(s, n) if not isinstance(s, ObjectSet) else s for s in sets])


class StaticHamming2Step(Adversary):
    """Two steps over the family {∅, {1}, {2..n}} with n = 1 + ceil(1/eps)."""

    kind = "static-hamming"
    bonus = BonusModel.HAMMING
    evolution = Evolution.SSFS

    def __init__(self, epsilon=Fraction(1, 2), lookahead: int = 0):
        self.epsilon = parse_rational(epsilon)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        self.n = 1 + math.ceil(1 / self.epsilon)
        self.T = 2
        n = self.n
        self.s1, self.s2 = ObjectSet.of([1], n), ObjectSet.of(range(2, n + 1), n)
        self.family = _explicit(n, [ObjectSet.empty(n), self.s1, self.s2])
        super().__init__(lookahead)

    def params(self):
        return {"epsilon": self.epsilon}

    def target_ratio(self):
        return Fraction(2 * self.n - 1, self.n)

    def _build(self, t, history):
        n = self.n
        if t == 1:
            return StageInstance(self.family, zero_profit(n))
        first = history[0]
        if not first:
            weights = [1] * n
        elif first == self.s1:
            weights = [0] + [1] * (n - 1)
        elif first == self.s2:
            weights = [n] + [0] * (n - 1)
        else:
            raise ProtocolError(f"step 1 choice {first!r} is not in the family")
        return StageInstance(self.family, LinearProfit(weights))


class StaticHammingPhases(Adversary):
    """Two items, family {∅, {1}, {2}}, profits shifting in phases.

    The opening part pays 1 for item 2 until the policy takes item 2.  Each
    phase then pays 3 for the item the policy did not hold, and afterwards
    pays 1 only for switching away from whatever the policy took.
    """

    kind = "static-hamming-phases"
    bonus = BonusModel.HAMMING
    evolution = Evolution.SSFS

    def __init__(self, T: int = 50, lookahead: int = 0):
        if T < 1:
            raise ValueError("T must be positive")
        self.n, self.T = 2, T
        self.family = _explicit(2, [[], [1], [2]])
        super().__init__(lookahead)

    def params(self):
        return {"T": self.T}

    def target_ratio(self):
        return Fraction(3, 2)

    def _walk(self, history) -> Iterator[tuple[str, int]]:
        """Yield the (mode, item) pair governing each step 1..len(history)+1."""
        mode, item = "opening", 2
        yield mode, item
        for s in history:
            picked = s.members[0] if s else None
            if mode == "opening":
                if picked == 2:
                    mode, item = "start", 2
            elif mode == "start":
                item = picked or item
                mode = "wait"
            elif picked == 3 - item:
                mode, item = "start", 3 - item
            yield mode, item

    def _build(self, t, history):
        *_, (mode, item) = self._walk(history[:t - 1])
        if mode == "opening":
            weights = [0, 1]
        elif mode == "start":
            # item held at t-1 pays 1, the other item pays 3
            weights = [1, 3] if item == 1 else [3, 1]
        else:
            weights = [0, 1] if item == 1 else [1, 0]
        return StageInstance(self.family, LinearProfit(weights))

    def phases(self, seq: SolutionSequence) -> list[dict]:
        modes = list(self._walk(seq.steps[:-1]))
        out: list[dict] = []
        for t, (mode, _) in enumerate(modes, start=1):
            if mode == "start":
                if out:
                    out[-1]["regular"] = True
                    out[-1]["end"] = t - 1
                out.append({"start": t, "end": self.T, "regular": False})
        return out

    def extension(self, seq: SolutionSequence):
        """One extra step that closes a phase ending by default (None if nothing to close)."""
        *_, (mode, item) = self._walk(seq.steps)
        if mode != "wait":
            return None
        weights = [0, 1] if item == 1 else [1, 0]
        return StageInstance(self.family, LinearProfit(weights)), ObjectSet.of([3 - item], 2)


class StaticIntersectionSingles(Adversary):
    """n = T objects, at most one per step; a taken object pays nothing afterwards."""

    kind = "static-intersection"
    bonus = BonusModel.INTERSECTION
    evolution = Evolution.SSFS

    def __init__(self, T: Optional[int] = None, epsilon=None, lookahead: int = 0):
        if T is None:
            if epsilon is None:
                raise ValueError("give T or epsilon")
            T = math.ceil(1 / parse_rational(epsilon))
        if T < 1:
            raise ValueError("T must be positive")
        self.n = self.T = T
        self.family = CardinalityAtMost(T, 1)
        super().__init__(lookahead)

    def params(self):
        return {"T": self.T}

    def target_ratio(self):
        return Fraction(2 * self.T - 1, self.T)

    def _build(self, t, history):
        taken = set()
        for s in history[:t - 1]:
            taken.update(s.members)
        return StageInstance(self.family, LinearProfit([0 if i in taken else 1 for i in range(1, self.n + 1)]))


class GEHammingKnapsack(Adversary):
    """Two-step knapsack: unit weights and profit alpha, then the step-1 items become too heavy."""

    kind = "ge-hamming-knapsack"
    bonus = BonusModel.HAMMING
    evolution = Evolution.GE

    def __init__(self, alpha=Fraction(169, 408), n: int = 2, lookahead: int = 0):
        self.alpha = parse_rational(alpha)
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.n, self.T = n, 2
        super().__init__(lookahead)

    def params(self):
        return {"alpha": self.alpha}

    def target_ratio(self):
        return (1 + self.alpha) / (1 - self.alpha)

    def _build(self, t, history):
        n = self.n
        if t == 1:
            return StageInstance(Knapsack(n, [1] * n, n), LinearProfit([self.alpha] * n))
        first = history[0]
        weights = [n + 1 if i in first else 1 for i in range(1, n + 1)]
        profits = [0 if i in first else 1 for i in range(1, n + 1)]
        return StageInstance(Knapsack(n, weights, n - len(first)), LinearProfit(profits))


class GEHammingPhases(Adversary):
    """One item, forbidden at step 1; taking it blocks it for the following step.

    Phases start at step 2 and after each block; the item pays ``beta`` at a
    phase start and ``gamma`` elsewhere.
    """

    kind = "ge-hamming-phases"
    bonus = BonusModel.HAMMING
    evolution = Evolution.GE

    def __init__(self, T: int = 50, beta=None, gamma=None, lookahead: int = 0):
        if beta is None or gamma is None:
            beta, gamma, _ = phase_constants_1696()
        self.beta, self.gamma = parse_rational(beta), parse_rational(gamma)
        if T < 2:
            raise ValueError("T must be at least 2")
        self.n, self.T = 1, T
        self.blocked_family = _explicit(1, [[]])
        self.open_family = AllSubsets(1)
        super().__init__(lookahead)

    def params(self):
        return {"T": self.T, "beta": self.beta, "gamma": self.gamma}

    def target_ratio(self):
        return 2 / self.beta

    def _roles(self, history, upto: int) -> list[str]:
        """Role of steps 1..upto: 'blocked', 'start' or 'inner'."""
        roles = ["blocked"]
        for t in range(2, upto + 1):
            prev = roles[t - 2]
            took = t - 2 < len(history) and bool(history[t - 2])
            if t == 2:
                roles.append("start")
            elif prev != "blocked" and took:
                roles.append("blocked")
            elif prev == "blocked":
                roles.append("start")
            else:
                roles.append("inner")
        return roles

    def _stage_for(self, role: str) -> StageInstance:
        if role == "blocked":
            return StageInstance(self.blocked_family, TableProfit(1, {(1,): self.gamma}))
        value = self.beta if role == "start" else self.gamma
        return StageInstance(self.open_family, TableProfit(1, {(1,): value}))

    def _build(self, t, history):
        return self._stage_for(self._roles(history, t)[-1])

    def phases(self, seq: SolutionSequence) -> list[dict]:
        roles = self._roles(seq.steps, self.T)
        out: list[dict] = []
        for t, role in enumerate(roles, start=1):
            if role == "start":
                out.append({"start": t, "end": self.T, "regular": False})
            elif role == "blocked" and out:
                out[-1]["end"], out[-1]["regular"] = t, True
        return out

    def extension(self, seq: SolutionSequence):
        """Two extra steps closing a default-ended phase: the policy takes the item, then it is blocked."""
        roles = self._roles(seq.steps, self.T)
        if roles[-1] == "blocked":
            return None
        closing = (self._stage_for("blocked"), ObjectSet.empty(1))
        if seq.steps[-1]:
            return [closing]
        return [(self._stage_for("inner"), ObjectSet.full(1)), closing]


class GEIntersectionUnbounded(Adversary):
    """Two items; whichever item the policy did not take at step 1 is the only one left at step 2."""

    kind = "ge-intersection"
    bonus = BonusModel.INTERSECTION
    evolution = Evolution.GE

    def __init__(self, T: int = 2, lookahead: int = 0):
        if T < 2:
            raise ValueError("T must be at least 2")
        self.n, self.T = 2, T
        super().__init__(lookahead)

    def params(self):
        return {"T": self.T}

    def target_ratio(self):
        return math.inf

    def _build(self, t, history):
        if t == 1:
            return StageInstance(_explicit(2, [[], [1], [2]]), zero_profit(2))
        if t == 2:
            keep = 1 if 2 in history[0] else 2
            return StageInstance(_explicit(2, [[], [keep]]), zero_profit(2))
        return StageInstance(_explicit(2, [[]]), zero_profit(2))


# -- the 4 - eps construction for 1-lookahead ---------------------------------

@dataclass(frozen=True)
class LookaheadSequence:
    epsilon: Fraction
    a_prime: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    scale: int

    @property
    def T(self) -> int:
        return len(self.a_prime)

    @property
    def a(self) -> tuple[int, ...]:
        return tuple(int(x * self.scale) for x in self.a_prime)


def lookahead_sequence(epsilon, max_steps: int = 10_000) -> LookaheadSequence:
    """Build the sizes ``a'_1, ..., a'_T`` for the 4 - eps lookahead adversary.

    ``a'_t = (4 - eps) a'_{t-1} - sum_{j<t} a'_j`` until the next term would
    not exceed the current one; the last term is then repeated twice.  The
    ratio sequence ``b_t`` is checked to decrease while it is at least 1.
    """
    eps = parse_rational(epsilon)
    if not 0 < eps < 4:
        raise ValueError("epsilon must lie in (0, 4)")
    c = 4 - eps
    a = [Fraction(1)]
    bs: list[Fraction] = []
    total = Fraction(1)
    while True:
        b = (c * a[-1] - total) / a[-1]
        if bs and bs[-1] >= 1 and not b < bs[-1]:
            raise AssertionError(f"b sequence not decreasing at t={len(bs) + 1}: {bs[-1]} -> {b}")
        bs.append(b)
        if b <= 1:
            break
        if len(a) >= max_steps:
            raise RuntimeError(f"no t with b_t <= 1 within {max_steps} steps")
        nxt = c * a[-1] - total
        a.append(nxt)
        total += nxt
    a += [a[-1], a[-1]]
    scale = math.lcm(*(x.denominator for x in a))
    return LookaheadSequence(eps, tuple(a), tuple(bs), scale)


class GEIntersectionLookahead(Adversary):
    """Rows of items; row i at step t offers the first ``a_t`` items of row i.

    A row is usable again only if the policy has not touched it two or more
    steps ago.  Taking the same row at t-1 and t confirms; after a
    confirmation (or an empty choice) only the empty set is offered from two
    steps later on.
    """

    kind = "ge-intersection-lookahead"
    bonus = BonusModel.INTERSECTION
    evolution = Evolution.GE
    max_lookahead = 1

    def __init__(self, epsilon=1, lookahead: int = 1):
        self.sequence = lookahead_sequence(epsilon)
        self.sizes = self.sequence.a
        self.T = self.sequence.T
        self.width = max(self.sizes)
        self.n = self.T * self.width
        super().__init__(lookahead)

    def params(self):
        return {"epsilon": self.sequence.epsilon}

    def target_ratio(self):
        return 4 - self.sequence.epsilon

    def row_set(self, i: int, t: int) -> ObjectSet:
        base = (i - 1) * self.width
        return ObjectSet.of(range(base + 1, base + self.sizes[t - 1] + 1), self.n)

    def _row_of(self, s: ObjectSet, t: int) -> Optional[int]:
        for i in range(1, self.T + 1):
            if s == self.row_set(i, t):
                return i
        raise ProtocolError(f"choice {s!r} at step {t} is not a row set")

    def cutoff(self, history) -> Optional[int]:
        """Last step with row sets on offer, if already determined by ``history``."""
        prev_row = None
        for tau, s in enumerate(history, start=1):
            if not s:
                return tau + 1
            row = self._row_of(s, tau)
            if prev_row == row:
                return tau + 1
            prev_row = row
        return None

    def confirm_ratio(self, t: int) -> Fraction:
        """Optimum over policy value when the policy confirms at step ``t``."""
        a = self.sizes
        if t + 1 <= self.T:
            return Fraction(sum(a[:t]), a[t - 2])
        return Fraction(sum(a[:self.T - 1]), a[self.T - 2])

    def _build(self, t, history):
        usable = history[:max(0, t - 2)]
        cutoff = self.cutoff(usable)
        n = self.n
        if cutoff is not None and t > cutoff:
            return StageInstance(_explicit(n, [[]]), zero_profit(n))
        used = {self._row_of(s, tau) for tau, s in enumerate(usable, start=1) if s}
        rows = [i for i in range(1, self.T + 1) if t <= 2 or i not in used]
        return StageInstance(_explicit(n, [ObjectSet.empty(n)] + [self.row_set(i, t) for i in rows]),
                             zero_profit(n))


# -- constants for the ~1.696 construction ----------------------------------

def phase_constants_1696(max_denominator: int = 10 ** 7,
                         tolerance=Fraction(1, 10 ** 6)) -> tuple[Fraction, Fraction, Fraction]:
    """Rational ``(beta, gamma, alpha)`` for the one-item phase adversary.

    beta is the real root of ``beta^3 + 2 beta - 4 = 0`` (where
    ``1 + gamma = 2 / beta`` with ``gamma = (sqrt(4 beta + 1) - 1) / 2``),
    evaluated by Cardano's formula, and ``alpha = 2 / beta``.
    """
    tolerance = parse_rational(tolerance)
    with mpmath.workdps(60):
        r = mpmath.cbrt(9 + mpmath.sqrt(87))
        beta_exact = (mpmath.cbrt(6 * (9 + mpmath.sqrt(87)) ** 2) - mpmath.cbrt(36)) / (3 * r)
        beta = Fraction(mpmath.nstr(beta_exact, 50)).limit_denominator(max_denominator)
        gamma_exact = (mpmath.sqrt(4 * mpmath.mpf(beta.numerator) / beta.denominator + 1) - 1) / 2
        gamma = Fraction(mpmath.nstr(gamma_exact, 50)).limit_denominator(max_denominator)
        alpha_exact = Fraction(mpmath.nstr(2 / beta_exact, 50))
    alpha = 2 / beta
    if abs(1 + gamma - alpha) > tolerance or abs(alpha - alpha_exact) > tolerance:
        raise PrecisionError(f"denominator bound {max_denominator} cannot reach tolerance {tolerance}")
    return beta, gamma, alpha


ADVERSARIES: dict[str, Callable[..., Adversary]] = {
    StaticHamming2Step.kind: StaticHamming2Step,
    StaticHammingPhases.kind: StaticHammingPhases,
    StaticIntersectionSingles.kind: StaticIntersectionSingles,
    GEHammingKnapsack.kind: GEHammingKnapsack,
    GEHammingPhases.kind: GEHammingPhases,
    GEIntersectionUnbounded.kind: GEIntersectionUnbounded,
    GEIntersectionLookahead.kind: GEIntersectionLookahead,
}


def make_adversary(kind: str, *, epsilon=None, n: Optional[int] = None, T: Optional[int] = None,
                   alpha=None, lookahead: int = 0) -> Adversary:
    """Build an adversary from loosely typed CLI-style options."""
    if kind not in ADVERSARIES:
        raise ValueError(f"unknown adversary {kind!r}; choose from {sorted(ADVERSARIES)}")
    kw: dict = {"lookahead": lookahead}
    if kind == StaticHamming2Step.kind:
        kw["epsilon"] = epsilon if epsilon is not None else Fraction(1, 2)
    elif kind == StaticIntersectionSingles.kind:
        if T is not None:
            kw["T"] = T
        else:
            kw["epsilon"] = epsilon if epsilon is not None else Fraction(1, 4)
    elif kind == GEHammingKnapsack.kind:
        if alpha is not None:
            kw["alpha"] = alpha
        if n is not None:
            kw["n"] = n
    elif kind == GEIntersectionLookahead.kind:
        kw["epsilon"] = epsilon if epsilon is not None else 1
    elif T is not None:
        kw["T"] = T
    return ADVERSARIES[kind](**kw)


def enumerate_plays(factory: Callable[[], Adversary],
                    limit: int = 200_000) -> Iterator[tuple[SolutionSequence, Adversary]]:
    """Every play path of every deterministic policy against a deterministic adversary.

    Since the adversary reacts only to past choices, a deterministic policy
    is fully described by its path of choices; the game tree is explored by
    DFS, with a fresh adversary replayed for each completed path.
    """
    probe = factory()
    k = probe.lookahead
    count = 0

    def stage_after(prefix: list[ObjectSet]) -> StageInstance:
        adv = factory()
        t = len(prefix) + 1
        for s in range(1, min(t + k, adv.T) + 1):
            adv.next_stage(s, prefix[:max(0, s - 1 - k)])
        return adv.emitted[t][1]

    def walk(prefix: list[ObjectSet]):
        nonlocal count
        if len(prefix) == probe.T:
            count += 1
            if count > limit:
                raise RuntimeError(f"more than {limit} play paths")
            adv = factory()
            yield adv.play_choices(prefix), adv
            return
        for s in stage_after(prefix).family.enumerate():
            yield from walk(prefix + [s])

    yield from walk([])


def realized_with_extension(adv: Adversary, seq: SolutionSequence):
    """Instance and sequence with the default-ended last phase closed (phase adversaries only)."""
    ext = adv.extension(seq)
    inst = adv.realized_instance()
    if ext is None:
        return inst, seq
    if isinstance(ext, tuple):
        ext = [ext]
    stages = list(inst.stages) + [st for st, _ in ext]
    steps = list(seq.steps) + [s for _, s in ext]
    return inst.with_stages(stages), SolutionSequence(steps)


def adjusted_ratio(adv: Adversary, seq: SolutionSequence) -> Ratio:
    inst, ext_seq = realized_with_extension(adv, seq)
    value = sequence_value(inst, ext_seq).total
    return competitive_ratio(offline_optimum(inst).optimum_value, value)
