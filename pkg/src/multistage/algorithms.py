"""Online policies for multistage subset maximization.

Each policy is a small stateful object driven by :func:`stream.drive`.  The
module-level functions (``greedy_keep_or_best`` and friends) run a policy on
a fixed instance and return the chosen sequence.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .core import (AssumptionViolation, DegenerateHorizonError, Evolution,
                   ModelMisuseError, ObjectSet, SolutionSequence)
from .family import (MultistageInstance, StageInstance, is_subset_feasible,
                     submodularity_witness, subset_feasibility_witness)
from .oracle import (AugmentedQuery, argmax, argmax_pair, argmax_restricted,
                     best_single)
from .stream import OnlinePolicy, StageView, run_online


def _require_ssfs(policy: OnlinePolicy, view: StageView) -> None:
    if view.evolution is not Evolution.SSFS:
        raise ModelMisuseError(f"{policy.name} is defined for SSFS instances only")


def _validate_stage(policy: OnlinePolicy, t: int, stage: StageInstance) -> None:
    if not is_subset_feasible(stage.family):
        s, sub = subset_feasibility_witness(stage.family)
        raise AssumptionViolation(f"{policy.name}: stage {t} is not subset feasible "
                                  f"({s!r} feasible, {sub!r} not)")
    w = submodularity_witness(stage.profit)
    if w is not None:
        raise AssumptionViolation(f"{policy.name}: profit at stage {t} is not submodular "
                                  f"(witness {w[0]!r}, {w[1]!r})")


class GreedyKeepOrBest(OnlinePolicy):
    """Take the per-step optimum when its profit exceeds ``n``, else keep the previous set."""

    name = "greedy"

    def start(self, view):
        _require_ssfs(self, view)
        self.prev: Optional[ObjectSet] = None

    def choose(self, t, view):
        stage = view.stage(t)
        best, profit = best_single(stage)
        if t == 1 or profit > view.n:
            choice = best
        else:
            choice = self.prev
            if not stage.family.contains(choice):
                raise ModelMisuseError(f"greedy: keeping {choice!r} is infeasible at step {t}")
        self.prev = choice
        return choice


class MPAlgo(OnlinePolicy):
    """Modified-profit greedy: reward large sets and overlap with the previous set."""

    name = "mp_algo"

    def start(self, view):
        _require_ssfs(self, view)
        if view.T < 2:
            raise DegenerateHorizonError("mp_algo needs T >= 2; use the plain optimum for T = 1")
        self.prev: Optional[ObjectSet] = None

    def choose(self, t, view):
        n, T = view.n, view.T
        kept = [0] * n if self.prev is None else [int(i in self.prev) for i in range(1, n + 1)]
        if t == 1:
            weights = [1] * n
        elif t < T:
            weights = [1 + k for k in kept]
        else:
            weights = kept
        choice, _ = argmax(AugmentedQuery(view.stage(t), weights))
        self.prev = choice
        return choice


class BestOrNothing(OnlinePolicy):
    """Per-step optimum when its profit is at least ``2n``, otherwise the empty set.

    At the last step the optimum is taken if the previous step took its
    optimum by the threshold rule, or if the last optimum is worth at least
    ``n``.  With ``T = 1`` the optimum is returned.
    """

    name = "best_or_nothing"

    def start(self, view):
        self.took_best = False

    def choose(self, t, view):
        n, T = view.n, view.T
        best, profit = best_single(view.stage(t))
        if T == 1:
            return best
        if t < T:
            self.took_best = profit >= 2 * n
            return best if self.took_best else ObjectSet.empty(n)
        if self.took_best or profit >= n:
            return best
        return ObjectSet.empty(n)


class ThreePart(OnlinePolicy):
    """Partition into three blocks and trade profit against staying inside one block.

    The ground set is padded with dummy objects (never feasible) up to a
    multiple of three; thresholds and bonus estimates use the padded size.
    Dummies never enter a chosen set, so choices live on the original ground set.
    """

    name = "three_part"

    def __init__(self, x: Fraction = Fraction(4, 3), validate: bool = True):
        self.x = Fraction(x)
        self.validate = validate

    def start(self, view):
        n = view.n
        self.padded_n = -(-n // 3) * 3
        size = self.padded_n // 3
        self.parts = [ObjectSet.of(range(k * size + 1, min((k + 1) * size, n) + 1), n)
                      for k in range(3)]
        self.prev: Optional[ObjectSet] = None
        self.prev_case: Optional[int] = None
        self.cases: list[int] = []

    def choose(self, t, view):
        stage = view.stage(t)
        if self.validate:
            _validate_stage(self, t, stage)
        big = self.padded_n
        best, profit = best_single(stage)
        if profit >= self.x * big:
            case, choice = 1, best
        else:
            options = [argmax_restricted(stage, part) for part in self.parts]
            if t >= 2 and self.prev_case != 1:
                case = 2
                home = next(k for k, part in enumerate(self.parts) if self.prev.issubset(part))
                scores = [p + Fraction(2 * big if k == home else big, 3)
                          for k, (_, p) in enumerate(options)]
            else:
                case = 3
                scores = [p for _, p in options]
            pick = max(range(3), key=lambda k: (scores[k], -k))
            choice = options[pick][0]
        self.prev, self.prev_case = choice, case
        self.cases.append(case)
        return choice


class Balance(OnlinePolicy):
    """Doubling rule over optimal two-step pairs; requires 1-lookahead."""

    name = "balance"
    lookahead = 1

    def start(self, view):
        self.z_prev: Optional[Fraction] = None
        self.pending: Optional[ObjectSet] = None
        self.last_case: Optional[int] = None
        self.cases: list[int] = []
        self.z: list[Fraction] = []

    def choose(self, t, view):
        if t < view.T:
            first, second, z = argmax_pair(view.stage(t), view.stage(t + 1), view.bonus)
        else:
            first, z = best_single(view.stage(t))
            second = ObjectSet.empty(view.n)
        if t == 1:
            case, choice = 2, first
        elif self.last_case == 3:
            case, choice = 1, first
        elif z > 2 * self.z_prev:
            case, choice = 2, first
        else:
            case, choice = 3, self.pending
        self.z_prev, self.pending, self.last_case = z, second, case
        self.cases.append(case)
        self.z.append(z)
        return choice


class RandPartition(OnlinePolicy):
    """Fix a uniformly random half ``A`` (the larger half when n is odd); always play the best set inside ``A``."""

    name = "rand_partition"
    randomized = True

    def __init__(self, seed: Optional[int] = None, part: Optional[Sequence[int]] = None,
                 validate: bool = True):
        self.seed = seed
        self.fixed_part = None if part is None else tuple(sorted(part))
        self.validate = validate

    def start(self, view):
        n = view.n
        if self.fixed_part is not None:
            members = self.fixed_part
        else:
            members = random.Random(self.seed).sample(range(1, n + 1), (n + 1) // 2)
        self.part = ObjectSet.of(members, n)

    def choose(self, t, view):
        stage = view.stage(t)
        if self.validate:
            _validate_stage(self, t, stage)
        return argmax_restricted(stage, self.part)[0]


class RandPairing(OnlinePolicy):
    """Solve consecutive two-step blocks optimally; a coin picks whether blocks start at step 1 or 2."""

    name = "rand_pairing"
    lookahead = 1
    randomized = True

    def __init__(self, seed: Optional[int] = None, offset: Optional[int] = None):
        if offset not in (None, 1, 2):
            raise ValueError("offset must be 1 or 2")
        self.seed = seed
        self.fixed_offset = offset

    def start(self, view):
        self.offset = self.fixed_offset or random.Random(self.seed).choice((1, 2))
        self.pending: Optional[ObjectSet] = None

    def choose(self, t, view):
        if t < self.offset:
            return best_single(view.stage(t))[0]
        if (t - self.offset) % 2 == 1:
            return self.pending
        if t == view.T:
            return best_single(view.stage(t))[0]
        first, self.pending, _ = argmax_pair(view.stage(t), view.stage(t + 1), view.bonus)
        return first


POLICIES = {
    "greedy": GreedyKeepOrBest,
    "mp_algo": MPAlgo,
    "best_or_nothing": BestOrNothing,
    "three_part": ThreePart,
    "balance": Balance,
    "rand_partition": RandPartition,
    "rand_pairing": RandPairing,
}


def make_policy(name: str, *, seed: Optional[int] = None, x: Optional[Fraction] = None) -> OnlinePolicy:
    try:
        cls = POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}") from None
    if cls is ThreePart:
        return ThreePart() if x is None else ThreePart(x)
    if cls.randomized:
        return cls(seed=seed)
    return cls()


def greedy_keep_or_best(inst: MultistageInstance) -> SolutionSequence:
    return run_online(GreedyKeepOrBest(), inst)


def mp_algo(inst: MultistageInstance) -> SolutionSequence:
    return run_online(MPAlgo(), inst)


def best_or_nothing(inst: MultistageInstance) -> SolutionSequence:
    return run_online(BestOrNothing(), inst)


def three_part(inst: MultistageInstance, x: Fraction = Fraction(4, 3)) -> SolutionSequence:
    return run_online(ThreePart(x), inst)


def balance(inst: MultistageInstance) -> SolutionSequence:
    return run_online(Balance(), inst)


def rand_partition(inst: MultistageInstance, seed: Optional[int] = None) -> SolutionSequence:
    return run_online(RandPartition(seed), inst)


def rand_pairing(inst: MultistageInstance, seed: Optional[int] = None) -> SolutionSequence:
    return run_online(RandPairing(seed), inst)
