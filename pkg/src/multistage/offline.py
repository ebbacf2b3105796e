"""Exact offline optimum over the whole horizon.

Longest path through the layered graph whose layer ``t`` holds the feasible
sets of step ``t``.  The DP runs backwards so that, among all optimal
sequences, reconstruction can pick the stepwise-smallest one under the
oracle's set ordering.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import CapacityError, SolutionSequence, sequence_value
from .family import MultistageInstance
from .oracle import best_single

DEFAULT_LAYER_CAP = 2 ** 24


@dataclass(frozen=True)
class OfflineResult:
    optimum_value: Fraction
    optimal_sequence: SolutionSequence


def offline_optimum(inst: MultistageInstance, cap: Optional[int] = None,
                    layer_cap: int = DEFAULT_LAYER_CAP) -> OfflineResult:
    layers = [stage.candidates(cap) for stage in inst.stages]
    edges = sum(len(a) * len(b) for a, b in zip(layers, layers[1:]))
    if edges > layer_cap:
        raise CapacityError(f"layered graph has {edges} edges, cap is {layer_cap}")
    bonus = inst.bonus

    # future[t][k]: best value of steps t..T given S_t = layers[t][k]
    future: list[list[Fraction]] = [[] for _ in layers]
    succ: list[list[int]] = [[] for _ in layers]
    future[-1] = [p for _, p in layers[-1]]
    for t in range(len(layers) - 2, -1, -1):
        nxt, nxt_val = layers[t + 1], future[t + 1]
        cur_val, cur_succ = [], []
        for s, p in layers[t]:
            best_k, best_v = -1, None
            for k, (s2, _) in enumerate(nxt):
                v = bonus(s, s2) + nxt_val[k]
                if best_v is None or v > best_v or (
                        v == best_v and s2.order_key() < nxt[best_k][0].order_key()):
                    best_k, best_v = k, v
            cur_val.append(p + best_v)
            cur_succ.append(best_k)
        future[t], succ[t] = cur_val, cur_succ

    first = min(range(len(layers[0])),
                key=lambda k: (-future[0][k], layers[0][k][0].order_key()))
    chosen, k = [], first
    for t in range(len(layers)):
        chosen.append(layers[t][k][0])
        if t + 1 < len(layers):
            k = succ[t][k]
    return OfflineResult(future[0][first], SolutionSequence(chosen))


def offline_upper_bound(inst: MultistageInstance, cap: Optional[int] = None) -> Fraction:
    """``sum_t p_t(S*_t) + n (T - 1)``: per-step optima plus the largest possible bonuses."""
    return sum((best_single(st, cap)[1] for st in inst.stages), Fraction(0)) + inst.n * (inst.T - 1)


def brute_force_optimum(inst: MultistageInstance, cap: Optional[int] = None,
                        limit: int = 10 ** 5) -> OfflineResult:
    """Reference optimum by enumerating every feasible sequence (test oracle)."""
    layers = [st.family.enumerate(cap) for st in inst.stages]
    total = 1
    for layer in layers:
        total *= len(layer)
    if total > limit:
        raise CapacityError(f"{total} sequences exceed the brute-force limit {limit}")
    best = best_value = None
    for steps in itertools.product(*layers):
        seq = SolutionSequence(steps)
        v = sequence_value(inst, seq).total
        if best_value is None or v > best_value:
            best, best_value = seq, v
    return OfflineResult(best_value, best)

