#!/usr/bin/env python3
"""Play every adversary game and tabulate certified versus target ratios.

Phase games are played at several horizons to show convergence; both the
raw ratio and the ratio with the last phase closed are reported.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from multistage.adversary import (GEHammingKnapsack, GEHammingPhases,
                                  GEIntersectionLookahead,
                                  GEIntersectionUnbounded, StaticHamming2Step,
                                  StaticHammingPhases,
                                  StaticIntersectionSingles, enumerate_plays)
from multistage.algorithms import make_policy
from multistage.harness import format_ratio, play, ratio_decimal


@dataclass
class Config:
    horizons: list[int] = field(default_factory=lambda: [10, 50, 200])
    epsilons: list[Fraction] = field(default_factory=lambda: [Fraction(1, 2), Fraction(1, 4)])
    exhaustive: bool = True


def games(cfg: Config):
    for eps in cfg.epsilons:
        yield "greedy", lambda eps=eps: StaticHamming2Step(eps)
    for T in (4, 6):
        yield "mp_algo", lambda T=T: StaticIntersectionSingles(T=T)
    yield "best_or_nothing", GEIntersectionUnbounded
    yield "best_or_nothing", GEHammingKnapsack
    for eps in (Fraction(1), Fraction(1, 2)):
        yield "balance", lambda eps=eps: GEIntersectionLookahead(eps)
    for T in cfg.horizons:
        yield "greedy", lambda T=T: StaticHammingPhases(T)
    for T in cfg.horizons:
        yield "best_or_nothing", lambda T=T: GEHammingPhases(T)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--horizons", type=int, nargs="+", default=Config().horizons)
    p.add_argument("--no-exhaustive", action="store_true", help="skip the all-policies minimum")
    args = p.parse_args(argv)
    cfg = Config(horizons=args.horizons, exhaustive=not args.no_exhaustive)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["adversary", "params", "policy", "certified", "certified_decimal", "adjusted",
                "target", "min_over_policies"])
    for policy, factory in games(cfg):
        pol = make_policy(policy)
        adv = factory()
        adv.reset(pol.lookahead)
        rep = play(pol, adv)
        minimum = ""
        plays = 2 ** 13
        if cfg.exhaustive and adv.T <= 6:
            fresh = factory
            if pol.lookahead:
                def fresh(factory=factory, k=pol.lookahead):
                    a = factory()
                    a.reset(k)
                    return a
            try:
                minimum = format_ratio(min(a.certified_ratio(s) for s, a in enumerate_plays(fresh, plays)))
            except RuntimeError:
                minimum = f"> {plays} plays"
        params = " ".join(f"{k}={v}" for k, v in sorted(adv.params().items())) or f"T={adv.T}"
        w.writerow([adv.kind, params, policy, format_ratio(rep.ratio), ratio_decimal(rep.ratio),
                    rep.extras.get("adjusted_ratio_decimal", ""), rep.extras.get("target_ratio", ""), minimum])
    return 0


if __name__ == "__main__":
    sys.exit(main())
