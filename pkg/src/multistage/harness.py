"""Game harness: play policies against instances, generators and adversaries.

``play`` runs one game and returns a :class:`GameReport` with exact values;
``sweep`` runs a grid of random instances and aggregates the worst ratio
against the policy's proven guarantee.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .adversary import Adversary, adjusted_ratio
from .algorithms import POLICIES, make_policy
from .core import (BonusModel, Evolution, ObjectSet, SolutionSequence,
                   format_rational, sequence_value)
from .family import (AllSubsets, CardinalityAtMost, ExplicitFamily, Knapsack,
                     LinearProfit, MatchingEdges, MultistageInstance,
                     StageInstance, TableProfit)
from .offline import offline_optimum
from .oracle import best_single
from .stream import (UNBOUNDED, InstanceSource, OnlinePolicy, Ratio,
                     StageSource, competitive_ratio, drive)

log = logging.getLogger(__name__)


def format_ratio(r: Ratio) -> str:
    return "unbounded" if r == UNBOUNDED else format_rational(r)


def ratio_decimal(r: Ratio) -> str:
    return "inf" if r == UNBOUNDED else f"{float(r):.6f}"


# -- guarantees ---------------------------------------------------------------

@dataclass(frozen=True)
class Guarantee:
    """``multiplier * value + additive >= optimum``."""

    label: str
    multiplier: Fraction
    additive: Fraction = Fraction(0)

    def holds(self, value: Fraction, optimum: Fraction) -> bool:
        return self.multiplier * value + self.additive >= optimum


def guarantee_for(policy: str, inst: MultistageInstance, optimum: Fraction) -> Optional[Guarantee]:
    """The proven per-run guarantee for ``policy`` on this model, if one applies."""
    T, ham = inst.T, inst.bonus is BonusModel.HAMMING
    ssfs = inst.evolution is Evolution.SSFS
    if policy == "greedy" and ssfs and ham:
        return Guarantee("2", Fraction(2))
    if policy == "mp_algo" and ssfs and not ham and T >= 4:
        m = 2 / (1 - Fraction(1, T - 1))
        return Guarantee(format_rational(m), m)
    if policy == "best_or_nothing" and ham and T >= 2:
        m = 3 + Fraction(1, T - 1)
        return Guarantee(format_rational(m), m)
    if policy == "three_part" and ham and T >= 2:
        return Guarantee("21/8 + f*/(T-1) + 2(T-1)", Fraction(21, 8),
                         optimum / (T - 1) + 2 * (T - 1))
    if policy == "balance" and not ham:
        return Guarantee("4", Fraction(4))
    return None


def expected_guarantee(policy: str, inst: MultistageInstance, optimum: Fraction) -> Optional[Guarantee]:
    """Guarantee on the exact expectation of a randomized policy."""
    if policy == "rand_pairing" and inst.bonus is BonusModel.INTERSECTION:
        return Guarantee("2", Fraction(2))
    if policy == "rand_partition" and inst.bonus is BonusModel.HAMMING:
        return Guarantee("2 + (2/n) f* + 2(T-1)", Fraction(2),
                         Fraction(2, max(inst.n, 1)) * optimum + 2 * (inst.T - 1))
    return None


# -- reports ------------------------------------------------------------------

@dataclass
class GameReport:
    policy: str
    source: dict
    T: int
    n: int
    value: Fraction
    profits: tuple
    bonuses: tuple
    optimum: Fraction
    ratio: Ratio
    trace: list
    seed: Optional[int] = None
    bound: Optional[str] = None
    within_bound: Optional[bool] = None
    extras: dict = field(default_factory=dict)

    @property
    def model(self) -> str:
        return f"{self.source.get('evolution')}/{self.source.get('bonus')}"

    def to_dict(self) -> dict:
        return {
            "policy": self.policy, "source": self.source, "T": self.T, "n": self.n,
            "value": format_rational(self.value),
            "profits": [format_rational(p) for p in self.profits],
            "bonuses": [format_rational(b) for b in self.bonuses],
            "optimum": format_rational(self.optimum),
            "ratio": format_ratio(self.ratio),
            "trace": self.trace, "seed": self.seed, "bound": self.bound,
            "within_bound": self.within_bound, "extras": self.extras,
        }

    def outcome(self) -> dict:
        """Everything except the source descriptor and adversary extras (for replay comparison)."""
        d = self.to_dict()
        del d["source"], d["extras"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def csv_row(self) -> dict:
        return {"policy": self.policy, "model": self.model, "n": self.n, "T": self.T,
                "seed": self.seed if self.seed is not None else self.source.get("seed", ""),
                "value": format_rational(self.value), "optimum": format_rational(self.optimum),
                "ratio": format_ratio(self.ratio), "bound": self.bound or "",
                "within_bound": "" if self.within_bound is None else str(self.within_bound).lower()}

    def summary(self) -> str:
        lines = [f"policy    {self.policy}  ({self.model}, n={self.n}, T={self.T})",
                 f"value     {format_rational(self.value)}  (profit {format_rational(sum(self.profits, Fraction(0)))}, "
                 f"bonus {format_rational(sum(self.bonuses, Fraction(0)))})",
                 f"optimum   {format_rational(self.optimum)}",
                 f"ratio     {format_ratio(self.ratio)}  ~ {ratio_decimal(self.ratio)}"]
        if self.bound is not None:
            lines.append(f"bound     {self.bound}  within: {self.within_bound}")
        for key in ("target_ratio", "adjusted_ratio"):
            if key in self.extras:
                v = self.extras[key]
                lines.append(f"{key.replace('_', ' '):<9} {v}  ~ {self.extras[key + '_decimal']}")
        return "\n".join(lines)


CSV_COLUMNS = ["policy", "model", "n", "T", "seed", "value", "optimum", "ratio", "bound", "within_bound"]


def reports_to_csv(reports: Iterable[GameReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def reports_to_jsonl(reports: Iterable[GameReport]) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


# -- random instances ---------------------------------------------------------

CLOSED_FAMILIES = ("all", "cardinality", "knapsack", "matching")
FAMILY_KINDS = CLOSED_FAMILIES + ("explicit",)


@dataclass(frozen=True)
class RandomInstanceSpec:
    """Recipe for a seeded random instance.

    ``family`` is a family kind, ``"closed"`` (random downward-closed kind)
    or ``"mixed"`` (any kind).  ``profit`` is ``"linear"``, ``"table"`` or
    ``"submodular"`` (budget-additive, stored as a table).  Profit values are
    rationals with denominators at most ``max_denominator``, scaled so that
    per-item profits fall in ``[0, scale]``.
    """

    evolution: str = "ge"
    bonus: str = "hamming"
    n: int = 3
    T: int = 3
    family: str = "mixed"
    profit: str = "linear"
    seed: int = 0
    max_denominator: int = 16
    scale: int = 3

    def descriptor(self) -> dict:
        d = {k: v for k, v in asdict(self).items()}
        d["source"] = "random"
        return d


def _rational(rng: random.Random, hi: Fraction, den: int) -> Fraction:
    """Uniform on the grid ``{0, 1/den, ..., hi}``."""
    return Fraction(rng.randint(0, int(hi * den)), den)


def _random_family(rng: random.Random, kind: str, n: int, spec: RandomInstanceSpec):
    if kind == "closed":
        kind = rng.choice(CLOSED_FAMILIES)
    elif kind == "mixed":
        kind = rng.choice(FAMILY_KINDS)
    if kind == "all":
        return AllSubsets(n)
    if kind == "cardinality":
        return CardinalityAtMost(n, rng.randint(0, n))
    if kind == "knapsack":
        weights = [_rational(rng, Fraction(3), 4) for _ in range(n)]
        return Knapsack(n, weights, _rational(rng, Fraction(sum(weights)), 4))
    if kind == "matching":
        verts = max(2, n)
        edges = [tuple(rng.sample(range(1, verts + 1), 2)) for _ in range(n)]
        return MatchingEdges(edges)
    if kind == "explicit":
        masks = {rng.randrange(2 ** n) for _ in range(rng.randint(1, min(2 ** n, 8)))}
        return ExplicitFamily(n, [ObjectSet(m, n) for m in masks])
    raise ValueError(f"unknown family kind {kind!r}")


def _random_profit(rng: random.Random, kind: str, family, n: int, spec: RandomInstanceSpec, den: int):
    # one denominator per stage keeps sums over sets on the same grid
    scale = Fraction(spec.scale)
    # occasionally damp a whole stage so thresholds fall on both sides
    damp = rng.choice((Fraction(1), Fraction(1), Fraction(1, 4), Fraction(2)))
    if kind == "linear":
        return LinearProfit([_rational(rng, scale * damp, den) for _ in range(n)])
    if kind == "table":
        return TableProfit(n, {s.mask: _rational(rng, scale * damp * max(len(s), 1), den)
                               for s in family.enumerate()})
    if kind == "submodular":
        weights = [_rational(rng, scale * damp, den) for _ in range(n)]
        cap = _rational(rng, sum(weights, Fraction(0)), den)
        return TableProfit(n, {m: min(cap, sum((weights[i] for i in range(n) if m >> i & 1), Fraction(0)))
                               for m in range(2 ** n)})
    raise ValueError(f"unknown profit kind {kind!r}")


def generate_instance(spec: RandomInstanceSpec) -> MultistageInstance:
    rng = random.Random(repr(sorted(asdict(spec).items())))
    n, T = spec.n, spec.T
    ssfs = Evolution(spec.evolution) is Evolution.SSFS
    shared = _random_family(rng, spec.family, n, spec) if ssfs else None
    stages = []
    for _ in range(T):
        family = shared if ssfs else _random_family(rng, spec.family, n, spec)
        stages.append(StageInstance(family, _random_profit(rng, spec.profit, family, n, spec,
                                                            rng.randint(1, spec.max_denominator))))
    return MultistageInstance(n, T, spec.bonus, stages, spec.evolution)


# -- playing ------------------------------------------------------------------

Source = Union[MultistageInstance, RandomInstanceSpec, StageSource]


def as_source(source: Source) -> StageSource:
    if isinstance(source, MultistageInstance):
        return InstanceSource(source)
    if isinstance(source, RandomInstanceSpec):
        src = InstanceSource(generate_instance(source))
        src.descriptor = source.descriptor
        return src
    return source


def play(policy: OnlinePolicy, source: Source) -> GameReport:
    src = as_source(source)
    run = drive(policy, src)
    inst, seq = run.instance, run.sequence
    vb = sequence_value(inst, seq)
    opt = offline_optimum(inst).optimum_value
    trace = []
    for t, (stage, s) in enumerate(zip(inst.stages, seq.steps), start=1):
        trace.append({"t": t, "chosen": list(s.members),
                      "step_optimum": format_rational(best_single(stage)[1]),
                      "profit": format_rational(vb.profits[t - 1]),
                      "bonus": format_rational(vb.bonuses[t - 2]) if t > 1 else "0/1"})
    report = GameReport(policy=policy.name, source=src.descriptor(), T=inst.T, n=inst.n,
                        value=vb.total, profits=vb.profits, bonuses=vb.bonuses, optimum=opt,
                        ratio=competitive_ratio(opt, vb.total), trace=trace,
                        seed=policy.seed if policy.randomized else None)
    g = None if policy.randomized else guarantee_for(policy.name, inst, opt)
    if g is not None:
        report.bound, report.within_bound = g.label, g.holds(vb.total, opt)
    if isinstance(src, Adversary):
        report.extras.update(_adversary_extras(src, seq))
    return report


def _adversary_extras(adv: Adversary, seq: SolutionSequence) -> dict:
    out: dict = {}
    target = adv.target_ratio()
    if target is not None:
        out["target_ratio"] = format_ratio(target)
        out["target_ratio_decimal"] = ratio_decimal(target)
    if hasattr(adv, "phases"):
        out["phases"] = adv.phases(seq)
        adj = adjusted_ratio(adv, seq)
        out["adjusted_ratio"] = format_ratio(adj)
        out["adjusted_ratio_decimal"] = ratio_decimal(adj)
    if hasattr(adv, "confirm_ratio"):
        out["sizes"] = list(adv.sizes)
        cutoff = adv.cutoff(seq.steps)
        out["cutoff"] = cutoff
        confirmed = [t for t in range(2, adv.T + 1)
                     if seq.steps[t - 1] and seq.steps[t - 2]
                     and adv._row_of(seq.steps[t - 1], t) == adv._row_of(seq.steps[t - 2], t - 1)]
        if confirmed:
            out["confirmed_at"] = confirmed[0]
            out["confirm_ratio"] = format_rational(adv.confirm_ratio(confirmed[0]))
    return out


# -- exact expectations of the randomized policies ---------------------------

def random_outcomes(policy: str, inst: MultistageInstance) -> list[SolutionSequence]:
    """Every equally likely outcome of a randomized policy on a fixed instance."""
    from .algorithms import RandPairing, RandPartition
    from .stream import run_online

    if policy == "rand_pairing":
        return [run_online(RandPairing(offset=o), inst) for o in (1, 2)]
    if policy == "rand_partition":
        size = (inst.n + 1) // 2
        return [run_online(RandPartition(part=a), inst)
                for a in itertools.combinations(range(1, inst.n + 1), size)]
    raise ValueError(f"{policy!r} is not a randomized policy")


def exact_expectation(policy: str, inst: MultistageInstance) -> Fraction:
    outcomes = random_outcomes(policy, inst)
    return sum((sequence_value(inst, s).total for s in outcomes), Fraction(0)) / len(outcomes)


# -- sweeps -------------------------------------------------------------------

@dataclass
class SweepResult:
    reports: list
    errors: list
    aggregate: list


def _run_one(args) -> tuple[Optional[GameReport], Optional[str]]:
    policy_name, spec, x = args
    try:
        policy = make_policy(policy_name, seed=spec.seed, x=x)
        return play(policy, spec), None
    except Exception as exc:  # per-run failures are collected, not fatal
        return None, f"{type(exc).__name__}: {exc}"


def sweep(policy: str, grid: Sequence[RandomInstanceSpec], workers: int = 1,
          x: Optional[Fraction] = None) -> SweepResult:
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    jobs = [(policy, spec, x) for spec in grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    reports, errors = [], []
    for spec, (rep, err) in zip(grid, results):
        if rep is not None:
            reports.append(rep)
        else:
            log.warning("run failed for %s: %s", spec, err)
            errors.append({"spec": spec.descriptor(), "error": err})
    return SweepResult(reports, errors, aggregate_reports(reports))


def aggregate_reports(reports: Sequence[GameReport]) -> list[dict]:
    groups: dict[tuple, list[GameReport]] = {}
    for r in reports:
        groups.setdefault((r.policy, r.model), []).append(r)
    rows = []
    for (policy, model), rs in groups.items():
        worst = max(rs, key=lambda r: r.ratio)
        checked = [r.within_bound for r in rs if r.within_bound is not None]
        rows.append({"policy": policy, "model": model, "runs": len(rs),
                     "max_ratio": format_ratio(worst.ratio), "max_ratio_decimal": ratio_decimal(worst.ratio),
                     "bound_at_max": worst.bound or "", "all_within": all(checked) if checked else None})
    return rows


def grid(evolution: str, bonus: str, ns: Iterable[int], Ts: Iterable[int], seeds: Iterable[int],
         family: str = "mixed", profit: str = "linear", **kw) -> list[RandomInstanceSpec]:
    return [RandomInstanceSpec(evolution, bonus, n, T, family, profit, seed, **kw)
            for n in ns for T in Ts for seed in seeds]
