"""Online multistage subset maximization with exact rational arithmetic."""
from .core import (AssumptionViolation, BonusModel, CapacityError,
                   DegenerateHorizonError, Evolution, FeasibilityError,
                   ModelMisuseError, MultistageError, ObjectSet,
                   PrecisionError, ProtocolError, SolutionSequence,
                   format_rational, hamming_bonus, intersection_bonus,
                   parse_rational, sequence_value)
from .family import (AllSubsets, CardinalityAtMost, ExplicitFamily, Knapsack,
                     LinearProfit, MatchingEdges, MultistageInstance,
                     StageInstance, TableProfit, check_assumptions,
                     is_subset_feasible, is_submodular, zero_profit)
from .offline import brute_force_optimum, offline_optimum
from .stream import UNBOUNDED, competitive_ratio, run_online
from .algorithms import (POLICIES, balance, best_or_nothing,
                         greedy_keep_or_best, make_policy, mp_algo,
                         rand_pairing, rand_partition, three_part)
from .adversary import ADVERSARIES, make_adversary, phase_constants_1696
from .harness import GameReport, RandomInstanceSpec, generate_instance, play, sweep
from .serialization import load_instance, loads_instance, save_instance

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation",
    "BonusModel",
    "CapacityError",
    "DegenerateHorizonError",
    "Evolution",
    "FeasibilityError",
    "ModelMisuseError",
    "MultistageError",
    "ObjectSet",
    "PrecisionError",
    "ProtocolError",
    "SolutionSequence",
    "format_rational",
    "hamming_bonus",
    "intersection_bonus",
    "parse_rational",
    "sequence_value",
    "AllSubsets",
    "CardinalityAtMost",
    "ExplicitFamily",
    "Knapsack",
    "LinearProfit",
    "MatchingEdges",
    "MultistageInstance",
    "StageInstance",
    "TableProfit",
    "check_assumptions",
    "is_subset_feasible",
    "is_submodular",
    "zero_profit",
    "brute_force_optimum",
    "offline_optimum",
    "UNBOUNDED",
    "competitive_ratio",
    "run_online",
    "POLICIES",
    "balance",
    "best_or_nothing",
    "greedy_keep_or_best",
    "make_policy",
    "mp_algo",
    "rand_pairing",
    "rand_partition",
    "three_part",
    "ADVERSARIES",
    "make_adversary",
    "phase_constants_1696",
    "GameReport",
    "RandomInstanceSpec",
    "generate_instance",
    "play",
    "sweep",
    "load_instance",
    "loads_instance",
    "save_instance",
]
