"""Command-line driver.

Exit codes: 0 ok, 1 a proven bound was violated, 2 input error,
3 model misuse (wrong model, unmet assumptions, unsupported lookahead),
4 internal assertion (infeasible output, failed cross-check).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .adversary import ADVERSARIES, make_adversary
from .algorithms import POLICIES, make_policy
from .core import (CapacityError, FeasibilityError, ModelMisuseError,
                   PrecisionError, ProtocolError, format_rational,
                   parse_rational)
from .family import check_assumptions
from .harness import (RandomInstanceSpec, generate_instance, grid,
                      ratio_decimal, reports_to_csv, reports_to_jsonl, play,
                      sweep)
from .offline import offline_optimum
from .serialization import SchemaError, dumps_instance, load_instance
from .stream import drive

EXIT_OK, EXIT_BOUND, EXIT_INPUT, EXIT_MISUSE, EXIT_INTERNAL = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _rational_arg(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _add_source_args(p: argparse.ArgumentParser, adversary: bool = True) -> None:
    p.add_argument("--instance", type=Path, help="instance JSON file")
    if adversary:
        p.add_argument("--adversary", choices=sorted(ADVERSARIES))
        p.add_argument("--epsilon", type=_rational_arg)
        p.add_argument("--alpha", type=_rational_arg)
    p.add_argument("--random", action="store_true", help="generate a seeded random instance")
    p.add_argument("--evolution", choices=["ssfs", "ge"], default="ge")
    p.add_argument("--bonus", choices=["hamming", "intersection"], default="hamming")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--family", default="mixed")
    p.add_argument("--profit", default="linear", choices=["linear", "table", "submodular"])
    p.add_argument("--seed", type=int, default=0)


def _add_output_args(p: argparse.ArgumentParser, formats=("text", "json")) -> None:
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", type=Path, help="also write the artifact here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multistage", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="play a policy against an instance, random spec or adversary")
    p.add_argument("--policy", required=True, choices=sorted(POLICIES))
    p.add_argument("--x", type=_rational_arg, help="three_part threshold (default 4/3)")
    _add_source_args(p)
    _add_output_args(p, ("text", "json", "jsonl"))

    p = sub.add_parser("optimum", help="exact offline optimum of an instance")
    _add_source_args(p, adversary=False)
    _add_output_args(p)

    p = sub.add_parser("lowerbound", help="play an adversary game and compare with its target")
    p.add_argument("--adversary", "--kind", dest="adversary", required=True, choices=sorted(ADVERSARIES))
    p.add_argument("--policy", required=True, choices=sorted(POLICIES))
    p.add_argument("--epsilon", type=_rational_arg)
    p.add_argument("--alpha", type=_rational_arg)
    p.add_argument("--n", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x", type=_rational_arg)
    _add_output_args(p)

    p = sub.add_parser("sweep", help="run a policy over a grid of random instances")
    p.add_argument("--policy", required=True, choices=sorted(POLICIES))
    p.add_argument("--evolution", choices=["ssfs", "ge"], default="ge")
    p.add_argument("--bonus", choices=["hamming", "intersection"], default="hamming")
    p.add_argument("--n", type=_int_list, default=[3], help="e.g. 2-5 or 3,4")
    p.add_argument("--T", type=_int_list, default=[4])
    p.add_argument("--seeds", type=_int_list, default=list(range(10)))
    p.add_argument("--family", default="mixed")
    p.add_argument("--profit", default="linear", choices=["linear", "table", "submodular"])
    p.add_argument("--x", type=_rational_arg)
    p.add_argument("--workers", type=int, default=1)
    _add_output_args(p, ("csv", "jsonl"))

    p = sub.add_parser("validate", help="check subset feasibility and submodularity per stage")
    p.add_argument("--instance", type=Path, required=True)

    p = sub.add_parser("export", help="write an instance as JSON")
    _add_source_args(p)
    p.add_argument("--policy", choices=sorted(POLICIES),
                   help="with --adversary: the policy whose game realizes the instance")
    p.add_argument("--x", type=_rational_arg)
    p.add_argument("--output", type=Path)
    return parser


def _emit(text: str, output: Optional[Path]) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if output is not None:
        output.write_text(text if text.endswith("\n") else text + "\n")


def _load(path: Path):
    try:
        return load_instance(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _random_spec(args) -> RandomInstanceSpec:
    return RandomInstanceSpec(args.evolution, args.bonus, args.n or 3, args.T or 3,
                              args.family, args.profit, args.seed)


def _source(args):
    chosen = [bool(args.instance), bool(getattr(args, "adversary", None)), args.random]
    if sum(chosen) != 1:
        raise InputError("give exactly one of --instance, --adversary, --random")
    if args.instance:
        return _load(args.instance)
    if args.random:
        return _random_spec(args)
    return make_adversary(args.adversary, epsilon=args.epsilon, n=args.n, T=args.T,
                          alpha=args.alpha, lookahead=_lookahead(args))


def _lookahead(args) -> int:
    return POLICIES[args.policy].lookahead if getattr(args, "policy", None) else 0


def cmd_run(args) -> int:
    policy = make_policy(args.policy, seed=args.seed, x=args.x)
    report = play(policy, _source(args))
    if args.format == "text":
        _emit(report.summary(), None)
        if args.output:
            args.output.write_text(report.to_json() + "\n")
    else:
        _emit(report.to_json(), args.output)
    return EXIT_BOUND if report.within_bound is False else EXIT_OK


def cmd_optimum(args) -> int:
    src = _source(args)
    inst = generate_instance(src) if isinstance(src, RandomInstanceSpec) else src
    res = offline_optimum(inst)
    if args.format == "json":
        _emit(json.dumps({"optimum": format_rational(res.optimum_value),
                          "sequence": [list(s.members) for s in res.optimal_sequence.steps]},
                         sort_keys=True), args.output)
    else:
        lines = [f"optimum   {format_rational(res.optimum_value)}  ~ {ratio_decimal(res.optimum_value)}"]
        lines += [f"  S_{t} = {s!r}" for t, s in enumerate(res.optimal_sequence.steps, start=1)]
        _emit("\n".join(lines), args.output)
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    policy = make_policy(args.policy, seed=args.seed, x=args.x)
    adv = make_adversary(args.adversary, epsilon=args.epsilon, n=args.n, T=args.T,
                         alpha=args.alpha, lookahead=policy.lookahead)
    report = play(policy, adv)
    if args.format == "json":
        _emit(report.to_json(), args.output)
        return EXIT_OK
    target = report.extras.get("target_ratio", "n/a (asymptotic)")
    lines = [f"adversary {adv.kind}  ({adv.evolution.value}/{adv.bonus.value}, n={adv.n}, T={adv.T})",
             f"policy    {policy.name}",
             f"certified {report.summary().splitlines()[3].split(None, 1)[1]}",
             f"target    {target}" + (f"  ~ {report.extras['target_ratio_decimal']}"
                                       if "target_ratio_decimal" in report.extras else "")]
    if "adjusted_ratio" in report.extras:
        lines.append(f"adjusted  {report.extras['adjusted_ratio']}  ~ {report.extras['adjusted_ratio_decimal']}"
                     "  (last phase closed)")
    _emit("\n".join(lines), None)
    if args.output:
        args.output.write_text(report.to_json() + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    specs = grid(args.evolution, args.bonus, args.n, args.T, args.seeds, args.family, args.profit)
    result = sweep(args.policy, specs, workers=args.workers, x=args.x)
    if args.format == "csv":
        _emit(reports_to_csv(result.reports).rstrip("\n"), args.output)
    else:
        _emit(reports_to_jsonl(result.reports).rstrip("\n") or "", args.output)
    for row in result.aggregate:
        print(json.dumps({"aggregate": row}, sort_keys=True), file=sys.stderr)
    for err in result.errors:
        print(json.dumps({"error": err}, sort_keys=True), file=sys.stderr)
    if any(row["all_within"] is False for row in result.aggregate):
        return EXIT_BOUND
    return EXIT_OK


def cmd_validate(args) -> int:
    report = check_assumptions(_load(args.instance))
    for (check, t), w in sorted(report.witnesses.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if check == "subset_feasibility":
            print(f"stage {t}: not subset feasible: {w[0]!r} is feasible but {w[1]!r} is not")
        else:
            print(f"stage {t}: not submodular: witness S={w[0]!r}, S'={w[1]!r}")
    ok = report.ok
    if ok:
        print("all stages pass subset feasibility and submodularity")
    return EXIT_OK if ok else EXIT_BOUND


def cmd_export(args) -> int:
    src = _source(args)
    if isinstance(src, RandomInstanceSpec):
        inst = generate_instance(src)
    elif getattr(src, "kind", None) in ADVERSARIES:
        if not args.policy:
            raise InputError("--adversary export needs --policy to realize the game")
        drive(make_policy(args.policy, seed=args.seed, x=args.x), src)
        inst = src.realized_instance()
    else:
        inst = src
    _emit(dumps_instance(inst), args.output)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "optimum": cmd_optimum, "lowerbound": cmd_lowerbound,
            "sweep": cmd_sweep, "validate": cmd_validate, "export": cmd_export}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, PrecisionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelMisuseError, ProtocolError, CapacityError) as exc:
        print(f"model misuse: {exc}", file=sys.stderr)
        return EXIT_MISUSE
    except (FeasibilityError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
