"""JSON instance format.

    {"n": 3, "T": 2, "bonus": "hamming", "evolution": "ssfs",
     "stages": [{"family": {"kind": "explicit", "sets": [[], [1], [2, 3]]},
                 "profit": {"kind": "linear", "weights": ["0/1", "0/1", "0/1"]}}, ...]}

Rationals are written as ``"p/q"`` strings (integers are accepted on input);
sets are sorted arrays of 1-based object indices.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import jsonschema

from .core import BonusModel, Evolution, MultistageError, ObjectSet, format_rational, parse_rational
from .family import (AllSubsets, CardinalityAtMost, ExplicitFamily,
                     FeasibleFamily, Knapsack, LinearProfit, MatchingEdges,
                     MultistageInstance, ProfitFunction, StageInstance,
                     TableProfit)


class SchemaError(MultistageError):
    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


_rational = {"anyOf": [{"type": "integer"},
                       {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+|\.\d*)?\s*$"}]}
_set = {"type": "array", "items": {"type": "integer", "minimum": 1}}

INSTANCE_SCHEMA: dict = {
    "type": "object",
    "required": ["n", "T", "bonus", "evolution", "stages"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "T": {"type": "integer", "minimum": 1},
        "bonus": {"enum": [b.value for b in BonusModel]},
        "evolution": {"enum": [e.value for e in Evolution]},
        "stages": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["family", "profit"],
                "properties": {
                    "family": {
                        "type": "object",
                        "required": ["kind"],
                        "properties": {
                            "kind": {"enum": ["explicit", "all", "cardinality", "knapsack", "matching"]},
                            "sets": {"type": "array", "items": _set},
                            "k": {"type": "integer", "minimum": 0},
                            "weights": {"type": "array", "items": _rational},
                            "capacity": _rational,
                            "edges": {"type": "array",
                                      "items": {"type": "array", "items": {"type": "integer"},
                                                "minItems": 2, "maxItems": 2}},
                        },
                    },
                    "profit": {
                        "type": "object",
                        "required": ["kind"],
                        "properties": {
                            "kind": {"enum": ["linear", "table"]},
                            "weights": {"type": "array", "items": _rational},
                            "values": {"type": "array",
                                       "items": {"type": "object", "required": ["set", "value"],
                                                 "properties": {"set": _set, "value": _rational}}},
                        },
                    },
                },
            },
        },
    },
}

_FAMILY_FIELDS = {"explicit": ["sets"], "cardinality": ["k"], "knapsack": ["weights", "capacity"],
                  "matching": ["edges"], "all": []}
_PROFIT_FIELDS = {"linear": ["weights"], "table": ["values"]}


def _sorted(s: ObjectSet) -> list[int]:
    return list(s.members)


def family_to_dict(f: FeasibleFamily) -> dict:
    if isinstance(f, ExplicitFamily):
        return {"kind": "explicit", "sets": [_sorted(s) for s in f.sets]}
    if isinstance(f, AllSubsets):
        return {"kind": "all"}
    if isinstance(f, CardinalityAtMost):
        return {"kind": "cardinality", "k": f.k}
    if isinstance(f, Knapsack):
        return {"kind": "knapsack", "weights": [format_rational(w) for w in f.weights],
                "capacity": format_rational(f.capacity)}
    if isinstance(f, MatchingEdges):
        return {"kind": "matching", "edges": [list(e) for e in f.edges]}
    raise TypeError(f"cannot serialize family {f!r}")


def profit_to_dict(p: ProfitFunction) -> dict:
    if isinstance(p, LinearProfit):
        return {"kind": "linear", "weights": [format_rational(w) for w in p.weights]}
    if isinstance(p, TableProfit):
        return {"kind": "table",
                "values": [{"set": _sorted(ObjectSet(m, p.n)), "value": format_rational(v)}
                           for m, v in p.entries]}
    raise TypeError(f"cannot serialize profit {p!r}")


def instance_to_dict(inst: MultistageInstance) -> dict:
    return {"n": inst.n, "T": inst.T, "bonus": inst.bonus.value, "evolution": inst.evolution.value,
            "stages": [{"family": family_to_dict(st.family), "profit": profit_to_dict(st.profit)}
                       for st in inst.stages]}


def _location(path) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)


def instance_from_dict(data: Any) -> MultistageInstance:
    try:
        jsonschema.validate(data, INSTANCE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(_location(exc.absolute_path), exc.message) from None
    n = data["n"]
    stages = []
    for t, raw in enumerate(data["stages"]):
        where = f"$.stages[{t}]"
        fam, prof = raw["family"], raw["profit"]
        for obj, fields, loc in ((fam, _FAMILY_FIELDS, "family"), (prof, _PROFIT_FIELDS, "profit")):
            for name in fields[obj["kind"]]:
                if name not in obj:
                    raise SchemaError(f"{where}.{loc}", f"kind {obj['kind']!r} requires {name!r}")
        try:
            family = _family_from_dict(fam, n)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"{where}.family", str(exc)) from None
        try:
            profit = _profit_from_dict(prof, n)
            stages.append(StageInstance(family, profit))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"{where}.profit", str(exc)) from None
    try:
        return MultistageInstance(n, data["T"], data["bonus"], stages, data["evolution"])
    except ValueError as exc:
        raise SchemaError("$", str(exc)) from None


def _family_from_dict(d: dict, n: int) -> FeasibleFamily:
    kind = d["kind"]
    if kind == "explicit":
        return ExplicitFamily(n, [ObjectSet.of(s, n) for s in d["sets"]])
    if kind == "all":
        return AllSubsets(n)
    if kind == "cardinality":
        return CardinalityAtMost(n, d["k"])
    if kind == "knapsack":
        return Knapsack(n, [parse_rational(w) for w in d["weights"]], parse_rational(d["capacity"]))
    return MatchingEdges(d["edges"], n)


def _profit_from_dict(d: dict, n: int) -> ProfitFunction:
    if d["kind"] == "linear":
        p = LinearProfit([parse_rational(w) for w in d["weights"]])
        if p.n != n:
            raise ValueError(f"expected {n} weights, got {p.n}")
        return p
    return TableProfit(n, [(ObjectSet.of(e["set"], n), parse_rational(e["value"])) for e in d["values"]])


def dumps_instance(inst: MultistageInstance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=1)


def loads_instance(text: str) -> MultistageInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return instance_from_dict(data)


def save_instance(inst: MultistageInstance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(inst) + "\n")


def load_instance(path: Union[str, Path]) -> MultistageInstance:
    return loads_instance(Path(path).read_text())
