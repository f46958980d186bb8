"""JSON formats for set functions and collections.

Set function objects: {"k", "kind": "table"|"modular"|"zero_one"|"concave_card",
"values"|"weights"|"exponent"}. Collections: {"k", "symmetric", "per_label":
{"<label bitmask>": <set function object>}}, or the shorthand
{"kind": "jaccard", "k"} since that family is label-indexed by construction.
"""

from __future__ import annotations

import json
from pathlib import Path

from .setfn import (
    PolymatroidCollection,
    SetFunction,
    as_collection,
    make_concave_card,
    make_jaccard,
    make_modular,
    make_zero_one,
)


def setfn_to_obj(f: SetFunction) -> dict:
    return {"k": f.k, "kind": "table", "values": f.values.tolist()}


def setfn_from_obj(obj: dict) -> SetFunction:
    kind = obj.get("kind", "table")
    if kind == "table":
        return SetFunction.from_values(int(obj["k"]), obj["values"])
    if kind == "modular":
        return make_modular(obj["weights"])
    if kind == "zero_one":
        return make_zero_one(int(obj["k"]))
    if kind == "concave_card":
        exponent = float(obj.get("exponent", 0.5))
        if not 0 < exponent <= 1:
            raise ValueError("concave_card exponent must lie in (0, 1]")
        return make_concave_card(int(obj["k"]), lambda c: float(c) ** exponent)
    if kind == "jaccard":
        raise ValueError("the jaccard family is label-indexed; load it as a collection")
    raise ValueError(f"unknown set function kind {kind!r}")


def collection_to_obj(fc) -> dict:
    fc = as_collection(fc)
    if fc.symmetric:
        return {"k": fc.k, "symmetric": True, "per_label": {"0": setfn_to_obj(fc.for_label(0))}}
    return {
        "k": fc.k,
        "symmetric": False,
        "per_label": {str(y): setfn_to_obj(fc.for_label(y)) for y in fc.labels()},
    }


def collection_from_obj(obj: dict) -> PolymatroidCollection:
    if obj.get("kind") == "jaccard":
        return make_jaccard(int(obj["k"]))
    if "per_label" not in obj:  # a bare set function doubles as a symmetric collection
        return PolymatroidCollection.from_setfn(setfn_from_obj(obj))
    k = int(obj["k"])
    per = {int(key): setfn_from_obj(sub) for key, sub in obj["per_label"].items()}
    if obj.get("symmetric", False):
        if len(per) != 1:
            raise ValueError("a symmetric collection must carry exactly one table")
        return PolymatroidCollection.from_setfn(next(iter(per.values())))
    return PolymatroidCollection.from_per_label(k, per)


def load_setfn(path) -> SetFunction:
    return setfn_from_obj(json.loads(Path(path).read_text()))


def load_collection(path) -> PolymatroidCollection:
    return collection_from_obj(json.loads(Path(path).read_text()))


def save_setfn(f: SetFunction, path) -> None:
    Path(path).write_text(json.dumps(setfn_to_obj(f)))


def save_collection(fc: PolymatroidCollection, path) -> None:
    Path(path).write_text(json.dumps(collection_to_obj(fc)))
