"""JSON descriptors for matroids, set systems, objectives, and instances."""

from __future__ import annotations

import json

from .errors import PreconditionError
from .matroids import Matroid
from .objectives import Additive, Coverage, Objective, equal_partition_instance
from .stochastic import SppInstance
from .systems import (
    BlocksSystem,
    IntersectionSystem,
    MatchingSystem,
    MatroidSystem,
    Rank1System,
    SetSystem,
)


def matroid_to_dict(m: Matroid) -> dict:
    fam = m.family
    if m.contracted or m.deleted:
        raise PreconditionError("only base-view matroids are serializable")
    if fam.kind == "uniform":
        return {"family": "uniform", "n": fam.n, "r": fam.r}
    if fam.kind == "partition":
        return {
            "family": "partition",
            "blocks": [list(b) for b in fam.blocks],
            "caps": list(fam.caps),
        }
    if fam.kind == "graphic":
        return {
            "family": "graphic",
            "vertices": fam.n_vertices,
            "edges": [list(e) for e in fam.edges],
        }
    return {
        "family": "explicit",
        "ground": list(fam.ground),
        "independent": sorted(sorted(s) for s in fam.sets),
    }


def matroid_from_dict(d: dict) -> Matroid:
    family = d["family"]
    if family == "uniform":
        return Matroid.uniform(d["n"], d["r"])
    if family == "partition":
        return Matroid.partition(d["blocks"], d["caps"])
    if family == "graphic":
        return Matroid.graphic(d["vertices"], d["edges"])
    if family == "explicit":
        return Matroid.explicit(d["ground"], d["independent"])
    raise PreconditionError(f"unknown matroid family {family!r}")


def system_to_dict(sys: SetSystem) -> dict:
    if sys.kind == "matroid":
        return {"kind": "matroid", "matroid": matroid_to_dict(sys.matroid)}
    if sys.kind == "intersection":
        return {
            "kind": "intersection",
            "matroids": [matroid_to_dict(m) for m in sys.matroids],
        }
    if sys.kind == "matching":
        return {
            "kind": "matching",
            "graph": {
                "vertices": sys.n_vertices,
                "edges": [list(e) for e in sys.edges],
            },
        }
    if sys.kind == "rank1":
        return {"kind": "rank1", "n": sys.n}
    if sys.kind == "blocks":
        return {"kind": "blocks", "m": sys.m, "k": sys.k}
    raise PreconditionError(f"unknown system kind {sys.kind!r}")


def system_from_dict(d: dict) -> SetSystem:
    kind = d["kind"]
    if kind == "matroid":
        return MatroidSystem(matroid_from_dict(d["matroid"]))
    if kind == "intersection":
        return IntersectionSystem([matroid_from_dict(x) for x in d["matroids"]])
    if kind == "matching":
        return MatchingSystem(d["graph"]["vertices"], d["graph"]["edges"])
    if kind == "rank1":
        return Rank1System(d["n"])
    if kind == "blocks":
        return BlocksSystem(d["m"], d["k"])
    raise PreconditionError(f"unknown system kind {kind!r}")


def objective_to_dict(obj: Objective) -> dict:
    if obj.kind == "additive":
        return {"objective": "additive", "w": [float(x) for x in obj.w]}
    if obj.kind == "equal_partition":
        return {
            "objective": "equal_partition",
            "n": obj.num_partitions * obj.r,
            "r": obj.r,
        }
    if obj.kind == "coverage":
        return {
            "objective": "coverage",
            "universe": obj.universe,
            "sets": [sorted(a) for a in obj.sets],
            "normalized": obj.normalized,
        }
    raise PreconditionError(f"unknown objective kind {obj.kind!r}")


def objective_from_dict(d: dict) -> Objective:
    kind = d["objective"]
    if kind == "additive":
        return Additive(d["w"])
    if kind == "coverage":
        return Coverage(d["universe"], d["sets"], d.get("normalized", False))
    if kind == "equal_partition":
        return equal_partition_instance(d["n"], d["r"])
    raise PreconditionError(f"unknown objective kind {kind!r}")


def instance_to_dict(inst: SppInstance) -> dict:
    return {
        "name": inst.name,
        "system": system_to_dict(inst.system),
        "objective": objective_to_dict(inst.objective),
        "p": inst.p,
        "seed": inst.seed,
    }


def instance_from_dict(d: dict) -> SppInstance:
    return SppInstance(
        system_from_dict(d["system"]),
        objective_from_dict(d["objective"]),
        d["p"],
        d.get("seed", 0),
        name=d.get("name", ""),
    )


def save_instance(inst: SppInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path: str) -> SppInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
