"""Instance files: one space, named sets, named pairs and named maps.

    {
      "v": 1,
      "space": {"kind": "euclidean", "dim": 2},
      "sets": {"A": {"type": "polytope", "vertices": [[-2, -1], ...]}, ...},
      "pairs": [{"name": "rect", "A": "A", "B": "B"}],
      "maps": [{"name": "P", "pair": "rect", "kind": "projection"},
               {"name": "R", "pair": "rect", "mode": "noncyclic", "rule": [...]}],
      "seed": 0
    }

Pairs default to ``{"A": "A", "B": "B"}`` when omitted and the sets exist.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import sets as cs
from .errors import GeoproxError, InvalidParameter
from .maps import MapDescriptor, make_projection_map, map_from_json
from .pairs import PairDescriptor
from .spaces import Space, space_from_json

SCHEMA_VERSION = 1


class InstanceError(GeoproxError):
    """Malformed instance document."""


@dataclass
class Instance:
    space: Space
    sets: dict
    pairs: dict
    maps: dict
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)

    def pair(self, name=None) -> PairDescriptor:
        if name is None:
            if not self.pairs:
                raise InstanceError("instance defines no pairs")
            return next(iter(self.pairs.values()))
        if name not in self.pairs:
            raise InstanceError(f"unknown pair {name!r}")
        return self.pairs[name]

    def map(self, name=None) -> MapDescriptor:
        if name is None:
            if len(self.maps) != 1:
                raise InstanceError("choose a map by name")
            return next(iter(self.maps.values()))
        if name not in self.maps:
            raise InstanceError(f"unknown map {name!r}")
        return self.maps[name]

    def set(self, name):
        if name not in self.sets:
            raise InstanceError(f"unknown set {name!r}")
        return self.sets[name]


def _named(items, what):
    if isinstance(items, dict):
        return list(items.items())
    out = []
    for k, it in enumerate(items or []):
        if not isinstance(it, dict):
            raise InstanceError(f"{what} entries must be objects")
        out.append((it.get("name", f"{what}{k}"), it))
    return out


def instance_from_json(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("instance must be a JSON object")
    if doc.get("v") != SCHEMA_VERSION:
        raise InstanceError(f"unsupported schema version {doc.get('v')!r}; expected {SCHEMA_VERSION}")
    try:
        space = space_from_json(doc["space"])
        seed = int(doc.get("seed", 0))
        named = {name: cs.set_from_json(space, obj) for name, obj in (doc.get("sets") or {}).items()}
        pair_items = _named(doc.get("pairs"), "pair")
        if not pair_items and "A" in named and "B" in named:
            pair_items = [("main", {"A": "A", "B": "B"})]
        pairs = {}
        for name, p in pair_items:
            for key in ("A", "B"):
                if p.get(key) not in named:
                    raise InstanceError(f"pair {name!r} references unknown set {p.get(key)!r}")
            pairs[name] = PairDescriptor(space, named[p["A"]], named[p["B"]],
                                         int(p.get("samples", 2000)), int(p.get("seed", seed)))
        maps = {}
        for name, m in _named(doc.get("maps"), "map"):
            pname = m.get("pair")
            if pname is None:
                if len(pairs) != 1:
                    raise InstanceError(f"map {name!r} must name its pair")
                pname = next(iter(pairs))
            if pname not in pairs:
                raise InstanceError(f"map {name!r} references unknown pair {pname!r}")
            if m.get("kind") == "projection":
                maps[name] = make_projection_map(pairs[pname])
            else:
                maps[name] = map_from_json(pairs[pname], m, named)
    except KeyError as exc:
        raise InstanceError(f"missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InstanceError(str(exc)) from exc
    return Instance(space, named, pairs, maps, seed, doc)


def load_instance(path) -> Instance:
    """Read an instance file; raises OSError or :class:`InstanceError`."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return instance_from_json(doc)


__all__ = ["Instance", "InstanceError", "InvalidParameter", "instance_from_json", "load_instance"]
