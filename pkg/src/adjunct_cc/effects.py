"""External-call effect database.

Calls to functions without a body are black boxes; the only way to reason
about them is a whitelist stating, per pointer parameter, whether the callee
reads, writes, or reads-and-writes the container behind it. Extent is always
the whole container. Functions absent from the database get the conservative
default: readwrite on every pointer argument.

File format: a JSON array, one object per function:

    {"function": "memcpy",
     "params": [{"index": 0, "effect": "write"},
                {"index": 1, "effect": "read"}],
     "special": "allocation-delegation"}   # optional

`special: allocation-delegation` marks callees that take a pointer's address
solely to allocate and rebind it (the pointer-handoff pattern).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

READ = "read"
WRITE = "write"
READWRITE = "readwrite"
_EFFECTS = (READ, WRITE, READWRITE)

ALLOCATION_DELEGATION = "allocation-delegation"


class EffectFileError(Exception):
    def __init__(self, path: str, where: str, message: str):
        self.path = path
        super().__init__(f"{path}: {where}: {message}")


@dataclass(frozen=True)
class EffectAnnotation:
    function: str
    params: tuple[tuple[int, str], ...] = ()  # (index, effect), whole-container
    special: str | None = None

    def effect_for(self, index: int) -> str | None:
        for i, eff in self.params:
            if i == index:
                return eff
        return None


@dataclass
class EffectDatabase:
    entries: dict[str, EffectAnnotation] = field(default_factory=dict)

    def lookup(self, function: str) -> EffectAnnotation | None:
        return self.entries.get(function)

    def is_allocation_delegation(self, function: str) -> bool:
        ann = self.entries.get(function)
        return ann is not None and ann.special == ALLOCATION_DELEGATION


def builtin_database() -> EffectDatabase:
    """Annotations for the modeled library calls and the allocation intrinsic."""
    db = EffectDatabase()
    for ann in (
        EffectAnnotation("memcpy", ((0, WRITE), (1, READ))),
        EffectAnnotation("memset", ((0, WRITE),)),
        EffectAnnotation("HMAC_CTX_new", ()),
        EffectAnnotation("HMAC_CTX_copy", ((0, WRITE), (1, READ))),
        EffectAnnotation("HMAC_CTX_free", ((0, WRITE),)),
        EffectAnnotation("alloc", ()),
    ):
        db.entries[ann.function] = ann
    return db


def effect_of(db: EffectDatabase, callee: str, arg_index: int) -> str:
    """Effect on the container behind `arg_index`; conservative default."""
    ann = db.lookup(callee)
    if ann is None:
        return READWRITE
    return ann.effect_for(arg_index) or READWRITE


def _parse_entry(obj, path: str, pos: int) -> EffectAnnotation:
    where = f"entry {pos}"
    if not isinstance(obj, dict):
        raise EffectFileError(path, where, "expected an object")
    name = obj.get("function")
    if not isinstance(name, str) or not name:
        raise EffectFileError(path, where, "missing 'function' name")
    params = []
    seen = set()
    for j, p in enumerate(obj.get("params", [])):
        pwhere = f"entry {pos} ('{name}'), param {j}"
        if not isinstance(p, dict):
            raise EffectFileError(path, pwhere, "expected an object")
        idx = p.get("index")
        eff = p.get("effect")
        if not isinstance(idx, int) or idx < 0:
            raise EffectFileError(path, pwhere, "'index' must be a non-negative integer")
        if eff not in _EFFECTS:
            raise EffectFileError(path, pwhere, f"'effect' must be one of {_EFFECTS}")
        if idx in seen:
            raise EffectFileError(path, pwhere, f"duplicate index {idx}")
        seen.add(idx)
        params.append((idx, eff))
    special = obj.get("special")
    if special is not None and special != ALLOCATION_DELEGATION:
        raise EffectFileError(
            path, where, f"'special' must be '{ALLOCATION_DELEGATION}' when present")
    unknown = set(obj) - {"function", "params", "special"}
    if unknown:
        raise EffectFileError(path, where, f"unknown keys {sorted(unknown)}")
    return EffectAnnotation(name, tuple(params), special)


def load(path: str) -> EffectDatabase:
    """Load a whitelist file, layered over the built-in entries.

    A function may appear at most once in the file (overriding a built-in is
    allowed; overriding another file entry is an error, not a silent merge).
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise EffectFileError(
                path, f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
    if not isinstance(data, list):
        raise EffectFileError(path, "top level", "expected a JSON array of entries")
    db = builtin_database()
    seen_in_file: set[str] = set()
    for pos, obj in enumerate(data):
        ann = _parse_entry(obj, path, pos)
        if ann.function in seen_in_file:
            raise EffectFileError(
                path, f"entry {pos}", f"duplicate entry for '{ann.function}'")
        seen_in_file.add(ann.function)
        db.entries[ann.function] = ann
    return db


def save(db: EffectDatabase, path: str) -> None:
    data = []
    for name in sorted(db.entries):
        ann = db.entries[name]
        obj = {
            "function": ann.function,
            "params": [{"index": i, "effect": e} for i, e in ann.params],
        }
        if ann.special:
            obj["special"] = ann.special
        data.append(obj)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
