"""JSON instance/assignment files and report documents.

Instance file (one market per file)::

    {
      "categories":   [{"name": "open", "kind": "open"},
                       {"name": "SC", "kind": "reserve"},
                       {"name": "GC", "kind": "general"}],
      "institutions": [{"id": "s1",
                        "capacity": {"total": 2, "reserved": {"SC": 1}},
                        "merit": ["i1", "i2", "i3"]}],
      "individuals":  [{"id": "i1", "category": "GC", "declared": false},
                       {"id": "i2", "category": "SC", "declared": true}],
      "preferences":  {"i1": ["s1", "s2"], "i2": ["s1"]}
    }

Merit and preference lists are highest first; anyone missing from a merit
list is unacceptable there, and institutions missing from a preference list
are unacceptable to that individual. ``declared`` may be omitted (false).
The general category entry may be omitted; it is then ``GC``.

Assignment file::

    {"assignment": {"i1": {"institution": "s1", "category": "open"},
                    "i3": "unassigned"}}

``canonical_instance`` writes the normal form: key order as above, reserve
capacities listed for every reserve category, every individual present in
``preferences``, two-space indent and a trailing newline.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

from .choice import ChoiceResult, Violation
from .model import (
    Assignment,
    Capacity,
    Category,
    Individual,
    Institution,
    MarketInstance,
    Seat,
    ValidationError,
    validate_assignment,
    validate_instance,
)

UNASSIGNED = "unassigned"
FIXTURES = ("example1", "example2", "example3", "da-3ind")


class FormatError(ValueError):
    """The document is not well-formed for its schema."""


def _need(doc: Mapping, key: str, kind, where: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise FormatError(f"{where}: missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise FormatError(f"{where}.{key}: expected {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def _str_list(value, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise FormatError(f"{where}: expected a list of strings")
    return tuple(value)


def instance_from_dict(doc: Mapping[str, Any]) -> MarketInstance:
    """Parse and validate; raises ``FormatError`` or a ``ValidationError``."""
    if not isinstance(doc, Mapping):
        raise FormatError("instance document must be an object")
    cats = []
    for k, c in enumerate(_need(doc, "categories", list, "instance")):
        cats.append(Category(_need(c, "name", str, f"categories[{k}]"), _need(c, "kind", str, f"categories[{k}]")))
    schools = []
    for k, s in enumerate(_need(doc, "institutions", list, "instance")):
        where = f"institutions[{k}]"
        cap = _need(s, "capacity", dict, where)
        reserved = cap.get("reserved", {})
        if not isinstance(reserved, dict) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in reserved.values()
        ):
            raise FormatError(f"{where}.capacity.reserved: expected an object of integers")
        schools.append(Institution(
            _need(s, "id", str, where),
            Capacity(_need(cap, "total", int, where + ".capacity"), dict(reserved)),
            _str_list(s.get("merit", []), where + ".merit"),
        ))
    people = []
    for k, i in enumerate(_need(doc, "individuals", list, "instance")):
        where = f"individuals[{k}]"
        declared = i.get("declared", False) if isinstance(i, Mapping) else False
        if not isinstance(declared, bool):
            raise FormatError(f"{where}.declared: expected a boolean")
        people.append(Individual(_need(i, "id", str, where), _need(i, "category", str, where), declared))
    raw_prefs = doc.get("preferences", {})
    if not isinstance(raw_prefs, dict):
        raise FormatError("instance.preferences: expected an object")
    prefs = {i: _str_list(p, f"preferences.{i}") for i, p in raw_prefs.items()}
    return validate_instance(MarketInstance(cats, schools, people, prefs))


def instance_to_dict(instance: MarketInstance) -> dict:
    return {
        "categories": [{"name": c.name, "kind": c.kind} for c in instance.categories],
        "institutions": [
            {
                "id": s.id,
                "capacity": {"total": s.capacity.total,
                             "reserved": {r: s.capacity.of(r) for r in instance.reserves}},
                "merit": list(s.merit),
            }
            for s in instance.institutions
        ],
        "individuals": [{"id": i.id, "category": i.category, "declared": i.declared}
                        for i in instance.individuals],
        "preferences": {i.id: list(instance.preference(i.id)) for i in instance.individuals},
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def canonical_instance(instance: MarketInstance) -> str:
    return dumps(instance_to_dict(instance))


def _read_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def fixture_text(name: str) -> str:
    return resources.files("reserve_match").joinpath("fixtures", f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> MarketInstance:
    if name not in FIXTURES:
        raise FormatError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return instance_from_dict(json.loads(fixture_text(name)))


def load_instance(path_or_fixture: str) -> MarketInstance:
    """Load a file, or a bundled fixture by name when no such file exists."""
    if not Path(path_or_fixture).exists() and path_or_fixture in FIXTURES:
        return load_fixture(path_or_fixture)
    return instance_from_dict(_read_json(path_or_fixture))


def load_pool(path) -> list[str]:
    doc = _read_json(path)
    if isinstance(doc, Mapping):
        doc = doc.get("pool")
    return list(_str_list(doc, "pool"))


def assignment_to_dict(instance: MarketInstance, a: Assignment) -> dict:
    out = {}
    for i in instance.individual_ids():
        seat = a.of(i)
        out[i] = UNASSIGNED if seat is None else {"institution": seat.institution, "category": seat.category}
    return {"assignment": out}


def assignment_from_dict(instance: MarketInstance, doc: Mapping[str, Any]) -> Assignment:
    body = _need(doc, "assignment", dict, "document")
    seats: dict[str, Optional[Seat]] = {}
    for i, v in body.items():
        if v == UNASSIGNED or v is None:
            seats[i] = None
        elif isinstance(v, Mapping):
            seats[i] = Seat(_need(v, "institution", str, f"assignment.{i}"),
                            _need(v, "category", str, f"assignment.{i}"))
        else:
            raise FormatError(f"assignment.{i}: expected an object or {UNASSIGNED!r}")
    return validate_assignment(instance, Assignment(seats))


def load_assignment(instance: MarketInstance, path) -> Assignment:
    return assignment_from_dict(instance, _read_json(path))


def ordered(ids, instance: MarketInstance) -> list[str]:
    """Ids in the instance's individual order."""
    ids = set(ids)
    return [i for i in instance.individual_ids() if i in ids]


def choice_to_dict(instance: MarketInstance, result: ChoiceResult) -> dict:
    return {
        "open": ordered(result.open, instance),
        "reserved": {r: ordered(result.of(r), instance) for r in sorted(result.reserved)},
        "rejected": ordered(result.rejected, instance),
    }


def violation_to_dict(v: Optional[Violation]):
    if v is None:
        return None
    return {"axiom": v.axiom, "subjects": list(v.subjects), "detail": v.detail}


def round_to_dict(instance: MarketInstance, log) -> dict:
    return {
        "round": log.index,
        "proposals": [[i, s] for i, s in log.proposals],
        "institutions": [
            {
                "institution": e.institution,
                "pool": ordered(e.pool, instance),
                "held": {k: v for k, v in choice_to_dict(instance, e.held).items() if k != "rejected"},
                "rejected": ordered(e.rejected, instance),
            }
            for e in log.institutions
        ],
    }


__all__ = [
    "FormatError", "ValidationError", "UNASSIGNED", "FIXTURES",
    "instance_from_dict", "instance_to_dict", "canonical_instance", "load_instance",
    "load_fixture", "load_pool", "assignment_to_dict", "assignment_from_dict",
    "load_assignment", "choice_to_dict", "violation_to_dict", "round_to_dict", "dumps",
]
