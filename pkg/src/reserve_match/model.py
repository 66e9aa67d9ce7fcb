"""Domain types for reservation markets: categories, individuals, institutions,
preferences, and the assignment/matching outcome views.

All types are frozen after construction. ``validate_instance`` is the single
gate that establishes the cross-reference invariants; everything downstream
assumes a validated instance.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

OPEN = "open"
RESERVE = "reserve"
GENERAL = "general"
KINDS = (OPEN, RESERVE, GENERAL)

#: Reserve categories of the Indian vertical-reservation system.
INDIA_RESERVES = ("SC", "ST", "OBC", "EWS")
DEFAULT_GENERAL = "GC"
DEFAULT_OPEN = "open"


class ValidationError(ValueError):
    """Base class for malformed market data."""


class DuplicateId(ValidationError):
    pass


class DanglingReference(ValidationError):
    pass


class TieInMerit(ValidationError):
    pass


class CapacityOverflow(ValidationError):
    pass


class MultipleOpenCategories(ValidationError):
    pass


class InvalidCategory(ValidationError):
    """Category kinds or membership labels that the model cannot express."""


@dataclass(frozen=True)
class Category:
    name: str
    kind: str


@dataclass(frozen=True)
class Individual:
    id: str
    category: str  # true membership: a reserve name or the general label
    declared: bool = False

    def effective(self, general: str = DEFAULT_GENERAL) -> str:
        return self.category if self.declared else general


@dataclass(frozen=True)
class Capacity:
    total: int
    reserved: Mapping[str, int] = field(default_factory=dict)

    @property
    def open(self) -> int:
        return self.total - sum(self.reserved.values())

    def of(self, category: str) -> int:
        return self.reserved.get(category, 0)


@dataclass(frozen=True)
class Institution:
    id: str
    capacity: Capacity
    merit: tuple[str, ...]  # highest merit first; unlisted = unacceptable

    def __post_init__(self):
        object.__setattr__(self, "merit", tuple(self.merit))
        object.__setattr__(self, "_rank", {i: k for k, i in enumerate(self.merit)})

    def acceptable(self, i: str) -> bool:
        return i in self._rank

    def position(self, i: str) -> Optional[int]:
        """0-based merit position, ``None`` if unacceptable."""
        return self._rank.get(i)

    def prefers(self, i: str, j: str) -> bool:
        """``i`` strictly above ``j`` in merit; acceptable beats unacceptable."""
        pi, pj = self._rank.get(i), self._rank.get(j)
        if pi is None:
            return False
        return pj is None or pi < pj


@dataclass(frozen=True)
class MarketInstance:
    categories: tuple[Category, ...]
    institutions: tuple[Institution, ...]
    individuals: tuple[Individual, ...]
    preferences: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        for name in ("categories", "institutions", "individuals"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        prefs = {i: tuple(p) for i, p in self.preferences.items()}
        object.__setattr__(self, "preferences", prefs)

    @property
    def open_category(self) -> str:
        for c in self.categories:
            if c.kind == OPEN:
                return c.name
        return DEFAULT_OPEN

    @property
    def general_label(self) -> str:
        for c in self.categories:
            if c.kind == GENERAL:
                return c.name
        return DEFAULT_GENERAL

    @property
    def reserves(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.categories if c.kind == RESERVE)

    def institution(self, sid: str) -> Institution:
        for s in self.institutions:
            if s.id == sid:
                return s
        raise DanglingReference(f"unknown institution {sid!r}")

    def individual(self, iid: str) -> Individual:
        for ind in self.individuals:
            if ind.id == iid:
                return ind
        raise DanglingReference(f"unknown individual {iid!r}")

    def preference(self, iid: str) -> tuple[str, ...]:
        return self.preferences.get(iid, ())

    def memberships(self) -> dict[str, str]:
        """Effective (reported) category of every individual."""
        gc = self.general_label
        return {ind.id: ind.effective(gc) for ind in self.individuals}

    def individual_ids(self) -> tuple[str, ...]:
        return tuple(ind.id for ind in self.individuals)


def _dupes(items: Iterable[str]) -> list[str]:
    return [k for k, n in Counter(items).items() if n > 1]


def validate_instance(raw: MarketInstance) -> MarketInstance:
    """Check every invariant of ``raw`` and return a normalised copy.

    The copy carries an explicit zero for every reserve category an
    institution does not mention, and a preference entry per individual.
    Raises a ``ValidationError`` subclass on the first problem found.
    """
    kinds = Counter(c.kind for c in raw.categories)
    bad = [c.kind for c in raw.categories if c.kind not in KINDS]
    if bad:
        raise InvalidCategory(f"unknown category kind(s) {bad}")
    if kinds[OPEN] > 1:
        raise MultipleOpenCategories(f"{kinds[OPEN]} categories of kind 'open'")
    if kinds[OPEN] == 0:
        raise InvalidCategory("no open category declared")
    if kinds[GENERAL] > 1:
        raise InvalidCategory("more than one general membership label")
    if d := _dupes(c.name for c in raw.categories):
        raise DuplicateId(f"duplicate category names {d}")

    categories = tuple(raw.categories)
    if kinds[GENERAL] == 0:
        categories += (Category(DEFAULT_GENERAL, GENERAL),)
    reserves = [c.name for c in categories if c.kind == RESERVE]
    general = next(c.name for c in categories if c.kind == GENERAL)

    if d := _dupes(i.id for i in raw.individuals):
        raise DuplicateId(f"duplicate individual ids {d}")
    if d := _dupes(s.id for s in raw.institutions):
        raise DuplicateId(f"duplicate institution ids {d}")

    people = {i.id for i in raw.individuals}
    for ind in raw.individuals:
        if ind.category != general and ind.category not in reserves:
            raise DanglingReference(f"individual {ind.id!r} has unknown category {ind.category!r}")
        if ind.declared and ind.category == general:
            raise InvalidCategory(f"individual {ind.id!r} declares membership but belongs to {general}")

    institutions = []
    for s in raw.institutions:
        cap = s.capacity
        if cap.total < 0 or any(v < 0 for v in cap.reserved.values()):
            raise CapacityOverflow(f"negative capacity at {s.id!r}")
        for r in cap.reserved:
            if r not in reserves:
                raise DanglingReference(f"{s.id!r} reserves seats for unknown category {r!r}")
        if sum(cap.reserved.values()) > cap.total:
            raise CapacityOverflow(
                f"{s.id!r}: reserved {sum(cap.reserved.values())} exceeds total {cap.total}"
            )
        if d := _dupes(s.merit):
            raise TieInMerit(f"{s.id!r}: individuals listed more than once in merit order {d}")
        for i in s.merit:
            if i not in people:
                raise DanglingReference(f"{s.id!r} ranks unknown individual {i!r}")
        reserved = {r: cap.reserved.get(r, 0) for r in reserves}
        institutions.append(Institution(s.id, Capacity(cap.total, reserved), s.merit))

    schools = {s.id for s in raw.institutions}
    prefs = {}
    for i, plist in raw.preferences.items():
        if i not in people:
            raise DanglingReference(f"preferences given for unknown individual {i!r}")
        if d := _dupes(plist):
            raise DuplicateId(f"{i!r} lists institutions more than once {d}")
        for s in plist:
            if s not in schools:
                raise DanglingReference(f"{i!r} lists unknown institution {s!r}")
    for ind in raw.individuals:
        prefs[ind.id] = tuple(raw.preferences.get(ind.id, ()))

    return MarketInstance(categories, tuple(institutions), tuple(raw.individuals), prefs)


@dataclass(frozen=True)
class Seat:
    institution: str
    category: str


@dataclass(frozen=True)
class Assignment:
    """Institution-category pair per individual; ``None`` means unassigned."""

    seats: Mapping[str, Optional[Seat]]

    def __post_init__(self):
        object.__setattr__(self, "seats", dict(self.seats))

    def of(self, i: str) -> Optional[Seat]:
        return self.seats.get(i)

    def holders(self, sid: str) -> list[tuple[str, str]]:
        """``(individual, category)`` pairs held at ``sid``."""
        return [(i, seat.category) for i, seat in self.seats.items()
                if seat is not None and seat.institution == sid]

    def institution_of(self, i: str) -> Optional[str]:
        seat = self.seats.get(i)
        return None if seat is None else seat.institution


class InvalidAssignment(ValidationError):
    pass


def validate_assignment(instance: MarketInstance, a: Assignment) -> Assignment:
    """Enforce eligibility (GC holds open only; members hold open or their own
    category), total capacity, and per-reserve capacity. Open seats are
    bounded only through the total, matching the assignment definition."""
    members = instance.memberships()
    open_name = instance.open_category
    extra = set(a.seats) - set(members)
    if extra:
        raise DanglingReference(f"assignment names unknown individuals {sorted(extra)}")
    seats = {i: a.seats.get(i) for i in members}
    for i, seat in seats.items():
        if seat is None:
            continue
        instance.institution(seat.institution)
        if seat.category != open_name and seat.category != members[i]:
            raise InvalidAssignment(
                f"{i!r} (effective {members[i]}) cannot hold a {seat.category!r} seat"
            )
        if seat.category not in instance.reserves and seat.category != open_name:
            raise InvalidAssignment(f"{i!r} holds a seat in non-position category {seat.category!r}")
    out = Assignment(seats)
    for s in instance.institutions:
        held = out.holders(s.id)
        if len(held) > s.capacity.total:
            raise InvalidAssignment(f"{s.id!r} holds {len(held)} > {s.capacity.total} individuals")
        used = Counter(c for _, c in held)
        for r in instance.reserves:
            if used[r] > s.capacity.of(r):
                raise InvalidAssignment(f"{s.id!r} fills {used[r]} > {s.capacity.of(r)} {r} seats")
    return out


@dataclass(frozen=True)
class Matching:
    assigned: Mapping[str, Optional[str]]

    def __post_init__(self):
        object.__setattr__(self, "assigned", dict(self.assigned))

    def of(self, i: str) -> Optional[str]:
        return self.assigned.get(i)

    def members(self, sid: str) -> frozenset[str]:
        return frozenset(i for i, s in self.assigned.items() if s == sid)


def induced_matching(a: Assignment) -> Matching:
    """Forget the seat categories of an assignment."""
    return Matching({i: (None if seat is None else seat.institution) for i, seat in a.seats.items()})
