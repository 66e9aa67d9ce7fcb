"""Over-and-above choice at a single institution and the three choice-level axioms.

Everything here works on ids and is written for clarity; the bitmask kernels
in :mod:`reserve_match.kernels` are the fast path used by the oracles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .model import DanglingReference, Institution, ValidationError


class UnknownCategory(ValidationError):
    pass


class NotInPool(ValueError):
    pass


class Unacceptable(ValueError):
    pass


@dataclass(frozen=True)
class ChoiceResult:
    """Chosen sets per position category at one institution.

    Construction does not enforce disjointness; the predicates below (and
    the as-stated critique checks) are what judge a result.
    """

    open: frozenset[str] = frozenset()
    reserved: Mapping[str, frozenset[str]] = field(default_factory=dict)
    rejected: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "open", frozenset(self.open))
        object.__setattr__(self, "rejected", frozenset(self.rejected))
        object.__setattr__(
            self, "reserved", {r: frozenset(v) for r, v in sorted(self.reserved.items())}
        )

    def of(self, category: Optional[str]) -> frozenset[str]:
        """Chosen set for a reserve name, or the open set when ``None``."""
        if category is None:
            return self.open
        return self.reserved.get(category, frozenset())

    @property
    def chosen(self) -> frozenset[str]:
        out = set(self.open)
        for v in self.reserved.values():
            out |= v
        return frozenset(out)

    def filled(self) -> int:
        return len(self.open) + sum(len(v) for v in self.reserved.values())

    def same_as(self, other: "ChoiceResult") -> bool:
        """Equality ignoring reserve categories with empty chosen sets."""
        mine = {r: v for r, v in self.reserved.items() if v}
        theirs = {r: v for r, v in other.reserved.items() if v}
        return self.open == other.open and mine == theirs and self.rejected == other.rejected


@dataclass(frozen=True)
class CategoryMeritOrder:
    category: str
    ranked: tuple[str, ...]


@dataclass(frozen=True)
class Violation:
    """Witness for a failed axiom: which axiom, who, and a readable reason."""

    axiom: str
    subjects: tuple
    detail: str = ""


def _pool(pool: Iterable[str], memberships: Mapping[str, str]) -> frozenset[str]:
    pool = frozenset(pool)
    missing = pool - set(memberships)
    if missing:
        raise DanglingReference(f"pool names unknown individuals {sorted(missing)}")
    return pool


def derive_category_merit(
    inst: Institution, memberships: Mapping[str, str], r: str
) -> CategoryMeritOrder:
    """Acceptable effective members of ``r`` in the institution's merit order."""
    if r not in inst.capacity.reserved:
        raise UnknownCategory(f"{r!r} is not a reserve category at {inst.id!r}")
    return CategoryMeritOrder(r, tuple(i for i in inst.merit if memberships.get(i) == r))


def rank_in_set(inst: Institution, pool: Iterable[str], i: str) -> int:
    """1 + number of pool members strictly above ``i`` in merit."""
    pool = frozenset(pool)
    if i not in pool:
        raise NotInPool(i)
    if not inst.acceptable(i):
        raise Unacceptable(f"{i!r} is unacceptable at {inst.id!r}")
    return 1 + sum(1 for j in pool if inst.prefers(j, i))


def over_and_above_choose(
    inst: Institution, pool: Iterable[str], memberships: Mapping[str, str]
) -> ChoiceResult:
    """Open seats go to the top of the pool by merit; each reserve category then
    takes its top remaining eligible members up to its own quota."""
    pool = _pool(pool, memberships)
    ranked = [i for i in inst.merit if i in pool]

    open_set = frozenset(ranked[: inst.capacity.open])
    remaining = pool - open_set

    reserved = {}
    for r in sorted(inst.capacity.reserved):
        eligible = derive_category_merit(inst, memberships, r).ranked
        eligible = [i for i in eligible if i in remaining]
        reserved[r] = frozenset(eligible[: inst.capacity.of(r)])

    result = ChoiceResult(open_set, reserved)
    return ChoiceResult(open_set, reserved, pool - result.chosen)


def check_over_and_above_principle(
    inst: Institution, pool: Iterable[str], result: ChoiceResult
) -> Optional[Violation]:
    pool = frozenset(pool)
    q_open = inst.capacity.open
    for i in (i for i in inst.merit if i in pool):
        if rank_in_set(inst, pool, i) <= q_open and i not in result.open:
            return Violation(
                "over-and-above", (i,),
                f"{i} ranks {rank_in_set(inst, pool, i)} <= {q_open} open seats but is not in the open set",
            )
    return None


def check_within_category_fairness(
    inst: Institution, pool: Iterable[str], result: ChoiceResult, memberships: Mapping[str, str]
) -> Optional[Violation]:
    pool = sorted(pool)
    assigned = result.chosen
    for i in pool:
        if i in assigned:
            continue
        for j in pool:
            if j in assigned and memberships[i] == memberships[j] and inst.prefers(i, j):
                return Violation(
                    "within-category-fairness", (i, j),
                    f"{i} outranks {j} in category {memberships[i]} but only {j} is chosen",
                )
    return None


def check_quota_filling(
    inst: Institution, pool: Iterable[str], result: ChoiceResult, memberships: Mapping[str, str]
) -> Optional[Violation]:
    assigned = result.chosen
    for r in sorted(inst.capacity.reserved):
        waiting = sorted(i for i in pool
                         if memberships[i] == r and inst.acceptable(i) and i not in assigned)
        if waiting and len(result.of(r)) != inst.capacity.of(r):
            return Violation(
                "quota-filling", (r, waiting[0]),
                f"{waiting[0]} ({r}) is unassigned while {r} holds "
                f"{len(result.of(r))} of {inst.capacity.of(r)} seats",
            )
    return None


def audit_choice(
    inst: Institution, pool: Iterable[str], result: ChoiceResult, memberships: Mapping[str, str]
) -> dict[str, Optional[Violation]]:
    """All three choice-level axioms, keyed by name."""
    pool = frozenset(pool)
    return {
        "over-and-above": check_over_and_above_principle(inst, pool, result),
        "within-category-fairness": check_within_category_fairness(inst, pool, result, memberships),
        "quota-filling": check_quota_filling(inst, pool, result, memberships),
    }
