"""Applicant-proposing deferred acceptance where every institution chooses
with the over-and-above rule, plus assignment-level audits."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .choice import ChoiceResult, Violation, over_and_above_choose
from .model import Assignment, MarketInstance, Seat, induced_matching

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstitutionRound:
    institution: str
    pool: frozenset[str]
    held: ChoiceResult
    rejected: frozenset[str]


@dataclass(frozen=True)
class RoundLog:
    index: int
    proposals: tuple[tuple[str, str], ...]  # (individual, institution) made this round
    institutions: tuple[InstitutionRound, ...]


def _seats_from(result: ChoiceResult, sid: str, open_name: str) -> dict[str, Seat]:
    seats = {i: Seat(sid, open_name) for i in result.open}
    for r, chosen in result.reserved.items():
        seats.update({i: Seat(sid, r) for i in chosen})
    return seats


def run_da_oa(instance: MarketInstance) -> tuple[Assignment, list[RoundLog]]:
    """Run DA-OA to termination.

    Each round, every individual without a tentative seat proposes to the
    next institution on their list; each institution re-chooses from what it
    holds plus its new proposers. Seat categories are read off the final
    choice at each institution, since a held individual may move between
    open and reserve seats across rounds.
    """
    members = instance.memberships()
    order = instance.individual_ids()
    by_id = {s.id: s for s in instance.institutions}
    next_choice = {i: 0 for i in order}
    holding: dict[str, Optional[str]] = {i: None for i in order}
    held = {s.id: ChoiceResult() for s in instance.institutions}
    logs: list[RoundLog] = []

    while True:
        proposals = []
        for i in order:
            plist = instance.preference(i)
            if holding[i] is None and next_choice[i] < len(plist):
                proposals.append((i, plist[next_choice[i]]))
                next_choice[i] += 1
        if not proposals:
            break

        entries = []
        for s in instance.institutions:
            new = {i for i, t in proposals if t == s.id}
            pool = held[s.id].chosen | new
            if not pool:
                continue
            result = over_and_above_choose(by_id[s.id], pool, members)
            for i in pool:
                holding[i] = s.id if i in result.chosen else None
            held[s.id] = result
            entries.append(InstitutionRound(s.id, frozenset(pool), result, result.rejected))
        logs.append(RoundLog(len(logs) + 1, tuple(proposals), tuple(entries)))
        logger.debug("round %d: %d proposals", len(logs), len(proposals))

    seats: dict[str, Optional[Seat]] = {i: None for i in order}
    for sid, result in held.items():
        seats.update(_seats_from(result, sid, instance.open_category))
    return Assignment(seats), logs


def _prefers(instance: MarketInstance, i: str, s: str, current: Optional[str]) -> bool:
    """Whether ``i`` strictly prefers ``s`` to ``current`` (``None`` = unassigned)."""
    plist = instance.preference(i)
    if s not in plist:
        return False
    if current is None:
        return True
    if current not in plist:
        return True
    return plist.index(s) < plist.index(current)


def _envy_pairs(instance: MarketInstance, a: Assignment):
    for ind in instance.individuals:
        current = a.institution_of(ind.id)
        for sid in instance.preference(ind.id):
            if sid == current:
                break
            if _prefers(instance, ind.id, sid, current):
                yield ind.id, instance.institution(sid)


def is_individually_rational(instance: MarketInstance, a: Assignment) -> Optional[Violation]:
    for ind in instance.individuals:
        s = a.institution_of(ind.id)
        if s is not None and s not in instance.preference(ind.id):
            return Violation("individual-rationality", (ind.id, s),
                             f"{ind.id} is placed at {s}, which they did not list")
    return None


def is_within_category_fair(instance: MarketInstance, a: Assignment) -> Optional[Violation]:
    members = instance.memberships()
    open_name = instance.open_category
    for i, s in _envy_pairs(instance, a):
        mine = members[i]
        for j, c in a.holders(s.id):
            if c == open_name or (c == mine and mine in instance.reserves):
                if not s.prefers(j, i):
                    return Violation("within-category-fairness", (i, s.id, j),
                                     f"{i} prefers {s.id} and outranks {j}, who holds a {c} seat there")
    return None


def is_non_wasteful(instance: MarketInstance, a: Assignment) -> Optional[Violation]:
    """Every seat an envious individual is eligible for must be taken.

    Individuals the institution finds unacceptable are eligible for nothing
    there, so their envy never counts as waste.
    """
    members = instance.memberships()
    open_name = instance.open_category
    for i, s in _envy_pairs(instance, a):
        if not s.acceptable(i):
            continue
        held = [c for _, c in a.holders(s.id)]
        if held.count(open_name) < s.capacity.open:
            return Violation("non-wastefulness", (i, s.id),
                             f"{i} prefers {s.id}, which has an empty open seat")
        r = members[i]
        if r in instance.reserves and held.count(r) < s.capacity.of(r):
            return Violation("non-wastefulness", (i, s.id),
                             f"{i} prefers {s.id}, which has an empty {r} seat")
    return None


def satisfies_over_and_above_assignment(instance: MarketInstance, a: Assignment) -> Optional[Violation]:
    open_name = instance.open_category
    for s in instance.institutions:
        held = a.holders(s.id)
        for i, ci in held:
            if ci != open_name:
                continue
            for j, cj in held:
                if cj != open_name and not s.prefers(i, j):
                    return Violation("over-and-above", (s.id, j, i),
                                     f"at {s.id}, {j} holds a {cj} seat but outranks open holder {i}")
    return None


def is_stable(instance: MarketInstance, a: Assignment) -> Optional[Violation]:
    """Stability of the induced matching with respect to over-and-above choice:
    individual rationality, each institution's set is its own choice, and no
    individual would be chosen by an institution they prefer."""
    ir = is_individually_rational(instance, a)
    if ir is not None:
        return Violation("stability", ("individual-rationality",) + ir.subjects, ir.detail)
    members = instance.memberships()
    mu = induced_matching(a)
    for s in instance.institutions:
        current = mu.members(s.id)
        if over_and_above_choose(s, current, members).chosen != current:
            return Violation("stability", ("fixed-point", s.id),
                             f"{s.id} would not choose its own assigned set")
    for ind in instance.individuals:
        here = mu.of(ind.id)
        for sid in instance.preference(ind.id):
            if sid == here:
                break
            s = instance.institution(sid)
            if ind.id in over_and_above_choose(s, mu.members(sid) | {ind.id}, members).chosen:
                return Violation("stability", ("blocking-pair", ind.id, sid),
                                 f"{sid} would choose {ind.id}, who prefers it to their placement")
    return None


AUDITS = {
    "individual-rationality": is_individually_rational,
    "within-category-fairness": is_within_category_fair,
    "non-wastefulness": is_non_wasteful,
    "over-and-above": satisfies_over_and_above_assignment,
    "stability": is_stable,
}


def audit_assignment(instance: MarketInstance, a: Assignment) -> dict[str, Optional[Violation]]:
    return {name: check(instance, a) for name, check in AUDITS.items()}
