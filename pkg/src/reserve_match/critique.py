"""The verbal three-principle characterization, read literally, and the
counterexamples showing it does not pin down the over-and-above rule.

The "as stated" predicates here deliberately encode the literal wording:
over-and-above is only disjointness plus fixed reserve quotas, and filling
means no compliant alternative seats more people.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional

from .choice import (
    ChoiceResult,
    Violation,
    audit_choice,
    check_within_category_fairness,
    over_and_above_choose,
)
from .io import choice_to_dict, load_fixture, violation_to_dict
from .model import Institution, MarketInstance
from .oracle import enumerate_feasible_selections, verify_theorem1


def check_inter_se_merit_as_stated(
    inst: Institution, pool, result: ChoiceResult, memberships: Mapping[str, str]
) -> Optional[Violation]:
    """Same-category individuals: if the lower one gets any seat, so must the higher."""
    v = check_within_category_fairness(inst, pool, result, memberships)
    return None if v is None else Violation("inter-se-merit (as stated)", v.subjects, v.detail)


def check_over_and_above_as_stated(inst: Institution, pool, result: ChoiceResult) -> Optional[Violation]:
    groups = [("open", result.open)] + sorted(result.reserved.items())
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            both = groups[a][1] & groups[b][1]
            if both:
                who = sorted(both)[0]
                return Violation("over-and-above (as stated)", (who, groups[a][0], groups[b][0]),
                                 f"{who} is chosen in both {groups[a][0]} and {groups[b][0]}")
    for r, chosen in sorted(result.reserved.items()):
        if len(chosen) > inst.capacity.of(r):
            return Violation("over-and-above (as stated)", (r,),
                             f"{r} seats {len(chosen)} > its fixed quota {inst.capacity.of(r)}")
    return None


def _as_stated_first_two(inst, pool, sel, memberships) -> bool:
    return (check_inter_se_merit_as_stated(inst, pool, sel, memberships) is None
            and check_over_and_above_as_stated(inst, pool, sel) is None)


def fullest_as_stated(inst: Institution, pool, memberships: Mapping[str, str]) -> Optional[ChoiceResult]:
    """First selection, in enumeration order, seating the most people while
    obeying the first two as-stated principles."""
    pool = frozenset(pool)
    best = None
    for sel in enumerate_feasible_selections(inst, pool, memberships):
        if _as_stated_first_two(inst, pool, sel, memberships):
            if best is None or sel.filled() > best.filled():
                best = sel
    return best


def check_filling_as_stated(
    inst: Institution, pool, result: ChoiceResult, memberships: Mapping[str, str]
) -> Optional[Violation]:
    best = fullest_as_stated(inst, pool, memberships)
    if best is not None and best.filled() > result.filled():
        seats = (("open", tuple(sorted(best.open))),) + tuple(
            (r, tuple(sorted(v))) for r, v in best.reserved.items() if v)
        return Violation("filling (as stated)", seats,
                         f"a compliant selection fills {best.filled()} > {result.filled()} seats")
    return None


def audit_as_stated(inst, pool, result, memberships) -> dict[str, Optional[Violation]]:
    pool = frozenset(pool)
    return {
        "inter-se-merit": check_inter_se_merit_as_stated(inst, pool, result, memberships),
        "over-and-above": check_over_and_above_as_stated(inst, pool, result),
        "filling": check_filling_as_stated(inst, pool, result, memberships),
    }


@dataclass(frozen=True)
class Example:
    name: str
    instance: MarketInstance
    institution: Institution
    memberships: Mapping[str, str]
    pool: frozenset[str]


@lru_cache(maxsize=None)
def example(name: str) -> Example:
    instance = load_fixture(name)
    inst = instance.institutions[0]
    return Example(name, instance, inst, instance.memberships(), frozenset(instance.individual_ids()))


def _reserve(ex: Example) -> str:
    return ex.instance.reserves[0]


def c_tilde_example1(pool) -> ChoiceResult:
    """Swaps the two members on the full example pool; over-and-above elsewhere."""
    ex = example("example1")
    pool = frozenset(pool)
    if pool == frozenset({"i", "j"}):
        return ChoiceResult({"j"}, {_reserve(ex): {"i"}}, frozenset())
    return over_and_above_choose(ex.institution, pool, ex.memberships)


def c_tilde_example3(pool) -> ChoiceResult:
    """Seats j in the open category and k in the reserve on the full example
    pool, leaving the general-category top scorer i out."""
    ex = example("example3")
    pool = frozenset(pool)
    if pool == frozenset({"i", "j", "k"}):
        return ChoiceResult({"j"}, {_reserve(ex): {"k"}}, {"i"})
    return over_and_above_choose(ex.institution, pool, ex.memberships)


def _audits(ex: Example, result: ChoiceResult) -> dict:
    return {
        "as_stated": {k: violation_to_dict(v)
                      for k, v in audit_as_stated(ex.institution, ex.pool, result, ex.memberships).items()},
        "formal": {k: violation_to_dict(v)
                   for k, v in audit_choice(ex.institution, ex.pool, result, ex.memberships).items()},
    }


def _count_as_stated(ex: Example) -> int:
    return sum(
        1 for sel in enumerate_feasible_selections(ex.institution, ex.pool, ex.memberships)
        if not any(audit_as_stated(ex.institution, ex.pool, sel, ex.memberships).values())
    )


def repro_report() -> dict:
    """Machine-checked account of the three counterexamples."""
    ex1, ex2, ex3 = example("example1"), example("example2"), example("example3")

    oa1 = over_and_above_choose(ex1.institution, ex1.pool, ex1.memberships)
    alt1 = c_tilde_example1(ex1.pool)
    a1 = _audits(ex1, alt1)

    oa2 = over_and_above_choose(ex2.institution, ex2.pool, ex2.memberships)
    a2 = _audits(ex2, oa2)
    fill2 = check_filling_as_stated(ex2.institution, ex2.pool, oa2, ex2.memberships)
    fuller2 = fullest_as_stated(ex2.institution, ex2.pool, ex2.memberships)

    oa3 = over_and_above_choose(ex3.institution, ex3.pool, ex3.memberships)
    alt3 = c_tilde_example3(ex3.pool)
    a3 = _audits(ex3, alt3)

    def passes(audit):
        return all(v is None for v in audit.values())

    def dump(ex, r):
        return choice_to_dict(ex.instance, r)

    formal_oa = {}
    for ex, oa in ((ex1, oa1), (ex2, oa2), (ex3, oa3)):
        check = verify_theorem1(ex.institution, ex.pool, ex.memberships)
        formal_oa[ex.name] = {
            "result": dump(ex, oa),
            "violations": [k for k, v in audit_choice(ex.institution, ex.pool, oa, ex.memberships).items() if v],
            "formal_compliant_selections": len(check.passing),
            "unique_and_equal": check.confirmed,
        }

    top3 = ex3.institution.merit[0]
    assertions = [
        {
            "id": 1,
            "claim": "example1: the alternative rule passes all three as-stated principles",
            "holds": passes(a1["as_stated"]),
            "evidence": {"alternative": dump(ex1, alt1), "as_stated": a1["as_stated"]},
        },
        {
            "id": 2,
            "claim": "example1: the alternative differs from over-and-above choice and breaks the formal principle",
            "holds": (not alt1.same_as(oa1)) and a1["formal"]["over-and-above"] is not None,
            "evidence": {
                "over_and_above": dump(ex1, oa1),
                "alternative": dump(ex1, alt1),
                "formal": a1["formal"],
                "as_stated_compliant_selections": _count_as_stated(ex1),
            },
        },
        {
            "id": 3,
            "claim": "example2: over-and-above choice violates as-stated filling",
            "holds": fill2 is not None,
            "evidence": {
                "over_and_above": dump(ex2, oa2),
                "fuller_alternative": dump(ex2, fuller2),
                "seats_filled": oa2.filled(),
                "alternative_seats_filled": fuller2.filled(),
                "as_stated_violations": [k for k, v in a2["as_stated"].items() if v],
            },
        },
        {
            "id": 4,
            "claim": "example3: the alternative passes the as-stated principles, leaves the top scorer "
                     "unassigned, and fails the formal audit",
            "holds": passes(a3["as_stated"]) and top3 in alt3.rejected and not passes(a3["formal"]),
            "evidence": {
                "alternative": dump(ex3, alt3),
                "top_scorer": top3,
                "as_stated": a3["as_stated"],
                "formal": a3["formal"],
                "over_and_above": dump(ex3, oa3),
            },
        },
        {
            "id": 5,
            "claim": "all three over-and-above outputs satisfy the formal principles and are the unique such selection",
            "holds": all(not v["violations"] and v["unique_and_equal"] for v in formal_oa.values()),
            "evidence": formal_oa,
        },
    ]
    return {"assertions": assertions, "all_hold": all(a["holds"] for a in assertions)}

