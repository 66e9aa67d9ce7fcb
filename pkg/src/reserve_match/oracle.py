"""Brute-force checks of the over-and-above rule and of DA-OA.

Two routes exist for most checks. The object-level functions here
(``enumerate_feasible_selections``, ``verify_theorem1``, rule-agnostic
``check_substitutability``) work on ids and accept any choice rule; the
corpus sweeps call the bitmask kernels. Tests hold the two routes against
each other.
"""
from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .choice import ChoiceResult, audit_choice, over_and_above_choose
from .model import (
    INDIA_RESERVES,
    Capacity,
    Category,
    Individual,
    Institution,
    MarketInstance,
    validate_instance,
)

logger = logging.getLogger(__name__)


class GuardError(ValueError):
    """An enumeration was asked to run beyond its hard size limit."""


class PoolTooLarge(GuardError):
    pass


class UniverseTooLarge(GuardError):
    pass


class InstanceTooLarge(GuardError):
    pass


class BadParams(ValueError):
    pass


def _limit(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


MAX_POOL = _limit("RESERVE_MATCH_MAX_POOL", 10)
MAX_UNIVERSE = _limit("RESERVE_MATCH_MAX_UNIVERSE", 10)
MAX_MANIP_INSTITUTIONS = _limit("RESERVE_MATCH_MAX_MANIP_INSTITUTIONS", 4)
MAX_MANIP_INDIVIDUALS = _limit("RESERVE_MATCH_MAX_MANIP_INDIVIDUALS", 6)

_OPEN_SEAT = object()

ChoiceRule = Callable[[Institution, frozenset, Mapping[str, str]], ChoiceResult]


def enumerate_feasible_selections(
    inst: Institution, pool, memberships: Mapping[str, str]
) -> Iterator[ChoiceResult]:
    """Every capacity- and eligibility-respecting way to seat part of ``pool``.

    Each acceptable member is left out, put in an open seat, or (if they
    belong to a reserve category) put in a seat of that category.
    """
    pool = frozenset(pool)
    if len(pool) > MAX_POOL:
        raise PoolTooLarge(f"pool of {len(pool)} exceeds the enumeration limit {MAX_POOL}")
    people = [i for i in inst.merit if i in pool]
    options = []
    for i in people:
        opts = [None, _OPEN_SEAT]
        if memberships[i] in inst.capacity.reserved:
            opts.append(memberships[i])
        options.append(opts)
    for choice in itertools.product(*options):
        open_set = {i for i, c in zip(people, choice) if c is _OPEN_SEAT}
        if len(open_set) > inst.capacity.open:
            continue
        reserved = {r: {i for i, c in zip(people, choice) if c == r} for r in inst.capacity.reserved}
        if any(len(v) > inst.capacity.of(r) for r, v in reserved.items()):
            continue
        chosen = open_set.union(*reserved.values())
        yield ChoiceResult(open_set, reserved, pool - chosen)


@dataclass(frozen=True)
class Theorem1Check:
    pool: frozenset[str]
    expected: ChoiceResult
    passing: tuple[ChoiceResult, ...]

    @property
    def confirmed(self) -> bool:
        return len(self.passing) == 1 and self.passing[0].same_as(self.expected)


def verify_theorem1(inst: Institution, pool, memberships: Mapping[str, str]) -> Theorem1Check:
    """Collect every feasible selection satisfying the three axioms; confirmed
    when that is exactly the over-and-above choice."""
    pool = frozenset(pool)
    passing = tuple(
        sel for sel in enumerate_feasible_selections(inst, pool, memberships)
        if not any(audit_choice(inst, pool, sel, memberships).values())
    )
    return Theorem1Check(pool, over_and_above_choose(inst, pool, memberships), passing)


def _subsets(universe: Sequence[str]):
    for k in range(len(universe) + 1):
        yield from itertools.combinations(universe, k)


def _chosen_table(inst, universe, memberships, rule: ChoiceRule) -> dict[frozenset, frozenset]:
    return {frozenset(a): rule(inst, frozenset(a), memberships).chosen for a in _subsets(universe)}


def check_substitutability(
    inst: Institution, universe, memberships: Mapping[str, str],
    rule: ChoiceRule = over_and_above_choose,
) -> Optional[tuple[frozenset, str, str]]:
    """Witness ``(A, i, j)``: ``i`` rejected from A+i yet chosen from A+i+j."""
    universe = sorted(universe)
    if len(universe) > MAX_UNIVERSE:
        raise UniverseTooLarge(f"universe of {len(universe)} exceeds {MAX_UNIVERSE}")
    table = _chosen_table(inst, universe, memberships, rule)
    for a in _subsets(universe):
        a = frozenset(a)
        for i in universe:
            if i in a or i in table[a | {i}]:
                continue
            for j in universe:
                if j != i and j not in a and i in table[a | {i, j}]:
                    return a, i, j
    return None


def check_size_monotonicity(
    inst: Institution, universe, memberships: Mapping[str, str],
    rule: ChoiceRule = over_and_above_choose,
) -> Optional[tuple[frozenset, str]]:
    """Witness ``(A, i)`` with ``|C(A)| > |C(A + i)|``."""
    universe = sorted(universe)
    if len(universe) > MAX_UNIVERSE:
        raise UniverseTooLarge(f"universe of {len(universe)} exceeds {MAX_UNIVERSE}")
    table = _chosen_table(inst, universe, memberships, rule)
    for a in _subsets(universe):
        a = frozenset(a)
        for i in universe:
            if i not in a and len(table[a]) > len(table[a | {i}]):
                return a, i
    return None


# Planted rules for harness self-tests. Each is wrong on purpose.

def reserve_first_choose(inst: Institution, pool, memberships) -> ChoiceResult:
    """Reserve seats are handed out before open seats."""
    pool = frozenset(pool)
    ranked = [i for i in inst.merit if i in pool]
    reserved = {}
    taken = set()
    for r in sorted(inst.capacity.reserved):
        picks = [i for i in ranked if memberships[i] == r][: inst.capacity.of(r)]
        reserved[r] = frozenset(picks)
        taken.update(picks)
    open_set = frozenset([i for i in ranked if i not in taken][: inst.capacity.open])
    chosen = open_set | taken
    return ChoiceResult(open_set, reserved, pool - chosen)


def contested_release_choose(inst: Institution, pool, memberships) -> ChoiceResult:
    """Open stage as usual, but a reserve category's seats are only released
    when more eligible members remain than it has seats."""
    base = over_and_above_choose(inst, pool, memberships)
    reserved = {}
    for r, chosen in base.reserved.items():
        remaining = [i for i in base.rejected | chosen
                     if memberships[i] == r and inst.acceptable(i)]
        reserved[r] = chosen if len(remaining) > inst.capacity.of(r) else frozenset()
    out = ChoiceResult(base.open, reserved)
    return ChoiceResult(base.open, reserved, frozenset(pool) - out.chosen)


def drop_two_choose(inst: Institution, pool, memberships) -> ChoiceResult:
    """Whenever anyone is turned away, also drop the two lowest-merit picks."""
    base = over_and_above_choose(inst, pool, memberships)
    if not any(inst.acceptable(i) for i in base.rejected):
        return base
    picked = [i for i in inst.merit if i in base.chosen]
    dropped = set(picked[-2:])
    reserved = {r: v - dropped for r, v in base.reserved.items()}
    return ChoiceResult(base.open - dropped, reserved, base.rejected | dropped)


# Manipulation search


@dataclass(frozen=True)
class Deviation:
    individual: str
    preferences: tuple[str, ...]
    hidden: bool  # True: membership withheld, treated as general category


@dataclass(frozen=True)
class ManipulationWitness:
    deviation: Deviation
    truthful: Optional[str]
    deviant: Optional[str]


def preference_reports(institutions: Sequence[str]) -> list[tuple[str, ...]]:
    """All orderings of all subsets, shortest first (canonical search order)."""
    out = []
    for k in range(len(institutions) + 1):
        out.extend(itertools.permutations(institutions, k))
    return out


def manipulation_search(instance: MarketInstance, mechanism: str = "da-oa") -> Optional[ManipulationWitness]:
    """Look for a report that strictly improves someone's placement.

    Every individual tries every preference list and, if they belong to a
    reserve category, both declaring and hiding that membership. Returns
    the first improving deviation in canonical order, or ``None``.
    """
    if len(instance.institutions) > MAX_MANIP_INSTITUTIONS or len(instance.individuals) > MAX_MANIP_INDIVIDUALS:
        raise InstanceTooLarge(
            f"{len(instance.institutions)} institutions / {len(instance.individuals)} individuals exceed "
            f"{MAX_MANIP_INSTITUTIONS}/{MAX_MANIP_INDIVIDUALS}"
        )
    mech = {"da-oa": kernels.MECH_DA_OA, "immediate": kernels.MECH_IMMEDIATE}[mechanism]
    if not instance.individuals or not instance.institutions:
        return None
    enc = kernels.encode(instance)
    m = len(enc.institutions)
    reports = preference_reports(list(range(m)))
    dev_prefs = np.full((len(reports), enc.prefs.shape[1]), -1, np.int64)
    dev_len = np.zeros(len(reports), np.int64)
    for d, rep in enumerate(reports):
        dev_prefs[d, : len(rep)] = rep
        dev_len[d] = len(rep)
    i, d, h, truthful, deviant = kernels.manipulation_sweep(
        mech, enc.orders, enc.eff_cat, enc.true_cat, enc.caps, enc.prefs, enc.pref_len, dev_prefs, dev_len
    )
    if i < 0:
        return None
    name = lambda s: None if s < 0 else enc.institutions[s]
    dev = Deviation(enc.individuals[i], tuple(enc.institutions[s] for s in reports[d]), bool(h))
    return ManipulationWitness(dev, name(truthful), name(deviant))


# Random instances


@dataclass(frozen=True)
class GeneratorParams:
    individuals: tuple[int, int] = (0, 6)
    institutions: tuple[int, int] = (1, 3)
    reserve_categories: tuple[int, int] = (0, 3)
    total_capacity: tuple[int, int] = (0, 4)
    reserve_capacity_max: int = 4
    preset: str = "india"
    category_weights: Optional[Mapping[str, float]] = None
    hide_probability: float = 0.2
    unacceptable_probability: float = 0.1

    def check(self):
        for name in ("individuals", "institutions", "reserve_categories", "total_capacity"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise BadParams(f"{name} range {lo}..{hi} is invalid")
        if self.individuals[1] > kernels.MAX_BITS:
            raise BadParams(f"at most {kernels.MAX_BITS} individuals")
        if self.preset == "india" and self.reserve_categories[1] > len(INDIA_RESERVES):
            raise BadParams(f"preset 'india' has only {len(INDIA_RESERVES)} reserve categories")
        if self.preset not in ("india", "generic"):
            raise BadParams(f"unknown preset {self.preset!r}")
        if self.reserve_capacity_max < 0:
            raise BadParams("reserve_capacity_max must be non-negative")
        for p in (self.hide_probability, self.unacceptable_probability):
            if not 0.0 <= p <= 1.0:
                raise BadParams(f"probability {p} outside [0, 1]")


def generate_instance(seed, params: GeneratorParams = GeneratorParams()) -> MarketInstance:
    """Random validated market; identical for identical ``seed`` and ``params``."""
    params.check()
    rng = np.random.default_rng(seed)
    draw = lambda lo_hi: int(rng.integers(lo_hi[0], lo_hi[1] + 1))

    n_res = draw(params.reserve_categories)
    names = list(INDIA_RESERVES[:n_res]) if params.preset == "india" else [f"R{k + 1}" for k in range(n_res)]
    labels = ["GC"] + names
    if params.category_weights:
        w = np.array([params.category_weights.get(c, 0.0) for c in labels], float)
        if w.sum() <= 0:
            raise BadParams("category weights must put positive mass on some category")
        w = w / w.sum()
    else:
        w = np.full(len(labels), 1.0 / len(labels))

    n = draw(params.individuals)
    people = [f"i{k + 1}" for k in range(n)]
    individuals = []
    for i in people:
        cat = labels[int(rng.choice(len(labels), p=w))]
        declared = cat != "GC" and rng.random() >= params.hide_probability
        individuals.append(Individual(i, cat, bool(declared)))

    m = draw(params.institutions)
    schools = [f"s{k + 1}" for k in range(m)]
    institutions = []
    for s in schools:
        total = draw(params.total_capacity)
        reserved, left = {}, total
        for r in names:
            q = int(rng.integers(0, min(left, params.reserve_capacity_max) + 1))
            reserved[r] = q
            left -= q
        merit = [people[k] for k in rng.permutation(n)
                 if rng.random() >= params.unacceptable_probability]
        institutions.append(Institution(s, Capacity(total, reserved), tuple(merit)))

    prefs = {}
    for i in people:
        k = int(rng.integers(0, m + 1))
        prefs[i] = tuple(schools[j] for j in rng.permutation(m)[:k])

    cats = [Category("open", "open")] + [Category(r, "reserve") for r in names] + [Category("GC", "general")]
    return validate_instance(MarketInstance(cats, institutions, individuals, prefs))


def corpus_seeds(seed: int, count: int) -> list[int]:
    """Independent per-instance seeds derived from one master seed."""
    return [int(x) for x in np.random.SeedSequence(seed).generate_state(count, np.uint64)]


def generate_corpus(seed: int, count: int, params: GeneratorParams = GeneratorParams()) -> list[MarketInstance]:
    return [generate_instance(s, params) for s in corpus_seeds(seed, count)]


# Corpus-level sweeps over the kernels


@dataclass
class SweepResult:
    check: str
    instances: int = 0
    cases: int = 0
    witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.witnesses


def _institution_args(enc, s):
    return enc.orders[s], enc.eff_cat, enc.caps[s]


def theorem1_instance(instance: MarketInstance) -> tuple[int, list]:
    """Kernel route: every pool of the instance's individuals at every institution."""
    n = len(instance.individuals)
    if n > MAX_POOL:
        raise PoolTooLarge(f"{n} individuals exceed the enumeration limit {MAX_POOL}")
    if not instance.institutions:
        return 0, []
    enc = kernels.encode(instance)
    checked, failures, s, pool = kernels.theorem1_sweep(enc.orders, enc.eff_cat, enc.caps, n)
    witnesses = []
    if failures:
        witnesses.append({"institution": enc.institutions[s],
                          "pool": kernels.ids_of(int(pool), enc.individuals),
                          "failing_pools": int(failures)})
    return int(checked), witnesses


def substitutability_instance(instance: MarketInstance) -> tuple[int, list, list]:
    """Kernel route for both substitutability and size monotonicity."""
    n = len(instance.individuals)
    if n > MAX_UNIVERSE:
        raise UniverseTooLarge(f"{n} individuals exceed {MAX_UNIVERSE}")
    if not instance.institutions:
        return 0, [], []
    enc = kernels.encode(instance)
    subst, mono = [], []
    for s in range(len(enc.institutions)):
        table = kernels.oa_table(*_institution_args(enc, s), n)
        a, i, j = kernels.substitutability_witness(table, n)
        if a >= 0:
            subst.append({"institution": enc.institutions[s], "A": kernels.ids_of(int(a), enc.individuals),
                          "i": enc.individuals[i], "j": enc.individuals[j]})
        a, i = kernels.size_monotonicity_witness(table, n)
        if a >= 0:
            mono.append({"institution": enc.institutions[s], "A": kernels.ids_of(int(a), enc.individuals),
                         "i": enc.individuals[i]})
    return len(enc.institutions) * (1 << n), subst, mono


def rule_table(inst: Institution, universe: Sequence[str], memberships, rule: ChoiceRule) -> np.ndarray:
    """Chosen-set bitmasks of an arbitrary rule, laid out for the kernel checkers."""
    table = np.zeros(1 << len(universe), np.int64)
    for mask in range(1 << len(universe)):
        pool = kernels.ids_of(mask, universe)
        table[mask] = kernels.mask_of(rule(inst, frozenset(pool), memberships).chosen, universe)
    return table


def sweep(instances: Sequence[MarketInstance], check: str, mechanism: str = "da-oa") -> SweepResult:
    """Run one named oracle over a corpus; witnesses carry the instance index."""
    out = SweepResult(check)
    for k, inst in enumerate(instances):
        out.instances += 1
        if check == "theorem1":
            cases, found = theorem1_instance(inst)
        elif check in ("subst", "sizemono"):
            cases, subst, mono = substitutability_instance(inst)
            found = subst if check == "subst" else mono
        elif check == "manip":
            cases = len(inst.individuals)
            w = manipulation_search(inst, mechanism)
            found = [] if w is None else [{
                "individual": w.deviation.individual,
                "reported_preferences": list(w.deviation.preferences),
                "hidden": w.deviation.hidden,
                "truthful": w.truthful, "deviant": w.deviant,
            }]
        elif check == "stability":
            from .da import audit_assignment, run_da_oa
            a, _ = run_da_oa(inst)
            cases = 1
            found = [{"axiom": name, "subjects": list(v.subjects), "detail": v.detail}
                     for name, v in audit_assignment(inst, a).items() if v is not None]
        else:
            raise BadParams(f"unknown check {check!r}")
        out.cases += cases
        out.witnesses.extend(dict(w, instance=k) for w in found)
    return out
