import itertools

import pytest
from hypothesis import given, settings, strategies as st

from reserve_match.choice import (
    ChoiceResult,
    NotInPool,
    Unacceptable,
    UnknownCategory,
    audit_choice,
    check_over_and_above_principle,
    check_quota_filling,
    check_within_category_fairness,
    derive_category_merit,
    over_and_above_choose,
    rank_in_set,
)
from reserve_match.oracle import GeneratorParams, check_size_monotonicity, check_substitutability, generate_instance

from conftest import market


def one(members, total, reserved, merit):
    inst = market(members, {"s": (total, reserved, merit)})
    return inst.institutions[0], inst.memberships()


EX1 = dict(members={"i": "SC", "j": "SC"}, total=2, reserved={"SC": 1}, merit=["i", "j"])
EX2 = dict(members={"i": "SC", "j": "GC"}, total=2, reserved={"SC": 1}, merit=["i", "j"])
EX3 = dict(members={"i": "GC", "j": "SC", "k": "SC"}, total=2, reserved={"SC": 1}, merit=["i", "j", "k"])


class TestCategoryMerit:
    def test_filters_members_in_merit_order(self):
        s, m = one({"i": "SC", "j": "GC", "k": "SC"}, 3, {"SC": 1}, ["i", "j", "k"])
        assert derive_category_merit(s, m, "SC").ranked == ("i", "k")

    def test_no_members(self):
        inst = market({"i": "ST", "j": "ST"}, {"s": (2, {"SC": 1}, ["i", "j"])}, reserves=("SC", "ST"))
        assert derive_category_merit(inst.institutions[0], inst.memberships(), "SC").ranked == ()

    def test_unacceptable_member_excluded(self):
        s, m = one({"i": "SC", "j": "SC"}, 2, {"SC": 1}, ["j"])
        assert derive_category_merit(s, m, "SC").ranked == ("j",)

    def test_unknown_category(self):
        s, m = one({"i": "SC"}, 1, {}, ["i"])
        with pytest.raises(UnknownCategory):
            derive_category_merit(s, m, "XX")


class TestRank:
    def test_pair(self):
        s, _ = one({"i": "GC", "j": "GC"}, 1, {}, ["i", "j"])
        assert rank_in_set(s, {"i", "j"}, "i") == 1
        assert rank_in_set(s, {"i", "j"}, "j") == 2

    def test_singleton(self):
        s, _ = one({"i": "GC"}, 1, {}, ["i"])
        assert rank_in_set(s, {"i"}, "i") == 1

    def test_matches_brute_count(self):
        s, _ = one({"i": "GC", "j": "GC", "k": "GC"}, 1, {}, ["i", "j", "k"])
        pool = {"i", "j", "k"}
        above_k = [x for x in pool if s.merit.index(x) < s.merit.index("k")]
        assert rank_in_set(s, pool, "k") == len(above_k) + 1 == 3

    def test_errors(self):
        s, _ = one({"i": "GC", "j": "GC"}, 1, {}, ["i"])
        with pytest.raises(NotInPool):
            rank_in_set(s, {"i"}, "j")
        with pytest.raises(Unacceptable):
            rank_in_set(s, {"i", "j"}, "j")


class TestOverAndAbove:
    def test_example1(self):
        s, m = one(**EX1)
        r = over_and_above_choose(s, {"i", "j"}, m)
        assert r.open == {"i"} and r.of("SC") == {"j"} and not r.rejected

    def test_example2(self):
        s, m = one(**EX2)
        r = over_and_above_choose(s, {"i", "j"}, m)
        assert r.open == {"i"} and r.of("SC") == set() and r.rejected == {"j"}

    def test_general_top_then_reserve(self):
        s, m = one(**EX3)
        r = over_and_above_choose(s, {"i", "j", "k"}, m)
        assert r.open == {"i"} and r.of("SC") == {"j"} and r.rejected == {"k"}

    def test_empty_pool(self):
        s, m = one(**EX1)
        r = over_and_above_choose(s, set(), m)
        assert r.chosen == set() and r.rejected == set()

    def test_unacceptable_applicant_takes_no_seat(self):
        s, m = one({"i": "SC", "j": "SC"}, 2, {"SC": 1}, ["j"])
        r = over_and_above_choose(s, {"i", "j"}, m)
        assert r.open == {"j"} and r.rejected == {"i"}

    def test_fewer_applicants_than_open_seats(self):
        s, m = one({"i": "SC", "j": "GC"}, 4, {"SC": 1}, ["j", "i"])
        r = over_and_above_choose(s, {"i", "j"}, m)
        assert r.open == {"i", "j"} and r.of("SC") == set()


class TestPredicates:
    def test_principle_examples(self):
        s, m = one(**EX1)
        assert check_over_and_above_principle(s, {"i", "j"}, over_and_above_choose(s, {"i", "j"}, m)) is None
        swapped = ChoiceResult({"j"}, {"SC": {"i"}})
        v = check_over_and_above_principle(s, {"i", "j"}, swapped)
        assert v is not None and v.subjects == ("i",)

    def test_principle_vacuous_without_open_seats(self):
        s, m = one({"i": "SC", "j": "SC"}, 1, {"SC": 1}, ["i", "j"])
        for result in (ChoiceResult(), ChoiceResult((), {"SC": {"j"}}), ChoiceResult((), {"SC": {"i"}})):
            assert check_over_and_above_principle(s, {"i", "j"}, result) is None

    def test_fairness_examples(self):
        s, m = one(**EX1)
        assert check_within_category_fairness(s, {"i", "j"}, ChoiceResult({"i"}, {"SC": {"j"}}), m) is None
        v = check_within_category_fairness(s, {"i", "j"}, ChoiceResult({"j"}, {}, {"i"}), m)
        assert v.subjects == ("i", "j")
        assert check_within_category_fairness(s, {"i", "j"}, ChoiceResult((), {}, {"i", "j"}), m) is None

    def test_quota_examples(self):
        s, m = one(**EX3)
        pool = {"i", "j", "k"}
        assert check_quota_filling(s, pool, over_and_above_choose(s, pool, m), m) is None
        s2, m2 = one(**EX2)
        broken = ChoiceResult({"j"}, {"SC": set()}, {"i"})
        v = check_quota_filling(s2, {"i", "j"}, broken, m2)
        assert v is not None and v.subjects == ("SC", "i")
        assert check_quota_filling(s2, {"i", "j"}, ChoiceResult({"i"}, {}, {"j"}), m2) is None


small = GeneratorParams(individuals=(0, 6), institutions=(1, 2), reserve_categories=(0, 3))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), data=st.data())
def test_over_and_above_choice_invariants(seed, data):
    inst = generate_instance(seed, small)
    members = inst.memberships()
    people = list(inst.individual_ids())
    pool = frozenset(data.draw(st.sets(st.sampled_from(people))) if people else set())
    for s in inst.institutions:
        r = over_and_above_choose(s, pool, members)
        assert not any(audit_choice(s, pool, r, members).values())
        assert len(r.open) <= s.capacity.open
        groups = [r.open] + list(r.reserved.values())
        for a, b in itertools.combinations(groups, 2):
            assert not a & b
        assert r.chosen | r.rejected == pool and not r.chosen & r.rejected
        for c, chosen in r.reserved.items():
            assert len(chosen) <= s.capacity.of(c)
            assert all(s.prefers(i, j) for i in r.open for j in chosen)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_substitutable_and_size_monotone(seed):
    inst = generate_instance(seed, small)
    for s in inst.institutions:
        assert check_substitutability(s, inst.individual_ids(), inst.memberships()) is None
        assert check_size_monotonicity(s, inst.individual_ids(), inst.memberships()) is None
