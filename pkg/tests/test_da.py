import pytest
from hypothesis import given, settings, strategies as st

from reserve_match.choice import over_and_above_choose
from reserve_match.da import (
    audit_assignment,
    is_individually_rational,
    is_non_wasteful,
    is_stable,
    is_within_category_fair,
    run_da_oa,
    satisfies_over_and_above_assignment,
)
from reserve_match.model import Assignment, Seat
from reserve_match.oracle import GeneratorParams, generate_instance

from conftest import market


def test_three_individuals(three_ind):
    a, logs = run_da_oa(three_ind)
    assert a.of("i1") == Seat("s1", "open")
    assert a.of("i2") == Seat("s1", "SC")
    assert a.of("i3") == Seat("s2", "open")
    assert len(logs) == 2
    assert logs[0].proposals == (("i1", "s1"), ("i2", "s1"), ("i3", "s1"))
    assert logs[1].proposals == (("i3", "s2"),)
    first = logs[0].institutions[0]
    assert first.rejected == {"i3"} and first.pool == {"i1", "i2", "i3"}
    assert not any(audit_assignment(three_ind, a).values())


def test_single_institution_reduces_to_choice():
    inst = market({"a": "SC", "b": "GC", "c": "SC", "d": "GC"}, {"s": (3, {"SC": 1}, ["b", "a", "d", "c"])})
    a, _ = run_da_oa(inst)
    ref = over_and_above_choose(inst.institutions[0], set("abcd"), inst.memberships())
    assert {i for i, c in a.holders("s") if c == "open"} == ref.open
    assert {i for i, c in a.holders("s") if c == "SC"} == ref.of("SC")


def test_nobody_applies():
    inst = market({"a": "GC"}, {"s": (1, {}, ["a"])}, prefs={"a": ()})
    a, logs = run_da_oa(inst)
    assert logs == [] and a.of("a") is None


def test_seat_category_can_change_between_rounds():
    inst = market(
        {"g": "GC", "h": "GC", "x": "SC", "y": "SC"},
        {"s": (2, {"SC": 1}, ["g", "x", "y"]), "t": (1, {}, ["h", "g"])},
        prefs={"g": ("t", "s"), "h": ("t",), "x": ("s",), "y": ("s",)},
    )
    a, logs = run_da_oa(inst)
    assert logs[0].institutions[0].held.open == {"x"}
    assert a.of("x") == Seat("s", "SC")
    assert a.of("g") == Seat("s", "open")
    assert a.of("y") is None


class TestPredicateWitnesses:
    def test_swapped_holders_are_unfair(self, three_ind):
        a = Assignment({"i1": Seat("s1", "open"), "i3": Seat("s1", "SC"), "i2": Seat("s2", "open")})
        v = is_within_category_fair(three_ind, a)
        assert v.subjects == ("i2", "s1", "i3")
        assert is_stable(three_ind, a).subjects[0] == "blocking-pair"

    def test_empty_open_seat_is_waste(self, three_ind):
        a = Assignment({"i2": Seat("s1", "SC"), "i3": Seat("s2", "open")})
        v = is_non_wasteful(three_ind, a)
        assert v.subjects == ("i1", "s1")

    def test_unacceptable_envy_is_not_waste(self):
        inst = market({"a": "GC", "b": "GC"}, {"s": (2, {}, ["a"])})
        a = Assignment({"a": Seat("s", "open")})
        assert is_non_wasteful(inst, a) is None
        assert is_stable(inst, a) is None

    def test_reserve_holder_above_open_holder(self):
        inst = market({"i": "SC", "j": "GC"}, {"s": (2, {"SC": 1}, ["i", "j"])})
        a = Assignment({"j": Seat("s", "open"), "i": Seat("s", "SC")})
        assert satisfies_over_and_above_assignment(inst, a).subjects == ("s", "i", "j")

    def test_over_filled_open_is_not_a_fixed_point(self):
        inst = market({"i": "GC", "j": "GC"}, {"s": (2, {"SC": 1}, ["i", "j"])})
        a = Assignment({"i": Seat("s", "open"), "j": Seat("s", "open")})
        assert is_stable(inst, a).subjects == ("fixed-point", "s")

    def test_unlisted_placement(self):
        inst = market({"i": "GC"}, {"s": (1, {}, ["i"]), "t": (1, {}, ["i"])}, prefs={"i": ("t",)})
        a = Assignment({"i": Seat("s", "open")})
        assert is_individually_rational(inst, a).subjects == ("i", "s")
        assert is_stable(inst, a).subjects[0] == "individual-rationality"

    def test_perturbed_output_has_blocking_pair(self, three_ind):
        a, _ = run_da_oa(three_ind)
        seats = dict(a.seats)
        seats["i2"] = Seat("s2", "open")
        seats["i3"] = None
        v = is_stable(three_ind, Assignment(seats))
        assert v.subjects == ("blocking-pair", "i2", "s1")


small = GeneratorParams(individuals=(0, 5), institutions=(1, 3))


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_da_oa_properties(seed):
    inst = generate_instance(seed, small)
    a, logs = run_da_oa(inst)
    report = audit_assignment(inst, a)
    assert not any(report.values()), report
    proposals = sum(len(log.proposals) for log in logs)
    assert proposals <= len(inst.individuals) * len(inst.institutions)
    again, logs2 = run_da_oa(inst)
    assert again.seats == a.seats and logs2 == logs
