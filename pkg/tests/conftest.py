import pytest

from reserve_match.model import Capacity, Category, Individual, Institution, MarketInstance, validate_instance


def market(members, institutions, prefs=None, reserves=("SC",)):
    """Build a validated instance.

    ``members``: {id: category} where "GC" means general and anything else is
    a declared reserve membership; prefix with "~" to mark it hidden.
    ``institutions``: {sid: (total, {reserve: q}, merit_list)}.
    """
    people = []
    for i, c in members.items():
        hidden = c.startswith("~")
        c = c.lstrip("~")
        people.append(Individual(i, c, declared=(c != "GC" and not hidden)))
    schools = [Institution(s, Capacity(t, dict(r)), tuple(m)) for s, (t, r, m) in institutions.items()]
    cats = [Category("open", "open")] + [Category(r, "reserve") for r in reserves] + [Category("GC", "general")]
    if prefs is None:
        prefs = {i: tuple(institutions) for i in members}
    return validate_instance(MarketInstance(cats, schools, people, prefs))


@pytest.fixture
def three_ind():
    """Two institutions, i1 general and i2, i3 SC; everyone ranks s1 over s2."""
    return market(
        {"i1": "GC", "i2": "SC", "i3": "SC"},
        {"s1": (2, {"SC": 1}, ["i1", "i2", "i3"]), "s2": (1, {}, ["i1", "i2", "i3"])},
    )


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
