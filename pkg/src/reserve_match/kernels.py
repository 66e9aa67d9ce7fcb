"""Integer-array kernels for the brute-force oracles.

Individuals are indices ``0..n-1`` and applicant pools are int64 bitmasks,
so every kernel is limited to ``n <= MAX_BITS``. Category codes: ``0`` is the
open category (in selections) or the general label (in memberships);
reserve ``r`` is ``1..R`` in alphabetical order of reserve names. In a
selection array ``-1`` means not chosen.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import njit
from .model import MarketInstance

MAX_BITS = 62

MECH_DA_OA = 0
MECH_IMMEDIATE = 1


@dataclass(frozen=True)
class Encoded:
    individuals: tuple[str, ...]
    institutions: tuple[str, ...]
    reserves: tuple[str, ...]
    eff_cat: np.ndarray   # (n,) effective category code
    true_cat: np.ndarray  # (n,) true category code
    orders: np.ndarray    # (m, n) merit lists as indices, padded with -1
    caps: np.ndarray      # (m, R+1) open capacity then each reserve
    prefs: np.ndarray     # (n, m) preference lists as indices, padded with -1
    pref_len: np.ndarray  # (n,)


def encode(instance: MarketInstance) -> Encoded:
    people = instance.individual_ids()
    schools = tuple(s.id for s in instance.institutions)
    reserves = tuple(sorted(instance.reserves))
    pidx = {i: k for k, i in enumerate(people)}
    sidx = {s: k for k, s in enumerate(schools)}
    code = {r: k + 1 for k, r in enumerate(reserves)}
    n, m = len(people), len(schools)

    eff = np.zeros(n, np.int64)
    true = np.zeros(n, np.int64)
    for k, ind in enumerate(instance.individuals):
        true[k] = code.get(ind.category, 0)
        eff[k] = true[k] if ind.declared else 0

    orders = np.full((m, max(n, 1)), -1, np.int64)
    caps = np.zeros((m, len(reserves) + 1), np.int64)
    for k, s in enumerate(instance.institutions):
        for pos, i in enumerate(s.merit):
            orders[k, pos] = pidx[i]
        caps[k, 0] = s.capacity.open
        for r in reserves:
            caps[k, code[r]] = s.capacity.of(r)

    prefs = np.full((max(n, 1), max(m, 1)), -1, np.int64)
    pref_len = np.zeros(max(n, 1), np.int64)
    for k, i in enumerate(people):
        plist = instance.preference(i)
        pref_len[k] = len(plist)
        for pos, s in enumerate(plist):
            prefs[k, pos] = sidx[s]
    return Encoded(people, schools, reserves, eff, true, orders, caps, prefs[:n], pref_len[:n])


def mask_of(ids, individuals) -> int:
    idx = {i: k for k, i in enumerate(individuals)}
    out = 0
    for i in ids:
        out |= 1 << idx[i]
    return out


def ids_of(mask: int, individuals) -> list[str]:
    return [i for k, i in enumerate(individuals) if (mask >> k) & 1]


@njit
def oa_select(order, eff_cat, caps, pool, out):
    """Over-and-above choice from bitmask ``pool`` written into ``out``.

    One pass down the merit order is enough: once the open seats are gone,
    each later applicant can only take a seat of their own category.
    """
    out[:] = -1
    used = np.zeros(caps.shape[0], np.int64)
    for k in range(order.shape[0]):
        i = order[k]
        if i < 0:
            break
        if (pool >> i) & 1 == 0:
            continue
        if used[0] < caps[0]:
            out[i] = 0
            used[0] += 1
        else:
            r = eff_cat[i]
            if r > 0 and used[r] < caps[r]:
                out[i] = r
                used[r] += 1


@njit
def selection_mask(sel):
    m = 0
    for i in range(sel.shape[0]):
        if sel[i] >= 0:
            m |= 1 << i
    return m


@njit
def formal_axioms_hold(order, eff_cat, caps, pool, sel):
    """Over-and-above principle, within-category fairness and quota filling,
    evaluated on a selection whose non-members are all ``-1``."""
    n_cat = caps.shape[0]
    seen_out = np.zeros(n_cat, np.bool_)
    filled = np.zeros(n_cat, np.int64)
    waiting = np.zeros(n_cat, np.bool_)
    ranked = 0
    for k in range(order.shape[0]):
        i = order[k]
        if i < 0:
            break
        if (pool >> i) & 1 == 0:
            continue
        if ranked < caps[0] and sel[i] != 0:
            return False
        ranked += 1
        c = eff_cat[i]
        if sel[i] < 0:
            seen_out[c] = True
            waiting[c] = True
        else:
            if seen_out[c]:
                return False
            filled[sel[i]] += 1
    for r in range(1, n_cat):
        if waiting[r] and filled[r] != caps[r]:
            return False
    return True


@njit
def count_formal_selections(order, eff_cat, caps, pool, expected):
    """Enumerate every feasible selection from ``pool``; return how many
    satisfy all three axioms and whether ``expected`` is one of them."""
    n = eff_cat.shape[0]
    members = np.empty(n, np.int64)
    radix = np.empty(n, np.int64)
    k = 0
    for p in range(order.shape[0]):
        i = order[p]
        if i < 0:
            break
        if (pool >> i) & 1:
            members[k] = i
            radix[k] = 3 if eff_cat[i] > 0 else 2
            k += 1
    total = 1
    for t in range(k):
        total *= radix[t]

    sel = np.full(n, -1, np.int64)
    used = np.zeros(caps.shape[0], np.int64)
    passing = 0
    found = False
    for code in range(total):
        rest = code
        used[:] = 0
        ok = True
        for t in range(k):
            digit = rest % radix[t]
            rest //= radix[t]
            i = members[t]
            if digit == 0:
                sel[i] = -1
            else:
                c = 0 if digit == 1 else eff_cat[i]
                sel[i] = c
                used[c] += 1
                if used[c] > caps[c]:
                    ok = False
        if not ok:
            continue
        if formal_axioms_hold(order, eff_cat, caps, pool, sel):
            passing += 1
            same = True
            for t in range(k):
                if sel[members[t]] != expected[members[t]]:
                    same = False
            if same:
                found = True
    return passing, found


@njit
def theorem1_sweep(orders, eff_cat, caps, n):
    """Check every pool of the ``n``-individual universe at every institution.

    Returns ``(pools_checked, failures, first_institution, first_pool)``.
    """
    expected = np.full(n, -1, np.int64)
    checked = 0
    failures = 0
    first_s = -1
    first_pool = -1
    for s in range(orders.shape[0]):
        for pool in range(1 << n):
            oa_select(orders[s], eff_cat, caps[s], pool, expected)
            passing, found = count_formal_selections(orders[s], eff_cat, caps[s], pool, expected)
            checked += 1
            if passing != 1 or not found:
                if failures == 0:
                    first_s = s
                    first_pool = pool
                failures += 1
    return checked, failures, first_s, first_pool


@njit
def oa_table(order, eff_cat, caps, n):
    """Chosen-set bitmask of the over-and-above rule for all ``2**n`` pools."""
    table = np.zeros(1 << n, np.int64)
    sel = np.full(n, -1, np.int64)
    for pool in range(1 << n):
        oa_select(order, eff_cat, caps, pool, sel)
        table[pool] = selection_mask(sel)
    return table


@njit
def substitutability_witness(table, n):
    """First ``(A, i, j)`` with i rejected from A+i but chosen from A+i+j."""
    for a in range(1 << n):
        for i in range(n):
            if (a >> i) & 1:
                continue
            ai = a | (1 << i)
            if (table[ai] >> i) & 1:
                continue
            for j in range(n):
                if j == i or (a >> j) & 1:
                    continue
                if (table[ai | (1 << j)] >> i) & 1:
                    return a, i, j
    return -1, -1, -1


@njit
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit
def size_monotonicity_witness(table, n):
    """First ``(A, i)`` where adding ``i`` shrinks the chosen set."""
    for a in range(1 << n):
        base = popcount(table[a])
        for i in range(n):
            if (a >> i) & 1:
                continue
            if popcount(table[a | (1 << i)]) < base:
                return a, i
    return -1, -1


@njit
def da_oa(orders, eff_cat, caps, prefs, pref_len, inst_of, cat_of):
    """Applicant-proposing deferred acceptance with over-and-above choice.
    Fills ``inst_of``/``cat_of`` (``-1`` = unassigned); returns the round count."""
    n = eff_cat.shape[0]
    m = orders.shape[0]
    nxt = np.zeros(n, np.int64)
    held = np.zeros(m, np.int64)
    sel = np.full(n, -1, np.int64)
    inst_of[:] = -1
    cat_of[:] = -1
    rounds = 0
    while True:
        new = np.zeros(m, np.int64)
        any_new = False
        for i in range(n):
            if inst_of[i] < 0 and nxt[i] < pref_len[i]:
                s = prefs[i, nxt[i]]
                nxt[i] += 1
                new[s] |= 1 << i
                any_new = True
        if not any_new:
            break
        rounds += 1
        for s in range(m):
            if new[s] == 0:
                continue
            pool = held[s] | new[s]
            oa_select(orders[s], eff_cat, caps[s], pool, sel)
            kept = selection_mask(sel) & pool
            for i in range(n):
                if (pool >> i) & 1:
                    inst_of[i] = s if (kept >> i) & 1 else -1
            held[s] = kept
    for s in range(m):
        if held[s]:
            oa_select(orders[s], eff_cat, caps[s], held[s], sel)
            for i in range(n):
                if (held[s] >> i) & 1:
                    cat_of[i] = sel[i]
    return rounds


@njit
def immediate_acceptance(orders, eff_cat, caps, prefs, pref_len, inst_of, cat_of):
    """Boston-style mechanism: acceptances in each round are final and later
    rounds choose over-and-above from the seats left over."""
    n = eff_cat.shape[0]
    m = orders.shape[0]
    left = caps.copy()
    sel = np.full(n, -1, np.int64)
    inst_of[:] = -1
    cat_of[:] = -1
    for k in range(m):
        apps = np.zeros(m, np.int64)
        for i in range(n):
            if inst_of[i] < 0 and k < pref_len[i]:
                apps[prefs[i, k]] |= 1 << i
        for s in range(m):
            if apps[s] == 0:
                continue
            oa_select(orders[s], eff_cat, left[s], apps[s], sel)
            for i in range(n):
                if (apps[s] >> i) & 1 and sel[i] >= 0:
                    inst_of[i] = s
                    cat_of[i] = sel[i]
                    left[s, sel[i]] -= 1
    return m


@njit
def run_mechanism(mech, orders, eff_cat, caps, prefs, pref_len, inst_of, cat_of):
    if mech == MECH_IMMEDIATE:
        return immediate_acceptance(orders, eff_cat, caps, prefs, pref_len, inst_of, cat_of)
    return da_oa(orders, eff_cat, caps, prefs, pref_len, inst_of, cat_of)


@njit
def _pref_position(prefs_row, length, s):
    """Position of ``s`` in a true preference list; ``length`` for unassigned,
    ``length + 1`` for an institution the individual finds unacceptable."""
    if s < 0:
        return length
    for k in range(length):
        if prefs_row[k] == s:
            return k
    return length + 1


@njit
def manipulation_sweep(mech, orders, eff_cat, true_cat, caps, prefs, pref_len, dev_prefs, dev_len):
    """Try every (preference list, declare/hide) report for every individual.

    Each individual's benchmark is truthful preferences plus declared true
    membership; everyone else reports as given. Returns the first witness
    ``(i, deviation_index, hidden, truthful_inst, deviant_inst)`` in canonical
    order, or all ``-1``.
    """
    n = eff_cat.shape[0]
    inst_of = np.full(n, -1, np.int64)
    cat_of = np.full(n, -1, np.int64)
    work_prefs = prefs.copy()
    work_len = pref_len.copy()
    work_cat = eff_cat.copy()
    for i in range(n):
        work_cat[i] = true_cat[i]
        run_mechanism(mech, orders, work_cat, caps, work_prefs, work_len, inst_of, cat_of)
        truthful = inst_of[i]
        base = _pref_position(prefs[i], pref_len[i], truthful)
        n_hide = 2 if true_cat[i] > 0 else 1
        for d in range(dev_prefs.shape[0]):
            work_prefs[i, :] = dev_prefs[d]
            work_len[i] = dev_len[d]
            for h in range(n_hide):
                work_cat[i] = 0 if h == 1 else true_cat[i]
                run_mechanism(mech, orders, work_cat, caps, work_prefs, work_len, inst_of, cat_of)
                got = _pref_position(prefs[i], pref_len[i], inst_of[i])
                if got < base:
                    return i, d, h, truthful, inst_of[i]
        work_prefs[i, :] = prefs[i]
        work_len[i] = pref_len[i]
        work_cat[i] = eff_cat[i]
    return -1, -1, -1, -1, -1
