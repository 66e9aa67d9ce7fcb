"""Compare the numba kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--count N] [--seed S] [--repeat R]

The fallback is timed in a child process started with RESERVE_MATCH_NO_JIT=1,
because a ``py_func`` still calls jitted helpers. The first jitted call
(compilation or cache load) is reported separately.
"""
import argparse
import json
import logging
import os
import subprocess
import sys
import time

import numpy as np

from reserve_match import _accel, kernels
from reserve_match.oracle import GeneratorParams, generate_corpus, preference_reports

log = logging.getLogger("bench")


def theorem1_args(corpus):
    out = []
    for inst in corpus:
        if inst.institutions:
            enc = kernels.encode(inst)
            out.append((enc.orders, enc.eff_cat, enc.caps, len(enc.individuals)))
    return out


def manip_args(corpus):
    out = []
    for inst in corpus:
        if not (inst.institutions and inst.individuals):
            continue
        enc = kernels.encode(inst)
        reports = preference_reports(list(range(len(enc.institutions))))
        dev_prefs = np.full((len(reports), enc.prefs.shape[1]), -1, np.int64)
        dev_len = np.array([len(r) for r in reports], np.int64)
        for d, rep in enumerate(reports):
            dev_prefs[d, : len(rep)] = rep
        out.append((kernels.MECH_DA_OA, enc.orders, enc.eff_cat, enc.true_cat, enc.caps,
                    enc.prefs, enc.pref_len, dev_prefs, dev_len))
    return out


def timed(fn, batches, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in batches:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def measure(count, seed, repeat) -> dict:
    corpus = generate_corpus(seed, count, GeneratorParams())
    cases = {
        "theorem1_sweep": (kernels.theorem1_sweep, theorem1_args(corpus)),
        "manipulation_sweep": (kernels.manipulation_sweep, manip_args(corpus)),
    }
    out = {}
    for name, (kernel, batches) in cases.items():
        t0 = time.perf_counter()
        kernel(*batches[0])
        first = time.perf_counter() - t0
        out[name] = {"first_call": first, "best": timed(kernel, batches, repeat)}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.child:
        print(json.dumps(measure(args.count, args.seed, args.repeat)))
        return
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    if not _accel.HAS_NUMBA:
        log.warning("numba is not active in this process; both columns will be interpreted")
    fast = measure(args.count, args.seed, args.repeat)
    env = dict(os.environ, RESERVE_MATCH_NO_JIT="1")
    child = subprocess.run(
        [sys.executable, __file__, "--child", "--count", str(args.count), "--seed", str(args.seed),
         "--repeat", "1"],
        env=env, capture_output=True, text=True, check=True,
    )
    slow = json.loads(child.stdout)
    log.info("%d instances, seed %d", args.count, args.seed)
    log.info("%-20s %10s %10s %10s %8s", "kernel", "1st call", "jit", "python", "speedup")
    for name in fast:
        f, p = fast[name]["best"], slow[name]["best"]
        log.info("%-20s %9.2fs %9.3fs %9.3fs %7.1fx", name, fast[name]["first_call"], f, p, p / f)


if __name__ == "__main__":
    main()
