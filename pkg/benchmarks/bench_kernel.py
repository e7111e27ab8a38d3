#!/usr/bin/env python3
"""Benchmark the compiled term-merge kernel against the pure-Python twin.

Micro-benchmarks call both kernel modules directly on identical inputs;
the end-to-end rows rerun a verification suite in a subprocess with
``SUPERINT_PURE=1`` so the import-time selection picks the fallback.
"""

import os
import random
import subprocess
import sys
import time
from fractions import Fraction

from superint import _kernel_py

try:
    from superint import _kernel as _kernel_c
except ImportError:
    _kernel_c = None


def rand_masked(rng, level, terms):
    out = {}
    while len(out) < terms:
        mask = rng.getrandbits(level)
        out[mask] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
    return out


def rand_keyed(rng, m, level, terms):
    out = {}
    while len(out) < terms:
        exp = tuple(rng.randint(0, 3) for _ in range(m))
        mask = rng.getrandbits(level)
        out[(exp, mask)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
    return out


def time_fn(fn, a, b, repeat):
    best = None
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(a, b)
        dt = (time.perf_counter() - t0) / repeat
        best = dt if best is None else min(best, dt)
    return best


def micro():
    rng = random.Random(0)
    rows = []
    for label, terms, repeat in [("small (8 terms)", 8, 400),
                                 ("medium (32 terms)", 32, 60),
                                 ("large (96 terms)", 96, 8)]:
        a = rand_masked(rng, 12, terms)
        b = rand_masked(rng, 12, terms)
        t_py = time_fn(_kernel_py.mul_masked, a, b, repeat)
        row = [f"mul_masked {label}", t_py * 1e6]
        if _kernel_c is not None:
            t_c = time_fn(_kernel_c.mul_masked, a, b, repeat)
            row += [t_c * 1e6, t_py / t_c]
        rows.append(row)
    for label, terms, repeat in [("small (8 terms)", 8, 300),
                                 ("medium (32 terms)", 32, 40),
                                 ("large (96 terms)", 96, 6)]:
        a = rand_keyed(rng, 2, 10, terms)
        b = rand_keyed(rng, 2, 10, terms)
        t_py = time_fn(_kernel_py.mul_keyed, a, b, repeat)
        row = [f"mul_keyed  {label}", t_py * 1e6]
        if _kernel_c is not None:
            t_c = time_fn(_kernel_c.mul_keyed, a, b, repeat)
            row += [t_c * 1e6, t_py / t_c]
        rows.append(row)
    return rows


DENSE_WORKLOAD = r"""
import random, time
from fractions import Fraction
from superint.algebra import GrassmannElement

rng = random.Random(0)
level = 16
elems = []
for _ in range(40):
    terms = {}
    while len(terms) < 60:
        terms[rng.getrandbits(level)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
    elems.append(GrassmannElement(level, terms))
t0 = time.perf_counter()
acc = GrassmannElement.scalar(0, level)
for i in range(len(elems)):
    for j in range(i + 1, len(elems)):
        acc = acc + elems[i] * elems[j]
print(time.perf_counter() - t0)
"""


def end_to_end():
    rows = []
    for label, env_extra in [("compiled", {}), ("pure python", {"SUPERINT_PURE": "1"})]:
        env = dict(os.environ, **env_extra)
        result = subprocess.run([sys.executable, "-c", DENSE_WORKLOAD], env=env,
                                check=True, capture_output=True, text=True)
        rows.append((label, float(result.stdout.strip())))
    return rows


def consistency_check():
    rng = random.Random(1)
    for _ in range(200):
        a = rand_masked(rng, 14, rng.randint(1, 20))
        b = rand_masked(rng, 14, rng.randint(1, 20))
        if _kernel_c is not None:
            assert _kernel_c.mul_masked(a, b) == _kernel_py.mul_masked(a, b)
    for _ in range(100):
        a = rand_keyed(rng, 3, 10, rng.randint(1, 12))
        b = rand_keyed(rng, 3, 10, rng.randint(1, 12))
        if _kernel_c is not None:
            assert _kernel_c.mul_keyed(a, b) == _kernel_py.mul_keyed(a, b)


def main():
    if _kernel_c is None:
        print("compiled kernel not built; showing pure-Python timings only\n")
    else:
        consistency_check()
        print("kernel outputs agree on 300 random inputs\n")

    header = f"{'operation':34s} {'python us':>10s}"
    if _kernel_c is not None:
        header += f" {'cython us':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for row in micro():
        line = f"{row[0]:34s} {row[1]:10.1f}"
        if len(row) > 2:
            line += f" {row[2]:10.1f} {row[3]:7.1f}x"
        print(line)

    print("\ndense-element workload: 780 pairwise products, level 16, 60 terms each")
    for label, dt in end_to_end():
        print(f"  {label:12s} {dt:6.2f} s")


if __name__ == "__main__":
    main()
