"""Quick built-in consistency checks runnable without the test suite."""
from __future__ import annotations

import itertools
import random

import numpy as np

from .bdd import BDD
from .bench import gen_counter, gen_nim, gen_random, nim_first_mover_wins
from .composer import MODES, HybridComposer
from .explicit import accepts, minimize
from .ltlf import evaluate_batch, parse, propositions
from .symbolic import decode
from .synthesis import extract_strategy, is_realizable, simulate

_FORMULAS = [
    "F a", "G a", "a U b", "X a", "F a & F b & G (a -> X b)", "G (a -> F b)",
    "!(a U b) | X X c", "(a U b) & (b U c)", "G F a", "F G !a",
]


def check_conversion(max_len: int) -> bool:
    for text in _FORMULAS:
        f = parse(text)
        support = sorted(propositions(f))
        for mode in MODES:
            d = minimize(decode(HybridComposer(mode=mode).compose(f)))
            for n in range(1, max_len + 1):
                words = np.array(list(itertools.product(range(1 << len(support)), repeat=n)),
                                 dtype=np.int64)
                expect = evaluate_batch(words, f, support)
                for w, e in zip(words, expect):
                    letters = [{p for j, p in enumerate(support) if a >> j & 1} for a in w]
                    if accepts(d, letters) != bool(e):
                        return False
    return True


def check_bdd(samples: int) -> bool:
    rng = random.Random(0)
    for _ in range(samples):
        m = BDD()
        vs = [m.var(m.declare(f"x{i}")) for i in range(4)]
        table = [rng.random() < 0.5 for _ in range(16)]
        f = m.disjoin(m.cube({i: bool(k >> i & 1) for i in range(4)})
                      for k in range(16) if table[k])
        if any(m.evaluate(f, {i: bool(k >> i & 1) for i in range(4)}) != table[k]
               for k in range(16)):
            return False
        m.reorder()
        if any(m.evaluate(f, {i: bool(k >> i & 1) for i in range(4)}) != table[k]
               for k in range(16)):
            return False
    return True


def check_nim() -> bool:
    for p, q in itertools.product((1, 2), repeat=2):
        inst = gen_nim(p, q)
        r = is_realizable(inst.formula, inst.partition)
        if r.realizable == nim_first_mover_wins([q] * p):
            return False
    return True


def check_counter_strategy() -> bool:
    inst = gen_counter(2)
    r = is_realizable(inst.formula, inst.partition)
    sim = simulate(extract_strategy(r.game, r, inst.partition), [set()] * 4)
    return r.realizable and sim.accepted


def check_random(count: int) -> bool:
    for seed in range(count):
        inst = gen_random(3, 2, seed)
        verdicts = {is_realizable(inst.formula, inst.partition, mode=m).realizable for m in MODES}
        if len(verdicts) != 1:
            return False
    return True


def run_selftest(quick: bool = False) -> bool:
    checks = [
        ("conversion agrees with trace semantics", lambda: check_conversion(3 if quick else 5)),
        ("bdd truth tables and sifting", lambda: check_bdd(20 if quick else 200)),
        ("nim verdicts follow Bouton", check_nim),
        ("counter strategy reaches the goal", check_counter_strategy),
        ("modes agree on random instances", lambda: check_random(10 if quick else 50)),
    ]
    ok = True
    for name, fn in checks:
        passed = fn()
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name}")
    return ok
