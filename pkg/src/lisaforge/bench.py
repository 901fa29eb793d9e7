"""Benchmark families: binary counters, double counters, Nim, random formulas."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .ltlf import (FALSE, TRUE, And, Atom, Finally, Formula, Globally, Implies, Next, Not,
                   Op, Or, Partition, Until, parse, parse_partition, to_text)

FAMILIES = ("counter", "double_counter", "nim", "random")


@dataclass(frozen=True)
class BenchmarkInstance:
    name: str
    formula: Formula
    partition: Partition
    family: str
    params: dict = field(default_factory=dict, compare=False)

    def write(self, directory) -> tuple[Path, Path]:
        """Write ``<name>.ltlf`` and ``<name>.part`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        ltlf = directory / f"{self.name}.ltlf"
        part = directory / f"{self.name}.part"
        ltlf.write_text(to_text(self.formula) + "\n", encoding="utf-8")
        part.write_text(self.partition.to_text(), encoding="utf-8")
        return ltlf, part

    @classmethod
    def read(cls, ltlf, part, family: str = "random") -> "BenchmarkInstance":
        ltlf = Path(ltlf)
        return cls(ltlf.stem, parse(ltlf.read_text(encoding="utf-8")),
                   parse_partition(Path(part).read_text(encoding="utf-8")), family)


# -- small helpers that fold constants so generated formulas stay readable ----

def _flat(op: Op, fs) -> list[Formula]:
    # splice nested nodes of the same kind, as the parser does
    out = []
    for f in fs:
        out.extend(f.children if f.op is op else (f,))
    return out


def _and(*fs: Formula) -> Formula:
    if any(f is FALSE for f in fs):
        return FALSE
    return And(*_flat(Op.AND, [f for f in fs if f is not TRUE]))


def _or(*fs: Formula) -> Formula:
    if any(f is TRUE for f in fs):
        return TRUE
    return Or(*_flat(Op.OR, [f for f in fs if f is not FALSE]))


def _not(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if f.op is Op.NOT:
        return f.children[0]
    return Not(f)


def _xor(a: Formula, b: Formula) -> Formula:
    if b is TRUE:
        return _not(a)
    if b is FALSE:
        return a
    return _or(_and(a, _not(b)), _and(_not(a), b))


def _lit(name: str, value: bool) -> Formula:
    return Atom(name) if value else Not(Atom(name))


def _value(names: list[str], v: int) -> Formula:
    """Bits ``names`` (least significant first) encode ``v``."""
    if v >> len(names):
        return FALSE
    return _and(*[_lit(n, bool(v >> j & 1)) for j, n in enumerate(names)])


def _next_value(names: list[str], v: int) -> Formula:
    return _and(*[Next(_lit(n, bool(v >> j & 1))) for j, n in enumerate(names)])


def _increment(bits: list[str], carry_in: Formula) -> tuple[Formula, Formula]:
    """(step, overflow): next value equals current plus ``carry_in``."""
    parts = []
    carry = carry_in
    for name in bits:
        c = Atom(name)
        e = _xor(c, carry)
        parts.append(_or(_and(e, Next(c)), _and(_not(e), Next(Not(c)))))
        carry = _and(carry, c)
    return _and(*parts), carry


def _mismatch(bits: list[str], carry_in: Formula) -> Formula:
    """A next position exists and its value differs from current plus ``carry_in``."""
    parts = []
    carry = carry_in
    for name in bits:
        c = Atom(name)
        e = _xor(c, carry)
        parts.append(_or(_and(e, Next(Not(c))), _and(_not(e), Next(c))))
        carry = _and(carry, c)
    return _or(*parts)


def _check(name: str, v: int, lo: int, hi: int):
    if not isinstance(v, int) or not lo <= v <= hi:
        raise ValueError(f"{name} must be an integer in [{lo}, {hi}], got {v!r}")


# -- counters -------------------------------------------------------------------

def gen_counter(n: int, inc: bool = False) -> BenchmarkInstance:
    """n-bit counter that starts at zero and must step until all bits are set.

    Without ``inc`` the counter advances every step and there are no inputs.
    With ``inc`` an input signal gates the increment, so the environment can
    stall the counter forever.
    """
    _check("n", n, 1, 20)
    bits = [f"c{j}" for j in range(n)]
    carry = Atom("inc") if inc else TRUE
    step, _ = _increment(bits, carry)
    full = _and(*[Atom(b) for b in bits])
    f = _and(_value(bits, 0), Until(step, full))
    inputs = ("inc",) if inc else ()
    name = f"counter_inc_n{n}" if inc else f"counter_n{n}"
    return BenchmarkInstance(name, f, Partition(inputs, tuple(bits)), "counter",
                             {"n": n, "inc": inc})


def gen_double_counter(n: int) -> BenchmarkInstance:
    """System counter chasing an environment counter.

    The environment chooses its start value freely and afterwards may only
    add one per step (signal ``add``), never past the maximum; breaking that
    rule hands the win to the system. The system counter starts at zero and
    increments every step; the system wins when both counters are equal.
    """
    _check("n", n, 1, 10)
    cs = [f"c{j}" for j in range(n)]
    es = [f"e{j}" for j in range(n)]
    step, _ = _increment(cs, TRUE)
    equal = _and(*[_or(_and(Atom(c), Atom(e)), _and(Not(Atom(c)), Not(Atom(e))))
                   for c, e in zip(cs, es)])
    e_full = _and(*[Atom(e) for e in es])
    cheat = _or(_and(Atom("add"), e_full), _mismatch(es, Atom("add")))
    f = _and(_value(cs, 0), Until(step, _or(equal, cheat)))
    return BenchmarkInstance(f"double_counter_n{n}", f, Partition(tuple(es) + ("add",), tuple(cs)),
                             "double_counter", {"n": n})


# -- Nim ------------------------------------------------------------------------

def _bits_for(values: int) -> int:
    return math.ceil(math.log2(values)) if values > 1 else 0


def gen_nim(p: int, q: int) -> BenchmarkInstance:
    """Nim with ``p`` heaps of ``q`` tokens; the environment moves first.

    One position holds the heap sizes (``h<k>_<j>``, kept by the system),
    the environment's move (``ei_*``, ``ea_*``) and the system's reply
    (``si_*``, ``sa_*``). The system wins by emptying the last heap or when
    the environment moves illegally; an illegal system move or an
    environment move that empties the board loses.
    """
    _check("p", p, 1, 3)
    _check("q", q, 1, 3)
    b = _bits_for(q + 1)
    ib = _bits_for(p)
    heaps = [[f"h{k}_{j}" for j in range(b)] for k in range(p)]
    ei, ea = [f"ei_{j}" for j in range(ib)], [f"ea_{j}" for j in range(b)]
    si, sa = [f"si_{j}" for j in range(ib)], [f"sa_{j}" for j in range(b)]
    moves = [(i, a) for i in range(p) for a in range(1, q + 1)]

    def heap_is(k, v):
        return _value(heaps[k], v)

    def heap_at_least(k, v):
        return _or(*[heap_is(k, w) for w in range(v, q + 1)])

    env_legal = _or(*[_and(_value(ei, i), _value(ea, a), heap_at_least(i, a)) for i, a in moves])
    finish, cont = [], []
    for ie, ae in moves:
        for is_, as_ in moves:
            d = [0] * p
            d[ie] += ae
            d[is_] += as_
            chosen = _and(_value(ei, ie), _value(ea, ae), _value(si, is_), _value(sa, as_))
            empty = _and(*[heap_is(k, d[k]) for k in range(p)])
            update = _and(*[
                _or(*[_and(heap_is(k, v), _next_value(heaps[k], v - d[k]))
                      for v in range(d[k], q + 1)])
                for k in range(p)])
            finish.append(_and(chosen, empty))
            cont.append(_and(chosen, update, _not(empty)))
    win = _or(_not(env_legal), *finish)
    start = _and(*[heap_is(k, q) for k in range(p)])
    f = _and(start, Until(_or(*cont), win))
    outputs = tuple(x for h in heaps for x in h) + tuple(si) + tuple(sa)
    return BenchmarkInstance(f"nim_p{p}_q{q}", f, Partition(tuple(ei) + tuple(ea), outputs),
                             "nim", {"p": p, "q": q})


def nim_first_mover_wins(heaps) -> bool:
    """Bouton: the player to move wins iff the heap sizes XOR to nonzero."""
    x = 0
    for h in heaps:
        x ^= h
    return x != 0


# -- random formulas ---------------------------------------------------------------

_UNARY = (Not, Next, Finally, Globally)
_BINARY = (
    lambda a, b: And(*_flat(Op.AND, (a, b))),
    lambda a, b: Or(*_flat(Op.OR, (a, b))),
    Until,
    Implies,
)


def random_formula(rng: random.Random, depth: int, props: list[str]) -> Formula:
    leaves = [Atom(p) for p in props] + [TRUE, FALSE]
    if depth <= 1:
        return rng.choice(leaves)
    kind = rng.randrange(3)
    if kind == 0:
        return rng.choice(leaves)
    if kind == 1:
        return rng.choice(_UNARY)(random_formula(rng, depth - 1, props))
    op = rng.choice(_BINARY)
    return op(random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props))


def gen_random(depth: int, num_props: int, seed: int) -> BenchmarkInstance:
    """Seeded random formula; propositions alternate between inputs and outputs."""
    _check("depth", depth, 1, 64)
    _check("num_props", num_props, 1, 64)
    props = [f"p{j}" for j in range(num_props)]
    f = random_formula(random.Random(seed), depth, props)
    part = Partition(tuple(props[0::2]), tuple(props[1::2]))
    return BenchmarkInstance(f"random_d{depth}_p{num_props}_s{seed}", f, part, "random",
                             {"depth": depth, "num_props": num_props, "seed": seed})


def generate(family: str, **params) -> BenchmarkInstance:
    if family == "counter":
        return gen_counter(params["n"], params.get("inc", False))
    if family == "double_counter":
        return gen_double_counter(params["n"])
    if family == "nim":
        return gen_nim(params["p"], params["q"])
    if family == "random":
        return gen_random(params["depth"], params["num_props"], params["seed"])
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
