"""Symbolic-state DFAs ``(S(Z), T(Z, Prop, Z'), F(Z))`` over a shared BDD manager."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bdd import BDD, BddRef
from .explicit import ExplicitDfa, reachable


@dataclass(eq=False)
class SymbolicDfa:
    bdd: BDD
    state_vars: tuple[int, ...]
    primed_vars: tuple[int, ...]
    prop_vars: tuple[int, ...]
    init: BddRef
    trans: BddRef
    final: BddRef
    state_count_hint: int = 1
    tags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.state_vars) != len(self.primed_vars):
            raise ValueError("state and primed variable lists differ in length")
        if set(self.state_vars) & set(self.primed_vars):
            raise ValueError("state and primed variables overlap")

    @property
    def num_state_vars(self) -> int:
        return len(self.state_vars)

    @property
    def support(self) -> tuple[str, ...]:
        """Proposition names of the alphabet, in canonical (sorted) order."""
        return tuple(sorted(self.bdd.var_name(v) for v in self.prop_vars))

    @property
    def trans_nodes(self) -> int:
        return self.bdd.dag_size(self.trans)

    def stats(self) -> dict:
        bdd = self.bdd
        return {
            "state_vars": self.num_state_vars,
            "init_nodes": bdd.dag_size(self.init),
            "trans_nodes": bdd.dag_size(self.trans),
            "final_nodes": bdd.dag_size(self.final),
            "state_count_hint": self.state_count_hint,
        }

    def prime_map(self) -> dict[int, int]:
        return dict(zip(self.state_vars, self.primed_vars))

    def unprime_map(self) -> dict[int, int]:
        return dict(zip(self.primed_vars, self.state_vars))


def state_bits(n: int) -> int:
    """Number of state variables for ``n`` states (at least one)."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def declare_props(bdd: BDD, names: Iterable[str]) -> list[int]:
    """Declare proposition variables that do not exist yet; return all ids."""
    out = []
    for name in names:
        out.append(bdd.vars[name] if name in bdd.vars else bdd.declare(name))
    return out


def encode(d: ExplicitDfa, bdd: BDD, tag: str) -> SymbolicDfa:
    """Binary-encode ``d`` with fresh state variables named after ``tag``.

    State ``s`` is the binary value of its id (bit ``j`` on variable
    ``z_j``), unprimed and primed variables are interleaved in the order,
    and codes beyond the last state leave ``T`` unconstrained.
    """
    d = reachable(d)
    n = state_bits(d.num_states)
    props = declare_props(bdd, d.support)
    zs, zps = [], []
    for j in range(n):
        zs.append(bdd.declare(f"{tag}.z{j}"))
        zps.append(bdd.declare(f"{tag}.z{j}'"))

    # props in manager order so the Shannon expansion builds bottom-up
    prop_idx = sorted(range(len(props)), key=lambda i: bdd.level_of(props[i]), reverse=True)
    prop_refs = [bdd.var(v) for v in props]
    z_refs = [bdd.var(v) for v in zs]

    primed_code: dict[int, BddRef] = {}

    def code_prime(s: int) -> BddRef:
        r = primed_code.get(s)
        if r is None:
            r = primed_code[s] = bdd.cube({zps[j]: bool(s >> j & 1) for j in range(n)})
        return r

    def row(s: int) -> BddRef:
        layer = {a: code_prime(t) for a, t in enumerate(d.trans[s])}
        for i in prop_idx:
            bit = 1 << i
            nxt = {}
            for a, g in layer.items():
                if a & bit:
                    continue
                nxt[a] = bdd.ite(prop_refs[i], layer[a | bit], g)
            layer = nxt
        return layer[0]

    def shannon(leaf, bottom_up_bits: list[int]):
        # leaf(code) for every full code, then fold bits from the bottom of the order
        layer = {c: leaf(c) for c in range(1 << n)}
        for j in bottom_up_bits:
            bit = 1 << j
            layer = {c: bdd.ite(z_refs[j], layer[c | bit], layer[c])
                     for c in layer if not c & bit}
        return layer[0]

    bits = sorted(range(n), key=lambda j: bdd.level_of(zs[j]), reverse=True)
    count = d.num_states
    trans = shannon(lambda c: row(c) if c < count else bdd.true, bits)
    final = shannon(lambda c: bdd.true if c < count and c in d.accepting else bdd.false, bits)
    init = bdd.cube({z: False for z in zs})
    return SymbolicDfa(bdd, tuple(zs), tuple(zps), tuple(props), init, trans, final,
                       state_count_hint=count, tags=(tag,))


def symbolic_product(a: SymbolicDfa, b: SymbolicDfa) -> SymbolicDfa:
    """Intersection ``(S_a & S_b, T_a & T_b, F_a & F_b)``; no minimization."""
    if a.bdd is not b.bdd:
        raise ValueError("symbolic product needs a shared manager")
    if set(a.state_vars) & set(b.state_vars):
        raise ValueError("operands share state variables")
    props = tuple(sorted(set(a.prop_vars) | set(b.prop_vars), key=a.bdd.level_of))
    return SymbolicDfa(
        a.bdd,
        a.state_vars + b.state_vars,
        a.primed_vars + b.primed_vars,
        props,
        a.init & b.init,
        a.trans & b.trans,
        a.final & b.final,
        state_count_hint=a.state_count_hint * b.state_count_hint,
        tags=a.tags + b.tags,
    )


def letter_cube(s: SymbolicDfa, props: Iterable[str]) -> BddRef:
    props = set(props)
    bdd = s.bdd
    return bdd.cube({v: bdd.var_name(v) in props for v in s.prop_vars})


def image(s: SymbolicDfa, current: BddRef, letter: BddRef) -> BddRef:
    """States reachable from ``current`` in one step on ``letter`` (over Z)."""
    bdd = s.bdd
    nxt = bdd.and_exists(current & letter, s.trans, s.state_vars + s.prop_vars)
    return bdd.rename(nxt, s.unprime_map())


def symbolic_accepts(s: SymbolicDfa, word: Iterable[Iterable[str]]) -> bool:
    current = s.init
    for props in word:
        current = image(s, current, letter_cube(s, props))
    return not (current & s.final).is_false


def decode(s: SymbolicDfa, max_states: int = 1 << 20) -> ExplicitDfa:
    """Explicit view of the states reachable from ``S``.

    Each reachable code is expanded letter by letter; the successor must be a
    single ``Z'`` assignment (the transition relation is deterministic on
    reachable states). The result is complete but not minimized.
    """
    bdd = s.bdd
    support = s.support
    prop_ids = [bdd.vars[p] for p in support]
    zs, zps = list(s.state_vars), list(s.primed_vars)
    start = bdd.any_sat(s.init, zs)
    start_code = tuple(start[z] for z in zs)
    index = {start_code: 0}
    codes = [start_code]
    trans = []
    accepting = set()
    queue = deque([start_code])
    while queue:
        code = queue.popleft()
        asg = dict(zip(zs, code))
        if bdd.evaluate(s.final, asg):
            accepting.add(index[code])
        row_fn = bdd.restrict(s.trans, asg)
        row = []
        for nxt in bdd.cofactor_table(row_fn, prop_ids):
            if bdd.count(nxt, zps) != 1:
                raise ValueError("transition relation is not deterministic on a reachable state")
            sat = bdd.any_sat(nxt, zps)
            tcode = tuple(sat[z] for z in zps)
            j = index.get(tcode)
            if j is None:
                j = index[tcode] = len(codes)
                if j >= max_states:
                    raise ValueError("decode exceeded the state limit")
                codes.append(tcode)
                queue.append(tcode)
            row.append(j)
        trans.append(tuple(row))
    return ExplicitDfa(support, 0, frozenset(accepting), tuple(trans))
