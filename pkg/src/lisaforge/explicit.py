"""Explicit-state DFAs: construction from LTLf by progression, products,
Hopcroft minimization, membership and equivalence.

A letter is an integer bitmask over the automaton's ``support``: bit ``i``
is set iff proposition ``support[i]`` is true.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bdd import BDD, BddRef
from .errors import StateBudgetExceeded
from .ltlf import Formula, Not, Op, propositions

DEFAULT_STATE_BUDGET = 10**6


@dataclass(frozen=True)
class ExplicitDfa:
    """Complete DFA over ``2**len(support)`` letters.

    ``trans[s][letter]`` is the successor of state ``s``. States are
    ``0 .. n-1``; constructions return only reachable states.
    """

    support: tuple[str, ...]
    initial: int
    accepting: frozenset[int]
    trans: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.trans)
        k = 1 << len(self.support)
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        if any(not 0 <= s < n for s in self.accepting):
            raise ValueError("accepting state out of range")
        for row in self.trans:
            if len(row) != k or any(not 0 <= t < n for t in row):
                raise ValueError("transition table is not total over the alphabet")

    def __len__(self):
        return len(self.trans)

    @property
    def num_states(self) -> int:
        return len(self.trans)

    @property
    def num_letters(self) -> int:
        return 1 << len(self.support)

    @classmethod
    def universal(cls, support: Sequence[str] = ()) -> "ExplicitDfa":
        """One accepting state looping on every letter (accepts everything, even ε)."""
        return cls(tuple(support), 0, frozenset({0}), ((0,) * (1 << len(support)),))

    @classmethod
    def empty(cls, support: Sequence[str] = ()) -> "ExplicitDfa":
        return cls(tuple(support), 0, frozenset(), ((0,) * (1 << len(support)),))

    def letter(self, props: Iterable[str]) -> int:
        """Bitmask of a letter given as a set of true propositions.

        Propositions outside the support are ignored.
        """
        props = set(props)
        return sum(1 << i for i, p in enumerate(self.support) if p in props)

    def letter_props(self, letter: int) -> frozenset[str]:
        return frozenset(p for i, p in enumerate(self.support) if letter >> i & 1)

    def run(self, word: Iterable[Iterable[str]]) -> int:
        s = self.initial
        for props in word:
            s = self.trans[s][self.letter(props)]
        return s

    def to_dot(self, name: str = "dfa") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point];']
        for s in range(self.num_states):
            shape = "doublecircle" if s in self.accepting else "circle"
            lines.append(f'  {s} [label="{s}", shape={shape}];')
        lines.append(f"  __start -> {self.initial};")
        for s, row in enumerate(self.trans):
            by_target: dict[int, list[int]] = {}
            for letter, t in enumerate(row):
                by_target.setdefault(t, []).append(letter)
            for t, letters in by_target.items():
                label = " | ".join(self._literal_label(a) for a in letters)
                lines.append(f'  {s} -> {t} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def _literal_label(self, letter: int) -> str:
        if not self.support:
            return "true"
        return " & ".join(p if letter >> i & 1 else f"!{p}" for i, p in enumerate(self.support))


def accepts(d: ExplicitDfa, word: Iterable[Iterable[str]]) -> bool:
    """Whether the run of ``word`` ends in an accepting state; ``[]`` is ε."""
    return d.run(word) in d.accepting


# ---------------------------------------------------------------------------
# Progression


class _Progression:
    """Symbolic formula progression over one BDD manager.

    A DFA state is a Boolean function over *obligation* variables. The
    variable ``N[g]`` stands for "the rest of the trace is nonempty and
    satisfies g". Weak obligations ("empty, or satisfies g") are written as
    ``not N[not g]``, so an empty remainder is evaluated by setting every
    obligation variable to false.
    """

    def __init__(self, f: Formula):
        self.support = tuple(sorted(propositions(f)))
        self.bdd = BDD()
        self.atom_vars = [self.bdd.declare(p) for p in self.support]
        self.atoms = {p: self.bdd.var(v) for p, v in zip(self.support, self.atom_vars)}
        self.obligation: dict[Formula, BddRef] = {}
        self.owner: dict[int, Formula] = {}
        self.step: dict[Formula, BddRef] = {}
        self.unfold: dict[int, BddRef] = {}

    def N(self, g: Formula) -> BddRef:
        r = self.obligation.get(g)
        if r is None:
            v = self.bdd.declare(f"N{len(self.obligation)}")
            r = self.bdd.var(v)
            self.obligation[g] = r
            self.owner[v] = g
        return r

    def prog(self, g: Formula) -> BddRef:
        """Obligations left after reading one letter, as a function of that letter."""
        r = self.step.get(g)
        if r is not None:
            return r
        op = g.op
        bdd = self.bdd
        if op is Op.TRUE:
            r = bdd.true
        elif op is Op.FALSE:
            r = bdd.false
        elif op is Op.ATOM:
            r = self.atoms[g.name]
        elif op is Op.NOT:
            r = ~self.prog(g.children[0])
        elif op is Op.AND:
            r = bdd.conjoin(self.prog(c) for c in g.children)
        elif op is Op.OR:
            r = bdd.disjoin(self.prog(c) for c in g.children)
        elif op is Op.NEXT:
            r = self.N(g.children[0])
        elif op is Op.UNTIL:
            a, b = g.children
            r = self.prog(b) | (self.prog(a) & self.N(g))
        elif op is Op.RELEASE:
            a, b = g.children
            r = self.prog(b) & (self.prog(a) | ~self.N(Not(g)))
        elif op is Op.FINALLY:
            r = self.prog(g.children[0]) | self.N(g)
        else:
            r = self.prog(g.children[0]) & ~self.N(Not(g))
        self.step[g] = r
        return r

    def successors(self, state: BddRef) -> list[BddRef]:
        bdd = self.bdd
        sub = {}
        for v in bdd.support(state):
            r = self.unfold.get(v)
            if r is None:
                r = self.unfold[v] = self.prog(self.owner[v])
            sub[v] = r
        return bdd.cofactor_table(bdd.compose(state, sub), self.atom_vars)

    def is_accepting(self, state: BddRef) -> bool:
        return self.bdd.evaluate(state, {})


def progression_dfa(f: Formula, state_budget: int = DEFAULT_STATE_BUDGET) -> ExplicitDfa:
    """DFA for ``f`` whose states are canonical progression residuals (not minimized)."""
    p = _Progression(f)
    init = p.N(f)
    states = [init]
    index = {init: 0}
    trans = []
    accepting = set()
    i = 0
    while i < len(states):
        s = states[i]
        if p.is_accepting(s):
            accepting.add(i)
        row = []
        for t in p.successors(s):
            j = index.get(t)
            if j is None:
                j = index[t] = len(states)
                if j >= state_budget:
                    raise StateBudgetExceeded(
                        f"explicit construction exceeded {state_budget} states")
                states.append(t)
            row.append(j)
        trans.append(tuple(row))
        i += 1
    return ExplicitDfa(p.support, 0, frozenset(accepting), tuple(trans))


def from_ltlf(f: Formula, state_budget: int = DEFAULT_STATE_BUDGET) -> ExplicitDfa:
    """Minimal DFA accepting exactly the nonempty traces satisfying ``f``.

    The support is the sorted set of propositions of ``f``.
    """
    return minimize(progression_dfa(f, state_budget))


# ---------------------------------------------------------------------------
# Products and minimization


def _projection(union: Sequence[str], part: Sequence[str]) -> list[int]:
    pos = {p: i for i, p in enumerate(union)}
    bits = [pos[p] for p in part]
    return [sum(1 << j for j, b in enumerate(bits) if letter >> b & 1)
            for letter in range(1 << len(union))]


def _pair_search(d1: ExplicitDfa, d2: ExplicitDfa, state_budget: int):
    support = tuple(sorted(set(d1.support) | set(d2.support)))
    p1, p2 = _projection(support, d1.support), _projection(support, d2.support)
    start = (d1.initial, d2.initial)
    index = {start: 0}
    pairs = [start]
    trans = []
    i = 0
    t1, t2 = d1.trans, d2.trans
    while i < len(pairs):
        s1, s2 = pairs[i]
        r1, r2 = t1[s1], t2[s2]
        row = []
        for a in range(len(p1)):
            key = (r1[p1[a]], r2[p2[a]])
            j = index.get(key)
            if j is None:
                j = index[key] = len(pairs)
                if j >= state_budget:
                    raise StateBudgetExceeded(f"product exceeded {state_budget} states")
                pairs.append(key)
            row.append(j)
        trans.append(tuple(row))
        i += 1
    return support, pairs, tuple(trans)


def product(d1: ExplicitDfa, d2: ExplicitDfa,
            state_budget: int = DEFAULT_STATE_BUDGET) -> ExplicitDfa:
    """Reachable synchronous product recognizing ``L(d1) ∩ L(d2)``."""
    support, pairs, trans = _pair_search(d1, d2, state_budget)
    acc = frozenset(i for i, (a, b) in enumerate(pairs)
                    if a in d1.accepting and b in d2.accepting)
    return ExplicitDfa(support, 0, acc, trans)


def equivalent(d1: ExplicitDfa, d2: ExplicitDfa,
               state_budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Language equality: no reachable pair disagrees on acceptance."""
    _, pairs, _ = _pair_search(d1, d2, state_budget)
    return all((a in d1.accepting) == (b in d2.accepting) for a, b in pairs)


def reachable(d: ExplicitDfa) -> ExplicitDfa:
    """Drop unreachable states and renumber in BFS order from the initial state."""
    order = {d.initial: 0}
    queue = deque([d.initial])
    while queue:
        s = queue.popleft()
        for t in d.trans[s]:
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    if len(order) == len(d.trans) and all(k == v for k, v in order.items()):
        return d
    old = sorted(order, key=order.get)
    trans = tuple(tuple(order[t] for t in d.trans[s]) for s in old)
    acc = frozenset(order[s] for s in d.accepting if s in order)
    return ExplicitDfa(d.support, 0, acc, trans)


def minimize(d: ExplicitDfa) -> ExplicitDfa:
    """Hopcroft partition refinement; output states are numbered in BFS order."""
    d = reachable(d)
    n, k = d.num_states, d.num_letters
    acc = [s in d.accepting for s in range(n)]
    blocks = [set(s for s in range(n) if acc[s]), set(s for s in range(n) if not acc[s])]
    blocks = [b for b in blocks if b]
    if len(blocks) == 1:
        return ExplicitDfa(d.support, 0, d.accepting and frozenset({0}),
                           (tuple([0] * k),))

    # preimages: inv[a][t] = states with a-transition into t
    inv: list[dict[int, list[int]]] = [dict() for _ in range(k)]
    for s, row in enumerate(d.trans):
        for a, t in enumerate(row):
            inv[a].setdefault(t, []).append(s)

    block_of = [0] * n
    for b, members in enumerate(blocks):
        for s in members:
            block_of[s] = b
    smaller = 0 if len(blocks[0]) <= len(blocks[1]) else 1
    waiting = {smaller}

    while waiting:
        splitter = list(blocks[waiting.pop()])
        for a in range(k):
            pre = inv[a]
            hit: dict[int, set[int]] = {}
            for t in splitter:
                for s in pre.get(t, ()):
                    hit.setdefault(block_of[s], set()).add(s)
            for b, inside in hit.items():
                whole = blocks[b]
                if len(inside) == len(whole):
                    continue
                rest = whole - inside
                nb = len(blocks)
                # the smaller half becomes the new block
                if len(inside) <= len(rest):
                    blocks[b], new = rest, inside
                else:
                    blocks[b], new = inside, rest
                blocks.append(new)
                for s in new:
                    block_of[s] = nb
                if b in waiting:
                    waiting.add(nb)
                else:
                    waiting.add(nb if len(new) <= len(blocks[b]) else b)

    if len(blocks) == n:
        return d
    reps = [min(b) for b in blocks]
    quotient = ExplicitDfa(
        d.support,
        block_of[d.initial],
        frozenset(block_of[s] for s in d.accepting),
        tuple(tuple(block_of[t] for t in d.trans[r]) for r in reps),
    )
    return reachable(quotient)

