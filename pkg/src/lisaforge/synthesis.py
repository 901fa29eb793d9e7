"""Reachability game on a symbolic DFA: winning set, verdict and strategy.

Each round the environment fixes the inputs, then the system fixes the
outputs and the automaton moves. The system wins once an accepting state
is reached.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .bdd import BddRef
from .composer import HybridComposer, Thresholds
from .ltlf import Formula, Partition
from .symbolic import SymbolicDfa, declare_props


@dataclass(eq=False)
class GameResult:
    realizable: bool
    winning_set: BddRef
    iterations: int
    node_counts: list[int]
    layers: list[BddRef]
    game: SymbolicDfa
    partition: Partition
    fixpoint_ms: float = 0.0
    composer: HybridComposer | None = field(default=None, repr=False)

    @property
    def winning_set_nodes(self) -> int:
        return self.game.bdd.dag_size(self.winning_set)

    def stats(self) -> dict:
        out = self.composer.stats() if self.composer is not None else {}
        out.update({
            "state_vars": self.game.num_state_vars,
            "iterations": self.iterations,
            "fixpoint_ms": round(self.fixpoint_ms, 3),
            "winning_set_nodes": self.winning_set_nodes,
            "realizable": self.realizable,
        })
        if self.composer is not None:
            out["bdd_nodes_peak"] = max(self.composer.bdd.peak_nodes, len(self.composer.bdd))
        return out


def _io_vars(g: SymbolicDfa, p: Partition) -> tuple[list[int], list[int]]:
    bdd = g.bdd
    known = set(p.names)
    stray = sorted(bdd.var_name(v) for v in g.prop_vars if bdd.var_name(v) not in known)
    if stray:
        raise ValueError(f"propositions not in partition: {stray}")
    return declare_props(bdd, p.inputs), declare_props(bdd, p.outputs)


def winning_set(g: SymbolicDfa, p: Partition) -> GameResult:
    """Least fixpoint ``W = F | forall I. exists O, Z'. T & W(Z')``.

    ``iterations`` counts applications of the update, including the last
    one that returns the same function.
    """
    start = time.perf_counter()
    bdd = g.bdd
    ins, outs = _io_vars(g, p)
    prime = g.prime_map()
    inner = list(g.primed_vars) + outs
    w = g.final
    layers = [w]
    counts = [bdd.dag_size(w)]
    iterations = 0
    while True:
        pre = bdd.and_exists(g.trans, bdd.rename(w, prime), inner)
        pre = bdd.forall(pre, ins)
        nxt = w | pre
        iterations += 1
        counts.append(bdd.dag_size(nxt))
        if nxt == w:
            break
        layers.append(nxt)
        w = nxt
    realizable = (g.init & ~w).is_false
    return GameResult(realizable, w, iterations, counts, layers, g, p,
                      fixpoint_ms=(time.perf_counter() - start) * 1000)


def is_realizable(f: Formula, p: Partition, thresholds: Thresholds | None = None,
                  mode: str = "hybrid", **composer_kwargs) -> GameResult:
    p.check_covers(f)
    composer_kwargs.setdefault("prop_order", p.inputs + p.outputs)
    composer = HybridComposer(thresholds, mode, **composer_kwargs)
    game = composer.compose(f)
    result = winning_set(game, p)
    result.composer = composer
    return result


class Strategy:
    """Mealy-style output rule for the system on a solved game.

    A state first added to the winning set at layer ``k`` picks the
    lexicographically least output (in partition order, false before true)
    that moves into layer ``k - 1``, so every play reaches acceptance within
    ``len(layers) - 1`` rounds.
    """

    def __init__(self, game: SymbolicDfa, result: GameResult, partition: Partition):
        self.game = game
        self.result = result
        self.partition = partition
        bdd = game.bdd
        self._ins, self._outs = _io_vars(game, partition)
        prime = game.prime_map()
        zp = list(game.primed_vars)
        # moves[k](Z, I, O): the move reaches layer k
        self._moves = [bdd.and_exists(game.trans, bdd.rename(w, prime), zp)
                       for w in result.layers[:-1]]

    def layer_of(self, state: Mapping[int, bool]) -> int | None:
        bdd = self.game.bdd
        for k, w in enumerate(self.result.layers):
            if bdd.evaluate(w, state):
                return k
        return None

    def output(self, state: Mapping[int, bool], inputs: Iterable[str]) -> frozenset[str]:
        """Outputs set to true for the given state assignment and input letter."""
        bdd = self.game.bdd
        inputs = self._check_inputs(inputs)
        k = self.layer_of(state)
        if k is None:
            raise ValueError("state is outside the winning region")
        if k == 0:
            # already accepting; any output will do
            return frozenset()
        asg = dict(state)
        asg.update({v: bdd.var_name(v) in inputs for v in self._ins})
        options = bdd.restrict(self._moves[k - 1], asg)
        choice = bdd.any_sat(options, self._outs)
        return frozenset(bdd.var_name(v) for v, b in choice.items() if b)

    def _check_inputs(self, inputs: Iterable[str]) -> frozenset[str]:
        inputs = frozenset(inputs)
        unknown = inputs - set(self.partition.inputs)
        if unknown:
            raise ValueError(f"unknown input propositions: {sorted(unknown)}")
        return inputs

    def initial_state(self) -> dict[int, bool]:
        g = self.game
        return g.bdd.any_sat(g.init, g.state_vars)

    def step(self, state: Mapping[int, bool], letter: Iterable[str]) -> dict[int, bool]:
        g = self.game
        bdd = g.bdd
        letter = set(letter)
        asg = dict(state)
        asg.update({v: bdd.var_name(v) in letter for v in g.prop_vars})
        succ = bdd.restrict(g.trans, asg)
        primed = bdd.any_sat(succ, g.primed_vars)
        unprime = g.unprime_map()
        return {unprime[v]: b for v, b in primed.items()}

    def is_accepting(self, state: Mapping[int, bool]) -> bool:
        return self.game.bdd.evaluate(self.game.final, state)


def extract_strategy(g: SymbolicDfa, r: GameResult, p: Partition) -> Strategy:
    if not r.realizable:
        raise ValueError("no strategy: the game is not realizable")
    return Strategy(g, r, p)


@dataclass
class Simulation:
    trace: list[frozenset[str]]
    accepted: bool
    steps: int


def simulate(s: Strategy, env_inputs: Sequence[Iterable[str]]) -> Simulation:
    """Play ``s`` against ``env_inputs``; stop at the first accepting prefix."""
    env = [s._check_inputs(i) for i in env_inputs]
    state = s.initial_state()
    trace: list[frozenset[str]] = []
    for inputs in env:
        letter = inputs | s.output(state, inputs)
        trace.append(letter)
        state = s.step(state, letter)
        if s.is_accepting(state):
            return Simulation(trace, True, len(trace))
    return Simulation(trace, False, len(trace))
