"""Hybrid compositional construction of a symbolic DFA for a conjunction.

Conjuncts are translated to minimal explicit DFAs and combined two at a
time, smallest first, minimizing every intermediate product. Once the two
smallest candidates are too large (see :func:`should_switch`) all remaining
automata are binary-encoded and the rest of the products are taken
symbolically, without further minimization.
"""
from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bdd import BDD, DEFAULT_NODE_BUDGET
from .explicit import DEFAULT_STATE_BUDGET, ExplicitDfa, from_ltlf, minimize, product
from .ltlf import Formula, propositions, split_conjuncts
from .symbolic import SymbolicDfa, declare_props, encode, symbolic_product

log = logging.getLogger(__name__)

INF = math.inf
MODES = ("hybrid", "explicit", "symbolic")


@dataclass(frozen=True)
class Thresholds:
    """Switch-over limits: ``t1`` on the smaller operand, ``t2`` on the product."""

    t1: float = 800
    t2: float = 2500

    def __post_init__(self):
        for name in ("t1", "t2"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or math.isnan(v) or v < 0:
                raise ValueError(f"{name} must be a non-negative number or inf, got {v!r}")

    def for_mode(self, mode: str) -> "Thresholds":
        if mode == "hybrid":
            return self
        if mode == "explicit":
            return Thresholds(INF, INF)
        if mode == "symbolic":
            return Thresholds(0, 0)
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")

    def to_json(self) -> dict:
        return {"t1": _num(self.t1), "t2": _num(self.t2)}


def _num(x):
    if x == INF:
        return "inf"
    return int(x) if float(x).is_integer() else x


DEFAULT_THRESHOLDS = Thresholds(800, 2500)
PRESETS = {"default": DEFAULT_THRESHOLDS, "nim": Thresholds(800, 300_000)}


def should_switch(m1_size: int, m2_size: int, t: Thresholds) -> bool:
    """True when the two smallest DFAs should no longer be combined explicitly."""
    small = min(m1_size, m2_size)
    # Python ints do not overflow; comparing against inf works for floats too
    return small > t.t1 or m1_size * m2_size > t.t2


class HybridComposer:
    """One composition run bound to a single BDD manager.

    After :meth:`compose` the attributes ``trace``, ``phase``,
    ``explicit_products``, ``symbolic_products`` and ``min_dfa_states``
    describe what happened. ``min_dfa_states`` is set only when the run
    finished in the explicit phase; the final explicit DFA is then kept in
    ``explicit_result``. Minimized explicit products are kept in
    ``intermediates``.
    """

    def __init__(self, thresholds: Thresholds | None = None, mode: str = "hybrid",
                 bdd: BDD | None = None, prop_order: Sequence[str] | None = None,
                 state_budget: int = DEFAULT_STATE_BUDGET,
                 node_budget: int = DEFAULT_NODE_BUDGET):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        self.mode = mode
        self.thresholds = (thresholds or DEFAULT_THRESHOLDS).for_mode(mode)
        self.bdd = bdd if bdd is not None else BDD(node_budget=node_budget)
        self.prop_order = tuple(prop_order) if prop_order is not None else None
        self.state_budget = state_budget
        self._reset()

    def _reset(self):
        self.trace: list[dict] = []
        self.phase = "explicit"
        self.explicit_products = 0
        self.symbolic_products = 0
        self.conjuncts = 0
        self.conjunct_sizes: list[int] = []
        self.min_dfa_states: int | None = None
        self.explicit_result: ExplicitDfa | None = None
        self.intermediates: list[ExplicitDfa] = []
        self.dfa_ms = 0.0
        self._seq = itertools.count()
        self._iteration = 0

    # -- entry points ----------------------------------------------------------

    def compose(self, f: Formula) -> SymbolicDfa:
        start = time.perf_counter()
        self._reset()
        self._declare(sorted(propositions(f)))
        dfas = [from_ltlf(c, self.state_budget) for c in split_conjuncts(f)]
        out = self._run(dfas)
        self.dfa_ms = (time.perf_counter() - start) * 1000
        return out

    def compose_dfas(self, dfas: Iterable[ExplicitDfa]) -> SymbolicDfa:
        """Compose already-built DFAs (taken as given, not re-minimized)."""
        start = time.perf_counter()
        self._reset()
        dfas = list(dfas)
        if not dfas:
            raise ValueError("nothing to compose")
        self._declare(sorted(set().union(*(d.support for d in dfas))))
        out = self._run(dfas)
        self.dfa_ms = (time.perf_counter() - start) * 1000
        return out

    # -- internals ---------------------------------------------------------------

    def _declare(self, names: Sequence[str]):
        order = list(self.prop_order or ())
        order += [n for n in names if n not in set(order)]
        declare_props(self.bdd, order)

    def _log(self, **entry):
        entry.setdefault("iteration", self._iteration)
        entry.setdefault("phase", self.phase)
        entry["bdd_nodes"] = len(self.bdd)
        self.trace.append(entry)
        log.debug("compose %s", entry)

    def _fresh_tag(self) -> str:
        while True:
            tag = f"d{next(self._seq)}"
            if f"{tag}.z0" not in self.bdd.vars:
                return tag

    def _run(self, dfas: list[ExplicitDfa]) -> SymbolicDfa:
        self.conjuncts = len(dfas)
        self.conjunct_sizes = [d.num_states for d in dfas]
        heap: list = []
        order = itertools.count()
        for d in dfas:
            heapq.heappush(heap, (d.num_states, next(order), d))
        self._log(event="init", heap_sizes=sorted(s for s, _, _ in heap), heap_len=len(heap))

        t = self.thresholds
        while len(heap) > 1:
            snapshot = sorted(s for s, _, _ in heap)
            s1, q1, d1 = heapq.heappop(heap)
            s2, q2, d2 = heapq.heappop(heap)
            if should_switch(s1, s2, t):
                heapq.heappush(heap, (s1, q1, d1))
                heapq.heappush(heap, (s2, q2, d2))
                self._log(event="switch", popped_sizes=[s1, s2], heap_sizes=snapshot,
                          heap_len=len(heap))
                return self._symbolic_phase([d for _, _, d in sorted(heap)])
            self._iteration += 1
            merged = product(d1, d2, self.state_budget)
            raw = merged.num_states
            merged = minimize(merged)
            self.explicit_products += 1
            self.intermediates.append(merged)
            heapq.heappush(heap, (merged.num_states, next(order), merged))
            self._log(event="product", popped_sizes=[s1, s2], product_size=raw,
                      pushed_size=merged.num_states, minimized=True, heap_sizes=snapshot,
                      heap_len=len(heap))

        final = heap[0][2]
        self.explicit_result = final
        self.min_dfa_states = final.num_states
        tag = self._fresh_tag()
        out = encode(final, self.bdd, tag)
        self._log(event="encode", tag=tag, states=final.num_states,
                  state_vars=out.num_state_vars, heap_len=0)
        self._log(event="done", state_vars=out.num_state_vars, heap_len=0)
        return out

    def _symbolic_phase(self, dfas: list[ExplicitDfa]) -> SymbolicDfa:
        self.phase = "symbolic"
        heap: list = []
        order = itertools.count()
        for d in dfas:
            tag = self._fresh_tag()
            s = encode(d, self.bdd, tag)
            heapq.heappush(heap, (s.trans_nodes, next(order), s))
            self._log(event="encode", tag=tag, states=d.num_states,
                      state_vars=s.num_state_vars, heap_len=len(heap))
        while len(heap) > 1:
            snapshot = sorted(n for n, _, _ in heap)
            n1, _, a = heapq.heappop(heap)
            n2, _, b = heapq.heappop(heap)
            self._iteration += 1
            merged = symbolic_product(a, b)
            self.symbolic_products += 1
            heapq.heappush(heap, (merged.trans_nodes, next(order), merged))
            self._log(event="product", popped_sizes=[n1, n2], pushed_size=merged.trans_nodes,
                      minimized=False, heap_sizes=snapshot, heap_len=len(heap))
        out = heap[0][2]
        self._log(event="done", state_vars=out.num_state_vars, heap_len=0)
        return out

    def stats(self) -> dict:
        return {
            "mode": self.mode,
            **self.thresholds.to_json(),
            "conjuncts": self.conjuncts,
            "explicit_products": self.explicit_products,
            "symbolic_products": self.symbolic_products,
            "min_dfa_states": self.min_dfa_states if self.mode == "explicit" else None,
            "dfa_ms": round(self.dfa_ms, 3),
            "bdd_nodes_peak": max(self.bdd.peak_nodes, len(self.bdd)),
        }


def compose(f: Formula, thresholds: Thresholds | None = None, mode: str = "hybrid",
            **kwargs) -> SymbolicDfa:
    return HybridComposer(thresholds, mode, **kwargs).compose(f)
