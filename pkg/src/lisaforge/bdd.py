"""Reduced ordered binary decision diagrams.

A :class:`BDD` manager owns a unique table of ``(var, low, high)`` nodes
and a computed cache. Functions are handed out as :class:`BddRef` objects,
which pin their node for as long as the Python object is alive; all
recursive algorithms run on raw integer node ids internally.

Node ids 0 and 1 are the constant functions. Plain edges only, no
complement edges, so two refs denote the same function iff their node
ids are equal.

Garbage collection is reference counted: every node counts its parents
plus the live ``BddRef`` handles pointing at it, and :meth:`BDD.collect`
sweeps nodes whose count dropped to zero. Collection and dynamic
reordering only run at the entry of public operations, never in the
middle of a recursion.
"""
from __future__ import annotations

import logging
from collections import Counter
from typing import Iterable, Mapping, Sequence

from .errors import NodeBudgetExceeded

log = logging.getLogger(__name__)

TERMINAL = -1
_FREE = -2
_BOTTOM = 1 << 30
DEFAULT_NODE_BUDGET = 10**7
MAX_CACHE = 1 << 21
SIFT_MAX_GROWTH = 1.2


class BddRef:
    """Handle to a Boolean function in a :class:`BDD` manager."""

    __slots__ = ("bdd", "node", "__weakref__")

    def __init__(self, bdd: "BDD", node: int):
        self.bdd = bdd
        self.node = node
        bdd._ref[node] += 1

    def __del__(self):
        try:
            self.bdd._ref[self.node] -= 1
        except Exception:  # interpreter shutdown
            pass

    def __eq__(self, other):
        if not isinstance(other, BddRef):
            return NotImplemented
        return self.node == other.node and self.bdd is other.bdd

    def __hash__(self):
        return hash(self.node)

    def __bool__(self):
        raise TypeError("use f.is_true / f.is_false or compare refs with ==")

    def __repr__(self):
        return f"BddRef({self.node})"

    def __and__(self, other: "BddRef") -> "BddRef":
        return self.bdd.apply("and", self, other)

    def __or__(self, other: "BddRef") -> "BddRef":
        return self.bdd.apply("or", self, other)

    def __xor__(self, other: "BddRef") -> "BddRef":
        return self.bdd.apply("xor", self, other)

    def __invert__(self) -> "BddRef":
        return self.bdd.apply("not", self)

    def implies(self, other: "BddRef") -> "BddRef":
        return self.bdd.apply("or", ~self, other)

    def iff(self, other: "BddRef") -> "BddRef":
        return ~(self ^ other)

    @property
    def is_true(self) -> bool:
        return self.node == 1

    @property
    def is_false(self) -> bool:
        return self.node == 0

    @property
    def var(self) -> int | None:
        v = self.bdd._var[self.node]
        return None if v == TERMINAL else v

    @property
    def low(self) -> "BddRef":
        return self.bdd._wrap(self.bdd._low[self.node])

    @property
    def high(self) -> "BddRef":
        return self.bdd._wrap(self.bdd._high[self.node])

    def __len__(self):
        return self.bdd.dag_size(self)


class BDD:
    """Shared ROBDD manager.

    Variables are created with :meth:`declare` and appended at the bottom
    of the current order. ``node_budget`` caps the unique table; exceeding
    it raises :class:`NodeBudgetExceeded`. With ``auto_reorder`` set,
    sifting runs whenever the table has doubled since the last reorder.
    """

    def __init__(self, node_budget: int = DEFAULT_NODE_BUDGET, auto_reorder: bool = False,
                 gc_threshold: int = 100_000):
        self._var = [TERMINAL, TERMINAL]
        self._low = [0, 1]
        self._high = [0, 1]
        self._ref = [1, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._free: list[int] = []
        self._level: dict[int, int] = {TERMINAL: _BOTTOM}
        self._order: list[int] = []
        self._names: list[str] = []
        self._var_nodes: list[set[int]] = []
        self.vars: dict[str, int] = {}
        self._cache: dict[tuple, int] = {}
        self.stats: Counter = Counter()
        self.node_budget = node_budget
        self.auto_reorder = auto_reorder
        self.gc_threshold = gc_threshold
        self._min_gc_threshold = gc_threshold
        self._last_reorder_size = 1000
        self.reorder_count = 0
        self.peak_nodes = 0
        self.true = BddRef(self, 1)
        self.false = BddRef(self, 0)

    def __len__(self):
        return len(self._unique)

    # -- variables ---------------------------------------------------------

    def declare(self, name: str) -> int:
        """Add variable ``name`` at the bottom of the order; return its id."""
        if name in self.vars:
            raise ValueError(f"variable {name!r} already declared")
        v = len(self._names)
        self._names.append(name)
        self.vars[name] = v
        self._level[v] = len(self._order)
        self._order.append(v)
        self._var_nodes.append(set())
        return v

    def var_name(self, v: int) -> str:
        return self._names[v]

    def level_of(self, v) -> int:
        return self._level[self._vid(v)]

    @property
    def order(self) -> list[str]:
        return [self._names[v] for v in self._order]

    def _vid(self, v) -> int:
        if isinstance(v, str):
            try:
                return self.vars[v]
            except KeyError:
                raise ValueError(f"unknown variable {v!r}") from None
        if not isinstance(v, int) or not 0 <= v < len(self._names):
            raise ValueError(f"unknown variable {v!r}")
        return v

    def mk_var(self, v) -> BddRef:
        v = self._vid(v)
        return self._wrap(self._mk(v, 0, 1))

    var = mk_var

    def nvar(self, v) -> BddRef:
        v = self._vid(v)
        return self._wrap(self._mk(v, 1, 0))

    # -- node table --------------------------------------------------------

    def _wrap(self, u: int) -> BddRef:
        return BddRef(self, u)

    def _node(self, f: BddRef) -> int:
        if not isinstance(f, BddRef) or f.bdd is not self:
            raise ValueError("BddRef belongs to a different manager")
        return f.node

    def _mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        u = self._unique.get(key)
        if u is not None:
            return u
        if len(self._unique) >= self.node_budget:
            raise NodeBudgetExceeded(f"BDD node budget of {self.node_budget} exceeded")
        if self._free:
            u = self._free.pop()
            self._var[u] = v
            self._low[u] = lo
            self._high[u] = hi
            self._ref[u] = 0
        else:
            u = len(self._var)
            self._var.append(v)
            self._low.append(lo)
            self._high.append(hi)
            self._ref.append(0)
        self._ref[lo] += 1
        self._ref[hi] += 1
        self._unique[key] = u
        self._var_nodes[v].add(u)
        return u

    def _delete(self, u: int) -> None:
        stack = [u]
        while stack:
            u = stack.pop()
            v, lo, hi = self._var[u], self._low[u], self._high[u]
            del self._unique[(v, lo, hi)]
            self._var_nodes[v].discard(u)
            self._var[u] = _FREE
            self._free.append(u)
            for c in (lo, hi):
                self._ref[c] -= 1
                if self._ref[c] == 0 and c > 1:
                    stack.append(c)

    def collect(self) -> int:
        """Sweep unreferenced nodes; return how many were freed."""
        before = len(self._unique)
        self.peak_nodes = max(self.peak_nodes, before)
        ref = self._ref
        for u in [u for u in self._unique.values() if ref[u] == 0]:
            if self._var[u] != _FREE and ref[u] == 0:
                self._delete(u)
        self._cache.clear()
        freed = before - len(self._unique)
        self.stats["gc_runs"] += 1
        self.stats["gc_freed"] += freed
        return freed

    def _maintain(self) -> None:
        n = len(self._unique)
        if n > self.peak_nodes:
            self.peak_nodes = n
        if self.auto_reorder and n > 2 * self._last_reorder_size:
            self.reorder()
        elif n > self.gc_threshold or n > 0.8 * self.node_budget:
            self.collect()
            self.gc_threshold = max(self._min_gc_threshold, 2 * len(self._unique))
        if len(self._cache) > MAX_CACHE:
            self._cache.clear()

    # -- core recursions ---------------------------------------------------

    def _not(self, f: int) -> int:
        if f < 2:
            return 1 - f
        key = ("not", f)
        r = self._cache.get(key)
        if r is None:
            r = self._mk(self._var[f], self._not(self._low[f]), self._not(self._high[f]))
            self._cache[key] = r
        return r

    def _and(self, f: int, g: int) -> int:
        if f == 0 or g == 0:
            return 0
        if f == 1 or f == g:
            return g
        if g == 1:
            return f
        if f > g:
            f, g = g, f
        key = ("and", f, g)
        cache = self._cache
        r = cache.get(key)
        if r is not None:
            self.stats["and_hit"] += 1
            return r
        self.stats["and_miss"] += 1
        level, var = self._level, self._var
        lf, lg = level[var[f]], level[var[g]]
        if lf <= lg:
            v, f0, f1 = var[f], self._low[f], self._high[f]
        else:
            v, f0, f1 = var[g], f, f
        if lg <= lf:
            g0, g1 = self._low[g], self._high[g]
        else:
            g0 = g1 = g
        r = self._mk(v, self._and(f0, g0), self._and(f1, g1))
        cache[key] = r
        return r

    def _or(self, f: int, g: int) -> int:
        if f == 1 or g == 1:
            return 1
        if f == 0 or f == g:
            return g
        if g == 0:
            return f
        if f > g:
            f, g = g, f
        key = ("or", f, g)
        cache = self._cache
        r = cache.get(key)
        if r is not None:
            self.stats["or_hit"] += 1
            return r
        self.stats["or_miss"] += 1
        level, var = self._level, self._var
        lf, lg = level[var[f]], level[var[g]]
        if lf <= lg:
            v, f0, f1 = var[f], self._low[f], self._high[f]
        else:
            v, f0, f1 = var[g], f, f
        if lg <= lf:
            g0, g1 = self._low[g], self._high[g]
        else:
            g0 = g1 = g
        r = self._mk(v, self._or(f0, g0), self._or(f1, g1))
        cache[key] = r
        return r

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == f:
            g = 1
        if h == f:
            h = 0
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self._not(f)
        if g == 1:
            return self._or(f, h)
        if h == 0:
            return self._and(f, g)
        key = ("ite", f, g, h)
        r = self._cache.get(key)
        if r is not None:
            self.stats["ite_hit"] += 1
            return r
        self.stats["ite_miss"] += 1
        level, var, low, high = self._level, self._var, self._low, self._high
        lf, lg, lh = level[var[f]], level[var[g]], level[var[h]]
        top = min(lf, lg, lh)
        v = self._order[top]
        f0, f1 = (low[f], high[f]) if lf == top else (f, f)
        g0, g1 = (low[g], high[g]) if lg == top else (g, g)
        h0, h1 = (low[h], high[h]) if lh == top else (h, h)
        r = self._mk(v, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        self._cache[key] = r
        return r

    def _xor(self, f: int, g: int) -> int:
        return self._ite(f, self._not(g), g)

    def _quant(self, f: int, vs: frozenset, maxlvl: int, exist: bool) -> int:
        if f < 2 or self._level[self._var[f]] > maxlvl:
            return f
        key = ("ex" if exist else "all", f, vs)
        r = self._cache.get(key)
        if r is not None:
            return r
        v = self._var[f]
        lo = self._quant(self._low[f], vs, maxlvl, exist)
        if v in vs and lo == (1 if exist else 0):
            r = lo
        else:
            hi = self._quant(self._high[f], vs, maxlvl, exist)
            if v in vs:
                r = self._or(lo, hi) if exist else self._and(lo, hi)
            else:
                r = self._mk(v, lo, hi)
        self._cache[key] = r
        return r

    def _and_exists(self, f: int, g: int, vs: frozenset, maxlvl: int) -> int:
        if f == 0 or g == 0:
            return 0
        if f == 1 and g == 1:
            return 1
        if f == 1 or f == g:
            return self._quant(g, vs, maxlvl, True)
        if g == 1:
            return self._quant(f, vs, maxlvl, True)
        if f > g:
            f, g = g, f
        level, var = self._level, self._var
        lf, lg = level[var[f]], level[var[g]]
        top = min(lf, lg)
        if top > maxlvl:
            return self._and(f, g)
        key = ("andex", f, g, vs)
        r = self._cache.get(key)
        if r is not None:
            return r
        v = self._order[top]
        f0, f1 = (self._low[f], self._high[f]) if lf == top else (f, f)
        g0, g1 = (self._low[g], self._high[g]) if lg == top else (g, g)
        lo = self._and_exists(f0, g0, vs, maxlvl)
        if v in vs:
            r = 1 if lo == 1 else self._or(lo, self._and_exists(f1, g1, vs, maxlvl))
        else:
            r = self._mk(v, lo, self._and_exists(f1, g1, vs, maxlvl))
        self._cache[key] = r
        return r

    def _compose(self, f: int, sub: dict[int, int], memo: dict[int, int]) -> int:
        if f < 2:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            lo = self._compose(self._low[f], sub, memo)
            hi = self._compose(self._high[f], sub, memo)
            g = sub.get(v)
            if g is None:
                g = self._mk(v, 0, 1)
            r = self._ite(g, hi, lo)
            memo[f] = r
        return r

    def _restrict(self, f: int, asg: dict[int, bool], memo: dict[int, int]) -> int:
        if f < 2:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            if v in asg:
                r = self._restrict(self._high[f] if asg[v] else self._low[f], asg, memo)
            else:
                r = self._mk(v, self._restrict(self._low[f], asg, memo),
                             self._restrict(self._high[f], asg, memo))
            memo[f] = r
        return r

    def _varset(self, vs: Iterable) -> tuple[frozenset, int]:
        ids = frozenset(self._vid(v) for v in vs)
        maxlvl = max((self._level[v] for v in ids), default=-1)
        return ids, maxlvl

    # -- public operations -------------------------------------------------

    def apply(self, op: str, f: BddRef, g: BddRef | None = None) -> BddRef:
        self._maintain()
        a = self._node(f)
        if op == "not":
            return self._wrap(self._not(a))
        b = self._node(g)
        if op == "and":
            r = self._and(a, b)
        elif op == "or":
            r = self._or(a, b)
        elif op == "xor":
            r = self._xor(a, b)
        elif op == "implies":
            r = self._or(self._not(a), b)
        elif op == "iff":
            r = self._not(self._xor(a, b))
        else:
            raise ValueError(f"unknown operator {op!r}")
        return self._wrap(r)

    def ite(self, f: BddRef, g: BddRef, h: BddRef) -> BddRef:
        """``(f and g) or (not f and h)``."""
        self._maintain()
        return self._wrap(self._ite(self._node(f), self._node(g), self._node(h)))

    def conjoin(self, fs: Iterable[BddRef]) -> BddRef:
        """Conjunction of ``fs`` combined as a balanced tree."""
        return self._balanced(fs, self._and, 1)

    def disjoin(self, fs: Iterable[BddRef]) -> BddRef:
        return self._balanced(fs, self._or, 0)

    def _balanced(self, fs, op, unit) -> BddRef:
        self._maintain()
        items = [self._wrap(self._node(f)) for f in fs]
        if not items:
            return self._wrap(unit)
        while len(items) > 1:
            nxt = []
            for i in range(0, len(items) - 1, 2):
                nxt.append(self._wrap(op(items[i].node, items[i + 1].node)))
            if len(items) % 2:
                nxt.append(items[-1])
            items = nxt
        return items[0]

    def exists(self, f: BddRef, vs: Iterable) -> BddRef:
        self._maintain()
        ids, maxlvl = self._varset(vs)
        return self._wrap(self._quant(self._node(f), ids, maxlvl, True))

    def forall(self, f: BddRef, vs: Iterable) -> BddRef:
        self._maintain()
        ids, maxlvl = self._varset(vs)
        return self._wrap(self._quant(self._node(f), ids, maxlvl, False))

    def and_exists(self, f: BddRef, g: BddRef, vs: Iterable) -> BddRef:
        """``exists vs. f and g`` without building the full conjunction."""
        self._maintain()
        ids, maxlvl = self._varset(vs)
        return self._wrap(self._and_exists(self._node(f), self._node(g), ids, maxlvl))

    def compose(self, f: BddRef, sub: Mapping) -> BddRef:
        """Simultaneously substitute functions for variables."""
        self._maintain()
        table = {self._vid(v): self._node(g) for v, g in sub.items()}
        return self._wrap(self._compose(self._node(f), table, {}))

    def rename(self, f: BddRef, mapping: Mapping) -> BddRef:
        """Substitute variables for variables; ``mapping`` must be injective."""
        pairs = {self._vid(a): self._vid(b) for a, b in mapping.items()}
        if len(set(pairs.values())) != len(pairs):
            raise ValueError("rename map is not injective")
        unmapped = self.support(f) - set(pairs)
        clash = unmapped & set(pairs.values())
        if clash:
            names = sorted(self._names[v] for v in clash)
            raise ValueError(f"rename target already in support: {names}")
        self._maintain()
        table = {a: self._mk(b, 0, 1) for a, b in pairs.items()}
        return self._wrap(self._compose(self._node(f), table, {}))

    def restrict(self, f: BddRef, assignment: Mapping) -> BddRef:
        """Cofactor of ``f`` under a partial assignment."""
        self._maintain()
        asg = {self._vid(v): bool(b) for v, b in assignment.items()}
        return self._wrap(self._restrict(self._node(f), asg, {}))

    def cube(self, assignment: Mapping) -> BddRef:
        """Conjunction of literals given by ``assignment``."""
        self._maintain()
        asg = sorted(((self._vid(v), bool(b)) for v, b in assignment.items()),
                     key=lambda p: -self._level[p[0]])
        u = 1
        for v, b in asg:
            u = self._mk(v, 0, u) if b else self._mk(v, u, 0)
        return self._wrap(u)

    def cofactor_table(self, f: BddRef, vs: Sequence) -> list[BddRef]:
        """All cofactors of ``f`` over ``vs``.

        Entry ``k`` is ``f`` restricted so that ``vs[j]`` is true iff bit
        ``j`` of ``k`` is set.
        """
        self._maintain()
        ids = [self._vid(v) for v in vs]
        out = [0] * (1 << len(ids))
        by_level = sorted(range(len(ids)), key=lambda j: self._level[ids[j]])
        level, var, low, high = self._level, self._var, self._low, self._high

        def rec(u: int, pos: int, letter: int):
            if pos == len(by_level):
                out[letter] = u
                return
            j = by_level[pos]
            v = ids[j]
            lu, lv = level[var[u]], level[v]
            if lu == lv:
                lo, hi = low[u], high[u]
            elif lu > lv:
                lo = hi = u
            else:
                lo = self._restrict(u, {v: False}, {})
                hi = self._restrict(u, {v: True}, {})
            rec(lo, pos + 1, letter)
            rec(hi, pos + 1, letter | (1 << j))

        rec(self._node(f), 0, 0)
        return [self._wrap(u) for u in out]

    # -- queries -------------------------------------------------------------

    def evaluate(self, f: BddRef, assignment: Mapping) -> bool:
        """Value of ``f``; variables missing from ``assignment`` are false."""
        asg = {self._vid(v): bool(b) for v, b in assignment.items()}
        u = self._node(f)
        while u > 1:
            u = self._high[u] if asg.get(self._var[u], False) else self._low[u]
        return u == 1

    def support(self, f: BddRef) -> set[int]:
        seen, out, stack = set(), set(), [self._node(f)]
        while stack:
            u = stack.pop()
            if u < 2 or u in seen:
                continue
            seen.add(u)
            out.add(self._var[u])
            stack.append(self._low[u])
            stack.append(self._high[u])
        return out

    def dag_size(self, *fs: BddRef) -> int:
        """Number of internal nodes reachable from ``fs``."""
        seen: set[int] = set()
        stack = [self._node(f) for f in fs]
        while stack:
            u = stack.pop()
            if u < 2 or u in seen:
                continue
            seen.add(u)
            stack.append(self._low[u])
            stack.append(self._high[u])
        return len(seen)

    def any_sat(self, f: BddRef, vs: Sequence) -> dict[int, bool]:
        """Lexicographically least satisfying assignment over ``vs``.

        Values are chosen in list order, preferring false. Variables of
        ``f`` outside ``vs`` are existentially projected first.
        """
        ids = [self._vid(v) for v in vs]
        if f.is_false:
            raise ValueError("any_sat of the constant false function")
        extra = self.support(f) - set(ids)
        g = self.exists(f, extra) if extra else f
        out: dict[int, bool] = {}
        for v in ids:
            g0 = self.restrict(g, {v: False})
            if g0.is_false:
                out[v] = True
                g = self.restrict(g, {v: True})
            else:
                out[v] = False
                g = g0
        return out

    def count(self, f: BddRef, vs: Sequence) -> int:
        """Number of satisfying assignments over the variables ``vs``."""
        ids = sorted({self._vid(v) for v in vs}, key=lambda v: self._level[v])
        pos = {v: i for i, v in enumerate(ids)}
        k = len(ids)
        memo: dict[int, tuple[int, int]] = {}

        def rec(u: int) -> tuple[int, int]:
            # (count over vars from index i onward, i)
            if u < 2:
                return u, k
            r = memo.get(u)
            if r is None:
                v = self._var[u]
                if v not in pos:
                    raise ValueError(f"support variable {self._names[v]!r} not counted")
                i = pos[v]
                c0, i0 = rec(self._low[u])
                c1, i1 = rec(self._high[u])
                r = (c0 << (i0 - i - 1)) + (c1 << (i1 - i - 1)), i
                memo[u] = r
            return r

        c, i = rec(self._node(f))
        return c << i

    # -- reordering ----------------------------------------------------------

    def reorder(self) -> None:
        """Rudell sifting: move each variable to its locally best level."""
        self.collect()
        before = len(self._unique)
        for v in sorted(range(len(self._names)), key=lambda v: -len(self._var_nodes[v])):
            self._sift(v)
        self._cache.clear()
        self._last_reorder_size = max(1000, len(self._unique))
        self.reorder_count += 1
        log.debug("sifting: %d -> %d nodes", before, len(self._unique))

    sift_reorder = reorder

    def _sift(self, v: int) -> None:
        n = len(self._order)
        lvl = self._level[v]
        best, best_lvl = len(self._unique), lvl
        while lvl < n - 1:
            self._swap(lvl)
            lvl += 1
            size = len(self._unique)
            if size < best:
                best, best_lvl = size, lvl
            elif size > SIFT_MAX_GROWTH * best:
                break
        while lvl > 0:
            self._swap(lvl - 1)
            lvl -= 1
            size = len(self._unique)
            if size < best:
                best, best_lvl = size, lvl
            elif size > SIFT_MAX_GROWTH * best and lvl < best_lvl:
                break
        while lvl < best_lvl:
            self._swap(lvl)
            lvl += 1
        while lvl > best_lvl:
            self._swap(lvl - 1)
            lvl -= 1

    def _swap(self, i: int) -> None:
        """Exchange the variables at levels ``i`` and ``i + 1`` in place.

        Nodes keep their ids and denote the same functions afterwards.
        Requires every node in the table to be referenced (call after
        :meth:`collect`).
        """
        x, y = self._order[i], self._order[i + 1]
        var, low, high, ref = self._var, self._low, self._high, self._ref
        for u in list(self._var_nodes[x]):
            f0, f1 = low[u], high[u]
            y0, y1 = var[f0] == y, var[f1] == y
            if not (y0 or y1):
                continue
            f00, f01 = (low[f0], high[f0]) if y0 else (f0, f0)
            f10, f11 = (low[f1], high[f1]) if y1 else (f1, f1)
            new_lo = self._mk(x, f00, f10)
            new_hi = self._mk(x, f01, f11)
            ref[new_lo] += 1
            ref[new_hi] += 1
            del self._unique[(x, f0, f1)]
            self._var_nodes[x].discard(u)
            var[u], low[u], high[u] = y, new_lo, new_hi
            self._unique[(y, new_lo, new_hi)] = u
            self._var_nodes[y].add(u)
            for c in (f0, f1):
                ref[c] -= 1
                if ref[c] == 0 and c > 1:
                    self._delete(c)
        self._order[i], self._order[i + 1] = y, x
        self._level[x], self._level[y] = i + 1, i
        self.stats["swaps"] += 1
