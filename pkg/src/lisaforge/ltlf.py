"""LTLf formulas: hash-consed syntax trees, parsing, normalization and
finite-trace semantics.

Formulas are interned, so two structurally equal formulas are the same
Python object and can be compared with ``is`` (or ``==``, which falls
back to identity).
"""
from __future__ import annotations

import enum
import re
import weakref
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class Op(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    ATOM = "atom"
    NOT = "!"
    AND = "&"
    OR = "|"
    NEXT = "X"
    UNTIL = "U"
    RELEASE = "R"
    FINALLY = "F"
    GLOBALLY = "G"


TEMPORAL = frozenset({Op.NEXT, Op.UNTIL, Op.RELEASE, Op.FINALLY, Op.GLOBALLY})
ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Formula:
    """Interned LTLf syntax tree node.

    Use the module-level constructors (:func:`Atom`, :func:`And`, ...)
    rather than instantiating this class directly.
    """

    __slots__ = ("op", "name", "children", "_hash", "__weakref__")
    _table: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()

    op: Op
    name: str | None
    children: tuple["Formula", ...]

    def __new__(cls, op: Op, children: tuple = (), name: str | None = None):
        key = (op, name, children)
        node = cls._table.get(key)
        if node is not None:
            return node
        node = object.__new__(cls)
        node.op = op
        node.name = name
        node.children = children
        node._hash = hash((op, name, tuple(id(c) for c in children)))
        cls._table[key] = node
        return node

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Formula, (self.op, self.children, self.name))

    def __repr__(self):
        return f"Formula({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    @property
    def is_temporal(self) -> bool:
        return self.op in TEMPORAL


TRUE = Formula(Op.TRUE)
FALSE = Formula(Op.FALSE)


def Atom(name: str) -> Formula:
    if not ATOM_RE.match(name) or name in _KEYWORDS:
        raise ValueError(f"invalid proposition name {name!r}")
    return Formula(Op.ATOM, (), name)


def Not(f: Formula) -> Formula:
    return Formula(Op.NOT, (f,))


def And(*fs: Formula) -> Formula:
    """n-ary conjunction; no flattening, ``And()`` is true, ``And(f)`` is f."""
    if not fs:
        return TRUE
    if len(fs) == 1:
        return fs[0]
    return Formula(Op.AND, tuple(fs))


def Or(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    if len(fs) == 1:
        return fs[0]
    return Formula(Op.OR, tuple(fs))


def Next(f: Formula) -> Formula:
    return Formula(Op.NEXT, (f,))


def Until(f: Formula, g: Formula) -> Formula:
    return Formula(Op.UNTIL, (f, g))


def Release(f: Formula, g: Formula) -> Formula:
    return Formula(Op.RELEASE, (f, g))


def Finally(f: Formula) -> Formula:
    return Formula(Op.FINALLY, (f,))


def Globally(f: Formula) -> Formula:
    return Formula(Op.GLOBALLY, (f,))


def Implies(f: Formula, g: Formula) -> Formula:
    return _flat(Op.OR, [Not(f), g])


def Iff(f: Formula, g: Formula) -> Formula:
    return And(_flat(Op.OR, [Not(f), g]), _flat(Op.OR, [f, Not(g)]))


def _flat(op: Op, items: Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    for item in items:
        if item.op is op:
            out.extend(item.children)
        else:
            out.append(item)
    return And(*out) if op is Op.AND else Or(*out)


# ---------------------------------------------------------------------------
# Parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


_KEYWORDS = {"true", "false", "X", "U", "R", "F", "G"}
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<op><->|->|[!&|()])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<bad>.)"
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind, value = m.lastgroup, m.group()
        col = m.start() - line_start + 1
        if kind == "bad":
            raise FormulaSyntaxError(f"unknown token {value!r}", line, col)
        if kind == "ident":
            if value == "R":
                raise FormulaSyntaxError("release operator 'R' is not accepted in input", line, col)
            kind = value if value in _KEYWORDS else "atom"
        elif kind == "op":
            kind = value
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex("\n") + 1
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            what = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise FormulaSyntaxError(f"expected {kind!r}, found {what}", tok.line, tok.column)
        return self.take()

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            msg = "unbalanced ')'" if tok.kind == ")" else f"unexpected {tok.text!r}"
            raise FormulaSyntaxError(msg, tok.line, tok.column)
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek().kind == "<->":
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek().kind == "->":
            self.take()
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        items = [self.conj()]
        while self.peek().kind == "|":
            self.take()
            items.append(self.conj())
        return _flat(Op.OR, items)

    def conj(self) -> Formula:
        items = [self.until()]
        while self.peek().kind == "&":
            self.take()
            items.append(self.until())
        return _flat(Op.AND, items)

    def until(self) -> Formula:
        f = self.unary()
        if self.peek().kind == "U":
            self.take()
            return Until(f, self.until())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind in ("!", "X", "F", "G"):
            self.take()
            arg = self.unary()
            return {"!": Not, "X": Next, "F": Finally, "G": Globally}[tok.kind](arg)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        if tok.kind == "true":
            return TRUE
        if tok.kind == "false":
            return FALSE
        if tok.kind == "atom":
            return Atom(tok.text)
        if tok.kind == "(":
            f = self.iff()
            close = self.peek()
            if close.kind != ")":
                raise FormulaSyntaxError("unbalanced '(': missing ')'", close.line, close.column)
            self.take()
            return f
        what = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise FormulaSyntaxError(f"expected an operand, found {what}", tok.line, tok.column)


def parse(text: str) -> Formula:
    """Parse the surface syntax into an interned formula.

    ``&`` and ``|`` chains are flattened to n-ary nodes; ``->`` and ``<->``
    are desugared into ``|``/``&`` over negations.

    >>> parse("a U b & G c") is And(Until(Atom("a"), Atom("b")), Globally(Atom("c")))
    True
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {
    Op.OR: 3, Op.AND: 4, Op.UNTIL: 5, Op.RELEASE: 5,
    Op.NOT: 6, Op.NEXT: 6, Op.FINALLY: 6, Op.GLOBALLY: 6,
}


def to_text(f: Formula) -> str:
    """Render ``f`` so that :func:`parse` gives back the same formula.

    Release has no input syntax, so formulas containing it print but do
    not reparse.
    """
    op = f.op
    if op is Op.TRUE:
        return "true"
    if op is Op.FALSE:
        return "false"
    if op is Op.ATOM:
        return f.name
    prec = _PREC[op]

    def sub(g: Formula, bound: int) -> str:
        s = to_text(g)
        return f"({s})" if _PREC.get(g.op, 9) <= bound else s

    if op in (Op.AND, Op.OR):
        return f" {op.value} ".join(sub(c, prec) for c in f.children)
    if op in (Op.UNTIL, Op.RELEASE):
        return f"{sub(f.children[0], prec)} {op.value} {sub(f.children[1], prec)}"
    arg = sub(f.children[0], 5)
    return f"{op.value}{arg}" if op is Op.NOT else f"{op.value} {arg}"


# ---------------------------------------------------------------------------
# Structural operations


def propositions(f: Formula) -> frozenset[str]:
    seen: dict[Formula, frozenset[str]] = {}

    def walk(g: Formula) -> frozenset[str]:
        r = seen.get(g)
        if r is None:
            if g.op is Op.ATOM:
                r = frozenset((g.name,))
            else:
                r = frozenset().union(*(walk(c) for c in g.children))
            seen[g] = r
        return r

    return walk(f)


def split_conjuncts(f: Formula) -> list[Formula]:
    """Top-level conjuncts of ``f``, flattening nested ``And`` at the root."""
    if f.op is not Op.AND:
        return [f]
    out: list[Formula] = []
    for c in f.children:
        out.extend(split_conjuncts(c))
    return out


def to_nnf(f: Formula) -> Formula:
    """Push negations down to atoms.

    A negated ``X`` is kept as ``Not(Next g)`` (with ``g`` normalized):
    there is no weak-next node, and progression handles the pair directly.
    """
    memo: dict[tuple[Formula, bool], Formula] = {}

    def go(g: Formula, neg: bool) -> Formula:
        key = (g, neg)
        if key in memo:
            return memo[key]
        op = g.op
        if op is Op.TRUE:
            r = FALSE if neg else TRUE
        elif op is Op.FALSE:
            r = TRUE if neg else FALSE
        elif op is Op.ATOM:
            r = Not(g) if neg else g
        elif op is Op.NOT:
            r = go(g.children[0], not neg)
        elif op in (Op.AND, Op.OR):
            kids = [go(c, neg) for c in g.children]
            flip = (op is Op.AND) == neg
            r = Or(*kids) if flip else And(*kids)
        elif op is Op.NEXT:
            inner = Next(go(g.children[0], False))
            r = Not(inner) if neg else inner
        elif op in (Op.UNTIL, Op.RELEASE):
            a, b = (go(c, neg) for c in g.children)
            r = Release(a, b) if (op is Op.UNTIL) == neg else Until(a, b)
        else:
            arg = go(g.children[0], neg)
            r = Globally(arg) if (op is Op.FINALLY) == neg else Finally(arg)
        memo[key] = r
        return r

    return go(f, False)


# ---------------------------------------------------------------------------
# Semantics


def evaluate(trace: Sequence[Iterable[str]], f: Formula) -> bool:
    """Truth of ``f`` at position 0 of a finite nonempty trace.

    Direct recursion over positions; ``X`` is strong (false at the last
    position).
    """
    letters = [frozenset(letter) for letter in trace]
    n = len(letters)
    if n == 0:
        raise ValueError("LTLf traces are nonempty")
    memo: dict[tuple[Formula, int], bool] = {}

    def holds(g: Formula, i: int) -> bool:
        key = (g, i)
        r = memo.get(key)
        if r is not None:
            return r
        op = g.op
        if op is Op.TRUE:
            r = True
        elif op is Op.FALSE:
            r = False
        elif op is Op.ATOM:
            r = g.name in letters[i]
        elif op is Op.NOT:
            r = not holds(g.children[0], i)
        elif op is Op.AND:
            r = all(holds(c, i) for c in g.children)
        elif op is Op.OR:
            r = any(holds(c, i) for c in g.children)
        elif op is Op.NEXT:
            r = i + 1 < n and holds(g.children[0], i + 1)
        elif op is Op.UNTIL:
            a, b = g.children
            r = False
            for j in range(i, n):
                if holds(b, j):
                    r = True
                    break
                if not holds(a, j):
                    break
        elif op is Op.RELEASE:
            a, b = g.children
            r = True
            for j in range(i, n):
                if not holds(b, j):
                    r = False
                    break
                if holds(a, j):
                    break
        elif op is Op.FINALLY:
            r = any(holds(g.children[0], j) for j in range(i, n))
        else:
            r = all(holds(g.children[0], j) for j in range(i, n))
        memo[key] = r
        return r

    return holds(f, 0)


def evaluate_batch(words: np.ndarray, f: Formula, support: Sequence[str]) -> np.ndarray:
    """Evaluate ``f`` on many equal-length words at once.

    ``words`` has shape ``(m, length)`` and holds letters as bitmasks over
    ``support`` (bit ``i`` set iff ``support[i]`` is true). Each subformula
    is evaluated at every position with a backward sweep, independently of
    any automaton. Returns a boolean vector of length ``m``.
    """
    words = np.asarray(words, dtype=np.int64)
    if words.ndim != 2 or words.shape[1] == 0:
        raise ValueError("words must be a nonempty (m, length) array")
    m, n = words.shape
    bit = {name: i for i, name in enumerate(support)}
    memo: dict[Formula, np.ndarray] = {}

    def val(g: Formula) -> np.ndarray:
        r = memo.get(g)
        if r is not None:
            return r
        op = g.op
        if op is Op.TRUE:
            r = np.ones((m, n), dtype=bool)
        elif op is Op.FALSE:
            r = np.zeros((m, n), dtype=bool)
        elif op is Op.ATOM:
            if g.name in bit:
                r = ((words >> bit[g.name]) & 1).astype(bool)
            else:
                r = np.zeros((m, n), dtype=bool)
        elif op is Op.NOT:
            r = ~val(g.children[0])
        elif op is Op.AND:
            r = np.logical_and.reduce([val(c) for c in g.children])
        elif op is Op.OR:
            r = np.logical_or.reduce([val(c) for c in g.children])
        elif op is Op.NEXT:
            r = np.zeros((m, n), dtype=bool)
            r[:, :-1] = val(g.children[0])[:, 1:]
        else:
            r = np.empty((m, n), dtype=bool)
            if op is Op.FINALLY:
                a = val(g.children[0])
                r[:, -1] = a[:, -1]
                for i in range(n - 2, -1, -1):
                    r[:, i] = a[:, i] | r[:, i + 1]
            elif op is Op.GLOBALLY:
                a = val(g.children[0])
                r[:, -1] = a[:, -1]
                for i in range(n - 2, -1, -1):
                    r[:, i] = a[:, i] & r[:, i + 1]
            elif op is Op.UNTIL:
                a, b = (val(c) for c in g.children)
                r[:, -1] = b[:, -1]
                for i in range(n - 2, -1, -1):
                    r[:, i] = b[:, i] | (a[:, i] & r[:, i + 1])
            else:
                a, b = (val(c) for c in g.children)
                r[:, -1] = b[:, -1]
                for i in range(n - 2, -1, -1):
                    r[:, i] = b[:, i] & (a[:, i] | r[:, i + 1])
        memo[g] = r
        return r

    return val(f)[:, 0].copy()


# ---------------------------------------------------------------------------
# Files


@dataclass(frozen=True)
class Partition:
    """Input/output split of the propositions of a synthesis problem."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self):
        clash = set(self.inputs) & set(self.outputs)
        if clash:
            raise ValueError(f"propositions both input and output: {sorted(clash)}")

    @property
    def names(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def check_covers(self, f: Formula) -> None:
        missing = propositions(f) - set(self.names)
        if missing:
            raise ValueError(f"propositions not in partition: {sorted(missing)}")

    def to_text(self) -> str:
        return f".inputs: {' '.join(self.inputs)}\n.outputs: {' '.join(self.outputs)}\n"


def parse_partition(text: str) -> Partition:
    fields: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep or key not in (".inputs", ".outputs"):
            raise ValueError(f"line {lineno}: expected '.inputs:' or '.outputs:'")
        if key in fields:
            raise ValueError(f"line {lineno}: duplicate {key}")
        names = tuple(rest.split())
        for name in names:
            if not ATOM_RE.match(name):
                raise ValueError(f"line {lineno}: invalid proposition name {name!r}")
        fields[key] = names
    if set(fields) != {".inputs", ".outputs"}:
        raise ValueError("partition needs both .inputs and .outputs lines")
    return Partition(fields[".inputs"], fields[".outputs"])


def read_formula(path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def read_partition(path) -> Partition:
    with open(path, encoding="utf-8") as fh:
        return parse_partition(fh.read())
