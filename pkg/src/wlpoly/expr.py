"""Weighted lattice polynomial expressions.

An expression is a tree of variables ``x1..xn``, finite constants, and n-ary
``min``/``max`` nodes over a closed interval ``[a, b]`` of the extended reals.
Besides parsing and evaluation this module computes the vertex table
``alpha[S] = p(e_S)`` (the canonical nondecreasing disjunctive coefficients),
pins variables to constants, and splits an expression around one variable
into the triple whose median reproduces it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .exceptions import ArityError, LatticeBoundsError, WlpError, WlpSyntaxError

__all__ = [
    "DEFAULT_MAX_ARITY",
    "LatticeInterval",
    "UNIT_INTERVAL",
    "WlpExpr",
    "Var",
    "Const",
    "Meet",
    "Join",
    "meet",
    "join",
    "parse",
    "evaluate",
    "VertexTable",
    "vertex_table",
    "pin",
    "median_decompose",
]

DEFAULT_MAX_ARITY = 20


@dataclass(frozen=True)
class LatticeInterval:
    """Closed interval ``[a, b]`` with ``a < b``; either end may be infinite."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if math.isnan(a) or math.isnan(b) or not a < b:
            raise WlpError(f"lattice interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.a) & (x <= self.b)))

    def __iter__(self):
        yield self.a
        yield self.b


UNIT_INTERVAL = LatticeInterval(0.0, 1.0)


class WlpExpr:
    """Base class for expression nodes. Nodes are immutable and hashable."""

    def arity(self) -> int:
        return max(self.variables(), default=0)

    def variables(self) -> frozenset:
        raise NotImplementedError

    def constants(self) -> tuple:
        raise NotImplementedError

    def _eval(self, cols):
        raise NotImplementedError

    def __call__(self, x):
        return evaluate(self, x)

    def __and__(self, other):
        return meet(self, other)

    def __or__(self, other):
        return join(self, other)


@dataclass(frozen=True)
class Var(WlpExpr):
    index: int

    def __post_init__(self):
        if isinstance(self.index, bool) or int(self.index) != self.index or self.index < 1:
            raise WlpError(f"variable index must be a positive integer, got {self.index!r}")

    def variables(self):
        return frozenset((self.index,))

    def constants(self):
        return ()

    def _eval(self, cols):
        return cols[self.index - 1]

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Const(WlpExpr):
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise WlpError(f"constants must be finite, got {self.value!r}")
        object.__setattr__(self, "value", v)

    def variables(self):
        return frozenset()

    def constants(self):
        return (self.value,)

    def _eval(self, cols):
        return self.value

    def __str__(self):
        return repr(self.value) if self.value != int(self.value) else str(int(self.value))


@dataclass(frozen=True)
class _Lattice(WlpExpr):
    children: tuple

    _name = ""
    _op = None

    def __post_init__(self):
        kids = tuple(self.children)
        if len(kids) < 2:
            raise WlpError(f"{self._name} needs at least two operands")
        if not all(isinstance(c, WlpExpr) for c in kids):
            raise WlpError(f"{self._name} operands must be expressions")
        object.__setattr__(self, "children", kids)

    def variables(self):
        return frozenset().union(*(c.variables() for c in self.children))

    def constants(self):
        return tuple(v for c in self.children for v in c.constants())

    def _eval(self, cols):
        return reduce(self._op, (c._eval(cols) for c in self.children))

    def __str__(self):
        return f"{self._name}({','.join(str(c) for c in self.children)})"


class Meet(_Lattice):
    _name = "min"
    _op = staticmethod(np.minimum)


class Join(_Lattice):
    _name = "max"
    _op = staticmethod(np.maximum)


def _combine(cls, operands):
    kids = []
    for op in operands:
        if isinstance(op, (int, float)):
            op = Const(op)
        if isinstance(op, cls):
            kids.extend(op.children)
        else:
            kids.append(op)
    return kids[0] if len(kids) == 1 else cls(tuple(kids))


def meet(*operands) -> WlpExpr:
    """Flattened ``min`` of the operands (numbers become constants)."""
    return _combine(Meet, operands)


def join(*operands) -> WlpExpr:
    """Flattened ``max`` of the operands (numbers become constants)."""
    return _combine(Join, operands)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<func>min|max)\s*\(
  | (?P<var>x\d+)
  | (?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<op>[&|,()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise WlpSyntaxError("unexpected character", pos, text[pos])
        kind = m.lastgroup
        if kind != "ws":
            value = m.group("func") if kind == "func" else m.group(kind)
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr := term {"|" term}; term := atom {"&" atom};
    # atom := min(expr,...) | max(expr,...) | var | number | (expr)

    def __init__(self, text, lattice):
        self.tokens = _tokenize(text)
        self.i = 0
        self.lattice = lattice

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.advance()
        if val != value or kind == "end":
            raise WlpSyntaxError(f"expected {value!r}", pos, val)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise WlpSyntaxError("unexpected trailing input", pos, val)
        return node

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] == "|" and self.peek()[0] == "op":
            self.advance()
            terms.append(self.term())
        return join(*terms)

    def term(self):
        atoms = [self.atom()]
        while self.peek()[1] == "&" and self.peek()[0] == "op":
            self.advance()
            atoms.append(self.atom())
        return meet(*atoms)

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "func":
            args = [self.expr()]
            while self.peek()[1] == ",":
                self.advance()
                args.append(self.expr())
            self.expect(")")
            if len(args) == 1:
                return args[0]
            return meet(*args) if val == "min" else join(*args)
        if kind == "var":
            index = int(val[1:])
            if index < 1:
                raise WlpSyntaxError("variable indices start at 1", pos, val)
            return Var(index)
        if kind == "number":
            value = float(val)
            if not (self.lattice.a <= value <= self.lattice.b):
                raise LatticeBoundsError(
                    f"constant {value} at position {pos} lies outside "
                    f"[{self.lattice.a}, {self.lattice.b}]"
                )
            return Const(value)
        if val == "(" and kind == "op":
            node = self.expr()
            self.expect(")")
            return node
        raise WlpSyntaxError("expected an operand", pos, val or "<end>")


def parse(text: str, lattice: LatticeInterval = UNIT_INTERVAL) -> WlpExpr:
    """Parse ``text`` into an expression tree.

    Both the function form ``max(min(x1,x2),x3)`` and the infix form
    ``x1 & x2 | x3`` are accepted (``&`` is min and binds tighter than ``|``).
    """
    return _Parser(text, lattice).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _columns(x, n, lattice):
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2):
        raise WlpError("point must be a vector or a 2-d array of row vectors")
    if x.shape[-1] < n:
        raise ArityError(f"expression uses {n} variables, point has {x.shape[-1]}")
    if lattice is not None and not lattice.contains(x):
        raise LatticeBoundsError(f"point lies outside [{lattice.a}, {lattice.b}]")
    return [x[..., i] for i in range(x.shape[-1])]


def evaluate(expr: WlpExpr, x, lattice: LatticeInterval | None = None):
    """Evaluate ``expr`` at a point, or row-wise on a 2-d array of points."""
    x = np.asarray(x, dtype=float)
    out = expr._eval(_columns(x, expr.arity(), lattice))
    if x.ndim == 1:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), x.shape[:1]).copy()


# ---------------------------------------------------------------------------
# Vertex table
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VertexTable:
    """Values ``alpha[S] = p(e_S)`` for every subset bitmask ``S`` of ``[n]``.

    Bit ``i-1`` of a mask set means variable ``i`` is in the subset. The
    conjunctive coefficients are ``beta[S] = alpha[~S]``.
    """

    n: int
    alpha: np.ndarray
    lattice: LatticeInterval

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        if alpha.shape != (1 << self.n,):
            raise WlpError(f"vertex table for n={self.n} needs {1 << self.n} entries")
        if np.isnan(alpha).any() or not self.lattice.contains(alpha):
            raise LatticeBoundsError("vertex table values must lie in the lattice")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def beta(self) -> np.ndarray:
        return self.alpha[self.full ^ np.arange(1 << self.n)]

    def is_monotone(self) -> bool:
        masks = np.arange(1 << self.n)
        for i in range(self.n):
            lower = masks[(masks >> i) & 1 == 0]
            if np.any(self.alpha[lower] > self.alpha[lower | (1 << i)]):
                return False
        return True

    def is_lattice_polynomial(self) -> bool:
        """True when the table only takes endpoint values (no effective constants)."""
        a, b = self.lattice
        return bool(np.all((self.alpha == a) | (self.alpha == b)) and self.alpha[0] == a)

    def evaluate(self, x):
        """Disjunctive normal form: max over S of min(alpha[S], min_{i in S} x_i)."""
        x = np.asarray(x, dtype=float)
        cols = _columns(x, self.n, None)
        mins = [np.full(x.shape[:-1], np.inf)]
        for i in range(self.n):
            mins = mins + [np.minimum(m, cols[i]) for m in mins]
        out = reduce(np.maximum, (np.minimum(a, m) for a, m in zip(self.alpha, mins)))
        return float(out) if x.ndim == 1 else out

    def __eq__(self, other):
        return (
            isinstance(other, VertexTable)
            and self.n == other.n
            and self.lattice == other.lattice
            and np.array_equal(self.alpha, other.alpha)
        )

    __hash__ = None


def vertex_table(
    expr: WlpExpr,
    lattice: LatticeInterval = UNIT_INTERVAL,
    n: int | None = None,
    max_arity: int = DEFAULT_MAX_ARITY,
) -> VertexTable:
    """Evaluate ``expr`` at every characteristic vector ``e_S`` in ``{a, b}^n``.

    ``n`` defaults to the expression's arity; a larger ``n`` adds variables
    the expression ignores.
    """
    arity = expr.arity()
    n = arity if n is None else n
    if n < arity:
        raise ArityError(f"n={n} is smaller than the expression arity {arity}")
    if n > max_arity:
        raise ArityError(f"arity {n} exceeds the cap of {max_arity} (2^n subsets)")
    for c in expr.constants():
        if not lattice.a <= c <= lattice.b:
            raise LatticeBoundsError(f"constant {c} lies outside the lattice")
    a, b = lattice
    alpha = np.empty(1 << n)
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n))
        cols = [np.where((masks >> i) & 1, b, a) for i in range(n)]
        alpha[masks] = np.broadcast_to(expr._eval(cols), masks.shape)
    return VertexTable(n, alpha, lattice)


# ---------------------------------------------------------------------------
# Structural transforms
# ---------------------------------------------------------------------------


def _substitute(expr, values):
    if isinstance(expr, Var):
        return Const(values[expr.index]) if expr.index in values else expr
    if isinstance(expr, Const):
        return expr
    kids = [_substitute(c, values) for c in expr.children]
    consts = [k.value for k in kids if isinstance(k, Const)]
    rest = [k for k in kids if not isinstance(k, Const)]
    if consts:
        folded = min(consts) if isinstance(expr, Meet) else max(consts)
        rest.append(Const(folded))
    return meet(*rest) if isinstance(expr, Meet) else join(*rest)


def pin(
    expr: WlpExpr,
    assignments: Mapping[int, float],
    lattice: LatticeInterval = UNIT_INTERVAL,
) -> WlpExpr:
    """Replace variables by constants, e.g. ``pin(p, {3: 0.2})``.

    Remaining variables keep their original indices.
    """
    arity = expr.arity()
    values = {}
    for k, c in assignments.items():
        if not 1 <= k <= arity:
            raise ArityError(f"cannot pin x{k}: expression has arity {arity}")
        c = float(c)
        if not math.isfinite(c) or not lattice.a <= c <= lattice.b:
            raise LatticeBoundsError(f"pinned value {c} lies outside the lattice")
        values[k] = c
    return _substitute(expr, values)


def median_decompose(
    expr: WlpExpr,
    k: int,
    x: Sequence[float],
    lattice: LatticeInterval = UNIT_INTERVAL,
) -> tuple[float, float, float]:
    """Return ``(p(x | x_k=a), x_k, p(x | x_k=b))``; their median is ``p(x)``."""
    x = np.array(x, dtype=float)
    n = max(expr.arity(), k)
    if x.ndim != 1 or len(x) < n:
        raise ArityError(f"point needs at least {n} coordinates")
    if not lattice.contains(x):
        raise LatticeBoundsError("point lies outside the lattice")
    lo, hi = x.copy(), x.copy()
    lo[k - 1], hi[k - 1] = lattice.a, lattice.b
    return evaluate(expr, lo), float(x[k - 1]), evaluate(expr, hi)

