"""A minimal smooth expression language: parser, printer, evaluator and exact
symbolic forward differentiation.

Expressions are trees over real constants, the scale variable ``eps``, spatial
variables ``x1`` .. ``x9``, the four arithmetic operations, integer powers and
a fixed set of C-infinity primitives.  The language is closed under
differentiation, so arbitrary mixed partials stay inside the language.
Evaluation is pure and deterministic; floating-point underflow to zero is
accepted silently, domain violations raise :class:`EvalError`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "cosh", "sinh", "tanh", "sqrt", "ln")

MAX_SPATIAL_VARS = 9
DEFAULT_MAX_MULTIINDEX_ORDER = 4

_MAX_INT_EXPONENT = 2**31

#: A point of R^d, given as a sequence of d reals.
Point = Sequence[float]


class ParseError(ValueError):
    """Raised for malformed input text; carries the 0-based text position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class EvalError(ArithmeticError):
    """Domain violation during evaluation, carrying the offending subexpression."""

    def __init__(self, reason, subexpr, eps=None, point=None, alpha=None):
        self.reason = reason
        self.subexpr = subexpr
        self.eps = eps
        self.point = point
        self.alpha = alpha
        parts = [reason, f"in '{to_text(subexpr)}'"]
        if eps is not None:
            parts.append(f"eps={eps!r}")
        if point is not None:
            parts.append(f"x={tuple(float(c) for c in point)!r}")
        if alpha is not None:
            parts.append(f"alpha={tuple(alpha)!r}")
        super().__init__("; ".join(parts))

    def with_context(self, eps=None, point=None, alpha=None) -> "EvalError":
        return EvalError(
            self.reason,
            self.subexpr,
            eps=self.eps if eps is None else eps,
            point=self.point if point is None else point,
            alpha=self.alpha if alpha is None else alpha,
        )


# ---------------------------------------------------------------------------
# AST


class Expr:
    """Base class of all expression nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True)
class IntPow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class MultiIndex:
    """A multi-index of partial-derivative orders, one entry per spatial axis."""

    orders: tuple

    def __post_init__(self):
        if any((not isinstance(o, int)) or o < 0 for o in self.orders):
            raise ValueError("multi-index orders must be non-negative integers")

    @property
    def total(self) -> int:
        return sum(self.orders)


def multi_index(orders, max_order: int = DEFAULT_MAX_MULTIINDEX_ORDER) -> MultiIndex:
    """Validated MultiIndex constructor; rejects total order above ``max_order``."""
    mi = MultiIndex(tuple(int(o) for o in orders))
    if mi.total > max_order:
        raise ValueError(f"multi-index total order {mi.total} exceeds maximum {max_order}")
    return mi


def spatial_index(name: str) -> int:
    """1-based axis of a spatial variable name, or 0 for 'eps'."""
    if name == "eps":
        return 0
    if len(name) == 2 and name[0] == "x" and name[1].isdigit() and name[1] != "0":
        return int(name[1])
    raise ValueError(f"not a variable name: {name!r}")


def variables(e: Expr) -> set:
    """Set of variable names referenced by ``e``."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Neg):
            stack.append(node.arg)
        elif isinstance(node, BinOp):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, IntPow):
            stack.append(node.base)
        elif isinstance(node, Call):
            stack.append(node.arg)
    return out


# ---------------------------------------------------------------------------
# Parser

_WHITESPACE = " \t\r\n"


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._scan()
        self.index = 0

    def _scan(self):
        text, n = self.text, len(self.text)
        i = 0
        while i < n:
            ch = text[i]
            if ch in _WHITESPACE:
                i += 1
                continue
            if ch in "+-*/^()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                if j < n and text[j] == ".":
                    j += 1
                    while j < n and text[j].isdigit():
                        j += 1
                if j < n and text[j] in "eE":
                    k = j + 1
                    if k < n and text[k] in "+-":
                        k += 1
                    if k < n and text[k].isdigit():
                        j = k
                        while j < n and text[j].isdigit():
                            j += 1
                self.tokens.append(("number", text[i:j], i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("ident", text[i:j], i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", "", n))

    def peek(self):
        return self.tokens[self.index]

    def next(self):
        tok = self.tokens[self.index]
        if tok[0] != "end":
            self.index += 1
        return tok


class _Parser:
    def __init__(self, text: str, dimension: int, extra_vars=()):
        if not 0 <= dimension <= MAX_SPATIAL_VARS:
            raise ValueError(f"dimension must be in 0..{MAX_SPATIAL_VARS}, got {dimension}")
        self.dimension = dimension
        self.extra_vars = frozenset(extra_vars)
        self.toks = _Tokens(text)

    def parse(self) -> Expr:
        e = self.expr()
        kind, value, pos = self.toks.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return e

    def expr(self) -> Expr:
        node = self.term()
        while self.toks.peek()[0] in "+-":
            op = self.toks.next()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.toks.peek()[0] in "*/":
            op = self.toks.next()[0]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.toks.peek()[0] == "-":
            self.toks.next()
            return Neg(self.factor())
        base = self.base()
        if self.toks.peek()[0] == "^":
            self.toks.next()
            exponent = self.factor()
            return self._power(base, exponent)
        return base

    @staticmethod
    def _power(base: Expr, exponent: Expr) -> Expr:
        lit = None
        if isinstance(exponent, Const):
            lit = exponent.value
        elif isinstance(exponent, Neg) and isinstance(exponent.arg, Const):
            lit = -exponent.arg.value
        if lit is not None and float(lit).is_integer() and abs(lit) < _MAX_INT_EXPONENT:
            return IntPow(base, int(lit))
        # a^b with non-integer-literal exponent means exp(b*ln(a))
        return Call("exp", BinOp("*", exponent, Call("ln", base)))

    def base(self) -> Expr:
        kind, value, pos = self.toks.next()
        if kind == "number":
            return Const(float(value))
        if kind == "(":
            e = self.expr()
            k2, v2, p2 = self.toks.next()
            if k2 != ")":
                raise ParseError("expected ')'", p2)
            return e
        if kind == "ident":
            if value in FUNCTIONS:
                k2, v2, p2 = self.toks.next()
                if k2 != "(":
                    raise ParseError(f"expected '(' after function {value!r}", p2)
                arg = self.expr()
                k3, v3, p3 = self.toks.next()
                if k3 != ")":
                    raise ParseError("expected ')'", p3)
                return Call(value, arg)
            if value == "eps" or value in self.extra_vars:
                return Var(value)
            try:
                idx = spatial_index(value)
            except ValueError:
                raise ParseError(f"unknown identifier {value!r}", pos) from None
            if idx > self.dimension:
                raise ParseError(
                    f"variable {value!r} exceeds dimension {self.dimension}", pos
                )
            return Var(value)
        raise ParseError(f"unexpected token {value!r}" if value else "unexpected end of input", pos)


def parse(text: str, dimension: int, extra_vars=()) -> Expr:
    """Parse ``text`` into an expression over eps and x1..x{dimension}.

    Powers ``a^b`` keep an exact integer-power node when ``b`` is an integer
    literal and desugar to ``exp(b*ln(a))`` otherwise.
    """
    return _Parser(text, dimension, extra_vars).parse()


# ---------------------------------------------------------------------------
# Printer

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_POW = 3
_PREC_ATOM = 4


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, IntPow):
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_ATOM  # printed as a prefix that re-parses at factor level
    return _PREC_ATOM


def format_const(value: float) -> str:
    if value != value or value in (math.inf, -math.inf):
        raise ValueError(f"non-finite constant {value!r} is not printable")
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def to_text(e: Expr) -> str:
    """Render an expression; the output re-parses to a structurally equal tree."""
    return _fmt(e, 0)


def _fmt(e: Expr, min_prec: int) -> str:
    if isinstance(e, Const):
        s = format_const(e.value)
        if e.value < 0 and min_prec >= _PREC_POW:
            return "(" + s + ")"
        return s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({_fmt(e.arg, 0)})"
    if isinstance(e, Neg):
        inner = e.arg
        if isinstance(inner, (BinOp,)):
            s = "-(" + _fmt(inner, 0) + ")"
        else:
            s = "-" + _fmt(inner, _PREC_POW)
        if min_prec >= _PREC_POW:
            return "(" + s + ")"
        return s
    if isinstance(e, IntPow):
        if _prec(e.base) < _PREC_ATOM:
            base = "(" + _fmt(e.base, 0) + ")"
        else:
            # Neg and negative constants self-parenthesize at this context
            base = _fmt(e.base, _PREC_ATOM)
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        s = f"{base}^{exp}"
        if min_prec > _PREC_POW:
            return "(" + s + ")"
        return s
    if isinstance(e, BinOp):
        p = _prec(e)
        left = _fmt(e.left, p)
        right = _fmt(e.right, p + 1)
        s = f"{left}{e.op}{right}"
        if p < min_prec:
            return "(" + s + ")"
        return s
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation

_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "cosh": np.cosh,
    "sinh": np.sinh,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
    "ln": np.log,
}


def eval_points(e: Expr, eps: float, points) -> np.ndarray:
    """Evaluate ``e`` at every row of ``points`` (shape (n, d)) for a fixed eps.

    Overflow yields IEEE infinities, underflow yields 0; genuine domain
    violations (sqrt of a negative, ln of a non-positive, division by zero)
    raise :class:`EvalError` with a witness point.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must be a 2-d array of shape (n, d)")
    with np.errstate(all="ignore"):
        return _ev(e, float(eps), X)


def evaluate(e: Expr, eps: float, x: Point = ()) -> float:
    """Evaluate ``e`` at a single point; same semantics as :func:`eval_points`."""
    X = np.asarray([tuple(x)], dtype=float).reshape(1, len(tuple(x)))
    return float(eval_points(e, eps, X)[0])


def _witness(X: np.ndarray, bad: np.ndarray):
    i = int(np.argmax(bad))
    return X[i] if X.shape[1] else ()


def _ev(e: Expr, eps: float, X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    if isinstance(e, Const):
        return np.full(n, e.value)
    if isinstance(e, Var):
        if e.name == "eps":
            return np.full(n, eps)
        idx = spatial_index(e.name)
        if idx > X.shape[1]:
            raise EvalError(
                f"variable {e.name} undefined in dimension {X.shape[1]}", e, eps=eps
            )
        return X[:, idx - 1]
    if isinstance(e, Neg):
        return -_ev(e.arg, eps, X)
    if isinstance(e, BinOp):
        a = _ev(e.left, eps, X)
        b = _ev(e.right, eps, X)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        bad = b == 0.0
        if bad.any():
            raise EvalError("division by zero", e, eps=eps, point=_witness(X, bad))
        return a / b
    if isinstance(e, IntPow):
        v = _ev(e.base, eps, X)
        if e.exponent < 0:
            bad = v == 0.0
            if bad.any():
                raise EvalError(
                    "zero base with negative exponent", e, eps=eps, point=_witness(X, bad)
                )
        return np.power(v, e.exponent)
    if isinstance(e, Call):
        v = _ev(e.arg, eps, X)
        if e.fn == "sqrt":
            bad = v < 0.0
            if bad.any():
                raise EvalError("sqrt of negative value", e, eps=eps, point=_witness(X, bad))
        elif e.fn == "ln":
            bad = v <= 0.0
            if bad.any():
                raise EvalError("ln of non-positive value", e, eps=eps, point=_witness(X, bad))
        return _UNARY[e.fn](v)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Folding constructors (constant folding only; used when building derivatives
# and substitutions, never by the parser)


def _fold_unary(fn: str, value: float):
    with np.errstate(all="ignore"):
        if fn == "sqrt" and value < 0:
            return None
        if fn == "ln" and value <= 0:
            return None
        out = float(_UNARY[fn](value))
    return out


def c_add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if isinstance(a, Const) and a.value == 0.0:
        return b
    if isinstance(b, Const) and b.value == 0.0:
        return a
    return BinOp("+", a, b)


def c_sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if isinstance(b, Const) and b.value == 0.0:
        return a
    if isinstance(a, Const) and a.value == 0.0:
        return c_neg(b)
    return BinOp("-", a, b)


def c_mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if isinstance(a, Const):
        if a.value == 0.0:
            return Const(0.0)
        if a.value == 1.0:
            return b
    if isinstance(b, Const):
        if b.value == 0.0:
            return Const(0.0)
        if b.value == 1.0:
            return a
    return BinOp("*", a, b)


def c_div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const) and b.value != 0.0:
        if isinstance(a, Const):
            return Const(a.value / b.value)
        if b.value == 1.0:
            return a
    if isinstance(a, Const) and a.value == 0.0 and not (isinstance(b, Const) and b.value == 0.0):
        return Const(0.0)
    return BinOp("/", a, b)


def c_neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def c_intpow(a: Expr, n: int) -> Expr:
    if n == 0:
        return Const(1.0)
    if n == 1:
        return a
    if isinstance(a, Const) and not (a.value == 0.0 and n < 0):
        with np.errstate(all="ignore"):
            return Const(float(np.power(a.value, n)))
    return IntPow(a, n)


def c_call(fn: str, a: Expr) -> Expr:
    if isinstance(a, Const):
        folded = _fold_unary(fn, a.value)
        if folded is not None and math.isfinite(folded):
            return Const(folded)
    return Call(fn, a)


# ---------------------------------------------------------------------------
# Differentiation


def _var_name(var) -> str:
    if isinstance(var, Var):
        return var.name
    if isinstance(var, int):
        if not 1 <= var <= MAX_SPATIAL_VARS:
            raise ValueError(f"spatial variable index must be in 1..{MAX_SPATIAL_VARS}")
        return f"x{var}"
    if isinstance(var, str):
        spatial_index(var)  # validates
        return var
    raise TypeError(f"not a variable: {var!r}")


def partial(e: Expr, var) -> Expr:
    """Exact symbolic partial derivative with respect to a spatial variable
    (1-based index or name) or ``"eps"``."""
    return _d(e, _var_name(var))


def _d(e: Expr, v: str) -> Expr:
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.name == v else 0.0)
    if isinstance(e, Neg):
        return c_neg(_d(e.arg, v))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = _d(a, v), _d(b, v)
        if e.op == "+":
            return c_add(da, db)
        if e.op == "-":
            return c_sub(da, db)
        if e.op == "*":
            return c_add(c_mul(da, b), c_mul(a, db))
        return c_div(c_sub(c_mul(da, b), c_mul(a, db)), c_intpow(b, 2))
    if isinstance(e, IntPow):
        du = _d(e.base, v)
        return c_mul(c_mul(Const(float(e.exponent)), c_intpow(e.base, e.exponent - 1)), du)
    if isinstance(e, Call):
        u = e.arg
        du = _d(u, v)
        if e.fn == "sin":
            return c_mul(c_call("cos", u), du)
        if e.fn == "cos":
            return c_neg(c_mul(c_call("sin", u), du))
        if e.fn == "exp":
            return c_mul(c_call("exp", u), du)
        if e.fn == "cosh":
            return c_mul(c_call("sinh", u), du)
        if e.fn == "sinh":
            return c_mul(c_call("cosh", u), du)
        if e.fn == "tanh":
            return c_mul(c_sub(Const(1.0), c_intpow(c_call("tanh", u), 2)), du)
        if e.fn == "sqrt":
            return c_div(du, c_mul(Const(2.0), c_call("sqrt", u)))
        if e.fn == "ln":
            return c_div(du, u)
    raise TypeError(f"not an expression node: {e!r}")


def partial_multi(e: Expr, alpha) -> Expr:
    """Apply ``partial`` along each spatial axis the number of times given by
    the multi-index ``alpha``."""
    orders = alpha.orders if isinstance(alpha, MultiIndex) else tuple(alpha)
    out = e
    for axis, order in enumerate(orders, start=1):
        for _ in range(order):
            out = _d(out, f"x{axis}")
    return out


# ---------------------------------------------------------------------------
# Substitution


def subst(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, rebuilding with constant folding."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Neg):
        return c_neg(subst(e.arg, mapping))
    if isinstance(e, BinOp):
        a = subst(e.left, mapping)
        b = subst(e.right, mapping)
        return {"+": c_add, "-": c_sub, "*": c_mul, "/": c_div}[e.op](a, b)
    if isinstance(e, IntPow):
        return c_intpow(subst(e.base, mapping), e.exponent)
    if isinstance(e, Call):
        return c_call(e.fn, subst(e.arg, mapping))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Random expressions (test corpus generation)

_LEAF_WEIGHTS = (("const", 2), ("var", 5))
_NODE_WEIGHTS = (
    ("+", 5),
    ("-", 4),
    ("*", 5),
    ("/", 2),
    ("neg", 2),
    ("pow", 3),
    ("sin", 3),
    ("cos", 3),
    ("exp", 1),
    ("cosh", 1),
    ("sinh", 1),
    ("tanh", 2),
    ("sqrt", 1),
    ("ln", 1),
)


def _weighted_choice(rng: random.Random, pairs):
    total = sum(w for _, w in pairs)
    r = rng.uniform(0, total)
    acc = 0.0
    for item, w in pairs:
        acc += w
        if r <= acc:
            return item
    return pairs[-1][0]


def random_expr(rng: random.Random, dimension: int, max_depth: int = 5, allow_eps: bool = True) -> Expr:
    """Draw a random expression from the grammar, biased toward smooth,
    well-conditioned shapes.  Deterministic for a given ``rng`` state."""
    if max_depth <= 0:
        kind = _weighted_choice(rng, _LEAF_WEIGHTS)
        if kind == "const" or dimension == 0 and not allow_eps:
            return Const(round(rng.uniform(-3.0, 3.0), 3))
        names = [f"x{i}" for i in range(1, dimension + 1)]
        if allow_eps:
            names.append("eps")
        if not names:
            return Const(round(rng.uniform(-3.0, 3.0), 3))
        return Var(rng.choice(names))
    kind = _weighted_choice(rng, _NODE_WEIGHTS)
    sub = lambda: random_expr(rng, dimension, max_depth - 1, allow_eps)  # noqa: E731
    if kind in "+-*/":
        return BinOp(kind, sub(), sub())
    if kind == "neg":
        return Neg(sub())
    if kind == "pow":
        return IntPow(sub(), rng.randint(2, 4))
    if kind in ("sqrt", "ln"):
        # keep the argument strictly positive so the draw stays inside the domain
        inner = BinOp("+", Const(round(rng.uniform(0.5, 2.0), 3)), IntPow(sub(), 2))
        return Call(kind, inner)
    return Call(kind, sub())
