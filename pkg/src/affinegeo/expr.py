"""Closed-form coordinate expressions: parsing, serialization, evaluation.

The grammar is conventional infix arithmetic over declared coordinate
names, numeric literals, ``+ - * / ^``, unary negation and the functions
``sin cos tan exp log sqrt sinh cosh``.  Precedence, tightest first:
unary minus, ``^`` (right-associative), ``* /``, ``+ -``.  Note that
unary minus binds tighter than ``^``, so ``-x^2`` is ``(-x)^2``; write
``-(x^2)`` for the other reading.

Expressions evaluate over any scalar type supporting arithmetic and the
elementary functions -- plain floats or :class:`~affinegeo.jets.Jet` --
so every derived field is differentiable by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import jets
from .jets import DomainError, Jet, MAX_ORDER

__all__ = [
    "Expression", "Const", "Var", "Add", "Sub", "Mul", "Div", "Neg", "Pow", "Call",
    "ParseError", "UnknownIdentifier", "DomainError",
    "parse", "eval_jet", "evaluate", "var", "const",
    "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh",
]


class ParseError(ValueError):
    """Malformed expression text; ``offset`` is the byte position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifier(ParseError):
    """A name that is neither a declared coordinate nor a known function."""

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


# precedence levels used for minimal-parenthesis serialization
_ADD, _MUL, _POW, _UNARY, _ATOM = 1, 2, 3, 4, 5


class Expression:
    """Base class for AST nodes; supports operator-overloaded construction."""

    __slots__ = ()

    def eval(self, env):
        raise NotImplementedError

    def variables(self):
        out = set()
        self._collect_vars(out)
        return out

    def _collect_vars(self, out):
        pass

    def to_text(self):
        return self._render(_ADD)

    def __str__(self):
        return self.to_text()

    # -- construction sugar --------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, Expression):
            return x
        if isinstance(x, (int, float)):
            return Const(float(x))
        return NotImplemented

    def __add__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Add(self, o)

    def __radd__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Add(o, self)

    def __sub__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Sub(self, o)

    def __rsub__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Sub(o, self)

    def __mul__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Mul(self, o)

    def __rmul__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Mul(o, self)

    def __truediv__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Div(self, o)

    def __rtruediv__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Div(o, self)

    def __pow__(self, other):
        o = Expression._coerce(other)
        return NotImplemented if o is NotImplemented else Pow(self, o)

    def __neg__(self):
        return Neg(self)


@dataclass(frozen=True, eq=True)
class Const(Expression):
    value: float

    def eval(self, env):
        return self.value

    def _render(self, level):
        v = self.value
        if v < 0:
            return f"({_fmt(v)})"
        return _fmt(v)


def _fmt(v):
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


@dataclass(frozen=True, eq=True)
class Var(Expression):
    name: str

    def eval(self, env):
        return env[self.name]

    def _collect_vars(self, out):
        out.add(self.name)

    def _render(self, level):
        return self.name


class _Binary(Expression):
    __slots__ = ()

    def _collect_vars(self, out):
        self.left._collect_vars(out)
        self.right._collect_vars(out)

    def _render(self, level):
        text = self._render_infix()
        return f"({text})" if self._level < level else text


@dataclass(frozen=True, eq=True)
class Add(_Binary):
    left: Expression
    right: Expression
    _level = _ADD

    def eval(self, env):
        return self.left.eval(env) + self.right.eval(env)

    def _render_infix(self):
        return f"{self.left._render(_ADD)} + {self.right._render(_MUL)}"


@dataclass(frozen=True, eq=True)
class Sub(_Binary):
    left: Expression
    right: Expression
    _level = _ADD

    def eval(self, env):
        return self.left.eval(env) - self.right.eval(env)

    def _render_infix(self):
        return f"{self.left._render(_ADD)} - {self.right._render(_MUL)}"


@dataclass(frozen=True, eq=True)
class Mul(_Binary):
    left: Expression
    right: Expression
    _level = _MUL

    def eval(self, env):
        return self.left.eval(env) * self.right.eval(env)

    def _render_infix(self):
        return f"{self.left._render(_MUL)}*{self.right._render(_POW)}"


@dataclass(frozen=True, eq=True)
class Div(_Binary):
    left: Expression
    right: Expression
    _level = _MUL

    def eval(self, env):
        num = self.left.eval(env)
        den = self.right.eval(env)
        if jets.value_of(den) == 0.0:
            raise DomainError("division by zero")
        return num / den

    def _render_infix(self):
        return f"{self.left._render(_MUL)}/{self.right._render(_POW)}"


@dataclass(frozen=True, eq=True)
class Neg(Expression):
    operand: Expression
    _level = _UNARY

    def eval(self, env):
        return -self.operand.eval(env)

    def _collect_vars(self, out):
        self.operand._collect_vars(out)

    def _render(self, level):
        text = f"-{self.operand._render(_UNARY)}"
        return f"({text})" if self._level < level else text


@dataclass(frozen=True, eq=True)
class Pow(_Binary):
    left: Expression
    right: Expression
    _level = _POW

    def eval(self, env):
        e = _int_literal(self.right)
        base = self.left.eval(env)
        if e is not None:
            return jets._int_pow(base, e) if isinstance(base, Jet) else _float_int_pow(base, e)
        return jets.powr(base, self.right.eval(env))

    def _render_infix(self):
        # right-associative: the exponent may sit at the same level
        return f"{self.left._render(_UNARY)}^{self.right._render(_POW)}"


def _int_literal(e):
    if isinstance(e, Const) and float(e.value).is_integer():
        return int(e.value)
    if isinstance(e, Neg):
        inner = _int_literal(e.operand)
        return None if inner is None else -inner
    return None


def _float_int_pow(base, e):
    if e >= 0:
        return base ** e
    if base == 0.0:
        raise DomainError("division by zero")
    return base ** e


@dataclass(frozen=True, eq=True)
class Call(Expression):
    func: str
    arg: Expression
    _level = _ATOM

    def eval(self, env):
        return jets.FUNCTIONS[self.func](self.arg.eval(env))

    def _collect_vars(self, out):
        self.arg._collect_vars(out)

    def _render(self, level):
        return f"{self.func}({self.arg._render(_ADD)})"


# -- convenience constructors -------------------------------------------


def var(name):
    return Var(name)


def const(value):
    return Const(float(value))


def sin(e):
    return Call("sin", Expression._coerce(e))


def cos(e):
    return Call("cos", Expression._coerce(e))


def tan(e):
    return Call("tan", Expression._coerce(e))


def exp(e):
    return Call("exp", Expression._coerce(e))


def log(e):
    return Call("log", Expression._coerce(e))


def sqrt(e):
    return Call("sqrt", Expression._coerce(e))


def sinh(e):
    return Call("sinh", Expression._coerce(e))


def cosh(e):
    return Call("cosh", Expression._coerce(e))


# -- tokenizer ------------------------------------------------------------

_OPS = set("+-*/^()")


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8"))


def _tokenize(text):
    tokens = []  # (kind, value, char_index)
    i = 0
    m = len(text)
    while i < m:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < m and text[j].isdigit():
                j += 1
            if j < m and text[j] == ".":
                j += 1
                while j < m and text[j].isdigit():
                    j += 1
            if j < m and text[j] in "eE":
                k = j + 1
                if k < m and text[k] in "+-":
                    k += 1
                if k < m and text[k].isdigit():
                    j = k
                    while j < m and text[j].isdigit():
                        j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < m and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", _byte_offset(text, i))
    tokens.append(("end", "", m))
    return tokens


class _Parser:
    def __init__(self, text, coords):
        self.text = text
        self.coords = set(coords)
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos]

    def _advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _offset(self, tok):
        return _byte_offset(self.text, tok[2])

    def parse(self):
        node = self._expr()
        tok = self._peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", self._offset(tok))
        return node

    def _expr(self):
        node = self._term()
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] in "+-":
                self._advance()
                rhs = self._term()
                node = Add(node, rhs) if tok[1] == "+" else Sub(node, rhs)
            else:
                return node

    def _term(self):
        node = self._factor()
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] in "*/":
                self._advance()
                rhs = self._factor()
                node = Mul(node, rhs) if tok[1] == "*" else Div(node, rhs)
            else:
                return node

    def _factor(self):
        base = self._unary()
        tok = self._peek()
        if tok[0] == "op" and tok[1] == "^":
            self._advance()
            return Pow(base, self._factor())
        return base

    def _unary(self):
        tok = self._peek()
        if tok[0] == "op" and tok[1] == "-":
            self._advance()
            return Neg(self._unary())
        return self._atom()

    def _atom(self):
        tok = self._advance()
        kind, text, _ = tok
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            nxt = self._peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if text not in jets.FUNCTIONS:
                    raise UnknownIdentifier(text, self._offset(tok))
                self._advance()
                arg = self._expr()
                closing = self._advance()
                if closing[:2] != ("op", ")"):
                    raise ParseError("expected ')'", self._offset(closing))
                return Call(text, arg)
            if text not in self.coords:
                raise UnknownIdentifier(text, self._offset(tok))
            return Var(text)
        if (kind, text) == ("op", "("):
            node = self._expr()
            closing = self._advance()
            if closing[:2] != ("op", ")"):
                raise ParseError("expected ')'", self._offset(closing))
            return node
        raise ParseError(f"expected an operand, found {text!r}" if text else "unexpected end of input",
                         self._offset(tok))


def parse(text, coords):
    """Parse ``text`` against the declared coordinate names."""
    coords = list(coords)
    if not coords or len(set(coords)) != len(coords):
        raise ValueError("coordinate names must be nonempty and distinct")
    return _Parser(text, coords).parse()


def evaluate(e, env):
    """Evaluate an expression in an environment of name -> scalar."""
    return e.eval(env)


def eval_jet(e, point, order, coords):
    """Exact Taylor data of ``e`` at ``point`` up to ``order`` (<= 4)."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 0..{MAX_ORDER}")
    point = [float(c) for c in point]
    if len(point) != len(coords):
        raise ValueError("point dimension does not match coordinates")
    if not all(math.isfinite(c) for c in point):
        raise ValueError("point must be finite")
    seeds = jets.seed_point(point, order)
    env = dict(zip(coords, seeds))
    out = e.eval(env)
    if not isinstance(out, Jet):
        out = Jet.constant(out, len(point), order)
    return out
