"""Forward-mode truncated Taylor (jet) arithmetic with dense symmetric storage.

A :class:`Jet` carries the value of a scalar quantity at a chart point
together with all of its partial derivatives up to a fixed order (at most
4) over an ``n``-dimensional chart.  Arithmetic on jets is the truncated
Taylor algebra, so every quantity assembled from jets carries exact
derivative information (up to rounding) -- no finite differencing is
involved anywhere in the evaluation path.

All geometry in this package is written against "scalars" that support
``+ - * /`` and the elementary functions below; plain floats and jets are
interchangeable.  The module-level functions (:func:`sin`, :func:`exp`,
...) dispatch on both.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 4


class DomainError(ArithmeticError):
    """Evaluation left the domain of an elementary function (log/sqrt of a
    nonpositive value, division by zero)."""


_zeros_cache: dict[tuple[int, int], np.ndarray] = {}


def _zeros(n: int, rank: int) -> np.ndarray:
    key = (n, rank)
    arr = _zeros_cache.get(key)
    if arr is None:
        arr = np.zeros((n,) * rank)
        arr.setflags(write=False)
        _zeros_cache[key] = arr
    return arr


def _sym_pair_single(pair: np.ndarray, single: np.ndarray) -> np.ndarray:
    # sum over the 3 placements of the rank-1 factor; `pair` must be symmetric
    full = np.multiply.outer(pair, single)
    return full + np.moveaxis(full, 2, 0) + np.moveaxis(full, 2, 1)


def _sym_triple_single(triple: np.ndarray, single: np.ndarray) -> np.ndarray:
    full = np.multiply.outer(triple, single)
    out = full.copy()
    for dest in range(3):
        out += np.moveaxis(full, 3, dest)
    return out


def _sym_pair_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # all 6 ways to hand two of the four slots to `a`; both args symmetric
    full = np.multiply.outer(a, b)
    out = np.zeros(full.shape)
    for i in range(3):
        for j in range(i + 1, 4):
            out += np.moveaxis(full, (0, 1), (i, j))
    return out


class Jet:
    """Value plus symmetric partial-derivative tensors of ranks 1..order.

    ``is_const`` marks jets whose derivative tensors are exactly zero; it
    enables exact fast paths (a constant jet multiplies as a scalar, its
    partial is the zero jet) and is conservative: ``False`` only means
    "not known constant"."""

    __slots__ = ("n", "order", "value", "parts", "is_const")

    def __init__(self, n, order, value, parts, is_const=False):
        self.n = n
        self.order = order
        self.value = value
        self.parts = parts  # tuple of ndarrays, parts[r-1] has shape (n,)*r
        self.is_const = is_const

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(c, n, order):
        return Jet(n, order, float(c), tuple(_zeros(n, r) for r in range(1, order + 1)),
                   is_const=True)

    @staticmethod
    def variable(value, index, n, order):
        """Seed jet for the ``index``-th chart coordinate."""
        if order == 0:
            return Jet(n, 0, float(value), (), is_const=True)
        p1 = np.zeros(n)
        p1[index] = 1.0
        p1.setflags(write=False)
        parts = (p1,) + tuple(_zeros(n, r) for r in range(2, order + 1))
        return Jet(n, order, float(value), parts)

    # -- structural helpers -------------------------------------------

    def truncate(self, order):
        if order >= self.order:
            return self
        return Jet(self.n, order, self.value, self.parts[:order], self.is_const)

    def partial(self, i):
        """Jet of the i-th partial derivative (order drops by one)."""
        if self.order < 1:
            raise ValueError("cannot take a partial of an order-0 jet")
        if self.is_const:
            return Jet.constant(0.0, self.n, self.order - 1)
        parts = tuple(p[i] for p in self.parts[1:])
        return Jet(self.n, self.order - 1, float(self.parts[0][i]), parts)

    def gradient(self):
        """First-derivative vector as plain floats."""
        if self.order < 1:
            raise ValueError("order-0 jet has no gradient")
        return np.array(self.parts[0])

    def __repr__(self):
        return f"Jet(value={self.value!r}, order={self.order}, n={self.n})"

    # -- ring operations ----------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jets over different chart dimensions")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return None  # handled by the scalar fast paths
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.n, self.order, self.value + float(other), self.parts,
                       self.is_const)
        k = min(self.order, o.order)
        if self.is_const:
            out = o.truncate(k)
            return Jet(out.n, k, self.value + out.value, out.parts, out.is_const)
        if o.is_const:
            out = self.truncate(k)
            return Jet(out.n, k, out.value + o.value, out.parts, out.is_const)
        parts = tuple(self.parts[r] + o.parts[r] for r in range(k))
        return Jet(self.n, k, self.value + o.value, parts)

    __radd__ = __add__

    def __neg__(self):
        if self.is_const:
            return Jet(self.n, self.order, -self.value, self.parts, True)
        return Jet(self.n, self.order, -self.value, tuple(-p for p in self.parts))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.n, self.order, self.value - float(other), self.parts,
                       self.is_const)
        k = min(self.order, o.order)
        if o.is_const:
            out = self.truncate(k)
            return Jet(out.n, k, out.value - o.value, out.parts, out.is_const)
        if self.is_const:
            out = (-o).truncate(k)
            return Jet(out.n, k, self.value + out.value, out.parts, False)
        parts = tuple(self.parts[r] - o.parts[r] for r in range(k))
        return Jet(self.n, k, self.value - o.value, parts)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = float(other)
            if self.is_const:
                return Jet(self.n, self.order, self.value * c, self.parts, True)
            return Jet(self.n, self.order, self.value * c, tuple(p * c for p in self.parts))
        k = min(self.order, o.order)
        if self.is_const:
            if self.value == 0.0:
                return Jet.constant(0.0, self.n, k)
            return (o * self.value).truncate(k)
        if o.is_const:
            if o.value == 0.0:
                return Jet.constant(0.0, self.n, k)
            return (self * o.value).truncate(k)
        av, bv = self.value, o.value
        ap, bp = self.parts, o.parts
        parts = []
        if k >= 1:
            parts.append(av * bp[0] + bv * ap[0])
        if k >= 2:
            parts.append(av * bp[1] + bv * ap[1]
                         + np.multiply.outer(ap[0], bp[0])
                         + np.multiply.outer(bp[0], ap[0]))
        if k >= 3:
            parts.append(av * bp[2] + bv * ap[2]
                         + _sym_pair_single(ap[1], bp[0])
                         + _sym_pair_single(bp[1], ap[0]))
        if k >= 4:
            parts.append(av * bp[3] + bv * ap[3]
                         + _sym_triple_single(ap[2], bp[0])
                         + _sym_triple_single(bp[2], ap[0])
                         + _sym_pair_pair(ap[1], bp[1]))
        return Jet(self.n, k, av * bv, tuple(parts))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = float(other)
            if c == 0.0:
                raise DomainError("division by zero")
            return self * (1.0 / c)
        return self * _recip_jet(o)

    def __rtruediv__(self, other):
        return _recip_jet(self) * float(other)

    def __pow__(self, exponent):
        if isinstance(exponent, (int, np.integer)):
            return _int_pow(self, int(exponent))
        if isinstance(exponent, float) and exponent.is_integer():
            return _int_pow(self, int(exponent))
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        return powr(self, exponent)

    def __rpow__(self, base):
        return exp(self * log(base))

    # -- composition with a univariate function ------------------------

    def compose(self, derivs):
        """Chain rule: ``h(self)`` given ``derivs = [h(u), h'(u), ...]`` at
        ``u = self.value``, with at least ``order + 1`` entries."""
        if self.is_const:
            return Jet(self.n, self.order, derivs[0], self.parts, True)
        k = self.order
        u = self.parts
        parts = []
        if k >= 1:
            parts.append(derivs[1] * u[0])
        if k >= 2:
            parts.append(derivs[1] * u[1] + derivs[2] * np.multiply.outer(u[0], u[0]))
        if k >= 3:
            u11 = np.multiply.outer(u[0], u[0])
            parts.append(derivs[1] * u[2]
                         + derivs[2] * _sym_pair_single(u[1], u[0])
                         + derivs[3] * np.multiply.outer(u11, u[0]))
        if k >= 4:
            u11 = np.multiply.outer(u[0], u[0])
            pair_pairs = np.zeros((self.n,) * 4)
            full = np.multiply.outer(u[1], u[1])
            for dest in range(1, 4):
                pair_pairs += np.moveaxis(full, (0, 1), (0, dest))
            single_pairs = np.zeros((self.n,) * 4)
            full2 = np.multiply.outer(u[1], u11)
            for i in range(3):
                for j in range(i + 1, 4):
                    single_pairs += np.moveaxis(full2, (0, 1), (i, j))
            parts.append(derivs[1] * u[3]
                         + derivs[2] * (_sym_triple_single(u[2], u[0]) + pair_pairs)
                         + derivs[3] * single_pairs
                         + derivs[4] * np.multiply.outer(u11, u11))
        return Jet(self.n, k, derivs[0], tuple(parts))


def _int_pow(x, e):
    if e == 0:
        return Jet.constant(1.0, x.n, x.order) if isinstance(x, Jet) else 1.0
    if e < 0:
        return _recip_jet(_int_pow(x, -e)) if isinstance(x, Jet) else recip(_int_pow(x, -e))
    out = x
    for _ in range(e - 1):
        out = out * x
    return out


def _recip_jet(x: Jet) -> Jet:
    u = x.value
    if u == 0.0:
        raise DomainError("division by zero")
    iu = 1.0 / u
    return x.compose([iu, -iu * iu, 2.0 * iu ** 3, -6.0 * iu ** 4, 24.0 * iu ** 5][: x.order + 1])


# -- generic scalar functions (float or Jet) ---------------------------


def recip(x):
    if isinstance(x, Jet):
        return _recip_jet(x)
    if x == 0.0:
        raise DomainError("division by zero")
    return 1.0 / x


def sin(x):
    if isinstance(x, Jet):
        u = x.value
        s, c = math.sin(u), math.cos(u)
        return x.compose([s, c, -s, -c, s][: x.order + 1])
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        u = x.value
        s, c = math.sin(u), math.cos(u)
        return x.compose([c, -s, -c, s, c][: x.order + 1])
    return math.cos(x)


def tan(x):
    return sin(x) / cos(x)


def exp(x):
    if isinstance(x, Jet):
        e = math.exp(x.value)
        return x.compose([e] * (x.order + 1))
    return math.exp(x)


def log(x):
    u = x.value if isinstance(x, Jet) else x
    if u <= 0.0:
        raise DomainError(f"log of nonpositive value {u}")
    if isinstance(x, Jet):
        iu = 1.0 / u
        return x.compose([math.log(u), iu, -iu * iu, 2.0 * iu ** 3, -6.0 * iu ** 4][: x.order + 1])
    return math.log(x)


def sqrt(x):
    u = x.value if isinstance(x, Jet) else x
    if u <= 0.0:
        raise DomainError(f"sqrt of nonpositive value {u}")
    s = math.sqrt(u)
    if isinstance(x, Jet):
        iu = 1.0 / u
        return x.compose([s, 0.5 * s * iu, -0.25 * s * iu * iu,
                          0.375 * s * iu ** 3, -0.9375 * s * iu ** 4][: x.order + 1])
    return s


def sinh(x):
    if isinstance(x, Jet):
        s, c = math.sinh(x.value), math.cosh(x.value)
        return x.compose([s, c, s, c, s][: x.order + 1])
    return math.sinh(x)


def cosh(x):
    if isinstance(x, Jet):
        s, c = math.sinh(x.value), math.cosh(x.value)
        return x.compose([c, s, c, s, c][: x.order + 1])
    return math.cosh(x)


def powr(x, a):
    """Real power; the base must be positive."""
    if isinstance(a, Jet):
        return exp(a * log(x))
    a = float(a)
    u = x.value if isinstance(x, Jet) else x
    if u <= 0.0:
        raise DomainError(f"real power of nonpositive base {u}")
    if not isinstance(x, Jet):
        return u ** a
    derivs = [u ** a]
    coef = 1.0
    for k in range(1, x.order + 1):
        coef *= a - (k - 1)
        derivs.append(coef * u ** (a - k))
    return x.compose(derivs)


FUNCTIONS = {
    "sin": sin, "cos": cos, "tan": tan, "exp": exp,
    "log": log, "sqrt": sqrt, "sinh": sinh, "cosh": cosh,
}


def seed_point(point, order):
    """Seed jets for all chart coordinates at ``point``."""
    p = [float(c) for c in point]
    n = len(p)
    return [Jet.variable(p[i], i, n, order) for i in range(n)]


def value_of(x):
    return x.value if isinstance(x, Jet) else float(x)
