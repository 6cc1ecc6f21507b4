"""Shared test utilities: random expression generation, finite-difference
oracles, and an AST -> sympy bridge used as an exact derivative oracle."""

from __future__ import annotations

import numpy as np

from affinegeo import expr as E


def _const(v):
    # parser-canonical: negative literals are negations of positive ones
    return -E.const(-v) if v < 0 else E.const(v)


def random_expr(rng, names, depth=3):
    """Random expression that stays finite and domain-safe on |x_i| <= 3."""
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.35:
            return _const(round(rng.uniform(-2, 2), 3))
        name = names[rng.integers(len(names))]
        coeff = round(rng.uniform(-1.5, 1.5), 3)
        return _const(coeff) * E.var(name) if rng.random() < 0.5 else E.var(name)
    pick = rng.random()
    a = random_expr(rng, names, depth - 1)
    if pick < 0.18:
        return a + random_expr(rng, names, depth - 1)
    if pick < 0.33:
        return a - random_expr(rng, names, depth - 1)
    if pick < 0.50:
        return a * random_expr(rng, names, depth - 1)
    if pick < 0.56:
        return a / (E.const(round(rng.uniform(2.2, 4.0), 3)) + E.cos(random_expr(rng, names, depth - 1)))
    if pick < 0.62:
        return -a
    if pick < 0.72:
        return E.sin(a)
    if pick < 0.82:
        return E.cos(a)
    if pick < 0.86:
        return E.exp(E.const(0.25) * E.sin(a))
    if pick < 0.90:
        return E.log(E.const(2.5) + E.sin(a))
    if pick < 0.94:
        return E.sqrt(E.const(2.5) + E.cos(a))
    if pick < 0.97:
        return E.sinh(E.const(0.5) * E.sin(a))
    return E.cos(a) ** int(rng.integers(2, 4))


def to_sympy(e, symbols):
    """Translate an affinegeo AST into a sympy expression."""
    import sympy as sp

    if isinstance(e, E.Const):
        return sp.Float(e.value, 30)
    if isinstance(e, E.Var):
        return symbols[e.name]
    if isinstance(e, E.Add):
        return to_sympy(e.left, symbols) + to_sympy(e.right, symbols)
    if isinstance(e, E.Sub):
        return to_sympy(e.left, symbols) - to_sympy(e.right, symbols)
    if isinstance(e, E.Mul):
        return to_sympy(e.left, symbols) * to_sympy(e.right, symbols)
    if isinstance(e, E.Div):
        return to_sympy(e.left, symbols) / to_sympy(e.right, symbols)
    if isinstance(e, E.Neg):
        return -to_sympy(e.operand, symbols)
    if isinstance(e, E.Pow):
        return to_sympy(e.left, symbols) ** to_sympy(e.right, symbols)
    if isinstance(e, E.Call):
        import sympy as sp
        fn = {"sin": sp.sin, "cos": sp.cos, "tan": sp.tan, "exp": sp.exp,
              "log": sp.log, "sqrt": sp.sqrt, "sinh": sp.sinh, "cosh": sp.cosh}[e.func]
        return fn(to_sympy(e.arg, symbols))
    raise TypeError(type(e))


def fd_gradient(f, p, h=None):
    """Central finite-difference gradient of a scalar callable on R^n."""
    p = np.asarray(p, dtype=float)
    n = p.size
    out = np.zeros(n)
    for i in range(n):
        hi = h if h is not None else np.cbrt(np.finfo(float).eps) * max(1.0, abs(p[i]))
        up = p.copy()
        dn = p.copy()
        up[i] += hi
        dn[i] -= hi
        out[i] = (f(up) - f(dn)) / (2 * hi)
    return out


def fd_expr_gradient(e, p, coords, h=None):
    def f(q):
        return E.eval_jet(e, q, 0, coords).value
    return fd_gradient(f, p, h=h)


def max_abs(x):
    arr = np.asarray(x, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0
