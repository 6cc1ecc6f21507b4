"""Affine inner products on a finite-dimensional vector space.

An affine inner product is a symmetric 2-affine real function whose
bilinear part is a (possibly indefinite) inner product.  Every such
function has a canonical form

    (u, v) = lambda + B(u - z, v - z)

for a unique vector ``z`` and scalar ``lambda``; that canonical triple is
the data model here.  :func:`recover_parts` and :func:`decompose` are the
constructors that take a raw 2-affine evaluator back to the triple, and
the hat-space operations realize the associated inner-product space of
affine maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEGENERACY_TOL = 1e-12


class SingularBilinearPart(ValueError):
    """The bilinear part is not invertible."""


class DegenerateLambda(ValueError):
    """lambda = 0: the induced hat-space inner product does not exist."""


class NotTwoAffine(ValueError):
    """The sampled evaluator is not symmetric 2-affine."""


def _check_bilinear(b):
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("bilinear part must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(b))))
    if np.max(np.abs(b - b.T)) > DEGENERACY_TOL * scale:
        raise ValueError("bilinear part must be symmetric")
    if abs(np.linalg.det(b)) <= DEGENERACY_TOL * scale ** b.shape[0]:
        raise SingularBilinearPart("bilinear part is numerically singular")
    return b


@dataclass(frozen=True)
class AffineInnerProduct:
    """Canonical (lambda, z, B) form of an affine inner product."""

    b: np.ndarray
    z: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "b", _check_bilinear(self.b))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        if self.z.shape != (self.b.shape[0],):
            raise ValueError("offset vector has the wrong dimension")

    @property
    def n(self):
        return self.b.shape[0]

    def bilinear(self, u, v):
        return float(np.asarray(u) @ self.b @ np.asarray(v))


@dataclass(frozen=True)
class HatVector:
    """Element of the hat space, written over the linear image of V plus a
    multiple of the constant map of norm-square lambda."""

    xbar: np.ndarray
    mu: float


@dataclass(frozen=True)
class LinearAffineMap:
    """T1(u, b) = u . (m @ b + w): linear in u, affine in b."""

    m: np.ndarray
    w: np.ndarray

    def __call__(self, u, b):
        return float(np.asarray(u) @ (self.m @ np.asarray(b) + self.w))


def decompose(s00, s0, b):
    """Recover (lambda, z) from the value at the origin, the linear part at
    the origin, and the bilinear part.

    ``z`` solves B(z, v) = -s0(v) for all v and lambda = s00 - B(z, z).
    """
    b = _check_bilinear(b)
    s0 = np.asarray(s0, dtype=float)
    z = np.linalg.solve(b, -s0)
    lam = float(s00) - float(z @ b @ z)
    return lam, z


def evaluate(p, u, v):
    """(u, v) = lambda + B(u - z, v - z)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (p.n,) or v.shape != (p.n,):
        raise ValueError("dimension mismatch")
    return p.lam + p.bilinear(u - p.z, v - p.z)


def hat_embed(p, x):
    """Embed a point of V into the hat space: x - z in the linear part plus
    one copy of the distinguished constant direction."""
    return HatVector(xbar=np.asarray(x, dtype=float) - p.z, mu=1.0)


def bar_embed(p, x):
    """Linear embedding of V into the hat space."""
    return HatVector(xbar=np.asarray(x, dtype=float), mu=0.0)


def hat_inner(p, a, b):
    """Induced inner product on the hat space; requires lambda != 0."""
    if abs(p.lam) <= DEGENERACY_TOL:
        raise DegenerateLambda("lambda = 0: no induced hat-space inner product")
    return p.bilinear(a.xbar, b.xbar) + p.lam * a.mu * b.mu


def anchor(v):
    """Project a hat vector back to V (kernel: the constant direction)."""
    return np.array(v.xbar)


def recover_parts(s, basis, rng=None, tol=1e-9):
    """Split a black-box symmetric 2-affine evaluator into its value at the
    origin, linear-affine part, and bilinear part over the given basis.

    The bilinear part is the second difference
    T(u, v) = S(a+u, b+v) - S(a, b+v) - S(a+u, b) + S(a, b), which must not
    depend on (a, b); the linear-affine part is T1(u, b) = S(a+u, b) - S(a, b),
    which must not depend on a.  Violations (or asymmetry) raise
    :class:`NotTwoAffine`.
    """
    basis = [np.asarray(e, dtype=float) for e in basis]
    n = len(basis)
    if rng is None:
        rng = np.random.default_rng(0)
    zero = np.zeros(n)

    def second_diff(a, b, u, v):
        return s(a + u, b + v) - s(a, b + v) - s(a + u, b) + s(a, b)

    s00 = float(s(zero, zero))
    t = np.array([[second_diff(zero, zero, ei, ej) for ej in basis] for ei in basis])
    scale = max(1.0, float(np.max(np.abs(t))), abs(s00))

    # symmetry of the evaluator
    for _ in range(4):
        u = rng.uniform(-1.0, 1.0, size=n)
        v = rng.uniform(-1.0, 1.0, size=n)
        if abs(s(u, v) - s(v, u)) > tol * scale:
            raise NotTwoAffine("evaluator is not symmetric")

    # independence of the bilinear part from the base pair (a, b)
    for _ in range(4):
        a = rng.uniform(-2.0, 2.0, size=n)
        b = rng.uniform(-2.0, 2.0, size=n)
        t_ab = np.array([[second_diff(a, b, ei, ej) for ej in basis] for ei in basis])
        if np.max(np.abs(t_ab - t)) > tol * scale:
            raise NotTwoAffine("second difference depends on the base pair")

    # linear-affine part, taken at a = 0
    w = np.array([s(ei, zero) - s00 for ei in basis])
    m = np.array([[s(ei, ej) - s(zero, ej) - w[i] for j, ej in enumerate(basis)]
                  for i, ei in enumerate(basis)])
    for _ in range(2):
        a = rng.uniform(-2.0, 2.0, size=n)
        b = rng.uniform(-2.0, 2.0, size=n)
        u = rng.uniform(-1.0, 1.0, size=n)
        if abs((s(a + u, b) - s(a, b)) - float(u @ (m @ b + w))) > tol * scale:
            raise NotTwoAffine("first difference is not linear-affine")

    return s00, LinearAffineMap(m=m, w=w), t


def from_evaluator(s, basis, rng=None):
    """Build the canonical form from a black-box symmetric 2-affine map."""
    s00, t1, t = recover_parts(s, basis, rng=rng)
    lam, z = decompose(s00, t1.w, t)
    return AffineInnerProduct(b=t, z=z, lam=lam)
