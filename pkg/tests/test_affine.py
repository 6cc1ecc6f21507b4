"""Affine inner products: canonical decomposition and the hat space."""

import numpy as np
import pytest

from affinegeo import affine
from affinegeo.affine import (AffineInnerProduct, DegenerateLambda,
                              NotTwoAffine, SingularBilinearPart)


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------

def test_decompose_shifted_dot_product():
    # B = I on R^2, s0(v) = -v_1, s00 = 5  =>  z = (1, 0), lambda = 4
    lam, z = affine.decompose(5.0, np.array([-1.0, 0.0]), np.eye(2))
    assert np.allclose(z, [1.0, 0.0])
    assert lam == pytest.approx(4.0)


def test_decompose_pure_inner_product():
    lam, z = affine.decompose(0.0, np.zeros(2), np.eye(2))
    assert lam == 0.0 and np.allclose(z, 0.0)


def test_decompose_indefinite_zero_linear_part():
    lam, z = affine.decompose(7.0, np.zeros(2), np.diag([1.0, -1.0]))
    assert lam == pytest.approx(7.0) and np.allclose(z, 0.0)


def test_decompose_singular_bilinear_part():
    with pytest.raises(SingularBilinearPart):
        affine.decompose(0.0, np.zeros(2), np.array([[1.0, 1.0], [1.0, 1.0]]))


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

@pytest.fixture
def shifted():
    return AffineInnerProduct(b=np.eye(2), z=np.array([1.0, 0.0]), lam=4.0)


def test_evaluate_at_the_center_kills_bilinear_term(shifted):
    assert affine.evaluate(shifted, shifted.z, shifted.z) == pytest.approx(4.0)


def test_evaluate_hand_value(shifted):
    assert affine.evaluate(shifted, np.array([2.0, 0.0]), np.zeros(2)) == pytest.approx(3.0)


def test_evaluate_reduces_to_inner_product():
    p = AffineInnerProduct(b=np.diag([2.0, 3.0]), z=np.zeros(2), lam=0.0)
    u = np.array([1.0, 2.0])
    v = np.array([-1.0, 0.5])
    assert affine.evaluate(p, u, v) == pytest.approx(u @ p.b @ v)


def test_evaluate_symmetry(shifted):
    rng = np.random.default_rng(3)
    for _ in range(10):
        u, v = rng.normal(size=2), rng.normal(size=2)
        assert affine.evaluate(shifted, u, v) == pytest.approx(affine.evaluate(shifted, v, u))


# ---------------------------------------------------------------------------
# hat space
# ---------------------------------------------------------------------------

def test_hat_inner_of_the_constant_direction(shifted):
    zhat = affine.HatVector(xbar=np.zeros(2), mu=1.0)
    assert affine.hat_inner(shifted, zhat, zhat) == pytest.approx(shifted.lam)


def test_hat_embedding_reproduces_the_affine_product(shifted):
    x = np.array([2.0, 0.0])
    y = np.zeros(2)
    lhs = affine.hat_inner(shifted, affine.hat_embed(shifted, x), affine.hat_embed(shifted, y))
    assert lhs == pytest.approx(3.0)
    assert lhs == pytest.approx(affine.evaluate(shifted, x, y))


def test_hat_inner_degenerate_lambda():
    p = AffineInnerProduct(b=np.eye(2), z=np.zeros(2), lam=0.0)
    v = affine.HatVector(xbar=np.ones(2), mu=1.0)
    with pytest.raises(DegenerateLambda):
        affine.hat_inner(p, v, v)


def test_hat_embedding_property_on_1000_random_products():
    """<x-hat, y-hat> = (x, y) for seeded random products with lambda != 0."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        a = rng.normal(size=(n, n))
        b = a + a.T + np.eye(n) * (2.0 + n)
        z = rng.normal(size=n)
        lam = float(rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0]))
        p = AffineInnerProduct(b=b, z=z, lam=lam)
        x, y = rng.normal(size=n), rng.normal(size=n)
        lhs = affine.hat_inner(p, affine.hat_embed(p, x), affine.hat_embed(p, y))
        rhs = affine.evaluate(p, x, y)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    assert worst <= 1e-10


def test_hat_embedding_is_affine(shifted):
    rng = np.random.default_rng(9)
    h0 = affine.hat_embed(shifted, np.zeros(2))
    for _ in range(20):
        x, y = rng.normal(size=2), rng.normal(size=2)
        lin = lambda v: affine.hat_embed(shifted, v).xbar - h0.xbar
        assert np.allclose(lin(x + y), lin(x) + lin(y), atol=1e-12)
        assert affine.hat_embed(shifted, x).mu == 1.0


# ---------------------------------------------------------------------------
# recover_parts
# ---------------------------------------------------------------------------

def test_recover_dot_product():
    s = lambda u, v: float(np.dot(u, v))
    basis = list(np.eye(2))
    s00, t1, t = affine.recover_parts(s, basis)
    assert s00 == 0.0
    assert np.allclose(t, np.eye(2))
    assert t1(np.array([1.0, 2.0]), np.array([3.0, 4.0])) == pytest.approx(11.0)


def test_recover_shifted_product():
    z = np.array([1.0, 0.0])
    s = lambda u, v: 4.0 + float(np.dot(u - z, v - z))
    basis = list(np.eye(2))
    s00, t1, t = affine.recover_parts(s, basis)
    assert np.allclose(t, np.eye(2))
    rng = np.random.default_rng(4)
    for _ in range(10):
        u, b = rng.normal(size=2), rng.normal(size=2)
        assert t1(u, b) == pytest.approx(float(u @ (b - z)))


def test_recover_rejects_non_two_affine():
    s = lambda u, v: float(u[0])  # affine in u only, not symmetric
    with pytest.raises(NotTwoAffine):
        affine.recover_parts(s, list(np.eye(2)))
    quad = lambda u, v: float(np.dot(u, v)) ** 2
    with pytest.raises(NotTwoAffine):
        affine.recover_parts(quad, list(np.eye(2)))


def test_full_round_trip_through_black_box():
    """decompose(recover_parts(evaluator)) reproduces sampled data exactly."""
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        a = rng.normal(size=(n, n))
        b = a + a.T + np.eye(n) * (2.0 + n)
        z = rng.normal(size=n)
        lam = float(rng.normal())
        s = lambda u, v: lam + float((u - z) @ b @ (v - z))
        p = affine.from_evaluator(s, list(np.eye(n)), rng=np.random.default_rng(1))
        assert np.allclose(p.b, b, atol=1e-9)
        assert np.allclose(p.z, z, atol=1e-9)
        assert p.lam == pytest.approx(lam, abs=1e-9)
        for _ in range(5):
            u, v = rng.normal(size=n), rng.normal(size=n)
            assert affine.evaluate(p, u, v) == pytest.approx(s(u, v), abs=1e-12 * max(1, abs(s(u, v))))
