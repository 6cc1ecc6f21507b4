"""Jet arithmetic against exact (sympy) and finite-difference oracles."""

import itertools

import numpy as np
import pytest
import sympy as sp

from affinegeo import expr as E
from affinegeo import jets
from affinegeo.jets import DomainError, Jet

from helpers import fd_expr_gradient, random_expr, to_sympy


def sympy_partials(e, coords, point, order):
    """Exact derivative tensors of ranks 0..order via sympy."""
    symbols = {c: sp.Symbol(c, real=True) for c in coords}
    sym = to_sympy(e, symbols)
    subs = {symbols[c]: sp.Float(v, 30) for c, v in zip(coords, point)}
    n = len(coords)
    tensors = [float(sym.subs(subs))]
    for rank in range(1, order + 1):
        arr = np.zeros((n,) * rank)
        for idx in itertools.product(range(n), repeat=rank):
            d = sp.diff(sym, *[symbols[coords[i]] for i in idx])
            arr[idx] = float(d.subs(subs))
        tensors.append(arr)
    return tensors


# ---------------------------------------------------------------------------
# spec examples
# ---------------------------------------------------------------------------

def test_square_polynomial():
    e = E.parse("x^2", ["x"])
    j = E.eval_jet(e, (3.0,), 2, ["x"])
    assert j.value == 9.0
    assert j.parts[0][0] == 6.0
    assert j.parts[1][0, 0] == 2.0


def test_sine_at_origin():
    j = E.eval_jet(E.parse("sin(x)", ["x"]), (0.0,), 1, ["x"])
    assert j.value == 0.0
    assert j.parts[0][0] == 1.0


def test_exp_xy_against_finite_differences():
    coords = ["x", "y"]
    e = E.parse("exp(x*y)", coords)
    j = E.eval_jet(e, (1.0, 1.0), 1, coords)
    ev = np.e
    assert j.value == pytest.approx(ev, rel=1e-14)
    assert j.parts[0][0] == pytest.approx(ev, rel=1e-14)
    assert j.parts[0][1] == pytest.approx(ev, rel=1e-14)
    fd = fd_expr_gradient(e, (1.0, 1.0), coords, h=1e-5)
    assert np.max(np.abs(fd - j.parts[0]) / ev) <= 1e-9


# ---------------------------------------------------------------------------
# exact oracle: sympy derivatives of random expressions
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(12))
def test_jets_match_sympy_to_order_three(seed):
    rng = np.random.default_rng(100 + seed)
    coords = ["x", "y", "z"]
    e = random_expr(rng, coords, depth=3)
    point = rng.uniform(-1.2, 1.2, size=3)
    j = E.eval_jet(e, point, 3, coords)
    ref = sympy_partials(e, coords, point, 3)
    scale = max(1.0, abs(ref[0]))
    assert abs(j.value - ref[0]) <= 1e-9 * scale
    for rank in range(1, 4):
        scale = max(1.0, np.max(np.abs(ref[rank])))
        assert np.max(np.abs(j.parts[rank - 1] - ref[rank])) <= 1e-8 * scale


@pytest.mark.parametrize("seed", range(4))
def test_jets_match_sympy_at_order_four(seed):
    rng = np.random.default_rng(300 + seed)
    coords = ["u", "v"]
    e = random_expr(rng, coords, depth=3)
    point = rng.uniform(-1.0, 1.0, size=2)
    j = E.eval_jet(e, point, 4, coords)
    ref = sympy_partials(e, coords, point, 4)
    for rank in range(5):
        got = j.value if rank == 0 else j.parts[rank - 1]
        scale = max(1.0, np.max(np.abs(ref[rank])))
        assert np.max(np.abs(np.asarray(got) - ref[rank])) <= 1e-7 * scale


# ---------------------------------------------------------------------------
# spec invariants
# ---------------------------------------------------------------------------

def test_first_partials_match_central_differences_on_1000_samples():
    """Order-1 partials vs central differences, 1000 seeded expression/point
    pairs, 1e-6 relative."""
    rng = np.random.default_rng(42)
    coords = ["x", "y"]
    worst = 0.0
    for _ in range(1000):
        e = random_expr(rng, coords, depth=2)
        p = rng.uniform(-1.5, 1.5, size=2)
        try:
            j = E.eval_jet(e, p, 1, coords)
            fd = fd_expr_gradient(e, p, coords)
        except DomainError:
            continue
        scale = max(1.0, np.max(np.abs(j.parts[0])))
        worst = max(worst, np.max(np.abs(fd - j.parts[0])) / scale)
    assert worst <= 1e-6


def test_arithmetic_associative_commutative():
    rng = np.random.default_rng(7)
    n, order = 3, 2
    for _ in range(50):
        vals = rng.uniform(0.5, 1.5, size=3)
        a = Jet.variable(vals[0], 0, n, order) * 1.3 + 0.2
        b = jets.sin(Jet.variable(vals[1], 1, n, order))
        c = jets.exp(Jet.variable(vals[2], 2, n, order) * 0.5)
        for x, y in (((a * b) * c, a * (b * c)), ((a + b) + c, a + (b + c)),
                     (a * b, b * a), (a + b, b + a)):
            assert abs(x.value - y.value) <= 1e-12
            for r in range(order):
                assert np.max(np.abs(x.parts[r] - y.parts[r])) <= 1e-12


def test_lower_order_restriction_is_exact():
    """eval_jet at order k, restricted to orders < k, must equal the lower
    order evaluation bit for bit."""
    rng = np.random.default_rng(11)
    coords = ["x", "y", "z"]
    for _ in range(20):
        e = random_expr(rng, coords, depth=3)
        p = rng.uniform(-1.0, 1.0, size=3)
        hi = E.eval_jet(e, p, 3, coords)
        lo = E.eval_jet(e, p, 2, coords)
        assert hi.value == lo.value
        for r in range(2):
            assert np.array_equal(hi.parts[r], lo.parts[r])


def test_mixed_partials_stored_symmetrically():
    rng = np.random.default_rng(5)
    coords = ["x", "y", "z"]
    for _ in range(20):
        e = random_expr(rng, coords, depth=3)
        p = rng.uniform(-1.0, 1.0, size=3)
        j = E.eval_jet(e, p, 3, coords)
        p2, p3 = j.parts[1], j.parts[2]
        scale = max(1.0, np.max(np.abs(p2)), np.max(np.abs(p3)))
        assert np.max(np.abs(p2 - p2.T)) <= 1e-12 * scale
        for perm in itertools.permutations(range(3)):
            assert np.max(np.abs(p3 - np.transpose(p3, perm))) <= 1e-12 * scale


# ---------------------------------------------------------------------------
# structure and error behavior
# ---------------------------------------------------------------------------

def test_partial_shift_matches_direct_jet():
    coords = ["x", "y"]
    e = E.parse("sin(x)*exp(y) + x^3", coords)
    p = (0.7, -0.3)
    j = E.eval_jet(e, p, 3, coords)
    dx = j.partial(0)
    ref = sympy_partials(e, coords, p, 3)
    assert dx.value == pytest.approx(ref[1][0], rel=1e-12)
    assert np.allclose(dx.parts[0], ref[2][0], rtol=1e-11, atol=1e-13)
    assert np.allclose(dx.parts[1], ref[3][0], rtol=1e-11, atol=1e-13)


def test_truncate_keeps_low_ranks():
    j = E.eval_jet(E.parse("x*y^2", ["x", "y"]), (2.0, 3.0), 3, ["x", "y"])
    t = j.truncate(1)
    assert t.order == 1 and t.value == j.value
    assert np.array_equal(t.parts[0], j.parts[0])


def test_domain_errors():
    coords = ["x"]
    with pytest.raises(DomainError):
        E.eval_jet(E.parse("log(x)", coords), (-1.0,), 1, coords)
    with pytest.raises(DomainError):
        E.eval_jet(E.parse("sqrt(x)", coords), (0.0,), 1, coords)
    with pytest.raises(DomainError):
        E.eval_jet(E.parse("1/x", coords), (0.0,), 0, coords)
    with pytest.raises(DomainError):
        E.eval_jet(E.parse("x^0.5", coords), (-2.0,), 1, coords)


def test_integer_power_of_negative_base_is_fine():
    j = E.eval_jet(E.parse("x^3", ["x"]), (-2.0,), 2, ["x"])
    assert j.value == -8.0
    assert j.parts[0][0] == 12.0
    assert j.parts[1][0, 0] == -12.0


def test_negative_integer_power():
    j = E.eval_jet(E.parse("x^-2", ["x"]), (2.0,), 1, ["x"])
    assert j.value == pytest.approx(0.25)
    assert j.parts[0][0] == pytest.approx(-0.25)


def test_jet_exponent_uses_exp_log():
    coords = ["x", "y"]
    j = E.eval_jet(E.parse("x^y", coords), (2.0, 3.0), 1, coords)
    assert j.value == pytest.approx(8.0)
    assert j.parts[0][0] == pytest.approx(12.0)           # y*x^(y-1)
    assert j.parts[0][1] == pytest.approx(8.0 * np.log(2.0))
