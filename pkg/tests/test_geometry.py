"""Chart geometry against textbook solutions and finite-difference oracles."""

import numpy as np
import pytest

from affinegeo import expr as E
from affinegeo import geometry as G
from affinegeo.geometry import (Chart, Frame, MetricField, RankMismatch,
                                SingularMetric, TensorField, TensorValue,
                                UnsupportedRank)

from helpers import fd_gradient, max_abs, random_expr


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def euclidean(n=2, names=("x", "y", "z", "w")):
    chart = Chart(coords=names[:n], signature=(1,) * n, region=((-2.0, 2.0),) * n)
    return MetricField.diagonal(chart, [E.const(1.0)] * n)


def sphere_metric():
    chart = Chart(coords=("ph", "ps"), signature=(1, 1),
                  region=((0.3, 2.8), (0.0, 6.0)))
    return MetricField.diagonal(chart, [E.const(1.0), E.sin(E.var("ph")) ** 2])


def schwarzschild_metric(mass=1.0):
    chart = Chart(coords=("t", "r", "ph", "ps"), signature=(-1, 1, 1, 1),
                  region=((0.0, 1.0), (3.0 * mass, 10.0 * mass), (0.4, 2.7), (0.0, 6.0)))
    coords = chart.coords
    f = E.parse(f"1 - {2 * mass}/r", coords)
    r, ph = E.var("r"), E.var("ph")
    return MetricField.diagonal(chart, [-f, 1 / f, r ** 2, r ** 2 * E.sin(ph) ** 2])


def wavy_metric(seed, n=3, amp=0.08):
    """Random smooth Riemannian metric: identity plus small trig terms."""
    rng = np.random.default_rng(seed)
    names = ("x", "y", "z", "w")[:n]
    chart = Chart(coords=names, signature=(1,) * n, region=((-0.8, 0.8),) * n)
    comps = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            wobble = E.const(0.0)
            for _ in range(2):
                k = rng.integers(1, 3, size=n)
                phase = rng.uniform(0, 2 * np.pi)
                arg = E.const(phase)
                for m, name in enumerate(names):
                    arg = arg + E.const(float(k[m])) * E.var(name)
                wobble = wobble + E.const(round(rng.uniform(-amp, amp), 4)) * E.sin(arg)
            comps[i][j] = comps[j][i] = (E.const(1.0) + wobble) if i == j else wobble
    return MetricField(chart, comps)


# ---------------------------------------------------------------------------
# christoffel
# ---------------------------------------------------------------------------

def test_flat_christoffel_vanishes():
    g = euclidean(3)
    gamma = G.christoffel(g, (0.3, -0.2, 1.0))
    assert max_abs(gamma) == 0.0


def test_sphere_christoffel_hand_values():
    g = sphere_metric()
    ph = 1.1
    gamma = G.christoffel(g, (ph, 2.0))
    # hand computation for diag(1, sin^2 ph)
    assert gamma[0, 1, 1] == pytest.approx(-np.sin(ph) * np.cos(ph), rel=1e-12)
    assert gamma[1, 0, 1] == pytest.approx(np.cos(ph) / np.sin(ph), rel=1e-12)
    assert gamma[1, 1, 0] == pytest.approx(np.cos(ph) / np.sin(ph), rel=1e-12)
    assert gamma[0, 0, 0] == 0.0 and gamma[1, 1, 1] == 0.0


def test_schwarzschild_christoffel_t_tr():
    m = 1.0
    g = schwarzschild_metric(m)
    p = (0.0, 5.0, 1.2, 0.7)
    gamma = G.christoffel(g, p)
    r = p[1]
    f = 1 - 2 * m / r
    assert gamma[0, 0, 1] == pytest.approx(m / (r * r * f), rel=1e-12)


def test_christoffel_symmetric_in_lower_indices():
    g = wavy_metric(1)
    gamma = G.christoffel(g, (0.2, -0.1, 0.4))
    assert np.max(np.abs(gamma - np.swapaxes(gamma, 1, 2))) == 0.0


def test_singular_metric_raises():
    chart = Chart(coords=("x", "y"), signature=(1, 1), region=((-1, 1), (-1, 1)))
    g = MetricField.diagonal(chart, [E.var("x"), E.const(1.0)])
    with pytest.raises(SingularMetric):
        G.christoffel(g, (0.0, 0.0))


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def test_flat_curvature_vanishes_any_signature():
    chart = Chart(coords=("t", "x"), signature=(-1, 1), region=((-1, 1), (-1, 1)))
    g = MetricField.diagonal(chart, [E.const(-1.0), E.const(1.0)])
    riem, ric, scal = G.curvature(g, (0.1, 0.2))
    assert max_abs(riem) == 0.0 and max_abs(ric) == 0.0 and scal == 0.0


def test_unit_sphere_scalar_curvature_is_two():
    g = sphere_metric()
    for ph in (0.6, 1.2, 2.3):
        riem, ric, scal = G.curvature(g, (ph, 1.0))
        assert scal == pytest.approx(2.0, abs=1e-10)
        # Ricci of the unit sphere equals the metric
        assert ric[0, 0] == pytest.approx(1.0, rel=1e-10)
        assert ric[1, 1] == pytest.approx(np.sin(ph) ** 2, rel=1e-10)


def test_schwarzschild_is_ricci_flat():
    g = schwarzschild_metric()
    rng = np.random.default_rng(8)
    for p in g.chart.sample(rng, 5):
        riem, ric, scal = G.curvature(g, p)
        scale = max(1.0, max_abs(riem))
        assert max_abs(ric) <= 1e-9 * scale
        assert abs(scal) <= 1e-9 * scale


def test_riemann_against_finite_difference_christoffel():
    """Cross-check the Riemann assembly with finite differences of the
    Christoffel symbols (independent of the jet pipeline)."""
    g = wavy_metric(3)
    p = np.array([0.1, -0.2, 0.3])
    n = 3
    riem, _, _ = G.curvature(g, p)
    h = 1e-5

    def gamma_at(q):
        return G.christoffel(g, q, order=1)

    dgamma = np.zeros((n, n, n, n))  # [a, l, i, j] = d_a Gamma^l_ij
    for a in range(n):
        up, dn = p.copy(), p.copy()
        up[a] += h
        dn[a] -= h
        dgamma[a] = (gamma_at(up) - gamma_at(dn)) / (2 * h)
    gam = gamma_at(p)
    ref = np.zeros((n, n, n, n))
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    ref[l, k, i, j] = (dgamma[i, l, j, k] - dgamma[j, l, i, k]
                                       + sum(gam[l, i, m] * gam[m, j, k]
                                             - gam[l, j, m] * gam[m, i, k] for m in range(n)))
    assert np.max(np.abs(riem - ref)) <= 1e-7


def test_first_bianchi_identity():
    for seed in range(3):
        g = wavy_metric(20 + seed)
        rng = np.random.default_rng(seed)
        for p in g.chart.sample(rng, 3):
            riem, _, _ = G.curvature(g, p)
            cyc = riem + np.transpose(riem, (0, 2, 3, 1)) + np.transpose(riem, (0, 3, 1, 2))
            assert np.max(np.abs(cyc)) <= 1e-9 * max(1.0, max_abs(riem))


def test_contracted_bianchi_identity():
    """div(Ric - R g / 2) = 0; exercises order-3 jets of derived fields."""
    g = wavy_metric(7)

    def einstein_field(frame):
        ric = frame.ricci
        scal = frame.scalar_curvature
        n = frame.n
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                out[i, j] = ric[i, j] - 0.5 * scal * frame.g[i, j]
        return out

    field = TensorField(kind="sym2", evaluate=einstein_field)
    rng = np.random.default_rng(2)
    for p in g.chart.sample(rng, 3):
        div = G.divergence(g, field, p, order=3)
        frame = Frame(g, p, 2)
        scale = max(1.0, max_abs(G.jet_values(frame.ricci)))
        assert max_abs(div.components) <= 1e-6 * scale


# ---------------------------------------------------------------------------
# scalar calculus
# ---------------------------------------------------------------------------

def test_scalar_calculus_constant():
    g = euclidean(2)
    out = G.scalar_calculus(g, E.const(5.0), (0.1, 0.2))
    assert max_abs(out.grad) == 0.0 and max_abs(out.hessian) == 0.0
    assert out.laplacian == 0.0 and out.grad_square == 0.0


def test_scalar_calculus_paraboloid():
    g = euclidean(2)
    theta = E.parse("x^2 + y^2", g.chart.coords)
    for p in [(0.5, -0.3), (1.0, 2.0)]:
        out = G.scalar_calculus(g, theta, p)
        assert out.laplacian == pytest.approx(4.0, rel=1e-12)
        assert out.grad_square == pytest.approx(4.0 * (p[0] ** 2 + p[1] ** 2), rel=1e-12)
        assert np.allclose(out.grad, [2 * p[0], 2 * p[1]])
    fd = fd_gradient(lambda q: q[0] ** 2 + q[1] ** 2, (0.5, -0.3))
    assert np.allclose(fd, [1.0, -0.6], atol=1e-7)


def test_grad_square_can_be_negative_in_lorentzian_signature():
    chart = Chart(coords=("t", "x"), signature=(-1, 1), region=((-1, 1), (-1, 1)))
    g = MetricField.diagonal(chart, [E.const(-1.0), E.const(1.0)])
    out = G.scalar_calculus(g, E.var("t"), (0.0, 0.0))
    assert out.grad_square == pytest.approx(-1.0)


def test_hessian_on_curved_chart_matches_finite_differences():
    g = wavy_metric(11)
    coords = g.chart.coords
    theta = E.parse("sin(x)*y + z^2", coords)
    p = np.array([0.3, -0.4, 0.2])
    out = G.scalar_calculus(g, theta, p)
    # Hessian = d_i d_j f - Gamma^k_ij d_k f with finite-difference pieces
    h = 1e-5
    n = 3
    d2 = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            pp = p.copy(); pp[i] += h; pp[j] += h
            pm = p.copy(); pm[i] += h; pm[j] -= h
            mp = p.copy(); mp[i] -= h; mp[j] += h
            mm = p.copy(); mm[i] -= h; mm[j] -= h
            f = lambda q: E.eval_jet(theta, q, 0, coords).value
            d2[i, j] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h)
    gam = G.christoffel(g, p)
    df = out.dtheta
    ref = d2 - np.einsum("kij,k->ij", gam, df)
    assert np.max(np.abs(out.hessian - ref)) <= 1e-5


# ---------------------------------------------------------------------------
# divergence
# ---------------------------------------------------------------------------

def test_divergence_of_constant_vector_field_is_zero():
    g = euclidean(2)
    field = TensorField.from_expressions("vector", [E.const(1.0), E.const(2.0)])
    out = G.divergence(g, field, (0.3, 0.4), order=1)
    assert out.components == 0.0


def test_divergence_of_radial_field():
    g = euclidean(2)
    field = TensorField.from_expressions("vector", [E.var("x"), E.var("y")])
    out = G.divergence(g, field, (0.3, 0.4), order=1)
    assert out.components == pytest.approx(2.0)


def test_divergence_of_metric_vanishes():
    for seed in range(3):
        g = wavy_metric(40 + seed)
        field = TensorField(kind="sym2", evaluate=lambda frame: frame.g)
        rng = np.random.default_rng(seed)
        for p in g.chart.sample(rng, 3):
            out = G.divergence(g, field, p, order=2)
            assert max_abs(out.components) <= 1e-10


def test_divergence_unsupported_rank():
    g = euclidean(2)
    with pytest.raises(UnsupportedRank):
        G.divergence(g, TensorField(kind="form3", evaluate=None), (0.0, 0.0))


def test_divergence_of_oneform_matches_vector_route():
    g = wavy_metric(13)
    coords = g.chart.coords
    exprs = [E.parse("sin(y)", coords), E.parse("x*z", coords), E.parse("cos(x)", coords)]
    onef = TensorField.from_expressions("oneform", exprs)

    def raised(frame):
        return frame.raise_index(frame.eval_array(exprs))

    vec = TensorField(kind="vector", evaluate=raised)
    p = (0.2, 0.1, -0.3)
    a = G.divergence(g, onef, p, order=2).components
    b = G.divergence(g, vec, p, order=2).components
    assert a == pytest.approx(b, rel=1e-10)


# ---------------------------------------------------------------------------
# exterior derivative
# ---------------------------------------------------------------------------

def test_d_of_df_vanishes():
    g = euclidean(3, names=("x", "y", "z"))
    chart = g.chart
    rng = np.random.default_rng(3)
    f = random_expr(rng, chart.coords, depth=3)
    field = TensorField(kind="oneform",
                        evaluate=lambda frame: G.d_form(frame.eval(f), 0, frame.n))
    out = G.exterior_derivative(chart, field, (0.2, -0.4, 0.5), order=2)
    assert max_abs(out.components) <= 1e-13


def test_d_of_x_dy():
    chart = euclidean(2).chart
    field = TensorField.from_expressions("oneform", [E.const(0.0), E.var("x")])
    out = G.exterior_derivative(chart, field, (0.7, -0.1))
    assert out.kind == "antisym2"
    assert out.components[0, 1] == pytest.approx(1.0)
    assert out.components[1, 0] == pytest.approx(-1.0)


def test_d_of_random_oneform_matches_finite_differences():
    chart = euclidean(3, names=("x", "y", "z")).chart
    coords = chart.coords
    rng = np.random.default_rng(12)
    exprs = [random_expr(rng, coords, depth=2) for _ in range(3)]
    field = TensorField.from_expressions("oneform", exprs)
    p = np.array([0.3, 0.2, -0.1])
    out = G.exterior_derivative(chart, field, p).components
    h = 1e-6
    for i in range(3):
        for j in range(3):
            def comp(q, k=j):
                return E.eval_jet(exprs[k], q, 0, coords).value
            up, dn = p.copy(), p.copy()
            up[i] += h
            dn[i] -= h
            di_wj = (comp(up) - comp(dn)) / (2 * h)
            up, dn = p.copy(), p.copy()
            up[j] += h
            dn[j] -= h
            dj_wi = (E.eval_jet(exprs[i], up, 0, coords).value
                     - E.eval_jet(exprs[i], dn, 0, coords).value) / (2 * h)
            assert abs(out[i, j] - (di_wj - dj_wi)) <= 1e-7


def test_dd_of_oneform_vanishes():
    chart = euclidean(3, names=("x", "y", "z")).chart
    rng = np.random.default_rng(21)
    exprs = [random_expr(rng, chart.coords, depth=2) for _ in range(3)]

    def d_omega(frame):
        return G.d_form(frame.eval_array(exprs), 1, frame.n)

    field = TensorField(kind="antisym2", evaluate=d_omega)
    out = G.exterior_derivative(chart, field, (0.1, 0.5, -0.2), order=3)
    assert out.kind == "form3"
    assert max_abs(out.components) <= 1e-12


def test_d_unsupported_rank():
    chart = euclidean(2).chart
    with pytest.raises(UnsupportedRank):
        G.exterior_derivative(chart, TensorField(kind="vector", evaluate=None), (0.0, 0.0))


# ---------------------------------------------------------------------------
# tensor inner products and traces
# ---------------------------------------------------------------------------

def test_inner_of_metric_with_itself_is_dimension():
    g = wavy_metric(5)
    p = (0.1, 0.2, -0.3)
    gv = G.jet_values(Frame(g, p, 0).g)
    t = TensorValue("sym2", gv)
    assert G.tensor_inner(g, t, t, p) == pytest.approx(3.0, rel=1e-12)


def test_inner_of_metric_with_symmetric_tensor_is_trace():
    g = wavy_metric(6)
    p = (0.0, 0.3, 0.1)
    rng = np.random.default_rng(4)
    a = rng.normal(size=(3, 3))
    s = (a + a.T) / 2
    frame = Frame(g, p, 0)
    gv = G.jet_values(frame.g)
    ginv = np.linalg.inv(gv)
    lhs = G.tensor_inner(g, TensorValue("sym2", gv), TensorValue("sym2", s), p)
    assert lhs == pytest.approx(float(np.trace(ginv @ s)), rel=1e-10)


def test_half_wedge_inner_and_operator_trace():
    """For omega = (dx ^ dy)/2 on Euclidean R^2: <omega, omega> = 1/2 and
    tr(F o F) = -1/2 for the raised operator."""
    g = euclidean(2)
    p = (0.0, 0.0)
    omega = np.array([[0.0, 0.5], [-0.5, 0.0]])
    t = TensorValue("antisym2", omega)
    assert G.tensor_inner(g, t, t, p) == pytest.approx(0.5)
    f = TensorValue("op", omega)  # identity metric: raising is free
    assert G.compose_trace(f, f) == pytest.approx(-0.5)
    assert G.op_trace(f) == 0.0


def test_inner_rank_mismatch():
    g = euclidean(2)
    with pytest.raises(RankMismatch):
        G.tensor_inner(g, TensorValue("sym2", np.eye(2)),
                       TensorValue("oneform", np.zeros(2)), (0.0, 0.0))


def test_riemannian_inner_is_positive():
    g = wavy_metric(14)
    rng = np.random.default_rng(0)
    p = (0.1, -0.2, 0.25)
    for _ in range(10):
        v = rng.normal(size=3)
        tv = TensorValue("vector", v)
        assert G.tensor_inner(g, tv, tv, p) > 0.0
        a = rng.normal(size=(3, 3))
        s = (a + a.T) / 2
        ts = TensorValue("sym2", s)
        assert G.tensor_inner(g, ts, ts, p) >= 0.0


def test_tensor_value_symmetry_validation():
    with pytest.raises(ValueError):
        TensorValue("sym2", np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValueError):
        TensorValue("antisym2", np.eye(2))


def test_metric_signature_check():
    g = schwarzschild_metric()
    g.check_signature((0.0, 5.0, 1.2, 0.7))
    chart = Chart(coords=("x", "y"), signature=(1, 1), region=((-1, 1), (-1, 1)))
    gx = MetricField.diagonal(chart, [E.var("x"), E.const(1.0)])
    gx.check_signature((0.5, 0.0))
    with pytest.raises(SingularMetric):
        gx.check_signature((-0.5, 0.0))  # wrong signature
    with pytest.raises(SingularMetric):
        gx.check_signature((0.0, 0.0))   # degenerate
