"""Semi-Riemannian geometry on a coordinate chart, computed over jets.

All fields are evaluated through :class:`Frame`, which seeds jets at a
chart point and caches the metric, its inverse, Christoffel symbols and
curvature.  Because every derived quantity is assembled with jet
arithmetic, derived tensor fields carry their own exact derivatives, so
divergences of derived fields (Ricci, stress tensors, ...) are computed
analytically rather than by finite differences.

Conventions, fixed package-wide:

* curvature ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
  nabla_[X,Y] Z``, stored as ``riemann[l, k, i, j] = (R(e_i, e_j)e_k)^l``;
* Ricci ``Ric_ij = sum_a riemann[a, i, a, j]`` (unit 2-sphere scalar
  curvature is then +2);
* 2-forms use antisymmetric component storage with
  ``(dx^i wedge dx^j)(e_i, e_j) = 1``;
* traces and tensor inner products pair coordinate frames with their
  reciprocal bases (one inverse-metric factor per paired lower index);
* divergence contracts the covariant derivative on the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as _expr
from . import jets as _jets
from .jets import Jet

SINGULARITY_TOL = 1e-12


class SingularMetric(ArithmeticError):
    """Metric not invertible (or of the wrong signature) at a point."""


class UnsupportedRank(ValueError):
    """Tensor rank/variance not supported by the requested operation."""


class RankMismatch(ValueError):
    """Operands of a tensor inner product have different kinds."""


# -- chart and fields -------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    """Coordinate chart: names, metric signature, and a sampling region of
    per-coordinate open intervals."""

    coords: tuple
    signature: tuple
    region: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "signature", tuple(int(s) for s in self.signature))
        object.__setattr__(self, "region", tuple((float(a), float(b)) for a, b in self.region))
        if len(coords) < 2:
            raise ValueError("chart dimension must be at least 2")
        if len(set(coords)) != len(coords):
            raise ValueError("coordinate names must be distinct")
        if len(self.signature) != len(coords) or any(s not in (-1, 1) for s in self.signature):
            raise ValueError("signature must list +1/-1 per coordinate")
        if len(self.region) != len(coords) or any(b <= a for a, b in self.region):
            raise ValueError("region must give a nonempty open interval per coordinate")

    @property
    def n(self):
        return len(self.coords)

    def center(self):
        return np.array([(a + b) / 2 for a, b in self.region])

    def sample(self, rng, count):
        lo = np.array([a for a, _ in self.region])
        hi = np.array([b for _, b in self.region])
        return lo + (hi - lo) * rng.random((count, self.n))


class MetricField:
    """Symmetric matrix of component expressions g_ij on a chart."""

    def __init__(self, chart, comps):
        n = chart.n
        comps = [[comps[i][j] for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                if comps[i][j] != comps[j][i]:
                    raise ValueError("metric components must be symmetric")
        self.chart = chart
        self.comps = comps

    @classmethod
    def from_lower_triangular(cls, chart, rows):
        n = chart.n
        if len(rows) != n or any(len(rows[i]) != i + 1 for i in range(n)):
            raise ValueError("expected lower-triangular rows of lengths 1..n")
        comps = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                comps[i][j] = comps[j][i] = rows[i][j]
        return cls(chart, comps)

    @classmethod
    def diagonal(cls, chart, entries):
        zero = _expr.const(0.0)
        n = chart.n
        comps = [[entries[i] if i == j else zero for j in range(n)] for i in range(n)]
        return cls(chart, comps)

    def values_at(self, point):
        env = dict(zip(self.chart.coords, [float(c) for c in point]))
        return np.array([[_jets.value_of(self.comps[i][j].eval(env))
                          for j in range(self.chart.n)] for i in range(self.chart.n)])

    def check_signature(self, point):
        g = self.values_at(point)
        scale = max(1.0, float(np.max(np.abs(g))))
        eig = np.linalg.eigvalsh((g + g.T) / 2)
        if np.min(np.abs(eig)) <= SINGULARITY_TOL * scale:
            raise SingularMetric(f"metric numerically singular at {tuple(point)}")
        if sorted(int(np.sign(v)) for v in eig) != sorted(self.chart.signature):
            raise SingularMetric(f"metric signature mismatch at {tuple(point)}")


def _obj(shape):
    return np.empty(shape, dtype=object)


def jet_values(arr):
    """Extract plain float values from a container of jets/floats."""
    if isinstance(arr, (Jet, float, int)):
        return _jets.value_of(arr)
    out = np.empty(np.shape(arr))
    flat_in = np.asarray(arr, dtype=object).reshape(-1)
    out_flat = out.reshape(-1)
    for k, v in enumerate(flat_in):
        out_flat[k] = _jets.value_of(v)
    return out


def jet_matrix_inverse(mat, n):
    """Invert a matrix of jets by Gauss-Jordan elimination with value
    pivoting; exact in the truncated Taylor algebra."""
    a = [[mat[i][j] for j in range(n)] for i in range(n)]
    inv = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    scale = max(1.0, max(abs(_jets.value_of(a[i][j])) for i in range(n) for j in range(n)))
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(_jets.value_of(a[r][col])))
        if abs(_jets.value_of(a[pivot][col])) <= SINGULARITY_TOL * scale:
            raise SingularMetric("metric is numerically singular")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
        d = a[col][col]
        for j in range(n):
            a[col][j] = a[col][j] / d
            inv[col][j] = inv[col][j] / d
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if isinstance(f, float) and f == 0.0:
                continue
            for j in range(n):
                a[r][j] = a[r][j] - f * a[col][j]
                inv[r][j] = inv[r][j] - f * inv[col][j]
    out = _obj((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = inv[i][j]
    return out


class Frame:
    """All Levi-Civita data of one metric at one chart point, as jets of a
    fixed order.  Derived quantities live at lower jet orders: Christoffel
    symbols cost one derivative, curvature two."""

    def __init__(self, metric, point, order):
        self.metric = metric
        self.chart = metric.chart
        self.point = np.array([float(c) for c in point])
        self.order = int(order)
        n = self.chart.n
        self.n = n
        seeds = _jets.seed_point(self.point, self.order)
        self.env = dict(zip(self.chart.coords, seeds))
        g = _obj((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = self.eval(metric.comps[i][j])
        self.g = g
        self._cache = {}

    # -- evaluation helpers -------------------------------------------

    def eval(self, e):
        out = e.eval(self.env)
        if not isinstance(out, Jet):
            out = Jet.constant(out, self.n, self.order)
        return out

    def eval_array(self, exprs):
        arr = np.asarray(exprs, dtype=object)
        out = _obj(arr.shape)
        flat_in = arr.reshape(-1)
        flat_out = out.reshape(-1)
        for k, e in enumerate(flat_in):
            flat_out[k] = self.eval(e)
        return out

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # -- metric algebra -------------------------------------------------

    @property
    def ginv(self):
        return self._cached("ginv", lambda: jet_matrix_inverse(self.g, self.n))

    @property
    def christoffel(self):
        """Gamma[k, i, j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)."""
        return self._cached("christoffel", self._christoffel)

    def _christoffel(self):
        if self.order < 1:
            raise ValueError("christoffel symbols need jet order >= 1")
        n = self.n
        g, ginv = self.g, self.ginv
        dg = _obj((n, n, n))  # dg[l, i, j] = d_l g_ij
        for i in range(n):
            for j in range(i, n):
                for l in range(n):
                    dg[l, i, j] = dg[l, j, i] = g[i, j].partial(l)
        gamma = _obj((n, n, n))
        for i in range(n):
            for j in range(i, n):
                for k in range(n):
                    acc = None
                    for l in range(n):
                        term = ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                        acc = term if acc is None else acc + term
                    val = 0.5 * acc
                    gamma[k, i, j] = gamma[k, j, i] = val
        return gamma

    @property
    def riemann(self):
        """riemann[l, k, i, j] = (R(e_i, e_j) e_k)^l."""
        return self._cached("riemann", self._riemann)

    def _riemann(self):
        if self.order < 2:
            raise ValueError("curvature needs jet order >= 2")
        n = self.n
        gamma = self.christoffel
        riem = _obj((n, n, n, n))
        zero = Jet.constant(0.0, n, max(self.order - 2, 0))
        for l in range(n):
            for k in range(n):
                for i in range(n):
                    riem[l, k, i, i] = zero
                for i in range(n):
                    for j in range(i + 1, n):
                        acc = gamma[l, j, k].partial(i) - gamma[l, i, k].partial(j)
                        for m in range(n):
                            acc = acc + (gamma[l, i, m] * gamma[m, j, k]
                                         - gamma[l, j, m] * gamma[m, i, k])
                        riem[l, k, i, j] = acc
                        riem[l, k, j, i] = -acc
        return riem

    @property
    def ricci(self):
        """Ric_ij = sum_a riemann[a, i, a, j]; symmetric."""
        return self._cached("ricci", self._ricci)

    def _ricci(self):
        n = self.n
        riem = self.riemann
        ric = _obj((n, n))
        for i in range(n):
            for j in range(i, n):
                acc = None
                for a in range(n):
                    term = riem[a, i, a, j]
                    acc = term if acc is None else acc + term
                ric[i, j] = ric[j, i] = acc
        return ric

    @property
    def scalar_curvature(self):
        return self._cached("scalar", lambda: self.raise_trace(self.ricci))

    # -- index gymnastics ------------------------------------------------

    def raise_index(self, oneform):
        n = self.n
        out = _obj((n,))
        for i in range(n):
            acc = None
            for j in range(n):
                term = self.ginv[i, j] * oneform[j]
                acc = term if acc is None else acc + term
            out[i] = acc
        return out

    def lower_index(self, vector):
        n = self.n
        out = _obj((n,))
        for i in range(n):
            acc = None
            for j in range(n):
                term = self.g[i, j] * vector[j]
                acc = term if acc is None else acc + term
            out[i] = acc
        return out

    def raise_trace(self, sym2):
        """g^{ij} T_ij."""
        n = self.n
        acc = None
        for i in range(n):
            for j in range(n):
                term = self.ginv[i, j] * sym2[i, j]
                acc = term if acc is None else acc + term
        return acc

    def raise_first(self, two_tensor):
        """T^i_j = g^{ik} T_kj (raise the first index of a (0,2) tensor)."""
        n = self.n
        out = _obj((n, n))
        for i in range(n):
            for j in range(n):
                acc = None
                for k in range(n):
                    term = self.ginv[i, k] * two_tensor[k, j]
                    acc = term if acc is None else acc + term
                out[i, j] = acc
        return out

    # -- scalar calculus --------------------------------------------------

    def dscalar(self, f):
        n = self.n
        out = _obj((n,))
        for i in range(n):
            out[i] = f.partial(i)
        return out

    def gradient(self, f):
        return self.raise_index(self.dscalar(f))

    def hessian(self, f):
        """Hes(f)_ij = d_i d_j f - Gamma^k_ij d_k f."""
        n = self.n
        gamma = self.christoffel
        df = self.dscalar(f)
        out = _obj((n, n))
        for i in range(n):
            for j in range(i, n):
                acc = df[i].partial(j)
                for k in range(n):
                    acc = acc - gamma[k, i, j] * df[k]
                out[i, j] = out[j, i] = acc
        return out

    def laplacian(self, f):
        return self.raise_trace(self.hessian(f))

    def grad_square(self, f):
        """|grad f|^2 = g^{ij} d_i f d_j f (sign follows the signature)."""
        df = self.dscalar(f)
        acc = None
        for i in range(self.n):
            for j in range(self.n):
                term = self.ginv[i, j] * df[i] * df[j]
                acc = term if acc is None else acc + term
        return acc

    # -- covariant derivative and divergences ------------------------------

    def nabla_oneform(self, omega):
        """(nabla omega)[i, j] = d_i omega_j - Gamma^k_ij omega_k."""
        n = self.n
        gamma = self.christoffel
        out = _obj((n, n))
        for i in range(n):
            for j in range(n):
                acc = omega[j].partial(i)
                for k in range(n):
                    acc = acc - gamma[k, i, j] * omega[k]
                out[i, j] = acc
        return out

    def nabla_two_lower(self, t):
        """(nabla T)[a, i, j] = d_a T_ij - Gamma^k_ai T_kj - Gamma^k_aj T_ik."""
        n = self.n
        gamma = self.christoffel
        out = _obj((n, n, n))
        for a in range(n):
            for i in range(n):
                for j in range(n):
                    acc = t[i, j].partial(a)
                    for k in range(n):
                        acc = acc - gamma[k, a, i] * t[k, j] - gamma[k, a, j] * t[i, k]
                    out[a, i, j] = acc
        return out

    def nabla_op(self, f):
        """(nabla F)[a, i, j] = d_a F^i_j + Gamma^i_am F^m_j - Gamma^m_aj F^i_m."""
        n = self.n
        gamma = self.christoffel
        out = _obj((n, n, n))
        for a in range(n):
            for i in range(n):
                for j in range(n):
                    acc = f[i, j].partial(a)
                    for m in range(n):
                        acc = acc + gamma[i, a, m] * f[m, j] - gamma[m, a, j] * f[i, m]
                    out[a, i, j] = acc
        return out

    def div_vector(self, v):
        n = self.n
        gamma = self.christoffel
        acc = None
        for i in range(n):
            term = v[i].partial(i)
            for m in range(n):
                term = term + gamma[i, i, m] * v[m]
            acc = term if acc is None else acc + term
        return acc

    def div_oneform(self, omega):
        nab = self.nabla_oneform(omega)
        acc = None
        for i in range(self.n):
            for j in range(self.n):
                term = self.ginv[i, j] * nab[i, j]
                acc = term if acc is None else acc + term
        return acc

    def div_two_lower(self, t):
        """(div T)_j = g^{ab} (nabla_a T)_{bj}; works for symmetric and
        antisymmetric (0,2) fields alike."""
        n = self.n
        nab = self.nabla_two_lower(t)
        out = _obj((n,))
        for j in range(n):
            acc = None
            for a in range(n):
                for b in range(n):
                    term = self.ginv[a, b] * nab[a, b, j]
                    acc = term if acc is None else acc + term
            out[j] = acc
        return out

    def div_op(self, f):
        """(div F)^k = g^{ab} (nabla_a F)^k_b for a (1,1) field."""
        n = self.n
        nab = self.nabla_op(f)
        out = _obj((n,))
        for k in range(n):
            acc = None
            for a in range(n):
                for b in range(n):
                    term = self.ginv[a, b] * nab[a, k, b]
                    acc = term if acc is None else acc + term
            out[k] = acc
        return out

    # -- inner products ----------------------------------------------------

    def inner_vector(self, v, w):
        acc = None
        for i in range(self.n):
            for j in range(self.n):
                term = self.g[i, j] * v[i] * w[j]
                acc = term if acc is None else acc + term
        return acc

    def inner_oneform(self, a, b):
        acc = None
        for i in range(self.n):
            for j in range(self.n):
                term = self.ginv[i, j] * a[i] * b[j]
                acc = term if acc is None else acc + term
        return acc

    def inner_two_lower(self, t, s):
        """Full contraction g^{ia} g^{jb} T_ij S_ab."""
        n = self.n
        su = self.raise_first(s)        # S^a_b
        acc = None
        for a in range(n):
            for b in range(n):
                for j in range(n):
                    term = su[a, j] * self.ginv[j, b] * t[a, b]
                    acc = term if acc is None else acc + term
        return acc

    def inner_op(self, t, s):
        """<T, S> = sum_i <T(e_i), S(e^i)> = g_ab T^a_i S^b_j g^{ij}."""
        n = self.n
        acc = None
        for a in range(n):
            for b in range(n):
                for i in range(n):
                    for j in range(n):
                        term = self.g[a, b] * t[a, i] * s[b, j] * self.ginv[i, j]
                        acc = term if acc is None else acc + term
        return acc

    def op_trace(self, t):
        acc = None
        for i in range(self.n):
            acc = t[i, i] if acc is None else acc + t[i, i]
        return acc

    def compose_trace(self, t, s):
        """tr(T o S) = T^i_m S^m_i."""
        acc = None
        for i in range(self.n):
            for m in range(self.n):
                term = t[i, m] * s[m, i]
                acc = term if acc is None else acc + term
        return acc

    def sqrt_abs_det(self):
        """Scalar density sqrt(|det g|) as a jet (coordinate volume factor)."""
        n = self.n
        det = _jet_det(self.g, n)
        val = _jets.value_of(det)
        if val == 0.0:
            raise SingularMetric("metric is numerically singular")
        return _jets.sqrt(det if val > 0 else -det)


def _jet_det(mat, n):
    """Determinant by cofactor expansion (n is small)."""
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    acc = None
    for j in range(n):
        minor = [[mat[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = mat[0][j] * _jet_det(minor, n - 1)
        if j % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    return acc


# -- exterior derivative -----------------------------------------------------


def d_form(comps, k, n):
    """Coordinate exterior derivative of jet-valued k-form components for
    k = 0, 1, 2."""
    if k == 0:
        f = comps.item() if isinstance(comps, np.ndarray) else comps
        out = _obj((n,))
        for i in range(n):
            out[i] = f.partial(i)
        return out
    if k == 1:
        out = _obj((n, n))
        zero = None
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    if zero is None:
                        zero = comps[i].partial(i) * 0.0
                    out[i, i] = zero
                else:
                    v = comps[j].partial(i) - comps[i].partial(j)
                    out[i, j] = v
                    out[j, i] = -v
        return out
    if k == 2:
        out = _obj((n, n, n))
        zero = comps[0, 1].partial(0) * 0.0 if n >= 2 else None
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    if i == j or j == l or i == l:
                        out[i, j, l] = zero
        for i in range(n):
            for j in range(i + 1, n):
                for l in range(j + 1, n):
                    v = comps[j, l].partial(i) + comps[l, i].partial(j) + comps[i, j].partial(l)
                    out[i, j, l] = out[j, l, i] = out[l, i, j] = v
                    out[j, i, l] = out[i, l, j] = out[l, j, i] = -v
        return out
    raise UnsupportedRank(f"exterior derivative supports k = 0, 1, 2, not {k}")


# -- public, value-level operations per the module contract ------------------


@dataclass
class TensorValue:
    """Tensor components at a point with a rank/variance tag.

    Kinds: 'scalar', 'vector', 'oneform', 'sym2', 'antisym2', 'op',
    'form3'."""

    kind: str
    components: np.ndarray

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float) \
            if self.kind != "scalar" else float(self.components)
        self.check_symmetry()

    def check_symmetry(self, tol=1e-12):
        if self.kind in ("sym2", "antisym2"):
            c = self.components
            scale = max(1.0, float(np.max(np.abs(c))))
            sign = 1.0 if self.kind == "sym2" else -1.0
            if np.max(np.abs(c - sign * c.T)) > tol * scale:
                raise ValueError(f"declared {self.kind} symmetry violated")


@dataclass
class TensorField:
    """A tensor field given as a jet-level evaluator on a frame."""

    kind: str
    evaluate: object  # callable Frame -> object ndarray of jets

    @classmethod
    def from_expressions(cls, kind, exprs):
        return cls(kind=kind, evaluate=lambda frame: frame.eval_array(exprs))


def christoffel(metric, point, order=2):
    """Christoffel symbols Gamma^k_ij at a point (float array [k, i, j])."""
    return jet_values(Frame(metric, point, max(order, 1)).christoffel)


def curvature(metric, point, order=2):
    """(Riemann [l,k,i,j], Ricci [i,j], scalar) at a point."""
    frame = Frame(metric, point, max(order, 2))
    return (jet_values(frame.riemann), jet_values(frame.ricci),
            _jets.value_of(frame.scalar_curvature))


@dataclass
class ScalarCalculus:
    grad: np.ndarray
    dtheta: np.ndarray
    hessian: np.ndarray
    laplacian: float
    grad_square: float


def scalar_calculus(metric, theta, point, order=2):
    """Gradient, differential, Hessian, Laplacian and |grad|^2 of a scalar
    expression at a point."""
    frame = Frame(metric, point, max(order, 2))
    f = frame.eval(theta)
    return ScalarCalculus(
        grad=jet_values(frame.gradient(f)),
        dtheta=jet_values(frame.dscalar(f)),
        hessian=jet_values(frame.hessian(f)),
        laplacian=_jets.value_of(frame.laplacian(f)),
        grad_square=_jets.value_of(frame.grad_square(f)),
    )


_DIV_DISPATCH = {
    "vector": ("scalar", "div_vector"),
    "oneform": ("scalar", "div_oneform"),
    "sym2": ("oneform", "div_two_lower"),
    "antisym2": ("oneform", "div_two_lower"),
    "op": ("vector", "div_op"),
}


def divergence(metric, field, point, order=3):
    """Divergence of a tensor field at a point; the contraction runs over
    the first slot of the covariant derivative."""
    if field.kind not in _DIV_DISPATCH:
        raise UnsupportedRank(f"divergence does not support kind {field.kind!r}")
    out_kind, method = _DIV_DISPATCH[field.kind]
    frame = Frame(metric, point, order)
    comps = field.evaluate(frame)
    result = getattr(frame, method)(comps)
    if out_kind == "scalar":
        return TensorValue("scalar", _jets.value_of(result))
    return TensorValue(out_kind, jet_values(result))


def exterior_derivative(chart, field, point, order=2):
    """Exterior derivative of a k-form field (k = 0, 1, 2) at a point."""
    kind_in = field.kind
    k = {"scalar": 0, "oneform": 1, "antisym2": 2}.get(kind_in)
    if k is None:
        raise UnsupportedRank(f"exterior derivative does not support {kind_in!r}")
    flat = MetricField.diagonal(chart, [_expr.const(1.0)] * chart.n)
    frame = Frame(flat, point, order)
    comps = field.evaluate(frame)
    out = d_form(comps, k, chart.n)
    kind_out = {0: "oneform", 1: "antisym2", 2: "form3"}[k]
    return TensorValue(kind_out, jet_values(out))


def tensor_inner(metric, t, s, point, order=1):
    """Full tensor inner product of two same-kind tensor values at a point."""
    if t.kind != s.kind:
        raise RankMismatch(f"cannot pair {t.kind!r} with {s.kind!r}")
    frame = Frame(metric, point, order)
    tc = np.asarray(t.components, dtype=object)
    sc = np.asarray(s.components, dtype=object)
    if t.kind == "scalar":
        return float(t.components) * float(s.components)
    if t.kind == "vector":
        return _jets.value_of(frame.inner_vector(tc, sc))
    if t.kind == "oneform":
        return _jets.value_of(frame.inner_oneform(tc, sc))
    if t.kind in ("sym2", "antisym2"):
        return _jets.value_of(frame.inner_two_lower(tc, sc))
    if t.kind == "op":
        return _jets.value_of(frame.inner_op(tc, sc))
    raise UnsupportedRank(f"tensor inner product does not support {t.kind!r}")


def op_trace(t):
    """tr(T) for a (1,1) tensor value."""
    return float(np.trace(np.asarray(t.components, dtype=float)))


def compose_trace(t, s):
    """tr(T o S) for (1,1) tensor values."""
    return float(np.einsum("im,mi->", np.asarray(t.components, float),
                           np.asarray(s.components, float)))
