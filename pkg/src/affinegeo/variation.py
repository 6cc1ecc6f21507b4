"""First-variation checks for the bundle scalar-curvature action.

A deformation family moves the affine metric triple along

    g(t) = g + t s,    delta(t) = t delta,    theta(t) = theta + t h

for a symmetric two-tensor ``s``, a 1-form ``delta`` and a function ``h``.
The deformed structure is rebuilt from scratch at every ``t``: the
``delta`` slot enters through the requirement that the shifted horizontal
lift stays orthogonal to the extra bundle direction, which shifts the
covariant potential by ``-t e^(-2 t h) delta``.  Nothing is linearized by
hand, so comparing analytic first-variation formulas against central
finite differences in ``t`` is a genuine two-route check.

The action is integrated over a periodic box with equal-weight
(trapezoidal, by periodicity) quadrature and a fixed pairwise summation
order, so repeated runs are bit-identical.

Note on the pairing form of the delta sector: with the full-contraction
inner product used package-wide, integration by parts on a periodic
domain gives  integral <d delta, T> = -2 integral <delta, div T>  for a
2-form T (each index pair is counted twice), so the Euler-Lagrange
pairing carries the factor 2 made explicit in ``action_variation``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import expr as E
from . import jets as _jets
from .algebroid import AffineMetricSpec, hat_scalar_value
from .geometry import Frame, MetricField, SingularMetric, _obj, d_form, jet_values

__all__ = [
    "DegenerateFamily", "PeriodicBox", "DeformationFamily",
    "PointwiseVariation", "ActionVariation", "VARIATION_KINDS",
    "first_variation_pointwise", "action_integral", "action_variation",
    "box_integral", "pairwise_sum", "validate_periodicity",
]

VARIATION_KINDS = ("volume_density", "laplacian_theta", "grad_theta_sq",
                   "omega_prime", "tr_FF")


class DegenerateFamily(ArithmeticError):
    """The deformed metric loses invertibility at the probed parameter."""


@dataclass(frozen=True)
class PeriodicBox:
    """Periodic quadrature domain: per-coordinate periods and a per-axis
    grid resolution (equal-weight nodes, endpoint excluded)."""

    periods: tuple
    resolution: int
    origin: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(float(p) for p in self.periods))
        if self.origin is None:
            object.__setattr__(self, "origin", (0.0,) * len(self.periods))
        else:
            object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")

    @property
    def n(self):
        return len(self.periods)

    def grid(self, resolution=None):
        res = int(resolution or self.resolution)
        axes = [self.origin[i] + self.periods[i] * np.arange(res) / res
                for i in range(self.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def cell_volume(self, resolution=None):
        res = int(resolution or self.resolution)
        return float(np.prod(self.periods)) / res ** self.n


def pairwise_sum(values):
    """Deterministic pairwise reduction (order-independent of threading)."""
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


@dataclass(frozen=True)
class DeformationFamily:
    """Deformation data (s, delta, h) over a base scenario, with the
    finite-difference step used for numeric derivatives."""

    base: AffineMetricSpec
    s: tuple
    delta: tuple
    h: E.Expression
    t0: float = 1e-4

    def __post_init__(self):
        n = self.base.chart.n
        s = tuple(tuple(row) for row in self.s)
        if len(s) != n or any(len(r) != n for r in s):
            raise ValueError("s must be an n x n symmetric array of expressions")
        for i in range(n):
            for j in range(n):
                if s[i][j] != s[j][i]:
                    raise ValueError("s must be symmetric")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "delta", tuple(self.delta))
        if len(self.delta) != n:
            raise ValueError("delta needs one component per coordinate")

    def spec_at(self, t):
        """Materialize the deformed triple at parameter t.  The potential
        shift -t e^(-2 t h) delta realizes the orthogonality condition of
        the deformed bundle metric; the twisting 2-form is then recomputed
        from the shifted potential, not hand-linearized."""
        t = float(t)
        if t == 0.0:
            return self.base
        base = self.base
        n = base.chart.n
        tt = E.const(t)
        comps = [[base.metric.comps[i][j] + tt * self.s[i][j] for j in range(n)]
                 for i in range(n)]
        metric = MetricField(base.chart, comps)
        gamma_scale = -tt * E.exp(E.const(-2.0 * t) * self.h)
        a_flat = tuple(base.a_flat[i] + gamma_scale * self.delta[i] for i in range(n))
        theta = base.theta + tt * self.h
        return AffineMetricSpec(chart=base.chart, metric=metric,
                                a_flat=a_flat, theta=theta)

    def check_at(self, point, t=None):
        """Raise DegenerateFamily if g + t s is unusable at the probe."""
        t = self.t0 if t is None else t
        for tt in (-t, t):
            try:
                self.spec_at(tt).metric.check_signature(point)
            except SingularMetric as err:
                raise DegenerateFamily(
                    f"deformed metric fails at t={tt}: {err}") from err

    def max_safe_parameter(self, points, candidates=(0.5, 0.25, 0.1, 0.05, 0.01, 1e-3, 1e-4)):
        """Largest probed |t| keeping the deformed metric valid at all the
        given points (0.0 if even the smallest candidate fails)."""
        for t in candidates:
            try:
                for p in points:
                    self.check_at(p, t)
                return float(t)
            except DegenerateFamily:
                continue
        return 0.0


@dataclass
class PointwiseVariation:
    which: str
    analytic: object
    numeric: object
    abs_err: float
    rel_err: float


def _rel(abs_err, *magnitudes):
    denom = max((float(np.max(np.abs(np.asarray(m, dtype=float)))) for m in magnitudes),
                default=0.0)
    return abs_err / denom if denom > 1e-9 else abs_err


def _family_quantity(fam, t, point, which):
    spec = fam.spec_at(t)
    if which == "volume_density":
        return _jets.value_of(Frame(spec.metric, point, 0).sqrt_abs_det())
    fr = spec.frame(point, 2 if which == "laplacian_theta" else 1)
    if which == "laplacian_theta":
        return _jets.value_of(fr.lap_theta)
    if which == "grad_theta_sq":
        return _jets.value_of(fr.grad_theta_sq)
    if which == "omega_prime":
        return jet_values(fr.omega)
    if which == "tr_FF":
        return _jets.value_of(fr.ff_w_trace)
    raise ValueError(f"unknown variation kind {which!r}")


def _analytic_variation(fam, point, which):
    base = fam.base
    fr = base.frame(point, 2)
    geo = fr.geo
    n = fr.n
    s = geo.eval_array([list(r) for r in fam.s])
    if which == "volume_density":
        trace_s = geo.raise_trace(s)
        return _jets.value_of(0.5 * trace_s * geo.sqrt_abs_det())
    if which == "laplacian_theta":
        h = geo.eval(fam.h)
        lap_h = geo.laplacian(h)
        s_up = geo.raise_first(s)                     # s^i_j
        s_grad = _obj((n,))
        for i in range(n):
            acc = None
            for j in range(n):
                term = s_up[i, j] * fr.grad_theta[j]
                acc = term if acc is None else acc + term
            s_grad[i] = acc
        div_s_grad = geo.div_vector(s_grad)
        d_trace_s = geo.dscalar(geo.raise_trace(s))
        cross = geo.inner_oneform(d_trace_s, fr.dtheta)
        return _jets.value_of(lap_h - div_s_grad + 0.5 * cross)
    if which == "grad_theta_sq":
        h = geo.eval(fam.h)
        dth = fr.dtheta
        dth_sq = _obj((n, n))
        for i in range(n):
            for j in range(n):
                dth_sq[i, j] = dth[i] * dth[j]
        first = geo.inner_two_lower(s, dth_sq)
        second = geo.inner_oneform(geo.dscalar(h), dth)
        return _jets.value_of(-1.0 * first + 2.0 * second)
    if which == "omega_prime":
        delta = geo.eval_array(list(fam.delta))
        dd = d_form(delta, 1, n)
        return -0.5 * jet_values(dd)
    if which == "tr_FF":
        h = geo.eval(fam.h)
        delta = geo.eval_array(list(fam.delta))
        dd = d_form(delta, 1, n)
        em_s = geo.inner_two_lower(fr.em_ricci, s)
        dd_omega = geo.inner_two_lower(dd, fr.omega_w)
        return _jets.value_of(2.0 * em_s + fr.e_theta * dd_omega
                              + 2.0 * h * fr.ff_w_trace)
    raise ValueError(f"unknown variation kind {which!r}")


def first_variation_pointwise(fam, point, which):
    """Analytic first-variation formula vs a central finite difference of
    the fully recomputed quantity under the family."""
    fam.check_at(point)
    t0 = fam.t0
    analytic = _analytic_variation(fam, point, which)
    plus = _family_quantity(fam, t0, point, which)
    minus = _family_quantity(fam, -t0, point, which)
    numeric = (plus - minus) / (2.0 * t0)
    abs_err = float(np.max(np.abs(np.asarray(numeric) - np.asarray(analytic))))
    return PointwiseVariation(which=which, analytic=analytic, numeric=numeric,
                              abs_err=abs_err, rel_err=_rel(abs_err, analytic, numeric))


# -- quadrature ---------------------------------------------------------------


def box_integral(metric, box, integrand, order=2, resolution=None):
    """Equal-weight quadrature of integrand(frame) * sqrt|det g| over the
    periodic box; deterministic pairwise reduction."""
    pts = box.grid(resolution)
    vals = []
    for p in pts:
        fr = Frame(metric, p, order)
        vals.append(float(integrand(fr)) * _jets.value_of(fr.sqrt_abs_det()))
    return pairwise_sum(vals) * box.cell_volume(resolution)


def validate_periodicity(exprs, chart, box, tol=1e-9, samples=8, seed=0):
    """Endpoint comparison: every expression must take equal values at the
    two ends of each axis of the box."""
    rng = np.random.default_rng(seed)
    pts = chart.sample(rng, samples)
    coords = chart.coords
    for e in exprs:
        for axis in range(box.n):
            for p in pts:
                lo = np.array(p)
                lo[axis] = box.origin[axis]
                hi = lo.copy()
                hi[axis] = box.origin[axis] + box.periods[axis]
                a = E.eval_jet(e, lo, 0, coords).value
                b = E.eval_jet(e, hi, 0, coords).value
                if abs(a - b) > tol * max(1.0, abs(a)):
                    raise ValueError(
                        f"field {e.to_text()!r} is not periodic along axis {axis}")


def _spec_expressions(spec):
    out = []
    n = spec.chart.n
    for i in range(n):
        for j in range(i, n):
            out.append(spec.metric.comps[i][j])
    out.extend(spec.a_flat)
    out.append(spec.theta)
    return out


def action_integral(spec, box, resolution=None, check_periodic=True):
    """Quadrature of the bundle scalar curvature times the metric volume
    density over the periodic box."""
    if check_periodic:
        validate_periodicity(_spec_expressions(spec), spec.chart, box)
    pts = box.grid(resolution)
    vals = []
    for p in pts:
        fr = spec.frame(p, 2)
        vals.append(hat_scalar_value(fr) * _jets.value_of(fr.geo.sqrt_abs_det()))
    return pairwise_sum(vals) * box.cell_volume(resolution)


@dataclass
class ActionVariation:
    numeric: float
    analytic: float
    abs_err: float
    rel_err: float
    resolution: int


def _euler_lagrange_density(fr, s, delta, h):
    """Pairing density whose vanishing for all (s, delta, h) characterizes
    critical triples:

        <s, -Ric + 2 em_ricci + (R/2 + tr(F_w F_w)/2 - |grad theta|^2) g
             + 2 dtheta (x) dtheta>
        - 2 <delta, div(e^(2 theta) omega)>
        + (2 tr(F_w F_w) + 4 lap(theta)) h

    (see the module note for the factor 2 on the delta pairing)."""
    geo = fr.geo
    n = fr.n
    coeff = (0.5 * geo.scalar_curvature + 0.5 * fr.ff_w_trace
             - fr.grad_theta_sq)
    pair_s = _obj((n, n))
    ric = geo.ricci
    for i in range(n):
        for j in range(n):
            pair_s[i, j] = (-1.0 * ric[i, j] + 2.0 * fr.em_ricci[i, j]
                            + coeff * geo.g[i, j]
                            + 2.0 * fr.dtheta[i] * fr.dtheta[j])
    s_term = geo.inner_two_lower(s, pair_s)

    w = fr.e_theta * fr.e_theta
    field = _obj((n, n))
    for i in range(n):
        for j in range(n):
            field[i, j] = w * fr.omega[i, j]
    maxwell = geo.div_two_lower(field)
    delta_term = -2.0 * geo.inner_oneform(delta, maxwell)

    h_term = (2.0 * fr.ff_w_trace + 4.0 * fr.lap_theta) * h
    return _jets.value_of(s_term + delta_term + h_term)


def action_variation(fam, box, resolution=None):
    """Numeric dL/dt at t = 0 (central difference of the fully recomputed
    action) against the analytic Euler-Lagrange pairing integral."""
    base = fam.base
    exprs = _spec_expressions(base) + [e for row in fam.s for e in row] \
        + list(fam.delta) + [fam.h]
    validate_periodicity(exprs, base.chart, box)
    fam.check_at(box.grid(resolution)[0])

    t0 = fam.t0
    plus = action_integral(fam.spec_at(t0), box, resolution, check_periodic=False)
    minus = action_integral(fam.spec_at(-t0), box, resolution, check_periodic=False)
    numeric = (plus - minus) / (2.0 * t0)

    pts = box.grid(resolution)
    vals = []
    for p in pts:
        fr = base.frame(p, 2)
        s = fr.geo.eval_array([list(r) for r in fam.s])
        delta = fr.geo.eval_array(list(fam.delta))
        h = fr.geo.eval(fam.h)
        vals.append(_euler_lagrange_density(fr, s, delta, h)
                    * _jets.value_of(fr.geo.sqrt_abs_det()))
    analytic = pairwise_sum(vals) * box.cell_volume(resolution)

    abs_err = abs(numeric - analytic)
    return ActionVariation(numeric=numeric, analytic=analytic, abs_err=abs_err,
                           rel_err=_rel(abs_err, analytic, numeric),
                           resolution=int(resolution or box.resolution))
