"""Named residual checks and the scenario runner.

Every check computes a (residual, scale) pair at sampled points (or once
per scenario for integral checks); a check passes when
``max_abs_residual <= tolerance * scale`` with
``scale = max(1, largest tensor entry entering the identity)``.
Conditional checks (divergence identities that presuppose the Maxwell or
scalar sector) and checks annotated ``expected_nonzero`` in the scenario
never fail a run; they annotate the report.

Runs are deterministic: sample points and all per-check random draws
derive from the scenario seed, independent of the thread count, and all
aggregation is by maximum.
"""

from __future__ import annotations

import json
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from . import field_eq as FE
from . import jets as J
from . import variation as V
from .algebroid import basis_sections, hat_scalar_value, _hat_ricci_blocks
from .expr import DomainError
from .generators import (random_periodic_scalar, random_section_field,
                         random_vectors)
from .geometry import SingularMetric, _obj, d_form, jet_values

REPORT_SCHEMA = "affinegeo.report/1"


def _sup(arr):
    arr = np.asarray(arr, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


class PointContext:
    """Frames and shared results of one scenario at one point.

    Frames are cached per exact jet order: handing a low-order check a
    higher-order frame would silently make every jet operation costlier."""

    def __init__(self, spec, point):
        self.spec = spec
        self.point = point
        self._frames = {}
        self._shared = {}

    def frame(self, order):
        fr = self._frames.get(order)
        if fr is None:
            fr = self.spec.frame(self.point, order)
            self._frames[order] = fr
        return fr

    def field_residuals(self):
        if "residuals" not in self._shared:
            self._shared["residuals"] = FE.residuals(self.spec, self.point,
                                                     frame=self.frame(2))
        return self._shared["residuals"]

    def divergence_identities(self):
        if "div" not in self._shared:
            self._shared["div"] = FE.divergence_identities(self.spec, self.point,
                                                           frame=self.frame(2))
        return self._shared["div"]


@dataclass(frozen=True)
class CheckDef:
    fn: object
    tolerance: float
    order: int
    description: str
    kind: str = "point"          # 'point' or 'scenario'
    conditional: bool = False
    needs_family: bool = False
    needs_box: bool = False


# -- point checks -------------------------------------------------------------


def _metric_signature(ctx, rng, scenario):
    try:
        ctx.spec.metric.check_signature(ctx.point)
    except SingularMetric:
        return 1.0, 1.0
    return 0.0, 1.0


def _christoffel_symmetry(ctx, rng, scenario):
    gam = jet_values(ctx.frame(1).geo.christoffel)
    return _sup(gam - np.swapaxes(gam, 1, 2)), max(1.0, _sup(gam))


def _ricci_flat(ctx, rng, scenario):
    fr = ctx.frame(2)
    riem = jet_values(fr.geo.riemann)
    return _sup(jet_values(fr.geo.ricci)), max(1.0, _sup(riem))


def _scalar_curvature_expected(ctx, rng, scenario):
    expected = float(scenario.params.get("expected_scalar_curvature", 0.0))
    val = J.value_of(ctx.frame(2).geo.scalar_curvature)
    return abs(val - expected), max(1.0, abs(val), abs(expected))


def _bianchi_first(ctx, rng, scenario):
    riem = jet_values(ctx.frame(2).geo.riemann)
    cyc = riem + np.transpose(riem, (0, 2, 3, 1)) + np.transpose(riem, (0, 3, 1, 2))
    return _sup(cyc), max(1.0, _sup(riem))


def _bianchi_contracted(ctx, rng, scenario):
    fr = ctx.frame(3)
    geo = fr.geo
    n = fr.n
    ein = _obj((n, n))
    for i in range(n):
        for j in range(n):
            ein[i, j] = geo.ricci[i, j] - 0.5 * geo.scalar_curvature * geo.g[i, j]
    div = jet_values(geo.div_two_lower(ein))
    return _sup(div), max(1.0, _sup(jet_values(geo.ricci)),
                          abs(J.value_of(geo.scalar_curvature)))


def _metric_divergence(ctx, rng, scenario):
    fr = ctx.frame(2)
    div = jet_values(fr.geo.div_two_lower(fr.geo.g))
    return _sup(div), max(1.0, _sup(jet_values(fr.geo.g)))


def _dd_zero(ctx, rng, scenario):
    fr = ctx.frame(2)
    geo = fr.geo
    n = fr.n
    coords = ctx.spec.chart.coords
    f = random_periodic_scalar(rng, coords, 0.8)
    omega = [random_periodic_scalar(rng, coords, 0.8) for _ in range(n)]
    df = d_form(geo.eval(f), 0, n)
    ddf = jet_values(d_form(df, 1, n))
    dom = d_form(geo.eval_array(omega), 1, n)
    ddom = jet_values(d_form(dom, 2, n))
    scale = max(1.0, _sup(jet_values(df)), _sup(jet_values(dom)))
    return max(_sup(ddf), _sup(ddom)), scale


def _omega_closed(ctx, rng, scenario):
    fr = ctx.frame(2)
    dom = jet_values(d_form(fr.omega, 2, fr.n))
    return _sup(dom), max(1.0, _sup(jet_values(fr.omega)))


def _omega_routes(ctx, rng, scenario):
    fr = ctx.frame(2)
    a = jet_values(fr.omega)
    b = jet_values(fr.omega_from_nabla)
    return _sup(a - b), max(1.0, _sup(a))


def _s_theta_trace(ctx, rng, scenario):
    fr = ctx.frame(2)
    trace = J.value_of(fr.geo.raise_trace(fr.s_theta))
    expected = J.value_of(fr.lap_theta) + J.value_of(fr.grad_theta_sq)
    return abs(trace - expected), max(1.0, abs(expected))


def _ff_trace_vs_omega(ctx, rng, scenario):
    fr = ctx.frame(1)
    tr = J.value_of(fr.ff_trace)
    omega_sq = J.value_of(fr.geo.inner_two_lower(fr.omega, fr.omega))
    return abs(tr + omega_sq), max(1.0, abs(tr), abs(omega_sq))


def _omega_bianchi(ctx, rng, scenario):
    fr = ctx.frame(2)
    nab = jet_values(fr.geo.nabla_two_lower(fr.omega))
    v = random_vectors(rng, fr.n, 3)
    term = (np.einsum("aij,a,i,j->", nab, v[0], v[1], v[2])
            + np.einsum("aij,a,i,j->", nab, v[1], v[2], v[0])
            + np.einsum("aij,a,i,j->", nab, v[2], v[0], v[1]))
    return abs(float(term)), max(1.0, _sup(nab))


def _jacobi(ctx, rng, scenario):
    from .algebroid import _section_add

    fr = ctx.frame(2)
    chart = ctx.spec.chart
    a, b, c = [fr.eval_section(random_section_field(rng, chart)) for _ in range(3)]
    res = fr.bracket(fr.bracket(a, b), c)
    res = _section_add(res, fr.bracket(fr.bracket(b, c), a))
    res = _section_add(res, fr.bracket(fr.bracket(c, a), b))
    out = res.values()
    return max(_sup(out.x), abs(out.f)), 1.0


def _anchor_compat(ctx, rng, scenario):
    fr = ctx.frame(2)
    chart = ctx.spec.chart
    s1 = fr.eval_section(random_section_field(rng, chart))
    s2 = fr.eval_section(random_section_field(rng, chart))
    br = fr.bracket(s1, s2).values()
    lie = jet_values(fr.lie_bracket_vectors(s1.x, s2.x))
    return _sup(br.x - lie), max(1.0, _sup(lie))


def _torsion_free(ctx, rng, scenario):
    from .algebroid import _section_add, _section_scale

    fr = ctx.frame(2)
    chart = ctx.spec.chart
    s1 = fr.eval_section(random_section_field(rng, chart))
    s2 = fr.eval_section(random_section_field(rng, chart))
    lhs = _section_add(fr.hat_connection(s1, s2),
                       _section_scale(fr.hat_connection(s2, s1), -1.0))
    res = _section_add(lhs, _section_scale(fr.bracket(s1, s2), -1.0)).values()
    return max(_sup(res.x), abs(res.f)), 1.0


def _connection_metric_compat(ctx, rng, scenario):
    fr = ctx.frame(2)
    chart = ctx.spec.chart
    s, a, b = [fr.eval_section(random_section_field(rng, chart)) for _ in range(3)]
    lhs = J.value_of(fr.directional(s.x, fr.inner_section(a, b)))
    rhs = J.value_of(fr.inner_section(fr.hat_connection(s, a), b)
                     + fr.inner_section(a, fr.hat_connection(s, b)))
    return abs(lhs - rhs), max(1.0, abs(lhs), abs(rhs))


def _connection_vs_koszul(ctx, rng, scenario):
    fr = ctx.frame(1)
    basis = [fr.eval_section(s) for s in basis_sections(ctx.spec.chart)]
    worst = 0.0
    for s1 in basis:
        for s2 in basis:
            a = fr.hat_connection(s1, s2).values()
            b = fr.hat_connection_koszul(s1, s2).values()
            worst = max(worst, _sup(a.x - b.x), abs(a.f - b.f))
    return worst, 1.0


def _curvature_vs_commutator(ctx, rng, scenario):
    fr = ctx.frame(2)
    chart = ctx.spec.chart
    secs = [fr.eval_section(random_section_field(rng, chart)) for _ in range(3)]
    a = fr.hat_curvature(*secs).values()
    b = fr.hat_curvature_direct(*secs).values()
    scale = max(1.0, _sup(a.x), abs(a.f))
    return max(_sup(a.x - b.x), abs(a.f - b.f)), scale


def _ricci_vs_curvature_trace(ctx, rng, scenario):
    from .algebroid import hat_ricci_via_traces

    closed = _hat_ricci_blocks(ctx.frame(2))
    traced = hat_ricci_via_traces(ctx.spec, ctx.point, order=2, direct=True)
    scale = max(1.0, abs(closed.unit_unit), _sup(closed.vector_block),
                _sup(closed.mixed))
    resid = max(abs(closed.unit_unit - traced.unit_unit),
                _sup(closed.mixed - traced.mixed),
                _sup(closed.vector_block - traced.vector_block))
    return resid, scale


def _scalar_vs_ricci_trace(ctx, rng, scenario):
    fr = ctx.frame(2)
    value = hat_scalar_value(fr)
    blocks = _hat_ricci_blocks(fr)
    ginv = jet_values(fr.geo.ginv)
    traced = blocks.unit_unit + float(np.sum(ginv * blocks.vector_block))
    return abs(value - traced), max(1.0, abs(value))


def _einstein(ctx, rng, scenario):
    out = ctx.field_residuals()
    return _sup(out.einstein), out.scales["einstein"]


def _einstein_stress_form(ctx, rng, scenario):
    out = ctx.field_residuals()
    return _sup(out.einstein_stress), out.scales["einstein_stress"]


def _maxwell(ctx, rng, scenario):
    out = ctx.field_residuals()
    return _sup(out.maxwell), out.scales["maxwell"]


def _maxwell_div_form(ctx, rng, scenario):
    out = ctx.field_residuals()
    return _sup(out.maxwell_div_form), out.scales["maxwell_div_form"]


def _scalar_field(ctx, rng, scenario):
    out = ctx.field_residuals()
    return abs(out.scalar_field), out.scales["scalar_field"]


def _trace_identity(ctx, rng, scenario):
    out = ctx.field_residuals()
    if out.trace is None:
        return 0.0, 1.0
    return abs(out.trace), out.scales["trace"]


def _stress_form_consistency(ctx, rng, scenario):
    fr = ctx.frame(2)
    out = ctx.field_residuals()
    g = jet_values(fr.geo.g)
    scal = J.value_of(fr.geo.scalar_curvature)
    gsq = J.value_of(fr.grad_theta_sq)
    gap = out.einstein_stress - out.einstein + 0.5 * (scal - 2.0 * gsq) * g
    return _sup(gap), out.scales["einstein"]


def _maxwell_covanish(ctx, rng, scenario):
    fr = ctx.frame(2)
    out = ctx.field_residuals()
    w = float(np.exp(2.0 * J.value_of(fr.theta)))
    return _sup(out.maxwell - w * out.maxwell_div_form), \
        max(1.0, _sup(out.maxwell), w * _sup(out.maxwell_div_form))


def _div_em_ricci(ctx, rng, scenario):
    out = ctx.divergence_identities()
    return _sup(out.ric_em_div), out.scales["ric_em_div"]


def _div_ff_trace_metric(ctx, rng, scenario):
    out = ctx.divergence_identities()
    return _sup(out.trace_metric_div), out.scales["trace_metric_div"]


def _div_scalar_stress(ctx, rng, scenario):
    out = ctx.divergence_identities()
    return _sup(out.scalar_stress_div), out.scales["scalar_stress_div"]


def _div_em_stress(ctx, rng, scenario):
    out = ctx.divergence_identities()
    return _sup(out.em_stress_div), out.scales["em_stress_div"]


def _conservation(ctx, rng, scenario):
    out = FE.conservation_check(ctx.spec, ctx.point, frame=ctx.frame(2))
    return _sup(out.divergence), out.scale


# -- scenario-level checks ------------------------------------------------------


def _periodicity(scenario, rng):
    exprs = V._spec_expressions(scenario.spec)
    if scenario.family is not None:
        fam = scenario.family
        exprs += [e for row in fam.s for e in row] + list(fam.delta) + [fam.h]
    try:
        V.validate_periodicity(exprs, scenario.spec.chart, scenario.box)
    except ValueError:
        return 1.0, 1.0
    return 0.0, 1.0


def _integration_by_parts(scenario, rng):
    spec = scenario.spec
    chart = spec.chart
    coords = chart.coords
    s_expr = random_periodic_scalar(rng, coords, 0.7)
    t_exprs = [random_periodic_scalar(rng, coords, 0.7) for _ in range(chart.n)]
    box = scenario.box

    def lhs(fr):
        ds = fr.dscalar(fr.eval(s_expr))
        return J.value_of(fr.inner_oneform(ds, fr.eval_array(t_exprs)))

    def rhs(fr):
        return J.value_of(fr.eval(s_expr) * fr.div_oneform(fr.eval_array(t_exprs)))

    a = V.box_integral(spec.metric, box, lhs, order=1)
    b = V.box_integral(spec.metric, box, rhs, order=2)
    return abs(a + b), max(1.0, abs(a), abs(b))


def _variation_pointwise(scenario, rng):
    fam = scenario.family
    pts = scenario.spec.chart.sample(rng, min(scenario.points, 5))
    worst = 0.0
    for p in pts:
        for which in V.VARIATION_KINDS:
            out = V.first_variation_pointwise(fam, p, which)
            worst = max(worst, out.rel_err)
    return worst, 1.0


def _variation_action(scenario, rng):
    out = V.action_variation(scenario.family, scenario.box)
    return out.rel_err, 1.0


CHECKS = {
    "metric_signature": CheckDef(_metric_signature, 1e-12, 0,
                                 "declared signature holds at every sample point"),
    "christoffel_symmetry": CheckDef(_christoffel_symmetry, 1e-14, 1,
                                     "connection coefficients symmetric in the lower indices"),
    "ricci_flat": CheckDef(_ricci_flat, 1e-9, 2, "Ricci tensor vanishes (vacuum solution)"),
    "scalar_curvature_expected": CheckDef(_scalar_curvature_expected, 1e-10, 2,
                                          "scalar curvature equals checks.params.expected_scalar_curvature"),
    "bianchi_first": CheckDef(_bianchi_first, 1e-9, 2,
                              "first Bianchi identity of the Riemann tensor"),
    "bianchi_contracted": CheckDef(_bianchi_contracted, 1e-6, 3,
                                   "divergence of the Einstein tensor vanishes"),
    "metric_divergence": CheckDef(_metric_divergence, 1e-10, 2,
                                  "metric compatibility: div g = 0"),
    "dd_zero": CheckDef(_dd_zero, 1e-10, 2,
                        "exterior derivative squares to zero on random fields"),
    "omega_closed": CheckDef(_omega_closed, 1e-10, 2, "the twisting 2-form is closed"),
    "omega_routes": CheckDef(_omega_routes, 1e-10, 2,
                             "exterior vs covariant route to the twisting 2-form"),
    "s_theta_trace": CheckDef(_s_theta_trace, 1e-10, 2,
                              "tr(S_theta) = lap(theta) + |grad theta|^2"),
    "ff_trace_vs_omega": CheckDef(_ff_trace_vs_omega, 1e-10, 1,
                                  "tr(F o F) = -<omega, omega>"),
    "omega_bianchi": CheckDef(_omega_bianchi, 1e-8, 2,
                              "cyclic covariant-derivative identity of the 2-form"),
    "jacobi": CheckDef(_jacobi, 1e-7, 2, "Jacobi identity of the twisted bracket"),
    "anchor_compat": CheckDef(_anchor_compat, 1e-8, 2,
                              "anchor of a bracket is the bracket of anchors"),
    "torsion_free": CheckDef(_torsion_free, 1e-8, 2,
                             "connection is torsion-free against the bracket"),
    "connection_metric_compat": CheckDef(_connection_metric_compat, 1e-8, 2,
                                         "connection is metric for the bundle inner product"),
    "connection_vs_koszul": CheckDef(_connection_vs_koszul, 1e-9, 1,
                                     "closed-form connection vs the six-term Koszul solve"),
    "curvature_vs_commutator": CheckDef(_curvature_vs_commutator, 1e-7, 2,
                                        "closed-form curvature vs the connection commutator"),
    "ricci_vs_curvature_trace": CheckDef(_ricci_vs_curvature_trace, 1e-7, 2,
                                         "Ricci blocks vs traces of the commutator curvature"),
    "scalar_vs_ricci_trace": CheckDef(_scalar_vs_ricci_trace, 1e-10, 2,
                                      "bundle scalar curvature vs the Ricci-block trace"),
    "einstein": CheckDef(_einstein, 1e-9, 2, "Ricci-form field equation residual"),
    "einstein_stress_form": CheckDef(_einstein_stress_form, 1e-9, 2,
                                     "stress-form (Einstein-tensor) field equation residual"),
    "maxwell": CheckDef(_maxwell, 1e-9, 2, "divergence of the weighted 2-form vanishes"),
    "maxwell_div_form": CheckDef(_maxwell_div_form, 1e-9, 2,
                                 "equivalent operator-divergence form of the Maxwell sector"),
    "scalar_field": CheckDef(_scalar_field, 1e-9, 2,
                             "scalar sector: lap(theta) = -tr(F_w o F_w)/2"),
    "trace_identity": CheckDef(_trace_identity, 1e-9, 2,
                               "R = 2 |grad theta|^2 (4-dimensional charts only)"),
    "stress_form_consistency": CheckDef(_stress_form_consistency, 1e-12, 2,
                                        "exact bookkeeping between the two Einstein forms"),
    "maxwell_covanish": CheckDef(_maxwell_covanish, 1e-9, 2,
                                 "the two Maxwell-sector forms vanish together"),
    "div_em_ricci": CheckDef(_div_em_ricci, 1e-6, 2,
                             "divergence identity for the electromagnetic Ricci tensor"),
    "div_ff_trace_metric": CheckDef(_div_ff_trace_metric, 1e-6, 2,
                                    "divergence of the trace term is the trace differential"),
    "div_scalar_stress": CheckDef(_div_scalar_stress, 1e-6, 2,
                                  "div(T_scalar) = 2 lap(theta) dtheta"),
    "div_em_stress": CheckDef(_div_em_stress, 1e-6, 2,
                              "div(T_em) = tr(F_w o F_w) dtheta (requires the Maxwell sector)",
                              conditional=True),
    "conservation": CheckDef(_conservation, 1e-6, 2,
                             "div(T_em + T_scalar) = 0 (requires Maxwell and scalar sectors)",
                             conditional=True),
    "periodicity": CheckDef(_periodicity, 1e-12, 0,
                            "all scenario fields are periodic over the box",
                            kind="scenario", needs_box=True),
    "integration_by_parts": CheckDef(_integration_by_parts, 1e-4, 0,
                                     "<dS, T> integrates against -<S, div T> on the box",
                                     kind="scenario", needs_box=True),
    "variation_pointwise": CheckDef(_variation_pointwise, 1e-6, 0,
                                    "pointwise first-variation formulas vs finite differences",
                                    kind="scenario", needs_family=True),
    "variation_action": CheckDef(_variation_action, 1e-3, 0,
                                 "integrated action derivative vs the Euler-Lagrange pairing",
                                 kind="scenario", needs_family=True, needs_box=True),
}


@dataclass
class CheckRecord:
    name: str
    points: int
    skipped: int
    max_abs_residual: float
    scale: float
    tolerance: float
    passed: bool
    conditional: bool
    expected_nonzero: bool
    note: str = ""

    def to_dict(self):
        return {
            "name": self.name, "points": self.points, "skipped": self.skipped,
            "max_abs_residual": self.max_abs_residual, "scale": self.scale,
            "tolerance": self.tolerance, "passed": self.passed,
            "conditional": self.conditional,
            "expected_nonzero": self.expected_nonzero, "note": self.note,
        }


@dataclass
class CheckReport:
    scenario_id: str
    seed: int
    points: int
    records: list
    passed: bool
    wall_time_s: float

    def to_dict(self, include_wall_time=True):
        out = {
            "schema": REPORT_SCHEMA,
            "engine": {"name": "affinegeo", "version": __version__},
            "scenario": self.scenario_id,
            "seed": self.seed,
            "points": self.points,
            "checks": [r.to_dict() for r in self.records],
            "passed": self.passed,
        }
        if include_wall_time:
            out["wall_time_s"] = self.wall_time_s
        return out

    def to_json(self, include_wall_time=True):
        return json.dumps(self.to_dict(include_wall_time=include_wall_time),
                          indent=2, sort_keys=True)


def _check_rng(seed, name, point_index=None):
    ident = [seed, zlib.crc32(name.encode())]
    if point_index is not None:
        ident.append(point_index)
    return np.random.default_rng(ident)


def run(scenario, checks=None, points=None, seed=None, threads=None):
    """Execute the scenario's checks and build the report.

    The report is independent of ``threads``: points and random draws are
    fixed by the seed, and aggregation over points is by maximum.
    """
    t_start = time.perf_counter()
    names = list(checks) if checks is not None else list(scenario.checks)
    for name in names:
        if name not in CHECKS:
            raise ValueError(f"unknown check {name!r}")
    n_points = points if points is not None else scenario.points
    run_seed = seed if seed is not None else scenario.seed

    rng_points = np.random.default_rng([run_seed, zlib.crc32(b"sample-points")])
    pts = scenario.spec.chart.sample(rng_points, n_points)

    point_checks = [n for n in names if CHECKS[n].kind == "point"]
    scenario_checks = [n for n in names if CHECKS[n].kind == "scenario"]

    results = {n: {"residual": 0.0, "scale": 1.0, "evaluated": 0, "skipped": 0,
                   "note": ""} for n in names}

    def eval_point(index):
        ctx = PointContext(scenario.spec, pts[index])
        out = {}
        for name in point_checks:
            rng = _check_rng(run_seed, name, index)
            try:
                out[name] = CHECKS[name].fn(ctx, rng, scenario)
            except (DomainError, SingularMetric) as err:
                out[name] = ("skip", str(err))
        return out

    order_hint = {n: CHECKS[n].order for n in point_checks}
    point_checks.sort(key=lambda n: -order_hint[n])

    if point_checks:
        workers = max(1, int(threads)) if threads else 1
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                per_point = list(pool.map(eval_point, range(len(pts))))
        else:
            per_point = [eval_point(i) for i in range(len(pts))]
        for out in per_point:
            for name, value in out.items():
                slot = results[name]
                if isinstance(value, tuple) and value and value[0] == "skip":
                    slot["skipped"] += 1
                    if not slot["note"]:
                        slot["note"] = f"point skipped: {value[1]}"
                else:
                    residual, scale = value
                    slot["residual"] = max(slot["residual"], float(residual))
                    slot["scale"] = max(slot["scale"], float(scale))
                    slot["evaluated"] += 1

    for name in scenario_checks:
        cd = CHECKS[name]
        slot = results[name]
        if cd.needs_box and scenario.box is None:
            slot["note"] = "not applicable: scenario has no box block"
            continue
        if cd.needs_family and scenario.family is None:
            slot["note"] = "not applicable: scenario has no family block"
            continue
        residual, scale = cd.fn(scenario, _check_rng(run_seed, name))
        slot["residual"] = float(residual)
        slot["scale"] = float(scale)
        slot["evaluated"] = 1

    records = []
    overall = True
    for name in names:
        cd = CHECKS[name]
        slot = results[name]
        tol = float(scenario.tolerances.get(name, cd.tolerance))
        expected_nonzero = name in scenario.expected_nonzero
        passed = slot["residual"] <= tol * slot["scale"]
        note = slot["note"]
        if cd.conditional and not passed:
            note = (note + "; " if note else "") + "conditional check: annotates only"
        if expected_nonzero and not passed:
            note = (note + "; " if note else "") + "expected nonzero for this scenario"
        if not passed and not cd.conditional and not expected_nonzero:
            overall = False
        records.append(CheckRecord(
            name=name, points=slot["evaluated"], skipped=slot["skipped"],
            max_abs_residual=slot["residual"], scale=slot["scale"],
            tolerance=tol, passed=passed, conditional=cd.conditional,
            expected_nonzero=expected_nonzero, note=note))

    return CheckReport(scenario_id=scenario.id, seed=run_seed, points=n_points,
                       records=records, passed=overall,
                       wall_time_s=time.perf_counter() - t_start)
