"""Unified field equations of the affine metric triple and their stress
tensors, divergence identities, and the conservation statement.

Residual blocks (a scenario satisfies the field equations at a point iff
all of them vanish):

* ``einstein``        Ric - 2 em_ricci - 2 dtheta (x) dtheta
                      - (1/2) tr(F_w o F_w) g                (Ricci form)
* ``einstein_stress`` (Ric - R g / 2) - (T_em + T_scalar)    (stress form)
* ``maxwell``         div(e^theta * omega_w) = div(e^(2 theta) omega)
* ``maxwell_div_form``<div F, .> - 2 dtheta(F(.)), the equivalent form of
                      the Maxwell-sector equation
* ``scalar_field``    lap(theta) + (1/2) tr(F_w o F_w)
* ``trace``           R - 2 |grad theta|^2; only emitted on 4-dimensional
                      charts, where it follows from the Ricci-form trace

with the stress tensors

    T_em     = 2 em_ricci + (1/2) tr(F_w o F_w) g
    T_scalar = 2 dtheta (x) dtheta - |grad theta|^2 g

whose sum is divergence-free whenever the Maxwell and scalar sectors hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import jets as _jets
from .algebroid import ConsistencyError
from .geometry import _obj, jet_values

__all__ = [
    "StressTensors", "FieldEquationResiduals", "DivergenceIdentities",
    "ConservationCheck", "stress_tensors", "residuals",
    "divergence_identities", "conservation_check",
]


@dataclass
class StressTensors:
    """Electromagnetic-like and scalar-field-like stress tensors (0,2)."""

    em: np.ndarray
    scalar: np.ndarray


@dataclass
class FieldEquationResiduals:
    einstein: np.ndarray
    einstein_stress: np.ndarray
    maxwell: np.ndarray
    maxwell_div_form: np.ndarray
    scalar_field: float
    trace: Optional[float]
    scales: dict


@dataclass
class DivergenceIdentities:
    """Residuals of the divergence computations.  The first three hold on
    any scenario; ``em_stress_div`` holds conditionally on the Maxwell
    sector, whose local residual magnitude is reported alongside."""

    ric_em_div: np.ndarray
    trace_metric_div: np.ndarray
    scalar_stress_div: np.ndarray
    em_stress_div: np.ndarray
    maxwell_residual: float
    scales: dict


@dataclass
class ConservationCheck:
    """div(T_em + T_scalar) together with the hypothesis residuals, so a
    report can distinguish 'conservation verified' from 'not applicable'."""

    divergence: np.ndarray
    maxwell_residual: float
    scalar_residual: float
    scale: float


def _sup(arr):
    arr = np.asarray(arr, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


# -- jet-level builders on a SpecFrame ---------------------------------------


def _em_stress_jets(fr):
    n = fr.n
    out = _obj((n, n))
    half_tr = 0.5 * fr.ff_w_trace
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = (2.0 * fr.em_ricci[i, j]
                                     + half_tr * fr.geo.g[i, j])
    return out


def _scalar_stress_jets(fr):
    n = fr.n
    out = _obj((n, n))
    gsq = fr.grad_theta_sq
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = (2.0 * fr.dtheta[i] * fr.dtheta[j]
                                     - gsq * fr.geo.g[i, j])
    return out


def _em_ricci_unweighted_jets(fr):
    n = fr.n
    ginv = fr.geo.ginv
    out = _obj((n, n))
    for i in range(n):
        for j in range(i, n):
            acc = None
            for l in range(n):
                for m in range(n):
                    term = ginv[l, m] * fr.omega[i, l] * fr.omega[j, m]
                    acc = term if acc is None else acc + term
            out[i, j] = out[j, i] = acc
    return out


def _maxwell_jets(fr):
    """div(e^(2 theta) omega) as a 1-form of jets."""
    n = fr.n
    w = fr.e_theta * fr.e_theta
    field = _obj((n, n))
    for i in range(n):
        for j in range(n):
            field[i, j] = w * fr.omega[i, j]
    return fr.geo.div_two_lower(field)


def _maxwell_div_form_jets(fr):
    """<div F, .> - 2 dtheta(F(.)) as a 1-form of jets."""
    n = fr.n
    div_f_flat = fr.geo.lower_index(fr.div_f)
    out = _obj((n,))
    for j in range(n):
        acc = div_f_flat[j]
        for k in range(n):
            acc = acc - 2.0 * fr.dtheta[k] * fr.f_op[k, j]
        out[j] = acc
    return out


def _scalar_field_jet(fr):
    return fr.lap_theta + 0.5 * fr.ff_w_trace


# -- public operations --------------------------------------------------------


def stress_tensors(spec, point, order=2, frame=None):
    fr = frame if frame is not None else spec.frame(point, order)
    em = jet_values(_em_stress_jets(fr))
    sc = jet_values(_scalar_stress_jets(fr))
    return StressTensors(em=em, scalar=sc)


def residuals(spec, point, order=2, frame=None, check_tol=1e-12):
    """All field-equation residual blocks at a point.

    The Ricci-form and stress-form residuals are related by the exact
    bookkeeping identity

        stress_form = ricci_form - (R - 2 |grad theta|^2) g / 2,

    which is asserted here at rounding level.
    """
    fr = frame if frame is not None else spec.frame(point, order)
    n = fr.n
    g = jet_values(fr.geo.g)
    ric = jet_values(fr.geo.ricci)
    scal = _jets.value_of(fr.geo.scalar_curvature)
    em_ric = jet_values(fr.em_ricci)
    dth = jet_values(fr.dtheta)
    ff_tr = _jets.value_of(fr.ff_w_trace)
    gsq = _jets.value_of(fr.grad_theta_sq)

    einstein = ric - 2.0 * em_ric - 2.0 * np.outer(dth, dth) - 0.5 * ff_tr * g
    stress = stress_tensors(spec, point, order=order, frame=fr)
    einstein_stress = ric - 0.5 * scal * g - stress.em - stress.scalar

    scale = max(1.0, float(np.max(np.abs(ric))), float(np.max(np.abs(em_ric))),
                abs(scal), abs(ff_tr))
    bookkeeping = einstein_stress - einstein + 0.5 * (scal - 2.0 * gsq) * g
    if np.max(np.abs(bookkeeping)) > check_tol * scale:
        raise ConsistencyError("Ricci-form and stress-form residuals disagree")

    maxwell = jet_values(_maxwell_jets(fr))
    maxwell_equiv = jet_values(_maxwell_div_form_jets(fr))
    scales = {
        "einstein": max(1.0, _sup(ric), 2.0 * _sup(em_ric),
                        abs(0.5 * ff_tr) * _sup(g), _sup(np.outer(dth, dth)) * 2.0),
        "einstein_stress": max(1.0, _sup(ric), abs(0.5 * scal) * _sup(g),
                               _sup(stress.em), _sup(stress.scalar)),
        "maxwell": max(1.0, _sup(maxwell)),
        "maxwell_div_form": max(1.0, _sup(maxwell_equiv)),
        "scalar_field": max(1.0, abs(_jets.value_of(fr.lap_theta)), abs(0.5 * ff_tr)),
        "trace": max(1.0, abs(scal), 2.0 * abs(gsq)),
    }
    return FieldEquationResiduals(
        einstein=einstein,
        einstein_stress=einstein_stress,
        maxwell=maxwell,
        maxwell_div_form=maxwell_equiv,
        scalar_field=_jets.value_of(_scalar_field_jet(fr)),
        trace=(scal - 2.0 * gsq) if n == 4 else None,
        scales=scales,
    )


def divergence_identities(spec, point, order=2, frame=None):
    """Residuals of the divergence identities for the electromagnetic-like
    sector and the scalar stress tensor."""
    fr = frame if frame is not None else spec.frame(point, order)
    n = fr.n
    geo = fr.geo

    # div(Ric_em)(X) = <div F, F(X)> + X(|F|^2) / 4 with |F|^2 = -tr(F o F)
    ric_em = _em_ricci_unweighted_jets(fr)
    div_ric_em = jet_values(geo.div_two_lower(ric_em))
    f_sq = -1.0 * fr.ff_trace
    df_sq = jet_values(geo.dscalar(f_sq))
    g = jet_values(geo.g)
    div_f = jet_values(fr.div_f)
    f_vals = jet_values(fr.f_op)
    pair = np.einsum("a,ab,bj->j", div_f, g, f_vals)
    ric_em_div = div_ric_em - (pair + 0.25 * df_sq)

    # div(tr(F o F) g)(X) = X(tr(F o F))
    ff_tr = fr.ff_trace
    field = _obj((n, n))
    for i in range(n):
        for j in range(n):
            field[i, j] = ff_tr * geo.g[i, j]
    trace_metric_div = jet_values(geo.div_two_lower(field)) - jet_values(geo.dscalar(ff_tr))

    # div(T_scalar)(X) = 2 lap(theta) dtheta(X)
    t_scalar = _scalar_stress_jets(fr)
    lap = _jets.value_of(fr.lap_theta)
    dth = jet_values(fr.dtheta)
    scalar_stress_div = jet_values(geo.div_two_lower(t_scalar)) - 2.0 * lap * dth

    # conditional on the Maxwell sector: div(T_em)(X) = tr(F_w o F_w) dtheta(X)
    t_em = _em_stress_jets(fr)
    ff_w_tr = _jets.value_of(fr.ff_w_trace)
    em_stress_div = jet_values(geo.div_two_lower(t_em)) - ff_w_tr * dth

    maxwell = jet_values(_maxwell_jets(fr))
    scales = {
        "ric_em_div": max(1.0, _sup(div_ric_em), _sup(pair), 0.25 * _sup(df_sq)),
        "trace_metric_div": max(1.0, _sup(jet_values(geo.dscalar(ff_tr)))),
        "scalar_stress_div": max(1.0, _sup(jet_values(geo.div_two_lower(t_scalar))),
                                 abs(2.0 * lap) * _sup(dth)),
        "em_stress_div": max(1.0, _sup(jet_values(geo.div_two_lower(t_em))),
                             abs(ff_w_tr) * _sup(dth)),
    }
    return DivergenceIdentities(
        ric_em_div=ric_em_div,
        trace_metric_div=trace_metric_div,
        scalar_stress_div=scalar_stress_div,
        em_stress_div=em_stress_div,
        maxwell_residual=float(np.max(np.abs(maxwell))),
        scales=scales,
    )


def conservation_check(spec, point, order=2, frame=None):
    """div(T_em + T_scalar) with the Maxwell/scalar residual magnitudes."""
    fr = frame if frame is not None else spec.frame(point, order)
    n = fr.n
    t_em = _em_stress_jets(fr)
    t_sc = _scalar_stress_jets(fr)
    total = _obj((n, n))
    for i in range(n):
        for j in range(n):
            total[i, j] = t_em[i, j] + t_sc[i, j]
    div = jet_values(fr.geo.div_two_lower(total))
    maxwell = jet_values(_maxwell_jets(fr))
    scalar = _jets.value_of(_scalar_field_jet(fr))
    return ConservationCheck(
        divergence=div,
        maxwell_residual=float(np.max(np.abs(maxwell))),
        scalar_residual=abs(scalar),
        scale=max(1.0, _sup(jet_values(fr.geo.div_two_lower(t_em))),
                  _sup(jet_values(fr.geo.div_two_lower(t_sc)))),
    )
