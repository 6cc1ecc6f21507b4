"""Seeded random smooth scenarios and fields.

Random metrics are small trigonometric perturbations of the flat metric of
the requested signature, so nondegeneracy and signature are guaranteed on
the sampling region by construction.  Everything is driven by a
``numpy.random.Generator``; the same seed reproduces the same scenario.
"""

from __future__ import annotations

import numpy as np

from . import expr as E
from .algebroid import AffineMetricSpec, SectionField
from .geometry import Chart, MetricField


def _wave(rng, names, amp, freq_max=2, terms=2, periodic=False):
    """Random trig polynomial c0 + sum a_k sin(k . x + phase)."""
    out = E.const(round(float(rng.uniform(-amp, amp)), 6)) if not periodic else E.const(0.0)
    for _ in range(terms):
        k = rng.integers(0 if not periodic else 1, freq_max + 1, size=len(names))
        if periodic and not np.any(k):
            k[rng.integers(len(names))] = 1
        arg = E.const(round(float(rng.uniform(0, 2 * np.pi)), 6)) if not periodic else E.const(0.0)
        any_var = False
        for m, name in enumerate(names):
            if k[m]:
                any_var = True
                arg = arg + E.const(float(k[m])) * E.var(name)
        if not any_var:
            continue
        coeff = round(float(rng.uniform(-amp, amp)), 6)
        out = out + E.const(coeff) * E.sin(arg)
    return out


def random_spec(seed, n=4, lorentzian=True, amp=0.05, half_width=0.5,
                with_potential=True, with_theta=True):
    """Random smooth affine-metric scenario on an n-dimensional chart.

    The metric is eta + (small trig), which keeps the declared signature on
    the whole region for amp * n well below 1.
    """
    rng = np.random.default_rng(seed)
    names = ("t", "x", "y", "z", "u", "v", "w", "q")[:n]
    signature = (-1,) + (1,) * (n - 1) if lorentzian else (1,) * n
    chart = Chart(coords=names, signature=signature,
                  region=((-half_width, half_width),) * n)
    comps = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            wobble = _wave(rng, names, amp)
            if i == j:
                comps[i][j] = E.const(float(signature[i])) + wobble
            else:
                comps[i][j] = comps[j][i] = wobble
    metric = MetricField(chart, comps)
    a_flat = tuple(_wave(rng, names, 2.0 * amp) if with_potential else E.const(0.0)
                   for _ in range(n))
    theta = _wave(rng, names, 2.0 * amp) if with_theta else E.const(0.0)
    return AffineMetricSpec(chart=chart, metric=metric, a_flat=a_flat, theta=theta)


def random_section_field(rng, chart, amp=0.8):
    """Random section of the extended bundle with trig components."""
    names = chart.coords
    comps = tuple(_wave(rng, names, amp) for _ in range(chart.n))
    return SectionField(x=comps, f=_wave(rng, names, amp))


def random_vectors(rng, n, count, amp=1.0):
    return amp * rng.standard_normal((count, n))


def random_periodic_scalar(rng, names, amp, freq_max=2, terms=2):
    """Trig polynomial with integer frequencies only (2 pi periodic)."""
    return _wave(rng, names, amp, freq_max=freq_max, terms=terms, periodic=True)


def random_periodic_deformation(rng, chart, amp=0.2, freq_max=2):
    """(s, delta, h) deformation data, periodic over a 2 pi box."""
    names = chart.coords
    n = chart.n
    s = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s[i][j] = s[j][i] = random_periodic_scalar(rng, names, amp, freq_max)
    delta = tuple(random_periodic_scalar(rng, names, amp, freq_max) for _ in range(n))
    h = random_periodic_scalar(rng, names, amp, freq_max)
    return s, delta, h
