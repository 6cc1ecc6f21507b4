"""Scenario files: TOML schema, loading, and validation.

A scenario file fully determines a run: the chart, the affine metric
triple (metric rows are lower-triangular, symmetry implied), the sampling
plan, the list of named checks with optional per-check tolerance
overrides, and optional periodic-box and deformation-family blocks for
variation checks.  Expected-failure annotations (checks whose residual is
physically expected to be nonzero for the scenario) are part of the file,
not of the code.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from . import expr as E
from .algebroid import AffineMetricSpec
from .expr import ParseError
from .geometry import Chart, MetricField, SingularMetric
from .variation import DeformationFamily, PeriodicBox


class SchemaError(ValueError):
    """Missing or mistyped scenario field; the message carries the path."""


class ValidationError(ValueError):
    """Scenario data is structurally fine but fails a probe (signature,
    degeneracy, bad check name)."""


@dataclass
class Scenario:
    id: str
    spec: AffineMetricSpec
    points: int
    seed: int
    checks: tuple
    tolerances: dict
    expected_nonzero: tuple
    params: dict = field(default_factory=dict)
    box: Optional[PeriodicBox] = None
    family: Optional[DeformationFamily] = None


def _get(table, key, kind, path, default=_toml):
    where = f"{path}.{key}" if path else key
    if key not in table:
        if default is not _toml:
            return default
        raise SchemaError(f"{where}: missing required field")
    value = table[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: expected {kind.__name__}, "
                          f"got {type(value).__name__}")
    return value


def _parse_expr(text, coords, path):
    if not isinstance(text, str):
        raise SchemaError(f"{path}: expected an expression string")
    try:
        return E.parse(text, coords)
    except ParseError as err:
        raise ParseError(f"{path}: {err}", err.offset) from err


def _parse_lower_triangular(rows, coords, path):
    n = len(coords)
    if not isinstance(rows, list) or len(rows) != n:
        raise SchemaError(f"{path}: expected {n} lower-triangular rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != i + 1:
            raise SchemaError(f"{path}[{i}]: expected {i + 1} entries")
        out.append([_parse_expr(cell, coords, f"{path}[{i}][{j}]")
                    for j, cell in enumerate(row)])
    return out


def scenario_from_dict(data, scenario_id="scenario", known_checks=None):
    """Build and validate a Scenario from parsed TOML data."""
    if not isinstance(data, dict):
        raise SchemaError("top level: expected a table")
    sid = data.get("id", scenario_id)

    chart_tab = _get(data, "chart", dict, "")
    coords = _get(chart_tab, "coords", list, "chart")
    signature = _get(chart_tab, "signature", list, "chart")
    region_tab = _get(chart_tab, "region", dict, "chart")
    if not all(isinstance(c, str) for c in coords):
        raise SchemaError("chart.coords: expected a list of names")
    region = []
    for c in coords:
        if c not in region_tab:
            raise SchemaError(f"chart.region.{c}: missing interval")
        iv = region_tab[c]
        if not (isinstance(iv, list) and len(iv) == 2):
            raise SchemaError(f"chart.region.{c}: expected [low, high]")
        region.append((float(iv[0]), float(iv[1])))
    try:
        chart = Chart(coords=tuple(coords), signature=tuple(signature),
                      region=tuple(region))
    except ValueError as err:
        raise SchemaError(f"chart: {err}") from err

    metric_tab = _get(data, "metric", dict, "")
    rows = _get(metric_tab, "rows", list, "metric")
    metric = MetricField.from_lower_triangular(
        chart, _parse_lower_triangular(rows, coords, "metric.rows"))

    pot_tab = _get(data, "potential", dict, "", default={})
    comps = _get(pot_tab, "components", list, "potential",
                 default=["0"] * chart.n)
    if len(comps) != chart.n:
        raise SchemaError("potential.components: one entry per coordinate")
    a_flat = tuple(_parse_expr(c, coords, f"potential.components[{i}]")
                   for i, c in enumerate(comps))

    theta_tab = _get(data, "theta", dict, "", default={})
    theta = _parse_expr(_get(theta_tab, "expr", str, "theta", default="0"),
                        coords, "theta.expr")

    spec = AffineMetricSpec(chart=chart, metric=metric, a_flat=a_flat, theta=theta)

    sampling = _get(data, "sampling", dict, "")
    points = _get(sampling, "points", int, "sampling")
    seed = _get(sampling, "seed", int, "sampling")
    if points < 1:
        raise SchemaError("sampling.points: must be positive")

    checks_tab = _get(data, "checks", dict, "")
    names = _get(checks_tab, "names", list, "checks")
    expected_nonzero = tuple(_get(checks_tab, "expected_nonzero", list, "checks",
                                  default=[]))
    tolerances = dict(_get(checks_tab, "tolerances", dict, "checks", default={}))
    params = dict(_get(checks_tab, "params", dict, "checks", default={}))
    if known_checks is not None:
        for name in list(names) + list(expected_nonzero) + list(tolerances):
            if name not in known_checks:
                raise ValidationError(f"checks: unknown check name {name!r}")

    box = None
    if "box" in data:
        box_tab = data["box"]
        periods = _get(box_tab, "periods", list, "box")
        if len(periods) != chart.n:
            raise SchemaError("box.periods: one period per coordinate")
        resolution = _get(box_tab, "resolution", int, "box")
        origin = _get(box_tab, "origin", list, "box",
                      default=[lo for lo, _ in chart.region])
        box = PeriodicBox(periods=tuple(float(p) for p in periods),
                          resolution=resolution,
                          origin=tuple(float(o) for o in origin))

    family = None
    if "family" in data:
        family = family_from_dict(data["family"], spec)

    # probe: the metric must carry the declared signature at the center
    try:
        metric.check_signature(chart.center())
    except SingularMetric as err:
        raise ValidationError(f"metric probe failed: {err}") from err

    return Scenario(id=str(sid), spec=spec, points=points, seed=seed,
                    checks=tuple(names), tolerances=tolerances,
                    expected_nonzero=expected_nonzero, params=params,
                    box=box, family=family)


def family_from_dict(tab, spec):
    """Deformation family from a [family] table over a loaded scenario."""
    coords = spec.chart.coords
    n = spec.chart.n
    zero_rows = [["0"] * (i + 1) for i in range(n)]
    s_rows = _get(tab, "s_rows", list, "family", default=zero_rows)
    lower = _parse_lower_triangular(s_rows, coords, "family.s_rows")
    s = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s[i][j] = s[j][i] = lower[i][j]
    delta_raw = _get(tab, "delta", list, "family", default=["0"] * n)
    if len(delta_raw) != n:
        raise SchemaError("family.delta: one component per coordinate")
    delta = tuple(_parse_expr(c, coords, f"family.delta[{i}]")
                  for i, c in enumerate(delta_raw))
    h = _parse_expr(_get(tab, "h", str, "family", default="0"), coords, "family.h")
    t0 = _get(tab, "t0", float, "family", default=1e-4)
    return DeformationFamily(base=spec, s=tuple(tuple(r) for r in s),
                             delta=delta, h=h, t0=float(t0))


def load_scenario(path, known_checks=None):
    """Load a scenario TOML file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"{path}: no such file")
    except _toml.TOMLDecodeError as err:
        raise SchemaError(f"{path}: invalid TOML: {err}")
    return scenario_from_dict(data, scenario_id=path.stem, known_checks=known_checks)


def load_family(path, spec):
    """Load a deformation family from a TOML file holding a [family] table
    (or the family keys at top level)."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"{path}: no such file")
    except _toml.TOMLDecodeError as err:
        raise SchemaError(f"{path}: invalid TOML: {err}")
    tab = data.get("family", data)
    return family_from_dict(tab, spec)
