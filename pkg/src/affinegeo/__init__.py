"""affinegeo: a chart-based numerical engine for affine-metric geometry.

The package evaluates everything over truncated Taylor jets, so chart
fields and all derived tensors (curvature, stress tensors, divergences)
carry exact derivatives.  On top of classical semi-Riemannian chart
geometry it implements the extended-bundle structure of an affine metric
triple (g, A, theta) -- twisted bracket, bundle connection, curvature and
Ricci blocks with independent cross-check routes -- the unified field
equations with their stress tensors and conservation identity, and
first-variation checks of the bundle curvature action on periodic boxes.
"""

__version__ = "0.1.0"

from . import affine, algebroid, checks, expr, field_eq, generators, geometry
from . import jets, scenario, variation
from .algebroid import (AffineMetricSpec, SectionField, SectionValue,
                        bianchi_omega_residual, em_tensors, hat_connection,
                        hat_connection_koszul, hat_curvature,
                        hat_curvature_direct, hat_ricci, hat_scalar, s_theta)
from .checks import CHECKS, CheckReport, run
from .expr import DomainError, ParseError, UnknownIdentifier, eval_jet, parse
from .field_eq import (conservation_check, divergence_identities, residuals,
                       stress_tensors)
from .geometry import (Chart, Frame, MetricField, SingularMetric, TensorField,
                       TensorValue, christoffel, curvature, divergence,
                       exterior_derivative, scalar_calculus, tensor_inner)
from .jets import Jet
from .scenario import Scenario, SchemaError, ValidationError, load_scenario
from .variation import (DeformationFamily, PeriodicBox, action_integral,
                        action_variation, first_variation_pointwise)
