"""Exact computer algebra for Frobenius manifolds and their natural submanifolds."""

from .errors import (
    ConsistencyError,
    DegenerateMetricError,
    FrobsubError,
    InputError,
    LogarithmicCaseError,
    NonPuiseuxCompositionError,
    NormalizationError,
    NotFlatCoordinatesError,
    NotQuasihomogeneousError,
    UnsupportedCodimensionError,
)
from .exactcore import PuiseuxPolynomial, QSeries
from .frobenius import (
    FrobeniusSpec,
    MetricMatrix,
    euler_check,
    intersection_form,
    metric_from_prepotential,
    structure_tensor,
    wdvv_check,
)
from .submanifold import SubmanifoldMap, analyze, gauss_codazzi_check, second_fundamental_form
from .verdict import Verdict

__all__ = [
    "ConsistencyError",
    "DegenerateMetricError",
    "FrobeniusSpec",
    "FrobsubError",
    "InputError",
    "LogarithmicCaseError",
    "MetricMatrix",
    "NonPuiseuxCompositionError",
    "NormalizationError",
    "NotFlatCoordinatesError",
    "NotQuasihomogeneousError",
    "PuiseuxPolynomial",
    "QSeries",
    "SubmanifoldMap",
    "UnsupportedCodimensionError",
    "Verdict",
    "analyze",
    "euler_check",
    "gauss_codazzi_check",
    "intersection_form",
    "metric_from_prepotential",
    "second_fundamental_form",
    "structure_tensor",
    "wdvv_check",
]
