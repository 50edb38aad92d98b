"""Finite-scale laboratory for equivariant Gromov-Hausdorff convergence."""

from .metric import (
    DomainError,
    FiniteMetricSpace,
    MonotoneClosedFamily,
    StructureError,
    ball,
    count_discontinuities,
    hausdorff_distance,
    validate_metric,
)
from .isometry import (
    IsometryGroup,
    ResourceError,
    closure,
    dp_distance,
    full_isometry_group,
    orbit,
    quotient,
    quotient_group,
)

__version__ = "0.1.0"
