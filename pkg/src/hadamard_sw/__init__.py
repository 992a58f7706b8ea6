"""Sliced Wasserstein distances on Cartan-Hadamard manifolds.

Closed-form geodesic and horospherical projections for Euclidean,
Mahalanobis, hyperbolic (Lorentz and Poincare), SPD and product manifolds,
Monte-Carlo estimators built on them, and particle gradient flows.
"""

from .chsw import ChswConfig, ChswEstimate, DiscreteMeasure, chsw, chsw_with_directions, gaussian_kernel, gram_matrix
from .errors import (
    ConstraintViolation,
    DegenerateDirection,
    DescriptorMismatch,
    DivergenceError,
    DomainError,
    HadamardSWError,
    NotPositiveDefinite,
    NumericFailure,
    SchemaError,
    UnsupportedProjection,
)
from .flows import FlowConfig, FlowState, flow_step, run_flow, velocity
from .manifolds import (
    Euclidean,
    Lorentz,
    Mahalanobis,
    Poincare,
    Product,
    SPDAffineInvariant,
    SPDLogCholesky,
    SPDLogEuclidean,
    SPDOnq,
    make_manifold,
)
from .mds import MdsProblem, mds_fit, mds_loss

__version__ = "0.1.0"
