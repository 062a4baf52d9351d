"""Exact-arithmetic laboratory for return times, dimensions, correlations and repetition entropy."""

__version__ = "0.1.0"

from .errors import CapacityError, InsufficientDataError, UndefinedCellError, UsageError
from .torus import TorusPoint, torus_distance
from .systems import (
    CircleRotation,
    ExpandingCircleMap,
    ToralAutomorphism,
    analytic_invariants,
    cat_map,
    inverse_step,
    quartic_automorphism,
    step,
    validate_toral_matrix,
)
from .orbits import Orbit, OrbitStream, iterate_orbit
from .stats import ScalingFit, bootstrap_ci, envelope_fit, loglog_fit
from .recurrence import RadiusGrid, ReturnCurve, long_fly_check, recurrence_rate_fit, return_curve
from .dimension import (
    AnalyticLebesgue,
    AtomicMeasure,
    EmpiricalSample,
    ball_measure,
    hd_estimate,
    inequality_check,
    pointwise_dimension_fit,
)
from .mixing import BumpAtPoint, FourierMode, covariance_estimate, decay_classify, decay_profile
from .symbolic import (
    GridPartition,
    SeparatedBalls,
    build_partition,
    entropy_estimate,
    maximal_separated_set,
    repetition_time,
    select_thin_radius,
)
