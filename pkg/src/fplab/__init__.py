"""Contraction classification and Picard iteration on metric spaces."""

__version__ = "0.1.0"

from .analysis import BridgeReport, bridge_report, minimal_p_for_banach
from .contraction import (
    AlphaEstimate,
    Condition,
    ContractionReport,
    alpha_banach,
    alpha_chatterjea,
    alpha_kannan,
    alpha_singh,
    alpha_singh_chatterjea,
    classify,
    minimal_p_singh_chatterjea,
)
from .errors import (
    FplabError,
    InconsistentInputError,
    InsufficientSamplesError,
    InvalidParameterError,
    InvalidPlanError,
    MapFormatError,
    MissingParameterError,
)
from .maps import (
    PiecewiseLinear,
    SelfMap,
    gallery_constant,
    gallery_linear_scale,
    gallery_paper_piecewise,
    iterate,
    load_piecewise_map,
    piecewise_map,
    table_map,
)
from .solver import (
    IterationTrace,
    StopRule,
    full_orbit_check,
    iterations_needed,
    picard,
    rate_from_alpha,
    uniqueness_probe,
)
from .space import MetricSpace, SamplePlan, box, finite, interval, sample_points, verify_metric_axioms
