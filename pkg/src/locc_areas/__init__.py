"""Exact area-diagram synthesis of single-copy LOCC protocols for bipartite pure states.

All quantities are :class:`fractions.Fraction`; column, colour and Schmidt
indices are 0-based.
"""

from .convert import (
    CorrectionRecord,
    SliceReport,
    check_record,
    choose_Q,
    colour_transform_nielsen,
    slice_colours,
    verify_slice_distinct,
)
from .core import (
    OutcomeDistribution,
    SchmidtVector,
    average_yield,
    format_rational,
    make_schmidt,
    nielsen_condition,
    to_rational,
)
from .diagram import (
    ColouredDiagram,
    ColourSegment,
    Region,
    StepProfile,
    canonical_diagram,
    move_area,
    render,
    rows,
    verify_colour_conservation,
    verify_no_downward_flow,
    verify_row_distinct,
)
from .distill import (
    MaxProbResult,
    colour_transform,
    colour_transform_trace,
    distribution_from_profile,
    max_prob,
    optimal_distribution,
    swap_delta,
)
from .errors import *  # noqa: F401,F403
from .files import ProtocolFile, audit, parse_state
from .protocol import (
    KrausOperator,
    KrausProtocol,
    SimulationReport,
    describe,
    kraus_convert,
    kraus_distill,
    post_state,
    post_states,
    simulate_float,
    verify_completeness,
)

__version__ = "0.1.0"
