"""Ruled surfaces: charts, ruling-line geometry and singular points."""

from .canonical import (
    CanonicalChart, Cone, Cuspidal, Inconclusive, NotSingular, Plane, PuiseuxGraph,
    RegularPoint, SingularShift, TruncationTooLow, canonical_form, classify_singularity,
    descend_evenness, puiseux_graph, reconstruction_residual, singular_shift,
)
from .charts import (
    LineFamily, RuledChart, circular_cone_chart, concurrent_plane_chart, cylinder_chart,
    doubled_whitney_chart, hyperboloid_family, make_chart, odd_power_chart, orthogonalize_chart,
    plane_chart, recenter, tilted_odd_chart, whitney_chart,
)
from .lines import ParallelLines, antipodal_check, chart_line_distance, extremal_lines, line_distance
