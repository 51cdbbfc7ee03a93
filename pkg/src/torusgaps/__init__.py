"""Voronoi partitions of the unit torus by Kronecker point sets.

Typical use::

    from torusgaps import VectorSpec, generate_sites, build_partition, gap_report

    sites = generate_sites(VectorSpec.parse("sqrt(2),sqrt(3)"), 20)
    report = gap_report(build_partition(sites))
    report.S, report.M   # 6, {5: 6, 6: 8, 7: 6}
"""

from .errors import (
    AmbiguousClustering,
    CertificationFailure,
    DegeneracyError,
    OracleMismatch,
    PairingViolation,
    ParseError,
    PartitionInconsistency,
    PerfectPower,
    SymmetryViolation,
    ThreeGapViolation,
    TorusGapsError,
)
from .numerics import ConstantKind, ConstantSpec, PrecisionConfig, Real, certify, frac, make_constant
from .sites import SiteSet, TorusPoint, VectorSpec, central_pairing, generate_sites
from .statistics import GapReport, count_distinct_areas, gap_report, side_histogram
from .voronoi import Partition, Polygon, VoronoiCell, build_cell, build_partition, polygon_area, torus_delta

__version__ = "0.1.0"
