"""Exact CAT(0) Euclidean triangle complexes.

Exact arithmetic in Q(sqrt2, sqrt3), disk-condition complexes, geodesic
distances by corridor unfolding, metric and simplicial balls, and the
expanding-ball process with verifiable certificates.
"""

from .balls import (
    BallView,
    CriticalRadiusError,
    FaceIntersectionType,
    audit_sphere_lemmas,
    ball_view,
    boundary_margin_guard,
    classify_face,
    critical_radii,
    edge_min_distances,
    simplicial_ball,
    vertices_within,
)
from .exactnum import (
    CertInterval,
    PrecisionExhausted,
    QField,
    RadicalSum,
    max_precision_bits,
)
from .expansion import (
    ConeStep,
    ExpansionCertificate,
    ExpansionError,
    VerifyResult,
    audit_boundary_lemmas,
    boundary_vertices,
    cone,
    epsilon_for,
    expand_to,
    link_tree,
    load_certificate,
    store_certificate,
    verify_certificate,
)
from .generators import GenSpec, canonical_face_points, gen_regular, gen_seifert
from .geodesics import (
    Angle,
    GeodesicResult,
    angle_at,
    distances_from,
    vertex_distance,
)
from .render import format_radical, render_ball
from .tricomplex import (
    ComplexReport,
    DiskCondition,
    DiskConditionResult,
    MarginError,
    SimplicialSet,
    TriComplex,
    TriangleShape,
    check_link_condition,
    load,
    store,
    triangle_shape,
    validate_complex,
    validate_disk_condition,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
