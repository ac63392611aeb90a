"""Cohomology engine for exploded manifolds given by good covers."""

__version__ = "0.1.0"

from .charts import (
    ChartSignature,
    ChartModel,
    CompactModel,
    RestrictionMap,
    chart_cohomology,
    chart_compact_cohomology,
    restriction_map,
)
from .cover import (
    BettiTable,
    CoverManifest,
    OverlapData,
    family_h1_check,
    nerve_betti,
    pd_symmetry_check,
    refinement_manifest,
    total_betti,
    total_compact_betti,
    validate_manifest,
)
from .calculus import (
    Projection,
    adjunction_check,
    check_admissible,
    fiber_integrate,
    integrate,
    pairing_matrix,
    stokes_check,
)
from .forms import FormExpr, parse_form
from .lattice import Fan, Polytope, danilov_betti
from .orientation import (
    OrientedMap,
    OrientedSpace,
    associativity_check,
    fiber_product_orientation,
    normal_bundle_sign,
    relative_orientation,
)
from .quadrature import QuadratureSpec

__all__ = [
    "BettiTable",
    "ChartModel",
    "ChartSignature",
    "CompactModel",
    "CoverManifest",
    "Fan",
    "FormExpr",
    "OrientedMap",
    "OrientedSpace",
    "OverlapData",
    "Polytope",
    "Projection",
    "QuadratureSpec",
    "RestrictionMap",
    "adjunction_check",
    "associativity_check",
    "chart_cohomology",
    "chart_compact_cohomology",
    "check_admissible",
    "danilov_betti",
    "family_h1_check",
    "fiber_integrate",
    "fiber_product_orientation",
    "integrate",
    "nerve_betti",
    "normal_bundle_sign",
    "pairing_matrix",
    "parse_form",
    "pd_symmetry_check",
    "refinement_manifest",
    "relative_orientation",
    "restriction_map",
    "stokes_check",
    "total_betti",
    "total_compact_betti",
    "validate_manifest",
]
