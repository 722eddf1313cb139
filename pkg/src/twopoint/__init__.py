"""Two-point distortion toolkit for rational maps on the unit disk."""

__version__ = "0.1.0"

from .capacity import (  # noqa: F401
    CapacityEstimate,
    Condenser,
    GreenEstimate,
    Plate,
    WalkBudget,
    asymptotic_cap,
    asymptotic_cap_pair,
    green_identity_residual,
    green_numeric,
    inner_radius_numeric,
    separating_transform,
    separation_inequality_check,
    solve_condenser,
    solve_condenser_charges,
)
from .covering import (  # noqa: F401
    CoveringVerdict,
    check_delta_covering,
    check_gamma_covering,
)
from .curves import (  # noqa: F401
    DeltaCurve,
    GammaCircle,
    delta_residual,
    delta_trace,
    gamma_trace,
)
from .diskgeom import (  # noqa: F401
    GreenLevelSubdomain,
    HalfDisk,
    HalfPlane,
    MobiusTransform,
    UnitDisk,
    closed_form_invariants,
    hyp_distance,
    normalize_pair,
)
from .inequalities import (  # noqa: F401
    BoundReport,
    extremal_schwarzian_map,
    goluzin_extremal_map,
    goluzin_report,
    lemma_product_check,
    reduced_energy,
    rho_family_report,
    schwarzian_report,
)
from .rational import (  # noqa: F401
    Jet3,
    RationalMap,
    blaschke_product,
    identity_map,
    jet_eval,
    mobius_map,
    monomial_map,
    preimages_in_disk,
    schwarzian_at,
    singular_points,
)
