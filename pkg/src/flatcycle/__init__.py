"""Certified computations with 0-dimensional flat cycles in the cube [-1, 1]^n.

Flat norms by exact transport with dual certificates, grid quantization,
the mass-at-scale functional kappa, and exact entropy counts.
"""

from .cycles import (
    FLOAT,
    RATIONAL,
    OneChain,
    Segment,
    ZeroCycle,
    boundary,
    chi,
    clamp,
    combine,
    cone,
    embed_free,
    make_chain,
    make_cycle,
    mass,
    zero_cycle,
)
from .entropy import (
    BoundednessCertificate,
    CountInstance,
    CountResult,
    card_pnk,
    count_bruteforce,
    count_exact,
    count_upper,
    covering_bound,
    greedy_net,
)
from .errors import (
    BadEps,
    BadParams,
    ChiNonZero,
    DimensionMismatch,
    FlatCycleError,
    MembershipFail,
    OutOfCube,
    SizeOverflow,
    SolverStall,
)
from .grid import (
    GridCycle,
    GridSpec,
    SeparatingDirection,
    grid_edges,
    grid_points,
    line_fill,
    make_grid_cycle,
    separating_direction,
    snap,
    verify_grid_mass,
)
from .kappa import GridVectorField, KappaEstimate, ModulusCurve, beckmann, kappa, kappa_curve, osc1, verify_kappa_rules
from .quantize import (
    ConstantsTable,
    DeformResult,
    QuantizedCycle,
    QuantLattice,
    check_B_implies_C,
    check_condition_A,
    deform,
    enumerate_class,
    eps_hat,
    quantize_multiplicities,
    verify_class_geometry,
)
from .report import Check, Report
from .transport import TransportSolution, certify, gnorm, gnorm_1d, isoperimetric_check, plan_to_chain

__version__ = "0.1.0"

__all__ = [
    "BadEps",
    "BadParams",
    "beckmann",
    "boundary",
    "BoundednessCertificate",
    "card_pnk",
    "certify",
    "Check",
    "check_B_implies_C",
    "check_condition_A",
    "chi",
    "ChiNonZero",
    "clamp",
    "combine",
    "cone",
    "ConstantsTable",
    "count_bruteforce",
    "count_exact",
    "count_upper",
    "CountInstance",
    "CountResult",
    "covering_bound",
    "deform",
    "DeformResult",
    "DimensionMismatch",
    "embed_free",
    "enumerate_class",
    "eps_hat",
    "FlatCycleError",
    "FLOAT",
    "gnorm",
    "gnorm_1d",
    "greedy_net",
    "grid_edges",
    "grid_points",
    "GridCycle",
    "GridSpec",
    "GridVectorField",
    "isoperimetric_check",
    "kappa",
    "kappa_curve",
    "KappaEstimate",
    "line_fill",
    "make_chain",
    "make_cycle",
    "make_grid_cycle",
    "mass",
    "MembershipFail",
    "ModulusCurve",
    "OneChain",
    "osc1",
    "OutOfCube",
    "plan_to_chain",
    "quantize_multiplicities",
    "QuantizedCycle",
    "QuantLattice",
    "RATIONAL",
    "Report",
    "Segment",
    "separating_direction",
    "SeparatingDirection",
    "SizeOverflow",
    "snap",
    "SolverStall",
    "TransportSolution",
    "verify_class_geometry",
    "verify_grid_mass",
    "verify_kappa_rules",
    "zero_cycle",
    "ZeroCycle",
]

