"""Rotational constant-mean-curvature hypersurfaces in spheres, hyperbolic and Euclidean space."""
from .embedding_solver import (
    EmbeddingSolution,
    StabilityVerdict,
    cone_stability_check,
    near_isoparametric_minimal,
    solve_C,
)
from .errors import (
    BelowThreshold,
    CMCError,
    EmptyInterval,
    HyperbolicUnbounded,
    Infeasible,
    NoCrossing,
    NoPeriodicSolution,
    NoRoot,
    NotClosed,
    NotMinimal,
    PoleCollision,
    QuadratureFailure,
)
from .profile_solver import ProfileSolution, build_profile, evaluate, theta
from .rotation_number import (
    KBounds,
    admissible_H_interval,
    b1_bound,
    b2_bound,
    k_limits,
    rotation_K,
    rotation_K_n2_lemma,
    singular_limit_oracle,
)
from .scalar_core import PolyRoots, ProblemParams, SpaceKind, critical_point, roots_general
from .surface_builder import build_mesh_n2, delaunay_n2, immerse, profile_curve
from .verifier import VerificationReport, verify_limits, verify_surface

__version__ = "0.1.0"
