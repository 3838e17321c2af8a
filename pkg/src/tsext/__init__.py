"""Second cohomology of finite groups restricted to classes with a symmetric cocycle."""

from .analytics import (
    ClaimReport,
    ClaimResult,
    extension_density,
    modular_histogram,
    replay_witness,
    verify_claims,
    zeta_ts,
)
from .cohomology import (
    Cochain2,
    CohomologyGroup,
    coboundary,
    cocycle_residual,
    compute_b2,
    compute_h2,
    compute_h2_ts,
    compute_z2,
    inflation,
    is_cocycle,
    is_symmetric,
    same_class,
    symmetrize_class,
)
from .errors import (
    CocycleError,
    InvalidParameterError,
    NotInvertibleError,
    SizeGuardError,
    TsextError,
    ValidationError,
)
from .extensions import (
    ExtensionGroup,
    ExtensionMorphism,
    build_extension,
    check_morphism,
    compose_morphisms,
    identity_morphism,
    invert_morphism,
    max_element_order,
)
from .groups import (
    AbelianGroup,
    FiniteGroup,
    GroupAction,
    make_action,
    make_cyclic,
    make_symmetric_group,
    parse_abelian,
    parse_group,
    trivial_action,
)
from .invariants import density_invariants, invariant_report
from .profinite import Tower, build_cyclic_tower, tower_cohomology_system
from .zmod import kernel_mod, smith_normal_form, solve_mod, subquotient

__version__ = "0.1.0"
