"""Classical electrons on finitely many sites: canonical vs grand-canonical energies.

Computes E[V, N] by enumeration, the canonical and grand-canonical density
functionals by linear programming, dual potentials, hardness landscapes and
convexity counterexample certificates, plus leading-order predictions for
the associated far-apart nuclear systems.
"""
from .asymptotics import (
    BindingReport,
    ScaledNuclearSystem,
    binding_report,
    leading_order_energy,
    lieb_max_binding,
    scale_system,
    step_profile,
)
from .canonical import (
    INFINITY,
    EnergyProfile,
    canonical_energy,
    canonical_functional,
    convexity_check,
    energy_profile,
    lower_convex_envelope,
)
from .core import (
    DensityVector,
    EnsembleState,
    ExternalPotential,
    Occupation,
    SiteConfiguration,
    configuration_energy,
    ensemble_density,
    ensemble_energy,
    enumerate_occupations,
    pair_distance_matrix,
)
from .errors import *  # noqa: F401,F403
from .fixtures import DIAMOND_REFLECTIONS, REFERENCE_TABLE, V_GC, V_STAR, diamond, half_filling
from .grandcanonical import DualCertificate, dual_potential, gc_energy, gc_functional
from .search import (
    CertificationReport,
    GapSample,
    HardnessResult,
    certify_counterexample,
    diamond_gap,
    gap_at_density,
    hardness,
    hardness_grid,
    minimize_hardness,
    random_geometry_search,
)
from .simplex import LinearProgram, LpSolution, LpStatus, solve_lp, verify_by_vertex_enumeration

__version__ = "0.1.0"
