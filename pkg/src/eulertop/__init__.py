"""Limit cycles of Casimir-preserving polynomial perturbations of the Euler top."""

from .model import (
    ChartPoint,
    InertiaParams,
    casimir,
    chart_forward,
    chart_inverse,
    euler_field,
    hamiltonian,
    reduced_hamiltonian,
    structure_matrix,
)
from .polynomial import Poly3, RootReport, SqrtPoly, positive_roots
from .perturbation import (
    CrossProductSpec,
    PerturbedSystem,
    SemisphereSpec,
    TangentFieldSpec,
    build_cross_product,
    build_semisphere,
    load_spec,
    tangency_residual,
)
from .melnikov import (
    BifurcationReport,
    MelnikovPoly,
    admissible_levels,
    analyze,
    melnikov_allspheres,
    melnikov_quadrature,
    melnikov_semisphere,
    trig_moment,
)
from .verifier import (
    CycleResult,
    IntegratorConfig,
    casimir_drift,
    count_cycles,
    find_cycle,
    integrate,
    invariant_drift,
    return_map,
)

__version__ = "0.1.0"
