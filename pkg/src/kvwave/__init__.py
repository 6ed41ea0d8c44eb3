"""Spectral-Galerkin simulator and inequality harness for the quintic wave
equation with localized Kelvin-Voigt damping on Dirichlet boxes."""

__version__ = "0.1.0"

from .basis import (
    Basis,
    Domain,
    apply_laplacian,
    build_basis,
    from_spectral,
    gradient_on_grid,
    h1_norm,
    integrate,
    l2_norm,
    to_spectral,
)
from .damping import (
    DampingProfile,
    assemble_kv_matrix,
    dissipation_quadratic_form,
    make_profile,
    structural_constant_estimate,
)
from .dynamics import (
    BlowUpError,
    NewtonDivergenceError,
    SchemeConfig,
    State,
    Stepper,
    Trajectory,
    energy,
    rhs,
    run,
    step,
    strong_energy,
)
from .multipliers import (
    bernstein_ratio,
    chi,
    project_high,
    project_low,
    reverse_bernstein_ratio,
    tail_energy,
)
from .nonlinearity import Truncation, aliasing_residual, apply_nonlinearity
from .norms import MixedNormAccumulator, bootstrap_monitor, bootstrap_root, lp_norm, mixed_norm
