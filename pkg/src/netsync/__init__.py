"""Synchronization in networks of diffusively coupled identical
oscillators: Laplacian spectra, critical coupling thresholds, fixed-step
simulation, and persistence bounds for linear coupling perturbations."""

from .dynamics import (
    CLASSIC,
    AbsorbingSet,
    CouplingMatrix,
    LorenzParams,
    VectorField,
    beta_inf,
    coupling_matrix,
    identity_coupling,
    lorenz_absorbing_set,
    lorenz_field,
    state_bounds,
)
from .graphs import (
    BarabasiAlbert,
    ErdosRenyi,
    Graph,
    RegularKind,
    WattsStrogatz,
    build_random,
    build_regular,
    diameter,
    graph_from_edges,
    lambda2_analytic,
    lambda2_bounds,
    laplacian,
    spectrum,
)
from .matcore import (
    SpectralDecomp,
    inf_norm,
    jacobi_eig,
    kron,
    principal_minor_dets,
    symmetric_part,
)
from .netsim import (
    NetworkSystem,
    Perturbation,
    Trajectory,
    mode_rhs,
    project_modes,
    rhs,
    rk4_integrate,
    variational_two,
)
from .stability import (
    CouplingReport,
    PersistenceReport,
    alpha_c_general,
    alpha_c_two_dd,
    alpha_c_two_minors,
    alpha_c_two_sym,
    contraction_rate_estimate,
    coppel_margin,
    integral_perturbation_margin,
    persistence_bound,
)
from .diagnostics import (
    SimConfig,
    SweepResult,
    alpha_sweep,
    colormap_sweep,
    sync_error_series,
    time_avg_sync_error,
)

__version__ = "0.1.0"
