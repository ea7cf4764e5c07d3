"""Thermal entanglement of Heisenberg spin dimers from magnetic susceptibility."""

__version__ = "0.1.0"

from .analysis import (
    COMPLEX_I,
    COMPLEX_II,
    CompositeModel,
    EntanglementProfile,
    FitConfig,
    FitResult,
    SusceptibilityCurve,
    TeEstimates,
    entanglement_profile,
    estimate_te,
    find_peak,
    fit_curve,
    model_chi,
    subtract_impurity,
    synthesize_curve,
)
from .entanglement import (
    concurrence_wootters,
    concurrence_x_form,
    dimer_concurrence,
    entanglement_of_formation,
    entanglement_temperature,
)
from .errors import DecompositionError, DomainError, XFormError
from .magnetics import (
    ClusterSpec,
    PeakCoordinates,
    bleaney_bowers_chi,
    chi_peak,
    concurrence_from_chi,
    curie_chi_cluster,
    curie_chi_dimer,
    lambert_w,
    mu_eff,
    mu_eff_threshold,
    powder_g,
    te_from_tmax,
    witness_chi,
)
from .separability import ProductDecomposition, canonical_decomposition, reconstruct, verify_decomposition
from .spin import (
    DimerParams,
    DimerSpectrum,
    hamiltonian_matrix,
    limit_state,
    magnetization_z,
    spectrum,
    susceptibility_numeric,
    thermal_state,
)
