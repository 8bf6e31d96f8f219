"""Normal graphs over the cone, equation residuals, decay fits, density and flux."""
from .decay import DecayFit, default_window, fit_decay
from .density import DensityProfile, cone_curve, density_profile
from .flux import FluxResult, cross4, flux, flux_leading_term
from .graphs import (
    RadialGraph,
    TorusGraph,
    amplitude_bound,
    graph_from_function,
    graph_to_profile,
    profile_to_graph,
    resample_graph,
    torus_from_function,
    torus_from_radial,
)
from .residual import InvariantResidual, TorusResidual, residual_full_torus, residual_invariant, spectral_derivative

__all__ = [
    "DecayFit", "default_window", "fit_decay",
    "DensityProfile", "cone_curve", "density_profile",
    "FluxResult", "cross4", "flux", "flux_leading_term",
    "RadialGraph", "TorusGraph", "amplitude_bound", "graph_from_function", "graph_to_profile",
    "profile_to_graph", "resample_graph", "torus_from_function", "torus_from_radial",
    "InvariantResidual", "TorusResidual", "residual_full_torus", "residual_invariant", "spectral_derivative",
]
