"""Invariant minimal hypersurfaces asymptotic to the Simons cones C_{n,p}."""
from .cone import ConeParams, cone_density, link_volume
from .errors import ConvergenceError, ValidationError
from .flow import OrbitControls, ProfileCurve, generate_sigma, integrate_orbit, singular_points
from .spectral import indicial_roots

__version__ = "0.1.0"

__all__ = [
    "ConeParams", "cone_density", "link_volume",
    "ConvergenceError", "ValidationError",
    "OrbitControls", "ProfileCurve", "generate_sigma", "integrate_orbit", "singular_points",
    "indicial_roots",
]
