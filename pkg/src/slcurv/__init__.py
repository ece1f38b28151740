"""Special Lagrangian curvature of convex hypersurfaces: evaluation, lifts and constructions."""
from .kernels import BACKEND
from .symmat import SymMatrix, Spectrum, eigen_sym, complex_det
from .curvature import sl_value, r_theta, weingarten_residual, special_angle_root, gaussian_identities
from .ambient import SpaceForm, MetricPerturbation, Bump, riemann, exp_map, ortho_frame
from .hypersurface import ImmersionPatch, FamilySpec, fundamental_forms, sl_of_patch, make_family
from .legendrian import gauss_lift, legendrian_report, lifted_metric_check, f_tau, verticality_order

__version__ = "1.0.0"

__all__ = [
    "BACKEND",
    "SymMatrix",
    "Spectrum",
    "eigen_sym",
    "complex_det",
    "sl_value",
    "r_theta",
    "weingarten_residual",
    "special_angle_root",
    "gaussian_identities",
    "SpaceForm",
    "MetricPerturbation",
    "Bump",
    "riemann",
    "exp_map",
    "ortho_frame",
    "ImmersionPatch",
    "FamilySpec",
    "fundamental_forms",
    "sl_of_patch",
    "make_family",
    "gauss_lift",
    "legendrian_report",
    "lifted_metric_check",
    "f_tau",
    "verticality_order",
    "__version__",
]
