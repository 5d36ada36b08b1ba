"""Explicit hyperkahler metrics for A_k and D_k gravitational instantons."""
from .ak import (AkConfiguration, ak_h_function, ak_period_matrix, contour_connection,
                 contour_potential, gh_connection, h_bar, multi_center_gh, multi_center_potential,
                 xi_factorization_check)
from .dk import (DkConfiguration, E2Solver, NoSolutionError, ab_coefficients,
                 atiyah_hitchin_closed_form, atiyah_hitchin_pipeline, build_root_family,
                 constraint_residual, dk_h, dk_metric, dk_period_matrix, lagrange_l_poly, solve_e2)
from .elliptic import (PoleError, lattice_from_invariants, lattice_from_roots,
                       lattice_from_standard_invariants)
from .glt import (ORIENTATION, DegeneracyError, FramedGeometry, HSpinor, SignatureError,
                  contour_h, gibbons_hawking, hankel_a, hankel_phi, o4_ansatz)
from .majorana import MajoranaSpinor, QuaternionicParams, factorize, invariants, parametrize_forward
from .spin import DomainError, Quaternion, quaternion_from_euler, wigner_d

__version__ = "0.1.0"

__all__ = [
    "AkConfiguration", "DkConfiguration", "E2Solver", "FramedGeometry", "HSpinor",
    "MajoranaSpinor", "Quaternion", "QuaternionicParams", "ORIENTATION",
    "DegeneracyError", "DomainError", "NoSolutionError", "PoleError", "SignatureError",
    "ab_coefficients", "ak_h_function", "ak_period_matrix", "atiyah_hitchin_closed_form",
    "atiyah_hitchin_pipeline", "build_root_family", "constraint_residual", "contour_connection",
    "contour_h", "contour_potential", "dk_h", "dk_metric", "dk_period_matrix", "factorize",
    "gh_connection", "gibbons_hawking", "h_bar", "hankel_a", "hankel_phi", "invariants",
    "lagrange_l_poly", "lattice_from_invariants", "lattice_from_roots",
    "lattice_from_standard_invariants", "multi_center_gh",
    "multi_center_potential", "o4_ansatz", "parametrize_forward", "quaternion_from_euler",
    "solve_e2", "wigner_d", "xi_factorization_check",
]
