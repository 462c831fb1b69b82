"""anwaves: a numerical laboratory for equivariant Adkins-Nappi wave maps.

Computes the stationary profiles Q_n by shooting and by energy
minimization, verifies their monotonicity/asymptotics/Pohozaev-type
properties, checks the spectral facts of the linearized half-line
operator, evolves the reduced 5d semilinear wave equation with
conserved-energy and scattering-norm monitors, and implements the
exterior-energy channel diagnostics.
"""

__version__ = "0.1.0"

from .radial import (PairState, RadialField, RadialGrid, differentiate,
                     radial_laplacian, sobolev_norms, weighted_integral, wkp_norm)
from .stationary import (ShootingParams, ShootResult, StationaryMap, gee,
                         interior_series, exterior_series, minimize_static_energy,
                         ode_rhs_log, pohozaev_W, shoot, solve_stationary,
                         static_energy, verify_stationary)
from .linearized import (PotentialProfile, SpectralReport, count_negative_eigenvalues,
                         potential_V, potential_tilde, spectral_report, susy_residual,
                         threshold_test)
from .evolution import (DiagnosticSeries, EvolutionConfig, conserved_energy, evolve,
                        gaussian_bump, nonlinearity_Z, psi_from_u, rhs, strichartz_S,
                        u_from_psi, wavemap_residual)
from .channels import (ProjectionDecomposition, channel_experiment, exterior_energy,
                       newton_family_data, project_pi_a, random_exterior_data, v0_v1)

__all__ = [name for name in dir() if not name.startswith("_")]
