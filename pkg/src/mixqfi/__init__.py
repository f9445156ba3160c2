"""Maximal quantum Fisher information of mixed states under unitary encoding,
control-assisted bounds, thermal spin ensembles and purity-constrained
spectrum optimization."""

__version__ = "0.1.0"

from ._accel import backend_name
from .control import (
    EigTrajectory,
    PulseSchedule,
    TimeDependentHamiltonian,
    eig_trajectory,
    fd_generator,
    k_alpha_bound,
    pi_pulse_schedule,
    propagate,
    saturation_check,
)
from .qfi import (
    DensityOperator,
    HermitianOperator,
    QFIReport,
    block_norm_bound,
    brute_force_max,
    haar_random_unitary,
    max_qfi,
    offdiag_block_sqnorm,
    optimal_state,
    qfi,
)
from .spectra import (
    build_q_coefficients,
    coeff_matrix,
    gap_vector,
    pair_coeff,
    phi_p,
    state_spectrum,
    weak_majorizes,
)
from .spectrum_opt import PurityProblem, PuritySolution, optimize_spectrum, purity_scan
from .thermal import (
    SpinEnsemble,
    beta_from_polarization,
    dice_degeneracy,
    lower_bound_LB,
    lower_bound_MB,
    thermal_max_qfi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
