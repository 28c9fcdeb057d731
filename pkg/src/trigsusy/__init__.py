"""Supersymmetric partner potentials of trigonometric type, solved three ways.

Closed forms, the Nikiforov-Uvarov pipeline and a finite-difference
oracle are cross-checked against each other.
"""

from .nu_core import BranchRule, NUProblem, k_candidates, pi_branches, quantize, solve_state
from .orthopoly import ShiftedJacobiParams, jacobi_g, jacobi_p
from .poly import Poly
from .potential_catalog import (
    PtpParams,
    ScpParams,
    StpParams,
    nu_spectrum,
    nu_wavefunction,
    oracle_spectrum,
    pt_transform,
    ptp_energy,
    scp_energy,
    stp_energy,
)
from .spectral_oracle import Grid, extrapolated_eigenvalues
from .susy_core import (
    HBAR2_EQ_2M,
    HBAR_M_1,
    Superpotential,
    TrigPotential,
    Units,
    hierarchy_spectrum,
    partner_potentials,
)

__version__ = "0.1.0"
