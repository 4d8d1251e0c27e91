"""Foldy-Wouthuysen transformation of relativistic Hamiltonians in external fields.

Submodules
----------
algebra         beta-graded block operators, commutators, matrix square roots
discretization  momentum blocks, periodic grids and oscillator bases
fields          electromagnetic field configurations
params          particle parameters and semiclassical states
transform       exact and general FW transformations, hbar-scaling probe
hamiltonians    Dirac-Pauli and Feshbach-Villars Hamiltonians, analytic FW form
semiclassical   force and spin-precession equations, trajectory integration
oracle          Eriksen block-diagonalization, exact evolution, Ehrenfest checks
scenario, cli   scenario files and the ``fw`` command
"""
from .algebra import BlockOperator, GradedParts, commutator, anticommutator, grade_split
from .discretization import HermiteBasis1D, MomentumBlock, PeriodicGrid1D
from .errors import (
    FieldConsistencyError,
    FieldDomainError,
    FWError,
    GapClosure,
    InvalidBasis,
    NotExactCase,
    ScalingRangeWarning,
    ScenarioError,
    SingularSqrt,
    StiffnessError,
    Unsupported,
    ValidityError,
    ValidityWarning,
)
from .fields import FieldConfiguration, gaussian_well, stern_gerlach, uniform_electric, uniform_magnetic, zero_field
from .hamiltonians import (
    build_dirac_pauli,
    build_feshbach_villars,
    eval_fw_spin_half_analytic,
    heisenberg_rhs,
)
from .oracle import WavepacketState, ehrenfest_check, eriksen_fw, evolve
from .params import ParticleParams, PhaseSpinState
from .semiclassical import IntegratorControls, Trajectory, ValidityReport, integrate, rhs_scalar, rhs_spin_half, validity_report
from .transform import (
    FWResult,
    ScalingCase,
    SplitHamiltonian,
    exact_fw,
    final_fw,
    general_fw,
    general_fw_step,
    hbar_scaling_probe,
    random_commuting_triple,
    resplit,
    transform,
)

__version__ = "0.1.0"
