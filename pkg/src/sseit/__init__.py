"""State-selective EIT protection simulator for cesium atom arrays.

The package builds multilevel rotating-frame Hamiltonians for ladder EIT
schemes on the cesium D lines, analyzes dressed-state protection, solves the
Lindblad master equation for scattering dynamics, derives the photon
reabsorption suppression factor R, and evaluates closed-form 2D/3D array
error budgets.
"""

from .angular import HalfInt, hyperfine_dipole_element, wigner3j, wigner6j
from .atomdata import (
    LevelRegistry,
    Manifold,
    ManifoldData,
    StateLabel,
    cesium_registry,
    dipole_element,
    zeeman_shift,
)
from .budget import (
    BudgetInput,
    BudgetResult,
    max_array,
    rescatter_probability,
    resonant_cross_section,
    total_error,
)
from .dressed import (
    ProtectionMap,
    dressed_rate_estimate,
    eigensystem,
    nonground_population,
    protection_map,
)
from .errors import ConfigurationError, DomainError, IntegrationError
from .experiments import (
    ImagingLoopConfig,
    ImagingLoopReport,
    Scheme3Point,
    SuppressionPoint,
    SweepResult,
    field_sweep,
    imaging_loop,
    mapping_sequence_check,
    polarization_sweep,
    scheme3_analysis,
    suppression_curve,
)
from .hamiltonian import HermitianOperator, SchemeConfig, build_rwa_hamiltonian
from .lightfield import (
    FieldRole,
    FieldSpec,
    Polarization,
    electric_field_amplitude,
    rabi_frequency,
)
from .lindblad import (
    DensityMatrix,
    JumpOperator,
    RateTrace,
    collapse_operators,
    evolve,
    steady_rate,
    suppression_factor,
)
from .schemeio import load_scheme, save_scheme, scheme_from_dict, scheme_to_dict
from .schemes import scheme1, scheme2, scheme3, toy_model

__version__ = "0.1.0"
