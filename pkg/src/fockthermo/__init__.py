"""Temperature estimation with a single dissipative bosonic mode.

Simulates number, coherent, squeezed-vacuum, and thermal probes under a
thermal-contact master equation on a truncated Fock space, computes
classical and quantum Fisher information for the bath temperature, and
evaluates the matching closed-form short-time expressions.
"""

__version__ = "0.1.0"

from .bath import BathParams, RateModel, Rates, rates, thermal_occupation, thermal_occupation_dT
from .bounds import (
    BoundKind,
    BoundResult,
    EnqfiResult,
    bound_coherent,
    bound_fock_linear,
    bound_fock_quadratic,
    bound_squeezed,
    enqfi,
    scaling_table,
)
from .dynamics import (
    EvolutionConfig,
    EvolutionMethod,
    evolve,
    lindblad_rhs,
    mean_photon_analytic,
    short_time_populations,
)
from .errors import FockThermoError
from .fisher import (
    DerivativeConfig,
    FisherMethod,
    QfiRecord,
    cfi_number_basis,
    d_dT_state,
    qfi_curve,
    qfi_point,
    qfi_sld,
)
from .fockspace import DensityMatrix, annihilation, creation, number_operator, validate_density
from .probes import EnergyMatch, ProbeKind, ProbeSpec, default_dim, energy_match, make_state
from .sweep import SweepAxis, SweepMethod, SweepSpec, fit_scaling_exponent, run_sweep

__all__ = [
    "__version__",
    "BathParams",
    "RateModel",
    "Rates",
    "rates",
    "thermal_occupation",
    "thermal_occupation_dT",
    "BoundKind",
    "BoundResult",
    "EnqfiResult",
    "bound_coherent",
    "bound_fock_linear",
    "bound_fock_quadratic",
    "bound_squeezed",
    "enqfi",
    "scaling_table",
    "EvolutionConfig",
    "EvolutionMethod",
    "evolve",
    "lindblad_rhs",
    "mean_photon_analytic",
    "short_time_populations",
    "FockThermoError",
    "DerivativeConfig",
    "FisherMethod",
    "QfiRecord",
    "cfi_number_basis",
    "d_dT_state",
    "qfi_curve",
    "qfi_point",
    "qfi_sld",
    "DensityMatrix",
    "annihilation",
    "creation",
    "number_operator",
    "validate_density",
    "EnergyMatch",
    "ProbeKind",
    "ProbeSpec",
    "default_dim",
    "energy_match",
    "make_state",
    "SweepAxis",
    "SweepMethod",
    "SweepSpec",
    "fit_scaling_exponent",
    "run_sweep",
]
