"""Analysis toolkit for the driven cubic-quintic Duffing oscillator."""

from .core import (
    EnergyReport,
    Equilibrium,
    OscillatorParams,
    State,
    Trajectory,
    energy,
    energy_report,
    equilibria,
    hamiltonian_fields,
    rhs,
    separatrix_velocity,
)
from .elliptic import complete_k, jacobi_cn, jacobi_dn, jacobi_sn
from .odeint import IntegrationError, StepControl, integrate, integrate_delayed

__version__ = "0.1.0"

__all__ = [
    "OscillatorParams",
    "State",
    "Trajectory",
    "EnergyReport",
    "Equilibrium",
    "rhs",
    "energy",
    "energy_report",
    "equilibria",
    "separatrix_velocity",
    "hamiltonian_fields",
    "jacobi_sn",
    "jacobi_cn",
    "jacobi_dn",
    "complete_k",
    "StepControl",
    "integrate",
    "integrate_delayed",
    "IntegrationError",
    "__version__",
]
