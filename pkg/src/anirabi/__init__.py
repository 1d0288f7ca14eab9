"""Spectral solvers for the anisotropic quantum Rabi model.

Exact regular spectra from sector-function zeros, exceptional (doubly
degenerate) solutions from the pole-lifting condition, closed-form adiabatic
and first-order displaced-basis approximations, and a truncated-Fock-space
diagonalization oracle for cross-validation.
"""

from .model import DerivedParams, ModelParams, Parity, derive, spectral_energy, spectral_x
from .gfunc import (
    CoeffSeries,
    ExceptionalSolution,
    GValue,
    NonConvergenceError,
    PoleProximityError,
    ZeroScanOptions,
    compute_coefficients,
    exceptional_condition,
    find_exceptional,
    find_regular_zeros,
    g_function,
    wavefunction_coefficients,
)
from .grwa import (
    ApproxLevel,
    ApproxMethod,
    Branch,
    ComplexBlockError,
    CouplingMatrix,
    NonRealSpectrumError,
    OverlapMatrix,
    adiabatic_levels,
    coupling_matrix,
    grwa_block,
    grwa_ground_block,
    grwa_levels,
    laguerre,
    overlap_matrix,
    truncated_solve,
)
from .oracle import (
    CutoffExceededError,
    DegenerateMixError,
    NonSymmetricInputError,
    OracleResult,
    build_hamiltonian,
    classify_parity,
    diagonalize,
)
from .oracle import spectrum as oracle_spectrum

__all__ = [
    "ApproxLevel",
    "ApproxMethod",
    "Branch",
    "CoeffSeries",
    "ComplexBlockError",
    "CouplingMatrix",
    "CutoffExceededError",
    "DegenerateMixError",
    "DerivedParams",
    "ExceptionalSolution",
    "GValue",
    "ModelParams",
    "NonConvergenceError",
    "NonRealSpectrumError",
    "NonSymmetricInputError",
    "OracleResult",
    "OverlapMatrix",
    "Parity",
    "PoleProximityError",
    "ZeroScanOptions",
    "adiabatic_levels",
    "build_hamiltonian",
    "classify_parity",
    "compute_coefficients",
    "coupling_matrix",
    "derive",
    "diagonalize",
    "exceptional_condition",
    "find_exceptional",
    "find_regular_zeros",
    "g_function",
    "grwa_block",
    "grwa_ground_block",
    "grwa_levels",
    "laguerre",
    "oracle_spectrum",
    "overlap_matrix",
    "spectral_energy",
    "spectral_x",
    "truncated_solve",
    "wavefunction_coefficients",
]

__version__ = "0.1.0"
