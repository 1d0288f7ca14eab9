"""Model parameters, derived constants and the parity label shared by all solvers.

The Hamiltonian is a single bosonic mode coupled to a two-level system with
independent strengths for the excitation-conserving (g1) and
excitation-nonconserving (g2) terms.  Everything is expressed in units of the
mode frequency, which is fixed to 1 and therefore not a parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Parity(Enum):
    """Conserved Z2 sector; every eigenvalue carries exactly one label.

    The sign convention is fixed so that the weak-coupling ground state
    (spin down, zero photons) is EVEN.
    """

    EVEN = "even"
    ODD = "odd"

    def flipped(self) -> "Parity":
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Bare model parameters.

    delta: qubit level splitting (any sign is legal).
    g1:    rotating-wave coupling, >= 0.
    g2:    counter-rotating coupling, >= 0.
    """

    delta: float
    g1: float
    g2: float

    def __post_init__(self) -> None:
        for name in ("delta", "g1", "g2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError(f"couplings must be nonnegative, got g1={self.g1}, g2={self.g2}")


@dataclass(frozen=True)
class DerivedParams:
    """Constants derived from the couplings, used throughout the solvers.

    lambda_plus  = (g1^2 + g2^2) / 2
    lambda_minus = (g1^2 - g2^2) / 2
    beta         = sqrt(g1 * g2)   (displacement of the first displaced basis)
    alpha        = (g1 + g2) / 2   (displacement of the second displaced basis)
    gamma        = (g1 - g2) / 2
    r            = g2 / g1, reported as +inf when g1 == 0
    """

    lambda_plus: float
    lambda_minus: float
    beta: float
    alpha: float
    gamma: float
    r: float


def derive(params: ModelParams) -> DerivedParams:
    """Compute all derived constants.  Total function: never raises for valid params."""
    g1, g2 = params.g1, params.g2
    return DerivedParams(
        lambda_plus=(g1 * g1 + g2 * g2) / 2.0,
        lambda_minus=(g1 * g1 - g2 * g2) / 2.0,
        beta=math.sqrt(g1 * g2),
        alpha=(g1 + g2) / 2.0,
        gamma=(g1 - g2) / 2.0,
        r=(g2 / g1) if g1 > 0 else math.inf,
    )


def _lambda_plus(params: ModelParams | DerivedParams) -> float:
    if isinstance(params, DerivedParams):
        return params.lambda_plus
    return derive(params).lambda_plus


def spectral_x(params: ModelParams | DerivedParams, energy: float) -> float:
    """Shift an energy E to the spectral variable x = lambda_plus + E."""
    return _lambda_plus(params) + energy


def spectral_energy(params: ModelParams | DerivedParams, x: float) -> float:
    """Inverse shift: recover the energy E = x - lambda_plus."""
    return x - _lambda_plus(params)
