"""Independent ground truth: dense diagonalization in a truncated number basis.

The Hamiltonian is built in the basis |n> x |up/down| (photon number n up to a
cutoff), diagonalized with a dense symmetric solver, and every eigenstate is
classified by the conserved parity operator Pi = -sigma_z (-1)^N, which is
diagonal in this basis.  The overall sign of Pi is chosen so that the
weak-coupling ground state |0,down> is EVEN, which makes the oracle's sector
labels consistent with the series-expansion solver's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ModelParams, Parity

#: relative eigenvalue change under cutoff doubling below which a level counts
#: as converged
LEVEL_STABILITY_TOL = 1e-10
#: parity expectation value below which an eigenvector counts as a degenerate mix
PURITY_THRESHOLD = 1.0 - 1e-6
#: eigenvalue spacing below which states are grouped into one degenerate cluster
DEGENERACY_GAP = 1e-8
DEFAULT_CUTOFF_CAP = 1024


class NonSymmetricInputError(ValueError):
    """Matrix handed to the dense symmetric solver is not symmetric."""


class DegenerateMixError(RuntimeError):
    """Eigenvector mixes both parity sectors; re-diagonalize the degenerate block."""


class CutoffExceededError(RuntimeError):
    """Cutoff doubling hit the cap before the requested levels converged."""

    def __init__(self, cap: int, converged_count: int, n_levels: int) -> None:
        super().__init__(
            f"fock cutoff cap {cap} reached with only {converged_count} of "
            f"{n_levels} requested levels converged"
        )
        self.cap = cap
        self.converged_count = converged_count
        self.n_levels = n_levels


@dataclass
class OracleResult:
    """Spectrum of one diagonalization run, aligned with per-state parity labels."""

    fock_cutoff: int
    eigenvalues: np.ndarray
    parities: list[Parity]
    parity_purity: np.ndarray
    converged_count: int

    def sector(self, parity: Parity, n_levels: int | None = None) -> np.ndarray:
        """Ascending eigenvalues of one parity sector, optionally the lowest n."""
        values = np.array(
            [e for e, p in zip(self.eigenvalues, self.parities) if p is parity]
        )
        return values if n_levels is None else values[:n_levels]


def parity_diagonal(fock_cutoff: int) -> np.ndarray:
    """Diagonal of Pi = -sigma_z (-1)^N in the |n,up>, |n,down> ordering."""
    n = np.arange(fock_cutoff + 1)
    diag = np.empty(2 * (fock_cutoff + 1))
    diag[0::2] = -((-1.0) ** n)  # |n,up>
    diag[1::2] = (-1.0) ** n  # |n,down>
    return diag


def build_hamiltonian(params: ModelParams, fock_cutoff: int) -> np.ndarray:
    """Dense real symmetric Hamiltonian of dimension 2*(fock_cutoff+1).

    Basis index 2n is |n,up>, index 2n+1 is |n,down>.  g1 couples
    |n,up> <-> |n+1,down> and g2 couples |n,down> <-> |n+1,up>, both with the
    raising matrix element sqrt(n+1).
    """
    if fock_cutoff < 1:
        raise ValueError(f"fock_cutoff must be >= 1, got {fock_cutoff}")
    dim = 2 * (fock_cutoff + 1)
    h = np.zeros((dim, dim))
    n = np.arange(fock_cutoff + 1)
    h[2 * n, 2 * n] = n + params.delta / 2.0
    h[2 * n + 1, 2 * n + 1] = n - params.delta / 2.0
    root = np.sqrt(n[:-1] + 1.0)
    up, down = 2 * n[:-1], 2 * n[:-1] + 1
    h[down + 2, up] = h[up, down + 2] = params.g1 * root
    h[up + 2, down] = h[down, up + 2] = params.g2 * root
    return h


def diagonalize(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full spectrum and orthonormal eigenvectors of a real symmetric matrix."""
    asymmetry = np.max(np.abs(matrix - matrix.T))
    if asymmetry > 1e-12 * max(1.0, np.max(np.abs(matrix))):
        raise NonSymmetricInputError(f"input asymmetry {asymmetry:.3e} above tolerance")
    return scipy.linalg.eigh(matrix)


def classify_parity(eigenvector: np.ndarray, fock_cutoff: int) -> tuple[Parity, float]:
    """Parity sector and purity |<Pi>| of a normalized eigenvector.

    Raises DegenerateMixError when the state mixes both sectors, which only
    happens inside a degenerate subspace (level crossing); the caller then
    rotates the degenerate block into Pi eigenvectors.
    """
    diag = parity_diagonal(fock_cutoff)
    expectation = float(np.dot(eigenvector * eigenvector, diag))
    purity = abs(expectation)
    if purity < PURITY_THRESHOLD:
        raise DegenerateMixError(
            f"parity purity {purity:.6f} below threshold; degenerate subspace"
        )
    return (Parity.EVEN if expectation > 0 else Parity.ODD), purity


def _resolve_degenerate_clusters(
    eigenvalues: np.ndarray, vectors: np.ndarray, pi_diag: np.ndarray
) -> np.ndarray:
    """Rotate eigenvectors inside degenerate clusters into parity eigenvectors.

    Within a cluster of (numerically) equal eigenvalues any mixture is a valid
    eigenvector; diagonalizing Pi restricted to the cluster restores distinct
    parity labels.  Returns the updated eigenvector matrix.
    """
    expectation = np.einsum("ij,i,ij->j", vectors, pi_diag, vectors)
    start = 0
    n = len(eigenvalues)
    while start < n:
        stop = start + 1
        while stop < n and eigenvalues[stop] - eigenvalues[stop - 1] < DEGENERACY_GAP:
            stop += 1
        if stop - start > 1 and np.min(np.abs(expectation[start:stop])) < PURITY_THRESHOLD:
            block = vectors[:, start:stop]
            pi_block = block.T @ (pi_diag[:, None] * block)
            _, rotation = scipy.linalg.eigh(pi_block)
            vectors[:, start:stop] = block @ rotation
        start = stop
    return vectors


def _classified_spectrum(
    params: ModelParams, fock_cutoff: int
) -> tuple[np.ndarray, list[Parity], np.ndarray]:
    matrix = build_hamiltonian(params, fock_cutoff)
    eigenvalues, vectors = diagonalize(matrix)
    pi_diag = parity_diagonal(fock_cutoff)
    vectors = _resolve_degenerate_clusters(eigenvalues, vectors, pi_diag)
    expectation = np.einsum("ij,i,ij->j", vectors, pi_diag, vectors)
    parities = [Parity.EVEN if e > 0 else Parity.ODD for e in expectation]
    return eigenvalues, parities, np.abs(expectation)


def spectrum(
    params: ModelParams,
    fock_cutoff: int = 32,
    n_levels: int = 8,
    *,
    cutoff_cap: int = DEFAULT_CUTOFF_CAP,
) -> OracleResult:
    """Cutoff-converged spectrum: doubles the cutoff until the lowest n_levels
    eigenvalues move by less than LEVEL_STABILITY_TOL, then reports the final run.

    Raises CutoffExceededError when the cap is hit before convergence.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    cutoff = max(1, min(fock_cutoff, cutoff_cap))
    previous = _classified_spectrum(params, cutoff)[0]
    while True:
        next_cutoff = min(2 * cutoff, cutoff_cap)
        if next_cutoff == cutoff:
            raise CutoffExceededError(cutoff_cap, 0, n_levels)
        eigenvalues, parities, purity = _classified_spectrum(params, next_cutoff)
        stable = np.abs(eigenvalues[: len(previous)] - previous) < LEVEL_STABILITY_TOL
        converged_count = int(np.argmin(stable)) if not stable.all() else len(stable)
        if converged_count >= n_levels:
            return OracleResult(
                fock_cutoff=next_cutoff,
                eigenvalues=eigenvalues,
                parities=parities,
                parity_purity=purity,
                converged_count=converged_count,
            )
        if next_cutoff >= cutoff_cap:
            raise CutoffExceededError(cutoff_cap, converged_count, n_levels)
        cutoff, previous = next_cutoff, eigenvalues
