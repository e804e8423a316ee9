"""Exact block-diagonalization under the principle of least action.

Given H and a partition of the basis into subspaces K_a, the unitary T that
maps H to a block-diagonal matrix with the same spectrum while staying
closest to the identity is T = X X_BD^dagger (X_BD X_BD^dagger)^(-1/2),
where X holds the eigenvectors of H, each placed in a column belonging to
the block it overlaps most, and X_BD is X with its off-block entries
removed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateAssignmentError, IllConditionedPartitionError
from .operators import BlockPartition, hermitize

AMBIGUITY_TOL = 1e-6
DEGENERACY_TOL = 1e-10
SINGULAR_TOL = 1e-12


class Assignment(NamedTuple):
    X: np.ndarray          # eigenvectors, column k assigned to the block containing index k
    energies: np.ndarray   # eigenvalue of each column of X
    overlaps: np.ndarray   # squared projection of each column onto its assigned block


@dataclass(frozen=True)
class BlockDiagResult:
    H_eff: np.ndarray
    T: np.ndarray
    I_metric: float
    residual: float
    partition: BlockPartition
    X: np.ndarray
    X_BD: np.ndarray


def _block_overlaps(V: np.ndarray, partition: BlockPartition) -> np.ndarray:
    weights = np.abs(V) ** 2
    return np.stack([weights[list(b), :].sum(axis=0) for b in partition.blocks], axis=1)


def _align_degenerate(evals, V, partition, tol):
    """Rotate each degenerate eigenspace onto a basis adapted to the blocks.

    Within a cluster of (numerically) equal eigenvalues any orthonormal basis
    is valid; we pick the eigenbasis of sum_a (a+1) V^dagger P_a V, which is
    block-aligned whenever the eigenspace splits across blocks.
    """
    scale = max(1.0, float(np.ptp(evals)) if evals.size else 1.0)
    V = V.copy()
    start = 0
    n = len(evals)
    weight = np.zeros(partition.dim)
    for a, b in enumerate(partition.blocks):
        weight[list(b)] = a + 1
    while start < n:
        stop = start + 1
        while stop < n and evals[stop] - evals[stop - 1] < tol * scale:
            stop += 1
        if stop - start > 1:
            Vc = V[:, start:stop]
            K = Vc.conj().T @ (weight[:, None] * Vc)
            _, Q = np.linalg.eigh(K)
            V[:, start:stop] = Vc @ Q
        start = stop
    return V


def assign_eigenvectors(H, partition: BlockPartition, ambiguity_tol: float = AMBIGUITY_TOL,
                        degeneracy_tol: float = DEGENERACY_TOL) -> Assignment:
    """Attribute every eigenvector of H to one block, d_K eigenvectors per block K.

    The assignment maximizes the total squared overlap of eigenvectors with
    their blocks. It is rejected when exchanging two eigenvectors between
    blocks changes that total by less than ``ambiguity_tol``.
    """
    H = np.asarray(H, dtype=complex)
    if H.shape != (partition.dim, partition.dim):
        raise ValueError(f"H has shape {H.shape}, partition has dim {partition.dim}")
    evals, V = np.linalg.eigh(hermitize(H, check=False))
    V = _align_degenerate(evals, V, partition, degeneracy_tol)
    w = _block_overlaps(V, partition)

    slot_block = partition.labels
    rows, cols = linear_sum_assignment(-w[:, slot_block])
    vec_block = np.empty(len(evals), dtype=int)
    vec_block[rows] = slot_block[cols]

    if len(partition) > 1:
        D = w[:, vec_block]
        own = np.diag(D)
        gain = own[:, None] + own[None, :] - D - D.T
        competing = vec_block[:, None] != vec_block[None, :]
        if np.any(competing & (gain < ambiguity_tol)):
            i, j = np.argwhere(competing & (gain < ambiguity_tol))[0]
            raise DegenerateAssignmentError(
                f"eigenvectors {i} (E={evals[i]:.9g}) and {j} (E={evals[j]:.9g}) compete for "
                f"blocks {vec_block[i]} and {vec_block[j]} (swap gain {gain[i, j]:.2e})",
                overlaps=w,
            )

    n = partition.dim
    X = np.zeros((n, n), dtype=complex)
    energies = np.zeros(n)
    overlaps = np.zeros(n)
    for a, block in enumerate(partition.blocks):
        members = np.flatnonzero(vec_block == a)
        members = members[np.argsort(evals[members], kind="stable")]
        idx = list(block)
        for slot, j in zip(idx, members):
            v = V[:, j]
            k = idx[int(np.argmax(np.abs(v[idx])))]
            X[:, slot] = v * (abs(v[k]) / v[k]) if v[k] != 0 else v
            energies[slot] = evals[j]
            overlaps[slot] = w[j, a]
    return Assignment(X, energies, overlaps)


def effectiveness_metric(X_BD) -> float:
    """tr(X_BD X_BD^dagger) / dim, in [0, 1]; equals 1 iff X is block-diagonal."""
    X_BD = np.asarray(X_BD)
    return float(np.sum(np.abs(X_BD) ** 2)) / X_BD.shape[0]


def inverse_sqrt_psd(M, tol: float = SINGULAR_TOL) -> np.ndarray:
    evals, Q = np.linalg.eigh(M)
    if evals.min() < tol:
        raise IllConditionedPartitionError(
            f"X_BD X_BD^dagger is singular (smallest eigenvalue {evals.min():.3e}); "
            "the partition does not capture the eigenspace structure"
        )
    return (Q / np.sqrt(evals)) @ Q.conj().T


def least_action_blockdiag(H, partition: BlockPartition, **assign_kw) -> BlockDiagResult:
    H = np.asarray(H, dtype=complex)
    X, _, _ = assign_eigenvectors(H, partition, **assign_kw)
    X_BD = partition.block_diagonal(X)
    X_P = X_BD @ X_BD.conj().T
    T = X @ X_BD.conj().T @ inverse_sqrt_psd(X_P)
    raw = T.conj().T @ H @ T
    off = partition.off_block(raw)
    residual = float(np.max(np.abs(off))) if off.size else 0.0
    H_eff = partition.block_diagonal(hermitize(raw, check=False))
    return BlockDiagResult(H_eff=H_eff, T=T, I_metric=effectiveness_metric(X_BD),
                           residual=residual, partition=partition, X=X, X_BD=X_BD)
