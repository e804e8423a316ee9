"""Bosonic ladder operators, transmon Hamiltonians, orderings and Pauli projections.

All frequencies are cyclic (value = omega / 2pi) and expressed in GHz, so
matrix entries are in GHz as well.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidDimensionError, NotHermitianError, PoleError

log = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = tuple(a + b for a, b in itertools.product("IXYZ", repeat=2))


@dataclass(frozen=True)
class DeviceParams:
    """Two transmons coupled through a bus resonator.

    ``J`` may be left as ``None``, in which case it is computed from the
    transmon-bus couplings with :func:`exchange_J`.
    """

    omega1: float
    omega2: float
    delta1: float
    delta2: float
    g1: float = 0.0
    g2: float = 0.0
    omega_r: float = math.inf
    J: Optional[float] = None
    d: int = 5

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvalidDimensionError(f"d must be an integer >= 2, got {self.d}")
        for name in ("omega1", "omega2", "delta1", "delta2", "g1", "g2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def reference(cls, d: int = 5, **overrides) -> "DeviceParams":
        """Device of the fixed-frequency CR experiment used throughout the analysis."""
        base = dict(omega1=5.114, omega2=4.914, delta1=-0.330, delta2=-0.330,
                    g1=0.098, g2=0.083, omega_r=6.31, J=3.80e-3, d=d)
        base.update(overrides)
        return cls(**base)

    @property
    def detuning(self) -> float:
        return self.omega1 - self.omega2

    @property
    def coupling(self) -> float:
        return self.J if self.J is not None else exchange_J(self)

    def with_(self, **changes) -> "DeviceParams":
        return replace(self, **changes)

    def dispersive_ratios(self) -> tuple[float, float]:
        """|g_j / (omega_j - omega_r)| for both transmons; should be << 1."""
        if not math.isfinite(self.omega_r):
            return 0.0, 0.0
        return (abs(self.g1 / (self.omega1 - self.omega_r)),
                abs(self.g2 / (self.omega2 - self.omega_r)))


@dataclass(frozen=True)
class HermitianOp:
    """Dense Hermitian matrix tagged with the basis ordering it is written in."""

    entries: np.ndarray = field(repr=False)
    ordering: str = "kron"

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"expected a square matrix, got shape {m.shape}")
        if self.ordering not in ("kron", "ladder"):
            raise ValueError(f"unknown ordering {self.ordering!r}")
        m = hermitize(m)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


def hermitian_defect(m: np.ndarray) -> float:
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)) / scale)


def hermitize(m, rtol: float = HERMITIAN_RTOL, check: bool = True) -> np.ndarray:
    """Return (M + M^dagger)/2, raising if M was not Hermitian to ``rtol``."""
    m = np.asarray(m, dtype=complex)
    defect = hermitian_defect(m)
    if check and defect > rtol:
        raise NotHermitianError(f"matrix is not Hermitian (relative defect {defect:.3e})")
    if defect:
        log.debug("symmetrized matrix with relative Hermiticity defect %.3e", defect)
    return (m + m.conj().T) / 2


def annihilation(d: int) -> np.ndarray:
    """Truncated bosonic lowering operator with b[k-1, k] = sqrt(k)."""
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"d must be an integer >= 2, got {d}")
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


def number(d: int) -> np.ndarray:
    return np.diag(np.arange(d, dtype=float)).astype(complex)


def duffing(omega: float, delta: float, d: int) -> HermitianOp:
    """Duffing oscillator omega n + (delta/2) n (n - 1) on d levels."""
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"d must be an integer >= 2, got {d}")
    k = np.arange(d, dtype=float)
    return HermitianOp(np.diag(k * omega + 0.5 * delta * k * (k - 1)))


def exchange_J(params: DeviceParams) -> float:
    """Lowest-order bus-mediated exchange coupling between the transmons."""
    den1 = params.omega1 - params.omega_r
    den2 = params.omega2 - params.omega_r
    if den1 == 0 or den2 == 0:
        raise PoleError("transmon resonant with the bus resonator", pole="omega_j = omega_r")
    if not math.isfinite(params.omega_r):
        return 0.0
    num = params.g1 * params.g2 * (params.omega1 + params.omega2 - 2 * params.omega_r)
    return num / (2 * den1 * den2)


def embed(op1: Optional[np.ndarray], op2: Optional[np.ndarray], d: int) -> np.ndarray:
    """op1 (x) op2 in Kronecker order, with ``None`` meaning identity."""
    eye = np.eye(d, dtype=complex)
    return np.kron(eye if op1 is None else op1, eye if op2 is None else op2)


def two_transmon_hamiltonian(params: DeviceParams) -> HermitianOp:
    d = params.d
    b = annihilation(d)
    h1 = duffing(params.omega1, params.delta1, d).entries
    h2 = duffing(params.omega2, params.delta2, d).entries
    hop = embed(b.conj().T, b, d)
    H = embed(h1, None, d) + embed(None, h2, d) + params.coupling * (hop + hop.conj().T)
    return HermitianOp(H, ordering="kron")


def quadratures(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Drive operators b_j + b_j^dagger for control (1) and target (2)."""
    b = annihilation(d)
    x = b + b.conj().T
    return embed(x, None, d), embed(None, x, d)


def kron_labels(d: int) -> list[tuple[int, int]]:
    return [(i1, i2) for i1 in range(d) for i2 in range(d)]


def ladder_order(d: int) -> list[int]:
    """Kron indices i1*d + i2 sorted by total excitation, then by i1."""
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"d must be an integer >= 2, got {d}")
    return sorted(range(d * d), key=lambda k: (k // d + k % d, k // d))


def permutation_matrix(order: Sequence[int]) -> np.ndarray:
    """F with (F v)[i] = v[order[i]], so F M F^T re-indexes rows and columns."""
    n = len(order)
    F = np.zeros((n, n))
    F[np.arange(n), list(order)] = 1.0
    return F


def ladder_permutation(d: int) -> np.ndarray:
    return permutation_matrix(ladder_order(d))


def computational_first_order(d: int) -> list[int]:
    """Ladder order with the two-qubit states 00, 01, 10, 11 moved to the front.

    This is the order in which the CR partition {00,01},{10,11},{rest}
    occupies contiguous index ranges starting at 0.
    """
    qubit = [0 * d + 0, 0 * d + 1, 1 * d + 0, 1 * d + 1]
    return qubit + [k for k in ladder_order(d) if k not in qubit]


def pauli(label: str) -> np.ndarray:
    if len(label) != 2 or any(c not in _PAULI_1Q for c in label):
        raise ValueError(f"not a two-qubit Pauli label: {label!r}")
    return np.kron(_PAULI_1Q[label[0]], _PAULI_1Q[label[1]])


def pauli_coefficient(H, label: str) -> float:
    """tr(H P/2) for a 4x4 Hamiltonian, so that H = sum_P coeff_P P/2."""
    H = np.asarray(H)
    if H.shape != (4, 4):
        raise InvalidDimensionError(f"expected a 4x4 qubit-subspace matrix, got {H.shape}")
    return float(np.real(np.trace(H @ pauli(label)))) / 2


def pauli_decompose(H) -> dict[str, float]:
    return {label: pauli_coefficient(H, label) for label in PAULI_LABELS}


def pauli_reconstruct(coeffs: dict[str, float]) -> np.ndarray:
    H = np.zeros((4, 4), dtype=complex)
    for label, c in coeffs.items():
        H += c * pauli(label) / 2
    return H


def total_number(d: int) -> np.ndarray:
    n = number(d)
    return embed(n, None, d) + embed(None, n, d)


def block_of(labels: Iterable[tuple[int, int]], d: int) -> list[int]:
    return [i1 * d + i2 for i1, i2 in labels]


@dataclass(frozen=True)
class BlockPartition:
    """Ordered, disjoint, nonempty index sets covering range(dim)."""

    blocks: tuple[tuple[int, ...], ...]
    dim: int

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = [i for b in blocks for i in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        if sorted(seen) != list(range(self.dim)):
            raise ValueError(f"blocks must be disjoint and cover range({self.dim}): {blocks}")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "BlockPartition":
        blocks = [tuple(b) for b in blocks if len(tuple(b))]
        return cls(tuple(blocks), sum(len(b) for b in blocks))

    @classmethod
    def singletons(cls, dim: int) -> "BlockPartition":
        return cls(tuple((i,) for i in range(dim)), dim)

    @classmethod
    def contiguous(cls, sizes: Sequence[int]) -> "BlockPartition":
        edges = np.cumsum([0, *sizes])
        return cls.from_blocks(range(a, b) for a, b in zip(edges[:-1], edges[1:]))

    def __len__(self):
        return len(self.blocks)

    @property
    def labels(self) -> np.ndarray:
        """Block index of every basis state."""
        lab = np.empty(self.dim, dtype=int)
        for a, b in enumerate(self.blocks):
            lab[list(b)] = a
        return lab

    @property
    def mask(self) -> np.ndarray:
        """Boolean matrix, True where row and column share a block."""
        lab = self.labels
        return lab[:, None] == lab[None, :]

    def block_diagonal(self, m) -> np.ndarray:
        return np.where(self.mask, m, 0)

    def off_block(self, m) -> np.ndarray:
        return np.where(self.mask, 0, m)

    def projector(self, a: int) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        idx = list(self.blocks[a])
        P[idx, idx] = 1.0
        return P

    def permuted(self, order: Sequence[int]) -> "BlockPartition":
        """Same partition expressed after re-indexing states by ``order``."""
        where = {old: new for new, old in enumerate(order)}
        return BlockPartition(tuple(tuple(where[i] for i in b) for b in self.blocks), self.dim)
