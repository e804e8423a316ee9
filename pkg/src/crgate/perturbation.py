"""Order-by-order canonical transformation H_eff = e^{iS} (H0 + lam H1) e^{-iS}.

S = sum_m lam^m S_m is built so that every order H^(m) of the transformed
Hamiltonian is block-diagonal with respect to a chosen partition. The
order-m coefficient of e^{iS} A e^{-iS} is a sum over ordered compositions
(j1, ..., jb) of m of (i^b / b!) [S_j1, [S_j2, ..., [S_jb, A]...]], which
is what :func:`f_j` evaluates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import CRGateError, SmallDenominatorError
from .operators import BlockPartition

GAP_TOL = 1e-9


@lru_cache(maxsize=None)
def compositions(k: int) -> tuple[tuple[int, ...], ...]:
    """All 2**(k-1) ordered compositions of k into positive parts.

    Sorted by descending first part, then lexicographically.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    def gen(n):
        if n == 0:
            yield ()
            return
        for first in range(1, n + 1):
            for rest in gen(n - first):
                yield (first, *rest)

    return tuple(sorted(gen(k), key=lambda c: (-c[0], c)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def nested_commutator_term(parts: Sequence[int], S: Sequence[np.ndarray], A: np.ndarray,
                           _memo: Optional[dict] = None) -> np.ndarray:
    """(i^b / b!) [S_{j1}, [S_{j2}, ..., [S_{jb}, A]...]] with S[0] holding S_1."""
    b = len(parts)
    if any(j > len(S) for j in parts):
        raise CRGateError(f"generator S_{max(parts)} requested but only {len(S)} available")
    nested = _nested(tuple(parts), S, A, _memo if _memo is not None else {})
    return (1j ** b / math.factorial(b)) * nested


def _nested(parts, S, A, memo):
    if not parts:
        return A
    if parts in memo:
        return memo[parts]
    out = commutator(S[parts[0] - 1], _nested(parts[1:], S, A, memo))
    memo[parts] = out
    return out


def f_j(S: Sequence[np.ndarray], A: np.ndarray, j: int, skip_leading: bool = False) -> np.ndarray:
    """Order-j coefficient of e^{iS} A e^{-iS}; f_0(A) = A.

    With ``skip_leading`` the single term i[S_j, A] is left out, which is
    how H_x^(j) is assembled before S_j is known.
    """
    A = np.asarray(A)
    if j == 0:
        return A.copy()
    memo: dict = {}
    out = np.zeros_like(A, dtype=complex)
    for parts in compositions(j):
        if skip_leading and len(parts) == 1:
            continue
        out += nested_commutator_term(parts, S, A, memo)
    return out


def _is_diagonal(M: np.ndarray) -> bool:
    return not np.any(M - np.diag(np.diag(M)))


def solve_generator(H0, Hx, partition: BlockPartition, gap_tol: float = GAP_TOL) -> np.ndarray:
    """Off-block-diagonal S with H0_j S_jk - S_jk H0_k = -i Hx_jk for all j != k."""
    H0 = np.asarray(H0)
    Hx = np.asarray(Hx)
    n = partition.dim
    S = np.zeros((n, n), dtype=complex)
    if _is_diagonal(H0):
        E = np.real(np.diag(H0))
        denom = E[:, None] - E[None, :]
        off = ~partition.mask
        small = off & (np.abs(denom) <= gap_tol)
        needed = small & (Hx != 0)
        if np.any(needed):
            p, q = np.argwhere(needed)[0]
            raise SmallDenominatorError(
                f"energy gap {denom[p, q]:.3e} between states {p} (E={E[p]:.9g}) and "
                f"{q} (E={E[q]:.9g}) is below gap_tol={gap_tol:g}", p=int(p), q=int(q),
                e_p=float(E[p]), e_q=float(E[q]))
        np.divide(-1j * Hx, denom, out=S, where=off & ~small)
        return S

    for a, ja in enumerate(partition.blocks):
        A = H0[np.ix_(ja, ja)]
        ea = np.linalg.eigvalsh(A)
        for b, kb in enumerate(partition.blocks):
            if a == b:
                continue
            C = H0[np.ix_(kb, kb)]
            D = -1j * Hx[np.ix_(ja, kb)]
            if not np.any(D):
                continue
            ec = np.linalg.eigvalsh(C)
            gaps = np.abs(ea[:, None] - ec[None, :])
            if gaps.min() <= gap_tol:
                p, q = np.unravel_index(np.argmin(gaps), gaps.shape)
                raise SmallDenominatorError(
                    f"blocks {a} and {b} share spectrum: E={ea[p]:.9g} vs E={ec[q]:.9g}",
                    p=a, q=b, e_p=float(ea[p]), e_q=float(ec[q]))
            na, nb = len(ja), len(kb)
            # row-major vec: (A (x) 1 - 1 (x) C^T) vec(B) = vec(AB - BC)
            K = np.kron(A, np.eye(nb)) - np.kron(np.eye(na), C.T)
            B = np.linalg.solve(K, D.reshape(-1)).reshape(na, nb)
            S[np.ix_(ja, kb)] = B
    return S


@dataclass(frozen=True)
class PerturbationProblem:
    H0: np.ndarray
    H1: np.ndarray
    lam: float
    partition: BlockPartition
    max_order: int = 3
    gap_tol: float = GAP_TOL

    def __post_init__(self):
        H0 = np.asarray(self.H0, dtype=complex)
        H1 = np.asarray(self.H1, dtype=complex)
        if H0.shape != (self.partition.dim,) * 2 or H1.shape != H0.shape:
            raise ValueError("H0, H1 and partition dimensions disagree")
        if np.any(self.partition.off_block(H0)):
            raise ValueError("H0 must be exactly block-diagonal with respect to the partition")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        object.__setattr__(self, "H0", H0)
        object.__setattr__(self, "H1", H1)


@dataclass
class PerturbationSeries:
    terms: list                      # H^(0) ... H^(max_order)
    generators: list                 # S_1 ... S_max_order
    lam: float
    partition: BlockPartition
    residuals: list = field(default_factory=list)  # off-block size of i[S_m,H0] + H_x^(m)

    def H_eff_at(self, m: Optional[int] = None, lam: Optional[float] = None) -> np.ndarray:
        m = len(self.terms) - 1 if m is None else m
        lam = self.lam if lam is None else lam
        return sum(lam ** k * self.terms[k] for k in range(m + 1))

    def generator(self, lam: Optional[float] = None) -> np.ndarray:
        lam = self.lam if lam is None else lam
        return sum(lam ** (k + 1) * s for k, s in enumerate(self.generators))


def build_series(problem: PerturbationProblem) -> PerturbationSeries:
    H0, H1, part = problem.H0, problem.H1, problem.partition
    S: list = []
    terms = [H0.copy()]
    residuals = []
    for m in range(1, problem.max_order + 1):
        Hx = f_j(S, H0, m, skip_leading=True) + f_j(S, H1, m - 1)
        S_m = solve_generator(H0, Hx, part, gap_tol=problem.gap_tol)
        S.append(S_m)
        full = 1j * commutator(S_m, H0) + Hx
        off = part.off_block(full)
        residuals.append(float(np.max(np.abs(off))) if off.size else 0.0)
        terms.append(part.block_diagonal(full))
    return PerturbationSeries(terms=terms, generators=S, lam=problem.lam, partition=part,
                              residuals=residuals)
