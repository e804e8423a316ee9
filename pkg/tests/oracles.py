"""Independent reference computations used by several test modules."""
import math

import numpy as np


def _ad(S_poly, A_poly, degree):
    """[S, A] for matrix polynomials in lam stored as (degree+1, n, n) arrays."""
    out = np.zeros_like(A_poly)
    for i in range(1, degree + 1):        # S has no constant term
        for j in range(degree + 1 - i):
            out[i + j] += S_poly[i] @ A_poly[j] - A_poly[j] @ S_poly[i]
    return out


def conjugation_series(S_list, A, degree=5, terms=12):
    """Coefficients of lam^0..lam^degree of e^{iS} A e^{-iS}, S = sum_k lam^k S_k.

    Built from the plain series sum_n i^n/n! ad_S^n(A), truncated after
    ``terms`` nested commutators, with no reference to compositions.
    """
    n = A.shape[0]
    S_poly = np.zeros((degree + 1, n, n), dtype=complex)
    for k, S in enumerate(S_list[:degree], start=1):
        S_poly[k] = S
    term = np.zeros((degree + 1, n, n), dtype=complex)
    term[0] = A
    total = term.copy()
    for b in range(1, terms + 1):
        term = _ad(S_poly, term, degree)
        total += (1j ** b / math.factorial(b)) * term
    return total


def printed_f5(S, H0):
    """Fifth-order display exactly as printed, prefactor grouping included."""
    S1, S2, S3, S4, S5 = S

    def c(a, b):
        return a @ b - b @ a

    return (1j * c(S5, H0)
            - 0.5 * (c(S4, c(S1, H0)) + c(S1, c(S4, H0)))
            - 1j / 6 * (c(S3, c(S1, c(S1, H0))) + c(S1, c(S3, c(S1, H0)))
                        + c(S1, c(S1, c(S3, H0))) + c(S3, c(S2, H0)) + c(S2, c(S3, H0)))
            + 1 / 24 * (c(S2, c(S1, c(S1, c(S1, H0)))) + c(S1, c(S2, c(S1, c(S1, H0))))
                        + c(S1, c(S1, c(S2, c(S1, H0)))) + c(S1, c(S1, c(S1, c(S2, H0))))
                        + c(S2, c(S2, c(S1, H0))) + c(S2, c(S1, c(S2, H0)))
                        + c(S1, c(S2, c(S2, H0))))
            + 1j / 120 * c(S1, c(S1, c(S1, c(S1, c(S1, H0))))))


# Terms of the printed fifth-order display, as compositions.
PRINTED_F5_TERMS = [
    (5,), (4, 1), (1, 4),
    (3, 1, 1), (1, 3, 1), (1, 1, 3), (3, 2), (2, 3),
    (2, 1, 1, 1), (1, 2, 1, 1), (1, 1, 2, 1), (1, 1, 1, 2), (2, 2, 1), (2, 1, 2), (1, 2, 2),
    (1, 1, 1, 1, 1),
]


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def three_block_problem(rng, sizes=(3, 3, 2), block_scale=0.5):
    """Generic block-diagonal H0 (dense blocks, separated spectra) and a full Hermitian H1."""
    from crgate.operators import BlockPartition

    part = BlockPartition.contiguous(list(sizes))
    n = part.dim
    H0 = np.zeros((n, n), dtype=complex)
    for a, block in enumerate(part.blocks):
        idx = list(block)
        H0[np.ix_(idx, idx)] = 5.0 * a * np.eye(len(idx)) + block_scale * random_hermitian(rng, len(idx))
    return H0, random_hermitian(rng, n), part
