"""Cross-resonance effective Hamiltonian and its two-qubit Pauli rates.

Pipeline: dress the static Hamiltonian, go to the frame rotating at the
drive frequency with the RWA, reorder so that {00,01},{10,11},{rest} are
contiguous, block-diagonalize (exactly or perturbatively), restore the
control-qubit frame and read off tr(H P/2) on the qubit subspace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .blockdiag import least_action_blockdiag
from .errors import PoleError
from .frames import DriveSpec, dress, rwa_hamiltonian
from .operators import (
    PAULI_LABELS,
    BlockPartition,
    DeviceParams,
    computational_first_order,
    embed,
    number,
    pauli_decompose,
    permutation_matrix,
    quadratures,
    two_transmon_hamiltonian,
)
from .perturbation import GAP_TOL, PerturbationProblem, build_series

METHODS = ("exact", "perturbative", "analytic_qubit", "analytic_third_order")


@dataclass(frozen=True)
class PauliTable:
    """Coefficients (GHz) of P/2 for all sixteen two-qubit Paulis."""

    coefficients: dict
    method: str
    Omega: float
    Delta: float
    order: Optional[int] = None
    I_metric: Optional[float] = None
    extras: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, label: str) -> float:
        return self.coefficients[label]

    def mhz(self) -> dict:
        return {k: 1e3 * v for k, v in self.coefficients.items()}

    @property
    def tag(self) -> str:
        return f"perturbative({self.order})" if self.method == "perturbative" else self.method


def _table(coeffs: dict, **kw) -> PauliTable:
    full = {label: 0.0 for label in PAULI_LABELS}
    full.update(coeffs)
    return PauliTable(coefficients=full, **kw)


def cr_poles(delta1: float) -> dict:
    return {"Delta = 0": 0.0, "Delta = -delta1/2": -delta1 / 2,
            "Delta = -delta1": -delta1, "Delta = -3 delta1/2": -1.5 * delta1}


def check_poles(Delta: float, delta1: float, gap_tol: float) -> None:
    for name, pole in cr_poles(delta1).items():
        if abs(Delta - pole) <= gap_tol:
            raise PoleError(f"detuning {Delta:.9g} GHz within {gap_tol:g} of pole {name}", pole=name)


def cr_partition(d: int) -> BlockPartition:
    sizes = [2, 2] + ([d * d - 4] if d > 2 else [])
    return BlockPartition.contiguous(sizes)


@dataclass(frozen=True)
class CRModel:
    """Intermediate objects of the pipeline, reordered with the qubit states first."""

    H_rwa: np.ndarray
    omega_d: float
    omega_d1: float
    partition: BlockPartition
    order: list
    n1: np.ndarray


def build_cr_model(params: DeviceParams, drive: DriveSpec) -> CRModel:
    d = params.d
    dressed = dress(two_transmon_hamiltonian(params), *quadratures(d), d=d)
    H, omega_d, omega_d1 = rwa_hamiltonian(dressed, drive)
    order = computational_first_order(d)
    F = permutation_matrix(order)
    n1 = F @ embed(number(d), None, d) @ F.T
    return CRModel(H_rwa=F @ H.entries @ F.T, omega_d=omega_d, omega_d1=omega_d1,
                   partition=cr_partition(d), order=order, n1=n1)


def _drive_scale(drive: DriveSpec) -> float:
    return max(math.hypot(drive.OmegaX1, drive.OmegaY1), math.hypot(drive.OmegaX2, drive.OmegaY2))


def effective_cr(params: DeviceParams, drive: DriveSpec, method: str = "exact",
                 order: int = 3, gap_tol: float = GAP_TOL,
                 partition: Optional[BlockPartition] = None) -> PauliTable:
    """Pauli rates of the CR effective Hamiltonian at one operating point.

    ``partition`` indexes the reordered basis (00, 01, 10, 11 first, then
    ladder order). The default lumps every non-qubit state into one block;
    a finer split of that block is allowed but changes the result.
    """
    if method in ("pert", "perturbative"):
        method = "perturbative"
    elif method != "exact":
        raise ValueError(f"unknown method {method!r}")
    Delta = params.detuning
    if Delta == 0:
        raise PoleError("qubits on resonance (Delta = 0)", pole="Delta = 0")
    model = build_cr_model(params, drive)
    if partition is not None:
        if partition.dim != params.d ** 2 or {(0, 1), (2, 3)} - set(partition.blocks):
            raise ValueError("partition must contain blocks (0, 1) and (2, 3) of the reordered basis")
        model = replace(model, partition=partition)
    H = model.H_rwa
    exact = least_action_blockdiag(H, model.partition)
    if method == "exact":
        H_eff = exact.H_eff
    else:
        check_poles(Delta, params.delta1, gap_tol)
        lam = _drive_scale(drive)
        H0 = np.diag(np.diag(H))
        H1 = (H - H0) / lam if lam else np.zeros_like(H)
        series = build_series(PerturbationProblem(H0, H1, lam, model.partition,
                                                  max_order=order, gap_tol=gap_tol))
        H_eff = series.H_eff_at(order)
    H_cr = H_eff + (model.omega_d - model.omega_d1) * model.n1
    coeffs = pauli_decompose(H_cr[:4, :4])
    if not all(math.isfinite(v) for v in coeffs.values()):
        raise FloatingPointError("non-finite Pauli coefficient")
    return _table(coeffs, method=method, Omega=drive.amplitude, Delta=Delta,
                  order=order if method == "perturbative" else None,
                  I_metric=exact.I_metric,
                  extras={"omega_d": model.omega_d, "omega_d1": model.omega_d1,
                          "residual": exact.residual})


def crosstalk_fit_eval(params: DeviceParams, Omega: float, A: float = 0.071,
                       phi_c: float = math.pi, phi_t: float = -0.62,
                       method: str = "exact", order: int = 3) -> PauliTable:
    return effective_cr(params, DriveSpec.cr(Omega, A=A, phi_c=phi_c, phi_t=phi_t),
                        method=method, order=order)


def qubit_rwa_hamiltonian(J: float, Delta: float, Omega: float) -> np.ndarray:
    """Two-qubit CR Hamiltonian in the frame of the target, order 00, 01, 10, 11."""
    return np.array([[0, 0, Omega / 2, 0],
                     [0, 0, J, Omega / 2],
                     [Omega / 2, J, Delta, 0],
                     [0, Omega / 2, 0, Delta]], dtype=complex)


def qubit_exact(J: float, Delta: float, Omega: float) -> PauliTable:
    """Least-action solution of the two-level model, back in the control frame."""
    part = BlockPartition.contiguous([2, 2])
    res = least_action_blockdiag(qubit_rwa_hamiltonian(J, Delta, Omega), part)
    H_cr = res.H_eff - Delta * np.diag([0, 0, 1, 1])
    return _table(pauli_decompose(H_cr), method="exact", Omega=Omega, Delta=Delta,
                  I_metric=res.I_metric)


def qubit_analytic(J: float, Delta: float, Omega: float) -> PauliTable:
    """Closed-form two-level rates. The ZI branch is the one continuous from Omega = 0 for Delta > 0."""
    r = math.hypot(Delta, Omega)
    return _table({"ZI": Delta - r, "ZX": -J * Omega / r if r else 0.0},
                  method="analytic_qubit", Omega=Omega, Delta=Delta)


def third_order_coefficients(J: float, Delta: float, delta1: float, delta2: float,
                             Omega: float) -> PauliTable:
    """Closed-form third-order perturbative Pauli rates of the driven transmon pair."""
    D, d1, d2, W = Delta, delta1, delta2, Omega
    denominators = {
        "Delta = 0": D,
        "Delta = -delta1": d1 + D,
        "Delta = -delta1/2": d1 + 2 * D,
        "Delta = -3 delta1/2": 3 * d1 + 2 * D,
        "Delta = -2 delta1": 2 * d1 + D,
        "Delta = delta2": D - d2,
        "Delta = delta2 - delta1": d1 + D - d2,
        "delta1 = 0": d1,
        "delta2 = 0": d2,
        "3 delta1^2 + 8 delta1 Delta + 4 Delta^2 = 0": 3 * d1 ** 2 + 8 * d1 * D + 4 * D ** 2,
    }
    for name, value in denominators.items():
        if value == 0:
            raise PoleError(f"third-order expressions are singular at {name}", pole=name)

    IX = (-J * W / (D + d1)
          + D * d1 * J * W ** 3 / ((D + d1) ** 3 * (2 * D + d1) * (2 * D + 3 * d1)))

    IZ = (J ** 2 * W ** 2 / 2) * (
        (d1 ** 3 - 2 * d1 * D ** 2 - 2 * D ** 3) / (d1 * D ** 2 * (d1 + D) ** 2 * (D - d2))
        + (d1 ** 2 + D ** 2) / (D ** 2 * d2 * (d1 + D) ** 2)
        + (6 * d1 ** 5 + 4 * d1 ** 4 * D - 6 * d1 ** 3 * D ** 2 + 7 * d1 ** 2 * D ** 3
           + 12 * d1 * D ** 4 + 4 * D ** 5)
        / (D ** 2 * (d1 + D) ** 2 * (2 * d1 + D) ** 2 * (d1 + 2 * D) * (3 * d1 + 2 * D))
        + 2 / (d1 * (d1 + D) * (d1 + D - d2))
        + 2 / ((d1 + D) * (d1 + D - d2) ** 2)
        + 1 / (D * (D - d2) ** 2)
    )

    ZI = (-d1 * W ** 2 / (2 * D * (d1 + D))
          + J ** 2 * W ** 2 / (2 * (d1 + D) ** 3) * (
              2 * (d1 ** 2 + d1 * D + D ** 2) * (d1 + D) / (d1 * D * (d2 - D))
              + 0.5 * d1 * (4 * d1 ** 2 / D ** 3 + 11 * d1 / D ** 2 + 3 * d1 / (2 * d1 + D) ** 2
                            - 2 / (d1 + 2 * D) - 6 / (3 * d1 + 2 * D) + 12 / D)
              + 2 * (d1 + D) ** 2 / (d1 * (d1 + D - d2))
              + 2 * (d1 + D) ** 2 / (d1 + D - d2) ** 2
              - 2 * d1 * (d1 + D) / (D * d2)))

    ZX = (-(J * W / D) * (d1 / (d1 + D))
          + J * W ** 3 * d1 ** 2 * (3 * d1 ** 3 + 11 * d1 ** 2 * D + 15 * d1 * D ** 2 + 9 * D ** 3)
          / (2 * D ** 3 * (d1 + D) ** 3 * (d1 + 2 * D) * (3 * d1 + 2 * D)))

    ZZ = J ** 2 / (2 * (d1 + D) ** 2) * (
        W ** 2 * (
            (d1 ** 3 - 2 * d1 * D ** 2 - 2 * D ** 3) / (d1 * D ** 2 * (d2 - D))
            + 0.5 * (4 * (3 * d1 + D) * (d1 ** 2 + d1 * D + D ** 2) / (D ** 2 * (2 * d1 + D) ** 2)
                     - 16 * D / (3 * d1 ** 2 + 8 * d1 * D + 4 * D ** 2))
            + 2 * d1 / (D * d2)
            - 2 * (d1 + D) / (d1 + D - d2) ** 2
            - 2 * (d1 + D) / (d1 * (d1 + D - d2)))
        + 2 * (d1 + D) * (d1 + d2) / (D - d2))

    return _table({"IX": IX, "IY": 0.0, "IZ": IZ, "ZI": ZI, "ZX": ZX, "ZY": 0.0, "ZZ": ZZ},
                  method="analytic_third_order", Omega=Omega, Delta=Delta, order=3)
