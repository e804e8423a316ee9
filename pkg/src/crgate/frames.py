"""Dressing, rotating frames and the rotating-wave approximation for two transmons."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockdiag import least_action_blockdiag
from .errors import DegenerateAssignmentError, DomainError, PoleError
from .operators import BlockPartition, HermitianOp, hermitize, number, embed, quadratures


@dataclass(frozen=True)
class DriveSpec:
    """Constant-amplitude drives on both quadratures of both transmons.

    The lab-frame drive on transmon j is
    (OmegaX_j cos(omega_d t) + OmegaY_j sin(omega_d t)) (b_j + b_j^dagger).
    ``omega_d`` of ``None`` means: use the dressed target frequency.
    """

    OmegaX1: float = 0.0
    OmegaY1: float = 0.0
    OmegaX2: float = 0.0
    OmegaY2: float = 0.0
    omega_d: float | None = None
    crosstalk_A: float = 0.0
    phi_c: float = 0.0
    phi_t: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.crosstalk_A <= 1.0:
            raise ValueError(f"crosstalk_A must lie in [0, 1], got {self.crosstalk_A}")

    @classmethod
    def cr(cls, Omega: float, A: float = 0.0, phi_c: float = 0.0, phi_t: float = 0.0,
           omega_d: float | None = None) -> "DriveSpec":
        """Control drive Omega cos(w t + phi_c) plus cross-talk A Omega cos(w t + phi_t) on the target."""
        return cls(OmegaX1=Omega * math.cos(phi_c), OmegaY1=-Omega * math.sin(phi_c),
                   OmegaX2=A * Omega * math.cos(phi_t), OmegaY2=-A * Omega * math.sin(phi_t),
                   omega_d=omega_d, crosstalk_A=A, phi_c=phi_c, phi_t=phi_t)

    @property
    def amplitude(self) -> float:
        return math.hypot(self.OmegaX1, self.OmegaY1)


@dataclass(frozen=True)
class DressedSystem:
    U: np.ndarray
    H_tilde: np.ndarray   # diagonal, kron-ordered
    B1_tilde: np.ndarray
    B2_tilde: np.ndarray
    d: int

    def energy(self, i1: int, i2: int) -> float:
        return float(np.real(self.H_tilde[i1 * self.d + i2, i1 * self.d + i2]))


def dress(Hsys0, b1x=None, b2x=None, d: int | None = None) -> DressedSystem:
    """Diagonalize the static two-transmon Hamiltonian, labeling by maximal bare overlap."""
    H = np.asarray(Hsys0, dtype=complex)
    n = H.shape[0]
    if d is None:
        d = int(round(math.sqrt(n)))
    if b1x is None or b2x is None:
        b1x, b2x = quadratures(d)
    try:
        res = least_action_blockdiag(H, BlockPartition.singletons(n))
    except DegenerateAssignmentError as exc:
        raise DegenerateAssignmentError(f"dressed-state labeling failed: {exc}",
                                        overlaps=exc.overlaps) from exc
    U = res.T
    Ud = U.conj().T
    H_tilde = np.diag(np.real(np.diag(res.H_eff))).astype(complex)
    return DressedSystem(U=U, H_tilde=H_tilde,
                         B1_tilde=hermitize(Ud @ b1x @ U, check=False),
                         B2_tilde=hermitize(Ud @ b2x @ U, check=False), d=d)


def xi_static(J: float, delta1: float, delta2: float, Delta: float) -> float:
    """Static ZZ shift E11 - E10 - E01 + E00 to second order in J."""
    a, b = Delta + delta1, delta2 - Delta
    if a == 0 or b == 0:
        raise PoleError("static ZZ expression is singular", pole="Delta = -delta1" if a == 0
                        else "Delta = delta2")
    return -2 * J ** 2 * (delta1 + delta2) / (a * b)


def J_from_xi(xi: float, delta1: float, delta2: float, Delta: float) -> float:
    """Positive exchange coupling reproducing a measured static ZZ shift."""
    a, b = Delta + delta1, delta2 - Delta
    if a == 0 or b == 0 or delta1 + delta2 == 0:
        raise PoleError("cannot invert static ZZ at a pole")
    J2 = -xi * a * b / (2 * (delta1 + delta2))
    if J2 < 0:
        raise DomainError(f"xi={xi!r} has the wrong sign for these anharmonicities (J^2={J2:.3e})")
    return math.sqrt(J2)


def excitation_difference(d: int) -> np.ndarray:
    n = np.array([i1 + i2 for i1 in range(d) for i2 in range(d)])
    return n[:, None] - n[None, :]


def rwa_drive(dressed: DressedSystem, drive: DriveSpec, d: int | None = None) -> np.ndarray:
    """Drive term in the frame rotating at omega_d on both transmons, fast terms dropped.

    Entries raising the excitation number by one carry (OmegaX - i OmegaY)/2,
    entries lowering it carry (OmegaX + i OmegaY)/2, all others vanish.
    """
    d = dressed.d if d is None else d
    diff = excitation_difference(d)
    up = 0.5 * ((drive.OmegaX1 - 1j * drive.OmegaY1) * dressed.B1_tilde
                + (drive.OmegaX2 - 1j * drive.OmegaY2) * dressed.B2_tilde)
    down = 0.5 * ((drive.OmegaX1 + 1j * drive.OmegaY1) * dressed.B1_tilde
                  + (drive.OmegaX2 + 1j * drive.OmegaY2) * dressed.B2_tilde)
    return np.where(diff == 1, up, 0) + np.where(diff == -1, down, 0)


def rotating_frame_drift(H_tilde, omega_d: float, d: int) -> np.ndarray:
    """H_tilde - omega_d (n1 + n2)."""
    N = embed(number(d), None, d) + embed(None, number(d), d)
    return np.asarray(H_tilde) - omega_d * N


def drive_frequency(H_tilde, d: int) -> tuple[float, float]:
    """(omega_d, omega_d1): mean dressed target and control frequencies.

    Each is averaged over the two states of the other qubit.
    """
    E = np.real(np.diag(np.asarray(H_tilde)))

    def e(i1, i2):
        return E[i1 * d + i2]

    omega_d = (e(1, 1) - e(1, 0) + e(0, 1) - e(0, 0)) / 2
    omega_d1 = (e(1, 1) - e(0, 1) + e(1, 0) - e(0, 0)) / 2
    return float(omega_d), float(omega_d1)


def rwa_hamiltonian(dressed: DressedSystem, drive: DriveSpec) -> tuple[HermitianOp, float, float]:
    """Full H_RWA in kron order together with (omega_d, omega_d1)."""
    omega_d, omega_d1 = drive_frequency(dressed.H_tilde, dressed.d)
    if drive.omega_d is not None:
        omega_d = drive.omega_d
    H = rotating_frame_drift(dressed.H_tilde, omega_d, dressed.d) + rwa_drive(dressed, drive)
    return HermitianOp(H, ordering="kron"), omega_d, omega_d1
