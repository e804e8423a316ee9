"""Quick analytic-oracle checks behind ``crgate validate``."""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .blockdiag import least_action_blockdiag
from .frames import DriveSpec, J_from_xi, xi_static
from .operators import BlockPartition, DeviceParams, pauli_decompose, pauli_reconstruct
from .perturbation import compositions
from .pipeline import effective_cr, qubit_analytic, qubit_exact, third_order_coefficients


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _jcal() -> Check:
    J = J_from_xi(2.77e-4, -0.33, -0.33, 0.2)
    return Check("xi -> J calibration", abs(J - 3.80e-3) <= 2e-5, f"J = {1e3 * J:.4f} MHz")


def _qubit_model() -> Check:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        Delta = rng.uniform(0.05, 0.5)
        J = rng.uniform(0, 0.05) * Delta
        Omega = rng.uniform(0, 0.1)
        ex, an = qubit_exact(J, Delta, Omega), qubit_analytic(J, Delta, Omega)
        band = 5 * J ** 2 / Delta
        worst = max(worst, abs(ex["ZX"] - an["ZX"]) / band, abs(ex["ZI"] - an["ZI"]) / band)
    return Check("two-level model vs closed form", worst <= 1.0,
                 f"worst deviation {worst:.3f} of the 5 J^2/Delta band")


def _compositions() -> Check:
    n = len(compositions(5))
    return Check("compositions of 5", n == 16, f"{n} compositions")


def _least_action() -> Check:
    rng = np.random.default_rng(11)
    M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = np.diag([0, 0.1, 1, 1.2, 2, 2.1]) + 0.05 * (M + M.conj().T)
    res = least_action_blockdiag(H, BlockPartition.contiguous([2, 2, 2]))
    spec = np.max(np.abs(np.linalg.eigvalsh(res.H_eff) - np.linalg.eigvalsh(H)))
    unit = np.max(np.abs(res.T.conj().T @ res.T - np.eye(6)))
    return Check("least action: spectrum and unitarity", bool(spec < 1e-10 and unit < 1e-10),
                 f"spectrum error {spec:.1e}, unitarity error {unit:.1e}")


def _pauli_round_trip() -> Check:
    rng = np.random.default_rng(3)
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = M + M.conj().T
    err = np.max(np.abs(pauli_reconstruct(pauli_decompose(H)) - H))
    return Check("Pauli round trip", bool(err < 1e-12), f"error {err:.1e}")


def _static_zz() -> Check:
    p = DeviceParams.reference()
    zz = effective_cr(p, DriveSpec.cr(0.0))["ZZ"]
    xi = xi_static(p.J, p.delta1, p.delta2, p.detuning)
    rel = abs(2 * zz - xi) / abs(xi)
    return Check("static ZZ vs second-order shift", rel < 0.01,
                 f"2 ZZ = {2e3 * zz:.6f} MHz, xi = {1e3 * xi:.6f} MHz")


def _leading_order() -> Check:
    p = DeviceParams.reference()
    Omega = 0.005
    num = effective_cr(p, DriveSpec.cr(Omega), method="pert", order=3)
    ana = third_order_coefficients(p.J, p.detuning, p.delta1, p.delta2, Omega)
    rel = max(abs(num[k] - ana[k]) / abs(ana[k]) for k in ("IX", "ZX"))
    return Check("weak-drive IX, ZX vs closed forms", rel < 0.02, f"max relative gap {rel:.3%}")


def _selection_rule() -> Check:
    p = DeviceParams.reference()
    t = effective_cr(p, DriveSpec.cr(0.05))
    worst = max(abs(t["IY"]), abs(t["ZY"]))
    return Check("IY = ZY = 0 without cross-talk", worst <= 1e-9, f"max |IY|,|ZY| = {worst:.1e} GHz")


CHECKS: tuple[Callable[[], Check], ...] = (
    _jcal, _qubit_model, _compositions, _least_action, _pauli_round_trip,
    _static_zz, _leading_order, _selection_rule,
)


def run_checks() -> list[Check]:
    out = []
    for fn in CHECKS:
        try:
            out.append(fn())
        except Exception as exc:  # a crashing oracle is a failed oracle
            out.append(Check(fn.__name__.strip("_"), False, f"{type(exc).__name__}: {exc}"))
    return out
