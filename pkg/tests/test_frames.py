import math

import numpy as np
import pytest

from crgate.errors import DomainError, PoleError
from crgate.frames import (
    DriveSpec,
    J_from_xi,
    dress,
    drive_frequency,
    excitation_difference,
    rotating_frame_drift,
    rwa_drive,
    rwa_hamiltonian,
    xi_static,
)
from crgate.operators import (
    embed,
    pauli,
    quadratures,
    two_transmon_hamiltonian,
)


def dressed(p):
    return dress(two_transmon_hamiltonian(p), *quadratures(p.d), d=p.d)


def test_drive_spec():
    with pytest.raises(ValueError):
        DriveSpec(crosstalk_A=1.5)
    dr = DriveSpec.cr(0.04, A=0.071, phi_c=math.pi, phi_t=-0.62)
    assert dr.OmegaX1 == pytest.approx(-0.04) and dr.OmegaY1 == pytest.approx(0.0, abs=1e-17)
    assert dr.OmegaX2 == pytest.approx(0.071 * 0.04 * math.cos(-0.62))
    assert dr.OmegaY2 == pytest.approx(-0.071 * 0.04 * math.sin(-0.62))
    assert dr.amplitude == pytest.approx(0.04)


def test_uncoupled_dressing_is_trivial(dev):
    p = dev.with_(J=0.0, d=3)
    ds = dressed(p)
    b1x, b2x = quadratures(3)
    assert np.allclose(ds.U, np.eye(9), atol=1e-12)
    assert np.allclose(ds.B1_tilde, b1x) and np.allclose(ds.B2_tilde, b2x)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_dressing_unitary_and_diagonal(dev, d):
    p = dev.with_(d=d)
    ds = dressed(p)
    H = two_transmon_hamiltonian(p).entries
    assert np.max(np.abs(ds.U.conj().T @ ds.U - np.eye(d * d))) <= 1e-12
    off = ds.H_tilde - np.diag(np.diag(ds.H_tilde))
    assert np.max(np.abs(off)) <= 1e-12
    assert np.allclose(np.sort(np.real(np.diag(ds.H_tilde))), np.linalg.eigvalsh(H), atol=1e-12)
    # each dressed state keeps the label of its dominant bare state
    assert np.all(np.argmax(np.abs(ds.U) ** 2, axis=0) == np.arange(d * d))


def test_dressed_zz_matches_static_shift(dev):
    # at d=2 there is no second excited level and the shift vanishes; d>=3 carries it
    ds2 = dressed(dev.with_(d=2))
    zz2 = ds2.energy(1, 1) - ds2.energy(1, 0) - ds2.energy(0, 1) + ds2.energy(0, 0)
    assert abs(zz2) < 1e-12

    def mismatch(J, d):
        ds = dressed(dev.with_(J=J, d=d))
        zz = ds.energy(1, 1) - ds.energy(1, 0) - ds.energy(0, 1) + ds.energy(0, 0)
        return abs(zz - xi_static(J, dev.delta1, dev.delta2, dev.detuning))

    for d in (3, 5):
        assert mismatch(dev.J, d) < 0.01 * xi_static(dev.J, dev.delta1, dev.delta2,
                                                       dev.detuning)
        # leftover is fourth order in J
        assert 16 / 1.3 <= mismatch(dev.J, d) / mismatch(dev.J / 2, d) <= 16 * 1.3


def test_xi_static_and_inverse():
    J = J_from_xi(2.77e-4, -0.330, -0.330, 0.200)
    assert J == pytest.approx(3.80e-3, abs=2e-5)
    assert xi_static(J, -0.330, -0.330, 0.200) == pytest.approx(2.77e-4)
    assert xi_static(0.0, -0.33, -0.33, 0.2) == 0.0
    assert xi_static(3.8e-3, -0.33, -0.33, 0.2) > 0
    with pytest.raises(PoleError):
        xi_static(3.8e-3, -0.33, -0.33, 0.33)
    with pytest.raises(PoleError):
        J_from_xi(2.77e-4, -0.33, -0.33, 0.33)
    with pytest.raises(DomainError):
        J_from_xi(-2.77e-4, -0.33, -0.33, 0.2)


def test_excitation_difference():
    diff = excitation_difference(3)
    assert diff[1, 0] == 1 and diff[0, 1] == -1
    assert diff[2 * 3 + 0, 0] == 2  # <20| vs |00>


def test_bare_two_level_rwa(dev):
    p = dev.with_(J=0.0, d=2)
    W = 0.03
    H = rwa_drive(dressed(p), DriveSpec(OmegaX1=W))
    assert np.allclose(H, W / 2 * pauli("XI"))


def test_selection_rule_is_exact(dev):
    ds = dressed(dev.with_(d=4))
    dr = DriveSpec(OmegaX1=0.03, OmegaY1=0.01, OmegaX2=0.002, OmegaY2=-0.004)
    H = rwa_drive(ds, dr)
    diff = excitation_difference(4)
    assert not np.any(H[np.abs(diff) != 1])
    assert H[2 * 4 + 0, 0] == 0
    assert np.array_equal(H, H.conj().T)


def test_phase_shifted_drive(dev):
    ds = dressed(dev.with_(d=3))
    W, phi = 0.05, 0.7
    H = rwa_drive(ds, DriveSpec.cr(W, phi_c=phi))
    ref = rwa_drive(ds, DriveSpec(OmegaX1=W))
    raising = excitation_difference(3) == 1
    assert np.allclose(H[raising], np.exp(1j * phi) * ref[raising])


def test_crosstalk_phase_irrelevant_without_crosstalk(dev):
    ds = dressed(dev.with_(d=3))
    a = rwa_drive(ds, DriveSpec.cr(0.05, A=0.0, phi_t=0.3))
    b = rwa_drive(ds, DriveSpec.cr(0.05, A=0.0, phi_t=-2.0))
    assert np.array_equal(a, b)


def test_rotating_frame_drift(dev):
    ds = dressed(dev.with_(d=3))
    assert np.array_equal(rotating_frame_drift(ds.H_tilde, 0.0, 3), ds.H_tilde)
    p = dev.with_(omega1=5.0, omega2=5.0, J=0.0, d=2)
    drift = rotating_frame_drift(dressed(p).H_tilde, 5.0, 2)
    assert np.allclose(drift, 0)


def test_drift_near_reference_point(dev):
    ds = dressed(dev)
    omega_d, _ = drive_frequency(ds.H_tilde, dev.d)
    drift = np.real(np.diag(rotating_frame_drift(ds.H_tilde, omega_d, dev.d)))
    d = dev.d
    scale = 5 * dev.J ** 2 / dev.detuning
    assert abs(drift[0]) <= scale and abs(drift[1]) <= scale
    assert abs(drift[d] - dev.detuning) <= scale and abs(drift[d + 1] - dev.detuning) <= scale


def test_drive_frequency(dev):
    p = dev.with_(J=0.0, d=2)
    omega_d, omega_d1 = drive_frequency(dressed(p).H_tilde, 2)
    assert omega_d == pytest.approx(p.omega2, abs=1e-14)
    ds = dressed(dev)
    omega_d, omega_d1 = drive_frequency(ds.H_tilde, dev.d)
    assert abs(omega_d - 4.914) < 1e-3
    assert abs(omega_d1 - omega_d - dev.detuning) <= 5 * dev.J ** 2 / dev.detuning


def test_rwa_hamiltonian_hermitian(dev):
    ds = dressed(dev.with_(d=3))
    H, omega_d, omega_d1 = rwa_hamiltonian(ds, DriveSpec.cr(0.04, A=0.071, phi_c=math.pi,
                                                            phi_t=-0.62))
    assert np.array_equal(H.entries, H.entries.conj().T)
    H_fixed, w, _ = rwa_hamiltonian(ds, DriveSpec.cr(0.04, omega_d=4.9))
    assert w == 4.9
    assert np.isclose(H_fixed.entries[1, 1], ds.energy(0, 1) - 4.9)


def test_number_operator_embedding():
    n1 = embed(np.diag([0, 1.0]), None, 2)
    assert np.array_equal(np.diag(n1), [0, 0, 1, 1])
