from math import factorial

import numpy as np
import pytest

from passive_purify.errors import DomainError, TruncationError
from passive_purify.fock import SectorVector, enumerate_sector
from passive_purify.interferometer import haar_unitary
from passive_purify.states import passive_state_fock, thermal_fock, tmsv_fock
from passive_purify.symplectic import (
    cov_from_fock,
    is_passive_cov,
    mean_photon_cov,
    passive_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_cov,
    tmsv_cov,
)


def single_mode_state(amps):
    return [SectorVector(enumerate_sector(1, k), [a]) for k, a in enumerate(amps)]


def test_vacuum_and_thermal():
    vac = cov_from_fock(thermal_fock([0.0], 0).blocks)
    np.testing.assert_allclose(vac.cov, np.eye(2), atol=1e-14)
    t = thermal_cov([0.3, 1.5])
    np.testing.assert_allclose(np.diag(t.cov), [1.6, 1.6, 4.0, 4.0])
    assert mean_photon_cov(t) == pytest.approx(1.8)
    np.testing.assert_allclose(symplectic_eigenvalues(t.cov), [1.6, 4.0])
    with pytest.raises(DomainError):
        thermal_cov([-0.1])


def test_thermal_from_fock_converges():
    nus = [0.2, 0.5]
    est = cov_from_fock(thermal_fock(nus, 30).blocks)
    np.testing.assert_allclose(est.cov, thermal_cov(nus).cov, atol=1e-6)
    assert est.trace_deficit < 1e-4


def test_coherent_state_mean():
    alpha = 0.6 - 0.3j
    amps = [np.exp(-abs(alpha) ** 2 / 2) * alpha ** k / np.sqrt(float(factorial(k))) for k in range(25)]
    st = cov_from_fock(single_mode_state(amps))
    np.testing.assert_allclose(st.mean, np.sqrt(2) * np.array([alpha.real, alpha.imag]), atol=1e-10)
    np.testing.assert_allclose(st.cov, np.eye(2), atol=1e-10)


def test_squeezed_vacuum():
    r = 0.4
    amps = []
    for k in range(40):
        if k % 2:
            amps.append(0.0)
        else:
            j = k // 2
            amps.append((-np.tanh(r)) ** j * np.sqrt(float(factorial(2 * j))) / (2.0 ** j * factorial(j)) / np.sqrt(np.cosh(r)))
    st = cov_from_fock(single_mode_state(amps))
    np.testing.assert_allclose(st.cov, np.diag([np.exp(-2 * r), np.exp(2 * r)]), atol=1e-8)
    assert st.uncertainty_min_eig() > -1e-10


def test_passive_state_covariance_convention():
    u = haar_unitary(2, 3)
    nus = [0.3, 0.1]
    st = cov_from_fock(passive_state_fock(u, nus, 20).blocks)
    s = passive_symplectic(u)
    np.testing.assert_allclose(s @ s.T, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(s @ symplectic_form(2) @ s.T, symplectic_form(2), atol=1e-14)
    np.testing.assert_allclose(st.cov, s @ thermal_cov(nus).cov @ s.T, atol=1e-8)
    assert is_passive_cov(st, tol=1e-6)
    assert st.uncertainty_min_eig() > -1e-10


def test_tmsv_covariance():
    nu = 0.7
    t = tmsv_cov(nu)
    assert mean_photon_cov(t) == pytest.approx(2 * nu)
    np.testing.assert_allclose(symplectic_eigenvalues(t.cov), [1, 1], atol=1e-12)
    assert not is_passive_cov(t)
    est = cov_from_fock(tmsv_fock(nu, 60).vectors())
    np.testing.assert_allclose(est.cov, t.cov, atol=1e-6)


def test_truncation_guard():
    with pytest.raises(TruncationError):
        cov_from_fock(thermal_fock([2.0], 2).blocks, max_deficit=0.1)
