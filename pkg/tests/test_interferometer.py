import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from passive_purify import _kernels_py
from passive_purify.errors import DomainError, ResourceError
from passive_purify.fock import enumerate_sector, enumerate_truncated
from passive_purify.interferometer import (
    haar_unitary,
    lift_copy_mixer,
    lift_iid,
    lift_on_basis,
    permanent,
    sample_seed,
    sym_power,
    unitarity_residual,
)


def brute_permanent(a):
    n = a.shape[0]
    return sum(np.prod([a[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))


def lowering(basis_hi, basis_lo, j):
    """Matrix of a_j from the sector basis_hi to basis_lo."""
    out = np.zeros((basis_lo.dim, basis_hi.dim))
    for c, s in enumerate(basis_hi.states):
        if s[j] > 0:
            t = list(s)
            t[j] -= 1
            out[basis_lo.index_of[tuple(t)], c] = np.sqrt(s[j])
    return out


@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_permanent_matches_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert abs(permanent(a) - brute_permanent(a)) < 1e-10 * max(1, abs(brute_permanent(a)))


def test_permanent_known_values():
    for n in range(1, 7):
        assert permanent(np.ones((n, n))) == pytest.approx(factorial(n))
    assert permanent(np.array([[1, 2], [3, 4]])) == pytest.approx(10)
    assert permanent(np.zeros((0, 0))) == pytest.approx(1)


def test_permanent_errors():
    with pytest.raises(DomainError):
        permanent(np.ones((2, 3)))
    with pytest.raises(ResourceError):
        permanent(np.ones((30, 30)))


def test_backends_agree(rng):
    compiled = pytest.importorskip("passive_purify._kernels")
    for n in range(1, 7):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        assert abs(compiled.permanent(a) - _kernels_py.permanent(a)) < 1e-10
    u = haar_unitary(3, 5)
    occ = np.array(enumerate_sector(3, 3).states, dtype=np.int64)
    np.testing.assert_allclose(compiled.sym_power_matrix(u, occ, occ),
                               _kernels_py.sym_power_matrix(u, occ, occ), atol=1e-13)


def test_low_sectors():
    u = haar_unitary(3, 0)
    np.testing.assert_allclose(sym_power(u, 0).entries, [[1]])
    np.testing.assert_allclose(sym_power(u, 1).entries, u, atol=1e-14)


@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 2**31 - 1))
def test_unitary_and_homomorphism(m, big_n, seed):
    rng = np.random.default_rng(seed)
    u, v = haar_unitary(m, rng), haar_unitary(m, rng)
    su, sv = sym_power(u, big_n).entries, sym_power(v, big_n).entries
    assert unitarity_residual(su) < 1e-10
    assert np.linalg.norm(su @ sv - sym_power(u @ v, big_n).entries) < 1e-10
    assert np.linalg.norm(sym_power(u.conj().T, big_n).entries - su.conj().T) < 1e-10


@pytest.mark.parametrize("big_n", [1, 2, 3])
def test_annihilators_transform_linearly(big_n):
    # U^dag a_j U = sum_k u_jk a_k, restricted to sector N -> N-1
    m = 3
    u = haar_unitary(m, 11)
    hi, lo = enumerate_sector(m, big_n), enumerate_sector(m, big_n - 1)
    s_hi, s_lo = sym_power(u, big_n).entries, sym_power(u, big_n - 1).entries
    for j in range(m):
        lhs = s_lo.conj().T @ lowering(hi, lo, j) @ s_hi
        rhs = sum(u[j, k] * lowering(hi, lo, k) for k in range(m))
        assert np.abs(lhs - rhs).max() < 1e-12


def test_hong_ou_mandel():
    bs = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    s = sym_power(bs, 2)
    b = s.basis_row
    col = s.entries[:, b.index_of[(1, 1)]]
    assert abs(col[b.index_of[(1, 1)]]) < 1e-12
    assert abs(col[b.index_of[(2, 0)]]) ** 2 == pytest.approx(0.5)
    assert abs(col[b.index_of[(0, 2)]]) ** 2 == pytest.approx(0.5)


def test_lifts_single_photon():
    u, w = haar_unitary(2, 1), haar_unitary(3, 2)
    np.testing.assert_allclose(lift_iid(u, 3, 1).entries, np.kron(np.eye(3), u), atol=1e-14)
    np.testing.assert_allclose(lift_copy_mixer(w, 2, 1).entries, np.kron(w, np.eye(2)), atol=1e-14)


def test_lift_on_truncated_basis_is_block_diagonal():
    u = haar_unitary(2, 4)
    big = lift_on_basis(u, enumerate_truncated(2, 3))
    assert unitarity_residual(big) < 1e-12
    np.testing.assert_allclose(big[3:6, 3:6], sym_power(u, 2).entries)
    assert np.abs(big[:3, 3:]).max() == 0


def test_haar_sampler_reproducible():
    a = haar_unitary(4, sample_seed(7, 3))
    b = haar_unitary(4, sample_seed(7, 3))
    c = haar_unitary(4, sample_seed(7, 4))
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    assert unitarity_residual(a) < 1e-12
    with pytest.raises(DomainError):
        haar_unitary(0)


def test_haar_phase_distribution():
    # diagonal phases of a Haar unitary are uniform, so E[u11] = E[u11^2] = 0
    n = 4000
    vals = np.array([haar_unitary(2, s)[0, 0] for s in range(n)])
    assert abs(vals.mean()) < 5 * np.sqrt(0.5 / n)
    assert abs((vals ** 2).mean()) < 5 / np.sqrt(n)


def test_high_occupation_sector():
    # (N,0) -> (N,0) element is u00^N; the whole sector stays unitary
    u = haar_unitary(2, 21)
    s = sym_power(u, 24).entries
    assert abs(s[0, 0] - u[0, 0] ** 24) < 1e-12
    assert unitarity_residual(s) < 1e-10


def test_python_kernel_on_repeated_modes(rng):
    u = haar_unitary(3, 8)
    occ = np.array(enumerate_sector(3, 4).states, dtype=np.int64)
    ref = np.array([[brute_permanent(u[np.repeat(np.arange(3), r)][:, np.repeat(np.arange(3), c)])
                     / np.sqrt(np.prod([factorial(x) for x in r]) * np.prod([factorial(x) for x in c]))
                     for c in occ] for r in occ])
    np.testing.assert_allclose(_kernels_py.sym_power_matrix(u, occ, occ), ref, atol=1e-12)
    np.testing.assert_allclose(sym_power(u, 4).entries, ref, atol=1e-12)


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = ("from passive_purify.interferometer import BACKEND, sym_power, haar_unitary, unitarity_residual;"
            "print(BACKEND, unitarity_residual(sym_power(haar_unitary(3, 1), 3).entries) < 1e-12)")
    env = dict(os.environ, PASSIVE_PURIFY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "True"]
