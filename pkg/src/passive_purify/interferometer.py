"""Passive linear-optical unitaries in the Fock representation.

A unitary ``u`` on ``M`` modes acts on annihilation operators as
``U_u^dag a U_u = u a``.  On the sector with ``N`` photons this is the
``N``-th symmetric power of ``u``, whose matrix elements are permanents of
``u`` with repeated rows and columns.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import DomainError, ResourceError
from .fock import FockBasis, SectorOperator, enumerate_sector

if os.environ.get("PASSIVE_PURIFY_PURE_PYTHON"):
    from . import _kernels_py as _kern

    BACKEND = "python"
else:
    try:
        from . import _kernels as _kern

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _kern

        BACKEND = "python"

MAX_PERMANENT_DIM = 24


def permanent(a) -> complex:
    """Permanent of a square matrix by Ryser's formula in Gray-code order."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_PERMANENT_DIM:
        raise ResourceError(f"permanent of a {a.shape[0]}x{a.shape[0]} matrix is too costly")
    return complex(_kern.permanent(a))


def unitarity_residual(u) -> float:
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def _check_square(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {u.shape}")
    return u


def sym_power(u, photons: int) -> SectorOperator:
    """Matrix of ``U_u`` restricted to the ``photons``-photon sector."""
    u = _check_square(u)
    if photons > MAX_PERMANENT_DIM:
        raise ResourceError(f"sector with {photons} photons exceeds the permanent size limit")
    basis = enumerate_sector(u.shape[0], photons)
    occ = np.array(basis.states, dtype=np.int64)
    return SectorOperator.square(basis, _kern.sym_power_matrix(u, occ, occ))


def lift_iid(u, copies: int, photons: int) -> SectorOperator:
    """``U_u`` applied independently to each of ``copies`` blocks of modes.

    Modes are ordered copy-major: mode ``j`` of copy ``c`` has index ``c*m + j``.
    """
    u = _check_square(u)
    return sym_power(np.kron(np.eye(copies), u), photons)


def lift_copy_mixer(w, modes: int, photons: int) -> SectorOperator:
    """Unitary mixing the copies, ``w`` tensored with the identity on ``modes`` modes."""
    w = _check_square(w)
    return sym_power(np.kron(w, np.eye(modes)), photons)


def lift_on_basis(u, basis: FockBasis) -> np.ndarray:
    """Matrix of ``U_u`` on a sector or truncated basis (block diagonal by photon number)."""
    u = _check_square(u)
    if basis.modes != u.shape[0]:
        raise DomainError("unitary size does not match the number of modes")
    if basis.sector is not None:
        return sym_power(u, basis.sector).entries
    if basis.cutoff is None:
        raise DomainError("lift_on_basis needs a sector or truncated basis")
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    start = 0
    for n in range(basis.cutoff + 1):
        blk = sym_power(u, n).entries
        d = blk.shape[0]
        out[start:start + d, start:start + d] = blk
        start += d
    return out


def sample_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Independent per-sample seed; identical whether samples run serially or in parallel."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if dim < 1:
        raise DomainError("dimension must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
