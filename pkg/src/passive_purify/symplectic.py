"""First and second moments of bosonic states.

Quadratures are ordered ``(x1, p1, ..., xm, pm)`` with ``a = (x + ip)/sqrt(2)``.
The covariance matrix is the expectation of the anticommutator
``{R - m, (R - m)^T}`` without a factor one half, so the vacuum has ``V = I``
and the mean photon number is ``(tr V - 2m)/4 + |mean|^2/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np

from .errors import DomainError, StructureError, TruncationError
from .fock import BlockOperator, SectorOperator, SectorVector


@dataclass(frozen=True)
class CovarianceState:
    modes: int
    mean: np.ndarray
    cov: np.ndarray
    trace_deficit: float = 0.0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (2 * self.modes,) or cov.shape != (2 * self.modes, 2 * self.modes):
            raise StructureError("moment shapes do not match the number of modes")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def uncertainty_min_eig(self) -> float:
        """Smallest eigenvalue of ``V + i Omega``; nonnegative for physical states."""
        return float(np.linalg.eigvalsh(self.cov + 1j * symplectic_form(self.modes))[0])


def symplectic_form(m: int) -> np.ndarray:
    if m < 1:
        raise DomainError("need at least one mode")
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def thermal_cov(nus: Iterable[float]) -> CovarianceState:
    nus = np.atleast_1d(np.asarray(list(nus) if not np.isscalar(nus) else [nus], dtype=float))
    if np.any(nus < 0):
        raise DomainError("mean photon numbers must be nonnegative")
    m = len(nus)
    return CovarianceState(m, np.zeros(2 * m), np.diag(np.repeat(2 * nus + 1, 2)))


def tmsv_cov(nu: float) -> CovarianceState:
    """Two-mode squeezed vacuum, modes ordered (A, B)."""
    if nu < 0:
        raise DomainError("mean photon number must be nonnegative")
    c = 2 * nu + 1
    s = 2 * np.sqrt(nu * (nu + 1))
    z = np.diag([1.0, -1.0])
    return CovarianceState(2, np.zeros(4), np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]]))


def mean_photon_cov(state: CovarianceState) -> float:
    return float((np.trace(state.cov) - 2 * state.modes) / 4 + state.mean @ state.mean / 2)


def is_passive_cov(state: CovarianceState, tol: float = 1e-9) -> bool:
    """Zero mean and a covariance commuting with the symplectic form."""
    omega = symplectic_form(state.modes)
    comm = state.cov @ omega - omega @ state.cov
    return bool(np.linalg.norm(state.mean) <= tol and np.linalg.norm(comm) <= tol)


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Williamson spectrum: the moduli of the eigenvalues of ``i Omega V``, each listed once."""
    cov = np.asarray(cov, dtype=float)
    m = cov.shape[0] // 2
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(m) @ cov)))
    return ev[::2]


def passive_symplectic(u) -> np.ndarray:
    """Orthogonal symplectic matrix ``S`` with ``U_u^dag R U_u = S R`` (xpxp order)."""
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    x, y = u.real, u.imag
    block = np.block([[x, -y], [y, x]])
    perm = np.ravel(np.column_stack([np.arange(m), np.arange(m) + m]))
    return block[np.ix_(perm, perm)]


# Fock-level moment extraction.  Kept deliberately elementary: amplitudes are
# addressed by occupation tuple and ladder operators are applied by hand.


def _ladder_moments(pairs, modes):
    """First moments <a_j>, <a_i a_j> and <a_i^dag a_j> from (row, col, value) triples.

    ``pairs`` yields ``(t, s, c)`` meaning the state contains ``c |t><s|``; the
    expectation of an operator ``O`` is ``sum c <s|O|t>``.
    """
    lookup: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], complex] = {}
    for t, s, c in pairs:
        lookup[(t, s)] = lookup.get((t, s), 0) + c
    first = np.zeros(modes, dtype=complex)
    aa = np.zeros((modes, modes), dtype=complex)
    ada = np.zeros((modes, modes), dtype=complex)
    for (t, s), c in lookup.items():
        nz = [(k, ti - si) for k, (ti, si) in enumerate(zip(t, s)) if ti != si]
        shifts = sorted(d for _, d in nz)
        if not nz:
            for j in range(modes):
                ada[j, j] += c * t[j]
        elif shifts == [1]:
            # <s| a_j |t> = sqrt(t_j) for s = t - e_j
            j = nz[0][0]
            first[j] += c * np.sqrt(t[j])
        elif shifts == [2]:
            j = nz[0][0]
            aa[j, j] += c * np.sqrt(t[j] * (t[j] - 1))
        elif shifts == [1, 1]:
            i, j = nz[0][0], nz[1][0]
            val = c * np.sqrt(t[i] * t[j])
            aa[i, j] += val
            aa[j, i] += val
        elif shifts == [-1, 1]:
            # <s| a_i^dag a_j |t> for s = t - e_j + e_i
            j = next(k for k, d in nz if d == 1)
            i = next(k for k, d in nz if d == -1)
            ada[i, j] += c * np.sqrt(t[j] * s[i])
    return first, aa, ada


def _pairs_from_blocks(blocks):
    for blk in blocks:
        rows, cols = blk.basis_row.states, blk.basis_col.states
        nzr, nzc = np.nonzero(blk.entries)
        for r, c in zip(nzr, nzc):
            yield rows[r], cols[c], complex(blk.entries[r, c])


def _pairs_from_vectors(vectors):
    amps = {}
    for vec in vectors:
        for s, a in zip(vec.basis.states, vec.entries):
            if a != 0:
                amps[s] = amps.get(s, 0) + complex(a)
    # only pairs one or two ladder steps apart enter the moments
    for t, at in amps.items():
        modes = len(t)
        near = {t}
        for j in range(modes):
            lo = list(t)
            lo[j] -= 1
            if lo[j] < 0:
                continue
            near.add(tuple(lo))
            for i in range(modes):
                lo2 = list(lo)
                lo2[i] -= 1
                if lo2[i] >= 0:
                    near.add(tuple(lo2))
                hop = list(lo)
                hop[i] += 1
                near.add(tuple(hop))
        for s in near:
            if s in amps:
                yield t, s, at * np.conj(amps[s])


def cov_from_fock(state, max_deficit: float = 1.0) -> CovarianceState:
    """Moments of a truncated Fock-space state.

    ``state`` is a ``BlockOperator``, a ``SectorOperator``, a ``SectorVector``,
    or a list of ``SectorVector`` (components of one pure state).  The canonical
    commutator is applied with unit weight, so for a truncated state the second
    moments are partial sums of the exact ones; the trace deficit is reported.
    """
    if isinstance(state, BlockOperator):
        modes = state.modes
        trace = state.trace()
        pairs = _pairs_from_blocks(state.blocks.values())
    elif isinstance(state, SectorOperator):
        modes = state.basis_row.modes
        trace = state.trace().real
        pairs = _pairs_from_blocks([state])
    else:
        vectors = [state] if isinstance(state, SectorVector) else list(state)
        modes = vectors[0].basis.modes
        trace = sum(v.norm_squared() for v in vectors)
        pairs = _pairs_from_vectors(vectors)
    deficit = max(0.0, 1.0 - trace)
    if deficit > max_deficit:
        raise TruncationError(f"trace deficit {deficit:.3g} above threshold", deficit)

    first, aa, ada = _ladder_moments(pairs, modes)
    # second moments <c_a c_b> of c = (a_1..a_m, a_1^dag..a_m^dag)
    eye = np.eye(modes)
    g = np.block([[aa, eye + ada.T], [ada, aa.conj()]])
    c_mean = np.concatenate([first, first.conj()])
    t = np.zeros((2 * modes, 2 * modes), dtype=complex)
    for j in range(modes):
        t[2 * j, j] = t[2 * j, modes + j] = 1 / np.sqrt(2)
        t[2 * j + 1, j] = -1j / np.sqrt(2)
        t[2 * j + 1, modes + j] = 1j / np.sqrt(2)
    mean = (t @ c_mean).real
    second = t @ g @ t.T
    cov = (second + second.T).real - 2 * np.outer(mean, mean)
    return CovarianceState(modes, mean, cov, trace_deficit=deficit)
