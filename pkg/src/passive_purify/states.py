"""Thermal and passive Gaussian states, and their purifications, in truncated Fock space.

Pure states on two systems ``A`` and ``B`` with equal photon numbers are
stored sector by sector: component ``k`` lives on the product of the
``k``-photon sectors of ``A`` and ``B`` (``A`` index slow).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Dict

import numpy as np

from .errors import DomainError
from .fock import (
    BlockOperator,
    SectorOperator,
    SectorVector,
    enumerate_sector,
    joint_basis,
    partial_trace_B,
)
from .interferometer import sym_power
from .linalg import psd_sqrt_matrix


@dataclass(frozen=True)
class TruncatedState:
    blocks: BlockOperator
    trace_deficit: float

    @property
    def modes(self) -> int:
        return self.blocks.modes

    def block(self, k: int) -> SectorOperator:
        return self.blocks.blocks[k]

    def cutoff(self) -> int:
        return max(self.blocks.blocks)


@dataclass(frozen=True)
class PureVector:
    modes_a: int
    modes_b: int
    sectors: Dict[int, SectorVector]
    norm_deficit: float = 0.0

    def norm_squared(self) -> float:
        return fsum(v.norm_squared() for v in self.sectors.values())

    def overlap(self, other: "PureVector") -> complex:
        return complex(sum(
            np.vdot(v.entries, other.sectors[k].entries)
            for k, v in self.sectors.items() if k in other.sectors
        ))

    def matrix(self, k: int) -> np.ndarray:
        """Sector ``k`` amplitudes as an (A state, B state) matrix."""
        v = self.sectors[k]
        a, b = v.basis.factors
        return v.entries.reshape(a.dim, b.dim)

    def reduced_a(self) -> BlockOperator:
        blocks = {k: partial_trace_B(v.projector()) for k, v in self.sectors.items()}
        return BlockOperator(self.modes_a, blocks)

    def vectors(self):
        return [self.sectors[k] for k in sorted(self.sectors)]


def _as_nus(nus) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(nus, dtype=float))
    if np.any(arr < 0):
        raise DomainError("mean photon numbers must be nonnegative")
    return arr


def total_photon_pmf(nus, copies: int, cutoff: int) -> np.ndarray:
    """P(total photons = t) for t = 0..cutoff of ``copies`` copies of a product thermal state."""
    nus = np.tile(_as_nus(nus), copies)
    pmf = np.zeros(cutoff + 1)
    pmf[0] = 1.0
    t = np.arange(cutoff + 1)
    for nu in nus:
        single = (1.0 / (nu + 1.0)) * (nu / (nu + 1.0)) ** t
        pmf = np.convolve(pmf, single)[: cutoff + 1]
    return pmf


def thermal_weights(basis, nus) -> np.ndarray:
    """Diagonal of the product thermal state on the states of ``basis``."""
    nus = _as_nus(nus)
    occ = np.array(basis.states, dtype=float).reshape(len(basis.states), basis.modes)
    pref = np.prod(1.0 / (nus + 1.0))
    ratio = nus / (nus + 1.0)
    return pref * np.prod(ratio ** occ, axis=1)


def thermal_fock(nus, cutoff: int) -> TruncatedState:
    """Product thermal state on all sectors with at most ``cutoff`` photons."""
    nus = _as_nus(nus)
    m = len(nus)
    blocks = {}
    for k in range(cutoff + 1):
        basis = enumerate_sector(m, k)
        blocks[k] = SectorOperator.square(basis, np.diag(thermal_weights(basis, nus)))
    deficit = max(0.0, 1.0 - fsum(total_photon_pmf(nus, 1, cutoff)))
    return TruncatedState(BlockOperator(m, blocks), deficit)


def passive_state_fock(u, nus, cutoff: int) -> TruncatedState:
    """``U_u tau U_u^dag`` for the product thermal state ``tau``."""
    tau = thermal_fock(nus, cutoff)
    u = np.asarray(u, dtype=complex)
    blocks = {}
    for k, blk in tau.blocks.blocks.items():
        s = sym_power(u, k).entries
        blocks[k] = SectorOperator.square(blk.basis_row, s @ blk.entries @ s.conj().T)
    return TruncatedState(BlockOperator(tau.modes, blocks), tau.trace_deficit)


def iid_state_fock(u, nus, copies: int, cutoff: int) -> TruncatedState:
    """``copies`` copies of a passive state as one state on ``copies * m`` modes (copy-major)."""
    u = np.asarray(u, dtype=complex)
    return passive_state_fock(np.kron(np.eye(copies), u), np.tile(_as_nus(nus), copies), cutoff)


def gamma_vector(modes: int, copies: int, photons: int) -> SectorVector:
    """Unnormalised maximally entangled vector on the ``photons`` sector of ``copies*modes`` modes."""
    basis = enumerate_sector(modes * copies, photons)
    return SectorVector(joint_basis(basis, basis), np.eye(basis.dim).ravel())


def tmsv_fock(nu: float, cutoff: int) -> PureVector:
    """Two-mode squeezed vacuum with ``nu`` mean photons per mode, sectors ``k <= cutoff``."""
    if nu < 0:
        raise DomainError("mean photon number must be nonnegative")
    q = nu / (nu + 1.0)
    sectors = {}
    for k in range(cutoff + 1):
        b = enumerate_sector(1, k)
        sectors[k] = SectorVector(joint_basis(b, b), [q ** (k / 2) / np.sqrt(nu + 1.0)])
    return PureVector(1, 1, sectors, q ** (cutoff + 1))


def standard_purification(rho: TruncatedState, tol: float = 1e-10) -> PureVector:
    """Components of ``(sqrt(rho) x 1)|Gamma>``, one per photon-number sector."""
    sectors = {}
    for k, blk in rho.blocks.blocks.items():
        root, _ = psd_sqrt_matrix(blk.entries, tol)
        b = blk.basis_row
        sectors[k] = SectorVector(joint_basis(b, b), root.ravel())
    return PureVector(rho.modes, rho.modes, sectors, rho.trace_deficit)


def _split_pairs(occ):
    """Reorder (A1, B1, A2, B2, ...) occupations to (A1, A2, ... | B1, B2, ...)."""
    return tuple(occ[0::2]), tuple(occ[1::2])


def purification_via_lemma1(u, nus, cutoff: int) -> PureVector:
    """``(U_u x conj(U_u))`` applied to the product of per-mode two-mode squeezed vacua."""
    nus = _as_nus(nus)
    m = len(nus)
    u = np.asarray(u, dtype=complex)
    per_mode = [tmsv_fock(nu, cutoff) for nu in nus]
    sectors = {}
    for k in range(cutoff + 1):
        basis = enumerate_sector(m, k)
        mat = np.zeros((basis.dim, basis.dim), dtype=complex)
        for occ in basis.states:
            amp = np.prod([per_mode[j].sectors[kj].entries[0] for j, kj in enumerate(occ)])
            interleaved = tuple(x for kj in occ for x in (kj, kj))
            a, b = _split_pairs(interleaved)
            mat[basis.index_of[a], basis.index_of[b]] = amp
        s = sym_power(u, k).entries
        s_conj = sym_power(u.conj(), k).entries
        mat = s @ mat @ s_conj.T
        sectors[k] = SectorVector(joint_basis(basis, basis), mat.ravel())
    deficit = max(0.0, 1.0 - fsum(total_photon_pmf(nus, 1, cutoff)))
    return PureVector(m, m, sectors, deficit)


def n_fold_product(psi: PureVector, copies: int) -> PureVector:
    """``psi`` tensored ``copies`` times, regrouped as (A^n | B^n) with copies outermost.

    Sector ``k`` of the result collects all terms with ``k`` photons in ``A^n``;
    sectors beyond the largest kept single-copy sector are dropped.
    """
    m_a, m_b = psi.modes_a, psi.modes_b
    kmax = max(psi.sectors)
    mats = {k: psi.matrix(k) for k in psi.sectors}
    out = {}
    for k in range(kmax + 1):
        ba = enumerate_sector(m_a * copies, k)
        bb = enumerate_sector(m_b * copies, k)
        amps = np.zeros((ba.dim, bb.dim), dtype=complex)
        b_split = []
        for sb in bb.states:
            parts = [sb[c * m_b:(c + 1) * m_b] for c in range(copies)]
            b_split.append(parts)
        for i, sa in enumerate(ba.states):
            a_parts = [sa[c * m_a:(c + 1) * m_a] for c in range(copies)]
            a_tot = [sum(p) for p in a_parts]
            for j, b_parts in enumerate(b_split):
                if any(sum(p) != t for p, t in zip(b_parts, a_tot)):
                    continue
                val = 1.0 + 0j
                for pa, pb, t in zip(a_parts, b_parts, a_tot):
                    if t not in mats:
                        val = 0
                        break
                    fa = enumerate_sector(m_a, t).index_of[pa]
                    fb = enumerate_sector(m_b, t).index_of[pb]
                    val *= mats[t][fa, fb]
                amps[i, j] = val
        out[k] = SectorVector(joint_basis(ba, bb), amps.ravel())
    result = PureVector(m_a * copies, m_b * copies, out)
    return PureVector(result.modes_a, result.modes_b, out, max(0.0, 1.0 - result.norm_squared()))


def random_psd_blocks(modes: int, cutoff: int, rng, rank=None) -> BlockOperator:
    """Random block-diagonal PSD operator with unit trace, for property checks."""
    blocks = {}
    raw = {}
    for k in range(cutoff + 1):
        basis = enumerate_sector(modes, k)
        r = basis.dim if rank is None else min(rank, basis.dim)
        g = rng.standard_normal((basis.dim, r)) + 1j * rng.standard_normal((basis.dim, r))
        raw[k] = (basis, g @ g.conj().T)
    total = fsum(np.trace(x).real for _, x in raw.values())
    for k, (basis, x) in raw.items():
        blocks[k] = SectorOperator.square(basis, x / total)
    return BlockOperator(modes, blocks)

