"""Occupation-number bases, sector-block operators and partial traces.

States of a fixed photon-number sector are ordered colexicographically: the
occupation of the last mode varies slowest.  A truncated basis is the
concatenation of sectors ``0..K`` in that order.  Joint bases of two factors
put the first factor's index slow and the second factor's index fast, which
matches ``numpy.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .errors import DomainError, StructureError

Occupation = Tuple[int, ...]


def _compositions(modes: int, total: int) -> Iterator[Occupation]:
    if modes == 1:
        yield (total,)
        return
    for last in range(total + 1):
        for head in _compositions(modes - 1, total - last):
            yield head + (last,)


@dataclass(frozen=True)
class FockBasis:
    """Ordered list of occupation vectors with an inverse index.

    Exactly one of ``sector``, ``cutoff`` or ``factors`` describes how the
    basis was selected: a single photon-number sector, all states with total
    photon number up to a cutoff, or the product of two bases.
    """

    modes: int
    states: Tuple[Occupation, ...]
    sector: Optional[int] = None
    cutoff: Optional[int] = None
    factors: Optional[Tuple["FockBasis", "FockBasis"]] = None
    index_of: Dict[Occupation, int] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        index = {s: i for i, s in enumerate(self.states)}
        if len(index) != len(self.states):
            raise StructureError("duplicate occupation vectors in basis")
        object.__setattr__(self, "index_of", index)

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def is_joint(self) -> bool:
        return self.factors is not None

    def totals(self) -> np.ndarray:
        return np.array([sum(s) for s in self.states], dtype=np.int64)

    def describe(self) -> dict:
        """JSON-friendly descriptor from which the basis can be rebuilt."""
        if self.factors is not None:
            return {
                "kind": "joint",
                "factors": [f.describe() for f in self.factors],
            }
        if self.sector is not None:
            return {"kind": "sector", "modes": self.modes, "photons": self.sector}
        if self.cutoff is not None:
            return {"kind": "truncated", "modes": self.modes, "cutoff": self.cutoff}
        return {"kind": "explicit", "modes": self.modes, "states": [list(s) for s in self.states]}


def basis_from_descriptor(desc: dict) -> FockBasis:
    kind = desc["kind"]
    if kind == "sector":
        return enumerate_sector(int(desc["modes"]), int(desc["photons"]))
    if kind == "truncated":
        return enumerate_truncated(int(desc["modes"]), int(desc["cutoff"]))
    if kind == "joint":
        a, b = (basis_from_descriptor(d) for d in desc["factors"])
        return joint_basis(a, b)
    if kind == "explicit":
        return FockBasis(int(desc["modes"]), tuple(tuple(s) for s in desc["states"]))
    raise StructureError(f"unknown basis kind {kind!r}")


@lru_cache(maxsize=None)
def enumerate_sector(modes: int, photons: int) -> FockBasis:
    """All occupation vectors of ``modes`` modes with exactly ``photons`` photons."""
    if modes < 1 or photons < 0:
        raise DomainError(f"need modes >= 1 and photons >= 0, got {modes}, {photons}")
    return FockBasis(modes, tuple(_compositions(modes, photons)), sector=photons)


@lru_cache(maxsize=None)
def enumerate_truncated(modes: int, cutoff: int) -> FockBasis:
    if modes < 1 or cutoff < 0:
        raise DomainError(f"need modes >= 1 and cutoff >= 0, got {modes}, {cutoff}")
    states = tuple(s for n in range(cutoff + 1) for s in enumerate_sector(modes, n).states)
    return FockBasis(modes, states, cutoff=cutoff)


def sector_dim(modes: int, photons: int) -> int:
    return comb(photons + modes - 1, modes - 1)


@lru_cache(maxsize=None)
def joint_basis(basis_a: FockBasis, basis_b: FockBasis) -> FockBasis:
    states = tuple(a + b for a in basis_a.states for b in basis_b.states)
    return FockBasis(basis_a.modes + basis_b.modes, states, factors=(basis_a, basis_b))


def _frozen(arr: np.ndarray) -> np.ndarray:
    view = arr.view()
    view.flags.writeable = False
    return view


@dataclass(frozen=True)
class SectorOperator:
    """Dense complex matrix between two bases."""

    basis_row: FockBasis
    basis_col: FockBasis
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (self.basis_row.dim, self.basis_col.dim):
            raise StructureError(
                f"matrix shape {arr.shape} does not match bases "
                f"({self.basis_row.dim}, {self.basis_col.dim})"
            )
        object.__setattr__(self, "entries", _frozen(arr))

    @classmethod
    def square(cls, basis: FockBasis, entries) -> "SectorOperator":
        return cls(basis, basis, entries)

    @property
    def shape(self):
        return self.entries.shape

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def dagger(self) -> "SectorOperator":
        return SectorOperator(self.basis_col, self.basis_row, self.entries.conj().T)

    def hermiticity_residual(self) -> float:
        return float(np.linalg.norm(self.entries - self.entries.conj().T))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def __matmul__(self, other: "SectorOperator") -> "SectorOperator":
        if self.basis_col != other.basis_row:
            raise StructureError("basis mismatch in operator product")
        return SectorOperator(self.basis_row, other.basis_col, self.entries @ other.entries)


@dataclass(frozen=True)
class SectorVector:
    basis: FockBasis
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (self.basis.dim,):
            raise StructureError(f"vector length {arr.shape} != basis size {self.basis.dim}")
        object.__setattr__(self, "entries", _frozen(arr))

    def projector(self) -> SectorOperator:
        v = self.entries
        return SectorOperator.square(self.basis, np.outer(v, v.conj()))

    def norm_squared(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)


@dataclass(frozen=True)
class BlockOperator:
    """Photon-number block-diagonal operator; missing sectors are zero."""

    modes: int
    blocks: Dict[int, SectorOperator]

    def __post_init__(self):
        for label, blk in self.blocks.items():
            if blk.basis_row.sector != label or blk.basis_row.modes != self.modes:
                raise StructureError(f"block {label} does not live on sector {label}")

    def trace(self) -> float:
        return float(sum(b.trace().real for b in self.blocks.values()))

    def sectors(self):
        return sorted(self.blocks)


def partial_trace_B(x: SectorOperator) -> SectorOperator:
    """Trace out the second factor of an operator on a joint basis."""
    if not (x.basis_row.is_joint and x.basis_col.is_joint):
        raise StructureError("partial trace needs an operator on a joint basis")
    ra, rb = x.basis_row.factors
    ca, cb = x.basis_col.factors
    if rb != cb:
        raise StructureError("row and column B factors differ")
    t = x.entries.reshape(ra.dim, rb.dim, ca.dim, cb.dim)
    return SectorOperator(ra, ca, np.einsum("ibjb->ij", t))


def partial_trace_A(x: SectorOperator) -> SectorOperator:
    if not (x.basis_row.is_joint and x.basis_col.is_joint):
        raise StructureError("partial trace needs an operator on a joint basis")
    ra, rb = x.basis_row.factors
    ca, cb = x.basis_col.factors
    if ra != ca:
        raise StructureError("row and column A factors differ")
    t = x.entries.reshape(ra.dim, rb.dim, ca.dim, cb.dim)
    return SectorOperator(rb, cb, np.einsum("aiaj->ij", t))


def kron_operator(p: SectorOperator, q: SectorOperator) -> SectorOperator:
    return SectorOperator(
        joint_basis(p.basis_row, q.basis_row),
        joint_basis(p.basis_col, q.basis_col),
        np.kron(p.entries, q.entries),
    )


def identity(basis: FockBasis) -> SectorOperator:
    return SectorOperator.square(basis, np.eye(basis.dim))


def number_operator_diag(basis: FockBasis) -> np.ndarray:
    return basis.totals().astype(float)
