"""Partitions and unitary-group irrep dimensions for the U(n) x U(m) decomposition of Fock space.

The sector with ``N`` photons on ``n*m`` modes splits into a sum over
partitions ``lam`` of ``N`` with at most ``min(m, n)`` parts of
``dim_n(lam) * dim_m(lam)``; :func:`howe_identity_check` verifies that count in
exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Tuple

from .errors import DomainError
from .fock import enumerate_sector


@dataclass(frozen=True, order=True)
class Partition:
    parts: Tuple[int, ...]

    def __post_init__(self):
        if any(p <= 0 for p in self.parts) or any(
            a < b for a, b in zip(self.parts, self.parts[1:])
        ):
            raise DomainError(f"not a partition: {self.parts}")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)


def _partitions(n, max_part, max_len):
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first, max_len - 1):
            yield (first,) + rest


def partitions(n: int, max_len: int) -> List[Partition]:
    """Partitions of ``n`` with at most ``max_len`` parts, largest first part first."""
    if n < 0 or max_len < 1:
        raise DomainError("need n >= 0 and max_len >= 1")
    return [Partition(p) for p in _partitions(n, n, max_len)]


def u_irrep_dim(lam: Partition, rank: int) -> int:
    """Weyl dimension formula for the U(rank) irrep with highest weight ``lam``."""
    if len(lam) > rank:
        raise DomainError(f"partition {lam.parts} has more than {rank} parts")
    padded = list(lam.parts) + [0] * (rank - len(lam))
    dim = Fraction(1)
    for i in range(rank):
        for j in range(i + 1, rank):
            dim *= Fraction(padded[i] - padded[j] + j - i, j - i)
    assert dim.denominator == 1
    return int(dim)


@dataclass(frozen=True)
class HoweRow:
    m: int
    n: int
    photons: int
    terms: Tuple[Tuple[Tuple[int, ...], int, int], ...]
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "N": self.photons,
            "terms": [{"partition": list(p), "dim_n": dn, "dim_m": dm} for p, dn, dm in self.terms],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "equal": self.equal,
        }


def howe_identity_check(m: int, n: int, photons: int) -> HoweRow:
    """Compare sum_lam dim_n(lam) dim_m(lam) with the size of the ``photons`` sector on n*m modes."""
    if m < 1 or n < 1 or photons < 0:
        raise DomainError("need m, n >= 1 and N >= 0")
    terms = []
    for lam in partitions(photons, min(m, n)):
        terms.append((lam.parts, u_irrep_dim(lam, n), u_irrep_dim(lam, m)))
    lhs = sum(dn * dm for _, dn, dm in terms)
    rhs = len(enumerate_sector(n * m, photons))
    return HoweRow(m, n, photons, tuple(terms), lhs, rhs)


def commutant_dim(m: int, n: int, photons: int) -> int:
    """Dimension of the commutant of the i.i.d. U(m) action on the sector: sum of dim_n(lam)^2."""
    return sum(u_irrep_dim(lam, n) ** 2 for lam in partitions(photons, min(m, n)))


def sector_size(modes: int, photons: int) -> int:
    return comb(photons + modes - 1, modes - 1)
