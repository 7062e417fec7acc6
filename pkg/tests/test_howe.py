from math import comb

import pytest

from passive_purify.errors import DomainError
from passive_purify.howe import commutant_dim, howe_identity_check, partitions, u_irrep_dim


def test_partition_listing():
    assert [p.parts for p in partitions(4, 2)] == [(4,), (3, 1), (2, 2)]
    # unrestricted partition counts p(N)
    assert [len(partitions(n, n if n else 1)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert all(p.weight == 5 and len(p) <= 2 for p in partitions(5, 2))


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_irrep_dims_known_families(rank):
    from passive_purify.howe import Partition

    for big_n in range(5):
        # symmetric powers
        assert u_irrep_dim(Partition((big_n,)) if big_n else Partition(()), rank) == comb(big_n + rank - 1, big_n)
    for k in range(1, rank + 1):
        # exterior powers
        assert u_irrep_dim(Partition((1,) * k), rank) == comb(rank, k)


def test_irrep_dims_small_cases():
    from passive_purify.howe import Partition

    assert u_irrep_dim(Partition((2, 1)), 3) == 8
    assert u_irrep_dim(Partition((2, 2)), 3) == 6
    assert u_irrep_dim(Partition((2, 1)), 2) == 2
    with pytest.raises(DomainError):
        u_irrep_dim(Partition((1, 1, 1)), 2)


def test_identity_worked_case():
    row = howe_identity_check(2, 3, 4)
    assert row.lhs == row.rhs == 126
    assert [t[0] for t in row.terms] == [(4,), (3, 1), (2, 2)]
    assert row.as_dict()["equal"] is True


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_table(m, n):
    for big_n in range(7):
        row = howe_identity_check(m, n, big_n)
        assert row.lhs == row.rhs == comb(big_n + n * m - 1, n * m - 1)


def test_commutant_dims():
    assert [commutant_dim(2, 2, k) for k in range(5)] == [1, 4, 10, 20, 35]
    with pytest.raises(DomainError):
        howe_identity_check(0, 1, 1)
