import numpy as np
import pytest

from passive_purify.errors import ConvergenceError, DomainError, StructureError
from passive_purify.fock import SectorOperator, enumerate_sector, enumerate_truncated, joint_basis
from passive_purify.howe import commutant_dim
from passive_purify.twirl import (
    GroupSpec,
    commutant_span_check,
    fixed_point_twirl,
    invariance_residual,
    mc_twirl,
    pinch_twirl_m1,
    twirl,
)


def herm(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def op_on(basis_a, basis_b, rng):
    jb = joint_basis(basis_a, basis_b)
    return SectorOperator.square(jb, herm(jb.dim, rng))


def test_group_spec_validation():
    with pytest.raises(DomainError):
        GroupSpec("C", 1, 2)
    with pytest.raises(DomainError):
        GroupSpec("A", 1, 2, "swap")
    with pytest.raises(DomainError):
        GroupSpec("A", 0, 2)
    g = GroupSpec("both", 2, 3, "mixer")
    assert g.acts_on == (True, True) and g.label_dim == 3


def test_needs_joint_basis(rng):
    x = SectorOperator.square(enumerate_sector(2, 1), herm(2, rng))
    with pytest.raises(StructureError):
        fixed_point_twirl(x, GroupSpec("B", 1, 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_fixed_space_dimension_matches_commutant(k, rng):
    # operators on B alone (A is the one-state vacuum sector)
    vac, sec = enumerate_sector(1, 0), enumerate_sector(4, k)
    g = GroupSpec("B", 2, 2)
    outs = [fixed_point_twirl(op_on(vac, sec, rng), g, seed=3).result.entries.ravel() for _ in range(60)]
    s = np.linalg.svd(np.array(outs), compute_uv=False)
    assert int((s > 1e-8 * s[0]).sum()) == commutant_dim(2, 2, k)


def test_engines_agree_and_are_invariant(rng):
    x = op_on(enumerate_sector(4, 1), enumerate_sector(4, 2), rng)
    g = GroupSpec("B", 2, 2)
    dense = fixed_point_twirl(x, g, engine="dense", seed=1)
    it = fixed_point_twirl(x, g, engine="iterate", seed=1, tol=1e-10)
    assert dense.engine == "dense" and it.engine == "iterate" and it.iterations > 1
    assert np.linalg.norm(dense.result.entries - it.result.entries) < 1e-7 * np.linalg.norm(x.entries)
    assert invariance_residual(x, g) > 1e-2
    assert invariance_residual(dense.result, g, seed=99) < 1e-9
    again = fixed_point_twirl(dense.result, g, engine="dense", seed=5)
    assert np.linalg.norm(again.result.entries - dense.result.entries) < 1e-9 * np.linalg.norm(x.entries)


def test_independent_generators_give_same_projection(rng):
    x = op_on(enumerate_sector(4, 1), enumerate_sector(4, 1), rng)
    g = GroupSpec("both", 2, 2)
    a = fixed_point_twirl(x, g, seed=1).result.entries
    b = fixed_point_twirl(x, g, seed=2, gens=6).result.entries
    assert np.abs(a - b).max() < 1e-9


def test_pinching_is_the_one_mode_twirl(rng):
    x = op_on(enumerate_sector(2, 1), enumerate_truncated(2, 2), rng)
    g = GroupSpec("B", 1, 2)
    fp = fixed_point_twirl(x, g, tol=1e-11, engine="iterate")
    assert np.abs(fp.result.entries - pinch_twirl_m1(x).entries).max() < 1e-8
    np.testing.assert_array_equal(twirl(x, g, "pinch").entries, pinch_twirl_m1(x).entries)
    with pytest.raises(DomainError):
        twirl(x, GroupSpec("B", 2, 1), "pinch")


def test_trace_preserved_by_twirl(rng):
    x = op_on(enumerate_sector(4, 2), enumerate_sector(4, 2), rng)
    out = fixed_point_twirl(x, GroupSpec("B", 2, 2)).result
    assert abs(out.trace() - x.trace()) < 1e-10


def test_convergence_error(rng):
    x = op_on(enumerate_sector(4, 1), enumerate_sector(4, 2), rng)
    with pytest.raises(ConvergenceError) as err:
        fixed_point_twirl(x, GroupSpec("B", 2, 2), engine="iterate", max_iter=2)
    assert err.value.residual > 0


def test_monte_carlo_twirl(rng):
    x = op_on(enumerate_sector(2, 1), enumerate_truncated(2, 1), rng)
    g = GroupSpec("B", 1, 2)
    a = mc_twirl(x, g, 2000, seed=4)
    b = mc_twirl(x, g, 2000, seed=4)
    np.testing.assert_array_equal(a.estimate.entries, b.estimate.entries)
    exact = pinch_twirl_m1(x).entries
    z = np.abs((a.estimate.entries - exact).real) / (a.stderr_re + 1e-12)
    assert z.max() < 5
    assert a.estimate.hermiticity_residual() < 1e-12
    with pytest.raises(DomainError):
        mc_twirl(x, g, 1, seed=0)


def test_commutant_span(rng):
    basis = enumerate_sector(4, 2)
    x = op_on(basis, basis, rng)
    a = fixed_point_twirl(x, GroupSpec("both", 2, 2)).result
    res = commutant_span_check(a, 2, 2, seed=1)
    assert res.residual < 1e-6
    assert res.rank == commutant_dim(2, 2, 2) ** 2
    with pytest.raises(DomainError):
        commutant_span_check(x, 2, 2)
