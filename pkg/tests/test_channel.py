import numpy as np
import pytest

from passive_purify import channel as ch
from passive_purify.errors import DomainError, StructureError, TruncationError
from passive_purify.fock import BlockOperator, SectorOperator, enumerate_sector
from passive_purify.interferometer import haar_unitary
from passive_purify.states import iid_state_fock, random_psd_blocks


def test_thermal_tails_single_mode():
    nu, cutoff = 0.8, 5
    q = nu / (1 + nu)
    assert ch.thermal_tail([nu], 1, cutoff) == pytest.approx(q ** (cutoff + 1))
    ks = np.arange(cutoff + 1, 4000)
    direct = np.sum(ks * (1 - q) * q ** ks)
    assert ch.photon_tail([nu], 1, cutoff) == pytest.approx(direct, rel=1e-9)


@pytest.mark.parametrize("m,n,k,method", [
    (1, 2, 3, ch.PINCH),
    (1, 3, 2, ch.PINCH),
    (2, 2, 2, ch.TwirlMethod("fixed_point")),
])
def test_R_is_psd_and_resolves_identity(m, n, k, method):
    r = ch.build_Rnk(m, n, k, method)
    assert r.op.min_eigenvalue() > -1e-10
    assert ch.trace_identity_residual(r) < 1e-8
    assert r.clipped < 1e-9
    assert r.dim == enumerate_sector(m * n, k).dim ** 2


def test_R_zero_photons_is_trivial():
    r = ch.build_Rnk(2, 2, 0, ch.TwirlMethod("fixed_point"))
    np.testing.assert_allclose(r.op.entries, [[1.0]])


def test_pinch_refused_for_several_modes():
    with pytest.raises(DomainError):
        ch.build_Rnk(2, 2, 1, ch.PINCH)
    with pytest.raises(DomainError):
        ch.TwirlMethod("exact")


def test_trace_preservation_and_positivity():
    rng = np.random.default_rng(3)
    x = random_psd_blocks(2, 6, rng)
    y = ch.apply_channel(x, 1, 2, 6, ch.PINCH)
    assert abs(y.trace - x.trace()) < 1e-12
    assert y.min_eigenvalue() > -1e-12


def test_output_marginal_is_the_iid_input():
    # on i.i.d. passive inputs the output is an average of purifications, so Tr_B gives rho^n back
    from passive_purify.fock import partial_trace_B

    u = haar_unitary(2, 6)
    x = iid_state_fock(u, [0.3, 0.6], 2, 2)
    y = ch.apply_channel(x, 2, 2, 2, ch.TwirlMethod("fixed_point"))
    for k in range(3):
        np.testing.assert_allclose(partial_trace_B(y.blocks[k]).entries, x.block(k).entries, atol=1e-9)


def test_parallel_and_serial_outputs_identical():
    x = iid_state_fock(np.eye(1), [0.7], 2, 6)
    a = ch.apply_channel(x, 1, 2, 6, ch.PINCH, workers=1)
    b = ch.apply_channel(x, 1, 2, 6, ch.PINCH, workers=4)
    for k in a.blocks:
        assert a.blocks[k].entries.tobytes() == b.blocks[k].entries.tobytes()


def test_input_checks():
    b = enumerate_sector(2, 3)
    x = BlockOperator(2, {3: SectorOperator.square(b, np.eye(b.dim) / b.dim)})
    with pytest.raises(TruncationError):
        ch.apply_channel(x, 1, 2, 2, ch.PINCH)
    with pytest.raises(StructureError):
        ch.apply_channel(x, 1, 3, 4, ch.PINCH)
    with pytest.raises(StructureError):
        ch.apply_channel(np.eye(2), 1, 2, 4, ch.PINCH)


def test_theorem_one_mode_exact():
    rep = ch.verify_theorem(np.eye(1), [1.0], 2, 10, ch.PINCH)
    assert rep.residual <= 1e-9 and rep.passed


def test_theorem_one_mode_fixed_point_matches_pinch():
    u = haar_unitary(1, 2)
    a = ch.apply_channel(iid_state_fock(u, [0.4], 2, 4), 1, 2, 4, ch.PINCH)
    b = ch.apply_channel(iid_state_fock(u, [0.4], 2, 4), 1, 2, 4, ch.TwirlMethod("fixed_point", tol=1e-10))
    assert a.trace_distance(b) < 1e-7
    rep = ch.verify_theorem(u, [0.4], 3, 3, ch.TwirlMethod("fixed_point"))
    assert rep.passed


def test_lemma2_and_commutation():
    w, ubar = haar_unitary(2, 1), haar_unitary(2, 2)
    assert ch.verify_lemma2(w, ubar, [0.2, 0.5], 2, 4).residual < 1e-8
    with pytest.raises(DomainError):
        ch.verify_lemma2(np.eye(3), ubar, [0.2, 0.5], 2, 4)
    rep = ch.verify_commutation(1, 3, 2, np.eye(1), [0.5], ch.PINCH)
    assert rep.residual <= 1e-12
    with pytest.raises(DomainError):
        ch.verify_commutation(2, 2, 1, ubar, [0.5], ch.PINCH)


def test_commutation_fails_for_non_invariant_operator():
    # a generic B-side operator does not commute with rho^n x 1; guards against a vacuous check
    rng = np.random.default_rng(0)
    r = ch.build_Rnk(2, 2, 1, ch.TwirlMethod("fixed_point"))
    noise = rng.standard_normal(r.op.shape)
    fake = SectorOperator(r.op.basis_row, r.op.basis_col, noise + noise.T)
    rho = iid_state_fock(haar_unitary(2, 4), [0.2, 0.6], 2, 1).block(1).entries
    assert ch.commutation_residual(fake, rho) > 1e-3


def test_sampled_purification_is_gaussian():
    from passive_purify.states import passive_state_fock, standard_purification

    u, v = haar_unitary(2, 1), haar_unitary(2, 2)
    psi = standard_purification(passive_state_fock(u, [0.2, 0.4], 16))
    g = ch.purification_gaussianity(ch.sample_purification(psi, v))
    assert g["max_symplectic_deviation"] < 1e-6
    assert g["mean_photon"] == pytest.approx(1.2, abs=1e-6)
