"""Desk-scale acceptance suite.

Each ``criterion_*`` function runs one group of checks and returns a list of
:class:`~passive_purify.report.VerificationReport`.  :func:`run_suite` runs
them all from a single master seed; the CLI ``all`` command and the acceptance
tests both call it.
"""

from __future__ import annotations

import time
from math import comb, fsum
from typing import Callable, Dict, List

import numpy as np

from . import channel as ch
from .fock import SectorOperator, enumerate_sector, enumerate_truncated, joint_basis
from .howe import howe_identity_check
from .interferometer import haar_unitary, sample_seed, sym_power, unitarity_residual
from .report import VerificationReport
from .states import (
    passive_state_fock,
    purification_via_lemma1,
    random_psd_blocks,
    standard_purification,
    tmsv_fock,
)
from .symplectic import cov_from_fock, mean_photon_cov, tmsv_cov
from .twirl import GroupSpec, commutant_span_check, fixed_point_twirl, mc_twirl, pinch_twirl_m1

FIXED = ch.TwirlMethod("fixed_point", tol=1e-8)


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(sample_seed(seed, tag))


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def random_hermitian(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def criterion_howe(seed: int = 0) -> List[VerificationReport]:
    start = time.perf_counter()
    mismatches = []
    rows = 0
    for m in range(1, 4):
        for n in range(1, 4):
            for big_n in range(7):
                row = howe_identity_check(m, n, big_n)
                rows += 1
                if not row.equal or row.rhs != comb(big_n + n * m - 1, n * m - 1):
                    mismatches.append([m, n, big_n, row.lhs, row.rhs])
    hand = howe_identity_check(2, 3, 4)
    elapsed = time.perf_counter() - start
    return [
        VerificationReport("C1 howe dimension identity", {"m<=": 3, "n<=": 3, "N<=": 6},
                           float(len(mismatches)), 0.0,
                           details={"rows": rows, "mismatches": mismatches}, wall_time=elapsed),
        VerificationReport("C1 howe (m,n,N)=(2,3,4) equals 126", {"m": 2, "n": 3, "N": 4},
                           float(abs(hand.lhs - 126) + abs(hand.rhs - 126)), 0.0,
                           details=hand.as_dict()),
    ]


def criterion_interferometer(seed: int = 0, pairs: int = 20) -> List[VerificationReport]:
    start = time.perf_counter()
    worst_unit = worst_hom = 0.0
    for i in range(pairs):
        rng = _rng(seed, 200 + i)
        m = 1 + i % 3
        u, v = haar_unitary(m, rng), haar_unitary(m, rng)
        for big_n in range(5):
            su, sv, suv = (sym_power(x, big_n).entries for x in (u, v, u @ v))
            worst_unit = max(worst_unit, unitarity_residual(su))
            worst_hom = max(worst_hom, float(np.linalg.norm(su @ sv - suv)))
    bs = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    sector = enumerate_sector(2, 2)
    i11 = sector.index_of[(1, 1)]
    hom = abs(sym_power(bs, 2).entries[i11, i11])
    elapsed = time.perf_counter() - start
    params = {"pairs": pairs, "m<=": 3, "N<=": 4}
    return [
        VerificationReport("C2 symmetric power unitarity", params, worst_unit, 1e-10, seed=seed),
        VerificationReport("C2 symmetric power homomorphism", params, worst_hom, 1e-10, seed=seed,
                           wall_time=elapsed),
        VerificationReport("C2 Hong-Ou-Mandel amplitude", {}, hom, 1e-12),
    ]


def criterion_lemma1(seed: int = 0, cutoff: int = 8) -> List[VerificationReport]:
    out = []
    for m, nus in ((1, [0.5]), (2, [0.2, 0.5])):
        u = haar_unitary(m, _rng(seed, 300 + m))
        rho = passive_state_fock(u, nus, cutoff)
        a = standard_purification(rho)
        b = purification_via_lemma1(u, nus, cutoff)
        fid = abs(a.overlap(b)) / np.sqrt(a.norm_squared() * b.norm_squared())
        out.append(VerificationReport(
            f"C3 purification routes agree (m={m})", {"m": m, "nus": nus, "K": cutoff},
            max(0.0, 1.0 - fid), 1e-8, seed=seed, details={"raw_overlap": abs(a.overlap(b))}))
        n_psi = mean_photon_cov(cov_from_fock(a.vectors()))
        n_rho = mean_photon_cov(cov_from_fock(rho.blocks))
        tail = 2 * ch.photon_tail(nus, 1, cutoff)
        params = {"m": m, "nus": nus, "K": cutoff}
        out.append(VerificationReport(
            f"C3 photon doubling against untruncated value (m={m})", params,
            abs(n_psi - 2 * fsum(nus)), 1e-10, tail, seed=seed,
            details={"mean_photon_psi": n_psi, "mean_photon_rho": n_rho}))
        out.append(VerificationReport(
            f"C3 photon doubling within the truncation (m={m})", params,
            abs(n_psi - 2 * n_rho), 1e-10, seed=seed))
    worst = 0.0
    for nu in (0.0, 0.2, 0.5, 1.0, 3.0):
        worst = max(worst, abs(mean_photon_cov(tmsv_cov(nu)) - 2 * nu))
    out.append(VerificationReport("C3 covariance-level doubling for TMSV", {"nus": [0, 0.2, 0.5, 1, 3]},
                                  worst, 1e-12))
    nu = 0.2
    gap = float(np.abs(cov_from_fock(tmsv_fock(nu, 20).vectors()).cov - tmsv_cov(nu).cov).max())
    out.append(VerificationReport("C3 TMSV Fock moments match covariance", {"nu": nu, "K": 20},
                                  gap, 1e-10))
    return out


def criterion_lemma2(seed: int = 0, trials: int = 5) -> List[VerificationReport]:
    out = []
    nus, m, n, cutoff = [0.2, 0.5], 2, 2, 6
    for t in range(trials):
        rng = _rng(seed, 400 + t)
        w = haar_unitary(n, rng)
        ubar = haar_unitary(m, rng)
        rep = ch.verify_lemma2(w, ubar, nus, n, cutoff)
        rep.check = f"C4 i.i.d. state invariant under copy mixing (trial {t})"
        rep.seed = seed
        out.append(rep)
    return out


def criterion_lemma7(seed: int = 0) -> List[VerificationReport]:
    out = []
    m, n, nus = 2, 2, [0.2, 0.4]
    u = haar_unitary(m, _rng(seed, 500))
    method = ch.TwirlMethod("fixed_point", tol=1e-8, seed=seed, engine="iterate")
    for k in range(3):
        rep = ch.verify_commutation(m, n, k, u, nus, method, tolerance=1e-6)
        rep.check = f"C5 R commutes with rho^n (m=2, n=2, k={k})"
        out.append(rep)
    for k in range(5):
        rep = ch.verify_commutation(1, 2, k, np.eye(1), [1.0], ch.PINCH, tolerance=1e-12)
        rep.check = f"C5 R commutes with rho^n (m=1, n=2, k={k}, pinching)"
        out.append(rep)
    return out


def criterion_theorem(seed: int = 0) -> List[VerificationReport]:
    r1 = ch.verify_theorem(np.eye(1), [1.0], 2, 10, ch.PINCH, tolerance=1e-9)
    r1.check = "C6 channel output equals twirled purification (m=1, n=2, nu=1, K=10)"
    u = haar_unitary(2, _rng(seed, 600))
    method = ch.TwirlMethod("fixed_point", tol=1e-8, seed=seed)
    r2 = ch.verify_theorem(u, [0.2, 0.4], 2, 4, method, tolerance=1e-6)
    r2.check = "C6 channel output equals twirled purification (m=2, n=2, nu=(0.2,0.4), K=4)"
    out = [r1, r2]
    nus, cutoff = [0.2, 0.4], 16
    rho = passive_state_fock(u, nus, cutoff)
    psi = standard_purification(rho)
    dev = doub = 0.0
    for i in range(3):
        g = ch.purification_gaussianity(ch.sample_purification(psi, haar_unitary(2, _rng(seed, 650 + i))))
        dev = max(dev, g["max_symplectic_deviation"])
        doub = max(doub, abs(g["mean_photon"] - 2 * fsum(nus)))
    params = {"m": 2, "nus": nus, "K": cutoff, "samples": 3}
    out.append(VerificationReport("C6 purification samples are pure Gaussian (symplectic spectrum)",
                                  params, dev, 1e-6, seed=seed))
    out.append(VerificationReport("C6 purification samples double the photon number", params,
                                  doub, 1e-10, 2 * ch.photon_tail(nus, 1, cutoff), seed=seed))
    return out


def criterion_trace(seed: int = 0, inputs: int = 10) -> List[VerificationReport]:
    out = []
    configs = [(1, 2, 10, ch.PINCH), (2, 2, 4, ch.TwirlMethod("fixed_point", tol=1e-8, seed=seed))]
    for ci, (m, n, cutoff, method) in enumerate(configs):
        worst = 0.0
        min_eig = np.inf
        for i in range(inputs):
            x = random_psd_blocks(m * n, cutoff, _rng(seed, 700 + 100 * ci + i))
            y = ch.apply_channel(x, m, n, cutoff, method)
            worst = max(worst, abs(y.trace - x.trace()))
            min_eig = min(min_eig, y.min_eigenvalue())
        out.append(VerificationReport(
            f"C7 trace preservation (m={m}, n={n}, K={cutoff})",
            {"m": m, "n": n, "K": cutoff, "inputs": inputs, "method": method.describe()},
            worst, 1e-9, seed=seed, details={"min_output_eigenvalue": min_eig}))
    return out


def _zscore(est, se_re, se_im, ref, floor=1e-12) -> float:
    d = est - ref
    z_re = np.abs(d.real) / (se_re + floor)
    z_im = np.abs(d.imag) / (se_im + floor)
    return float(max(z_re.max(), z_im.max()))


def criterion_twirl(seed: int = 0, samples: int = 10_000, inputs: int = 5) -> List[VerificationReport]:
    out = []
    worst_z = 0.0
    worst_idem = 0.0
    worst_pinch = 0.0
    tol = 1e-8
    for i in range(inputs):
        rng = _rng(seed, 800 + i)
        if i % 2 == 0:
            # one mode per copy, B truncated so that the phase twirl acts nontrivially
            m, n = 1, 2
            basis = joint_basis(enumerate_sector(2, 1), enumerate_truncated(2, 2))
        else:
            m, n = 2, 2
            basis = joint_basis(enumerate_sector(4, 1), enumerate_sector(4, 1))
        g = GroupSpec("B", m, n, "iid")
        x = SectorOperator.square(basis, random_hermitian(basis.dim, rng))
        det = fixed_point_twirl(x, g, tol=tol, seed=seed + i, engine="iterate")
        mc = mc_twirl(x, g, samples, seed=seed + 1000 + i)
        worst_z = max(worst_z, _zscore(mc.estimate.entries, mc.stderr_re, mc.stderr_im,
                                       det.result.entries))
        again = fixed_point_twirl(det.result, g, tol=tol, seed=seed + i, engine="iterate")
        worst_idem = max(worst_idem, float(np.linalg.norm(again.result.entries - det.result.entries)
                                           / np.linalg.norm(x.entries)))
        if m == 1:
            worst_pinch = max(worst_pinch, float(np.abs(det.result.entries
                                                         - pinch_twirl_m1(x).entries).max()))
    out.append(VerificationReport("C8 Monte Carlo twirl within 4 standard errors of deterministic twirl",
                                  {"samples": samples, "inputs": inputs}, worst_z, 4.0, seed=seed))
    out.append(VerificationReport("C8 deterministic twirl idempotence", {"tol": tol},
                                  worst_idem, 2 * tol, seed=seed))
    out.append(VerificationReport("C8 deterministic twirl matches pinching oracle (m=1)", {"tol": tol},
                                  worst_pinch, 1e-6, seed=seed))
    for m in (1, 2, 3):
        vals = np.array([abs(haar_unitary(m, sample_seed(seed + 50 + m, s))[0, 0]) ** 2
                         for s in range(samples)])
        sigma = vals.std(ddof=1) / np.sqrt(samples)
        out.append(VerificationReport(f"C8 Haar second moment E|u11|^2 = 1/m (m={m})",
                                      {"m": m, "samples": samples},
                                      abs(vals.mean() - 1 / m), 4 * sigma + 1e-12, seed=seed,
                                      details={"mean": vals.mean(), "sigma": sigma}))
    return out


def criterion_span(seed: int = 0) -> List[VerificationReport]:
    out = []
    m, n = 2, 2
    both = GroupSpec("both", m, n, "iid")
    for k in range(3):
        basis = enumerate_sector(m * n, k)
        jb = joint_basis(basis, basis)
        x = SectorOperator.square(jb, random_hermitian(jb.dim, _rng(seed, 900 + k)))
        a = fixed_point_twirl(x, both, tol=1e-10, seed=seed + k).result
        res = commutant_span_check(a, m, n, seed=seed + 10 * k)
        out.append(VerificationReport(
            f"C9 twirled operator lies in copy-mixer span (k={k})", {"m": m, "n": n, "k": k},
            res.residual, 1e-6, seed=seed,
            details={"rank": res.rank, "samples": res.samples, "commute_residual": res.commute_residual}))
    return out


CRITERIA: Dict[str, Callable[[int], List[VerificationReport]]] = {
    "C1": criterion_howe,
    "C2": criterion_interferometer,
    "C3": criterion_lemma1,
    "C4": criterion_lemma2,
    "C5": criterion_lemma7,
    "C6": criterion_theorem,
    "C7": criterion_trace,
    "C8": criterion_twirl,
    "C9": criterion_span,
}


def run_suite(seed: int = 0, only=None, progress=None) -> List[VerificationReport]:
    reports: List[VerificationReport] = []
    for name, fn in CRITERIA.items():
        if only and name not in only:
            continue
        start = time.perf_counter()
        batch = fn(seed)
        elapsed = time.perf_counter() - start
        for r in batch:
            if r.wall_time is None:
                r.wall_time = elapsed
        if progress:
            progress(name, batch, elapsed)
        reports.extend(batch)
    return reports
