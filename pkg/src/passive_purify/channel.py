"""Random purification channel for i.i.d. passive Gaussian inputs.

For ``n`` copies of an ``m``-mode system the channel is

    X  ->  sum_k  sqrt(R_k) (X x 1_{B^n}) sqrt(R_k),

where ``R_k`` is the Haar average over ``u`` in U(m) of the rank-one operator
``|gamma_k><gamma_k|`` conjugated by ``U_u^{x n}`` on the ``B^n`` side and
``gamma_k`` is the maximally entangled vector on the ``k``-photon sector of
``A^n``.  ``R_k`` lives on the product of the ``k``-photon sectors of ``A^n``
and ``B^n``, so every term is computed on that block alone.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import fsum
from typing import Dict, Optional

import numpy as np

from .errors import DomainError, StructureError, TruncationError
from .fock import (
    BlockOperator,
    SectorOperator,
    enumerate_sector,
    joint_basis,
    partial_trace_B,
)
from .interferometer import lift_copy_mixer, sym_power
from .linalg import psd_clip, psd_sqrt_matrix, trace_norm
from .report import VerificationReport
from .states import (
    PureVector,
    TruncatedState,
    gamma_vector,
    iid_state_fock,
    n_fold_product,
    passive_state_fock,
    standard_purification,
    total_photon_pmf,
)
from .symplectic import cov_from_fock, mean_photon_cov, symplectic_eigenvalues
from .twirl import GroupSpec, fixed_point_twirl, mc_twirl, pinch_twirl_m1

CLIP_TOL = 1e-10


@dataclass(frozen=True)
class TwirlMethod:
    """How Haar averages are evaluated.

    ``kind`` is ``"pinch"`` (exact, one mode per copy only), ``"fixed_point"``
    (deterministic, see :func:`~passive_purify.twirl.fixed_point_twirl`) or
    ``"mc"`` (Monte Carlo with ``samples`` draws).
    """

    kind: str = "fixed_point"
    tol: float = 1e-8
    seed: int = 0
    samples: int = 10_000
    gens: int = 4
    engine: str = "auto"

    def __post_init__(self):
        if self.kind not in ("pinch", "fixed_point", "mc"):
            raise DomainError(f"unknown twirl method {self.kind!r}")

    def describe(self) -> dict:
        if self.kind == "pinch":
            return {"kind": "pinch"}
        if self.kind == "mc":
            return {"kind": "mc", "samples": self.samples, "seed": self.seed}
        return {"kind": "fixed_point", "tol": self.tol, "seed": self.seed,
                "gens": self.gens, "engine": self.engine}


PINCH = TwirlMethod("pinch")


def _b_twirl(x: SectorOperator, m: int, n: int, method: TwirlMethod):
    """Twirl over ``1_{A^n} x U_u^{x n}``; returns (operator, residual or max stderr)."""
    g = GroupSpec("B", m, n, "iid")
    if method.kind == "pinch":
        if m != 1:
            raise DomainError("pinching is the exact twirl only for one mode per copy")
        return pinch_twirl_m1(x), 0.0
    if method.kind == "mc":
        res = mc_twirl(x, g, method.samples, method.seed)
        return res.estimate, float(max(res.stderr_re.max(), res.stderr_im.max()))
    res = fixed_point_twirl(x, g, gens=method.gens, tol=method.tol, seed=method.seed,
                            engine=method.engine)
    return res.result, res.residual


@dataclass(frozen=True)
class RnkOperator:
    m: int
    n: int
    k: int
    op: SectorOperator
    method: TwirlMethod
    twirl_residual: float
    clipped: float

    @property
    def dim(self) -> int:
        return self.op.shape[0]


@lru_cache(maxsize=64)
def build_Rnk(m: int, n: int, k: int, method: TwirlMethod = TwirlMethod()) -> RnkOperator:
    """Haar-averaged projected maximally entangled operator on the ``k``-photon block."""
    if k < 0:
        raise DomainError("photon number must be nonnegative")
    gamma = gamma_vector(m, n, k).projector()
    avg, resid = _b_twirl(gamma, m, n, method)
    fixed, clipped = psd_clip(avg.entries, tol=np.inf)
    op = SectorOperator(avg.basis_row, avg.basis_col, fixed)
    return RnkOperator(m, n, k, op, method, resid, clipped)


def psd_sqrt(x: SectorOperator, tol: float = CLIP_TOL) -> SectorOperator:
    root, _ = psd_sqrt_matrix(x.entries, tol)
    return SectorOperator(x.basis_row, x.basis_col, root)


@lru_cache(maxsize=64)
def _sqrt_R(m, n, k, method):
    r = build_Rnk(m, n, k, method)
    return psd_sqrt(r.op, tol=np.inf)


@dataclass(frozen=True)
class ChannelOutput:
    """Output blocks on ``A^n B^n``; block ``k`` lives on the product of ``k``-photon sectors."""

    blocks: Dict[int, SectorOperator]
    contributions: Dict[int, float]
    truncation_bound: float = 0.0
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def trace(self) -> float:
        return fsum(self.contributions.values())

    def min_eigenvalue(self) -> float:
        return min(b.min_eigenvalue() for b in self.blocks.values())

    def trace_distance(self, other: "ChannelOutput") -> float:
        total = []
        for k in sorted(set(self.blocks) | set(other.blocks)):
            a = self.blocks.get(k)
            b = other.blocks.get(k)
            if a is None:
                total.append(0.5 * trace_norm(b.entries))
            elif b is None:
                total.append(0.5 * trace_norm(a.entries))
            else:
                if a.basis_row != b.basis_row:
                    raise StructureError(f"block {k} bases differ")
                total.append(0.5 * trace_norm(a.entries - b.entries))
        return fsum(total)


def _workers(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get("PASSIVE_PURIFY_THREADS", "1")))


def _ordered_map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def apply_channel(
    x,
    m: int,
    n: int,
    cutoff: int,
    method: TwirlMethod = TwirlMethod(),
    workers: Optional[int] = None,
) -> ChannelOutput:
    """Apply the channel to a photon-number block-diagonal operator on ``A^n``.

    ``x`` is a :class:`TruncatedState` or :class:`BlockOperator` on ``n*m``
    modes.  Blocks above ``cutoff`` carrying weight raise
    :class:`TruncationError`.
    """
    deficit = 0.0
    if isinstance(x, TruncatedState):
        deficit = x.trace_deficit
        x = x.blocks
    if not isinstance(x, BlockOperator):
        raise StructureError("apply_channel expects a block-diagonal operator")
    if x.modes != m * n:
        raise StructureError(f"input has {x.modes} modes, expected {m * n}")
    excess = fsum(abs(b.trace()) for k, b in x.blocks.items() if k > cutoff)
    if excess > 0:
        raise TruncationError(f"input has weight {excess:.3e} above the cutoff {cutoff}", excess)

    ks = [k for k in range(cutoff + 1) if k in x.blocks]

    def term(k):
        root = _sqrt_R(m, n, k, method).entries
        xk = x.blocks[k].entries
        d = xk.shape[0]
        out = root @ np.kron(xk, np.eye(d)) @ root
        return SectorOperator.square(joint_basis(x.blocks[k].basis_row, enumerate_sector(m * n, k)), out)

    outs = _ordered_map(term, ks, _workers(workers))
    blocks = dict(zip(ks, outs))
    contrib = {k: float(b.trace().real) for k, b in blocks.items()}
    return ChannelOutput(blocks, contrib, deficit)


def thermal_tail(nus, n: int, cutoff: int) -> float:
    """Probability that ``n`` copies of the product thermal state carry more than ``cutoff`` photons."""
    return max(0.0, 1.0 - fsum(total_photon_pmf(nus, n, cutoff)))


def photon_tail(nus, n: int, cutoff: int) -> float:
    """Mean photon number carried by the sectors above ``cutoff``: E[N; N > cutoff]."""
    pmf = total_photon_pmf(nus, n, cutoff)
    mean = n * fsum(np.atleast_1d(nus))
    return max(0.0, mean - fsum(np.arange(cutoff + 1) * pmf))


def rhs_theorem(u, nus, n: int, cutoff: int, method: TwirlMethod = TwirlMethod(),
                workers: Optional[int] = None) -> ChannelOutput:
    """Haar average of ``((1 x U_u) psi_rho (1 x U_u^dag))^{x n}`` with ``psi_rho`` the standard purification.

    The average contains the global phases ``e^{i phi N_B}``, which remove every
    coherence between different photon numbers of ``B^n`` (equal to those of
    ``A^n`` here), so only the diagonal blocks of the n-fold product are twirled.
    """
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    m = len(nus)
    rho = passive_state_fock(u, nus, cutoff)
    psi_n = n_fold_product(standard_purification(rho), n)
    ks = sorted(psi_n.sectors)

    def term(k):
        out, _ = _b_twirl(psi_n.sectors[k].projector(), m, n, method)
        return out

    outs = _ordered_map(term, ks, _workers(workers))
    blocks = dict(zip(ks, outs))
    contrib = {k: float(b.trace().real) for k, b in blocks.items()}
    return ChannelOutput(blocks, contrib, psi_n.norm_deficit)


def sample_purification(psi: PureVector, v) -> PureVector:
    """``(1 x U_v)`` applied to a purification, sector by sector."""
    sectors = {}
    for k, vec in psi.sectors.items():
        mat = psi.matrix(k) @ sym_power(v, k).entries.T
        sectors[k] = type(vec)(vec.basis, mat.ravel())
    return PureVector(psi.modes_a, psi.modes_b, sectors, psi.norm_deficit)


def _default_tolerance(method: TwirlMethod, exact: float, deterministic: float) -> float:
    if method.kind == "pinch":
        return exact
    if method.kind == "fixed_point":
        return deterministic
    return 10.0 / np.sqrt(method.samples)


def verify_theorem(u, nus, n: int, cutoff: int, method: TwirlMethod = TwirlMethod(),
                   tolerance: Optional[float] = None, workers: Optional[int] = None) -> VerificationReport:
    """Trace distance between the channel applied to ``rho^{x n}`` and the twirled purification."""
    start = time.perf_counter()
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    m = len(nus)
    rho_n = iid_state_fock(u, nus, n, cutoff)
    lhs = apply_channel(rho_n, m, n, cutoff, method, workers)
    rhs = rhs_theorem(u, nus, n, cutoff, method, workers)
    dist = lhs.trace_distance(rhs)
    tol = _default_tolerance(method, 1e-9, 1e-6) if tolerance is None else tolerance
    return VerificationReport(
        "theorem",
        {"m": m, "n": n, "K": cutoff, "nus": nus.tolist(), "method": method.describe()},
        dist,
        tol,
        thermal_tail(nus, n, cutoff),
        seed=method.seed if method.kind != "pinch" else None,
        details={"trace_lhs": lhs.trace, "trace_rhs": rhs.trace,
                 "min_eig_lhs": lhs.min_eigenvalue()},
        wall_time=time.perf_counter() - start,
    )


def sector_invariance_residual(state: TruncatedState, lift) -> float:
    """Sum over sectors of ``||L_k rho_k L_k^dag - rho_k||_1`` for a sector lift ``k -> L_k``."""
    total = []
    for k, blk in state.blocks.blocks.items():
        lk = lift(k)
        total.append(trace_norm(lk @ blk.entries @ lk.conj().T - blk.entries))
    return fsum(total)


def verify_lemma2(w, ubar, nus, n: int, cutoff: int, tolerance: float = 1e-8) -> VerificationReport:
    """Invariance of ``rho^{x n}`` under a copy-mixing passive unitary ``w`` in U(n)."""
    start = time.perf_counter()
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    m = len(nus)
    w = np.asarray(w, dtype=complex)
    if w.shape != (n, n):
        raise DomainError(f"copy-mixing unitary must be {n}x{n}")
    state = iid_state_fock(ubar, nus, n, cutoff)
    resid = sector_invariance_residual(state, lambda k: lift_copy_mixer(w, m, k).entries)
    return VerificationReport(
        "lemma-invariance",
        {"m": m, "n": n, "K": cutoff, "nus": nus.tolist()},
        resid,
        tolerance,
        0.0,
        wall_time=time.perf_counter() - start,
    )


def commutation_residual(r: SectorOperator, rho_k: np.ndarray) -> float:
    """``||[R, rho_k x 1]||_F / ||R||_F`` on a ``k``-photon block."""
    fa, fb = r.basis_row.factors
    big = np.kron(rho_k, np.eye(fb.dim))
    comm = r.entries @ big - big @ r.entries
    return float(np.linalg.norm(comm) / max(np.linalg.norm(r.entries), 1e-300))


def verify_commutation(m: int, n: int, k: int, u, nus, method: TwirlMethod = TwirlMethod(),
                       tolerance: Optional[float] = None, rho_block=None) -> VerificationReport:
    """``R_k`` commutes with the ``k``-photon block of ``rho^{x n} x 1``."""
    start = time.perf_counter()
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    if len(nus) != m:
        raise DomainError("need one mean photon number per mode")
    r = build_Rnk(m, n, k, method)
    if rho_block is None:
        rho_block = iid_state_fock(u, nus, n, k).block(k).entries
    resid = commutation_residual(r.op, np.asarray(rho_block))
    tol = _default_tolerance(method, 1e-12, 1e-6) if tolerance is None else tolerance
    return VerificationReport(
        "lemma-commute",
        {"m": m, "n": n, "k": k, "nus": nus.tolist(), "method": method.describe()},
        resid,
        tol,
        0.0,
        seed=method.seed if method.kind != "pinch" else None,
        details={"twirl_residual": r.twirl_residual, "clipped": r.clipped},
        wall_time=time.perf_counter() - start,
    )


def trace_identity_residual(r: RnkOperator) -> float:
    """``||Tr_B R_k - 1_k||_F``."""
    pt = partial_trace_B(r.op).entries
    return float(np.linalg.norm(pt - np.eye(pt.shape[0])))


def purification_gaussianity(psi: PureVector) -> Dict[str, float]:
    """Largest deviation of the symplectic spectrum from one, and the mean photon number."""
    cov = cov_from_fock(psi.vectors())
    nu = symplectic_eigenvalues(cov.cov)
    return {"max_symplectic_deviation": float(np.abs(nu - 1).max()),
            "mean_photon": mean_photon_cov(cov)}
