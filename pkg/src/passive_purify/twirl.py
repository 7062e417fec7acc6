"""Haar averages of operators over passive unitary groups acting on one or both tensor factors.

Operands are square :class:`~passive_purify.fock.SectorOperator` objects on a
joint basis ``A x B`` whose factors are sector (or truncated) bases of
``copies * modes`` modes.  A :class:`GroupSpec` says which factor the sampled
unitary acts on and how it is lifted:

* ``"iid"``: ``u`` in U(m) applied to every copy, ``U_u^{x n}``;
* ``"mixer"``: ``w`` in U(n) mixing the copies, ``U_{w x 1_m}``.

With ``side="both"`` independent elements act on ``A`` and ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError, StructureError
from .fock import FockBasis, SectorOperator
from .interferometer import haar_unitary, lift_on_basis, sample_seed

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100_000
DEFAULT_GENERATORS = 4
DENSE_FACTOR_DIM = 32


@dataclass(frozen=True)
class GroupSpec:
    side: str
    modes: int
    copies: int
    lift: str = "iid"

    def __post_init__(self):
        if self.side not in ("A", "B", "both"):
            raise DomainError(f"side must be 'A', 'B' or 'both', got {self.side!r}")
        if self.lift not in ("iid", "mixer"):
            raise DomainError(f"lift must be 'iid' or 'mixer', got {self.lift!r}")
        if self.modes < 1 or self.copies < 1:
            raise DomainError("modes and copies must be positive")

    @property
    def acts_on(self) -> Tuple[bool, bool]:
        return self.side in ("A", "both"), self.side in ("B", "both")

    def mode_matrix(self, small) -> np.ndarray:
        """Mode transformation on ``copies*modes`` modes for a group label ``small``."""
        if self.lift == "iid":
            return np.kron(np.eye(self.copies), small)
        return np.kron(small, np.eye(self.modes))

    @property
    def label_dim(self) -> int:
        return self.modes if self.lift == "iid" else self.copies


def _factors(x: SectorOperator) -> Tuple[FockBasis, FockBasis]:
    if x.basis_row != x.basis_col:
        raise StructureError("twirls act on square operators with equal row and column bases")
    if not x.basis_row.is_joint:
        raise StructureError("twirls need an operator on a joint A x B basis")
    return x.basis_row.factors


class _Element:
    """One sampled group element, lifted to the factors of a fixed joint basis."""

    __slots__ = ("ua", "ub")

    def __init__(self, ua, ub):
        self.ua = ua
        self.ub = ub

    def inverse(self) -> "_Element":
        return _Element(
            None if self.ua is None else self.ua.conj().T,
            None if self.ub is None else self.ub.conj().T,
        )


def sample_element(g: GroupSpec, factors, seed) -> _Element:
    fa, fb = factors
    rng = np.random.default_rng(seed)
    on_a, on_b = g.acts_on
    ua = ub = None
    if on_a:
        ua = lift_on_basis(g.mode_matrix(haar_unitary(g.label_dim, rng)), fa)
    if on_b:
        ub = lift_on_basis(g.mode_matrix(haar_unitary(g.label_dim, rng)), fb)
    return _Element(ua, ub)


def conjugate(x4: np.ndarray, el: _Element) -> np.ndarray:
    """``(ua x ub) X (ua x ub)^dag`` for ``X`` reshaped to ``(dA, dB, dA, dB)``."""
    da, db = x4.shape[0], x4.shape[1]
    y = x4
    if el.ua is not None:
        y = (el.ua @ y.reshape(da, -1)).reshape(da * db, da, db)
        y = np.matmul(el.ua.conj(), y)
    if el.ub is not None:
        y = np.matmul(el.ub, y.reshape(da, db, da * db))
        y = y.reshape(-1, db) @ el.ub.conj().T
    return y.reshape(da, db, da, db)


def _as4(x: SectorOperator):
    fa, fb = _factors(x)
    return x.entries.reshape(fa.dim, fb.dim, fa.dim, fb.dim), fa.dim * fb.dim


def invariance_residual(x: SectorOperator, g: GroupSpec, elements: int = 20, seed: int = 0) -> float:
    """max over fresh sampled elements of ``||U X U^dag - X||_F / ||X||_F``."""
    x4, d = _as4(x)
    scale = max(np.linalg.norm(x.entries), 1e-300)
    factors = _factors(x)
    worst = 0.0
    for i in range(elements):
        el = sample_element(g, factors, sample_seed(seed, 1_000_000 + i))
        worst = max(worst, float(np.linalg.norm(conjugate(x4, el) - x4) / scale))
    return worst


@dataclass(frozen=True)
class MCTwirl:
    estimate: SectorOperator
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    samples: int


def mc_twirl(x: SectorOperator, g: GroupSpec, samples: int, seed: int) -> MCTwirl:
    """Monte Carlo Haar average with entrywise standard errors.

    Sample ``i`` uses the seed ``sample_seed(seed, i)``; each conjugated sample
    is symmetrised to its Hermitian part when the input is Hermitian.
    """
    if samples < 2:
        raise DomainError("need at least two samples for error bars")
    x4, d = _as4(x)
    factors = _factors(x)
    hermitian = np.allclose(x.entries, x.entries.conj().T, atol=1e-14)
    acc = np.zeros((d, d), dtype=complex)
    acc_re2 = np.zeros((d, d))
    acc_im2 = np.zeros((d, d))
    for i in range(samples):
        el = sample_element(g, factors, sample_seed(seed, i))
        y = conjugate(x4, el).reshape(d, d)
        if hermitian:
            y = 0.5 * (y + y.conj().T)
        acc += y
        acc_re2 += y.real ** 2
        acc_im2 += y.imag ** 2
    mean = acc / samples
    var_re = np.clip(acc_re2 / samples - mean.real ** 2, 0.0, None) * samples / (samples - 1)
    var_im = np.clip(acc_im2 / samples - mean.imag ** 2, 0.0, None) * samples / (samples - 1)
    est = SectorOperator(x.basis_row, x.basis_col, mean)
    return MCTwirl(est, np.sqrt(var_re / samples), np.sqrt(var_im / samples), samples)


def _generators(g: GroupSpec, factors, count: int, seed: int) -> List[_Element]:
    els = [sample_element(g, factors, sample_seed(seed, i)) for i in range(count)]
    return els + [e.inverse() for e in els]


def _superop(mats) -> np.ndarray:
    """Hermitian average of ``U x conj(U)`` over a symmetric generating set."""
    d = mats[0].shape[0]
    out = np.zeros((d * d, d * d), dtype=complex)
    for u in mats:
        out += np.kron(u, u.conj())
    return out / len(mats)


def _fixed_projector(mats, gap_tol: float = 1e-9) -> np.ndarray:
    w, v = np.linalg.eigh(_superop(mats))
    keep = v[:, w > 1 - gap_tol]
    return keep @ keep.conj().T


@dataclass(frozen=True)
class FixedPointTwirl:
    result: SectorOperator
    iterations: int
    residual: float
    engine: str


def fixed_point_twirl(
    x: SectorOperator,
    g: GroupSpec,
    gens: int = DEFAULT_GENERATORS,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    engine: str = "auto",
) -> FixedPointTwirl:
    """Deterministic Haar twirl: projection onto the fixed space of ``gens`` sampled generators.

    ``engine="iterate"`` repeats ``X <- T(X)`` with ``T`` the average of
    conjugations by the generators and their inverses until
    ``||T(X) - X||_F <= tol * ||X||_F``.  ``engine="dense"`` builds ``T`` on each
    acted factor and projects onto its eigenvalue-one eigenspace.  ``"auto"``
    picks ``dense`` when every acted factor has dimension at most 32.
    """
    if gens < 2:
        raise DomainError("need at least two generators")
    fa, fb = _factors(x)
    on_a, on_b = g.acts_on
    if engine == "auto":
        dims = [f.dim for f, on in ((fa, on_a), (fb, on_b)) if on]
        engine = "dense" if max(dims) <= DENSE_FACTOR_DIM else "iterate"
    els = _generators(g, (fa, fb), gens, seed)
    x4, d = _as4(x)

    if engine == "dense":
        y = x4
        if on_a:
            p = _fixed_projector([e.ua for e in els])
            z = np.transpose(y, (1, 3, 0, 2)).reshape(-1, fa.dim ** 2)
            y = np.transpose((z @ p.T).reshape(fb.dim, fb.dim, fa.dim, fa.dim), (2, 0, 3, 1))
        if on_b:
            p = _fixed_projector([e.ub for e in els])
            z = np.transpose(y, (0, 2, 1, 3)).reshape(-1, fb.dim ** 2)
            y = np.transpose((z @ p.T).reshape(fa.dim, fa.dim, fb.dim, fb.dim), (0, 2, 1, 3))
        out = np.ascontiguousarray(y).reshape(d, d)
        step = sum(conjugate(y, e) for e in els) / len(els)
        residual = float(np.linalg.norm(step.reshape(d, d) - out) / max(np.linalg.norm(x.entries), 1e-300))
        return FixedPointTwirl(SectorOperator(x.basis_row, x.basis_col, out), 1, residual, "dense")

    if engine != "iterate":
        raise DomainError(f"unknown twirl engine {engine!r}")
    scale = max(np.linalg.norm(x.entries), 1e-300)
    y = x4
    residual = np.inf
    for it in range(1, max_iter + 1):
        nxt = sum(conjugate(y, e) for e in els) / len(els)
        residual = float(np.linalg.norm(nxt - y) / scale)
        y = nxt
        if residual <= tol:
            out = y.reshape(d, d)
            return FixedPointTwirl(SectorOperator(x.basis_row, x.basis_col, out), it, residual, "iterate")
    raise ConvergenceError(f"twirl did not converge in {max_iter} iterations", residual)


def pinch_twirl_m1(x: SectorOperator) -> SectorOperator:
    """Twirl over phases on ``B``: drop coherences between different ``B`` photon numbers.

    For one mode per copy this is the full i.i.d. passive twirl on ``B``.
    """
    fa, fb = _factors(x)
    nb = fb.totals()
    mask = nb[:, None] == nb[None, :]
    full = np.tile(mask, (fa.dim, fa.dim))
    return SectorOperator(x.basis_row, x.basis_col, np.where(full, x.entries, 0))


def twirl(x: SectorOperator, g: GroupSpec, method: str = "fixed_point", **kw) -> SectorOperator:
    """Dispatch to one of the twirl engines and return the averaged operator."""
    if method == "pinch":
        if g.modes != 1 or g.lift != "iid" or g.side != "B":
            raise DomainError("the pinching twirl is exact only for m = 1 on the B side")
        return pinch_twirl_m1(x)
    if method == "fixed_point":
        return fixed_point_twirl(x, g, **kw).result
    if method == "mc":
        return mc_twirl(x, g, **kw).estimate
    raise DomainError(f"unknown twirl method {method!r}")


@dataclass(frozen=True)
class SpanCheck:
    residual: float
    rank: int
    samples: int
    commute_residual: float


def commutant_span_check(
    a: SectorOperator,
    modes: int,
    copies: int,
    max_samples: int = 2000,
    seed: int = 0,
    tol: float = 1e-6,
    rank_tol: float = 1e-10,
    batch: int = 10,
) -> SpanCheck:
    """Distance of ``a`` from the span of products of copy-mixing lifts on ``A`` and ``B``.

    ``a`` must commute with independent i.i.d. passive unitaries on both factors
    (checked on sampled elements, relative residual at most ``tol``).  Span
    elements are sampled in batches until a batch adds no rank.
    """
    iid = GroupSpec("both", modes, copies, "iid")
    comm = invariance_residual(a, iid, elements=10, seed=seed + 7)
    if comm > tol:
        raise DomainError(f"operator does not commute with the i.i.d. action (residual {comm:.3e})")
    mixer = GroupSpec("both", modes, copies, "mixer")
    factors = _factors(a)
    target = a.entries.ravel()
    rows: List[np.ndarray] = []
    rank = 0
    basis = np.zeros((0, target.size), dtype=complex)
    n = 0
    while n < max_samples:
        for _ in range(batch):
            el = sample_element(mixer, factors, sample_seed(seed, n))
            rows.append(np.kron(el.ua, el.ub).ravel())
            n += 1
        _, s, vh = np.linalg.svd(np.array(rows), full_matrices=False)
        new_rank = int((s > rank_tol * s[0]).sum())
        basis = vh[:new_rank]
        if new_rank == rank:
            break
        rank = new_rank
    proj = basis.T @ (basis.conj() @ target)
    scale = max(np.linalg.norm(target), 1e-300)
    return SpanCheck(float(np.linalg.norm(target - proj) / scale), rank, n, comm)
