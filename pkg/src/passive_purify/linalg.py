"""Dense Hermitian helpers shared by the state and channel modules."""

import numpy as np

from .errors import NotPSDError


def hermitian_part(x):
    x = np.asarray(x)
    return 0.5 * (x + x.conj().T)


def psd_sqrt_matrix(x, tol: float = 1e-10):
    """Square root of a Hermitian PSD matrix; eigenvalues in ``[-tol, 0)`` are clipped.

    Returns the root and the largest clipped magnitude.
    """
    w, v = np.linalg.eigh(hermitian_part(x))
    if w.size and w[0] < -tol:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} below -{tol:g}", float(w[0]))
    clipped = float(-w[0]) if w.size and w[0] < 0 else 0.0
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return root, clipped


def psd_clip(x, tol: float = 1e-10):
    """Project a nearly-PSD Hermitian matrix onto the PSD cone; returns (matrix, clipped mass)."""
    w, v = np.linalg.eigh(hermitian_part(x))
    if w.size and w[0] < -tol:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} below -{tol:g}", float(w[0]))
    neg = w < 0
    mass = float(-w[neg].sum())
    if not neg.any():
        return hermitian_part(x), 0.0
    return (v * np.clip(w, 0.0, None)) @ v.conj().T, mass


def trace_norm(x) -> float:
    """Trace norm of a Hermitian matrix (sum of absolute eigenvalues)."""
    return float(np.abs(np.linalg.eigvalsh(hermitian_part(x))).sum())
