"""Dense linear algebra for 4x4 real-symmetric and complex-Hermitian matrices.

Every routine accepts a single matrix of shape ``(4, 4)`` or a stack of shape
``(..., 4, 4)``. The eigensolver is a cyclic Jacobi method vectorised over the
stack, so millions of tiny matrices can be diagonalised without a Python loop
per matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIM = 4
OFF_TOL = 1e-13
MAX_SWEEPS = 50
PSD_CLAMP = 1e-10

_PAIRS = [(p, q) for p in range(DIM) for q in range(p + 1, DIM)]


class ConvergenceError(ArithmeticError):
    """Raised when Jacobi sweeps fail to reduce the off-diagonal norm."""

    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(residual off-diagonal norm {residual:.3e})"
        )


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _check_square(m: np.ndarray) -> None:
    if m.shape[-2:] != (DIM, DIM):
        raise ValueError(f"expected trailing shape (4, 4), got {m.shape}")


def is_symmetric(m, atol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.all(np.abs(m - np.conj(np.swapaxes(m, -1, -2))) <= atol))


def off_diagonal_norm(m: np.ndarray) -> np.ndarray:
    off = m - np.einsum("...ii->...i", m)[..., None] * np.eye(DIM)
    return np.sqrt(np.sum(np.abs(off) ** 2, axis=(-2, -1)))


def frobenius_norm(m) -> np.ndarray | float:
    m = np.asarray(m)
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def trace(m) -> np.ndarray | float:
    return np.trace(np.asarray(m), axis1=-2, axis2=-1)


def matmul(a, b) -> np.ndarray:
    return np.matmul(np.asarray(a), np.asarray(b))


def eig_sym(m, tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS) -> SpectralDecomposition:
    """Diagonalise real-symmetric or complex-Hermitian 4x4 matrices.

    Parameters
    ----------
    m : array_like, shape (..., 4, 4)
        Symmetric (real) or Hermitian (complex) input. Only the symmetric
        part is trusted; the input is not symmetrised.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm of every matrix is
        below ``tol * ||m||_F``.
    max_sweeps : int
        Upper bound on cyclic sweeps.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues in non-increasing order; eigenvector ``k`` is column ``k``.

    Notes
    -----
    A matrix whose off-diagonal norm is already below tolerance receives
    identity rotations, so each matrix's result does not depend on which
    other matrices share its batch.
    """
    m = np.asarray(m)
    _check_square(m)
    complex_case = np.iscomplexobj(m)
    dtype = np.complex128 if complex_case else np.float64
    batch_shape = m.shape[:-2]
    flat = np.asarray(m, dtype=dtype).reshape(-1, DIM, DIM)
    threshold = tol * frobenius_norm(flat)
    # component-major layout: a[i, j] is a contiguous vector over the batch
    a = np.moveaxis(flat, 0, -1).copy()
    n = flat.shape[0]
    v = np.zeros((DIM, DIM, n), dtype=dtype)
    for i in range(DIM):
        v[i, i] = 1.0

    sweeps = 0
    off = _off_norm_cm(a)
    while True:
        pending = off > threshold
        if not pending.any():
            break
        if sweeps >= max_sweeps:
            raise ConvergenceError(float(off.max()), sweeps)
        for p, q in _PAIRS:
            _rotate(a, v, p, q, pending, complex_case)
        sweeps += 1
        off = _off_norm_cm(a)

    w = np.stack([a[i, i].real for i in range(DIM)], axis=-1)
    v = np.moveaxis(v, -1, 0)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return SpectralDecomposition(
        eigenvalues=w.reshape(batch_shape + (DIM,)),
        eigenvectors=v.reshape(batch_shape + (DIM, DIM)),
    )


def _off_norm_cm(a: np.ndarray) -> np.ndarray:
    total = np.zeros(a.shape[-1])
    for p, q in _PAIRS:
        total += 2.0 * (a[p, q].real ** 2 + a[p, q].imag ** 2)
    return np.sqrt(total)


def _rotate(a, v, p, q, pending, complex_case):
    app = a[p, p].real
    aqq = a[q, q].real
    apq = a[p, q]
    mag = np.abs(apq)
    active = pending & (mag > 0.0)
    safe_mag = np.where(active, mag, 1.0)
    # t = tan(angle), the smaller root of t^2 + 2 tau t - 1 = 0
    with np.errstate(over="ignore"):
        tau = (aqq - app) / (2.0 * safe_mag)
        sign = np.where(tau >= 0.0, 1.0, -1.0)
        t = np.where(active, sign / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    if complex_case:
        # phase making the (p, q) element real and positive before the rotation
        dq = np.where(active, np.conj(apq) / safe_mag, 1.0)
    else:
        dq = np.where(active, np.sign(apq), 1.0)
    j10 = -s * dq
    j11 = c * dq

    # columns: A <- A J
    cp = a[:, p].copy()
    cq = a[:, q].copy()
    a[:, p] = cp * c + cq * j10
    a[:, q] = cp * s + cq * j11
    # rows: A <- J^H A
    rp = a[p].copy()
    rq = a[q].copy()
    if complex_case:
        a[p] = c * rp + np.conj(j10) * rq
        a[q] = s * rp + np.conj(j11) * rq
    else:
        a[p] = c * rp + j10 * rq
        a[q] = s * rp + j11 * rq
    # V <- V J
    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = vp * c + vq * j10
    v[:, q] = vp * s + vq * j11

    a[p, q] = np.where(active, 0.0, a[p, q])
    a[q, p] = np.where(active, 0.0, a[q, p])
    if complex_case:
        a[p, p] = a[p, p].real
        a[q, q] = a[q, q].real


def clamp_spectrum(w: np.ndarray, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Zero round-off negatives; reject eigenvalues below ``-clamp``."""
    w = np.asarray(w)
    if np.any(w < -clamp):
        raise ValueError(
            f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})"
        )
    return np.where(w < 0.0, 0.0, w)


def psd_sqrt(m, decomposition: SpectralDecomposition | None = None) -> np.ndarray:
    """Principal square root of a positive-semidefinite 4x4 matrix (or stack)."""
    dec = eig_sym(m) if decomposition is None else decomposition
    root = np.sqrt(clamp_spectrum(dec.eigenvalues))
    v = dec.eigenvectors
    return (v * root[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
