"""Two-rebit and two-qubit states, the sigma_y (x) sigma_y operator and its eigenbasis."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rebitlab import linalg

TRACE_TOL = 1e-12
ORTHO_TOL = 1e-10
NORM_TOL = 1e-12

_S = 1.0 / math.sqrt(2.0)

# Product basis order |00>, |01>, |10>, |11>.
SIGMA_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)
SIGMA_YY.setflags(write=False)

# Columns phi_1, phi_2 (eigenvalue +1) and phi_3, phi_4 (eigenvalue -1).
MAGIC_BASIS = np.array(
    [
        [0.0, _S, 0.0, _S],
        [_S, 0.0, _S, 0.0],
        [_S, 0.0, -_S, 0.0],
        [0.0, -_S, 0.0, _S],
    ]
)
MAGIC_BASIS.setflags(write=False)
MAGIC_EIGENVALUES = np.array([1.0, 1.0, -1.0, -1.0])


class InvalidStateError(ValueError):
    pass


def sigma_yy() -> np.ndarray:
    return SIGMA_YY.copy()


def magic_basis() -> np.ndarray:
    """Orthonormal eigenvectors of ``sigma_yy()`` as columns phi_1..phi_4."""
    return MAGIC_BASIS.copy()


def _validate_density(m: np.ndarray, what: str) -> None:
    if m.shape[-2:] != (4, 4):
        raise InvalidStateError(f"{what} must be 4x4, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidStateError(f"{what} has non-finite entries")
    if not linalg.is_symmetric(m, atol=1e-12):
        kind = "Hermitian" if np.iscomplexobj(m) else "symmetric"
        raise InvalidStateError(f"{what} is not {kind}")
    tr = linalg.trace(m).real
    if np.any(np.abs(tr - 1.0) > TRACE_TOL):
        raise InvalidStateError(f"{what} trace differs from 1 by {np.max(np.abs(tr - 1.0)):.3e}")
    w = linalg.eig_sym(m).eigenvalues
    if np.any(w < -linalg.PSD_CLAMP):
        raise InvalidStateError(f"{what} has negative eigenvalue {w.min():.3e}")


@dataclass(frozen=True, eq=False)
class RebitDensityMatrix:
    """Real symmetric, positive-semidefinite, unit-trace 4x4 matrix.

    ``matrix`` may also hold a stack of shape ``(n, 4, 4)``; every member is
    validated.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if np.iscomplexobj(self.matrix) and np.any(np.imag(self.matrix) != 0):
            raise InvalidStateError("rebit density matrix must be real")
        _validate_density(m, "rebit density matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def is_real(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class QubitDensityMatrix:
    """Complex Hermitian, positive-semidefinite, unit-trace 4x4 matrix (or stack)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        _validate_density(m, "qubit density matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def is_real(self) -> bool:
        return False


@dataclass(frozen=True)
class PureRebitState:
    """Real amplitudes c_1..c_4 with respect to the magic basis."""

    c: tuple[float, float, float, float]

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        if len(c) != 4:
            raise InvalidStateError("a pure rebit state has four amplitudes")
        norm = math.fsum(x * x for x in c)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"amplitudes are not normalised (sum of squares {norm!r})")
        object.__setattr__(self, "c", c)

    def product_vector(self) -> np.ndarray:
        return MAGIC_BASIS @ np.asarray(self.c)

    def angles(self) -> tuple[float, float, float]:
        """Inverse of :func:`coefficients_from_angles`: ``(theta, phi1, phi2)``."""
        c1, c2, c3, c4 = self.c
        theta = math.atan2(math.hypot(c3, c4), math.hypot(c1, c2))
        phi1 = math.atan2(c2, c1) % (2 * math.pi)
        phi2 = math.atan2(c4, c3) % (2 * math.pi)
        return theta, phi1, phi2


def assemble_state(rotation, lambdas) -> RebitDensityMatrix:
    """Build ``R diag(lambdas) R^T`` from an orthogonal matrix and a simplex point."""
    r = np.asarray(rotation, dtype=float)
    lam = np.asarray(lambdas, dtype=float)
    if r.shape != (4, 4) or lam.shape != (4,):
        raise InvalidStateError("expected a 4x4 rotation and four eigenvalues")
    if linalg.frobenius_norm(r.T @ r - np.eye(4)) > ORTHO_TOL:
        raise InvalidStateError("rotation is not orthogonal")
    if np.any(lam < 0) or abs(math.fsum(lam) - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"eigenvalues {lam} are not a point of the simplex")
    return RebitDensityMatrix(assemble(r, lam))


def assemble(rotation: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """Unchecked, batched ``R D R^T`` (or ``U D U^dagger``); result is exactly symmetric."""
    m = (rotation * lambdas[..., None, :]) @ np.conj(np.swapaxes(rotation, -1, -2))
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def projector(vec: np.ndarray) -> np.ndarray:
    """Batched ``|v><v|`` for unit vectors of shape ``(..., 4)``."""
    return vec[..., :, None] * np.conj(vec[..., None, :])


def pure_to_density(s: PureRebitState) -> RebitDensityMatrix:
    return RebitDensityMatrix(projector(s.product_vector()))


def coefficients_from_angles(theta: float, phi1: float, phi2: float) -> PureRebitState:
    if not 0.0 <= theta < math.pi / 2:
        raise InvalidStateError(f"theta={theta} outside [0, pi/2)")
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        if not 0.0 <= phi < 2 * math.pi:
            raise InvalidStateError(f"{name}={phi} outside [0, 2 pi)")
    ct, st = math.cos(theta), math.sin(theta)
    c = (ct * math.cos(phi1), ct * math.sin(phi1), st * math.cos(phi2), st * math.sin(phi2))
    # renormalise away the last ulp so the strict norm check never trips
    norm = math.sqrt(math.fsum(x * x for x in c))
    return PureRebitState(tuple(x / norm for x in c))


def maximal_entangled_mixture(p: float) -> RebitDensityMatrix:
    """``p |phi_1><phi_1| + (1 - p) |phi_2><phi_2|``, maximally entangled for every p."""
    if not 0.0 <= p <= 1.0:
        raise InvalidStateError(f"p={p} outside [0, 1]")
    phi1, phi2 = MAGIC_BASIS[:, 0], MAGIC_BASIS[:, 1]
    return RebitDensityMatrix(p * np.outer(phi1, phi1) + (1.0 - p) * np.outer(phi2, phi2))
