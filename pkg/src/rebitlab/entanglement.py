"""Per-state observables: concurrences, entanglement of formation and mixedness.

Functions take a single 4x4 matrix or a stack ``(n, 4, 4)`` (validated state
objects are accepted too) and return scalars or arrays accordingly.
Entanglement is in bits, von Neumann entropy in nats.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from rebitlab import linalg
from rebitlab.states import SIGMA_YY

SLACK = 1e-12
ZERO_EIG = 1e-15
LN2 = math.log(2.0)

COLUMNS = (
    "participation_ratio",
    "purity",
    "entropy_vn",
    "lambda_max",
    "c_cfr",
    "e_cfr",
    "c_wootters",
    "e_wootters",
)

UNITS = {
    "participation_ratio": "R = 1/Tr(rho^2), dimensionless",
    "purity": "Tr(rho^2), dimensionless",
    "entropy_vn": "-Tr(rho ln rho), nats",
    "lambda_max": "largest eigenvalue, dimensionless",
    "c_cfr": "|Tr(rho sigma_y x sigma_y)|, dimensionless; empty for complex states",
    "e_cfr": "entanglement of formation from c_cfr, bits; empty for complex states",
    "c_wootters": "Wootters concurrence, dimensionless",
    "e_wootters": "entanglement of formation from c_wootters, bits",
}


@dataclass(frozen=True)
class StateRecord:
    participation_ratio: float
    purity: float
    entropy_vn: float
    lambda_max: float
    c_cfr: float | None
    e_cfr: float | None
    c_wootters: float
    e_wootters: float

    def as_dict(self) -> dict:
        return asdict(self)


def _matrix(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho))


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def _clip_unit(x, what: str):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < -SLACK) or np.any(x > 1.0 + SLACK):
        raise ValueError(f"{what} outside [0, 1]")
    return np.clip(x, 0.0, 1.0)


def binary_entropy(x):
    """``-x log2 x - (1-x) log2 (1-x)`` with ``0 log 0 = 0``."""
    x = _clip_unit(x, "binary_entropy argument")
    return _scalar_or_array(_h2(x, 1.0 - x))


def _h2(x, y):
    # x and y = 1 - x passed separately so callers can supply y without cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = np.where(x > 0.0, -x * np.log2(np.where(x > 0.0, x, 1.0)), 0.0)
        ty = np.where(y > 0.0, -y * np.log2(np.where(y > 0.0, y, 1.0)), 0.0)
    return tx + ty


def eof_from_concurrence(c):
    """Entanglement of formation ``h((1 + sqrt(1 - C^2)) / 2)`` in bits."""
    c = _clip_unit(c, "concurrence")
    s = np.sqrt(1.0 - c * c)
    small = c * c / (2.0 * (1.0 + s))  # = 1 - x, free of cancellation
    return _scalar_or_array(_h2(1.0 - small, small))


def concurrence_cfr(rho):
    """``|Tr(rho sigma_y x sigma_y)|`` for real states."""
    m = _matrix(rho)
    if np.iscomplexobj(m):
        raise TypeError("the CFR concurrence applies to real (rebit) density matrices")
    val = np.abs(np.einsum("...ij,ji->...", m, SIGMA_YY))
    return _scalar_or_array(np.minimum(val, 1.0))


def concurrence_wootters(rho, decomposition: linalg.SpectralDecomposition | None = None):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of ``rho rho~`` with
    ``rho~ = Y rho* Y``, obtained from the Hermitian matrix
    ``sqrt(rho) rho~ sqrt(rho)``. For real input ``sqrt(rho) Y sqrt(rho)`` is
    real symmetric and squares to that matrix, so its absolute eigenvalues
    are used directly.
    """
    m = _matrix(rho)
    dec = linalg.eig_sym(m) if decomposition is None else decomposition
    root = linalg.psd_sqrt(m, dec)
    if np.iscomplexobj(m):
        flipped = SIGMA_YY @ np.conj(m) @ SIGMA_YY
        w = linalg.eig_sym(root @ flipped @ root).eigenvalues
        ell = np.sqrt(linalg.clamp_spectrum(w))
    else:
        a = root @ SIGMA_YY @ root
        a = 0.5 * (a + np.swapaxes(a, -1, -2))
        ell = -np.sort(-np.abs(linalg.eig_sym(a).eigenvalues), axis=-1)
    c = ell[..., 0] - ell[..., 1] - ell[..., 2] - ell[..., 3]
    return _scalar_or_array(np.clip(c, 0.0, 1.0))


def purity(rho):
    m = _matrix(rho)
    return _scalar_or_array(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def participation_ratio(rho):
    return _scalar_or_array(1.0 / np.asarray(purity(rho)))


def _entropy_from_spectrum(w: np.ndarray) -> np.ndarray:
    w = np.where(w < ZERO_EIG, 0.0, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0.0, -w * np.log(np.where(w > 0.0, w, 1.0)), 0.0)
    return terms.sum(axis=-1)


def von_neumann_entropy(rho):
    w = linalg.eig_sym(_matrix(rho)).eigenvalues
    return _scalar_or_array(_entropy_from_spectrum(w))


def lambda_max(rho):
    return _scalar_or_array(linalg.eig_sym(_matrix(rho)).eigenvalues[..., 0])


def evaluate_batch(rhos) -> dict[str, np.ndarray]:
    """All observables for a stack of states, as columns keyed by :data:`COLUMNS`.

    CFR columns are NaN for complex input.
    """
    m = np.asarray(_matrix(rhos))
    if m.ndim == 2:
        m = m[None]
    dec = linalg.eig_sym(m)
    pur = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    c_w = np.atleast_1d(concurrence_wootters(m, dec))
    out = {
        "participation_ratio": 1.0 / pur,
        "purity": pur,
        "entropy_vn": _entropy_from_spectrum(dec.eigenvalues),
        "lambda_max": dec.eigenvalues[:, 0],
        "c_wootters": c_w,
        "e_wootters": np.atleast_1d(eof_from_concurrence(c_w)),
    }
    if np.iscomplexobj(m):
        out["c_cfr"] = np.full(len(m), np.nan)
        out["e_cfr"] = np.full(len(m), np.nan)
    else:
        c_cfr = np.atleast_1d(concurrence_cfr(m))
        out["c_cfr"] = c_cfr
        out["e_cfr"] = np.atleast_1d(eof_from_concurrence(c_cfr))
    return {k: out[k] for k in COLUMNS}


def evaluate(rho, kind=None) -> StateRecord:
    """Observables of one state.

    ``kind`` (an ``EnsembleKind``) is optional; when given, its scalar field
    must match the matrix.
    """
    m = _matrix(rho)
    if kind is not None and kind.is_real == np.iscomplexobj(m):
        raise TypeError(f"matrix scalar field does not match ensemble {kind.value}")
    cols = evaluate_batch(m)
    vals = {k: float(v[0]) for k, v in cols.items()}
    if np.iscomplexobj(m):
        vals["c_cfr"] = vals["e_cfr"] = None
    return StateRecord(**vals)
