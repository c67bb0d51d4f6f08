"""Closed-form curves: pure-state entanglement density, the extremal family
``rho_m(beta)`` and the maximal-concurrence boundary in the (R, C^2) plane."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from rebitlab import states
from rebitlab.entanglement import eof_from_concurrence

LN2 = math.log(2.0)
RANGE_SLACK = 1e-12


class CurvePoint(NamedTuple):
    abscissa: float
    ordinate: float


def _check_range(name: str, x: float, lo: float, hi: float) -> None:
    if not (lo - RANGE_SLACK <= x <= hi + RANGE_SLACK):
        raise ValueError(f"{name}={x} outside [{lo}, {hi}]")


def maximal_family_state(beta: float) -> states.RebitDensityMatrix:
    """``I/4 - (beta/2) sigma_y x sigma_y``; extremises Tr(rho^2) at fixed <sigma_yy>."""
    _check_range("beta", beta, -0.5, 0.5)
    return states.RebitDensityMatrix(0.25 * np.eye(4) - 0.5 * beta * states.SIGMA_YY)


def maximal_family_metrics(beta: float) -> tuple[float, float, float]:
    """``(<sigma_yy>, C^2, R)`` of :func:`maximal_family_state` in closed form."""
    _check_range("beta", beta, -0.5, 0.5)
    c2 = 4.0 * beta * beta
    return -2.0 * beta, c2, 4.0 / (1.0 + c2)


def boundary_r_max(c_squared: float) -> float:
    """Largest participation ratio compatible with a given squared concurrence."""
    _check_range("c_squared", c_squared, 0.0, 1.0)
    return 4.0 / (1.0 + c_squared)


def boundary_c2_max(r):
    """Largest squared concurrence compatible with participation ratio ``r``.

    Accepts scalars or arrays. Equal to 1 on ``[1, 2]`` and ``4/r - 1`` on ``[2, 4]``.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(np.isnan(r_arr)) or np.any(r_arr < 1.0 - RANGE_SLACK) or np.any(r_arr > 4.0 + RANGE_SLACK):
        raise ValueError("participation ratio outside [1, 4]")
    out = np.where(r_arr <= 2.0, 1.0, 4.0 / r_arr - 1.0)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def pure_concurrence_density(c: float) -> float:
    _check_range("c", c, 0.0, 1.0)
    return 1.0


def eof_derivative(c):
    """dE/dC in bits, finite on (0, 1] and equal to ``1/ln 2`` at C = 1.

    With ``s = sqrt(1 - C^2)`` the chain rule through the binary entropy gives
    ``dE/dC = C * atanh(s) / (s ln 2)``; the ratio ``atanh(s)/s`` tends to 1.
    """
    c = np.asarray(c, dtype=float)
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(s > 0.0, np.arctanh(np.minimum(s, 1.0)) / np.where(s > 0.0, s, 1.0), 1.0)
    out = c * ratio / LN2
    return float(out) if out.ndim == 0 else out


def pure_entanglement_density(c):
    """Density of E for uniformly random pure rebit states, evaluated at concurrence ``c``."""
    return 1.0 / np.asarray(eof_derivative(c))


def pure_entanglement_density_curve(n_points: int) -> list[CurvePoint]:
    """``(E, P(E))`` on the concurrence grid ``k/n_points``, ``k = 1..n_points``.

    C = 0 is excluded: the density diverges (integrably) as E -> 0. The last
    point is ``(1, ln 2)`` exactly.
    """
    if not isinstance(n_points, (int, np.integer)) or n_points < 2:
        raise ValueError("n_points must be an integer >= 2")
    c = np.arange(1, n_points + 1) / n_points
    e = np.asarray(eof_from_concurrence(c))
    p = pure_entanglement_density(c)
    e[-1] = 1.0
    p[-1] = LN2
    return [CurvePoint(float(a), float(b)) for a, b in zip(e, p)]


def concurrence_from_eof(e: float) -> float:
    """Inverse of ``eof_from_concurrence`` on [0, 1] by bisection."""
    _check_range("e", e, 0.0, 1.0)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if eof_from_concurrence(mid) < e:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16:
            break
    return 0.5 * (lo + hi)
