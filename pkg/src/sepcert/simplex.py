"""The simplex of ordered spectra, majorization and the gap representation.

Spectra are plain 1-D arrays validated by :func:`sepcert.state.check_spectrum`.
Majorization follows the "more mixed" convention: ``majorizes(lam, mu)``
means every partial sum of ``lam`` is at most the matching one of ``mu``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import (
    ORDER_TOL,
    TRACE_TOL,
    DensityMatrix,
    _trusted,
    check_spectrum,
    eigh_sorted,
    spectrum,
)

MAJORIZATION_SLACK = 1e-12


def vertex(k: int, d: int) -> np.ndarray:
    """The extreme point ``e^(k) = (1/k, ..., 1/k, 0, ..., 0)`` of the simplex."""
    if not 1 <= k <= d:
        raise ValueError(f"vertex index must be in [1, {d}], got {k}")
    e = np.zeros(d)
    e[:k] = 1.0 / k
    return e


def check_barycentric(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if np.any(x < -ORDER_TOL):
        raise ValueError(f"barycentric coordinates must be nonnegative: {x}")
    if abs(x.sum() - 1.0) > TRACE_TOL:
        raise ValueError(f"barycentric coordinates must sum to 1 (sum={x.sum()!r})")
    return x


def to_barycentric(lam) -> np.ndarray:
    """Weights ``x`` with ``lam = sum_j x_j e^(j)``.

    ``x_j = j (lam_j - lam_{j+1})`` for ``j < d`` and ``x_d = d lam_d``.
    """
    lam = check_spectrum(lam)
    d = lam.size
    j = np.arange(1, d + 1)
    gaps = np.append(lam[:-1] - lam[1:], lam[-1])
    return np.clip(j * gaps, 0.0, None)


def from_barycentric(x) -> np.ndarray:
    """Inverse of :func:`to_barycentric`: ``lam_j = sum_{k >= j} x_k / k``."""
    x = check_barycentric(x)
    k = np.arange(1, x.size + 1)
    return np.cumsum((x / k)[::-1])[::-1]


def partial_sum(lam, k: int) -> float:
    """``Sigma_k(lam)``, the sum of the ``k`` largest entries."""
    lam = check_spectrum(lam)
    if not 1 <= k <= lam.size:
        raise ValueError(f"k must be in [1, {lam.size}], got {k}")
    return float(lam[:k].sum())


def partial_sums(lam) -> np.ndarray:
    return np.cumsum(check_spectrum(lam))


def majorizes(lam, mu, slack: float = MAJORIZATION_SLACK) -> bool:
    """True when ``lam`` is more mixed than ``mu``.

    That is ``Sigma_k(lam) <= Sigma_k(mu) + slack`` for every ``k``.
    """
    lam = check_spectrum(lam)
    mu = check_spectrum(mu)
    if lam.size != mu.size:
        raise ValueError(f"length mismatch: {lam.size} vs {mu.size}")
    return bool(np.all(np.cumsum(lam) <= np.cumsum(mu) + slack))


def gap_coefficients(lam) -> tuple:
    """``(mu, tail_weight)`` with ``mu_j = j (lam_j - lam_{j+1})`` and ``tail = d lam_d``."""
    x = to_barycentric(lam)
    return x[:-1], float(x[-1])


@dataclass(frozen=True, eq=False)
class GapRepresentation:
    """``rho = sum_j mu_j hat_j + tail_weight * tau``.

    ``hat_states[j-1]`` is the normalised projector onto the span of the
    ``j`` leading eigenvectors; the last one is ``tau``.
    """

    mu: np.ndarray
    tail_weight: float
    hat_states: tuple

    def reconstruct(self) -> np.ndarray:
        D = len(self.hat_states)
        m = self.tail_weight * np.eye(D) / D
        for w, h in zip(self.mu, self.hat_states[:-1]):
            m = m + w * h.matrix
        return m


def hat_states(rho: DensityMatrix) -> tuple:
    """The simplex vertices ``hat rho^(j) = j^-1 sum_{k<=j} rho^(k)`` for one eigenbasis."""
    _, v = eigh_sorted(rho)
    D = rho.dim
    out = []
    proj = np.zeros((D, D), dtype=complex)
    for j in range(D):
        proj = proj + np.outer(v[:, j], v[:, j].conj())
        out.append(_trusted(proj / (j + 1), rho.dims))
    return tuple(out)


def gap_representation(rho: DensityMatrix) -> GapRepresentation:
    mu, tail = gap_coefficients(spectrum(rho))
    return GapRepresentation(mu=mu, tail_weight=tail, hat_states=hat_states(rho))
