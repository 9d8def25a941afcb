"""The separability modulus ``l(rho)`` and the universal constant ``L``.

``l(rho)`` is the largest ``t`` with ``t*rho + (1-t)*tau`` separable. For
2x2 and 2x3 systems PPT decides separability, so bisection on the PPT
predicate computes it exactly. Elsewhere the PPT value only bounds it from
above, while ``L`` and the gap representation give lower bounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .composite import PPT_TOL, bipartitions, partial_transpose
from .simplex import gap_representation
from .state import (
    DensityMatrix,
    DimsLike,
    _trusted,
    as_dims,
    convex_combination,
    eigh_sorted,
    mix_with_trace,
    spectrum,
)

BISECTION_TOL = 1e-9
MAX_BISECTION_ITER = 60
PPT_DECISIVE = {(2, 2), (2, 3), (3, 2)}

METHODS = ("ppt-bisection", "convexity-bound", "gap-bound", "L-floor")
PROVENANCES = ("exact-bipartite", "single-factor", "vidal-tarrach", "rungta")


@dataclass(frozen=True)
class LBound:
    """Value of ``L`` for a composite system, or a proven lower bound on it."""

    value: float
    provenance: str
    fraction: Fraction

    @property
    def exact(self) -> bool:
        return self.provenance in ("exact-bipartite", "single-factor")


@dataclass(frozen=True)
class ModulusEstimate:
    lower: float
    upper: float
    exact: bool
    method: str

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(f"need 0 <= lower <= upper <= 1, got {self.lower}, {self.upper}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def value(self) -> float:
        """Midpoint of the bracket (the modulus itself when ``exact``)."""
        return 0.5 * (self.lower + self.upper)

    @property
    def robustness(self) -> float:
        """Random robustness of entanglement ``1/l - 1`` (from ``value``)."""
        return 1.0 / self.value - 1.0


def is_ppt_decisive(dims: DimsLike) -> bool:
    return tuple(as_dims(dims).factors) in PPT_DECISIVE


def l_constant(dims: DimsLike) -> LBound:
    """``L = inf l(rho)``: exact ``2/(2+D)`` for two parties, else a lower bound.

    For ``N > 2`` the better of ``1/(1 + d^(2N-1))`` with ``d = max d_j``
    and ``1/(1 + D/2)^(N-1)`` is returned.
    """
    dims = as_dims(dims)
    N, D = dims.n_factors, dims.total
    if N == 1:
        return LBound(1.0, "single-factor", Fraction(1))
    if N == 2:
        f = Fraction(2, 2 + D)
        return LBound(float(f), "exact-bipartite", f)
    d = max(dims.factors)
    rungta = Fraction(1, 1 + d ** (2 * N - 1))
    vidal_tarrach = 1 / (1 + Fraction(D, 2)) ** (N - 1)
    if rungta > vidal_tarrach:
        return LBound(float(rungta), "rungta", rungta)
    return LBound(float(vidal_tarrach), "vidal-tarrach", vidal_tarrach)


def _ppt_threshold(pt: np.ndarray, D: int, tol: float, ppt_tol: float):
    """Bisection for the largest ``t`` where ``t*pt + (1-t)*1/D`` is positive."""
    eye = np.eye(D) / D

    def ppt_at(t):
        return np.linalg.eigvalsh(t * pt + (1.0 - t) * eye)[0] >= -ppt_tol

    if ppt_at(1.0):
        return 1.0, 1.0
    lo, hi = 0.0, 1.0
    for _ in range(MAX_BISECTION_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if ppt_at(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def ppt_threshold(rho: DensityMatrix, subsystems=2, tol: float = BISECTION_TOL,
                  ppt_tol: float = PPT_TOL) -> tuple:
    """Bracket ``(lo, hi)`` on ``sup{t : rho_t is PPT}`` across one cut."""
    pt = partial_transpose(rho, subsystems)
    pt = 0.5 * (pt + pt.conj().T)
    return _ppt_threshold(pt, rho.dim, tol, ppt_tol)


def modulus_ppt(rho: DensityMatrix, tol: float = BISECTION_TOL) -> ModulusEstimate:
    """Separability modulus by bisection on ``t -> is_ppt(rho_t)``.

    Exact (``upper - lower <= tol``) for 2x2 and 2x3. For other bipartite
    dims the PPT threshold is only an upper bound on ``l``; the lower end
    is then the ``L`` floor and ``exact`` is False.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rho.dims.n_factors != 2:
        raise ValueError("modulus_ppt needs a bipartite state; see estimate_modulus")
    lo, hi = ppt_threshold(rho, 2, tol)
    if is_ppt_decisive(rho.dims):
        return ModulusEstimate(lo, hi, True, "ppt-bisection")
    floor = min(l_constant(rho.dims).value, hi)
    return ModulusEstimate(floor, hi, False, "ppt-bisection")


def estimate_modulus(rho: DensityMatrix, tol: float = BISECTION_TOL) -> ModulusEstimate:
    """Best available bracket on ``l(rho)`` for any number of parties.

    Bipartite states go through :func:`modulus_ppt`. With more parties the
    upper end is the smallest PPT threshold over all bipartitions and the
    lower end is the gap-representation bound using ``L`` for every vertex.
    """
    if rho.dims.n_factors == 2:
        return modulus_ppt(rho, tol)
    if rho.dims.n_factors == 1:
        return ModulusEstimate(1.0, 1.0, True, "L-floor")
    L = l_constant(rho.dims).value
    upper = min(ppt_threshold(rho, cut, tol)[1] for cut in bipartitions(rho.dims.n_factors))
    lower = gap_lower_bound(rho, [L] * (rho.dim - 1))
    lower = min(lower, upper)
    return ModulusEstimate(lower, upper, False, "gap-bound")


@dataclass(frozen=True)
class MixtureCheck:
    """Both sides of ``l(rho_t) = min(1, l(rho)/t)``."""

    t: float
    lhs: float
    rhs: float

    def holds(self, atol: float) -> bool:
        return abs(self.lhs - self.rhs) <= atol


def modulus_of_mixture(rho: DensityMatrix, t: float, tol: float = BISECTION_TOL) -> MixtureCheck:
    if not 0.0 < t <= 1.0:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    lhs = modulus_ppt(mix_with_trace(rho, t), tol).value
    rhs = min(1.0, modulus_ppt(rho, tol).value / t)
    return MixtureCheck(t, lhs, rhs)


def _lower(m) -> float:
    return m.lower if isinstance(m, ModulusEstimate) else float(m)


def convexity_lower_bound(components: Iterable) -> float:
    """Harmonic-mean bound ``(sum_j w_j / l_j)^-1`` for a convex mixture.

    ``components`` holds ``(weight, modulus)`` pairs, where each modulus is a
    :class:`ModulusEstimate` (its ``lower`` end is used) or a number.
    """
    pairs = [(float(w), _lower(m)) for w, m in components]
    if not pairs:
        raise ValueError("no components")
    w = np.array([p[0] for p in pairs])
    ls = np.array([p[1] for p in pairs])
    if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be positive and sum to 1")
    if np.any(ls <= 0) or np.any(ls > 1):
        raise ValueError("component moduli must lie in (0, 1]")
    return float(1.0 / np.sum(w / ls))


def gap_lower_bound(rho: DensityMatrix, hat_moduli: Sequence) -> float:
    """``(sum_j j(lam_j - lam_{j+1}) / l(hat_j) + D lam_D)^-1``.

    ``hat_moduli`` are lower bounds on the moduli of the first ``D-1``
    gap-representation vertices (numbers or estimates).
    """
    D = rho.dim
    if len(hat_moduli) != D - 1:
        raise ValueError(f"expected {D - 1} vertex moduli, got {len(hat_moduli)}")
    gr = gap_representation(rho)
    ls = np.array([_lower(m) for m in hat_moduli])
    if np.any(ls <= 0):
        raise ValueError("vertex moduli must be positive")
    return float(1.0 / (np.sum(gr.mu / ls) + gr.tail_weight))


def hat_moduli(rho: DensityMatrix, tol: float = BISECTION_TOL) -> list:
    """``modulus_ppt`` of the gap-representation vertices ``hat_1 .. hat_{D-1}``."""
    gr = gap_representation(rho)
    return [modulus_ppt(h, tol) for h in gr.hat_states[:-1]]


def spectral_lower_bound(rho: DensityMatrix, tol: float = BISECTION_TOL) -> float:
    """Harmonic bound from one spectral decomposition into eigenprojectors."""
    lam = spectrum(rho)
    _, v = eigh_sorted(rho)
    comps = []
    for j, w in enumerate(lam):
        if w <= 0:
            continue
        p = np.outer(v[:, j], v[:, j].conj())
        comps.append((w, modulus_ppt(_trusted(p, rho.dims), tol)))
    total = sum(w for w, _ in comps)
    return convexity_lower_bound([(w / total, m) for w, m in comps])


def one_over_l_convexity_check(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    t: float,
    tol: float = BISECTION_TOL,
    slack: float = 1e-6,
) -> bool:
    """``1/l(t rho1 + (1-t) rho2) <= t/l(rho1) + (1-t)/l(rho2) + slack``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    mix = convex_combination([t, 1.0 - t], [rho1, rho2])
    lhs = 1.0 / modulus_ppt(mix, tol).value
    rhs = t / modulus_ppt(rho1, tol).value + (1.0 - t) / modulus_ppt(rho2, tol).value
    return bool(lhs <= rhs + slack)
