"""Gibbs states and their guaranteed-separable inverse-temperature window.

``rho_beta = exp(-beta h) / Z``. For ``|beta| <= beta_o`` the state is
separable by the minimal-eigenvalue test; the product-state energy range
``[eta_-, eta_+]`` gives the opposite (entanglement) bounds ``beta_-`` and
``beta_+``. For 2x2 and 2x3 the PPT boundary in ``beta`` is located
directly by :func:`exact_beta_c_scan`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .composite import PureProductState, is_ppt
from .modulus import is_ppt_decisive, l_constant
from .simplex import majorizes
from .state import (
    HERMITIAN_TOL,
    CompositeDims,
    DensityMatrix,
    DimsLike,
    _trusted,
    as_dims,
    haar_vector,
    spectrum,
)

logger = logging.getLogger(__name__)

ETA_CONVERGENCE = 1e-12
DEFAULT_RESTARTS = 32
BETA_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    dims: CompositeDims
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, matrix, dims: DimsLike) -> "Hamiltonian":
        """Wrap a Hermitian matrix (only Hermiticity is checked)."""
        dims = as_dims(dims)
        h = np.asarray(matrix, dtype=complex)
        if h.shape != (dims.total, dims.total):
            raise ValueError(f"shape {h.shape} does not match dims {dims.factors}")
        err = np.max(np.abs(h - h.conj().T))
        if err > HERMITIAN_TOL:
            raise ValueError(f"Hamiltonian is not Hermitian (deviation {err:.3e})")
        h = 0.5 * (h + h.conj().T)
        h.setflags(write=False)
        return cls(dims, h)

    @property
    def energies(self) -> np.ndarray:
        """Eigenvalues, ascending."""
        return np.linalg.eigvalsh(self.matrix)

    def expectation(self, rho: DensityMatrix) -> float:
        return float(np.trace(rho.matrix @ self.matrix).real)


def _as_hamiltonian(h, dims=None) -> Hamiltonian:
    if isinstance(h, Hamiltonian):
        return h
    return Hamiltonian.from_matrix(h, dims)


def _boltzmann_weights(energies: np.ndarray, beta: float) -> np.ndarray:
    a = -beta * energies
    w = np.exp(a - a.max())
    return w / w.sum()


def gibbs(h: Hamiltonian, beta: float) -> DensityMatrix:
    """``exp(-beta h)/tr exp(-beta h)``; ``tau`` at ``beta = 0``.

    Computed from the eigendecomposition of ``h`` with the exponents shifted
    to be nonpositive, so no overflow for large ``|beta|``.
    """
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    eps, v = np.linalg.eigh(h.matrix)
    p = _boltzmann_weights(eps, beta)
    return _trusted((v * p) @ v.conj().T, h.dims)


def energy(h: Hamiltonian, beta: float) -> float:
    """``U(beta) = rho_beta(h)``, strictly decreasing unless ``h`` is scalar."""
    eps = h.energies
    return float(_boltzmann_weights(eps, beta) @ eps)


def _spread(h: Hamiltonian) -> float:
    eps = h.energies
    return float(eps[-1] - eps[0])


def _is_scalar(h: Hamiltonian) -> bool:
    eps = h.energies
    return eps[-1] - eps[0] <= 1e-12 * max(1.0, np.abs(eps).max())


def beta_o_bound(h: Hamiltonian) -> float:
    """``-ln(1-L) / (s_+(h) - s_-(h))``; ``inf`` for a multiple of the identity."""
    if _is_scalar(h):
        return math.inf
    L = l_constant(h.dims).value
    if L >= 1.0:
        return math.inf
    return -math.log1p(-L) / _spread(h)


# -- product-state energy extrema ------------------------------------------

def _effective(ht: np.ndarray, vecs: list, j: int) -> np.ndarray:
    N = len(vecs)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = letters[:N]
    cols = letters[N: 2 * N]
    operands = [ht]
    subs = [rows + cols]
    for k in range(N):
        if k == j:
            continue
        operands += [vecs[k].conj(), vecs[k]]
        subs += [rows[k], cols[k]]
    expr = ",".join(subs) + "->" + rows[j] + cols[j]
    m = np.einsum(expr, *operands, optimize=True)
    return 0.5 * (m + m.conj().T)


def _alternating_min(ht: np.ndarray, dims: CompositeDims, rng, max_sweeps: int):
    vecs = [haar_vector(d, rng) for d in dims.factors]
    value = math.inf
    for sweep in range(max_sweeps):
        for j in range(len(vecs)):
            w, v = np.linalg.eigh(_effective(ht, vecs, j))
            vecs[j] = v[:, 0]
            new = float(w[0])
        if value - new < ETA_CONVERGENCE:
            value = min(value, new)
            break
        value = new
    return value, vecs, sweep + 1


@dataclass(frozen=True)
class ProductEnergyExtrema:
    """Smallest and largest energies found over pure product states.

    ``eta_minus`` is an upper bound on the true infimum and ``eta_plus`` a
    lower bound on the supremum (local search); the per-restart values are
    kept so the spread across restarts can be inspected.
    """

    eta_minus: float
    eta_plus: float
    argmin: PureProductState
    argmax: PureProductState
    restart_minima: tuple = field(repr=False)
    restart_maxima: tuple = field(repr=False)

    @property
    def hits_minus(self) -> int:
        return sum(abs(v - self.eta_minus) < 1e-8 for v in self.restart_minima)

    @property
    def hits_plus(self) -> int:
        return sum(abs(v - self.eta_plus) < 1e-8 for v in self.restart_maxima)


def eta_extrema(
    h: Hamiltonian,
    restarts: int = DEFAULT_RESTARTS,
    seed=42,
    max_sweeps: int = 500,
) -> ProductEnergyExtrema:
    """Extremise ``<psi_1 x ... x psi_N| h |psi_1 x ... x psi_N>`` over unit vectors.

    Alternating optimisation: with all factors but one fixed, the best
    remaining factor is an extreme eigenvector of the effective local
    operator. Each run stops once a full sweep improves by less than
    ``1e-12``; the best of ``restarts`` random starts is returned.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    f = h.dims.factors
    ht = h.matrix.reshape(f + f)
    lows, highs = [], []
    best_lo = best_hi = None
    for _ in range(restarts):
        v, vecs, _ = _alternating_min(ht, h.dims, rng, max_sweeps)
        lows.append(v)
        if best_lo is None or v < best_lo[0]:
            best_lo = (v, vecs)
        v, vecs, _ = _alternating_min(-ht, h.dims, rng, max_sweeps)
        highs.append(-v)
        if best_hi is None or -v > best_hi[0]:
            best_hi = (-v, vecs)
    return ProductEnergyExtrema(
        eta_minus=best_lo[0],
        eta_plus=best_hi[0],
        argmin=PureProductState(tuple(best_lo[1])),
        argmax=PureProductState(tuple(best_hi[1])),
        restart_minima=tuple(lows),
        restart_maxima=tuple(highs),
    )


# -- window ----------------------------------------------------------------

@dataclass(frozen=True)
class ThermalWindow:
    """Inverse temperatures bracketing the separable window of ``rho_beta``.

    ``[-beta_o, beta_o]`` is certified separable. ``beta_minus_toth > 0`` and
    ``beta_plus_toth < 0`` (when present) are the points past which the
    Gibbs energy leaves the product-state range, so ``rho_beta`` is
    entangled for ``beta > beta_minus_toth`` or ``beta < beta_plus_toth``.
    ``exact_beta_c`` holds the PPT transitions ``(beta_c^-, beta_c^+)`` when
    they were scanned; ``None`` entries mean no transition was found.
    """

    beta_o: float
    eta_minus: float
    eta_plus: float
    beta_minus_toth: float | None = None
    beta_plus_toth: float | None = None
    exact_beta_c: tuple | None = None
    notes: tuple = ()

    def to_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return "inf" if math.isinf(x) else float(x)

        return {
            "beta_o": num(self.beta_o),
            "eta_minus": num(self.eta_minus),
            "eta_plus": num(self.eta_plus),
            "beta_minus_toth": num(self.beta_minus_toth),
            "beta_plus_toth": num(self.beta_plus_toth),
            "exact_beta_c": None if self.exact_beta_c is None
            else [num(x) for x in self.exact_beta_c],
            "notes": list(self.notes),
        }


def ground_state(h: Hamiltonian, top: bool = False) -> DensityMatrix:
    """``P/m`` for the lowest (or highest) eigenspace of ``h``."""
    eps, v = np.linalg.eigh(h.matrix)
    target = eps[-1] if top else eps[0]
    scale = max(1.0, float(np.abs(eps).max()))
    cols = v[:, np.abs(eps - target) <= 1e-10 * scale]
    p = cols @ cols.conj().T
    return _trusted(p / cols.shape[1], h.dims)


def _limit_entangled(h: Hamiltonian, top: bool, eta: float) -> bool:
    s = h.energies[-1] if top else h.energies[0]
    below = (s > eta + 1e-12) if top else (s < eta - 1e-12)
    if not below:
        return False
    if h.dims.n_factors == 2:
        return not is_ppt(ground_state(h, top)).is_ppt
    # energy outside the product range already proves entanglement
    return True


def _solve_energy(h: Hamiltonian, target: float, sign: int, tol: float) -> float:
    """Unique ``beta`` of the given sign with ``U(beta) = target``."""
    def g(b):
        return energy(h, b) - target

    hi = sign * 1.0
    for _ in range(200):
        if np.sign(g(hi)) != np.sign(g(0.0)):
            break
        hi *= 2.0
    else:
        raise ValueError("energy level not reached")
    lo, hi = sorted((0.0, hi))
    return optimize.bisect(g, lo, hi, xtol=tol, maxiter=500)


def toth_bounds(
    h: Hamiltonian,
    extrema: ProductEnergyExtrema | None = None,
    tol: float = BETA_TOL,
    **eta_kwargs,
) -> ThermalWindow:
    """Window with the product-energy bounds ``beta_-`` and ``beta_+``.

    ``beta_-`` solves ``U(beta) = eta_-`` for ``beta > 0``; it exists only
    when the ground-state limit ``rho_inf`` is entangled (checked by PPT
    for two parties) and its energy lies below ``eta_-``. Symmetrically for
    ``beta_+ < 0`` and the top of the spectrum.
    """
    if extrema is None:
        extrema = eta_extrema(h, **eta_kwargs)
    notes = []
    b_minus = b_plus = None
    if _is_scalar(h):
        notes.append("scalar Hamiltonian: rho_beta = tau for every beta")
    else:
        u0 = energy(h, 0.0)
        if not u0 > extrema.eta_minus:
            raise ValueError(f"U(0) = {u0} must exceed eta_- = {extrema.eta_minus}")
        if _limit_entangled(h, False, extrema.eta_minus):
            b_minus = _solve_energy(h, extrema.eta_minus, +1, tol)
        else:
            notes.append("beta_-: ground-state limit not shown entangled; bound absent")
        if _limit_entangled(h, True, extrema.eta_plus):
            b_plus = _solve_energy(h, extrema.eta_plus, -1, tol)
        else:
            notes.append("beta_+: top-state limit not shown entangled; bound absent")
    return ThermalWindow(
        beta_o=beta_o_bound(h),
        eta_minus=extrema.eta_minus,
        eta_plus=extrema.eta_plus,
        beta_minus_toth=b_minus,
        beta_plus_toth=b_plus,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class BetaScan:
    """PPT boundary of ``rho_beta`` along one sign of ``beta``.

    ``transition`` is the first ``beta`` (refined by bisection) where PPT
    fails, ``None`` when none occurs up to ``beta_max``. ``reentrance`` lists
    later grid points where PPT holds again.
    """

    transition: float | None
    reentrance: tuple
    beta_max: float
    message: str = ""


def exact_beta_c_scan(
    h: Hamiltonian,
    beta_max: float = 10.0,
    tol: float = BETA_TOL,
    grid: int = 200,
    sign: int = 1,
) -> BetaScan:
    """Locate where ``rho_beta`` stops being PPT on ``[0, beta_max]`` (or its mirror).

    PPT is not known to be monotone in ``beta``, so a grid is scanned first;
    the first sign change is refined by bisection and any later return to
    PPT is reported. Exact only for 2x2 and 2x3.
    """
    if not is_ppt_decisive(h.dims):
        raise ValueError("exact scan needs 2x2 or 2x3 dims")
    if beta_max <= 0 or sign not in (1, -1):
        raise ValueError("beta_max must be positive and sign +-1")

    def ppt(b):
        return is_ppt(gibbs(h, b)).is_ppt

    betas = sign * np.linspace(0.0, beta_max, grid + 1)
    flags = [ppt(b) for b in betas]
    try:
        first = flags.index(False)
    except ValueError:
        return BetaScan(None, (), beta_max, f"no transition found up to |beta| = {beta_max}")
    lo, hi = betas[first - 1], betas[first]
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if ppt(mid):
            lo = mid
        else:
            hi = mid
    back = tuple(float(b) for b, f in zip(betas[first:], flags[first:]) if f)
    if back:
        logger.warning("PPT re-entrance at beta = %s", back[:5])
    return BetaScan(float(0.5 * (lo + hi)), back, beta_max)


def thermal_window(
    h: Hamiltonian,
    beta_max: float = 10.0,
    tol: float = BETA_TOL,
    **eta_kwargs,
) -> ThermalWindow:
    """Full window: ``beta_o``, product-energy bounds and (2x2/2x3) PPT scan."""
    w = toth_bounds(h, tol=tol, **eta_kwargs)
    if not is_ppt_decisive(h.dims):
        return w
    plus = exact_beta_c_scan(h, beta_max, tol, sign=1)
    minus = exact_beta_c_scan(h, beta_max, tol, sign=-1)
    notes = list(w.notes)
    for s in (minus, plus):
        if s.message:
            notes.append(s.message)
        if s.reentrance:
            notes.append(f"PPT re-entrance after transition at {s.transition}")
    return ThermalWindow(
        beta_o=w.beta_o,
        eta_minus=w.eta_minus,
        eta_plus=w.eta_plus,
        beta_minus_toth=w.beta_minus_toth,
        beta_plus_toth=w.beta_plus_toth,
        exact_beta_c=(minus.transition, plus.transition),
        notes=tuple(notes),
    )


def uhlmann_wehrl_check(h: Hamiltonian, betas) -> bool:
    """``spec(rho_{b_i})`` is more mixed than ``spec(rho_{b_{i+1}})`` for ascending ``b >= 0``."""
    betas = list(betas)
    if any(b < 0 for b in betas) or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("betas must be nonnegative and strictly increasing")
    specs = [spectrum(gibbs(h, b)) for b in betas]
    return all(majorizes(a, b) for a, b in zip(specs, specs[1:]))
