"""Density matrices on composite Hilbert spaces.

Product basis convention: row-major with the last factor varying fastest,
i.e. the ordering produced by ``np.kron(a_1, np.kron(a_2, ...))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
ORDER_TOL = 1e-12
UNITARY_TOL = 1e-10
MAX_DIMENSION = 64


class StateValidationError(ValueError):
    """Raised when a matrix is not a valid density matrix for the given dims."""


@dataclass(frozen=True)
class CompositeDims:
    """Ordered local dimensions ``(d_1, ..., d_N)`` of a composite system."""

    factors: tuple
    max_dimension: int = MAX_DIMENSION

    def __post_init__(self):
        factors = tuple(int(d) for d in self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) < 1:
            raise ValueError("at least one factor is required")
        if any(d < 2 for d in factors):
            raise ValueError(f"every local dimension must be >= 2, got {factors}")
        if self.total > self.max_dimension:
            raise ValueError(
                f"total dimension {self.total} exceeds the cap {self.max_dimension}"
            )

    @property
    def total(self) -> int:
        return int(np.prod(self.factors))

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def __str__(self):
        return "x".join(str(d) for d in self.factors)


DimsLike = Union[CompositeDims, Sequence[int]]


def as_dims(dims: DimsLike, max_dimension: int | None = None) -> CompositeDims:
    if isinstance(dims, CompositeDims):
        if max_dimension is None or max_dimension == dims.max_dimension:
            return dims
        return CompositeDims(dims.factors, max_dimension)
    return CompositeDims(tuple(dims), max_dimension or MAX_DIMENSION)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state. Build instances with :func:`validate`."""

    dims: CompositeDims
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.dims.total

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims.factors})"


def _trusted(matrix: np.ndarray, dims: CompositeDims) -> DensityMatrix:
    # Internal constructor for results of closed operations on valid states.
    m = 0.5 * (matrix + matrix.conj().T)
    return DensityMatrix(dims, _frozen(m))


def validate(matrix, dims: DimsLike, *, psd_tol: float = PSD_TOL) -> DensityMatrix:
    """Check ``matrix`` is a density matrix on ``dims`` and wrap it.

    The Hermitian part ``(A + A^dagger)/2`` is what gets stored.

    Raises
    ------
    StateValidationError
        On shape mismatch, non-Hermiticity, negative eigenvalues or a
        trace different from one (all beyond the module tolerances).
    """
    dims = as_dims(dims)
    a = np.asarray(matrix, dtype=complex)
    D = dims.total
    if a.shape != (D, D):
        raise StateValidationError(
            f"matrix shape {a.shape} does not match dims {dims.factors} (D={D})"
        )
    if not np.all(np.isfinite(a)):
        raise StateValidationError("matrix has non-finite entries")
    herm_err = np.max(np.abs(a - a.conj().T))
    if herm_err > HERMITIAN_TOL:
        raise StateValidationError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
    a = 0.5 * (a + a.conj().T)
    tr = np.trace(a).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise StateValidationError(f"trace is {tr!r}, expected 1")
    lam_min = np.linalg.eigvalsh(a)[0]
    if lam_min < -psd_tol:
        raise StateValidationError(f"matrix has negative eigenvalue {lam_min:.3e}")
    return DensityMatrix(dims, _frozen(a))


def maximally_mixed(dims: DimsLike) -> DensityMatrix:
    dims = as_dims(dims)
    return DensityMatrix(dims, _frozen(np.eye(dims.total) / dims.total))


def pure_state(vector, dims: DimsLike) -> DensityMatrix:
    """Projector onto ``vector`` (normalised here)."""
    v = np.asarray(vector, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return validate(np.outer(v, v.conj()), dims)


def eigh_sorted(rho: DensityMatrix):
    """Eigenvalues (nonincreasing) and matching eigenvectors as columns.

    Ties keep the solver's order; ``numpy.linalg.eigh`` returns ascending
    values so the reversal is stable within degenerate blocks.
    """
    w, v = np.linalg.eigh(rho.matrix)
    return w[::-1], v[:, ::-1]


def _clean_spectrum(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.min() < -PSD_TOL:
        raise StateValidationError(f"negative eigenvalue {w.min():.3e} beyond tolerance")
    w = np.clip(w, 0.0, None)
    s = w.sum()
    if abs(s - 1.0) <= TRACE_TOL:
        w = w / s
    return w


def spectrum(rho: DensityMatrix) -> np.ndarray:
    """``spec(rho)``: eigenvalues with multiplicity, sorted nonincreasingly.

    Round-off negatives are clamped to zero and the vector renormalised.
    The result is a read-only array satisfying :func:`check_spectrum`.
    """
    w, _ = eigh_sorted(rho)
    w = _clean_spectrum(w)
    w.setflags(write=False)
    return w


def check_spectrum(values, *, name: str = "spectrum") -> np.ndarray:
    """Validate a point of the spectral simplex and return it as an array.

    Entries must be nonincreasing and nonnegative within ``1e-12`` and sum
    to one within ``1e-10``.
    """
    lam = np.asarray(values, dtype=float).ravel()
    if lam.size < 1:
        raise ValueError(f"{name} is empty")
    if np.any(np.diff(lam) > ORDER_TOL):
        raise ValueError(f"{name} is not nonincreasing: {lam}")
    if lam[-1] < -ORDER_TOL:
        raise ValueError(f"{name} has negative entries: {lam}")
    if abs(lam.sum() - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} does not sum to 1 (sum={lam.sum()!r})")
    return lam


def min_eigenvalue(rho: DensityMatrix) -> float:
    """``s_-(rho)``, the smallest eigenvalue. At most ``1/D``."""
    return float(spectrum(rho)[-1])


def mix_with_trace(rho: DensityMatrix, t: float) -> DensityMatrix:
    """``rho_t = t*rho + (1 - t)*tau`` with ``tau`` the maximally mixed state."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {t}")
    D = rho.dim
    return _trusted(t * rho.matrix + (1.0 - t) * np.eye(D) / D, rho.dims)


def unitary_conjugate(rho: DensityMatrix, u) -> DensityMatrix:
    """``u rho u^dagger``; the spectrum is unchanged."""
    u = np.asarray(u, dtype=complex)
    D = rho.dim
    if u.shape != (D, D):
        raise ValueError(f"unitary has shape {u.shape}, expected {(D, D)}")
    err = np.max(np.abs(u @ u.conj().T - np.eye(D)))
    if err > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (deviation {err:.3e})")
    return _trusted(u @ rho.matrix @ u.conj().T, rho.dims)


def cyclic_average(rho: DensityMatrix) -> DensityMatrix:
    """Average of the ``D`` cyclic reassignments of eigenvalues to eigenvectors.

    Every term is unitarily equivalent to ``rho``; the average is ``tau``.
    """
    w, v = eigh_sorted(rho)
    D = rho.dim
    acc = np.zeros((D, D), dtype=complex)
    for shift in range(D):
        acc += (v * np.roll(w, -shift)) @ v.conj().T
    return _trusted(acc / D, rho.dims)


def convex_combination(weights: Iterable[float], states: Sequence[DensityMatrix]) -> DensityMatrix:
    weights = np.asarray(list(weights), dtype=float)
    if len(weights) != len(states) or len(states) == 0:
        raise ValueError("need one weight per state")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > TRACE_TOL:
        raise ValueError("weights must be nonnegative and sum to 1")
    dims = states[0].dims
    if any(s.dims.factors != dims.factors for s in states):
        raise ValueError("all states must share the same dims")
    m = reduce(lambda a, b: a + b, (w * s.matrix for w, s in zip(weights, states)))
    return _trusted(m, dims)


# -- random sampling ---------------------------------------------------------

def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector uniformly distributed on the complex sphere."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(dims: DimsLike, rng: np.random.Generator) -> DensityMatrix:
    dims = as_dims(dims)
    v = haar_vector(dims.total, rng)
    return _trusted(np.outer(v, v.conj()), dims)


def random_density_matrix(
    dims: DimsLike, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Induced-measure random state ``G G^dagger / tr`` with ``G`` of shape ``D x rank``."""
    dims = as_dims(dims)
    D = dims.total
    k = D if rank is None else int(rank)
    g = rng.standard_normal((D, k)) + 1j * rng.standard_normal((D, k))
    m = g @ g.conj().T
    return _trusted(m / np.trace(m).real, dims)


def state_with_spectrum(lam, u, dims: DimsLike) -> DensityMatrix:
    """``u diag(lam) u^dagger`` for a spectral vector ``lam``."""
    dims = as_dims(dims)
    lam = np.asarray(lam, dtype=float)
    u = np.asarray(u, dtype=complex)
    return _trusted((u * lam) @ u.conj().T, dims)
