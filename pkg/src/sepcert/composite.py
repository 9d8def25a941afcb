"""Tensor-product structure: products, marginals, partial transpose, PPT.

Subsystems are numbered from 1, as in ``(d_1, ..., d_N)``. The product
basis is ordered with the last factor fastest (``np.kron`` order).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .state import (
    MAX_DIMENSION,
    CompositeDims,
    DensityMatrix,
    DimsLike,
    _trusted,
    as_dims,
    haar_vector,
)

PPT_TOL = 1e-10


def _check_index(j: int, dims: CompositeDims) -> int:
    if not 1 <= j <= dims.n_factors:
        raise IndexError(f"subsystem index must be in [1, {dims.n_factors}], got {j}")
    return j - 1


def tensor(states: Sequence[DensityMatrix], max_dimension: int = MAX_DIMENSION) -> DensityMatrix:
    """Kronecker product in factor order; dims are concatenated."""
    if not states:
        raise ValueError("need at least one state")
    factors = tuple(d for s in states for d in s.dims.factors)
    dims = CompositeDims(factors, max_dimension)
    m = reduce(np.kron, (s.matrix for s in states))
    return _trusted(m, dims)


def _as_tensor(rho: DensityMatrix) -> np.ndarray:
    f = rho.dims.factors
    return rho.matrix.reshape(f + f)


def marginal(rho: DensityMatrix, j: int) -> DensityMatrix:
    """Reduced state of subsystem ``j`` (partial trace over all the others)."""
    k = _check_index(j, rho.dims)
    N = rho.dims.n_factors
    t = _as_tensor(rho)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:N])
    cols = list(letters[:N])
    cols[k] = letters[N]
    spec = "".join(rows) + "".join(cols) + "->" + rows[k] + cols[k]
    m = np.einsum(spec, t)
    return _trusted(m, CompositeDims((rho.dims.factors[k],)))


def partial_transpose(rho, j, dims: DimsLike | None = None) -> np.ndarray:
    """Transpose the indices of subsystem ``j`` (or of every index in ``j``).

    ``rho`` may be a :class:`DensityMatrix` or a raw matrix with ``dims``.
    The result is Hermitian with unit trace but need not be positive.
    """
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
        m = rho.matrix
    else:
        if dims is None:
            raise ValueError("dims are required for a raw matrix")
        dims = as_dims(dims)
        m = np.asarray(rho, dtype=complex)
    subsystems = [j] if np.isscalar(j) else list(j)
    N = dims.n_factors
    f = dims.factors
    t = m.reshape(f + f)
    axes = list(range(2 * N))
    for s in subsystems:
        k = _check_index(int(s), dims)
        axes[k], axes[N + k] = axes[N + k], axes[k]
    D = dims.total
    return np.transpose(t, axes).reshape(D, D)


@dataclass(frozen=True)
class PPTReport:
    subsystem_index: object
    min_pt_eigenvalue: float
    is_ppt: bool


def _ppt_report(rho: DensityMatrix, subsystems, tol: float) -> PPTReport:
    pt = partial_transpose(rho, subsystems)
    lam = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    return PPTReport(subsystems, lam, lam >= -tol)


def is_ppt(rho: DensityMatrix, tol: float = PPT_TOL) -> PPTReport:
    """PPT test of a bipartite state, transposing the second factor.

    Transposing the first factor instead gives the global transpose of the
    same matrix, so the spectrum (and the verdict) is identical.
    """
    if rho.dims.n_factors != 2:
        raise ValueError(
            f"is_ppt needs a bipartite state, got {rho.dims.n_factors} factors; "
            "use is_ppt_bipartition for more factors"
        )
    return _ppt_report(rho, 2, tol)


def is_ppt_bipartition(
    rho: DensityMatrix, part: Iterable[int], tol: float = PPT_TOL
) -> PPTReport:
    """PPT across the cut ``part | rest`` of a multipartite state.

    The factors listed in ``part`` (1-based) are merged into one party and
    the remaining factors into the other; the transpose is taken on
    ``part``. Only a necessary condition for separability.
    """
    part = tuple(sorted(set(int(p) for p in part)))
    N = rho.dims.n_factors
    if not part or len(part) == N:
        raise ValueError("a bipartition needs a nonempty proper subset of factors")
    for p in part:
        _check_index(p, rho.dims)
    return _ppt_report(rho, part, tol)


def bipartitions(n_factors: int):
    """Each cut ``part | rest`` of ``{1..N}`` once (``part`` contains factor 1)."""
    from itertools import combinations

    others = range(2, n_factors + 1)
    for r in range(0, n_factors - 1):
        for rest in combinations(others, r):
            yield (1,) + rest


@dataclass(frozen=True, eq=False)
class PureProductState:
    local_vectors: tuple

    def __post_init__(self):
        for v in self.local_vectors:
            if abs(np.linalg.norm(v) - 1.0) > 1e-10:
                raise ValueError("local vectors must have unit norm")

    @property
    def dims(self) -> CompositeDims:
        return CompositeDims(tuple(len(v) for v in self.local_vectors))

    def vector(self) -> np.ndarray:
        return reduce(np.kron, self.local_vectors)

    def density_matrix(self) -> DensityMatrix:
        v = self.vector()
        return _trusted(np.outer(v, v.conj()), self.dims)


def sample_pure_product(dims: DimsLike, rng: np.random.Generator) -> PureProductState:
    """Product of independent Haar-random local unit vectors."""
    dims = as_dims(dims)
    return PureProductState(tuple(haar_vector(d, rng) for d in dims.factors))


def random_separable_state(
    dims: DimsLike, rng: np.random.Generator, n_terms: int = 8
) -> DensityMatrix:
    """Random convex mixture of sampled pure product states."""
    dims = as_dims(dims)
    w = rng.dirichlet(np.ones(n_terms))
    m = sum(wi * sample_pure_product(dims, rng).density_matrix().matrix for wi in w)
    return _trusted(m, dims)
