"""scikit-learn compatible wrappers.

Samples are density matrices: ``X`` is an array of shape
``(n_samples, D, D)`` or a sequence of :class:`DensityMatrix`. Nothing is
learned from data; ``fit`` only resolves the dimension-dependent constants
(``L`` and detector thresholds) so they can be inspected before use.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .detectors import (
    exact_critical_bracket,
    improved_spectral_detector,
    partial_sum_detector,
    partial_sum_spec,
    purity_detector,
    theorem1_detector,
    entropy_detector,
    PURITY,
    NEG_ENTROPY,
)
from .modulus import BISECTION_TOL, estimate_modulus, l_constant
from .simplex import partial_sums, to_barycentric
from .state import DensityMatrix, as_dims, spectrum, validate


def check_states(X, dims) -> list:
    """Validate ``X`` into a list of :class:`DensityMatrix` over ``dims``."""
    dims = as_dims(dims)
    if isinstance(X, DensityMatrix):
        X = [X]
    out = []
    for i, x in enumerate(X):
        if isinstance(x, DensityMatrix):
            if x.dims != dims:
                raise ValueError(f"sample {i}: dims {x.dims} != {dims}")
            out.append(x)
            continue
        try:
            out.append(validate(np.asarray(x), dims))
        except ValueError as e:
            raise ValueError(f"sample {i}: {e}") from None
    if not out:
        raise ValueError("X contains no samples")
    return out


class SpectrumTransformer(TransformerMixin, BaseEstimator):
    """Map states to ordered spectra, barycentric coordinates or partial sums."""

    REPRESENTATIONS = ("spectrum", "barycentric", "partial-sums")

    def __init__(self, dims=(2, 2), representation: str = "spectrum"):
        self.dims = dims
        self.representation = representation

    def fit(self, X=None, y=None):
        if self.representation not in self.REPRESENTATIONS:
            raise ValueError(f"representation must be one of {self.REPRESENTATIONS}")
        self.dims_ = as_dims(self.dims)
        self.n_features_out_ = self.dims_.total
        return self

    def transform(self, X):
        check_is_fitted(self, "dims_")
        rows = []
        for rho in check_states(X, self.dims_):
            lam = spectrum(rho)
            if self.representation == "barycentric":
                lam = to_barycentric(lam)
            elif self.representation == "partial-sums":
                lam = partial_sums(lam)
            rows.append(lam)
        return np.vstack(rows)


class SeparabilityModulusEstimator(TransformerMixin, BaseEstimator):
    """``transform`` gives one column, ``l(rho)`` (bracket midpoint when not exact)."""

    def __init__(self, dims=(2, 2), tol: float = BISECTION_TOL):
        self.dims = dims
        self.tol = tol

    def fit(self, X=None, y=None):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        self.dims_ = as_dims(self.dims)
        self.l_bound_ = l_constant(self.dims_)
        return self

    def brackets(self, X) -> list:
        check_is_fitted(self, "dims_")
        return [estimate_modulus(r, self.tol) for r in check_states(X, self.dims_)]

    def transform(self, X):
        return np.array([[m.value] for m in self.brackets(X)])


_DETECTORS = {
    "min-eigenvalue": theorem1_detector,
    "two-smallest-eigenvalues": improved_spectral_detector,
    "purity": purity_detector,
    "von-neumann-entropy": entropy_detector,
}


class SpectralSeparabilityClassifier(ClassifierMixin, BaseEstimator):
    """Predict ``True`` when some spectral detector certifies separability.

    ``False`` means *not certified*, not *entangled*. ``detectors`` selects
    from ``min-eigenvalue``, ``two-smallest-eigenvalues``, ``purity``,
    ``von-neumann-entropy`` and ``partial-sums``; ``None`` uses them all.
    """

    def __init__(self, dims=(2, 2), detectors=None):
        self.dims = dims
        self.detectors = detectors

    def _names(self):
        allowed = tuple(_DETECTORS) + ("partial-sums",)
        names = allowed if self.detectors is None else tuple(self.detectors)
        bad = [n for n in names if n not in allowed]
        if bad or not names:
            raise ValueError(f"unknown detectors {bad}; choose from {allowed}")
        return names

    def fit(self, X=None, y=None):
        self.dims_ = as_dims(self.dims)
        self.detector_names_ = self._names()
        self.l_bound_ = l_constant(self.dims_)
        D = self.dims_.total
        L = self.l_bound_.value
        th = {"min-eigenvalue": (1 - L) / D}
        if D >= 3:
            th["two-smallest-eigenvalues"] = (1 - L) / D
            th["purity"] = float(exact_critical_bracket(PURITY, self.dims_).lower)
        th["von-neumann-entropy"] = -float(exact_critical_bracket(NEG_ENTROPY, self.dims_).lower)
        for k in range(1, D):
            th[f"partial-sum-{k}"] = float(exact_critical_bracket(partial_sum_spec(k), self.dims_).lower)
        self.thresholds_ = th
        self.classes_ = np.array([False, True])
        return self

    def reports(self, X) -> list:
        """Per sample, the list of :class:`DetectorReport` that were run."""
        check_is_fitted(self, "thresholds_")
        out = []
        for rho in check_states(X, self.dims_):
            reps = []
            for name in self.detector_names_:
                if name == "partial-sums":
                    reps += [partial_sum_detector(rho, k) for k in range(1, rho.dim)]
                elif name in ("two-smallest-eigenvalues", "purity") and rho.dim < 3:
                    continue
                else:
                    reps.append(_DETECTORS[name](rho))
            out.append(reps)
        return out

    def predict(self, X):
        return np.array([any(r.certified for r in reps) for reps in self.reports(X)])
