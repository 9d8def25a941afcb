"""Spectral separability detectors and critical values of convex functions.

A unitarily invariant convex function ``F`` that is *good* (``F(rho) = F(tau)``
only at ``tau``) has a critical value ``C_F``: ``F(rho) <= C_F`` implies
separability. ``C_F`` is rarely known exactly; it is bracketed by

* ``C_L^-`` = F at spectrum ``L*e^(D-1) + (1-L)*e^(D)``,
* ``C_L^+`` = F at spectrum ``L*e^(1) + (1-L)*e^(D)``,

with sharper values for 2x2 and 2x3 systems. Detectors always certify
against the lower (sound) end of a bracket.

Entropy appears in two orientations. :class:`ConvexFunctionSpec` uses the
convex one, ``sum lam ln lam = -S``; reports use ``S`` itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .modulus import is_ppt_decisive, l_constant
from .simplex import vertex
from .state import DensityMatrix, DimsLike, as_dims, spectrum

CERT_SLACK = 1e-12

FUNCTION_NAMES = ("purity", "von-neumann-entropy-negated", "partial-sum")
VERDICTS = ("certified-separable", "inconclusive")
PROVENANCES = ("exact", "lower-bound", "upper-bound")


@dataclass(frozen=True)
class ConvexFunctionSpec:
    """Which unitarily invariant convex function to use.

    ``k`` is required for (and only for) ``"partial-sum"``.
    """

    name: str
    k: int | None = None

    def __post_init__(self):
        if self.name not in FUNCTION_NAMES:
            raise ValueError(f"unknown function {self.name!r}; expected one of {FUNCTION_NAMES}")
        if (self.name == "partial-sum") != (self.k is not None):
            raise ValueError("k must be given exactly for partial-sum")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def label(self) -> str:
        return f"partial-sum-{self.k}" if self.name == "partial-sum" else self.name

    def check_dims(self, D: int):
        if self.k is not None and not 1 <= self.k <= D - 1:
            raise ValueError(f"partial-sum index k={self.k} must lie in [1, {D - 1}]")

    def __call__(self, lam) -> float:
        """Evaluate on a spectrum (array of floats or of Fractions)."""
        if self.name == "purity":
            return sum(x * x for x in lam)
        if self.name == "partial-sum":
            return sum(lam[: self.k])
        return float(sum(x * math.log(x) for x in map(float, lam) if x > 0))


PURITY = ConvexFunctionSpec("purity")
NEG_ENTROPY = ConvexFunctionSpec("von-neumann-entropy-negated")


def partial_sum_spec(k: int) -> ConvexFunctionSpec:
    return ConvexFunctionSpec("partial-sum", k)


def evaluate(f: ConvexFunctionSpec, rho: DensityMatrix) -> float:
    """``F(rho)``, computed from the spectrum only."""
    f.check_dims(rho.dim)
    return float(f(spectrum(rho)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return -evaluate(NEG_ENTROPY, rho)


# -- brackets ---------------------------------------------------------------

def upper_spectrum(L, D: int) -> list:
    """Spectrum of ``L*phi + (1-L)*tau`` with ``phi`` pure."""
    base = (1 - L) / D
    return [L + base] + [base] * (D - 1)


def lower_spectrum(L, D: int) -> list:
    """Spectrum of ``L*omega + (1-L)*tau`` with ``spec(omega) = e^(D-1)``."""
    base = (1 - L) / D
    return [L / (D - 1) + base] * (D - 1) + [base]


def improved_family_spectrum(t, L, D: int) -> list:
    """Spectrum of ``t*sigma + (1-t)*L*omega + (1-t)*(1-L)*tau``.

    ``spec(sigma) = e^(D-1)``, ``spec(omega) = e^(D-2)`` with the support of
    ``omega`` inside that of ``sigma``, so all three are diagonal in one
    basis and the entries stay ordered for every ``t`` in ``[0, 1]``.
    """
    if D < 3:
        raise ValueError("the improved family needs D >= 3")
    base = (1 - t) * (1 - L) / D
    top = t / (D - 1) + (1 - t) * L / (D - 2) + base
    return [top] * (D - 2) + [t / (D - 1) + base, base]


def critical_bracket(f: ConvexFunctionSpec, dims: DimsLike) -> tuple:
    """``(C_L^-, C_L^+)`` for ``f`` (convex orientation).

    With more than two parties the upper end uses the bipartite-cut value
    ``2/(2+D)``, which bounds the unknown ``L`` from above.
    """
    dims = as_dims(dims)
    D = dims.total
    f.check_dims(D)
    lb = l_constant(dims)
    L_up = lb.value if lb.exact else 2 / (2 + D)
    return float(f(lower_spectrum(lb.value, D))), float(f(upper_spectrum(L_up, D)))


def entropy_bracket(dims: DimsLike) -> tuple:
    """Bracket on the entropy critical value ``C_S`` (physical orientation).

    ``S(rho) >= C_S`` implies separability; the bracket is
    ``(-C_L^+, -C_L^-)`` of the negated entropy.
    """
    lo, hi = critical_bracket(NEG_ENTROPY, dims)
    return -hi, -lo


def _minimize_on_grid(fun: Callable[[float], float], grid: int) -> tuple:
    ts = np.linspace(0.0, 1.0, grid)
    vals = np.array([fun(t) for t in ts])
    i = int(np.argmin(vals))
    best_t, best = float(ts[i]), float(vals[i])
    if 0 < i < grid - 1:
        try:
            res = optimize.minimize_scalar(
                fun, bracket=(ts[i - 1], ts[i], ts[i + 1]), method="golden",
                options={"xtol": 1e-12},
            )
            if 0.0 <= res.x <= 1.0 and res.fun < best:
                best_t, best = float(res.x), float(res.fun)
        except ValueError:
            # Flat cell (no strict interior minimum): the grid value stands.
            pass
    return best_t, best


def improved_lower_bound_inf(
    f: ConvexFunctionSpec,
    dims: DimsLike,
    grid: int = 1001,
    assume_hypothesis: bool = False,
) -> float:
    """``inf_t F(t*sigma + (1-t)*L*omega + (1-t)*(1-L)*tau)``, a lower bound on ``C_F``.

    The bound needs every state with spectrum ``e^(D-1)`` to be separable,
    which is proven for 2x2 and 2x3 only; other dims require
    ``assume_hypothesis=True``. The infimum is searched on a uniform grid
    and refined by golden section around the best cell.
    """
    dims = as_dims(dims)
    if grid < 100:
        raise ValueError("grid must have at least 100 points")
    if not (is_ppt_decisive(dims) or assume_hypothesis):
        raise ValueError(
            f"dims {dims.factors}: the improved bound is only proven for 2x2 and 2x3"
        )
    D = dims.total
    f.check_dims(D)
    L = l_constant(dims).value

    def section(t):
        return float(f(improved_family_spectrum(t, L, D)))

    return _minimize_on_grid(section, grid)[1]


# -- exact rational brackets -------------------------------------------------

def _exact_min_on_family(f: ConvexFunctionSpec, L: Fraction, D: int) -> Fraction:
    # Along the family every entry is affine in t: lam_i(t) = a_i + b_i t.
    a = improved_family_spectrum(Fraction(0), L, D)
    b = [x1 - x0 for x0, x1 in zip(a, improved_family_spectrum(Fraction(1), L, D))]
    if f.name == "partial-sum":
        return min(f(a), f([x + y for x, y in zip(a, b)]))
    if f.name == "purity":
        bb = sum(y * y for y in b)
        t = Fraction(0) if bb == 0 else -sum(x * y for x, y in zip(a, b)) / bb
        t = min(max(t, Fraction(0)), Fraction(1))
        return f(improved_family_spectrum(t, L, D))
    raise ValueError(f"{f.name} has no rational infimum")


@dataclass(frozen=True)
class Bracket:
    """Bracket ``lower <= C_F <= upper``; Fractions when the formulas are rational."""

    lower: object
    upper: object
    lower_source: str
    upper_source: str

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def exact_critical_bracket(f: ConvexFunctionSpec, dims: DimsLike) -> Bracket:
    """Best known bracket on ``C_F`` (convex orientation).

    Rational for purity and partial sums. Combines the general ``C_L^{+-}``
    bounds, the exact ``C[D-1] = (D+1)/(D+2)`` for two parties, the
    purity-implies-PPT threshold ``1/(D-1)`` and the improved family
    infimum where PPT decides separability.
    """
    dims = as_dims(dims)
    f.check_dims(dims.total)
    return _exact_critical_bracket(f, dims)


@lru_cache(maxsize=256)
def _exact_critical_bracket(f: ConvexFunctionSpec, dims) -> Bracket:
    D = dims.total
    rational = f.name != "von-neumann-entropy-negated"
    lb = l_constant(dims)
    L = lb.fraction
    # With more parties L is only bounded below; it cannot exceed the
    # bipartite-cut value, which therefore gives a sound upper end.
    L_up = L if lb.exact else Fraction(2, 2 + D)
    if not rational:
        L, L_up = float(L), float(L_up)
    lower, lower_src = f(lower_spectrum(L, D)), "C_L-"
    upper, upper_src = f(upper_spectrum(L_up, D)), "C_L+" if lb.exact else "C_L+(cut)"
    decisive = is_ppt_decisive(dims)
    if f.name == "partial-sum" and dims.n_factors == 2 and f.k == D - 1:
        lower, lower_src = Fraction(D + 1, D + 2), "bipartite-exact"
    if decisive:
        if rational:
            improved = _exact_min_on_family(f, L, D)
        else:
            improved = improved_lower_bound_inf(f, dims)
        if improved > lower:
            lower, lower_src = improved, "improved-family"
        if f.name == "purity":
            ppt = Fraction(1, D - 1)
            if ppt > lower:
                lower, lower_src = ppt, "purity-ppt"
    if not rational:
        lower, upper = float(lower), float(upper)
    return Bracket(lower, upper, lower_src, upper_src)


# -- detectors ---------------------------------------------------------------

@dataclass(frozen=True)
class DetectorReport:
    """Outcome of one spectral test.

    ``certify_when`` is ``"le"`` (value <= threshold certifies) or ``"ge"``.
    ``conditional`` marks a threshold that relies on an unproven hypothesis
    for these dims; such reports never certify.
    """

    detector_name: str
    value: float
    threshold: float
    verdict: str
    threshold_provenance: str
    certify_when: str
    bracket: tuple | None = None
    conditional: bool = False
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == "certified-separable"

    def to_dict(self) -> dict:
        return {
            "detector": self.detector_name,
            "value": self.value,
            "threshold": self.threshold,
            "certify_when": self.certify_when,
            "verdict": self.verdict,
            "threshold_provenance": self.threshold_provenance,
            "bracket": None if self.bracket is None else [float(x) for x in self.bracket],
            "conditional": self.conditional,
            "note": self.note,
        }


def _report(name, value, threshold, when, provenance, bracket=None, conditional=False, note=""):
    value, threshold = float(value), float(threshold)
    if when == "le":
        passed = value <= threshold + CERT_SLACK
    else:
        passed = value >= threshold - CERT_SLACK
    verdict = "certified-separable" if passed and not conditional else "inconclusive"
    return DetectorReport(name, value, threshold, verdict, provenance, when,
                          bracket, conditional, note)


def _l_provenance(dims) -> str:
    return "exact" if l_constant(dims).exact else "lower-bound"


def theorem1_detector(rho: DensityMatrix) -> DetectorReport:
    """Certify when the smallest eigenvalue is at least ``(1-L)/D``."""
    D = rho.dim
    L = l_constant(rho.dims).value
    return _report("min-eigenvalue", spectrum(rho)[-1], (1 - L) / D, "ge",
                   _l_provenance(rho.dims))


def improved_spectral_detector(rho: DensityMatrix) -> DetectorReport:
    """Certify when ``(1-c)*lam_D + c*lam_{D-1} >= (1-L)/D``, ``c = (1-L)(D-1)/D``.

    Valid when every state with spectrum ``e^(D-1)`` is separable, which
    holds for 2x2 and 2x3. For 2x3 the test reads ``3 lam_6 + 5 lam_5 >= 1``.
    Elsewhere the report is conditional and never certifies.
    """
    D = rho.dim
    L = l_constant(rho.dims).value
    c = (1 - L) * (D - 1) / D
    lam = spectrum(rho)
    value = (1 - c) * lam[-1] + c * lam[-2]
    conditional = not is_ppt_decisive(rho.dims)
    note = ""
    if conditional:
        note = "valid only if every state with spectrum e^(D-1) is separable (unproven here)"
    return _report("two-smallest-eigenvalues", value, (1 - L) / D, "ge",
                   _l_provenance(rho.dims), conditional=conditional, note=note)


def purity_detector(rho: DensityMatrix) -> DetectorReport:
    """Certify when ``tr(rho^2)`` is at most the best known lower end of ``C_F``.

    Exact ``1/3`` for two qubits; ``1/5`` (of ``[1/5, 7/32]``) for a qubit and
    a qutrit; ``C_L^-`` otherwise.
    """
    br = exact_critical_bracket(PURITY, rho.dims)
    prov = "exact" if br.exact else "lower-bound"
    return _report("purity", evaluate(PURITY, rho), br.lower, "le", prov,
                   bracket=(br.lower, br.upper), note=br.lower_source)


def partial_sum_detector(rho: DensityMatrix, k: int) -> DetectorReport:
    """Certify when the sum of the ``k`` largest eigenvalues is below ``C[k]``'s lower end."""
    f = partial_sum_spec(k)
    f.check_dims(rho.dim)
    br = exact_critical_bracket(f, rho.dims)
    prov = "exact" if br.exact else "lower-bound"
    return _report(f.label, evaluate(f, rho), br.lower, "le", prov,
                   bracket=(br.lower, br.upper), note=br.lower_source)


def entropy_detector(rho: DensityMatrix) -> DetectorReport:
    """Certify when ``S(rho)`` reaches the upper end of the ``C_S`` bracket."""
    br = exact_critical_bracket(NEG_ENTROPY, rho.dims)
    s_lo, s_hi = -br.upper, -br.lower
    prov = "exact" if br.exact else "upper-bound"
    return _report("von-neumann-entropy", von_neumann_entropy(rho), s_hi, "ge", prov,
                   bracket=(s_lo, s_hi), note=br.lower_source)


def run_detectors(rho: DensityMatrix) -> list:
    """Every detector applicable to ``rho``, in a fixed order."""
    reports = [
        theorem1_detector(rho),
        improved_spectral_detector(rho),
        purity_detector(rho),
        entropy_detector(rho),
    ]
    reports += [partial_sum_detector(rho, k) for k in range(1, rho.dim)]
    return reports


# -- goodness ---------------------------------------------------------------

def section_values(f, rho: DensityMatrix, ts: Sequence[float]) -> np.ndarray:
    """``F(t*rho + (1-t)*tau)`` along ``ts`` (the spectrum mixes affinely)."""
    lam = spectrum(rho)
    tau = np.full(lam.size, 1.0 / lam.size)
    return np.array([float(f(t * lam + (1 - t) * tau)) for t in ts])


def k_good_probe(
    f,
    dims: DimsLike,
    p: int,
    samples: int = 200,
    rng: np.random.Generator | None = None,
    n_s: int = 16,
    atol: float = 1e-13,
) -> bool:
    """Random search for a violation of ``p``-goodness.

    Samples ``spec(omega)`` in ``co(e^(1), ..., e^(D-p))`` and weights ``t_j``
    on the vertices ``e^(D-p+j)``, ``j < p``, then checks that
    ``s -> F(s*omega + sum_j t_j e^(D-p+j) + (1-t-s)*tau)`` rises strictly
    above its value at ``s = 0`` and never decreases on a grid of ``s``.
    ``f`` is a :class:`ConvexFunctionSpec` or any callable on spectra.
    """
    D = as_dims(dims).total
    if not 1 <= p <= D - 1:
        raise ValueError(f"p must lie in [1, {D - 1}]")
    rng = np.random.default_rng(0) if rng is None else rng
    verts = np.array([vertex(k, D) for k in range(1, D + 1)])
    tau = verts[-1]
    for _ in range(samples):
        x = rng.dirichlet(np.ones(D - p))
        omega = x @ verts[: D - p]
        w = rng.dirichlet(np.ones(p))  # last entry is the slack 1 - t
        t_j = w[:-1]
        t = float(t_j.sum())
        base = t_j @ verts[D - p: D - 1] if p > 1 else np.zeros(D)
        s_grid = np.linspace(0.0, 1.0 - t, n_s + 1)
        vals = np.array([float(f(s * omega + base + (1 - t - s) * tau)) for s in s_grid])
        if np.any(vals[1:] <= vals[0] + atol * max(1.0, abs(vals[0]))):
            return False
        if np.any(np.diff(vals) < -atol):
            return False
    return True
