"""Seeded property suites.

Each check draws from its own RNG stream derived from ``(seed, suite,
check)``, so results do not depend on which other suites run. A failing
check keeps the first offending state so it can be written to disk.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import thermal
from .composite import is_ppt, partial_transpose, random_separable_state
from .detectors import (
    NEG_ENTROPY,
    PURITY,
    exact_critical_bracket,
    improved_family_spectrum,
    improved_spectral_detector,
    k_good_probe,
    partial_sum_spec,
    run_detectors,
    section_values,
    theorem1_detector,
)
from .io import write_state
from .modulus import (
    convexity_lower_bound,
    gap_lower_bound,
    hat_moduli,
    l_constant,
    modulus_of_mixture,
    modulus_ppt,
    one_over_l_convexity_check,
    spectral_lower_bound,
)
from .simplex import (
    from_barycentric,
    gap_representation,
    majorizes,
    partial_sums,
    to_barycentric,
)
from .state import (
    DensityMatrix,
    _trusted,
    as_dims,
    cyclic_average,
    haar_unitary,
    maximally_mixed,
    mix_with_trace,
    pure_state,
    random_density_matrix,
    random_pure_state,
    spectrum,
    state_with_spectrum,
)

logger = logging.getLogger(__name__)

SUITES = ("simplex", "gap", "ppt-appendixA", "modulus", "detectors", "thermal")
DEFAULT_SAMPLES = {
    "simplex": 1000,
    "gap": 100,
    "ppt-appendixA": 500,
    "modulus": 200,
    "detectors": 2000,
    "thermal": 20,
}


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    samples: int
    detail: str = ""
    counterexample: DensityMatrix | None = field(default=None, repr=False)
    counterexample_path: str | None = None

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "check": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "detail": self.detail,
            "counterexample": self.counterexample_path,
        }


class _Fail(Exception):
    def __init__(self, detail, state=None):
        super().__init__(detail)
        self.state = state


def _require(cond, detail, state=None):
    if not cond:
        raise _Fail(detail, state)


# -- samplers ---------------------------------------------------------------

def bell_state() -> DensityMatrix:
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return pure_state(v, (2, 2))


def werner(t: float) -> DensityMatrix:
    return mix_with_trace(bell_state(), t)


def sorted_dirichlet(d: int, rng) -> np.ndarray:
    return np.sort(rng.dirichlet(np.ones(d)))[::-1]


def mixed_ensemble(dims, rng) -> DensityMatrix:
    """Random state: Ginibre of random rank, mixed toward ``tau`` by a random amount."""
    dims = as_dims(dims)
    rank = int(rng.integers(1, dims.total + 1))
    rho = random_density_matrix(dims, rng, rank=rank)
    return mix_with_trace(rho, float(rng.uniform(0.0, 1.0)))


def spectrum_with_floor(D: int, floor: float, rng) -> np.ndarray:
    """Uniform point of the simplex conditioned on every entry being ``>= floor``."""
    return np.sort(floor + (1 - D * floor) * rng.dirichlet(np.ones(D)))[::-1]


def two_eigenvalue_region(dims, rng, max_tries: int = 10000) -> np.ndarray:
    """Spectrum with ``(1-c) lam_D + c lam_{D-1} >= (1-L)/D`` by rejection."""
    dims = as_dims(dims)
    D = dims.total
    L = l_constant(dims).value
    c = (1 - L) * (D - 1) / D
    for _ in range(max_tries):
        a = rng.uniform()
        lam = np.sort(a / D + (1 - a) * rng.dirichlet(np.ones(D)))[::-1]
        if (1 - c) * lam[-1] + c * lam[-2] >= (1 - L) / D:
            return lam
    raise RuntimeError("rejection sampler did not converge")


# -- simplex ----------------------------------------------------------------

def _chk_roundtrip(rng, n):
    for d in (3, 4, 6):
        for _ in range(n):
            lam = sorted_dirichlet(d, rng)
            back = from_barycentric(to_barycentric(lam))
            _require(np.max(np.abs(back - lam)) <= 1e-12, f"round trip drift {lam}")


def _chk_partial_sum_bounds(rng, n):
    for d in (3, 4, 6):
        k = np.arange(1, d + 1)
        for _ in range(n):
            lam = sorted_dirichlet(d, rng)
            s = partial_sums(lam)
            ok = (1 / d - 1e-12 <= lam[0] <= 1 + 1e-12
                  and np.all(lam >= -1e-12) and np.all(lam <= 1 / k + 1e-12)
                  and np.all(s >= k / d - 1e-12) and np.all(s <= 1 + 1e-12))
            _require(ok, f"partial-sum bounds fail for {lam}")


def _doubly_stochastic_image(mu, rng):
    d = mu.size
    w = rng.dirichlet(np.ones(4))
    perms = [rng.permutation(d) for _ in range(4)]
    return np.sort(sum(wi * mu[p] for wi, p in zip(w, perms)))[::-1]


def _chk_majorization_transfer(rng, n):
    fs = [PURITY, NEG_ENTROPY] + [partial_sum_spec(k) for k in (1, 2, 3)]
    for _ in range(n // 10 or 1):
        dims = (2, 2) if rng.uniform() < 0.5 else (2, 3)
        D = as_dims(dims).total
        mu = sorted_dirichlet(D, rng)
        lam = _doubly_stochastic_image(mu, rng)  # more mixed than mu
        _require(majorizes(lam, mu), "doubly stochastic image not majorized")
        rho = state_with_spectrum(lam, haar_unitary(D, rng), dims)
        phi = state_with_spectrum(mu, haar_unitary(D, rng), dims)
        for f in fs:
            a, b = f(spectrum(rho)), f(spectrum(phi))
            _require(a <= b + 1e-10, f"{f.label}: F(rho)={a} > F(phi)={b}", rho)


def _chk_cyclic_average(rng, n):
    for _ in range(n // 10 or 1):
        dims = [(2, 2), (2, 3), (3,)][int(rng.integers(3))]
        rho = random_density_matrix(dims, rng)
        avg = cyclic_average(rho)
        tau = maximally_mixed(dims)
        _require(np.max(np.abs(avg.matrix - tau.matrix)) <= 1e-10, "cyclic average != tau", rho)


def _chk_nonconvex_witness(rng, n):
    # tau is the average of the basis projectors, yet lam_min(tau) exceeds
    # the average of their lam_min values, so lam_min is not convex.
    for d in (2, 3, 4, 6):
        basis = np.eye(d)
        avg = np.mean([spectrum(pure_state(basis[i], (d,)))[-1] for i in range(d)])
        at_tau = spectrum(maximally_mixed((d,)))[-1]
        _require(at_tau > avg and abs(at_tau - 1 / d) <= 1e-12, "min-eigenvalue witness failed")


def _chk_uhlmann_wehrl(rng, n):
    for _ in range(max(1, n // 50)):
        D = 4
        a = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
        h = thermal.Hamiltonian.from_matrix(a + a.conj().T, (2, 2))
        betas = np.sort(rng.uniform(0, 3, size=20))
        _require(thermal.uhlmann_wehrl_check(h, betas), "Gibbs spectra not a majorization chain")


def _chk_monotone_section(rng, n):
    ts = np.linspace(0, 1, 41)
    fs = [PURITY, NEG_ENTROPY, partial_sum_spec(1), partial_sum_spec(2)]
    for _ in range(n // 10 or 1):
        rho = random_density_matrix((2, 3), rng)
        for f in fs:
            v = section_values(f, rho, ts)
            _require(np.all(np.diff(v) >= -1e-12) and v[-1] > v[0],
                     f"{f.label} section not increasing", rho)


# -- gap --------------------------------------------------------------------

def _chk_gap(rng, n):
    for D, dims in ((4, (2, 2)), (6, (2, 3))):
        for _ in range(n):
            rho = random_density_matrix(dims, rng, rank=int(rng.integers(1, D + 1)))
            gr = gap_representation(rho)
            lam = spectrum(rho)
            _require(np.all(gr.mu >= -1e-12), "negative gap weight", rho)
            _require(abs(gr.mu.sum() - (1 - D * lam[-1])) <= 1e-10, "gap weights sum", rho)
            _require(np.max(np.abs(gr.hat_states[-1].matrix - np.eye(D) / D)) <= 1e-10,
                     "last vertex is not tau", rho)
            _require(np.max(np.abs(gr.reconstruct() - rho.matrix)) <= 1e-10,
                     "reconstruction", rho)
            h = [x.matrix for x in gr.hat_states]
            for j in range(D):
                for k in range(D):
                    lhs = h[j] @ h[k]
                    rhs = h[min(j, k)] / (max(j, k) + 1)
                    _require(np.max(np.abs(lhs - rhs)) <= 1e-10,
                             f"product identity j={j + 1} k={k + 1}", rho)


# -- complement-of-pure property --------------------------------------------

def complement_state(psi, dims) -> DensityMatrix:
    """``(1 - |psi><psi|)/(D-1)``."""
    dims = as_dims(dims)
    D = dims.total
    p = np.outer(psi, psi.conj())
    return _trusted((np.eye(D) - p) / (D - 1), dims)


def _chk_complement_ppt(rng, n):
    for dims in ((2, 2), (2, 3), (3, 3)):
        D = as_dims(dims).total
        for _ in range(n):
            psi = rng.normal(size=D) + 1j * rng.normal(size=D)
            psi /= np.linalg.norm(psi)
            rho = complement_state(psi, dims)
            pt = partial_transpose(rho, 2)
            m = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
            _require(m >= -1e-12, f"{dims}: min PT eigenvalue {m}", rho)


def _chk_separable_ppt(rng, n):
    for dims in ((2, 2), (2, 3), (3, 3)):
        for _ in range(max(1, n // 5)):
            rho = random_separable_state(dims, rng, n_terms=int(rng.integers(1, 10)))
            rep = is_ppt(rho)
            _require(rep.is_ppt, f"separable mixture has PT eigenvalue {rep.min_pt_eigenvalue}", rho)


# -- modulus ----------------------------------------------------------------

def _chk_bell(rng, n):
    m = modulus_ppt(bell_state())
    _require(abs(m.value - 1 / 3) <= 1e-9, f"Bell modulus {m.value}")


def _chk_floor(rng, n):
    for dims in ((2, 2), (2, 3)):
        L = l_constant(dims).value
        for _ in range(n):
            rho = random_pure_state(dims, rng) if rng.uniform() < 0.5 else random_density_matrix(dims, rng)
            v = modulus_ppt(rho).value
            _require(v >= L - 1e-9, f"modulus {v} below L={L}", rho)


def _chk_ppt_monotone_grid(rng, n):
    ts = np.linspace(0, 1, 21)
    for _ in range(max(1, n // 5)):
        dims = (2, 2) if rng.uniform() < 0.5 else (2, 3)
        rho = random_density_matrix(dims, rng, rank=1 + int(rng.integers(2)))
        flags = [is_ppt(mix_with_trace(rho, t)).is_ppt for t in ts]
        # once PPT fails it must keep failing
        first = flags.index(False) if False in flags else len(flags)
        _require(not any(flags[first:]), "PPT not monotone along the section", rho)


def _chk_mixture_identity(rng, n):
    for _ in range(n):
        dims = (2, 2) if rng.uniform() < 0.5 else (2, 3)
        rho = random_density_matrix(dims, rng, rank=1 + int(rng.integers(3)))
        t = float(rng.uniform(0.05, 1.0))
        chk = modulus_of_mixture(rho, t)
        _require(chk.holds(2e-6), f"l(rho_t) {chk.lhs} vs {chk.rhs} at t={t}", rho)


def _chk_convexity(rng, n):
    for _ in range(n):
        r1 = random_density_matrix((2, 2), rng, rank=1 + int(rng.integers(4)))
        r2 = random_density_matrix((2, 2), rng, rank=1 + int(rng.integers(4)))
        t = float(rng.uniform())
        _require(one_over_l_convexity_check(r1, r2, t, slack=1e-6), "1/l not convex", r1)


def _chk_harmonic_bounds(rng, n):
    for _ in range(max(1, n // 2)):
        dims = (2, 2) if rng.uniform() < 0.5 else (2, 3)
        rho = random_density_matrix(dims, rng)
        exact = modulus_ppt(rho)
        spec_b = spectral_lower_bound(rho)
        gap_b = gap_lower_bound(rho, hat_moduli(rho))
        _require(spec_b <= exact.upper + 1e-9, "spectral bound above exact", rho)
        _require(gap_b <= exact.upper + 1e-9, "gap bound above exact", rho)
        _require(gap_b >= spec_b - 1e-9, "gap bound weaker than spectral bound", rho)
        _require(convexity_lower_bound([(1.0, exact)]) <= exact.upper, "harmonic identity", rho)


# -- detectors --------------------------------------------------------------

def _certified_states(dims, rng, n):
    """Random states biased toward the certified region, plus boundary cases."""
    dims = as_dims(dims)
    D = dims.total
    L = l_constant(dims).value
    for i in range(n):
        u = haar_unitary(D, rng)
        r = i % 4
        if r == 0:
            yield mixed_ensemble(dims, rng)
        elif r == 1:
            yield state_with_spectrum(spectrum_with_floor(D, (1 - L) / D, rng), u, dims)
        elif r == 2:
            yield state_with_spectrum(two_eigenvalue_region(dims, rng), u, dims)
        else:
            t = float(rng.uniform())
            yield state_with_spectrum(np.array(improved_family_spectrum(t, L, D)), u, dims)


def _chk_soundness(rng, n):
    for dims in ((2, 2), (2, 3)):
        for rho in _certified_states(dims, rng, n):
            reps = run_detectors(rho)
            if any(r.certified for r in reps):
                rep = is_ppt(rho)
                names = [r.detector_name for r in reps if r.certified]
                _require(rep.is_ppt, f"{dims}: certified by {names} but min PT eigenvalue "
                         f"{rep.min_pt_eigenvalue}", rho)


def _chk_tightness(rng, n):
    for dims in ((2, 2), (2, 3)):
        dims = as_dims(dims)
        D = dims.total
        L = l_constant(dims).value
        d = dims.factors[0]
        v = np.zeros(D, dtype=complex)
        for i in range(d):
            v[i * dims.factors[1] + i] = 1 / math.sqrt(d)
        rho = mix_with_trace(pure_state(v, dims), L + 1e-3)
        _require(not is_ppt(rho).is_ppt, "state just above L passes PPT", rho)
        lam = spectrum(rho)
        for f in [PURITY] + [partial_sum_spec(k) for k in range(1, D)]:
            br = exact_critical_bracket(f, dims)
            _require(f(lam) > float(br.upper), f"{f.label} not above bracket upper end", rho)
        _require(not any(r.certified for r in run_detectors(rho)), "entangled state certified", rho)


def _chk_consistency(rng, n):
    for dims in ((2, 2), (2, 3)):
        for rho in _certified_states(dims, rng, max(1, n // 4)):
            if theorem1_detector(rho).certified:
                _require(improved_spectral_detector(rho).certified,
                         "min-eigenvalue certifies but the two-eigenvalue test does not", rho)


def _chk_brackets(rng, n):
    for dims in ((2, 2), (2, 3), (3, 3), (2, 4), (2, 2, 2)):
        D = as_dims(dims).total
        for k in range(1, D):
            br = exact_critical_bracket(partial_sum_spec(k), dims)
            _require(br.lower <= br.upper, f"{dims} C[{k}] bracket inverted")
        if len(as_dims(dims).factors) == 2:
            br = exact_critical_bracket(partial_sum_spec(D - 1), dims)
            L = l_constant(dims).fraction
            _require(br.lower == br.upper == 1 - (1 - L) / D, f"{dims} C[D-1] not exact")


def _chk_k_good(rng, n):
    for dims in ((2, 2), (2, 3)):
        D = as_dims(dims).total
        for f in (PURITY, partial_sum_spec(1), partial_sum_spec(D - 1)):
            for p in range(1, D):
                _require(k_good_probe(f, dims, p, samples=max(5, n // 100), rng=rng),
                         f"{f.label} not {p}-good on {dims}")


# -- thermal ----------------------------------------------------------------

def heisenberg() -> thermal.Hamiltonian:
    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1, -1])
    return thermal.Hamiltonian.from_matrix(sum(np.kron(a, a) for a in (x, y, z)), (2, 2))


def random_hamiltonian(dims, rng) -> thermal.Hamiltonian:
    D = as_dims(dims).total
    a = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    return thermal.Hamiltonian.from_matrix((a + a.conj().T) / 2, dims)


def _chk_heisenberg(rng, n):
    h = heisenberg()
    target = math.log(3) / 4
    w = thermal.thermal_window(h, restarts=8, seed=int(rng.integers(2**31)))
    _require(abs(w.exact_beta_c[1] - target) <= 1e-6, f"beta_c = {w.exact_beta_c[1]}")
    _require(abs(w.beta_minus_toth - target) <= 1e-4, f"beta_- = {w.beta_minus_toth}")
    _require(abs(w.eta_minus + 1) <= 1e-6, f"eta_- = {w.eta_minus}")
    _require(abs(w.beta_o - math.log(1.5) / 4) <= 1e-12, f"beta_o = {w.beta_o}")


def _chk_beta_o(rng, n):
    for dims in ((2, 2), (2, 3), (2, 2, 2)):
        for _ in range(max(1, n // 4)):
            h = random_hamiltonian(dims, rng)
            bo = thermal.beta_o_bound(h)
            for b in (-bo, -bo / 2, 0.0, bo / 3, bo):
                rho = thermal.gibbs(h, b)
                _require(theorem1_detector(rho).certified, f"{dims}: beta={b} not certified", rho)


def _chk_window_order(rng, n):
    for _ in range(max(1, n // 4)):
        dims = (2, 2) if rng.uniform() < 0.5 else (2, 3)
        h = random_hamiltonian(dims, rng)
        w = thermal.thermal_window(h, beta_max=20.0, restarts=8, seed=int(rng.integers(2**31)))
        lo, hi = w.exact_beta_c
        if hi is not None:
            _require(hi >= w.beta_o - 1e-9, f"beta_c^+ {hi} < beta_o {w.beta_o}")
            if w.beta_minus_toth is not None:
                _require(hi <= w.beta_minus_toth + 1e-6, f"beta_c^+ {hi} > beta_- {w.beta_minus_toth}")
        if lo is not None:
            _require(lo <= -w.beta_o + 1e-9, f"beta_c^- {lo} > -beta_o")
            if w.beta_plus_toth is not None:
                _require(lo >= w.beta_plus_toth - 1e-6, f"beta_c^- {lo} < beta_+ {w.beta_plus_toth}")


def _chk_energy_decreasing(rng, n):
    for _ in range(max(1, n // 4)):
        h = random_hamiltonian((2, 3), rng)
        bs = np.linspace(-5, 5, 101)
        u = np.array([thermal.energy(h, b) for b in bs])
        _require(np.all(np.diff(u) < 0), "U(beta) not strictly decreasing")


def _chk_eta_bounds(rng, n):
    for _ in range(max(1, n // 4)):
        h = random_hamiltonian((2, 2), rng)
        ex = thermal.eta_extrema(h, restarts=8, seed=int(rng.integers(2**31)))
        eps = h.energies
        _require(ex.eta_minus >= eps[0] - 1e-10 and ex.eta_plus <= eps[-1] + 1e-10,
                 "product energies outside the spectrum")
        rho = ex.argmin.density_matrix()
        _require(abs(h.expectation(rho) - ex.eta_minus) <= 1e-9, "argmin energy mismatch")


_CHECKS = {
    "simplex": [
        ("barycentric-round-trip", _chk_roundtrip),
        ("partial-sum-bounds", _chk_partial_sum_bounds),
        ("majorization-monotonicity", _chk_majorization_transfer),
        ("cyclic-average", _chk_cyclic_average),
        ("min-eigenvalue-nonconvexity", _chk_nonconvex_witness),
        ("uhlmann-wehrl-chain", _chk_uhlmann_wehrl),
        ("monotone-section", _chk_monotone_section),
    ],
    "gap": [("gap-identities", _chk_gap)],
    "ppt-appendixA": [
        ("complement-of-pure-is-ppt", _chk_complement_ppt),
        ("separable-mixtures-are-ppt", _chk_separable_ppt),
    ],
    "modulus": [
        ("bell-modulus", _chk_bell),
        ("L-floor", _chk_floor),
        ("ppt-monotone-along-section", _chk_ppt_monotone_grid),
        ("mixture-identity", _chk_mixture_identity),
        ("inverse-modulus-convexity", _chk_convexity),
        ("harmonic-and-gap-bounds", _chk_harmonic_bounds),
    ],
    "detectors": [
        ("soundness", _chk_soundness),
        ("tightness-above-L", _chk_tightness),
        ("min-eigenvalue-implies-two-eigenvalue", _chk_consistency),
        ("partial-sum-brackets", _chk_brackets),
        ("k-good-probes", _chk_k_good),
    ],
    "thermal": [
        ("heisenberg-window", _chk_heisenberg),
        ("beta_o-certifies", _chk_beta_o),
        ("window-ordering", _chk_window_order),
        ("energy-decreasing", _chk_energy_decreasing),
        ("product-energy-range", _chk_eta_bounds),
    ],
}


def suite_names(name: str) -> tuple:
    if name == "all":
        return SUITES
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    return (name,)


def run_suite(name: str, samples: int | None = None, seed: int = 42,
              counterexample_dir=None) -> list:
    """Run one suite (or ``"all"``) and return a :class:`CheckResult` per check."""
    results = []
    for suite in suite_names(name):
        n = DEFAULT_SAMPLES[suite] if samples is None else int(samples)
        if n < 1:
            raise ValueError("samples must be >= 1")
        s_idx = SUITES.index(suite)
        for c_idx, (check, fn) in enumerate(_CHECKS[suite]):
            rng = np.random.default_rng([seed, s_idx, c_idx])
            t0 = time.perf_counter()
            try:
                fn(rng, n)
                res = CheckResult(suite, check, True, n)
            except _Fail as e:
                res = CheckResult(suite, check, False, n, str(e), e.state)
                if e.state is not None and counterexample_dir is not None:
                    path = Path(counterexample_dir) / f"counterexample-{suite}-{check}.json"
                    write_state(path, e.state)
                    res.counterexample_path = str(path)
            logger.info("%s/%s %s in %.2fs", suite, check,
                        "ok" if res.passed else "FAIL", time.perf_counter() - t0)
            results.append(res)
    return results
