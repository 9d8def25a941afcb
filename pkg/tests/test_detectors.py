import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import bell_vector, min_pt_eigenvalue, werner_matrix
from sepcert.detectors import (
    NEG_ENTROPY,
    PURITY,
    ConvexFunctionSpec,
    critical_bracket,
    entropy_bracket,
    entropy_detector,
    exact_critical_bracket,
    improved_family_spectrum,
    improved_lower_bound_inf,
    improved_spectral_detector,
    k_good_probe,
    lower_spectrum,
    partial_sum_detector,
    partial_sum_spec,
    purity_detector,
    run_detectors,
    section_values,
    theorem1_detector,
    upper_spectrum,
    von_neumann_entropy,
)
from sepcert.state import maximally_mixed, pure_state, random_density_matrix, validate


def werner(t):
    return validate(werner_matrix(t), (2, 2))


class TestSpecs:
    def test_unknown(self):
        with pytest.raises(ValueError):
            ConvexFunctionSpec("renyi")

    def test_k_rules(self):
        with pytest.raises(ValueError):
            ConvexFunctionSpec("purity", 2)
        with pytest.raises(ValueError):
            ConvexFunctionSpec("partial-sum")
        with pytest.raises(ValueError):
            partial_sum_spec(4).check_dims(4)

    def test_values(self):
        lam = [0.5, 0.25, 0.25, 0]
        assert PURITY(lam) == pytest.approx(0.375)
        assert partial_sum_spec(2)(lam) == pytest.approx(0.75)
        assert NEG_ENTROPY(lam) == pytest.approx(-1.5 * math.log(2))

    def test_entropy(self):
        assert von_neumann_entropy(maximally_mixed((2, 3))) == pytest.approx(math.log(6))
        assert von_neumann_entropy(pure_state(bell_vector(), (2, 2))) == pytest.approx(0, abs=1e-12)


class TestFamilies:
    def test_spectra_are_ordered_and_normalised(self):
        for D in (4, 6, 9):
            L = Fraction(2, 2 + D)
            for s in (upper_spectrum(L, D), lower_spectrum(L, D)):
                assert sum(s) == 1 and all(a >= b for a, b in zip(s, s[1:]))
            for t in (Fraction(0), Fraction(1, 3), Fraction(1)):
                s = improved_family_spectrum(t, L, D)
                assert sum(s) == 1 and all(a >= b for a, b in zip(s, s[1:]))

    def test_improved_family_needs_three(self):
        with pytest.raises(ValueError):
            improved_family_spectrum(0.5, 0.5, 2)


class TestBrackets:
    def test_two_qubit_purity(self):
        br = exact_critical_bracket(PURITY, (2, 2))
        assert br.lower == br.upper == Fraction(1, 3) and br.exact

    def test_qubit_qutrit_purity(self):
        br = exact_critical_bracket(PURITY, (2, 3))
        assert (br.lower, br.upper) == (Fraction(1, 5), Fraction(7, 32))
        assert br.lower_source == "purity-ppt"

    def test_partial_sum_top(self):
        for dims in ((2, 2), (2, 3), (3, 3)):
            D = int(np.prod(dims))
            br = exact_critical_bracket(partial_sum_spec(D - 1), dims)
            assert br.lower == br.upper == Fraction(D + 1, D + 2)

    def test_float_bracket_contains_exact(self):
        for dims in ((2, 2), (2, 3), (2, 4)):
            lo, hi = critical_bracket(PURITY, dims)
            br = exact_critical_bracket(PURITY, dims)
            assert lo <= float(br.lower) + 1e-15 and float(br.upper) <= hi + 1e-15

    def test_three_qubits_sound(self):
        br = exact_critical_bracket(PURITY, (2, 2, 2))
        assert br.lower < br.upper and br.upper_source == "C_L+(cut)"
        assert br.upper == PURITY(upper_spectrum(Fraction(1, 5), 8))

    def test_entropy_bracket_orientation(self):
        lo, hi = entropy_bracket((2, 2))
        assert lo == pytest.approx(math.log(6 / math.sqrt(3)), abs=1e-12)
        assert lo < hi < math.log(4)

    def test_improved_infimum_two_qubits(self):
        v = improved_lower_bound_inf(PURITY, (2, 2))
        assert v == pytest.approx(10 / 36, abs=1e-9)
        assert exact_critical_bracket(PURITY, (2, 2)).lower >= v - 1e-12

    def test_improved_infimum_guarded(self):
        with pytest.raises(ValueError):
            improved_lower_bound_inf(PURITY, (3, 3))
        assert improved_lower_bound_inf(PURITY, (3, 3), assume_hypothesis=True) > 0
        with pytest.raises(ValueError):
            improved_lower_bound_inf(PURITY, (2, 2), grid=10)


class TestDetectors:
    def test_werner_certified(self):
        r = theorem1_detector(werner(0.3))
        assert r.certified and r.threshold == pytest.approx(1 / 6)
        assert r.value == pytest.approx(0.175)
        assert r.threshold_provenance == "exact"

    def test_werner_inconclusive(self):
        for report in run_detectors(werner(0.5)):
            assert not report.certified, report.detector_name

    def test_boundary_slack(self):
        assert theorem1_detector(werner(1 / 3)).certified
        assert purity_detector(werner(1 / 3)).certified

    def test_tau_certified_everywhere(self):
        for dims in ((2, 2), (2, 3)):
            assert all(r.certified for r in run_detectors(maximally_mixed(dims)))

    def test_improved_conditional(self):
        rho = maximally_mixed((2, 4))
        r = improved_spectral_detector(rho)
        assert r.conditional and not r.certified and r.note

    def test_improved_two_by_three_form(self):
        lam = np.array([0.25, 0.25, 0.2, 0.2, 0.1, 0.0])
        rho = validate(np.diag(lam), (2, 3))
        r = improved_spectral_detector(rho)
        c = 5 / 8
        assert r.value == pytest.approx((1 - c) * 0.0 + c * 0.1)
        assert (3 * lam[5] + 5 * lam[4] >= 1) == r.certified

    def test_multipartite_provenance(self):
        r = theorem1_detector(maximally_mixed((2, 2, 2)))
        assert r.threshold_provenance == "lower-bound" and r.certified

    def test_entropy_detector(self):
        r = entropy_detector(maximally_mixed((2, 2)))
        assert r.certify_when == "ge" and r.certified
        assert not entropy_detector(pure_state(bell_vector(), (2, 2))).certified

    def test_partial_sum(self):
        r = partial_sum_detector(werner(0.3), 3)
        assert r.threshold == pytest.approx(5 / 6)
        with pytest.raises(ValueError):
            partial_sum_detector(werner(0.3), 4)

    def test_report_dict(self):
        d = purity_detector(werner(0.2)).to_dict()
        assert d["verdict"] == "certified-separable" and d["bracket"] == [1 / 3, 1 / 3]

    def test_soundness_sampled(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            rho = random_density_matrix((2, 3), rng)
            t = rng.uniform(0, 0.5)
            mixed = validate(t * rho.matrix + (1 - t) * np.eye(6) / 6, (2, 3))
            if any(r.certified for r in run_detectors(mixed)):
                assert min_pt_eigenvalue(mixed.matrix, (2, 3)) >= -1e-10

    def test_run_order(self):
        names = [r.detector_name for r in run_detectors(werner(0.1))]
        assert names[:4] == ["min-eigenvalue", "two-smallest-eigenvalues", "purity",
                             "von-neumann-entropy"]
        assert len(names) == 4 + 3


class TestSections:
    def test_purity_along_section(self):
        rho = pure_state(bell_vector(), (2, 2))
        ts = np.linspace(0, 1, 11)
        vals = section_values(PURITY, rho, ts)
        assert np.allclose(vals, 0.25 + 0.75 * ts ** 2)

    def test_k_good_constant_fails(self):
        assert not k_good_probe(lambda lam: 1.0, (2, 2), 1, samples=5)

    def test_purity_is_one_good(self):
        assert k_good_probe(PURITY, (2, 2), 1, samples=50)

    def test_range(self):
        with pytest.raises(ValueError):
            k_good_probe(PURITY, (2, 2), 4)
