import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import bell_vector, maximally_entangled, pure_qubit_pair_modulus, werner_matrix
from sepcert.composite import is_ppt, random_separable_state
from sepcert.modulus import (
    ModulusEstimate,
    convexity_lower_bound,
    estimate_modulus,
    gap_lower_bound,
    hat_moduli,
    is_ppt_decisive,
    l_constant,
    modulus_of_mixture,
    modulus_ppt,
    one_over_l_convexity_check,
    spectral_lower_bound,
)
from sepcert.state import (
    maximally_mixed,
    mix_with_trace,
    pure_state,
    random_density_matrix,
    random_pure_state,
    validate,
)


@pytest.fixture
def rng():
    return np.random.default_rng(17)


@pytest.fixture
def bell():
    return pure_state(bell_vector(), (2, 2))


class TestLConstant:
    @pytest.mark.parametrize("dims, value", [((2, 2), Fraction(1, 3)), ((2, 3), Fraction(1, 4)),
                                             ((3, 3), Fraction(2, 11))])
    def test_bipartite(self, dims, value):
        lb = l_constant(dims)
        assert lb.exact and lb.fraction == value and lb.provenance == "exact-bipartite"

    def test_three_qubits(self):
        lb = l_constant((2, 2, 2))
        rungta = Fraction(1, 1 + 2 ** 5)
        assert rungta < Fraction(1, 25)
        assert lb.fraction == Fraction(1, 25) and lb.provenance == "vidal-tarrach"
        assert not lb.exact

    def test_rungta_can_win(self):
        # many small factors: (1 + D/2)^(N-1) grows faster than d^(2N-1)
        lb = l_constant((2, 2, 2, 2, 2))
        assert lb.provenance == "rungta" and lb.fraction == Fraction(1, 1 + 2 ** 9)

    def test_single_factor(self):
        assert l_constant((3,)).value == 1.0


class TestEstimate:
    def test_invariants(self):
        with pytest.raises(ValueError):
            ModulusEstimate(0.6, 0.5, True, "ppt-bisection")
        with pytest.raises(ValueError):
            ModulusEstimate(0.1, 0.5, False, "magic")
        m = ModulusEstimate(0.25, 0.25, True, "L-floor")
        assert m.robustness == pytest.approx(3)


class TestModulusPPT:
    def test_bell(self, bell):
        m = modulus_ppt(bell)
        assert m.exact and m.method == "ppt-bisection"
        assert m.upper - m.lower <= 1e-9
        assert abs(m.value - 1 / 3) <= 1e-9

    def test_tau_and_separable(self, rng):
        assert modulus_ppt(maximally_mixed((2, 2))).value == 1.0
        assert modulus_ppt(random_separable_state((2, 3), rng)).value == 1.0

    def test_tol(self, bell):
        with pytest.raises(ValueError):
            modulus_ppt(bell, tol=0)
        coarse = modulus_ppt(bell, tol=1e-3)
        assert coarse.upper - coarse.lower <= 1e-3

    def test_pure_qubit_pairs_closed_form(self, rng):
        for _ in range(200):
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            psi /= np.linalg.norm(psi)
            m = modulus_ppt(pure_state(psi, (2, 2)))
            assert m.value == pytest.approx(pure_qubit_pair_modulus(psi), abs=1e-8)

    def test_werner_family(self):
        for t in (0.5, 0.8, 1.0):
            m = modulus_ppt(validate(werner_matrix(t), (2, 2)))
            assert m.value == pytest.approx(1 / (3 * t), abs=1e-8)

    def test_non_decisive_is_upper_bound(self):
        rho = pure_state(maximally_entangled(3, 3), (3, 3))
        m = modulus_ppt(rho)
        assert not m.exact
        assert m.lower == pytest.approx(2 / 11)
        # PPT threshold of the maximally entangled 3x3 state is 1/(1+d) = 1/4
        assert m.upper == pytest.approx(0.25, abs=1e-8)

    def test_multipartite_rejected(self):
        with pytest.raises(ValueError):
            modulus_ppt(maximally_mixed((2, 2, 2)))

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
    def test_floor(self, rng, dims):
        L = l_constant(dims).value
        for _ in range(200):
            assert modulus_ppt(random_pure_state(dims, rng)).value >= L - 1e-9

    def test_monotone_along_section(self, rng):
        for _ in range(20):
            rho = random_density_matrix((2, 3), rng, rank=1)
            flags = [is_ppt(mix_with_trace(rho, t)).is_ppt for t in np.linspace(0, 1, 41)]
            k = flags.index(False) if False in flags else len(flags)
            assert all(flags[:k]) and not any(flags[k:])

    def test_decisive(self):
        assert is_ppt_decisive((2, 3)) and is_ppt_decisive((3, 2))
        assert not is_ppt_decisive((2, 4)) and not is_ppt_decisive((2, 2, 2))


class TestEstimateModulus:
    def test_three_qubits(self):
        ghz = np.zeros(8)
        ghz[0] = ghz[7] = 1
        m = estimate_modulus(pure_state(ghz, (2, 2, 2)))
        assert m.method == "gap-bound" and not m.exact
        assert m.lower == pytest.approx(1 / 25)
        assert m.lower <= m.upper <= 1
        assert estimate_modulus(maximally_mixed((2, 2, 2))).value == 1

    def test_bipartite_delegates(self, bell):
        assert estimate_modulus(bell).exact


class TestMixture:
    def test_bell_examples(self, bell):
        c = modulus_of_mixture(bell, 0.5)
        assert c.lhs == pytest.approx(2 / 3, abs=1e-8) and c.holds(2e-6)
        c = modulus_of_mixture(bell, 0.25)
        assert c.lhs == 1.0 and c.rhs == 1.0
        c = modulus_of_mixture(bell, 1.0)
        assert c.lhs == pytest.approx(c.rhs)

    def test_range(self, bell):
        with pytest.raises(ValueError):
            modulus_of_mixture(bell, 0)

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
    def test_sampled(self, rng, dims):
        for _ in range(30):
            rho = random_density_matrix(dims, rng, rank=2)
            assert modulus_of_mixture(rho, float(rng.uniform(0.05, 1))).holds(2e-6)


class TestBounds:
    def test_harmonic_examples(self):
        assert convexity_lower_bound([(0.5, 1 / 3), (0.5, 1.0)]) == pytest.approx(0.5)
        assert convexity_lower_bound([(0.3, 1.0), (0.7, 1.0)]) == pytest.approx(1.0)

    def test_harmonic_errors(self):
        with pytest.raises(ValueError):
            convexity_lower_bound([(0.5, 0.0), (0.5, 1.0)])
        with pytest.raises(ValueError):
            convexity_lower_bound([(0.5, 0.5)])
        with pytest.raises(ValueError):
            convexity_lower_bound([])

    def test_harmonic_above_min(self, rng):
        for _ in range(100):
            w = rng.dirichlet(np.ones(4))
            ls = rng.uniform(0.1, 1, size=4)
            assert convexity_lower_bound(zip(w, ls)) >= ls.min() - 1e-15

    def test_gap_bound_examples(self, bell):
        assert gap_lower_bound(maximally_mixed((2, 2)), [1 / 3] * 3) == pytest.approx(1)
        assert gap_lower_bound(bell, [1 / 3, 1, 1]) == pytest.approx(1 / 3)
        with pytest.raises(ValueError):
            gap_lower_bound(bell, [1 / 3])

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
    def test_bounds_below_exact(self, rng, dims):
        for _ in range(30):
            rho = random_density_matrix(dims, rng)
            exact = modulus_ppt(rho)
            g = gap_lower_bound(rho, hat_moduli(rho))
            s = spectral_lower_bound(rho)
            assert s <= g + 1e-9
            assert g <= exact.upper + 1e-9


class TestConvexity:
    def test_equal_states(self, rng):
        rho = random_density_matrix((2, 2), rng, rank=1)
        assert one_over_l_convexity_check(rho, rho, 0.3, slack=1e-6)

    def test_bell_tau(self, bell):
        assert one_over_l_convexity_check(bell, maximally_mixed((2, 2)), 0.5)

    def test_random(self, rng):
        for _ in range(50):
            r1 = random_density_matrix((2, 3), rng, rank=1)
            r2 = random_density_matrix((2, 3), rng, rank=2)
            assert one_over_l_convexity_check(r1, r2, float(rng.uniform()))

    def test_range(self, bell):
        with pytest.raises(ValueError):
            one_over_l_convexity_check(bell, bell, 1.5)


def test_generalised_bell_3x3_is_reported_only():
    # The modulus of the 3x3 maximally entangled state is not asserted to be L;
    # only the bracket ordering is checked.
    m = estimate_modulus(pure_state(maximally_entangled(3, 3), (3, 3)))
    assert m.lower <= m.upper and not m.exact
    assert not math.isclose(m.upper, l_constant((3, 3)).value)
