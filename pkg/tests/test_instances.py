import numpy as np
import pytest

from epochbandit.chain import check_assumptions, stationary_distribution
from epochbandit.environment import mu
from epochbandit.exceptions import GenerationExhausted
from epochbandit.instances import (GeneratorSpec, example1, example1_crossover, generate,
                                   penalty_example, sample_random_transition, spectrum_samples)


class TestCanned:
    def test_example1_structure(self):
        inst = example1(0.01)
        np.testing.assert_allclose(inst.stationary[0], [0.01 / 1.01, 1 / 1.01])
        np.testing.assert_allclose(inst.stationary[1], [1 / 1.01, 0.01 / 1.01])
        assert inst.optimal_arm == 0
        assert inst.mus[0] == pytest.approx(1 / 1.01)

    def test_example1_crossover(self):
        # arm 1 pays 0.5 in every state, arm 0 pays 1/(1+eps) > 0.5 for every admissible eps
        assert example1_crossover() == 0.5

    def test_penalty(self):
        inst = penalty_example(0.1)
        np.testing.assert_allclose(inst.stationary[0], [0.1, 0.9])
        assert mu(inst, 0) == pytest.approx(0.9)

    @pytest.mark.parametrize("eps", [0.0, 0.5, -1])
    def test_bad_epsilon(self, eps):
        with pytest.raises(ValueError):
            example1(eps)


class TestGenerator:
    def test_deterministic(self):
        a, b = generate(GeneratorSpec(seed=11)), generate(GeneratorSpec(seed=11))
        for Pa, Pb in zip(a.P, b.P):
            assert np.array_equal(Pa, Pb)
        assert np.array_equal(a.beta1, b.beta1)

    def test_seed_sensitivity(self):
        a, b = generate(GeneratorSpec(seed=1)), generate(GeneratorSpec(seed=2))
        assert not np.array_equal(a.P[0], b.P[0])

    @pytest.mark.parametrize("seed", range(6))
    def test_valid(self, seed):
        inst = generate(GeneratorSpec(seed=seed, m=3, states=5))
        assert inst.has_unique_optimum
        for P in inst.P:
            assert check_assumptions(P).ok
        g = np.sort(inst.mus)
        assert g[-1] - g[-2] >= 0.01

    def test_anti_correlation(self):
        inst = generate(GeneratorSpec(seed=7, anti_correlation_mass=0.99))
        best = inst.optimal_arm
        pi = inst.stationary[best]
        fav = np.argsort(pi)[-2:]
        assert pi[fav].sum() >= 0.9
        for j in range(inst.m):
            if j != best:
                assert inst.stationary[j][fav].sum() <= 0.1

    def test_exhausted(self):
        with pytest.raises(GenerationExhausted):
            generate(GeneratorSpec(seed=0, max_retries=1, min_gap=0.99))

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            GeneratorSpec(m=1)
        with pytest.raises(ValueError):
            GeneratorSpec(kernel_palette=("gauss",))


class TestRandomChains:
    @pytest.mark.parametrize("dist", ["uniform", "absnormal"])
    def test_rows(self, dist):
        P = sample_random_transition(dist, 10, 3)
        np.testing.assert_allclose(P.sum(axis=1), 1.0)
        assert (P >= 0).all()

    def test_unknown(self):
        with pytest.raises(ValueError):
            sample_random_transition("cauchy", 3, 0)

    def test_spectrum_range_and_seed(self):
        a = spectrum_samples("uniform", 6, 20, seed=4)
        assert ((a >= 0) & (a < 1)).all()
        assert np.array_equal(a, spectrum_samples("uniform", 6, 20, seed=4))
