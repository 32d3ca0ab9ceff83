import numpy as np
import pytest

from epochbandit.environment import (Bernoulli, Beta, MarkovBanditEnv, ProblemInstance,
                                     RewardKernel, Uniform, discount_mass, expected_smoothed_reward,
                                     gaps, mu, pull_arm)
from epochbandit.exceptions import InvalidArm, InvalidTau, NonErgodicChain
from epochbandit.instances import example1, generate, GeneratorSpec, penalty_example


def ex1_eps0_arm():
    # epsilon = 0: state 2 is absorbing; validation off since the chain is reducible
    P = [[0.0, 1.0], [0.0, 1.0]]
    return ProblemInstance((P,), [[Bernoulli(0.0), Bernoulli(1.0)]], [1.0, 0.0], 1.0, validate=False)


class TestKernels:
    @pytest.mark.parametrize("k, m", [(Bernoulli(0.3), 0.3), (Beta(2, 6), 0.25), (Uniform(0.2, 0.6), 0.4)])
    def test_means_and_support(self, k, m, rng):
        x = k.sample(rng, 200_000)
        assert k.mean() == pytest.approx(m)
        assert x.min() >= 0 and x.max() <= 1
        assert abs(x.mean() - m) < 4 * x.std() / np.sqrt(x.size)

    @pytest.mark.parametrize("bad", [lambda: Bernoulli(1.2), lambda: Beta(0, 1), lambda: Uniform(0.6, 0.5)])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            bad()

    def test_round_trip(self):
        for k in (Bernoulli(0.1), Beta(1.5, 2.5), Uniform(0.0, 1.0)):
            assert RewardKernel.from_dict(k.to_dict()) == k


class TestInstance:
    def test_rejects_periodic_arm(self):
        with pytest.raises(NonErgodicChain):
            ProblemInstance(([[0, 1], [1, 0]],), [[Bernoulli(0), Bernoulli(1)]], [1, 0])

    def test_single_state(self):
        inst = ProblemInstance(([[1.0]],), [[Bernoulli(0.3)]], [1.0])
        assert mu(inst, 0) == pytest.approx(0.3)

    def test_example1_mu(self):
        inst = example1(1e-4)
        assert mu(inst, 0) == pytest.approx(1 / (1 + 1e-4))
        assert mu(inst, 1) == pytest.approx(0.5)
        np.testing.assert_allclose(gaps(inst), [0, 1 / (1 + 1e-4) - 0.5])

    def test_penalty_mu(self):
        assert mu(penalty_example(0.1), 0) == pytest.approx(0.9)


class TestPull:
    def test_constant_reward(self, rng):
        P = [[.5, .5], [.2, .8]]
        inst = ProblemInstance((P,), [[Bernoulli(1.0), Bernoulli(1.0)]], [1, 0], 0.7)
        for tau in (1, 5, 30):
            assert pull_arm(inst, 0, [1, 0], tau, rng).smoothed_reward == pytest.approx(1.0)

    def test_example1_first_pull_zero(self, rng):
        out = pull_arm(example1(0.1), 0, [1, 0], 1, rng)
        assert out.smoothed_reward == 0.0
        np.testing.assert_allclose(out.final_beta, [0, 1])

    def test_discount_mass(self, rng):
        inst = example1(0.1, gamma=0.5)
        out = pull_arm(inst, 0, [1, 0], 4, rng)
        assert out.discount_mass == pytest.approx((1 - 0.5 ** 4) / 0.5, abs=1e-12)
        assert pull_arm(example1(0.1), 0, [1, 0], 4, rng).discount_mass == 4

    def test_errors(self, rng):
        inst = example1(0.1)
        with pytest.raises(InvalidArm):
            pull_arm(inst, 2, [1, 0], 1, rng)
        with pytest.raises(InvalidTau):
            pull_arm(inst, 0, [1, 0], 0, rng)
        with pytest.raises(InvalidTau):
            pull_arm(inst, 0, [1, 0], 1.5, rng)

    @pytest.mark.parametrize("mode", ["distribution", "trajectory"])
    def test_monte_carlo_matches_exact(self, mode):
        inst = generate(GeneratorSpec(m=2, states=3, seed=3, gamma=0.8))
        beta = np.array([1.0, 0.0, 0.0])
        exact = expected_smoothed_reward(inst, 1, beta, 6)
        rng = np.random.default_rng(7)
        x = np.array([pull_arm(inst, 1, beta, 6, rng, mode=mode).smoothed_reward for _ in range(100_000)])
        assert abs(x.mean() - exact) < 4 * x.std() / np.sqrt(x.size)
        assert x.min() >= 0 and x.max() <= 1

    def test_env_carries_beta(self, rng):
        env = MarkovBanditEnv(example1(0.1), rng)
        env.pull(0, 1)
        np.testing.assert_allclose(env.beta, [0, 1])
        assert env.t == 1


class TestExpected:
    def test_stationary_start_gives_mu(self):
        inst = generate(GeneratorSpec(seed=5))
        for j in range(inst.m):
            for g in (0.5, 1.0):
                assert expected_smoothed_reward(inst, j, inst.stationary[j], 9, g) == pytest.approx(inst.mus[j], abs=1e-12)

    def test_example1_eps0(self):
        assert expected_smoothed_reward(ex1_eps0_arm(), 0, [1, 0], 3, 1.0) == pytest.approx(2 / 3)

    def test_two_terms_discounted(self):
        inst = generate(GeneratorSpec(seed=2))
        beta = inst.beta1
        j = 1
        term0 = float(beta @ inst.kernel_means[j])
        term1 = float(beta @ inst.P[j] @ inst.kernel_means[j])
        ref = (0.5 * term0 + term1) / 1.5
        assert expected_smoothed_reward(inst, j, beta, 2, 0.5) == pytest.approx(ref, abs=1e-14)

    def test_discount_mass_closed_form(self):
        for g in (0.3, 0.9, 1.0):
            for tau in (1, 7, 40):
                assert discount_mass(g, tau) == pytest.approx(sum(g ** t for t in range(tau)), rel=1e-12)
