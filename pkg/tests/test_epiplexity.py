import itertools
import math
import os
import unittest

import numpy as np

from joulebits import codec
from joulebits import epiplexity
from joulebits.epiplexity import GenerativeEnv, LearnerSpec, EpisodeJoint
from joulebits.probcore import JointTable, Quantizer
from joulebits.thermo import EnergyLedger
from joulebits.types import ValidationError, CapacityError, ConventionError
from sweep.seeds import generator
from sweep.serial import SerialRunner

DATA = os.path.join(os.path.dirname(__file__), "data")


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def coin(n=1):
    return GenerativeEnv.from_bernoulli([0.2, 0.8], [0.5, 0.5], n)


def copier(env):
    return LearnerSpec.deterministic([0, 1], [1.0, 0.0], env.records, lambda w, x: x[-1])


class TestGenerativeEnv(unittest.TestCase):

    def test_bernoulli_records_shall_enumerate_flips(self):
        env = coin(2)
        self.assertEqual(env.records, ((0, 0), (0, 1), (1, 0), (1, 1)))
        np.testing.assert_allclose(env.obs_model[1], [0.04, 0.16, 0.16, 0.64])

    def test_equivalent_latents_shall_be_reported(self):
        env = GenerativeEnv(["a", "b", "c"], [0.2, 0.3, 0.5], [0, 1], [[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]])
        self.assertEqual(env.equivalent_latents(), [("a", "b")])
        learner = LearnerSpec.deterministic([0, 1], [1.0, 0.0], env.records, lambda w, x: x)
        with self.assertLogs(level='WARNING'):
            epiplexity.build_episode_joint(env, learner)

    def test_env_shall_reject_bad_rows(self):
        self.assertRaises(ValidationError, GenerativeEnv, ["a"], [1.0], [0, 1], [[0.5, 0.6]])
        self.assertRaises(ValidationError, GenerativeEnv, ["a"], [1.0], [0, 1], [[1.0]])

    def test_env_shall_survive_decode(self):
        env = coin(2)
        back = GenerativeEnv.decode(codec.loads(codec.canonical_dumps(env)))
        self.assertEqual(back.records, env.records)
        np.testing.assert_array_equal(back.obs_model, env.obs_model)


class TestAcquiredEpiplexity(unittest.TestCase):

    def test_copying_learner_shall_acquire_record_information(self):
        env = coin()
        j = epiplexity.build_episode_joint(env, copier(env))
        expected = 1.0 - binary_entropy(0.2)
        self.assertAlmostEqual(epiplexity.acquired_epiplexity(j), expected, places=12)
        delta, bound = epiplexity.dpi_bound(j)
        self.assertAlmostEqual(delta, bound, places=12, msg="a copier saturates data processing")

    def test_noisy_learner_shall_stay_below_the_record_bound(self):
        env = coin()
        update = np.zeros((2, 2, 2))
        for w in range(2):
            for x in range(2):
                update[w, x, x] = 0.9
                update[w, x, 1 - x] = 0.1
        learner = LearnerSpec([0, 1], [0.5, 0.5], env.records, update)
        delta, bound = epiplexity.dpi_bound(epiplexity.build_episode_joint(env, learner))
        self.assertLess(delta, bound)
        self.assertGreater(delta, 0.0)

    def test_ignoring_learner_shall_acquire_nothing(self):
        env = coin(2)
        learner = LearnerSpec.deterministic([0, 1], [0.3, 0.7], env.records, lambda w, x: w)
        j = epiplexity.build_episode_joint(env, learner)
        self.assertAlmostEqual(epiplexity.acquired_epiplexity(j), 0.0, places=12)

    def test_counting_learner_shall_not_gain_from_coarse_graining(self):
        env = coin(3)
        learner = LearnerSpec.deterministic([0, 1, 2, 3], [1.0, 0.0, 0.0, 0.0], env.records,
                                            lambda w, x: sum(x))
        j = epiplexity.build_episode_joint(env, learner)
        fine = epiplexity.acquired_epiplexity(j)
        coarse = epiplexity.acquired_epiplexity(j, {"W": Quantizer(2.0, num_bins=2)})
        self.assertLessEqual(coarse, fine + 1e-12)
        self.assertGreater(coarse, 0.0)
        delta, bound = epiplexity.dpi_bound(j)
        self.assertAlmostEqual(fine, bound, places=12, msg="head count is sufficient for the bias")

    def test_quantizer_for_unknown_variable_shall_raise(self):
        env = coin()
        j = epiplexity.build_episode_joint(env, copier(env))
        self.assertRaises(ValidationError, epiplexity.acquired_epiplexity, j, {"V": Quantizer(1.0)})

    def test_change_shall_report_levels_before_and_after(self):
        env = coin()
        change = epiplexity.epiplexity_change(epiplexity.build_episode_joint(env, copier(env)))
        self.assertAlmostEqual(change.before, 0.0, places=12)
        self.assertAlmostEqual(change.after, 1.0 - binary_entropy(0.2), places=12)
        self.assertAlmostEqual(change.signed_change, change.after, places=12)

    def test_forgetting_learner_shall_report_negative_change(self):
        # W_pre already agrees with Z; the update resets W regardless of X.
        cells = np.zeros((2, 2, 2, 2))
        for z in range(2):
            for w in range(2):
                for x in range(2):
                    cells[z, w, x, 0] = 0.5 * (0.9 if w == z else 0.1) * (0.8 if x == z else 0.2)
        j = EpisodeJoint(JointTable(epiplexity.EPISODE_VARIABLES, [range(2)] * 4, cells))
        change = epiplexity.epiplexity_change(j)
        self.assertAlmostEqual(change.before, 1.0 - binary_entropy(0.1), places=12)
        self.assertAlmostEqual(change.after, 0.0, places=12)
        self.assertLess(change.signed_change, -0.5)
        self.assertGreaterEqual(epiplexity.acquired_epiplexity(j), 0.0)
        self.assertAlmostEqual(epiplexity.acquired_epiplexity(j), 0.0, places=12)

    def test_two_flip_parity_counter_shall_match_hand_enumeration(self):
        env = coin(2)
        initial = [0.75, 0.25]
        learner = LearnerSpec.deterministic([0, 1], initial, env.records, lambda w, x: (w + sum(x)) % 2)
        j = epiplexity.build_episode_joint(env, learner)
        self.assertEqual(j.joint.cells.size, 32)
        for (zi, z), (wi, w), (xi, x), (vi, v) in itertools.product(
                enumerate(env.latent), enumerate(learner.states), enumerate(env.records), enumerate(learner.states)):
            heads = sum(x)
            expected = 0.5 * initial[wi] * z ** heads * (1.0 - z) ** (2 - heads)
            expected = expected if v == (w + heads) % 2 else 0.0
            self.assertAlmostEqual(j.joint.cells[zi, wi, xi, vi], expected, places=12, msg=(z, w, x, v))

    def test_oversized_episode_shall_hit_size_guard(self):
        env = GenerativeEnv(range(1000), np.full(1000, 1e-3), [0, 1], np.full((1000, 2), 0.5))
        learner = LearnerSpec.deterministic(range(100), np.full(100, 0.01), [0, 1], lambda w, x: w)
        self.assertRaises(CapacityError, epiplexity.build_episode_joint, env, learner)

    def test_mismatched_records_shall_raise(self):
        learner = LearnerSpec.deterministic([0, 1], [1.0, 0.0], [0, 1, 2], lambda w, x: 0)
        self.assertRaises(ValidationError, epiplexity.build_episode_joint, coin(), learner)


class TestPassivity(unittest.TestCase):

    def test_interactive_episode_shall_need_declared_policy(self):
        # X copies W_pre, so the data depend on the learner.
        cells = np.zeros((2, 2, 2, 2))
        for z in range(2):
            for w in range(2):
                cells[z, w, w, w] = 0.25
        j = EpisodeJoint(JointTable(epiplexity.EPISODE_VARIABLES, [range(2)] * 4, cells))
        self.assertFalse(j.is_passive())
        self.assertRaises(ConventionError, epiplexity.dpi_bound, j)

    def test_verdict_shall_compare_information_with_the_record_bound(self):
        env = coin()
        verdict = epiplexity.dpi_verdict(epiplexity.build_episode_joint(env, copier(env)))
        self.assertEqual(verdict.label, "data processing")
        self.assertTrue(verdict.satisfied)
        self.assertAlmostEqual(verdict.lhs, 1.0 - binary_entropy(0.2), places=12)
        self.assertAlmostEqual(verdict.slack, verdict.rhs - verdict.lhs, places=15)

    def test_verdict_on_interactive_episode_shall_raise(self):
        cells = np.zeros((2, 2, 2, 2))
        for z in range(2):
            for w in range(2):
                cells[z, w, w, w] = 0.25
        j = EpisodeJoint(JointTable(epiplexity.EPISODE_VARIABLES, [range(2)] * 4, cells))
        self.assertRaises(ConventionError, epiplexity.dpi_verdict, j)

    def test_random_episodes_shall_respect_data_processing(self):
        results = epiplexity.dpi_fuzz(200, 7, SerialRunner())
        self.assertEqual(len(results), 200)
        for delta, bound in results:
            self.assertLessEqual(delta, bound + 1e-9)

    def test_random_merging_of_posterior_states_shall_not_add_information(self):
        for index in range(20):
            rng = generator(17, index)
            env, learner = epiplexity.random_episode(rng)
            j = epiplexity.build_episode_joint(env, learner)
            q = Quantizer(float(rng.uniform(0.5, 3.0)), float(rng.uniform(-1.0, 0.0)), int(rng.integers(1, 4)))
            coarse = epiplexity.acquired_epiplexity(j, {"W_post": q})
            self.assertLessEqual(coarse, epiplexity.acquired_epiplexity(j) + 1e-12, q)

    def test_fuzz_shall_be_deterministic_per_seed(self):
        self.assertEqual(epiplexity.dpi_fuzz(5, 3, SerialRunner()), epiplexity.dpi_fuzz(5, 3, SerialRunner()))


class TestLearningEfficiency(unittest.TestCase):

    def test_efficiency_shall_divide_by_consumed_and_dissipated_energy(self):
        ledger = EnergyLedger(2e-18, 1e-18, dE_store=1e-18)
        record = epiplexity.learning_efficiency(0.5, ledger)
        self.assertAlmostEqual(record.eta_E, 0.25e18, delta=1e3)
        self.assertAlmostEqual(record.eta_tilde_E, 0.5e18, delta=1e3)
        self.assertLess(record.landauer_fraction, 1.0)

    def test_zero_dissipation_shall_leave_eta_tilde_undefined(self):
        record = epiplexity.learning_efficiency(1.0, EnergyLedger(1e-18, 0.0, dE_store=1e-18))
        self.assertIsNone(record.eta_tilde_E)
        self.assertIsNone(record.landauer_fraction)

    def test_zero_consumption_shall_raise(self):
        self.assertRaises(ValidationError, epiplexity.learning_efficiency, 1.0, EnergyLedger(0.0, 0.0))


class TestEpisodeSpec(unittest.TestCase):

    def test_fixture_shall_load_env_learner_and_ledger(self):
        env, learner, ledger = epiplexity.load_episode_spec(codec.load_json(os.path.join(DATA, "coin_env.json")))
        self.assertEqual(env.latent, (0.2, 0.8))
        self.assertIs(learner.ledger, ledger)
        self.assertAlmostEqual(ledger.Q_diss, 1e-18)
        j = epiplexity.build_episode_joint(env, learner)
        self.assertAlmostEqual(epiplexity.acquired_epiplexity(j), 1.0 - binary_entropy(0.2), places=12)

    def test_missing_learner_shall_raise(self):
        obj = codec.load_json(os.path.join(DATA, "coin_env.json"))
        del obj["learner"]
        self.assertRaises(ValidationError, epiplexity.load_episode_spec, obj)


if __name__ == '__main__':
    unittest.main()
