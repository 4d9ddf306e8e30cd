import numpy as np
from django.test import SimpleTestCase

from network.exceptions import InconsistentInstance, InvalidParameters
from network.placement import (
    CacheConfiguration, CachingDistribution, packet_counts, rap_cache, rlfu_distribution, sup_cache,
    uniform_distribution,
)
from network.system import SystemParams


class CachingDistributionTests(SimpleTestCase):
    def test_uniform(self):
        np.testing.assert_allclose(uniform_distribution(4).p, [0.25] * 4)
        np.testing.assert_allclose(uniform_distribution(1).p, [1.0])
        self.assertAlmostEqual(uniform_distribution(5000).p.sum(), 1.0, places=12)

    def test_rlfu_without_truncation_is_uniform(self):
        np.testing.assert_array_equal(rlfu_distribution(5, 5, 1).p, uniform_distribution(5).p)
        self.assertEqual(rlfu_distribution(5, 5, 1).label, 'up')

    def test_rlfu_truncates_to_head(self):
        p = rlfu_distribution(5, 2, 2)
        np.testing.assert_allclose(p.p, [0.5, 0.5, 0, 0, 0])
        self.assertEqual(p.m_tilde, 2)

    def test_rlfu_rejects_cutoff_outside_range(self):
        with self.assertRaises(InvalidParameters):
            rlfu_distribution(5, 1, 2)
        with self.assertRaises(InvalidParameters):
            rlfu_distribution(5, 6, 2)

    def test_capacity_constraint(self):
        p = CachingDistribution(p=[0.7, 0.3])
        p.check_capacity(1)
        with self.assertRaises(InvalidParameters):
            p.check_capacity(2)

    def test_rejects_unnormalized(self):
        with self.assertRaises(InvalidParameters):
            CachingDistribution(p=[0.5, 0.6])


class PacketCountTests(SimpleTestCase):
    def test_leftover_budget_goes_to_lowest_index_on_ties(self):
        params = SystemParams(n=1, m=7, M='5/2', L=1, B=6)
        counts = packet_counts(uniform_distribution(7), params)
        self.assertEqual(counts.tolist(), [3, 2, 2, 2, 2, 2, 2])
        self.assertEqual(counts.sum(), params.cache_packets)

    def test_never_exceeds_file_size(self):
        params = SystemParams(n=1, m=3, M=2, L=1, B=4)
        counts = packet_counts(CachingDistribution(p=[0.5, 0.5, 0.0]), params)
        self.assertEqual(counts.tolist(), [4, 4, 0])


class RapCacheTests(SimpleTestCase):
    def test_full_cache_stores_everything(self):
        params = SystemParams(n=3, m=2, M=2, L=1, B=4)
        cache = rap_cache(uniform_distribution(2), params, np.random.default_rng(0))
        self.assertTrue(cache.cached.all())

    def test_zero_probability_files_are_never_cached(self):
        params = SystemParams(n=5, m=5, M=2, L=1, B=4)
        cache = rap_cache(rlfu_distribution(5, 2, 2), params, np.random.default_rng(0))
        self.assertFalse(cache.cached[:, 2:, :].any())
        self.assertTrue(cache.cached[:, :2, :].all())

    def test_loads_never_exceed_capacity(self):
        rng = np.random.default_rng(11)
        for m, M, B in [(7, '5/2', 6), (4, 1, 8), (10, '1/3', 3), (3, 3, 5)]:
            params = SystemParams(n=20, m=m, M=M, L=1, B=B)
            cache = rap_cache(uniform_distribution(m), params, rng)
            with self.subTest(m=m, M=M, B=B):
                self.assertTrue(np.all(cache.loads() <= params.cache_packets))
                self.assertTrue(np.all(cache.loads() == params.cache_packets))

    def test_packet_membership_frequency(self):
        params = SystemParams(n=1000, m=4, M=1, L=1, B=8)
        cache = rap_cache(uniform_distribution(4), params, np.random.default_rng(5))
        frequency = cache.cached[:, 0, 0].mean()
        self.assertLess(abs(frequency - 0.25), 3 * np.sqrt(0.25 * 0.75 / 1000))

    def test_users_are_independent(self):
        params = SystemParams(n=2, m=4, M=1, L=1, B=8)
        rng = np.random.default_rng(9)
        samples = np.array([rap_cache(uniform_distribution(4), params, rng).cached[:, 0, 0] for _ in range(2000)])
        covariance = np.cov(samples[:, 0].astype(float), samples[:, 1].astype(float))[0, 1]
        self.assertLess(abs(covariance), 0.02)

    def test_shape_mismatch(self):
        params = SystemParams(n=2, m=4, M=1, L=1, B=2)
        with self.assertRaises(InconsistentInstance):
            rap_cache(uniform_distribution(3), params, np.random.default_rng(0))

    def test_reproducible_for_fixed_seed(self):
        params = SystemParams(n=4, m=6, M=2, L=1, B=5)
        first = rap_cache(uniform_distribution(6), params, np.random.default_rng(3))
        second = rap_cache(uniform_distribution(6), params, np.random.default_rng(3))
        np.testing.assert_array_equal(first.cached, second.cached)


class SupCacheTests(SimpleTestCase):
    def test_full_and_empty_caches(self):
        rng = np.random.default_rng(0)
        self.assertTrue(sup_cache(SystemParams(n=4, m=3, M=3, L=1), rng).cached.all())
        self.assertFalse(sup_cache(SystemParams(n=4, m=3, M=0, L=1), rng).cached.any())

    def test_every_user_stores_M_files(self):
        cache = sup_cache(SystemParams(n=50, m=6, M=2, L=1), np.random.default_rng(1))
        self.assertTrue(np.all(cache.loads() == 2))
        self.assertEqual(cache.scheme, 'scalar')

    def test_file_frequency(self):
        n = 100_000
        cache = sup_cache(SystemParams(n=n, m=6, M=2, L=1), np.random.default_rng(2))
        frequency = cache.cached[:, :, 0].mean(axis=0)
        error = np.sqrt((1 / 3) * (2 / 3) / n)
        self.assertLess(abs(frequency[0] - 1 / 3), 3 * error)
        self.assertTrue(np.all(np.abs(frequency - 1 / 3) < 5 * error))

    def test_rejects_packetized_parameters(self):
        with self.assertRaises(InvalidParameters):
            sup_cache(SystemParams(n=2, m=4, M=2, L=1, B=2), np.random.default_rng(0))
        with self.assertRaises(InvalidParameters):
            sup_cache(SystemParams(n=2, m=4, M='5/2', L=1), np.random.default_rng(0))


class CacheConfigurationTests(SimpleTestCase):
    def test_accessors_are_one_based(self):
        cached = np.zeros((2, 3, 4), dtype=bool)
        cached[0, 1, [0, 3]] = True
        cached[1, 1, 0] = True
        cache = CacheConfiguration(cached=cached)
        self.assertEqual(cache.packets(1, 2), [1, 4])
        self.assertEqual(cache.holders(2, 1), [1, 2])
        self.assertEqual(cache.user_load(1), 2)

    def test_json_round_trip(self):
        params = SystemParams(n=3, m=4, M='3/2', L=1, B=4)
        cache = rap_cache(uniform_distribution(4), params, np.random.default_rng(4))
        restored = CacheConfiguration.from_json(cache.to_json())
        np.testing.assert_array_equal(restored.cached, cache.cached)

    def test_malformed_dict(self):
        with self.assertRaises(InvalidParameters):
            CacheConfiguration.from_dict({'n': 1, 'm': 1, 'B': 1, 'users': {'1': {'2': [1]}}})
