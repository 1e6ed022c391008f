"""Streaming normalizer against two-pass batch statistics."""

import numpy as np
import pytest

from mace.normalize import OnlineNormalizer


class TestStreaming:
    def test_first_observation_normalizes_to_zero(self):
        norm = OnlineNormalizer(4)
        out = norm.update(np.array([3.0, -1.0, 0.5, 100.0]))
        np.testing.assert_array_equal(out, np.zeros(4))

    def test_constant_stream_pins_mean_and_kills_variance(self):
        norm = OnlineNormalizer(3)
        vec = np.array([1.0, -2.0, 5.0])
        for _ in range(1000):
            norm.update(vec)
        np.testing.assert_allclose(norm.mean, vec, rtol=1e-12)
        np.testing.assert_allclose(norm.var, 0.0, atol=1e-18)

    def test_matches_two_pass_batch_statistics(self):
        rng = np.random.default_rng(21)
        stream = rng.normal(3.0, 2.5, size=(500, 6))
        norm = OnlineNormalizer(6)
        for row in stream:
            norm.update(row)
        np.testing.assert_allclose(norm.mean, stream.mean(axis=0), rtol=1e-9)
        np.testing.assert_allclose(norm.var, stream.var(axis=0), rtol=1e-9)

    def test_normalized_stationary_stream_standardizes(self):
        rng = np.random.default_rng(8)
        norm = OnlineNormalizer(2)
        outs = np.array([norm.update(rng.normal(5.0, 3.0, 2)) for _ in range(10_000)])
        tail = outs[1000:]
        assert np.all(np.abs(tail.mean(axis=0)) < 0.05)
        assert np.all(np.abs(tail.var(axis=0) - 1.0) < 0.05)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            OnlineNormalizer(3).update(np.zeros(4))


class TestSerialization:
    def test_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(4)
        norm = OnlineNormalizer(5)
        for _ in range(137):
            norm.update(rng.normal(size=5))
        clone = OnlineNormalizer.load(norm.save())
        assert clone.state_equal(norm)

    def test_truncated_payload_rejected(self):
        norm = OnlineNormalizer(3)
        norm.update(np.ones(3))
        with pytest.raises(ValueError, match="corrupt"):
            OnlineNormalizer.load(norm.save()[:20])

    def test_wrong_version_rejected(self):
        with pytest.raises(ValueError, match="version"):
            OnlineNormalizer.load(b'{"version": 99, "count": 0, "mean": [0], "var": [0], "frozen": false}')

    def test_loaded_frozen_state_reproduces_outputs(self):
        rng = np.random.default_rng(10)
        norm = OnlineNormalizer(4)
        for _ in range(100):
            norm.update(rng.normal(size=4))
        held_out = rng.normal(size=4)
        clone = OnlineNormalizer.load(norm.save())
        clone.freeze()
        norm.freeze()
        np.testing.assert_array_equal(clone.update(held_out), norm.update(held_out))


class TestFrozen:
    def test_frozen_update_is_pure(self):
        norm = OnlineNormalizer(2)
        norm.update(np.array([1.0, 2.0]))
        norm.update(np.array([3.0, 4.0]))
        norm.freeze()
        before = norm.save()
        x = np.array([10.0, -10.0])
        out1 = norm.update(x)
        out2 = norm.update(x)
        np.testing.assert_array_equal(out1, out2)
        assert norm.save() == before

    def test_frozen_matches_explicit_normalize(self):
        norm = OnlineNormalizer(2)
        norm.update(np.array([1.0, 2.0]))
        norm.update(np.array([5.0, 0.0]))
        norm.freeze()
        x = np.array([2.0, 2.0])
        np.testing.assert_array_equal(norm.update(x), norm.normalize(x))
