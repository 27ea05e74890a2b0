"""
Tests for the SIC, joint ML and hybrid MAC decoders.
"""

import sys
import unittest
from pathlib import Path
from unittest.mock import patch

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from vlc_noma.complexity import mac_ml_count
from vlc_noma.constellation import generate_constellations, normalize, profiles_from
from vlc_noma.errors import CapacityError, ConfigError
from vlc_noma.mac_decoders import (
    DecoderSpec,
    check_split,
    decode,
    decode_batch,
    hybrid_decode,
    hybrid_decode_batch,
    jml_decode,
    jml_decode_batch,
    joint_candidates,
    sic_decode,
    sic_decode_batch,
    valid_split,
)

LEVELS = [[0.3, 0.8], [0.1, 0.2]]
GAINS = [1.0, 1.0]


class TestMacDecoders(unittest.TestCase):
    """Test suite for the MAC decoders."""

    # ==================== SIC ====================

    def test_sic_hand_traces(self):
        self.assertEqual(sic_decode(1.0, LEVELS, GAINS), (2, 2))
        self.assertEqual(sic_decode(0.4, LEVELS, GAINS), (1, 1))

    def test_sic_tie_goes_to_lower_index(self):
        """Test an exact midpoint tie on Tx1 resolves to level 1."""
        self.assertEqual(sic_decode(5.5, [[3, 8], [1, 2]], GAINS), (1, 2))

    def test_sic_tie_on_normalized_levels(self):
        """Test a midpoint that rounds an ulp off the tie still picks level 1."""
        # |0.55 - 0.3| evaluates to 0.25000000000000006, |0.55 - 0.8| to 0.25
        self.assertEqual(sic_decode(0.55, LEVELS, GAINS), (1, 2))
        np.testing.assert_array_equal(sic_decode_batch(np.array([0.55]), LEVELS, GAINS), [[1, 2]])

    # ==================== JML ====================

    def test_jml_hand_traces(self):
        self.assertEqual(jml_decode(1.0, LEVELS, GAINS), (2, 2))
        self.assertEqual(jml_decode(0.93, LEVELS, GAINS), (2, 1))
        self.assertEqual(jml_decode(0.48, LEVELS, GAINS), (1, 2))

    def test_jml_tie_is_lexicographic(self):
        """Test equal candidate sums resolve to the smallest index vector."""
        # sums: (1,1)=2, (1,2)=3, (2,1)=3, (2,2)=4
        self.assertEqual(jml_decode(3.0, [[1, 2], [1, 2]], GAINS), (1, 2))

    def test_jml_tie_on_float_sums(self):
        """Test lexicographic tie-breaking survives rounding in candidate sums."""
        # (1,2) sums to 0.1 + 0.7 = 0.7999999999999999, (2,1) to 0.5 + 0.3 = 0.8
        self.assertEqual(jml_decode(0.8, [[0.1, 0.5], [0.3, 0.7]], GAINS), (1, 2))

    def test_joint_candidates_order(self):
        sums, shape = joint_candidates([np.array([0.3, 0.8]), np.array([0.1, 0.2])])
        self.assertEqual(shape, (2, 2))
        np.testing.assert_allclose(sums, [0.4, 0.5, 0.9, 1.0])

    def test_jml_capacity_guard(self):
        with patch("vlc_noma.mac_decoders.config.jml_limit", 8):
            with self.assertRaises(CapacityError):
                jml_decode(1.0, [[1, 2, 3, 4], [1, 2, 3, 4]], GAINS)

    # ==================== HYBRID ====================

    def test_hybrid_degenerate_splits(self):
        self.assertEqual(hybrid_decode(1.0, LEVELS, GAINS, 0), sic_decode(1.0, LEVELS, GAINS))
        self.assertEqual(hybrid_decode(0.93, LEVELS, GAINS, 2), jml_decode(0.93, LEVELS, GAINS))

    def test_hybrid_three_transmitters(self):
        """Test joint decoding of Tx1/Tx2 followed by SIC on Tx3."""
        levels = [[9, 30], [3, 8], [1, 2]]
        self.assertEqual(hybrid_decode(35.0, levels, [1.0, 1.0, 1.0], 2), (2, 1, 2))

    def test_hybrid_invalid_split(self):
        with self.assertRaises(ConfigError):
            hybrid_decode(1.0, [[9, 30], [3, 8], [1, 2]], [1.0, 1.0, 1.0], 1)
        with self.assertRaises(ConfigError):
            hybrid_decode(1.0, LEVELS, GAINS, 3)

    def test_check_split(self):
        check_split(0, 4)
        check_split(2, 4)
        check_split(4, 4)
        check_split(1, 1)
        for bad in (1, 5, -1):
            with self.assertRaises(ConfigError):
                check_split(bad, 4)

    def test_split_rule_shared_with_counts(self):
        """Test the decoder and the operation counts accept the same splits."""
        for num_tx in range(1, 6):
            etas = [1] * num_tx
            for m in range(-1, num_tx + 2):
                self.assertEqual(valid_split(m, num_tx), m in {0, num_tx} or 2 <= m < num_tx)
                if valid_split(m, num_tx):
                    mac_ml_count("hybrid", etas, m)
                else:
                    with self.assertRaises(ConfigError):
                        mac_ml_count("hybrid", etas, m)
        self.assertEqual(mac_ml_count("hybrid", [2], 1), 4)
        self.assertEqual(jml_decode(0.9, [[0.5, 1.0]], [1.0]), (2,))

    def test_batch_degeneracy_on_random_samples(self):
        """Test M=0 and M=L match SIC and JML decision for decision."""
        raw = generate_constellations(profiles_from([2, 1, 2], [0.2, 0.5, 1.0]), strict=True)
        levels = normalize(raw).levels
        gains = [0.2, 0.5, 1.0]
        samples = np.random.default_rng(3).uniform(0.0, 0.6, size=5000)
        np.testing.assert_array_equal(hybrid_decode_batch(samples, levels, gains, 0),
                                      sic_decode_batch(samples, levels, gains))
        np.testing.assert_array_equal(hybrid_decode_batch(samples, levels, gains, 3),
                                      jml_decode_batch(samples, levels, gains))

    def test_chunked_decisions_match(self):
        """Test that the distance-block size does not change decisions."""
        samples = np.random.default_rng(5).uniform(0.0, 1.2, size=3001)
        full = jml_decode_batch(samples, LEVELS, GAINS)
        with patch("vlc_noma.mac_decoders.config.block_elements", 7):
            chunked = jml_decode_batch(samples, LEVELS, GAINS)
        np.testing.assert_array_equal(full, chunked)

    def test_scale_equivariance(self):
        """Test that scaling samples and levels together keeps every decision."""
        samples = np.random.default_rng(11).uniform(0.0, 1.2, size=2000)
        # a power of two keeps the scaled arithmetic exact
        c = 0.125
        scaled_levels = [[p * c for p in points] for points in LEVELS]
        for m in (0, 2):
            np.testing.assert_array_equal(hybrid_decode_batch(samples, LEVELS, GAINS, m),
                                          hybrid_decode_batch(samples * c, scaled_levels, GAINS, m))

    def test_scalar_matches_batch(self):
        samples = [0.12, 0.47, 0.55, 0.9, 1.3]
        batch = decode_batch(DecoderSpec(kind="jml"), np.array(samples), LEVELS, GAINS)
        for y, row in zip(samples, batch):
            self.assertEqual(decode(DecoderSpec(kind="jml"), y, LEVELS, GAINS), tuple(int(q) for q in row))

    # ==================== SPEC ====================

    def test_decoder_spec(self):
        self.assertEqual(DecoderSpec(kind="hybrid", m=3).label(), "hybrid-m3")
        self.assertEqual(DecoderSpec().label(), "sic")
        with self.assertRaises(ConfigError):
            DecoderSpec(kind="hybrid").check(4)
        with self.assertRaises(ConfigError):
            DecoderSpec(kind="hybrid", m=1).check(4)
        DecoderSpec(kind="hybrid", m=0).check(4)

    def test_gain_count_mismatch(self):
        with self.assertRaises(ConfigError):
            sic_decode(1.0, LEVELS, [1.0])


def run_tests():
    """Run all tests and display results."""
    loader = unittest.TestLoader()
    suite = loader.loadTestsFromTestCase(TestMacDecoders)

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    print("\n" + "=" * 70)
    print("TEST SUMMARY")
    print("=" * 70)
    print(f"Tests run: {result.testsRun}")
    print(f"Successes: {result.testsRun - len(result.failures) - len(result.errors)}")
    print(f"Failures: {len(result.failures)}")
    print(f"Errors: {len(result.errors)}")
    print("=" * 70)

    return result.wasSuccessful()


if __name__ == "__main__":
    success = run_tests()
    sys.exit(0 if success else 1)
