"""
Tests for power-level generation, normalisation and the ordering / zero-BER checks.
"""

import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from vlc_noma.constellation import (
    RawConstellation,
    TxProfile,
    generate_constellations,
    normalize,
    profiles_from,
    render_table,
    spectral_efficiency,
    validate,
)
from vlc_noma.errors import ConfigError, DomainError


class TestConstellation(unittest.TestCase):
    """Test suite for the constellation module."""

    # ==================== GENERATION ====================

    def test_generate_two_equal_gains(self):
        """Test the hand-traced two-transmitter case."""
        raw = generate_constellations(profiles_from([1, 1], [1.0, 1.0]))
        self.assertEqual(raw.levels, [[3, 8], [1, 2]])
        self.assertEqual(raw.spacings, [5, 1])

    def test_generate_single_transmitter(self):
        raw = generate_constellations([TxProfile(spectral_efficiency=2, gain=1.0)])
        self.assertEqual(raw.levels, [[1, 2, 3, 4]])

    def test_generate_unequal_gains(self):
        """Test that a weaker Tx1 gets a spacing stretched by h2 / h1."""
        raw = generate_constellations(profiles_from([1, 1], [0.5, 1.0]))
        self.assertEqual(raw.levels, [[3, 12], [1, 2]])

    def test_generate_rejects_unsorted_gains(self):
        with self.assertRaises(ConfigError):
            generate_constellations(profiles_from([1, 1], [1.0, 0.5]))

    def test_generate_rejects_empty(self):
        with self.assertRaises(ConfigError):
            generate_constellations([])

    def test_generate_three_transmitters_verbatim(self):
        raw = generate_constellations(profiles_from([1, 1, 1], [1.0, 1.0, 1.0]))
        self.assertEqual(raw.levels[2], [1, 2])
        self.assertEqual(raw.levels[1], [3, 8])
        self.assertEqual(raw.levels[0][0], 3)

    def test_generate_three_transmitters_strict(self):
        """Test that strict mode starts Tx1 above the received peak of Tx2."""
        raw = generate_constellations(profiles_from([1, 1, 1], [1.0, 1.0, 1.0]), strict=True)
        self.assertEqual(raw.levels, [[9, 30], [3, 8], [1, 2]])
        self.assertTrue(validate(raw, [1.0, 1.0, 1.0]).ok)

    def test_constant_spacing(self):
        raw = generate_constellations(profiles_from([3, 2, 2], [0.2, 0.7, 1.0]))
        for points, spacing in zip(raw.levels, raw.spacings):
            self.assertEqual({b - a for a, b in zip(points, points[1:])}, {spacing})

    def test_spectral_efficiency(self):
        self.assertEqual(spectral_efficiency(profiles_from([2, 3, 1], [1.0, 1.0, 1.0])), 6)

    def test_profiles_reject_non_positive_gain(self):
        """Test a zero or negative gain surfaces as a ConfigError naming the transmitter."""
        with self.assertRaises(ConfigError) as ctx:
            profiles_from([1, 1], [0.0, 1.0])
        self.assertIn("Tx1", str(ctx.exception))
        self.assertIn("gain", str(ctx.exception))
        with self.assertRaises(ConfigError):
            profiles_from([1, 0], [1.0, 1.0])
        with self.assertRaises(ConfigError):
            profiles_from([1], [1.0, 2.0])

    def test_raw_constellation_rejects_uneven_spacing(self):
        with self.assertRaises(ValueError):
            RawConstellation(etas=[2], gains=[1.0], levels=[[1, 2, 4, 5]], spacings=[1])

    # ==================== NORMALISATION ====================

    def test_normalize_two_transmitters(self):
        norm = normalize(generate_constellations(profiles_from([1, 1], [1.0, 1.0])))
        expected = [[0.3, 0.8], [0.1, 0.2]]
        for got, want in zip(norm.levels, expected):
            for g, w in zip(got, want):
                self.assertAlmostEqual(g, w, places=12)
        self.assertAlmostEqual(norm.scale, 1.4, places=12)
        self.assertAlmostEqual(norm.levels[0][-1] + norm.levels[1][-1], 1.0, places=12)

    def test_normalize_single_transmitter(self):
        raw = RawConstellation(etas=[1], gains=[1.0], levels=[[1, 2]], spacings=[1])
        norm = normalize(raw)
        self.assertAlmostEqual(norm.levels[0][0], 0.5, places=12)
        self.assertAlmostEqual(norm.levels[0][1], 1.0, places=12)
        self.assertAlmostEqual(norm.scale, 1.5, places=12)

    def test_normalize_budget_scales_linearly(self):
        raw = generate_constellations(profiles_from([2, 1], [0.3, 1.0]))
        one, two = normalize(raw, 1.0), normalize(raw, 2.0)
        for a, b in zip(one.levels, two.levels):
            for p, q in zip(a, b):
                self.assertAlmostEqual(q, 2.0 * p, places=12)

    def test_normalize_rejects_non_positive_budget(self):
        raw = generate_constellations(profiles_from([1], [1.0]))
        with self.assertRaises(DomainError):
            normalize(raw, 0.0)

    # ==================== VALIDATION ====================

    def test_validate_passes(self):
        report = validate([[3, 8], [1, 2]], [1.0, 1.0])
        self.assertTrue(report.ordering_ok)
        self.assertTrue(report.zero_ber_ok)
        self.assertTrue(report.ok)

    def test_validate_zero_ber_failure(self):
        """Test that a too-narrow Tx1 spacing breaks the midpoint condition."""
        report = validate([[3, 6], [1, 2]], [1.0, 1.0])
        self.assertFalse(report.zero_ber_ok)
        failing = [v for v in report.violations if v.rule == "zero-ber"]
        self.assertEqual(len(failing), 1)
        self.assertEqual((failing[0].tx, failing[0].level), (1, 1))
        self.assertIn("zero-BER margin", report.summary())

    def test_validate_verbatim_three_transmitters_flags_ordering(self):
        raw = generate_constellations(profiles_from([1, 1, 1], [1.0, 1.0, 1.0]))
        report = validate(raw, [1.0, 1.0, 1.0])
        self.assertFalse(report.ordering_ok)
        self.assertTrue(report.zero_ber_ok)
        self.assertTrue(any(v.rule == "ordering" and v.tx == 1 and v.level == 1 for v in report.violations))

    def test_validate_two_transmitter_outputs(self):
        """Test every equal-gain two-transmitter output passes both checks."""
        for eta1 in range(1, 4):
            for eta2 in range(1, 4):
                raw = generate_constellations(profiles_from([eta1, eta2], [1.0, 1.0]))
                self.assertTrue(validate(raw, [1.0, 1.0]).ok, msg=f"eta=({eta1},{eta2})")

    def test_validate_normalized_levels(self):
        raw = generate_constellations(profiles_from([2, 2], [0.3, 1.0]))
        report = validate(normalize(raw, 3.0), [0.3, 1.0])
        self.assertTrue(report.zero_ber_ok)

    def test_validate_shape_mismatch(self):
        with self.assertRaises(ConfigError):
            validate([[3, 8], [1, 2]], [1.0])

    def test_validate_logs_violations(self):
        with self.assertLogs("vlc_noma.constellation", level="WARNING"):
            validate([[3, 6], [1, 2]], [1.0, 1.0])

    # ==================== RENDERING ====================

    def test_render_table(self):
        raw = generate_constellations(profiles_from([1, 1], [1.0, 1.0]))
        table = render_table(raw, normalize(raw))
        lines = table.splitlines()
        self.assertEqual(len(lines), 3)
        self.assertIn("3 8", lines[1])
        self.assertIn("1 2", lines[2])
        self.assertIn("0.3 0.8", lines[1])


def run_tests():
    """Run all tests and display results."""
    loader = unittest.TestLoader()
    suite = loader.loadTestsFromTestCase(TestConstellation)

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
