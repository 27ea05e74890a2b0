"""
Tests for the closed-form operation counts.
"""

import itertools
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from vlc_noma.complexity import (
    CSV_HEADER,
    bc_complexity_table,
    bc_noma_ml_count,
    bc_oma_ml_count,
    dc_bias_operations,
    fft_real_additions,
    fft_real_multiplications,
    jml_vs_oma_inequality,
    mac_complexity_table,
    mac_ml_count,
    oma_ml_count,
    render_reports,
    reports_to_csv,
)
from vlc_noma.errors import ConfigError, DomainError


class TestComplexity(unittest.TestCase):
    """Test suite for the complexity module."""

    # ==================== MAC ====================

    def test_mac_counts_four_transmitters(self):
        etas = [2, 2, 2, 2]
        self.assertEqual(mac_ml_count("jml", etas), 256)
        self.assertEqual(mac_ml_count("sic", etas), 16)
        self.assertEqual(mac_ml_count("hybrid", etas, 0), 16)
        self.assertEqual(mac_ml_count("hybrid", etas, 2), 24)
        self.assertEqual(mac_ml_count("hybrid", etas, 3), 68)
        self.assertEqual(mac_ml_count("hybrid", etas, 4), 256)

    def test_mac_count_errors(self):
        with self.assertRaises(ConfigError):
            mac_ml_count("hybrid", [2, 2, 2], 1)
        with self.assertRaises(ConfigError):
            mac_ml_count("hybrid", [2, 2, 2])
        with self.assertRaises(ConfigError):
            mac_ml_count("mmse", [2, 2])
        with self.assertRaises(DomainError):
            mac_ml_count("sic", [0, 2])
        with self.assertRaises(ConfigError):
            mac_ml_count("sic", [])

    def test_oma_count(self):
        self.assertEqual(oma_ml_count([2, 2]), 32)
        self.assertEqual(oma_ml_count([1, 2, 3]), 2 ** 3 + 2 ** 6 + 2 ** 9)

    def test_mac_complexity_table(self):
        reports = mac_complexity_table([2, 2, 2, 2])
        schemes = [r.scheme for r in reports]
        self.assertEqual(schemes, ["sic", "hybrid-m2", "hybrid-m3", "jml", "oma"])
        self.assertEqual([r.ml_computations for r in reports], [16, 24, 68, 256, 1024])

    # ==================== BROADCAST ====================

    def test_table_iii(self):
        """Test the two-user comparison for eta = 7, 7 and N = 256."""
        noma, ofdm, oma = bc_complexity_table(7, 7, 256)
        self.assertEqual(noma.ml_computations, 384)
        self.assertEqual(ofdm.ml_computations, 384)
        self.assertEqual(oma.ml_computations, 16384)
        self.assertEqual(ofdm.real_multiplications, 6420)
        self.assertEqual(ofdm.real_additions, 26900)
        self.assertEqual(ofdm.dc_bias_operations, 768)
        self.assertIsNone(noma.real_multiplications)

    def test_bc_counts(self):
        self.assertEqual(bc_noma_ml_count([2, 3]), 4 + (4 + 8))
        self.assertEqual(bc_noma_ml_count([1, 1, 1]), 2 + 4 + 6)
        self.assertEqual(bc_oma_ml_count([1, 2]), (4 + 16) // 2)

    def test_fft_counts(self):
        self.assertEqual(fft_real_multiplications(256), 6420)
        self.assertEqual(fft_real_additions(256), 26900)
        self.assertEqual(dc_bias_operations(256), 768)

    def test_fft_size_must_be_power_of_two(self):
        for n in (0, 1, 100, 255):
            with self.assertRaises(ConfigError):
                fft_real_multiplications(n)
        with self.assertRaises(ConfigError):
            bc_complexity_table(7, 7, 200)

    # ==================== INEQUALITY ====================

    def test_jml_never_exceeds_oma(self):
        """Test L * 2^(sum eta) <= sum 2^(L eta) for every small configuration."""
        for num_tx in range(2, 7):
            for etas in itertools.product(range(1, 5), repeat=num_tx):
                check = jml_vs_oma_inequality(num_tx, list(etas))
                self.assertTrue(check.holds, msg=f"L={num_tx} eta={etas}")
                self.assertLessEqual(check.lhs, check.rhs)

    def test_inequality_errors(self):
        with self.assertRaises(DomainError):
            jml_vs_oma_inequality(1, [2])
        with self.assertRaises(ConfigError):
            jml_vs_oma_inequality(3, [2, 2])

    # ==================== RENDERING ====================

    def test_csv_output(self):
        text = reports_to_csv(bc_complexity_table(7, 7, 256))
        lines = text.splitlines()
        self.assertEqual(lines[0], ",".join(CSV_HEADER))
        self.assertTrue(lines[1].startswith("proposed-noma,384,-,-,-,"))
        self.assertTrue(lines[2].startswith("dco-ofdm-noma,384,6420,26900,768,"))
        self.assertTrue(lines[3].startswith("oma,16384,"))

    def test_render_reports(self):
        text = render_reports(mac_complexity_table([2, 2]))
        self.assertIn("ml_computations", text)
        self.assertIn("jml", text)


def run_tests():
    """Run all tests and display results."""
    loader = unittest.TestLoader()
    suite = loader.loadTestsFromTestCase(TestComplexity)

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
