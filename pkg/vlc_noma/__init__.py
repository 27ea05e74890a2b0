"""
Non-OFDM power-domain NOMA simulator for visible light communication.

Intensity-modulated LEDs superpose positive-integer power levels; receivers
separate them with SIC, joint ML or the hybrid M JML + (L - M) SIC decoder.
"""

__version__ = "1.0.0"

from .broadcast import BcConfig, bc_user_decode, bc_user_decode_batch, bc_user_ml_count, superpose
from .channel import (
    LinkGeometry,
    OpticalParams,
    Scenario,
    SortedGains,
    channel_gain,
    concentrator_gain,
    coverage_radius,
    get_scenario,
    lambertian_order,
    scenario_gains,
)
from .complexity import (
    ComplexityReport,
    bc_complexity_table,
    jml_vs_oma_inequality,
    mac_complexity_table,
    mac_ml_count,
)
from .constellation import (
    NormalizedConstellation,
    RawConstellation,
    TxProfile,
    ValidationReport,
    generate_constellations,
    normalize,
    validate,
)
from .errors import CapacityError, ConfigError, DomainError, ValidationError, VlcNomaError
from .mac_decoders import DecoderSpec, decode, hybrid_decode, jml_decode, sic_decode
from .simulate import (
    BerResult,
    MacSystem,
    OptimalMQuery,
    OptimalMResult,
    SweepConfig,
    average_snr_bc,
    average_snr_mac,
    build_mac_system,
    find_optimal_m,
    oma_baseline_ber,
    run_ber_bc,
    run_ber_mac,
)

__all__ = [
    "BcConfig", "BerResult", "CapacityError", "ComplexityReport", "ConfigError",
    "DecoderSpec", "DomainError", "LinkGeometry", "MacSystem", "NormalizedConstellation",
    "OpticalParams", "OptimalMQuery", "OptimalMResult", "RawConstellation", "Scenario",
    "SortedGains", "SweepConfig", "TxProfile", "ValidationError", "ValidationReport",
    "VlcNomaError", "average_snr_bc", "average_snr_mac", "bc_complexity_table",
    "bc_user_decode", "bc_user_decode_batch", "bc_user_ml_count", "build_mac_system",
    "channel_gain", "concentrator_gain", "coverage_radius", "decode", "find_optimal_m",
    "generate_constellations", "get_scenario", "hybrid_decode", "jml_decode",
    "jml_vs_oma_inequality", "lambertian_order", "mac_complexity_table", "mac_ml_count",
    "normalize", "oma_baseline_ber", "run_ber_bc", "run_ber_mac", "scenario_gains",
    "sic_decode", "superpose", "validate",
]
