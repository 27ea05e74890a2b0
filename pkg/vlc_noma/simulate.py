"""
Monte Carlo BER engine for the MAC and BC links, average-SNR bookkeeping, the
PAM-TDMA baseline and the search for the cheapest hybrid split meeting a BER
target.

Every random draw comes from a numpy generator seeded by
SeedSequence(master seed, spawn_key=(grid point, stream, entity)), so a grid
point produces the same symbols and noise whatever the worker count, decoder or
position of other points in the grid.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .broadcast import BcConfig, bc_user_decode_batch, superpose_batch
from .complexity import mac_ml_count
from .config import config
from .constellation import (
    Levels,
    NormalizedConstellation,
    RawConstellation,
    ValidationReport,
    generate_constellations,
    level_arrays,
    normalize,
    profiles_from,
    validate,
)
from .errors import ConfigError, DomainError, ValidationError
from .logger import get_logger
from .mac_decoders import DecoderSpec, decode_batch

logger = get_logger(__name__)

Mapping = Literal["natural", "gray"]

# spawn_key stream tags
_SYMBOLS, _NOISE, _OMA_SYMBOLS, _OMA_NOISE = 0, 1, 2, 3

CSV_HEADER = ["snr_db", "entity_id", "bits", "errors", "ber"]


# ---------------------------------------------------------------- types

class SweepConfig(BaseModel):
    """SNR grid and Monte Carlo budget shared by every BER run."""

    model_config = ConfigDict(frozen=True)

    snr_db: List[float]
    uses_per_point: int = Field(ge=1, description="Channel uses simulated per grid point")
    seed: int = Field(default=0, ge=0)
    decoder: DecoderSpec = Field(default_factory=DecoderSpec)
    mapping: Mapping = "natural"

    @field_validator("snr_db")
    @classmethod
    def _ascending(cls, grid: List[float]) -> List[float]:
        if not grid:
            raise ValueError("SNR grid must not be empty")
        if any(not math.isfinite(s) for s in grid):
            raise ValueError("SNR grid values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("SNR grid must be strictly ascending")
        return grid


class MacSystem(BaseModel):
    """Transmitters of one MAC link: levels and gains, Tx1 first."""

    model_config = ConfigDict(frozen=True)

    etas: List[int]
    gains: List[float]
    constellation: NormalizedConstellation
    raw: Optional[RawConstellation] = None

    @property
    def num_tx(self) -> int:
        return len(self.etas)


class BerResult(BaseModel):
    """Bit and error counts per grid point (outer) and entity (inner)."""

    snr_db: List[float]
    entity_ids: List[str]
    bits: List[List[int]]
    errors: List[List[int]]

    def ber(self, point: int, entity: int) -> float:
        bits = self.bits[point][entity]
        return self.errors[point][entity] / bits if bits else 0.0

    def ber_table(self) -> List[List[float]]:
        return [[self.ber(p, e) for e in range(len(self.entity_ids))] for p in range(len(self.snr_db))]

    def entity_ber(self, entity_id: str) -> List[float]:
        e = self.entity_ids.index(entity_id)
        return [self.ber(p, e) for p in range(len(self.snr_db))]

    def average_ber(self, prefix: str = "") -> List[float]:
        """Mean BER across entities per grid point, optionally limited by id prefix."""
        chosen = [e for e, name in enumerate(self.entity_ids) if name.startswith(prefix)]
        return [float(np.mean([self.ber(p, e) for e in chosen])) for p in range(len(self.snr_db))]

    def standard_error(self, point: int, entity: int) -> float:
        bits = self.bits[point][entity]
        if not bits:
            return 0.0
        p = self.ber(point, entity)
        return math.sqrt(p * (1.0 - p) / bits)

    def merge(self, other: "BerResult") -> "BerResult":
        """Append another result's entities over the same grid."""
        if other.snr_db != self.snr_db:
            raise ConfigError("cannot merge results over different SNR grids")
        return BerResult(
            snr_db=list(self.snr_db),
            entity_ids=self.entity_ids + other.entity_ids,
            bits=[a + b for a, b in zip(self.bits, other.bits)],
            errors=[a + b for a, b in zip(self.errors, other.errors)],
        )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p, snr in enumerate(self.snr_db):
            for e, name in enumerate(self.entity_ids):
                writer.writerow([f"{snr:g}", name, self.bits[p][e], self.errors[p][e],
                                 f"{self.ber(p, e):.12g}"])
        return buffer.getvalue()


class OptimalMQuery(BaseModel):
    v: int = Field(ge=1, description="BER target exponent, target is 10^-v")
    gamma_db: float = Field(gt=0.0, description="SNR cap in dB")
    target: int = Field(ge=1, description="1-based transmitter whose BER is constrained")


class OptimalMResult(BaseModel):
    v: int
    target: int
    feasible: bool
    m_hat: Optional[int] = None
    computations: Optional[int] = None
    target_ber: Optional[float] = None
    # (M, computations, target BER) for every candidate tried
    evaluated: List[Tuple[int, int, float]] = Field(default_factory=list)

    def csv_row(self) -> List[object]:
        return [self.v, self.target,
                "" if self.target_ber is None else f"{self.target_ber:.12g}",
                "" if self.m_hat is None else self.m_hat,
                "" if self.computations is None else self.computations,
                str(self.feasible).lower()]


# ---------------------------------------------------------------- builders

def build_mac_system(etas: Sequence[int], gains: Sequence[float], budget: float = 1.0,
                     strict: bool = False, strict_validation: bool = False) -> MacSystem:
    """
    Generate, normalise and check the constellation of a MAC link.

    Raises:
        ValidationError: when the zero-BER condition fails, or the SIC
            ordering fails under strict_validation
    """
    raw = generate_constellations(profiles_from(etas, gains), strict=strict)
    report = validate(raw, gains)
    _enforce(report, strict_validation)
    return MacSystem(etas=list(etas), gains=list(gains), constellation=normalize(raw, budget), raw=raw)


def _enforce(report: ValidationReport, strict_validation: bool) -> None:
    if not report.zero_ber_ok or (strict_validation and not report.ordering_ok):
        raise ValidationError(f"constellation rejected: {report.summary()}", report)


# ---------------------------------------------------------------- bit mapping

def _code(indices: np.ndarray, mapping: Mapping) -> np.ndarray:
    code = np.asarray(indices, dtype=np.int64) - 1
    if mapping == "gray":
        code = code ^ (code >> 1)
    return code


def _decode_code(code: int, mapping: Mapping) -> int:
    if mapping == "gray":
        value, shift = code, code >> 1
        while shift:
            value ^= shift
            shift >>= 1
        code = value
    return code + 1


def map_bits(q: int, eta: int, mapping: Mapping = "natural") -> str:
    """Bit word of 1-based index q, most significant bit first."""
    if eta < 1 or not 1 <= q <= 2 ** eta:
        raise DomainError(f"index {q} outside 1..2^{eta}")
    return format(int(_code(np.array([q]), mapping)[0]), f"0{eta}b")


def bits_to_index(word: str, mapping: Mapping = "natural") -> int:
    """Inverse of map_bits."""
    if not word or any(c not in "01" for c in word):
        raise DomainError(f"not a bit word: {word!r}")
    return _decode_code(int(word, 2), mapping)


def bit_errors(sent: np.ndarray, decided: np.ndarray, eta: int, mapping: Mapping) -> int:
    """Total Hamming distance between the bit words of two index arrays."""
    diff = _code(sent, mapping) ^ _code(decided, mapping)
    total = 0
    for bit in range(eta):
        total += int(np.count_nonzero((diff >> bit) & 1))
    return total


# ---------------------------------------------------------------- SNR

def _mean_square_sum(contributions: Sequence[np.ndarray]) -> float:
    """E[(sum_x c_x)^2] for independent uniform picks from each array."""
    means = [float(np.mean(c)) for c in contributions]
    variances = [float(np.mean(c * c)) - m * m for c, m in zip(contributions, means)]
    return sum(means) ** 2 + sum(variances)


def _mac_mean_square(constellation: Levels, gains: Sequence[float]) -> float:
    levels = level_arrays(constellation)
    if len(levels) != len(gains):
        raise ConfigError(f"{len(levels)} transmitters but {len(gains)} gains")
    return _mean_square_sum([points * float(h) for points, h in zip(levels, gains)])


def average_snr_mac(constellation: Levels, gains: Sequence[float], noise_var: float) -> float:
    """Average received SNR in dB over all symbol combinations."""
    if noise_var <= 0:
        raise DomainError(f"noise variance must be positive, got {noise_var}")
    return 10.0 * math.log10(_mac_mean_square(constellation, gains) / noise_var)


def noise_for_snr(constellation: Levels, gains: Sequence[float], snr_db: float) -> float:
    """Noise variance giving the requested average received SNR."""
    if not math.isfinite(snr_db):
        raise DomainError(f"SNR must be finite, got {snr_db}")
    return _mac_mean_square(constellation, gains) / 10.0 ** (snr_db / 10.0)


def _bc_mean_square(config: BcConfig) -> float:
    return _mean_square_sum([np.asarray(points, dtype=float) for points in config.levels])


def average_snr_bc(config: BcConfig, alpha: int) -> float:
    """Average SNR in dB at user alpha, users drawing symbols independently."""
    if not 1 <= alpha <= config.num_users:
        raise ConfigError(f"user index must lie in 1..{config.num_users}, got {alpha}")
    noise_var = config.noise_vars[alpha - 1]
    if noise_var <= 0:
        raise DomainError(f"noise variance must be positive, got {noise_var}")
    g = config.gains[alpha - 1]
    return 10.0 * math.log10(_bc_mean_square(config) * g * g / noise_var)


def bc_noise_for_snr(config: BcConfig, alpha: int, snr_db: float) -> float:
    g = config.gains[alpha - 1]
    return _bc_mean_square(config) * g * g / 10.0 ** (snr_db / 10.0)


# ---------------------------------------------------------------- engine

def _rng(seed: int, point: int, stream: int, entity: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, stream, entity)))


def _draw_indices(seed: int, point: int, stream: int, sizes: Sequence[int], n: int) -> np.ndarray:
    columns = [_rng(seed, point, stream, e).integers(1, size + 1, size=n) for e, size in enumerate(sizes)]
    return np.stack(columns, axis=1)


def draw_mac_samples(system: MacSystem, sweep: SweepConfig,
                     point: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Symbols and received samples of one grid point.

    Returns:
        (indices, samples, noise_var): 1-based indices (n, L), received
        samples (n,) and the noise variance used
    """
    n = sweep.uses_per_point
    levels = level_arrays(system.constellation)
    indices = _draw_indices(sweep.seed, point, _SYMBOLS, [len(p) for p in levels], n)

    clean = np.zeros(n)
    for x, (points, h) in enumerate(zip(levels, system.gains)):
        clean = clean + points[indices[:, x] - 1] * h

    noise_var = noise_for_snr(system.constellation, system.gains, sweep.snr_db[point])
    noise = _rng(sweep.seed, point, _NOISE, 0).standard_normal(n)
    return indices, clean + math.sqrt(noise_var) * noise, noise_var


def _run_points(worker: Callable[[int], Tuple[List[int], List[int]]], num_points: int,
                workers: Optional[int]) -> Tuple[List[List[int]], List[List[int]]]:
    count = workers if workers and workers > 0 else config.get_worker_count()
    count = max(1, min(count, num_points))
    if count == 1:
        outcomes = [worker(p) for p in range(num_points)]
    else:
        with ThreadPoolExecutor(max_workers=count) as pool:
            # map preserves grid order whatever the completion order
            outcomes = list(pool.map(worker, range(num_points)))
    return [o[0] for o in outcomes], [o[1] for o in outcomes]


def run_ber_mac(system: MacSystem, sweep: SweepConfig, workers: Optional[int] = None) -> BerResult:
    """
    Monte Carlo BER of every transmitter over the SNR grid.

    Args:
        system: Checked MAC link
        sweep: Grid, budget, seed, decoder and bit mapping
        workers: Thread count; defaults to VLC_NOMA_THREADS

    Returns:
        BerResult with entity ids tx1 .. txL
    """
    sweep.decoder.check(system.num_tx)
    logger.info(f"MAC sweep: {len(sweep.snr_db)} points x {sweep.uses_per_point} uses",
                mode="ber-mac", decoder=sweep.decoder.label(), seed=sweep.seed)

    def worker(point: int) -> Tuple[List[int], List[int]]:
        indices, samples, _ = draw_mac_samples(system, sweep, point)
        decided = decode_batch(sweep.decoder, samples, system.constellation, system.gains)
        bits = [sweep.uses_per_point * eta for eta in system.etas]
        errors = [bit_errors(indices[:, x], decided[:, x], eta, sweep.mapping)
                  for x, eta in enumerate(system.etas)]
        logger.debug(f"point done errors={errors}", snr_db=sweep.snr_db[point], point=point)
        return bits, errors

    bits, errors = _run_points(worker, len(sweep.snr_db), workers)
    return BerResult(snr_db=list(sweep.snr_db),
                     entity_ids=[f"tx{x}" for x in range(1, system.num_tx + 1)],
                     bits=bits, errors=errors)


def draw_bc_samples(bc: BcConfig, sweep: SweepConfig, point: int) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Symbols of one grid point and the received samples at every user.

    Returns:
        (indices, samples): 1-based indices (n, K) and one array per user
    """
    n = sweep.uses_per_point
    indices = _draw_indices(sweep.seed, point, _SYMBOLS, [len(p) for p in bc.levels], n)
    transmitted = superpose_batch(bc, indices)
    samples = []
    for alpha in range(1, bc.num_users + 1):
        noise_var = bc_noise_for_snr(bc, alpha, sweep.snr_db[point])
        noise = _rng(sweep.seed, point, _NOISE, alpha).standard_normal(n)
        samples.append(transmitted * bc.gains[alpha - 1] + math.sqrt(noise_var) * noise)
    return indices, samples


def run_ber_bc(bc: BcConfig, sweep: SweepConfig, workers: Optional[int] = None) -> BerResult:
    """
    Monte Carlo BER of every broadcast user, each user's noise set so its own
    average SNR equals the grid value.

    Returns:
        BerResult with entity ids user1 .. userK
    """
    logger.info(f"BC sweep: {len(sweep.snr_db)} points x {sweep.uses_per_point} uses",
                mode="ber-bc", seed=sweep.seed)

    def worker(point: int) -> Tuple[List[int], List[int]]:
        indices, samples = draw_bc_samples(bc, sweep, point)
        bits, errors = [], []
        for alpha in range(1, bc.num_users + 1):
            decided = bc_user_decode_batch(samples[alpha - 1], bc, alpha)
            eta = bc.etas[alpha - 1]
            bits.append(sweep.uses_per_point * eta)
            errors.append(bit_errors(indices[:, alpha - 1], decided[:, -1], eta, sweep.mapping))
        return bits, errors

    bits, errors = _run_points(worker, len(sweep.snr_db), workers)
    return BerResult(snr_db=list(sweep.snr_db),
                     entity_ids=[f"user{a}" for a in range(1, bc.num_users + 1)],
                     bits=bits, errors=errors)


def oma_levels(eta: int, num_slots: int, budget: float = 1.0) -> np.ndarray:
    """Unipolar PAM with 2^(L eta) levels k * budget / 2^(L eta), k = 1 .. 2^(L eta)."""
    size = 2 ** (num_slots * eta)
    return np.arange(1, size + 1, dtype=float) * budget / size


def oma_baseline_ber(gains: Sequence[float], etas: Sequence[int], sweep: SweepConfig,
                     link: Literal["mac", "bc"] = "mac", budget: float = 1.0,
                     workers: Optional[int] = None) -> BerResult:
    """
    PAM-TDMA reference: entity e owns every L-th channel use and sends
    L * eta_e bits per owned use, keeping the aggregate rate of the NOMA link.
    Noise is set per slot so the active entity's average SNR equals the grid
    value.

    Returns:
        BerResult with entity ids oma-tx<e> (MAC) or oma-user<e> (BC)
    """
    num = len(etas)
    if num != len(gains) or num == 0:
        raise ConfigError(f"{len(etas)} spectral efficiencies but {len(gains)} gains")
    if num * max(etas) > 24:
        raise ConfigError(f"2^{num * max(etas)}-level PAM is too large for the TDMA baseline")
    slots = sweep.uses_per_point // num
    if slots < 1:
        raise ConfigError(f"{sweep.uses_per_point} channel uses cannot be shared by {num} slots")
    prefix = "oma-tx" if link == "mac" else "oma-user"

    def worker(point: int) -> Tuple[List[int], List[int]]:
        bits, errors = [], []
        for e, (eta, h) in enumerate(zip(etas, gains)):
            levels = oma_levels(eta, num, budget)
            sent = _rng(sweep.seed, point, _OMA_SYMBOLS, e).integers(1, levels.size + 1, size=slots)
            noise_var = float(np.mean((levels * h) ** 2)) / 10.0 ** (sweep.snr_db[point] / 10.0)
            noise = _rng(sweep.seed, point, _OMA_NOISE, e).standard_normal(slots)
            received = levels[sent - 1] * h + math.sqrt(noise_var) * noise
            step = budget / levels.size * h
            # nearest level of a uniform grid, ties to the lower level
            decided = np.clip(np.ceil(received / step - 0.5), 1, levels.size).astype(np.int64)
            bits.append(slots * num * eta)
            errors.append(bit_errors(sent, decided, num * eta, sweep.mapping))
        return bits, errors

    bits, errors = _run_points(worker, len(sweep.snr_db), workers)
    return BerResult(snr_db=list(sweep.snr_db),
                     entity_ids=[f"{prefix}{e}" for e in range(1, num + 1)],
                     bits=bits, errors=errors)


# ---------------------------------------------------------------- optimal M

def split_candidates(etas: Sequence[int]) -> List[Tuple[int, int]]:
    """(M, computations) for M in {0} and 2..L, cheapest first, ties by M."""
    candidates = [(0, mac_ml_count("hybrid", etas, 0))]
    candidates += [(m, mac_ml_count("hybrid", etas, m)) for m in range(2, len(etas) + 1)]
    return sorted(candidates, key=lambda c: (c[1], c[0]))


def find_optimal_m(system: MacSystem, query: OptimalMQuery, sweep: SweepConfig,
                   workers: Optional[int] = None) -> OptimalMResult:
    """
    Cheapest hybrid split whose target-transmitter BER at the SNR cap meets 10^-v.

    Args:
        system: MAC link with L >= 2
        query: BER exponent, SNR cap and target transmitter
        sweep: Supplies the Monte Carlo budget, seed and mapping; its grid
            and decoder are replaced

    Returns:
        OptimalMResult; feasible is False when no split meets the target
    """
    if system.num_tx < 2:
        raise ConfigError("the split search needs at least two transmitters")
    if query.target > system.num_tx:
        raise ConfigError(f"target Tx{query.target} does not exist (L={system.num_tx})")

    threshold = 10.0 ** (-query.v)
    evaluated = []
    for m, count in split_candidates(system.etas):
        trial = sweep.model_copy(update={"snr_db": [query.gamma_db],
                                         "decoder": DecoderSpec(kind="hybrid", m=m)})
        result = run_ber_mac(system, trial, workers=workers)
        target_ber = result.ber(0, query.target - 1)
        evaluated.append((m, count, target_ber))
        logger.info(f"split M={m} ({count} computations): Tx{query.target} BER {target_ber:.3g}")
        if target_ber <= threshold:
            return OptimalMResult(v=query.v, target=query.target, feasible=True, m_hat=m,
                                  computations=count, target_ber=target_ber, evaluated=evaluated)

    logger.warning(f"no split reaches BER 1e-{query.v} on Tx{query.target} at {query.gamma_db} dB")
    return OptimalMResult(v=query.v, target=query.target, feasible=False, evaluated=evaluated)
