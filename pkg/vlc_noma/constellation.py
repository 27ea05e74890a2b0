"""
Power-domain constellations for L transmitters.

Transmitter 1 has the weakest channel and the largest power levels; transmitter
L has the strongest channel and the levels 1 .. 2^eta_L. Every transmitter uses
equally spaced integer levels, spaced widely enough that the sum of all weaker
interferers never crosses the decision midpoint of a stronger transmitter.
"""

from fractions import Fraction
from math import floor
from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from tabulate import tabulate

from .errors import ConfigError, DomainError
from .logger import get_logger

logger = get_logger(__name__)


class TxProfile(BaseModel):
    """Spectral efficiency and channel gain of one transmitter."""

    model_config = ConfigDict(frozen=True)

    spectral_efficiency: int = Field(ge=1, description="Bits per channel use")
    gain: float = Field(gt=0.0, description="Channel gain h_x")


class RawConstellation(BaseModel):
    """Integer power levels per transmitter, index 0 being transmitter 1."""

    model_config = ConfigDict(frozen=True)

    etas: List[int]
    gains: List[float]
    levels: List[List[int]]
    spacings: List[int]
    strict: bool = False

    @model_validator(mode="after")
    def _check_levels(self) -> "RawConstellation":
        if not (len(self.etas) == len(self.gains) == len(self.levels) == len(self.spacings)):
            raise ValueError("etas, gains, levels and spacings must have equal length")
        for x, (eta, points, spacing) in enumerate(zip(self.etas, self.levels, self.spacings), 1):
            if len(points) != 2 ** eta:
                raise ValueError(f"Tx{x} needs {2 ** eta} levels, got {len(points)}")
            if points[0] < 1:
                raise ValueError(f"Tx{x} levels must be positive integers")
            if any(b - a != spacing for a, b in zip(points, points[1:])):
                raise ValueError(f"Tx{x} levels are not equally spaced by {spacing}")
            if len(points) > 1 and spacing < 1:
                raise ValueError(f"Tx{x} levels must be strictly increasing")
        return self

    @property
    def num_tx(self) -> int:
        return len(self.levels)

    @property
    def peak_levels(self) -> List[int]:
        return [points[-1] for points in self.levels]

    @property
    def total(self) -> int:
        """Sum of every level of every transmitter."""
        return sum(sum(points) for points in self.levels)


class NormalizedConstellation(BaseModel):
    """Real transmit levels after sum normalisation and brightness scaling."""

    model_config = ConfigDict(frozen=True)

    etas: List[int]
    levels: List[List[float]]
    scale: float = Field(gt=0.0, description="Brightness factor applied after sum normalisation")
    budget: float = Field(gt=0.0, description="Power per channel use for all transmitters")

    @model_validator(mode="after")
    def _check_budget(self) -> "NormalizedConstellation":
        for x, points in enumerate(self.levels, 1):
            if points[0] <= 0 or any(b <= a for a, b in zip(points, points[1:])):
                raise ValueError(f"Tx{x} levels must be positive and strictly increasing")
        peak = sum(points[-1] for points in self.levels)
        if peak > self.budget * (1 + 1e-12):
            raise ValueError(f"peak power {peak} exceeds budget {self.budget}")
        return self

    @property
    def num_tx(self) -> int:
        return len(self.levels)


class Violation(BaseModel):
    """One failed check: rule is "ordering" or "zero-ber"."""

    rule: str
    tx: int
    level: int
    lhs: float
    rhs: float

    def describe(self) -> str:
        if self.rule == "ordering":
            return (f"SIC ordering: Tx{self.tx} level {self.level} received "
                    f"{self.lhs:.6g} <= Tx{self.tx + 1} peak {self.rhs:.6g}")
        return (f"zero-BER margin: Tx{self.tx} level {self.level} worst case "
                f"{self.lhs:.6g} >= midpoint {self.rhs:.6g}")


class ValidationReport(BaseModel):
    """Outcome of the ordering and zero-BER checks."""

    num_tx: int
    violations: List[Violation] = Field(default_factory=list)

    @property
    def ordering_ok(self) -> bool:
        return not any(v.rule == "ordering" for v in self.violations)

    @property
    def zero_ber_ok(self) -> bool:
        return not any(v.rule == "zero-ber" for v in self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"{self.num_tx} transmitter(s): SIC ordering and zero-BER margin hold"
        return "; ".join(v.describe() for v in self.violations)


Levels = Union[RawConstellation, NormalizedConstellation, Sequence[Sequence[float]]]


def level_lists(constellation: Levels) -> List[List[float]]:
    """Plain per-transmitter level lists from any constellation form."""
    if isinstance(constellation, (RawConstellation, NormalizedConstellation)):
        return [list(points) for points in constellation.levels]
    return [list(points) for points in constellation]


def level_arrays(constellation: Levels) -> List[np.ndarray]:
    return [np.asarray(points, dtype=float) for points in level_lists(constellation)]


def profiles_from(etas: Sequence[int], gains: Sequence[float]) -> List[TxProfile]:
    """Pair spectral efficiencies with gains, transmitter 1 first."""
    if len(etas) != len(gains):
        raise ConfigError(f"{len(etas)} spectral efficiencies but {len(gains)} gains")
    profiles = []
    for x, (eta, gain) in enumerate(zip(etas, gains), start=1):
        try:
            profiles.append(TxProfile(spectral_efficiency=eta, gain=gain))
        except ValidationError as e:
            problem = e.errors()[0]
            field = problem["loc"][0] if problem["loc"] else "profile"
            raise ConfigError(f"Tx{x} {field} {problem['input']} rejected: {problem['msg']}") from e
    return profiles


def spectral_efficiency(profiles: Sequence[TxProfile]) -> int:
    """System spectral efficiency in bits per channel use."""
    return sum(p.spectral_efficiency for p in profiles)


def generate_constellations(profiles: Sequence[TxProfile], strict: bool = False) -> RawConstellation:
    """
    Generate integer power levels for every transmitter.

    Args:
        profiles: Transmitters sorted by non-decreasing gain (Tx1 weakest)
        strict: Start each transmitter just above the received peak of the next
            one instead of at 2^eta_{x+1} + 1, so the SIC ordering holds for L >= 3

    Returns:
        RawConstellation with levels P_x^1 .. P_x^{2^eta_x}
    """
    if not profiles:
        raise ConfigError("at least one transmitter profile is required")
    gains = [p.gain for p in profiles]
    if any(b < a for a, b in zip(gains, gains[1:])):
        raise ConfigError(f"gains must be sorted ascending (Tx1 weakest), got {gains}")

    num_tx = len(profiles)
    exact_gains = [Fraction(g) for g in gains]
    levels: List[Optional[List[int]]] = [None] * num_tx
    spacings = [0] * num_tx

    last = profiles[-1].spectral_efficiency
    levels[-1] = list(range(1, 2 ** last + 1))
    spacings[-1] = 1

    for x in range(num_tx - 2, -1, -1):
        nxt = x + 1
        if strict:
            ratio = levels[nxt][-1] * exact_gains[nxt] / exact_gains[x]
            first = floor(ratio) + 1
        else:
            first = 2 ** profiles[nxt].spectral_efficiency + 1

        # received peak of every weaker-power transmitter, in units of h_x
        interference = sum(levels[r][-1] * exact_gains[r] for r in range(nxt, num_tx))
        offset = 2 * interference / exact_gains[x]

        # floor(offset + P + 1) = P + floor(offset + 1) for integer P
        spacing = floor(offset + 1)
        count = 2 ** profiles[x].spectral_efficiency
        levels[x] = [first + q * spacing for q in range(count)]
        spacings[x] = spacing

    raw = RawConstellation(
        etas=[p.spectral_efficiency for p in profiles],
        gains=gains,
        levels=levels,
        spacings=spacings,
        strict=strict,
    )
    logger.debug(f"generated constellation spacings={spacings} strict={strict}")
    return raw


def normalize(raw: RawConstellation, budget: float = 1.0) -> NormalizedConstellation:
    """
    Divide by the sum of all levels, then scale so the peak-use sum equals the budget.

    Args:
        raw: Integer constellation
        budget: Transmit power per channel use shared by all transmitters

    Returns:
        NormalizedConstellation with sum of peak levels exactly equal to budget
    """
    if budget <= 0:
        raise DomainError(f"power budget must be positive, got {budget}")
    total = raw.total
    peak = sum(raw.peak_levels)
    scale = budget * total / peak
    # P / total * scale simplifies to P * budget / peak
    levels = [[p * budget / peak for p in points] for points in raw.levels]
    return NormalizedConstellation(etas=list(raw.etas), levels=levels, scale=scale, budget=budget)


def validate(constellation: Levels, gains: Sequence[float]) -> ValidationReport:
    """
    Check the SIC ordering (all level pairs of adjacent decode ranks) and the
    zero-BER midpoint condition of every transmitter.

    Args:
        constellation: Raw or normalised levels, Tx1 first
        gains: Channel gains aligned with the constellation

    Returns:
        ValidationReport listing every violation
    """
    levels = level_lists(constellation)
    if len(levels) != len(gains):
        raise ConfigError(f"{len(levels)} transmitters but {len(gains)} gains")

    exact_levels = [[Fraction(p) for p in points] for points in levels]
    exact_gains = [Fraction(g) for g in gains]
    received_peaks = [points[-1] * h for points, h in zip(exact_levels, exact_gains)]

    report = ValidationReport(num_tx=len(levels))
    for x, (points, h) in enumerate(zip(exact_levels, exact_gains)):
        if x + 1 < len(levels):
            for q, p in enumerate(points, 1):
                if not p * h > received_peaks[x + 1]:
                    report.violations.append(Violation(
                        rule="ordering", tx=x + 1, level=q,
                        lhs=float(p * h), rhs=float(received_peaks[x + 1]),
                    ))

        interference = sum(received_peaks[x + 1:], Fraction(0))
        for q in range(len(points) - 1):
            worst = points[q] * h + interference
            midpoint = (points[q + 1] + points[q]) * h / 2
            if not worst < midpoint:
                report.violations.append(Violation(
                    rule="zero-ber", tx=x + 1, level=q + 1,
                    lhs=float(worst), rhs=float(midpoint),
                ))

    if not report.ok:
        logger.warning(f"constellation check: {report.summary()}")
    return report


def render_table(raw: RawConstellation, normalized: Optional[NormalizedConstellation] = None) -> str:
    """Plain-text table, one row per transmitter: eta, lambda, levels."""
    headers = ["tx", "eta", "lambda", "levels"]
    if normalized is not None:
        headers.append("normalized")
    rows = []
    for x in range(raw.num_tx):
        row = [f"Tx{x + 1}", raw.etas[x], raw.spacings[x], " ".join(str(p) for p in raw.levels[x])]
        if normalized is not None:
            row.append(" ".join(f"{p:.10g}" for p in normalized.levels[x]))
        rows.append(row)
    return tabulate(rows, headers=headers, tablefmt="plain")
