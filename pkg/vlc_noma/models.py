"""
Run configuration file schema (JSON) for the command-line front-end.
"""

import math
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .channel import OpticalParams
from .mac_decoders import DecoderSpec

Mode = Literal["constellation", "ber-mac", "ber-bc", "optimal-m", "complexity"]


def parse_grid(text: str) -> List[float]:
    """
    Parse an inclusive "start:step:stop" grid or a comma list.

    Args:
        text: e.g. "100:10:160" or "10,20,30"

    Returns:
        Grid values in dB
    """
    text = text.strip()
    if ":" not in text:
        return [float(v) for v in text.split(",") if v.strip()]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:step:stop, got {text!r}")
    start, step, stop = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"grid {text!r} must have a positive step and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # rounding keeps 0.1-style steps free of binary drift
    return [round(start + i * step, 10) for i in range(count)]


def parse_list(text: str, kind=int) -> List:
    return [kind(v) for v in text.split(",") if v.strip()]


class ScenarioSection(BaseModel):
    """Built-in scenario name or explicit coordinates."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    room: Tuple[float, float, float] = (4.0, 4.0, 3.0)
    leds: Optional[List[Tuple[float, float, float]]] = None
    pds: Optional[List[Tuple[float, float, float]]] = None
    params: Optional[OpticalParams] = None

    @model_validator(mode="after")
    def _name_or_coordinates(self) -> "ScenarioSection":
        if self.name is None and (self.leds is None or self.pds is None):
            raise ValueError("scenario needs a built-in name or both leds and pds")
        return self


class TxSection(BaseModel):
    """Spectral efficiencies and optional explicit gains, Tx1 (weakest) first."""

    model_config = ConfigDict(extra="forbid")

    eta: List[int] = Field(default_factory=lambda: [2, 2])
    gains: Optional[List[float]] = None
    budget: float = Field(default=1.0, gt=0.0)
    strict: bool = False
    strict_validation: bool = False

    @field_validator("eta")
    @classmethod
    def _positive(cls, eta: List[int]) -> List[int]:
        if not eta or any(e < 1 for e in eta):
            raise ValueError("every spectral efficiency must be >= 1")
        return eta


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    snr_db: Union[str, List[float]] = "0:5:40"
    bits: float = Field(default=1e5, gt=0)
    seed: int = Field(default=0, ge=0)
    mapping: Literal["natural", "gray"] = "natural"
    oma: bool = False

    @field_validator("snr_db")
    @classmethod
    def _parsable(cls, snr_db: Union[str, List[float]]) -> Union[str, List[float]]:
        if isinstance(snr_db, str):
            parse_grid(snr_db)
        return snr_db

    def grid(self) -> List[float]:
        if isinstance(self.snr_db, str):
            return parse_grid(self.snr_db)
        return list(self.snr_db)

    def uses_for(self, etas: List[int]) -> int:
        """Channel uses giving every entity at least `bits` bits."""
        return int(math.ceil(self.bits / min(etas)))


class OptimalMSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    v: List[int] = Field(default_factory=lambda: [2, 3, 6, 8])
    gamma_db: float = Field(default=70.0, gt=0.0)
    targets: List[int] = Field(default_factory=lambda: [2, 1])

    @field_validator("v", "targets")
    @classmethod
    def _positive(cls, values: List[int]) -> List[int]:
        if not values or any(x < 1 for x in values):
            raise ValueError("BER exponents and targets must be non-empty and >= 1")
        return values


class ComplexitySection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nfft: int = 256


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: Optional[str] = None


class RunConfig(BaseModel):
    """Effective configuration of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    mode: Mode = "ber-mac"
    scenario: ScenarioSection = Field(default_factory=lambda: ScenarioSection(name="fig3a"))
    txs: TxSection = Field(default_factory=TxSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    decoder: DecoderSpec = Field(default_factory=DecoderSpec)
    output: OutputSection = Field(default_factory=OutputSection)
    optimal_m: OptimalMSection = Field(default_factory=OptimalMSection)
    complexity: ComplexitySection = Field(default_factory=ComplexitySection)


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge, values in overrides winning."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
