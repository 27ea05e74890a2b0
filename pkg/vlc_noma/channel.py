"""
Indoor line-of-sight Lambertian channel between LEDs and photodiodes.

LEDs face straight down and photodiodes straight up, so the emission angle
equals the incidence angle: phi = psi = arccos(H / d).
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError, DomainError
from .logger import get_logger

logger = get_logger(__name__)

Position = Tuple[float, float, float]


class OpticalParams(BaseModel):
    """LED and photodiode device constants."""

    model_config = ConfigDict(frozen=True)

    semi_angle_deg: float = Field(gt=0.0, lt=90.0, description="Half-power semi-angle (degrees)")
    detector_area: float = Field(gt=0.0, description="Detection area A_D (m^2)")
    responsivity: float = Field(gt=0.0, description="Responsivity R_p (A/W)")
    filter_gain: float = Field(gt=0.0, description="Optical filter gain T")
    refractive_index: float = Field(ge=1.0, description="Concentrator refractive index n")
    fov_deg: float = Field(gt=0.0, le=90.0, description="Receiver field of view (degrees)")

    @classmethod
    def table_ii(cls) -> "OpticalParams":
        """Published indoor simulation parameters."""
        return cls(
            semi_angle_deg=60.0,
            detector_area=1e-4,
            responsivity=0.4,
            filter_gain=1.0,
            refractive_index=1.5,
            fov_deg=60.0,
        )


class LinkGeometry(BaseModel):
    """One LED / photodiode pair."""

    model_config = ConfigDict(frozen=True)

    led_position: Position
    pd_position: Position

    @property
    def vertical_drop(self) -> float:
        return self.led_position[2] - self.pd_position[2]

    @property
    def radial_offset(self) -> float:
        return math.hypot(
            self.led_position[0] - self.pd_position[0],
            self.led_position[1] - self.pd_position[1],
        )

    @property
    def distance(self) -> float:
        return math.hypot(self.vertical_drop, self.radial_offset)

    @property
    def incidence_angle(self) -> float:
        """psi in radians; raises DomainError for coincident points."""
        d = self.distance
        if d <= 0.0:
            raise DomainError("LED and photodiode coincide (d = 0)")
        # clamp rounding noise before arccos
        return math.acos(max(-1.0, min(1.0, self.vertical_drop / d)))

    @property
    def emission_angle(self) -> float:
        return self.incidence_angle

    def in_field_of_view(self, params: OpticalParams) -> bool:
        return self.incidence_angle <= math.radians(params.fov_deg)


class Scenario(BaseModel):
    """Room with LED and photodiode placements sharing one device model."""

    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    room: Position = (4.0, 4.0, 3.0)
    leds: List[Position]
    pds: List[Position]
    params: OpticalParams = Field(default_factory=OpticalParams.table_ii)

    @field_validator("room")
    @classmethod
    def _positive_room(cls, room: Position) -> Position:
        if any(dim <= 0 for dim in room):
            raise ValueError("room dimensions must be positive")
        return room

    @model_validator(mode="after")
    def _inside_room(self) -> "Scenario":
        if not self.leds or not self.pds:
            raise ValueError("scenario needs at least one LED and one photodiode")
        for label, points in (("LED", self.leds), ("PD", self.pds)):
            for point in points:
                if any(c < 0 or c > bound for c, bound in zip(point, self.room)):
                    raise ValueError(f"{label} position {point} lies outside room {self.room}")
        return self

    @classmethod
    def from_dict(cls, data: Dict) -> "Scenario":
        """Build a scenario from config-file data, mapping errors to ConfigError."""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"invalid scenario: {e}") from e


class SortedGains(BaseModel):
    """Gains in ascending order with the permutation back to scenario indices."""

    model_config = ConfigDict(frozen=True)

    gains: List[float]
    # 1-based scenario index of each sorted entry
    permutation: List[int]
    link: str


def lambertian_order(semi_angle_deg: float) -> float:
    """Order of the Lambertian radiation pattern, -1 / log2(cos(semi-angle))."""
    if not 0.0 < semi_angle_deg < 90.0:
        raise DomainError(f"semi-angle must lie in (0, 90) degrees, got {semi_angle_deg}")
    return -1.0 / math.log2(math.cos(math.radians(semi_angle_deg)))


def concentrator_gain(params: OpticalParams, psi: float) -> float:
    """Non-imaging concentrator gain n^2 / sin^2(fov) inside the field of view."""
    if psi < 0:
        raise DomainError(f"incidence angle must be non-negative, got {psi}")
    fov = math.radians(params.fov_deg)
    if psi > fov:
        return 0.0
    return params.refractive_index ** 2 / math.sin(fov) ** 2


def channel_gain(geometry: LinkGeometry, params: OpticalParams) -> float:
    """
    Line-of-sight DC gain between an LED and a photodiode.

    Args:
        geometry: LED / PD placement
        params: Device constants

    Returns:
        h >= 0; exactly 0 outside the receiver field of view
    """
    d = geometry.distance
    if d <= 0.0:
        raise DomainError("LED and photodiode coincide (d = 0)")
    psi = geometry.incidence_angle
    if psi > math.radians(params.fov_deg):
        return 0.0

    zeta = lambertian_order(params.semi_angle_deg)
    cos_psi = math.cos(psi)
    return (
        (zeta + 1.0)
        * params.detector_area
        * params.responsivity
        * cos_psi ** zeta
        * params.filter_gain
        * concentrator_gain(params, psi)
        * cos_psi
        / (2.0 * math.pi * d ** 2)
    )


def coverage_radius(vertical_drop: float, params: OpticalParams) -> float:
    """Top-view radius r_e inside which a receiver sees the LED within its FOV."""
    if vertical_drop <= 0:
        raise DomainError("vertical drop must be positive")
    return vertical_drop * math.tan(math.radians(params.fov_deg))


def scenario_gains(scenario: Scenario, link: Optional[str] = None) -> SortedGains:
    """
    Channel gains of a scenario sorted ascending.

    Args:
        scenario: One PD with several LEDs (MAC) or one LED with several PDs (BC)
        link: Force "mac" or "bc"; inferred from the counts when omitted

    Returns:
        SortedGains whose permutation maps sorted rank to 1-based scenario index
    """
    if not scenario.leds or not scenario.pds:
        raise ConfigError("empty scenario")

    if link is None:
        link = "bc" if len(scenario.leds) == 1 and len(scenario.pds) > 1 else "mac"

    if link == "mac":
        if len(scenario.pds) != 1:
            raise ConfigError(f"MAC scenario needs exactly one photodiode, got {len(scenario.pds)}")
        pairs = [LinkGeometry(led_position=led, pd_position=scenario.pds[0]) for led in scenario.leds]
    elif link == "bc":
        if len(scenario.leds) != 1:
            raise ConfigError(f"BC scenario needs exactly one LED, got {len(scenario.leds)}")
        pairs = [LinkGeometry(led_position=scenario.leds[0], pd_position=pd) for pd in scenario.pds]
    else:
        raise ConfigError(f"unknown link type {link!r}")

    raw = np.array([channel_gain(g, scenario.params) for g in pairs])
    # stable sort keeps input order among equal gains
    order = np.argsort(raw, kind="stable")
    if np.any(raw == 0.0):
        logger.warning(f"scenario {scenario.name} has links outside the field of view")

    return SortedGains(
        gains=[float(raw[i]) for i in order],
        permutation=[int(i) + 1 for i in order],
        link=link,
    )


# Coordinates approximate the room figure: ceiling LEDs at z = 3 m and a desk
# height receiver plane at z = 1 m.
_BUILTIN: Dict[str, Dict] = {
    "fig3a": {
        "leds": [(1.0, 1.0, 3.0), (3.0, 3.0, 3.0)],
        "pds": [(2.5, 2.5, 1.0)],
    },
    "fig3b": {
        "leds": [(1.0, 1.0, 3.0), (3.0, 1.0, 3.0), (1.0, 3.0, 3.0), (3.0, 3.0, 3.0)],
        # on the diagonal, so the two side LEDs see equal gains
        "pds": [(2.1, 2.1, 1.0)],
    },
    "fig3c": {
        "leds": [(2.0, 2.0, 3.0)],
        "pds": [(3.2, 3.0, 1.0), (2.3, 2.2, 1.0)],
    },
    "fig3c-identical": {
        "leds": [(2.0, 2.0, 3.0)],
        "pds": [(3.2, 3.0, 1.0), (3.2, 3.0, 1.0)],
    },
}


def builtin_scenarios() -> List[str]:
    return sorted(_BUILTIN)


def get_scenario(name: str, params: Optional[OpticalParams] = None) -> Scenario:
    """Look up a built-in scenario by name."""
    try:
        spec = _BUILTIN[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; built-in: {', '.join(builtin_scenarios())}")
    return Scenario(
        name=name,
        leds=spec["leds"],
        pds=spec["pds"],
        params=params or OpticalParams.table_ii(),
    )
