"""
Receivers for the multiple access channel: SIC, joint ML and the hybrid
M JML + (L - M) SIC decoder.

Transmitters are decoded in index order (Tx1 carries the strongest received
power). Every decision is an argmin of the absolute distance between the
received sample and a candidate; ties go to the lowest index (lexicographically
smallest index vector for joint decisions). Scalar entry points delegate to the
batch forms so both produce identical decisions.
"""

from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .config import config
from .constellation import Levels, level_arrays
from .errors import CapacityError, ConfigError

# 1-based index per transmitter, Tx1 first
DecodedIndices = Tuple[int, ...]

# distances this close to the row minimum, relative to the candidate scale, count as ties
TIE_RTOL = 1e-12


class DecoderSpec(BaseModel):
    """Decoder kind and, for the hybrid decoder, the joint prefix size M."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["sic", "jml", "hybrid"] = "sic"
    m: Optional[int] = None

    def check(self, num_tx: int) -> None:
        """Raise ConfigError unless M is 0 or lies in 2..L."""
        if self.kind != "hybrid":
            return
        if self.m is None:
            raise ConfigError("hybrid decoder needs M")
        check_split(self.m, num_tx)

    def label(self) -> str:
        return f"hybrid-m{self.m}" if self.kind == "hybrid" else self.kind


def valid_split(m: Optional[int], num_tx: int) -> bool:
    """M = 0 is SIC, M = L is joint ML, anything else must lie in 2..L-1."""
    return m is not None and (m in (0, num_tx) or 2 <= m < num_tx)


def check_split(m: int, num_tx: int) -> None:
    if valid_split(m, num_tx):
        return
    raise ConfigError(f"M must be 0 or between 2 and L={num_tx}, got {m}")


def _contributions(constellation: Levels, gains: Sequence[float]) -> List[np.ndarray]:
    levels = level_arrays(constellation)
    if len(levels) != len(gains):
        raise ConfigError(f"{len(levels)} transmitters but {len(gains)} gains")
    return [points * float(h) for points, h in zip(levels, gains)]


def joint_candidates(contributions: Sequence[np.ndarray]) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Enumerate every index combination in lexicographic order.

    Returns:
        (sums, shape): received sum per combination, Tx1 varying slowest, and
        the level count per transmitter for np.unravel_index
    """
    shape = tuple(len(c) for c in contributions)
    size = int(np.prod(shape, dtype=np.int64))
    if size > config.jml_limit:
        raise CapacityError(f"joint decoding over {size} combinations exceeds limit {config.jml_limit}")

    sums = np.zeros(1)
    for contrib in contributions:
        sums = (sums[:, None] + contrib[None, :]).ravel()
    return sums, shape


def _nearest(samples: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """
    Index of the nearest candidate per sample, first one on ties.

    Distances within TIE_RTOL of the row minimum are ties, so a midpoint that
    rounds a few ulps to one side still resolves to the lower index.
    """
    rows = max(1, config.block_elements // max(1, candidates.size))
    scale = float(np.abs(candidates).max()) if candidates.size else 0.0
    out = np.empty(samples.shape[0], dtype=np.int64)
    for start in range(0, samples.shape[0], rows):
        block = samples[start:start + rows]
        distance = np.abs(block[:, None] - candidates[None, :])
        floor = distance.min(axis=1, keepdims=True)
        tied = distance <= floor * (1.0 + TIE_RTOL) + TIE_RTOL * scale
        out[start:start + rows] = np.argmax(tied, axis=1)
    return out


def _sic_stage(residual: np.ndarray, contributions: Sequence[np.ndarray],
               start: int, decided: np.ndarray) -> None:
    for x in range(start, len(contributions)):
        q = _nearest(residual, contributions[x])
        decided[:, x] = q
        residual = residual - contributions[x][q]


def _joint_stage(samples: np.ndarray, contributions: Sequence[np.ndarray],
                 m: int, decided: np.ndarray) -> np.ndarray:
    sums, shape = joint_candidates(contributions[:m])
    best = _nearest(samples, sums)
    decided[:, :m] = np.stack(np.unravel_index(best, shape), axis=1)
    return samples - sums[best]


def hybrid_decode_batch(samples: np.ndarray, constellation: Levels,
                        gains: Sequence[float], m: int) -> np.ndarray:
    """
    Joint ML over transmitters 1..M (the rest treated as noise), then SIC for
    M+1..L on the residual.

    Args:
        samples: Received samples, shape (n,)
        constellation: Levels, Tx1 first
        gains: Channel gains aligned with the constellation
        m: 0 for pure SIC, L for pure joint ML, otherwise 2..L-1

    Returns:
        1-based decided indices, shape (n, L)
    """
    contributions = _contributions(constellation, gains)
    check_split(m, len(contributions))
    samples = np.asarray(samples, dtype=float).reshape(-1)
    decided = np.empty((samples.shape[0], len(contributions)), dtype=np.int64)

    residual = samples
    if m > 0:
        residual = _joint_stage(samples, contributions, m, decided)
    _sic_stage(residual, contributions, m, decided)
    return decided + 1


def sic_decode_batch(samples: np.ndarray, constellation: Levels, gains: Sequence[float]) -> np.ndarray:
    return hybrid_decode_batch(samples, constellation, gains, 0)


def jml_decode_batch(samples: np.ndarray, constellation: Levels, gains: Sequence[float]) -> np.ndarray:
    return hybrid_decode_batch(samples, constellation, gains, len(gains))


def decode_batch(spec: DecoderSpec, samples: np.ndarray, constellation: Levels,
                 gains: Sequence[float]) -> np.ndarray:
    """Dispatch a batch of samples to the decoder named by spec."""
    spec.check(len(gains))
    if spec.kind == "sic":
        return sic_decode_batch(samples, constellation, gains)
    if spec.kind == "jml":
        return jml_decode_batch(samples, constellation, gains)
    return hybrid_decode_batch(samples, constellation, gains, spec.m)


def _single(decided: np.ndarray) -> DecodedIndices:
    return tuple(int(q) for q in decided[0])


def sic_decode(y: float, constellation: Levels, gains: Sequence[float]) -> DecodedIndices:
    """Successive interference cancellation on one received sample."""
    return _single(sic_decode_batch(np.array([y]), constellation, gains))


def jml_decode(y: float, constellation: Levels, gains: Sequence[float]) -> DecodedIndices:
    """Joint ML over the full product of all transmitters' levels."""
    return _single(jml_decode_batch(np.array([y]), constellation, gains))


def hybrid_decode(y: float, constellation: Levels, gains: Sequence[float], m: int) -> DecodedIndices:
    """M JML + (L - M) SIC on one received sample."""
    return _single(hybrid_decode_batch(np.array([y]), constellation, gains, m))


def decode(spec: DecoderSpec, y: float, constellation: Levels, gains: Sequence[float]) -> DecodedIndices:
    return _single(decode_batch(spec, np.array([y]), constellation, gains))
