"""
Closed-form operation counts for the MAC decoders and the two-user broadcast
comparison against DCO-OFDM NOMA and OMA. All counts are exact integers.
"""

import csv
import io
from math import prod
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field
from tabulate import tabulate

from .errors import ConfigError, DomainError
from .mac_decoders import valid_split

CSV_HEADER = ["scheme", "ml_computations", "real_multiplications",
              "real_additions", "dc_bias_operations", "params"]


class ComplexityReport(BaseModel):
    """Operation counts of one scheme; OFDM-only fields stay None elsewhere."""

    scheme: str
    ml_computations: int = Field(ge=0)
    real_multiplications: Optional[int] = Field(default=None, ge=0)
    real_additions: Optional[int] = Field(default=None, ge=0)
    dc_bias_operations: Optional[int] = Field(default=None, ge=0)
    params: Dict[str, object] = Field(default_factory=dict)

    def row(self) -> List[object]:
        params = ";".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return [self.scheme, self.ml_computations,
                _blank(self.real_multiplications), _blank(self.real_additions),
                _blank(self.dc_bias_operations), params]


def _fmt(value: object) -> str:
    if isinstance(value, (list, tuple)):
        return "/".join(str(v) for v in value)
    return str(value)


def _blank(value: Optional[int]) -> object:
    return "-" if value is None else value


def _check_etas(etas: Sequence[int]) -> None:
    if not etas:
        raise ConfigError("at least one spectral efficiency is required")
    if any(eta < 1 for eta in etas):
        raise DomainError(f"spectral efficiencies must be >= 1, got {list(etas)}")


def mac_ml_count(scheme: str, etas: Sequence[int], m: Optional[int] = None) -> int:
    """
    ML computations per received sample.

    Args:
        scheme: "jml", "sic" or "hybrid"
        etas: Spectral efficiency per transmitter, Tx1 first
        m: Joint prefix size for "hybrid"; 0 counts as SIC

    Returns:
        Exact integer count
    """
    _check_etas(etas)
    sizes = [2 ** eta for eta in etas]
    if scheme == "jml":
        return prod(sizes)
    if scheme == "sic":
        return sum(sizes)
    if scheme == "hybrid":
        if not valid_split(m, len(etas)):
            raise ConfigError(f"M must be 0 or between 2 and L={len(etas)}, got {m}")
        if m == 0:
            return sum(sizes)
        return prod(sizes[:m]) + sum(sizes[m:])
    raise ConfigError(f"unknown decoding scheme {scheme!r}")


def oma_ml_count(etas: Sequence[int]) -> int:
    """TDMA frame: each of L slots runs ML over 2^(L eta_i) PAM levels."""
    _check_etas(etas)
    num_tx = len(etas)
    return sum(2 ** (num_tx * eta) for eta in etas)


def bc_noma_ml_count(etas: Sequence[int]) -> int:
    """Sum over users of the ML computations each user spends, SIC included."""
    _check_etas(etas)
    return sum(sum(2 ** eta for eta in etas[:alpha]) for alpha in range(1, len(etas) + 1))


def bc_oma_ml_count(etas: Sequence[int]) -> int:
    """Half the sum of 2^(2 eta_i) over the two users."""
    _check_etas(etas)
    total = sum(2 ** (2 * eta) for eta in etas)
    # eta >= 1 keeps every term even
    return total // 2


def fft_real_multiplications(n: int) -> int:
    _check_fft_size(n)
    log_n = n.bit_length() - 1
    return 5 * (n * log_n - 3 * n + 4)


def fft_real_additions(n: int) -> int:
    _check_fft_size(n)
    log_n = n.bit_length() - 1
    return 5 * (3 * n * log_n - 3 * n + 4)


def dc_bias_operations(n: int) -> int:
    _check_fft_size(n)
    return 3 * n


def _check_fft_size(n: int) -> None:
    if n < 2 or n & (n - 1):
        raise ConfigError(f"FFT size must be a power of two >= 2, got {n}")


def bc_complexity_table(eta1: int, eta2: int, n: int) -> List[ComplexityReport]:
    """
    Two-user broadcast comparison: proposed NOMA, DCO-OFDM NOMA and OMA.

    Args:
        eta1, eta2: Spectral efficiencies of users 1 and 2
        n: FFT size used by DCO-OFDM NOMA

    Returns:
        One report per scheme
    """
    etas = [eta1, eta2]
    _check_etas(etas)
    _check_fft_size(n)
    params = {"K": 2, "eta": etas}
    noma = bc_noma_ml_count(etas)
    return [
        ComplexityReport(scheme="proposed-noma", ml_computations=noma, params=params),
        ComplexityReport(
            scheme="dco-ofdm-noma",
            ml_computations=noma,
            real_multiplications=fft_real_multiplications(n),
            real_additions=fft_real_additions(n),
            dc_bias_operations=dc_bias_operations(n),
            params={**params, "N": n},
        ),
        ComplexityReport(scheme="oma", ml_computations=bc_oma_ml_count(etas), params=params),
    ]


def mac_complexity_table(etas: Sequence[int]) -> List[ComplexityReport]:
    """SIC, every valid hybrid split and JML for one MAC configuration."""
    _check_etas(etas)
    num_tx = len(etas)
    params = {"L": num_tx, "eta": list(etas)}
    reports = [ComplexityReport(scheme="sic", ml_computations=mac_ml_count("sic", etas), params=params)]
    for m in range(2, num_tx):
        reports.append(ComplexityReport(
            scheme=f"hybrid-m{m}",
            ml_computations=mac_ml_count("hybrid", etas, m),
            params={**params, "M": m},
        ))
    reports.append(ComplexityReport(scheme="jml", ml_computations=mac_ml_count("jml", etas), params=params))
    if num_tx >= 2:
        reports.append(ComplexityReport(scheme="oma", ml_computations=oma_ml_count(etas), params=params))
    return reports


class InequalityCheck(BaseModel):
    lhs: int
    rhs: int
    holds: bool


def jml_vs_oma_inequality(num_tx: int, etas: Sequence[int]) -> InequalityCheck:
    """
    Compare L * 2^(sum eta) (JML over one TDMA-equivalent frame) with the OMA
    count sum 2^(L eta_i).
    """
    if num_tx < 2:
        raise DomainError(f"the comparison needs L >= 2, got {num_tx}")
    if len(etas) != num_tx:
        raise ConfigError(f"L={num_tx} but {len(etas)} spectral efficiencies")
    _check_etas(etas)
    lhs = num_tx * 2 ** sum(etas)
    rhs = oma_ml_count(etas)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def render_reports(reports: Sequence[ComplexityReport]) -> str:
    """Aligned text table."""
    return tabulate([r.row() for r in reports], headers=CSV_HEADER, tablefmt="simple")


def reports_to_csv(reports: Sequence[ComplexityReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        writer.writerow(report.row())
    return buffer.getvalue()
