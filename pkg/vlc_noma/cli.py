"""
Batch command-line front-end.

    vlc-noma run <mode> [--config run.json] [flags]

Modes: constellation, ber-mac, ber-bc, optimal-m, complexity. Flags override
the config file; the effective configuration is written next to the outputs.
"""

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from colorama import Fore, Style, just_fix_windows_console
from pydantic import ValidationError as PydanticValidationError

from . import __version__
from .broadcast import BcConfig
from .channel import Scenario, get_scenario, scenario_gains
from .complexity import bc_complexity_table, mac_complexity_table, reports_to_csv, render_reports
from .config import config
from .constellation import generate_constellations, normalize, profiles_from, render_table, validate
from .errors import ConfigError, ValidationError, VlcNomaError
from .logger import get_logger, setup_logging
from .models import RunConfig, deep_merge, parse_list
from .simulate import (
    BerResult,
    OptimalMQuery,
    SweepConfig,
    build_mac_system,
    find_optimal_m,
    oma_baseline_ber,
    run_ber_bc,
    run_ber_mac,
)

logger = get_logger(__name__)

MODES = ["constellation", "ber-mac", "ber-bc", "optimal-m", "complexity"]
OPTIMAL_M_HEADER = ["v", "target", "target_ber", "m_hat", "computations", "feasible"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlc-noma", description="Non-OFDM NOMA VLC simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run one simulation mode")
    run.add_argument("mode", choices=MODES)
    run.add_argument("--config", type=str, help="JSON run configuration file")
    run.add_argument("--scenario", type=str, help="Built-in scenario name")
    run.add_argument("--eta", type=str, help="Spectral efficiencies, Tx1 first, e.g. 2,2")
    run.add_argument("--gains", type=str, help="Explicit ascending channel gains; skips the channel model")
    run.add_argument("--budget", type=float, help="Peak optical power budget")
    run.add_argument("--strict", action="store_const", const=True, help="Gain-aware level generation")
    run.add_argument("--strict-validation", action="store_const", const=True,
                     help="Reject constellations that break the SIC ordering")
    run.add_argument("--decoder", choices=["sic", "jml", "hybrid"])
    run.add_argument("--m", type=int, help="Joint prefix size of the hybrid decoder")
    run.add_argument("--snr", type=str, help="SNR grid in dB, start:step:stop or a,b,c")
    run.add_argument("--bits", type=float, help="Bits per entity per grid point")
    run.add_argument("--seed", type=int)
    run.add_argument("--mapping", choices=["natural", "gray"])
    run.add_argument("--oma", action="store_const", const=True, help="Append the PAM-TDMA baseline")
    run.add_argument("--nfft", type=int, help="FFT size for the DCO-OFDM comparison")
    run.add_argument("--v", type=str, help="BER target exponents for optimal-m, e.g. 2,3,6,8")
    run.add_argument("--gamma", type=float, help="SNR cap in dB for optimal-m")
    run.add_argument("--target", type=str, help="Target transmitters for optimal-m, e.g. 2,1")
    run.add_argument("--output", type=str, help="Output directory")
    run.add_argument("--threads", type=int, help="Worker threads (0 = auto)")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flag values as a partial config document; unset flags are skipped."""
    layout = {
        ("txs", "eta"): args.eta and parse_list(args.eta, int),
        ("txs", "gains"): args.gains and parse_list(args.gains, float),
        ("txs", "budget"): args.budget,
        ("txs", "strict"): args.strict,
        ("txs", "strict_validation"): args.strict_validation,
        ("decoder", "kind"): args.decoder,
        ("decoder", "m"): args.m,
        ("sweep", "snr_db"): args.snr,
        ("sweep", "bits"): args.bits,
        ("sweep", "seed"): args.seed,
        ("sweep", "mapping"): args.mapping,
        ("sweep", "oma"): args.oma,
        ("complexity", "nfft"): args.nfft,
        ("optimal_m", "v"): args.v and parse_list(args.v, int),
        ("optimal_m", "gamma_db"): args.gamma,
        ("optimal_m", "targets"): args.target and parse_list(args.target, int),
        ("output", "dir"): args.output,
    }
    document: Dict[str, Any] = {"mode": args.mode}
    for (section, key), value in layout.items():
        if value is not None:
            document.setdefault(section, {})[key] = value
    return document


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file with flag overrides and validate the result."""
    base: Dict[str, Any] = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {args.config}: {e}") from e
        if not isinstance(base, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")

    merged = deep_merge(base, _overrides(args))
    if args.scenario:
        merged["scenario"] = {"name": args.scenario}
    try:
        run_config = RunConfig.model_validate(merged)
    except (PydanticValidationError, ValueError) as e:
        raise ConfigError(f"invalid run configuration: {e}") from e
    return run_config


def resolve_gains(run_config: RunConfig, link: Optional[str]) -> List[float]:
    """Explicit gains, or the sorted gains of the configured scenario."""
    etas = run_config.txs.eta
    gains = run_config.txs.gains
    if gains is None:
        section = run_config.scenario
        if section.leds is not None and section.pds is not None:
            data = section.model_dump(exclude_none=True)
            data.setdefault("name", "custom")
            scenario = Scenario.from_dict(data)
        else:
            scenario = get_scenario(section.name, section.params)
        sorted_gains = scenario_gains(scenario, link)
        logger.info(f"scenario {scenario.name}: gains {sorted_gains.gains} "
                    f"(scenario order {sorted_gains.permutation})")
        gains = sorted_gains.gains
    if len(gains) != len(etas):
        raise ConfigError(f"{len(etas)} spectral efficiencies but {len(gains)} gains")
    return list(gains)


def _sweep(run_config: RunConfig) -> SweepConfig:
    section = run_config.sweep
    try:
        return SweepConfig(
            snr_db=section.grid(),
            uses_per_point=section.uses_for(run_config.txs.eta),
            seed=section.seed,
            decoder=run_config.decoder,
            mapping=section.mapping,
        )
    except PydanticValidationError as e:
        raise ConfigError(f"invalid sweep: {e}") from e


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(f"{Fore.GREEN}✓ wrote {path}{Style.RESET_ALL}")


def _print_points(result: BerResult) -> None:
    for p, snr in enumerate(result.snr_db):
        cells = "  ".join(f"{name} {result.ber(p, e):.3e}" for e, name in enumerate(result.entity_ids))
        print(f"{Fore.CYAN}SNR {snr:g} dB{Style.RESET_ALL}  {cells}")


def run_constellation(run_config: RunConfig, out_dir: Path) -> None:
    etas = run_config.txs.eta
    gains = resolve_gains(run_config, None)
    raw = generate_constellations(profiles_from(etas, gains), strict=run_config.txs.strict)
    report = validate(raw, gains)
    table = render_table(raw, normalize(raw, run_config.txs.budget))
    _write(out_dir / "constellation.txt", f"{table}\n\n{report.summary()}\n")
    print(table)
    if not report.zero_ber_ok or (run_config.txs.strict_validation and not report.ordering_ok):
        raise ValidationError(f"constellation rejected: {report.summary()}", report)


def run_mac(run_config: RunConfig, out_dir: Path, workers: Optional[int]) -> None:
    txs = run_config.txs
    gains = resolve_gains(run_config, "mac")
    system = build_mac_system(txs.eta, gains, txs.budget, txs.strict, txs.strict_validation)
    sweep = _sweep(run_config)
    result = run_ber_mac(system, sweep, workers=workers)
    if run_config.sweep.oma:
        result = result.merge(oma_baseline_ber(gains, txs.eta, sweep, "mac", txs.budget, workers))
    _print_points(result)
    _write(out_dir / "ber.csv", result.to_csv())


def run_bc(run_config: RunConfig, out_dir: Path, workers: Optional[int]) -> None:
    txs = run_config.txs
    gains = resolve_gains(run_config, "bc")
    validation = validate(generate_constellations(profiles_from(txs.eta, gains), strict=txs.strict), gains)
    if not validation.zero_ber_ok or (txs.strict_validation and not validation.ordering_ok):
        raise ValidationError(f"user levels rejected: {validation.summary()}", validation)
    # per-user noise is set from the SNR grid at each point
    bc = BcConfig.from_users(txs.eta, gains, [1.0] * len(gains), txs.budget, txs.strict)
    sweep = _sweep(run_config)
    result = run_ber_bc(bc, sweep, workers=workers)
    if run_config.sweep.oma:
        result = result.merge(oma_baseline_ber(gains, txs.eta, sweep, "bc", txs.budget, workers))
    _print_points(result)
    _write(out_dir / "ber.csv", result.to_csv())


def run_optimal_m(run_config: RunConfig, out_dir: Path, workers: Optional[int]) -> None:
    txs = run_config.txs
    section = run_config.optimal_m
    gains = resolve_gains(run_config, "mac")
    system = build_mac_system(txs.eta, gains, txs.budget, txs.strict, txs.strict_validation)
    sweep = _sweep(run_config)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(OPTIMAL_M_HEADER)
    for target in section.targets:
        for v in section.v:
            query = OptimalMQuery(v=v, gamma_db=section.gamma_db, target=target)
            result = find_optimal_m(system, query, sweep, workers=workers)
            writer.writerow(result.csv_row())
            color = Fore.GREEN if result.feasible else Fore.YELLOW
            verdict = f"M={result.m_hat} ({result.computations} computations)" if result.feasible else "infeasible"
            print(f"{color}Tx{target} BER <= 1e-{v} at {section.gamma_db:g} dB: {verdict}{Style.RESET_ALL}")
    _write(out_dir / "optimal_m.csv", buffer.getvalue())


def run_complexity(run_config: RunConfig, out_dir: Path) -> None:
    etas = run_config.txs.eta
    if len(etas) == 2:
        reports = bc_complexity_table(etas[0], etas[1], run_config.complexity.nfft)
    else:
        reports = mac_complexity_table(etas)
    print(render_reports(reports))
    _write(out_dir / "complexity.csv", reports_to_csv(reports))


def run(run_config: RunConfig, workers: Optional[int] = None) -> Path:
    """
    Execute one mode and write its outputs.

    Returns:
        The output directory
    """
    out_dir = Path(run_config.output.dir or config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "effective_config.json").write_text(run_config.model_dump_json(indent=2) + "\n")

    logger.set_run_context(mode=run_config.mode, seed=run_config.sweep.seed)
    try:
        mode = run_config.mode
        if mode == "constellation":
            run_constellation(run_config, out_dir)
        elif mode == "ber-mac":
            run_mac(run_config, out_dir, workers)
        elif mode == "ber-bc":
            run_bc(run_config, out_dir, workers)
        elif mode == "optimal-m":
            run_optimal_m(run_config, out_dir, workers)
        else:
            run_complexity(run_config, out_dir)
    finally:
        logger.clear_run_context()
    return out_dir


def main(argv: Optional[Sequence[str]] = None) -> int:
    just_fix_windows_console()
    args = build_parser().parse_args(argv)
    setup_logging()

    if args.threads is not None and args.threads < 0:
        print(f"{Fore.RED}Error: --threads must be >= 0{Style.RESET_ALL}", file=sys.stderr)
        return 2

    try:
        run(load_run_config(args), workers=args.threads)
    except VlcNomaError as e:
        print(f"{Fore.RED}Error: {e}{Style.RESET_ALL}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"unexpected failure: {e}", exc_info=True)
        print(f"{Fore.RED}Unexpected error: {e}{Style.RESET_ALL}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
