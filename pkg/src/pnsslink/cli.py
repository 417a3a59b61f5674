"""Command-line scenario runner.

Subcommands: send, receive, transfer, sweep.  Exit codes: 0 ok,
1 config error, 2 solver non-convergence, 3 strict-mode regime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ScenarioConfig, load_config
from .pipeline import (
    run_send,
    run_sweep,
    run_transfer,
    write_photonics_csv,
    write_receiver_csv,
    write_regime_json,
    write_report_json,
    write_sender_csv,
    write_sweep_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_REGIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pnsslink",
        description=(
            "Simulate deterministic atom-to-atom state transfer over a "
            "cavity-photon link and emit figure-ready CSV files."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("send", "run the sending node and write sender/photonics CSVs"),
        ("receive", "run the full link and write the receiver CSV"),
        ("transfer", "run the full link and write all CSVs plus the report"),
        ("sweep", "evaluate a scenario across one scalar config axis"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the scenario JSON")
        cmd.add_argument("--out", default=None, help="output directory (overrides config)")
        cmd.add_argument(
            "--strict",
            action="store_true",
            help="abort when any regime check fails",
        )
        cmd.add_argument(
            "--tol",
            type=float,
            default=None,
            help="override the pulse-solve tolerance",
        )
        if name == "sweep":
            cmd.add_argument("--axis", required=True, help="dotted config path, e.g. channel.L0_km")
            cmd.add_argument("--start", type=float, required=True)
            cmd.add_argument("--stop", type=float, required=True)
            cmd.add_argument("--num", type=int, default=21)
    return parser


def _load(args) -> ScenarioConfig:
    config = load_config(args.config)
    if args.strict:
        config = dataclasses.replace(config, strict=True)
    if args.tol is not None:
        config = dataclasses.replace(
            config, pulse2=dataclasses.replace(config.pulse2, tol=args.tol)
        )
    return config


def _out_dir(args, config: ScenarioConfig) -> Path:
    return Path(args.out) if args.out else Path(config.outputs.directory)


def _print_regime(send_result, strict: bool) -> int:
    print("regime checks:")
    for line in send_result.regime.summary_lines():
        print(f"  {line}")
    if strict and not send_result.regime.passed:
        print("strict mode: aborting on regime failure", file=sys.stderr)
        return EXIT_REGIME
    return EXIT_OK


def _cmd_send(args) -> int:
    config = _load(args)
    result = run_send(config)
    code = _print_regime(result, config.strict)
    if code != EXIT_OK:
        return code
    out = _out_dir(args, config)
    wrote = [
        write_sender_csv(result, out / "sender.csv"),
        write_photonics_csv(result, out / "photonics.csv"),
    ]
    if "regime" in config.outputs.which:
        wrote.append(write_regime_json(result, out / "regime.json"))
    for path in wrote:
        print(f"wrote {path}")
    return EXIT_OK


def _run_full(args, config: ScenarioConfig):
    result = run_transfer(config)
    code = _print_regime(result.send, config.strict)
    return result, code


def _cmd_transfer(args) -> int:
    config = _load(args)
    result, code = _run_full(args, config)
    if code != EXIT_OK:
        return code
    out = _out_dir(args, config)
    which = config.outputs.which
    wrote = []
    if "sender" in which:
        wrote.append(write_sender_csv(result.send, out / "sender.csv"))
    if "photonics" in which:
        wrote.append(write_photonics_csv(result.send, out / "photonics.csv"))
    if "receiver" in which:
        wrote.append(write_receiver_csv(result, out / "receiver.csv"))
    if "report" in which:
        wrote.append(write_report_json(result, out / "report.json"))
    if "regime" in which:
        wrote.append(write_regime_json(result.send, out / "regime.json"))
    for path in wrote:
        print(f"wrote {path}")
    print(f"fidelity: {result.final.fidelity:.6f}")
    print(
        "area residuals: "
        f"eta {result.report.eta_residual:.3e}, zeta {result.report.zeta_residual:.3e}"
    )
    if result.solve is not None and not result.solve.converged:
        print("pulse solve did not converge; report carries best residuals", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _cmd_receive(args) -> int:
    config = _load(args)
    result, code = _run_full(args, config)
    if code != EXIT_OK:
        return code
    out = _out_dir(args, config)
    path = write_receiver_csv(result, out / "receiver.csv")
    print(f"wrote {path}")
    if result.solve is not None and not result.solve.converged:
        print("pulse solve did not converge", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load(args)
    values = np.linspace(args.start, args.stop, args.num)
    rows = run_sweep(config, args.axis, values)
    out = _out_dir(args, config)
    path = write_sweep_csv(rows, config, out / "sweep.csv")
    print(f"wrote {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "send": _cmd_send,
        "receive": _cmd_receive,
        "transfer": _cmd_transfer,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # solver and numeric failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
