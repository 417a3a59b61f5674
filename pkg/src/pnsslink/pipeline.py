"""Scenario execution: send, transfer and sweep runs plus their outputs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import channel as channel_mod
from .channel import ChannelModel, TransferReport, build_report
from .config import ConfigError, ScenarioConfig, parse_config
from .core import (
    DerivedQuantities,
    PhysicalParams,
    RegimeReport,
    derive,
    to_mhz,
    validate_regime,
)
from .csvio import write_csv
from .numerics import SampledFunction, TimeGrid
from .photonics import PhotonObservables, photon_observables
from .receiver import (
    FinalState,
    PulseSolveError,
    PulseSolveResult,
    ReceiverTrajectory,
    conservation_check,
    final_state,
    gamma_analytic,
    pulse_areas,
    simulate_receiver_ode,
    solve_pulse_shape,
)
from .sender import PulseShape, SenderTrajectory, amplitudes_beta, pump_exposure

US = 1e-6
PHASE_TOL = 1e-12


@dataclass(frozen=True)
class SendResult:
    config: ScenarioConfig
    params: PhysicalParams
    derived: DerivedQuantities
    regime: RegimeReport
    grid: TimeGrid
    pulse1: PulseShape
    theta: SampledFunction
    trajectory: SenderTrajectory
    observables: PhotonObservables


@dataclass(frozen=True)
class TransferResult:
    send: SendResult
    pulse2: PulseShape
    omega2: float
    solve: Optional[PulseSolveResult]
    receiver: ReceiverTrajectory
    residual: np.ndarray
    final: FinalState
    report: TransferReport


def build_grid(config: ScenarioConfig) -> TimeGrid:
    """Uniform grid spanning the sending pulse, in seconds.

    The span covers +-(span_in_T1/2) pulse durations around the pulse
    center; at the default 12 durations the gaussian tails are below
    1e-15, which stands in for the infinite integration limits.
    """
    t1 = config.pulse1.t1_us * US
    center = config.pulse1.center_us * US
    half = 0.5 * config.grid.span_in_t1 * t1
    return TimeGrid(center - half, center + half, config.grid.n_points())


def run_send(config: ScenarioConfig) -> SendResult:
    """Emit the photon state: regime checks, atomic dynamics, observables."""
    params = config.params
    derived = derive(params)
    t1 = config.pulse1.t1_us * US
    regime = validate_regime(params, derived, t1, min_ratio=config.regime_min_ratio)
    grid = build_grid(config)
    pulse1 = PulseShape(kind="gaussian", duration=t1, center=config.pulse1.center_us * US)
    theta = pump_exposure(pulse1, derived.alpha1, grid)
    trajectory = amplitudes_beta(theta, config.initial_state)
    observables = photon_observables(theta, pulse1, derived.alpha1, config.initial_state, trajectory)
    return SendResult(
        config=config,
        params=params,
        derived=derived,
        regime=regime,
        grid=grid,
        pulse1=pulse1,
        theta=theta,
        trajectory=trajectory,
        observables=observables,
    )


def _resolve_pulse2(
    config: ScenarioConfig, send: SendResult
) -> tuple[PulseShape, float, Optional[PulseSolveResult]]:
    p2 = config.pulse2
    obs = send.observables
    if p2.mode == "explicit":
        omega2 = (
            config.params.omega2
            if p2.omega2_mhz is None
            else 2.0 * math.pi * 1e6 * p2.omega2_mhz
        )
        center = (p2.center_us if p2.center_us is not None else 0.0) * US
        pulse = PulseShape(kind="gaussian", duration=p2.t2_us * US, center=center)
        return pulse, omega2, None

    mode = "duration_amplitude" if p2.free == "amplitude" else "duration_center"
    center_bracket = None
    if p2.center_range_us is not None:
        center_bracket = (p2.center_range_us[0] * US, p2.center_range_us[1] * US)
    try:
        solve = solve_pulse_shape(
            obs.phi1,
            obs.phi2,
            send.grid,
            config.params,
            mode=mode,
            center=(p2.center_us * US if p2.center_us is not None else None),
            tol=p2.tol,
            duration_bracket=(p2.t2_range_us[0] * US, p2.t2_range_us[1] * US),
            center_bracket=center_bracket,
            max_iterations=p2.max_iterations,
        )
    except PulseSolveError as exc:
        if exc.best is None:
            raise
        solve = exc.best
    return solve.pulse, solve.omega2, solve


def run_transfer(config: ScenarioConfig) -> TransferResult:
    """Full pipeline: send, shape the receiving control, absorb, budget."""
    send = run_send(config)
    pulse2, omega2, solve = _resolve_pulse2(config, send)
    params = send.params
    g2_coupling = params.g * omega2 / abs(params.delta)
    obs = send.observables
    c = config.initial_state

    on_analytic_branch = (
        abs(math.remainder(params.phi2 - math.pi / 2, 2.0 * math.pi)) <= PHASE_TOL
    )
    if on_analytic_branch:
        eta, zeta = pulse_areas(pulse2, obs.phi1, obs.phi2, g2_coupling, params.k, send.grid)
        receiver = gamma_analytic(eta, zeta, c, phi2=params.phi2)
    else:
        receiver = simulate_receiver_ode(
            pulse2, obs.phi1, obs.phi2, g2_coupling, params.k, params.phi2, c, send.grid
        )

    residual = conservation_check(receiver, obs.n_out, obs.flux_total, params.k)
    final = final_state(receiver, c)

    link = ChannelModel(
        length_km=config.channel.length_km,
        atten_db_per_km=config.channel.atten_db_per_km,
        phase_rate_rad_per_km=config.channel.phase_rate,
        p_emission=config.channel.p_em,
        p_absorption=config.channel.p_abs,
    )
    report = build_report(
        channel=link,
        populations=c.populations,
        fidelity=final.fidelity,
        r_sn=send.derived.r_sn,
        mode_overlap=obs.overlap,
        eta_residual=float(receiver.eta[-1] - math.pi),
        zeta_residual=float(receiver.zeta[-1] - math.pi),
        leakage=final.leakage,
        conservation_residual_max=float(np.max(np.abs(residual))),
        n_out_final=float(obs.n_out[-1]),
        solved_duration_s=pulse2.duration,
        solved_center_s=pulse2.center,
        solved_omega2=omega2,
        solver_iterations=(solve.iterations if solve else None),
        solver_mode=(solve.mode if solve else "explicit"),
        solver_converged=(solve.converged if solve else None),
    )
    return TransferResult(
        send=send,
        pulse2=pulse2,
        omega2=omega2,
        solve=solve,
        receiver=receiver,
        residual=residual,
        final=final,
        report=report,
    )


# ---------------------------------------------------------------------------
# output files


def write_sender_csv(send: SendResult, path: str | Path) -> Path:
    traj = send.trajectory
    t = send.grid.values
    kt = send.params.k * t
    cols = [
        ("t_s", t),
        ("kt", kt),
        ("theta", traj.theta),
        ("sigma_m1", traj.sigma_m1),
        ("sigma_0", traj.sigma_0),
        ("sigma_p1", traj.sigma_p1),
        ("re_coh_m1_0", traj.coh_m1_0.real),
        ("im_coh_m1_0", traj.coh_m1_0.imag),
        ("re_coh_0_p1", traj.coh_0_p1.real),
        ("im_coh_0_p1", traj.coh_0_p1.imag),
        ("re_coh_m1_p1", traj.coh_m1_p1.real),
        ("im_coh_m1_p1", traj.coh_m1_p1.imag),
        ("beta2_m1_0", np.abs(traj.beta_m1_0) ** 2),
        ("beta2_0_0", np.abs(traj.beta_0_0) ** 2),
        ("beta2_0_1", np.abs(traj.beta_0_1) ** 2),
        ("beta2_p1_0", np.abs(traj.beta_p1_0) ** 2),
        ("beta2_p1_1", np.abs(traj.beta_p1_1) ** 2),
        ("beta2_p1_2", np.abs(traj.beta_p1_2) ** 2),
    ]
    return write_csv(
        path, [c[0] for c in cols], [c[1] for c in cols], send.config.config_hash()
    )


def write_photonics_csv(send: SendResult, path: str | Path) -> Path:
    obs = send.observables
    kt = send.params.k * send.grid.values
    cols = [
        ("kt", kt),
        ("P0", obs.p0),
        ("P1", obs.p1),
        ("P2", obs.p2),
        ("flux_total", obs.flux_total),
        ("flux_I", obs.flux_one),
        ("flux_II", obs.flux_two),
        ("n_out", obs.n_out),
        ("g2", obs.g2),
    ]
    return write_csv(
        path, [c[0] for c in cols], [c[1] for c in cols], send.config.config_hash()
    )


def write_receiver_csv(result: TransferResult, path: str | Path) -> Path:
    rec = result.receiver
    kt = result.send.params.k * result.send.grid.values
    cols = [
        ("kt", kt),
        ("eta", rec.eta),
        ("zeta", rec.zeta),
        ("gamma2_0_0", np.abs(rec.g_0_0) ** 2),
        ("gamma2_1_1", np.abs(rec.g_1_1) ** 2),
        ("gamma2_m1_0", np.abs(rec.g_m1_0) ** 2),
        ("gamma2_0_1", np.abs(rec.g_0_1) ** 2),
        ("gamma2_1_2", np.abs(rec.g_1_2) ** 2),
        ("gamma2_1_0", np.abs(rec.g_1_0) ** 2),
        ("rho_m1", rec.rho_m1),
        ("rho_0", rec.rho_0),
        ("rho_p1", rec.rho_p1),
        ("residual", result.residual),
    ]
    return write_csv(
        path,
        [c[0] for c in cols],
        [c[1] for c in cols],
        result.send.config.config_hash(),
    )


def report_document(result: TransferResult) -> dict:
    doc = result.report.to_dict()
    doc["config_hash"] = result.send.config.config_hash()
    doc["regime"] = result.send.regime.to_dict()
    doc["solved_pulse"]["T2_us"] = result.pulse2.duration / US
    doc["solved_pulse"]["center_us"] = result.pulse2.center / US
    doc["solved_pulse"]["omega2_mhz"] = to_mhz(result.omega2)
    out = result.final.state
    doc["state_out"] = {
        "c_m1": [out.c_m1.real, out.c_m1.imag],
        "c_0": [out.c_0.real, out.c_0.imag],
        "c_p1": [out.c_p1.real, out.c_p1.imag],
    }
    doc["leakage_warning"] = result.final.leakage_warning
    return doc


def write_report_json(result: TransferResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(report_document(result), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path


def write_regime_json(send: SendResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = send.regime.to_dict()
    doc["config_hash"] = send.config.config_hash()
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# sweeps


def _set_in(doc: dict, path: str, value: float) -> None:
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"sweep axis {path!r}: no section {part!r}")
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"sweep axis {path!r}: no field {leaf!r}")
    if isinstance(node[leaf], bool) or not isinstance(node[leaf], (int, float)):
        raise ConfigError(f"sweep axis {path!r} is not a scalar field")
    node[leaf] = float(value)


def _config_with(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    doc = json.loads(json.dumps(config.raw))
    if axis == "initial_state.p_m1":
        # Virtual axis: two-photon weight, rebalanced against c_0.
        p_p1 = sum(x * x for x in doc["initial_state"].get("c_p1", [0.0, 0.0]))
        if value < 0.0 or value + p_p1 > 1.0 + 1e-12:
            raise ConfigError(f"initial_state.p_m1 = {value} leaves no weight for c_0")
        doc["initial_state"]["c_m1"] = [math.sqrt(value), 0.0]
        doc["initial_state"]["c_0"] = [math.sqrt(max(1.0 - value - p_p1, 0.0)), 0.0]
    else:
        _set_in(doc, axis, value)
    return parse_config(doc)


def _row_from_transfer(result: TransferResult, cfg: ScenarioConfig) -> dict:
    report = result.report
    obs = result.send.observables
    link_cfg = cfg.channel
    l_att = channel_mod.attenuation_length(link_cfg.atten_db_per_km)
    return {
        "eta1": channel_mod.transmission_efficiency(link_cfg.length_km, l_att, 1),
        "eta2": channel_mod.transmission_efficiency(link_cfg.length_km, l_att, 2),
        "weighted_success": report.weighted_success,
        "phase_rad": report.phase_drift_rad,
        "fidelity": report.fidelity,
        "n_out_inf": float(obs.n_out[-1]),
        "P1_inf": float(obs.p1[-1]),
        "P2_inf": float(obs.p2[-1]),
        "T2_us": result.pulse2.duration / US,
        "center2_us": result.pulse2.center / US,
        "omega2_mhz": to_mhz(result.omega2),
        "eta_residual": report.eta_residual,
        "zeta_residual": report.zeta_residual,
    }


def run_sweep(config: ScenarioConfig, axis: str, values: np.ndarray) -> list[dict]:
    """One transfer (or channel-only) evaluation per axis sample, in order."""
    rows = []
    channel_only = axis.startswith("channel.")
    base: Optional[TransferResult] = run_transfer(config) if channel_only else None
    for value in values:
        cfg = _config_with(config, axis, float(value))
        if channel_only:
            # The transfer itself is unchanged; rebuild only the link budget.
            link = ChannelModel(
                length_km=cfg.channel.length_km,
                atten_db_per_km=cfg.channel.atten_db_per_km,
                phase_rate_rad_per_km=cfg.channel.phase_rate,
                p_emission=cfg.channel.p_em,
                p_absorption=cfg.channel.p_abs,
            )
            report = build_report(
                channel=link,
                populations=cfg.initial_state.populations,
                fidelity=base.report.fidelity,
                r_sn=base.report.r_sn,
                mode_overlap=base.report.mode_overlap,
                eta_residual=base.report.eta_residual,
                zeta_residual=base.report.zeta_residual,
                leakage=base.report.leakage,
                conservation_residual_max=base.report.conservation_residual_max,
                n_out_final=base.report.n_out_final,
            )
            result = TransferResult(
                send=base.send,
                pulse2=base.pulse2,
                omega2=base.omega2,
                solve=base.solve,
                receiver=base.receiver,
                residual=base.residual,
                final=base.final,
                report=report,
            )
        else:
            result = run_transfer(cfg)
        row = {axis.split(".")[-1]: float(value)}
        row.update(_row_from_transfer(result, cfg))
        rows.append(row)
    return rows


def write_sweep_csv(
    rows: list[dict], config: ScenarioConfig, path: str | Path
) -> Path:
    if not rows:
        raise ValueError("empty sweep")
    columns = list(rows[0].keys())
    arrays = [np.array([row[c] for row in rows]) for c in columns]
    return write_csv(path, columns, arrays, config.config_hash())
