"""Acceptance suite: every shipped guarantee at its stated tolerance.

Each check prints one PASS/FAIL line so the suite doubles as a readable
verification report (run with ``pytest tests/test_acceptance.py -v -s``).

Two checks fail by design for the stock parameter set and are kept
faithful rather than loosened; the physics is documented inline and in
the README:

* equal-amplitude pulse solve: with the receiving control amplitude
  pinned to the sender's, both absorption areas have flat-pulse ceilings
  a few percent below pi, so no gaussian pulse can satisfy the area
  conditions at tolerance 1e-6;
* pointwise photon bookkeeping: an area-matched (rather than
  waveform-matched) control absorbs with a lag, so the bookkeeping
  residual peaks near 0.14 mid-transfer and retains the finite-energy
  emission deficit (about 1e-2) at late times.
"""

import json
import math

import numpy as np
import pytest

from pnsslink.channel import attenuation_length, transmission_efficiency
from pnsslink.cli import main
from pnsslink.config import default_config
from pnsslink.core import SuperpositionState, derive
from pnsslink.photonics import photon_observables
from pnsslink.pipeline import run_transfer, write_photonics_csv
from pnsslink.receiver import (
    PulseSolveError,
    gamma_analytic,
    initial_amplitudes,
    pulse_areas,
    simulate_receiver_ode,
    solve_pulse_shape,
)
from pnsslink.sender import (
    amplitudes_beta,
    initial_moments,
    populations_analytic,
    simulate_sender_ode,
)

from conftest import load_csv, random_states


def check(label: str, ok: bool, detail: str) -> None:
    print(f"[{label}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module")
def qubit_outcome():
    return run_transfer(default_config())


@pytest.fixture(scope="module")
def qutrit_outcome():
    return run_transfer(default_config(qutrit=True))


@pytest.fixture(scope="module")
def sender_ode_qubit(qubit_outcome):
    send = qubit_outcome.send
    return simulate_sender_ode(
        send.pulse1, send.derived.alpha1, send.config.initial_state, send.grid
    )


def test_01_population_conservation(qubit_outcome, sender_ode_qubit):
    traj = qubit_outcome.send.trajectory
    analytic_dev = float(np.max(np.abs(traj.sigma_m1 + traj.sigma_0 + traj.sigma_p1 - 1.0)))
    ode = sender_ode_qubit
    ode_dev = float(np.max(np.abs(ode.sigma_m1 + ode.sigma_0 + ode.sigma_p1 - 1.0)))
    check(
        "01 population conservation",
        analytic_dev <= 1e-10 and ode_dev <= 1e-6,
        f"closed-form dev {analytic_dev:.2e} (tol 1e-10), ode dev {ode_dev:.2e} (tol 1e-6)",
    )


def test_02_sender_oracle_equivalence(qubit_outcome, sender_ode_qubit):
    send = qubit_outcome.send
    theta = send.theta

    def closed_form_dev(ode_traj, state):
        ana = populations_analytic(theta, state)
        fields = ("sigma_m1", "sigma_0", "sigma_p1", "coh_m1_0", "coh_0_p1", "coh_m1_p1")
        return max(
            float(np.max(np.abs(getattr(ode_traj, f) - getattr(ana, f)))) for f in fields
        )

    worst = closed_form_dev(sender_ode_qubit, send.config.initial_state)

    states = random_states(20, seed=20240817)
    batch = np.stack([initial_moments(s) for s in states])
    traj = simulate_sender_ode(send.pulse1, send.derived.alpha1, batch, send.grid)
    for i, state in enumerate(states):
        ana = populations_analytic(theta, state)
        stacked = np.stack(
            [
                ana.sigma_m1.astype(complex),
                ana.sigma_0.astype(complex),
                ana.sigma_p1.astype(complex),
                ana.coh_m1_0,
                ana.coh_0_p1,
                ana.coh_m1_p1,
            ],
            axis=1,
        )
        worst = max(worst, float(np.max(np.abs(traj[:, i, :] - stacked))))
    check(
        "02 sender oracle equivalence",
        worst <= 1e-6,
        f"max |ode - closed form| {worst:.2e} over stock scenario + 20 random states (tol 1e-6)",
    )


def test_03_photon_distribution_endpoints(qubit_outcome, tmp_path):
    path = write_photonics_csv(qubit_outcome.send, tmp_path / "photonics.csv")
    rows = load_csv(path)
    theta_inf = qubit_outcome.send.theta.final
    e = math.exp(-theta_inf)
    p2_formula = 0.7 * (1.0 - (1.0 + theta_inf) * e)
    p1_formula = 0.3 * (1.0 - e) + 0.7 * theta_inf * e
    dev2 = abs(rows["P2"][-1] - p2_formula)
    dev1 = abs(rows["P1"][-1] - p1_formula)
    asym2 = abs(rows["P2"][-1] - 0.7)
    asym1 = abs(rows["P1"][-1] - 0.3)
    check(
        "03 photon distribution endpoints",
        dev2 <= 1e-8 and dev1 <= 1e-8 and asym2 <= 0.015 and asym1 <= 0.015,
        f"CSV vs formulas: dP2 {dev2:.2e}, dP1 {dev1:.2e} (tol 1e-8); "
        f"vs asymptotes: {asym2:.3f}/{asym1:.3f} (tol 0.015)",
    )


def test_04_photon_number_identity(qubit_outcome, qutrit_outcome):
    worst = 0.0
    for outcome in (qubit_outcome, qutrit_outcome):
        obs = outcome.send.observables
        worst = max(worst, float(np.max(np.abs(obs.n_out - obs.p1 - 2.0 * obs.p2))))
    check(
        "04 photon number identity",
        worst <= 1e-8,
        f"max |n_out - P1 - 2 P2| {worst:.2e} (tol 1e-8)",
    )


def test_05_antibunching(qubit_outcome):
    obs = qubit_outcome.send.observables
    peak = float(np.max(obs.g2))
    send = qubit_outcome.send
    single = SuperpositionState(0.0, 1.0)
    single_traj = amplitudes_beta(send.theta, single)
    single_obs = photon_observables(
        send.theta, send.pulse1, send.derived.alpha1, single, single_traj
    )
    all_zero = bool(np.all(single_obs.g2 == 0.0))
    check(
        "05 antibunching",
        peak <= 1.0 + 1e-9 and all_zero,
        f"max g2 {peak:.12f} (tol 1+1e-9); one-photon input g2 identically zero: {all_zero}",
    )


def test_06_receiver_unitarity_blocks(qubit_outcome):
    send = qubit_outcome.send
    params = send.params
    g2c = params.g * qubit_outcome.omega2 / abs(params.delta)
    obs = send.observables
    eta, zeta = pulse_areas(
        qubit_outcome.pulse2, obs.phi1, obs.phi2, g2c, params.k, send.grid
    )
    states = random_states(20, seed=777)
    worst_analytic = 0.0
    for state in states:
        traj = gamma_analytic(eta, zeta, state)
        two = np.abs(traj.g_0_0) ** 2 + np.abs(traj.g_1_1) ** 2 - abs(state.c_0) ** 2
        three = (
            np.abs(traj.g_1_2) ** 2
            + np.abs(traj.g_0_1) ** 2
            + np.abs(traj.g_m1_0) ** 2
            - abs(state.c_m1) ** 2
        )
        worst_analytic = max(worst_analytic, float(np.max(np.abs(two))), float(np.max(np.abs(three))))

    batch = np.stack([initial_amplitudes(s) for s in states])
    traj_ode = simulate_receiver_ode(
        qubit_outcome.pulse2, obs.phi1, obs.phi2, g2c, params.k, math.pi / 2, batch, send.grid
    )
    worst_ode = 0.0
    for i, state in enumerate(states):
        amp = traj_ode[:, i, :]
        two = np.abs(amp[:, 0]) ** 2 + np.abs(amp[:, 1]) ** 2 - abs(state.c_0) ** 2
        three = (
            np.abs(amp[:, 2]) ** 2
            + np.abs(amp[:, 3]) ** 2
            + np.abs(amp[:, 4]) ** 2
            - abs(state.c_m1) ** 2
        )
        worst_ode = max(worst_ode, float(np.max(np.abs(two))), float(np.max(np.abs(three))))
    check(
        "06 receiver unitarity blocks",
        worst_analytic <= 1e-9 and worst_ode <= 1e-9,
        f"block-norm dev: closed form {worst_analytic:.2e}, ode {worst_ode:.2e} "
        "(tol 1e-9, 20 random states)",
    )


def test_07_receiver_oracle_equivalence(qubit_outcome):
    send = qubit_outcome.send
    params = send.params
    g2c = params.g * qubit_outcome.omega2 / abs(params.delta)
    obs = send.observables
    state = send.config.initial_state
    ode = simulate_receiver_ode(
        qubit_outcome.pulse2, obs.phi1, obs.phi2, g2c, params.k, math.pi / 2, state, send.grid
    )
    eta, zeta = pulse_areas(
        qubit_outcome.pulse2, obs.phi1, obs.phi2, g2c, params.k, send.grid
    )
    ana = gamma_analytic(eta, zeta, state)
    worst = max(
        float(np.max(np.abs(getattr(ode, f) - getattr(ana, f))))
        for f in ("g_0_0", "g_1_1", "g_m1_0", "g_0_1", "g_1_2")
    )
    check(
        "07 receiver oracle equivalence",
        worst <= 1e-6,
        f"max |ode - closed form| {worst:.2e} (tol 1e-6)",
    )


def test_08_pulse_solve_with_equal_amplitudes(qubit_outcome):
    # Faithful statement of the shipped guarantee: a gaussian receiving
    # control with the sender's own peak amplitude, free duration and
    # free center, must meet both pi-area conditions at 1e-6 with the
    # duration landing in [0.7, 1.3] us.  For these parameters the
    # flat-pulse area ceilings (duration -> infinity, the most favorable
    # envelope) already fall short of pi, so the condition set is
    # infeasible; the solver reports that rather than converging.
    send = qubit_outcome.send
    obs = send.observables
    pref = send.derived.G2 / math.sqrt(send.params.k)
    dt = send.grid.dt
    eta_ceiling = float(2.0 * pref * np.trapezoid(obs.phi1, dx=dt))
    zeta_ceiling = float(pref * np.trapezoid(obs.phi1 + obs.phi2, dx=dt))
    try:
        res = solve_pulse_shape(
            obs.phi1, obs.phi2, send.grid, send.params, mode="duration_center", tol=1e-6
        )
        ok = (
            abs(res.eta_residual) <= 1e-6
            and abs(res.zeta_residual) <= 1e-6
            and 0.7e-6 <= res.pulse.duration <= 1.3e-6
        )
        detail = (
            f"residuals ({res.eta_residual:.2e}, {res.zeta_residual:.2e}), "
            f"T2 {res.pulse.duration * 1e6:.3f} us"
        )
    except PulseSolveError as exc:
        ok = False
        detail = (
            f"no solution: flat-pulse ceilings eta {eta_ceiling:.4f}, "
            f"zeta {zeta_ceiling:.4f} are below pi {math.pi:.4f} "
            f"({exc})"
        )
    check("08 equal-amplitude pulse solve", ok, detail)


def test_09a_end_to_end_fidelity(qubit_outcome, qutrit_outcome):
    f_qubit = qubit_outcome.final.fidelity
    f_qutrit = qutrit_outcome.final.fidelity
    check(
        "09a end-to-end fidelity",
        f_qubit >= 0.999 and f_qutrit >= 0.999,
        f"qubit {f_qubit:.6f}, qutrit {f_qutrit:.6f} (tol 0.999)",
    )


def test_09b_conservation_law_residual(qubit_outcome):
    # Faithful statement: the photon bookkeeping residual stays below
    # 1e-3 at every grid point.  The area-matched gaussian control
    # absorbs later than the photons arrive, so the residual peaks near
    # 0.14 mid-transfer; at late times it settles at the finite-energy
    # emission deficit (the closed-form receiver holds the full input
    # weight while only n_out(inf) photons were ever emitted).
    worst = float(np.max(np.abs(qubit_outcome.residual)))
    terminal = float(qubit_outcome.residual[-1])
    check(
        "09b conservation-law residual",
        worst <= 1e-3,
        f"max |residual| {worst:.3e} (tol 1e-3), terminal {terminal:.3e}",
    )


def test_10_channel_budget(qubit_outcome):
    l_att = attenuation_length(2.0)
    eta1 = transmission_efficiency(0.06, l_att, 1)
    eta2 = transmission_efficiency(0.06, l_att, 2)
    weighted = qubit_outcome.report.weighted_success
    ok = (
        abs(l_att - 2.171) <= 1e-3
        and eta2 == eta1 * eta1
        and abs(weighted - 0.954) <= 1e-3
    )
    check(
        "10 channel budget",
        ok,
        f"L_att {l_att:.4f} km, eta2 == eta1^2 exactly: {eta2 == eta1 * eta1}, "
        f"60 m weighted success {weighted:.4f} (target 0.954 +- 0.001)",
    )


def test_11_signal_to_noise(qubit_outcome):
    r_sn = qubit_outcome.report.r_sn
    check("11 signal-to-noise ratio", abs(r_sn - 32.7) <= 0.1, f"r_sn {r_sn:.4f} (32.7 +- 0.1)")


def test_12_determinism(tmp_path):
    config_path = tmp_path / "scenario.json"
    from pnsslink.config import default_config_dict

    config_path.write_text(json.dumps(default_config_dict(), indent=1), encoding="utf-8")
    assert main(["transfer", "--config", str(config_path), "--out", str(tmp_path / "a")]) == 0
    assert main(["transfer", "--config", str(config_path), "--out", str(tmp_path / "b")]) == 0
    names = ("sender.csv", "photonics.csv", "receiver.csv", "report.json")
    identical = all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names
    )
    check("12 determinism", identical, "consecutive runs byte-identical: " + str(identical))
