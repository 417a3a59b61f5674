"""Output-field observables: photon statistics, fluxes, temporal modes.

The emitted field is carried in two distinct temporal modes: the first
photon occupies Phi1 and, when the input has weight on the m=-1
sublevel, a second photon follows in Phi2.  Both mode functions are
real and non-negative (they inherit the control-field phase, taken to
be zero), with units of s**-1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SuperpositionState
from .numerics import SampledFunction, TimeGrid, trapezoid
from .sender import PulseShape, SenderTrajectory


@dataclass(frozen=True)
class PhotonObservables:
    """Photon-number probabilities, fluxes and mode data on a grid."""

    grid: TimeGrid
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    flux_total: np.ndarray
    flux_one: np.ndarray
    flux_two: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    n_out: np.ndarray
    g2: np.ndarray
    g2_defined: np.ndarray
    overlap: float


def photon_distribution(traj: SenderTrajectory) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P_j(t): probability that j photons have been emitted, j = 0, 1, 2."""
    if not traj.has_beta:
        raise ValueError("trajectory has no emission amplitudes")
    p0 = (
        np.abs(traj.beta_m1_0) ** 2
        + np.abs(traj.beta_0_0) ** 2
        + np.abs(traj.beta_p1_0) ** 2
    )
    p1 = np.abs(traj.beta_0_1) ** 2 + np.abs(traj.beta_p1_1) ** 2
    p2 = np.abs(traj.beta_p1_2) ** 2
    return p0, p1, p2


def fluxes_and_modes(
    theta: SampledFunction,
    pulse: PulseShape,
    alpha1: float,
    c: SuperpositionState,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Photon fluxes and the two temporal mode functions.

    Returns ``(flux_total, flux_one, flux_two, phi1, phi2)`` where
    |phi1|^2 = alpha1*f1*exp(-theta) and |phi2|^2 carries the extra
    factor theta, so the second photon always peaks later than the
    first.  The branch weights satisfy
    flux_total = (|c_m1|^2 + |c_0|^2)*phi1^2 + |c_m1|^2*phi2^2,
    which for a two-sublevel input is the plain mode-decomposition
    identity flux_total = phi1^2 + |c_m1|^2*phi2^2.
    """
    th = theta.samples
    f1 = np.asarray(pulse.evaluate(theta.grid.values), dtype=float)
    e_full = np.exp(-th)
    p_m1, p_0, _ = c.populations

    rate = alpha1 * f1
    phi1 = np.sqrt(rate * e_full)
    phi2 = np.sqrt(np.maximum(rate * th * e_full, 0.0))
    flux_one = (p_m1 + p_0) * phi1**2
    flux_two = p_m1 * phi2**2
    flux_total = rate * (p_m1 * (1.0 + th) + p_0) * e_full
    return flux_total, flux_one, flux_two, phi1, phi2


def mean_photon_number(theta: SampledFunction, c: SuperpositionState) -> np.ndarray:
    """Mean emitted photon number n_out(t), the time integral of the flux.

    n_out(t) = (|c_0|^2 + 2|c_m1|^2)(1 - e**-theta) - |c_m1|^2 theta e**-theta.
    The vacuum branch of a qutrit input emits nothing, so its weight is
    absent; for a two-sublevel input the prefactor is 1 + |c_m1|^2.
    Equals P1 + 2*P2 identically.
    """
    th = theta.samples
    e_full = np.exp(-th)
    p_m1, p_0, _ = c.populations
    return (p_0 + 2.0 * p_m1) * (1.0 - e_full) - p_m1 * th * e_full


def g2_zero_delay(
    phi1: np.ndarray,
    phi2: np.ndarray,
    c: SuperpositionState,
) -> tuple[np.ndarray, np.ndarray]:
    """Zero-delay second-order correlation of the emitted field.

    Evaluated in the two-mode photon-number basis:
    g2 = 4|c_m1|^2 phi1^2 phi2^2 / (phi1^2 + |c_m1|^2 phi2^2)^2.
    By the AM-GM inequality this never exceeds 1 (equality exactly where
    phi1^2 = |c_m1|^2 phi2^2), and it vanishes identically when there is
    no two-photon component.  Points where the flux is zero are returned
    as 0 and flagged False in the mask.
    """
    p_m1 = abs(c.c_m1) ** 2
    i1 = phi1**2
    i2 = phi2**2
    num = 4.0 * p_m1 * i1 * i2
    den = (i1 + p_m1 * i2) ** 2
    defined = den > 0.0
    g2 = np.zeros_like(den)
    np.divide(num, den, out=g2, where=defined)
    return g2, defined


def mode_overlap(phi1: np.ndarray, phi2: np.ndarray, grid: TimeGrid) -> float:
    """Normalized L2 overlap of the two temporal envelopes.

    The two photons are treated as independent emission events (distinct
    modes) throughout; this diagnostic quantifies how strongly their
    envelopes actually overlap in time.
    """
    dt = grid.dt
    n1 = trapezoid(phi1 * phi1, dt)
    n2 = trapezoid(phi2 * phi2, dt)
    if n1 <= 0.0 or n2 <= 0.0:
        raise ValueError("mode_overlap needs two nonzero modes")
    return trapezoid(phi1 * phi2, dt) / np.sqrt(n1 * n2)


def photon_observables(
    theta: SampledFunction,
    pulse: PulseShape,
    alpha1: float,
    c: SuperpositionState,
    traj: SenderTrajectory,
) -> PhotonObservables:
    """Assemble every output-field observable for one sender run."""
    p0, p1, p2 = photon_distribution(traj)
    flux_total, flux_one, flux_two, phi1, phi2 = fluxes_and_modes(theta, pulse, alpha1, c)
    n_out = mean_photon_number(theta, c)
    g2, g2_defined = g2_zero_delay(phi1, phi2, c)
    overlap = mode_overlap(phi1, phi2, theta.grid)
    return PhotonObservables(
        grid=theta.grid,
        p0=p0,
        p1=p1,
        p2=p2,
        flux_total=flux_total,
        flux_one=flux_one,
        flux_two=flux_two,
        phi1=phi1,
        phi2=phi2,
        n_out=n_out,
        g2=g2,
        g2_defined=g2_defined,
        overlap=overlap,
    )
