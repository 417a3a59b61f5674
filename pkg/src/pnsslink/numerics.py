"""Grids, quadrature, fixed-step ODE integration, and root finding.

Everything here is deliberately fixed-step and deterministic: identical
inputs give bit-identical outputs, and grid density is the only accuracy
knob.  The dynamics this package integrates are smooth and bounded, so
classical order-4 stepping at the trajectory grid resolution is both
simpler and more reproducible than adaptive control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

UNIFORMITY_RTOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when an ODE right-hand side stops being finite."""


class BracketError(ValueError):
    """Raised when a root bracket does not contain a sign change."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid on [t_start, t_end] with n_points samples."""

    t_start: float
    t_end: float
    n_points: int
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {self.n_points}")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        values = np.linspace(self.t_start, self.t_end, self.n_points)
        object.__setattr__(self, "values", _readonly(values))

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)

    def refined(self) -> "TimeGrid":
        """Grid with an extra sample at every midpoint (for RK4 stages)."""
        return TimeGrid(self.t_start, self.t_end, 2 * self.n_points - 1)


@dataclass(frozen=True)
class SampledFunction:
    """Values of a scalar function on a :class:`TimeGrid`."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self) -> None:
        # Copy so freezing never flips a caller-owned buffer to read-only.
        samples = np.array(self.samples)
        if samples.shape != (self.grid.n_points,):
            raise ValueError(
                f"samples shape {samples.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )
        object.__setattr__(self, "samples", _readonly(samples))

    @property
    def final(self) -> float:
        return self.samples[-1]


def _check_uniform(grid: TimeGrid) -> None:
    diffs = np.diff(grid.values)
    dt = grid.dt
    # Consecutive differences of correctly rounded samples jitter by one
    # ulp of the sample magnitude, which can exceed the relative bound
    # when dt is many orders below |t|.
    ulp = np.finfo(float).eps * max(abs(grid.t_start), abs(grid.t_end))
    tol = max(UNIFORMITY_RTOL * abs(dt), 8.0 * ulp)
    if np.max(np.abs(diffs - dt)) > tol:
        raise ValueError("grid spacing is not uniform")


def cumulative_integral(f: SampledFunction) -> SampledFunction:
    """Cumulative trapezoidal integral of ``f`` from the grid start.

    The first sample is exactly 0 and the last approximates the integral
    over the whole grid.
    """
    _check_uniform(f.grid)
    if np.iscomplexobj(f.samples):
        raise ValueError("cumulative_integral expects real-valued samples")
    y = f.samples
    out = np.zeros_like(y, dtype=float)
    np.cumsum(0.5 * (y[1:] + y[:-1]), out=out[1:])
    out[1:] *= f.grid.dt
    return SampledFunction(f.grid, out)


def trapezoid(samples: np.ndarray, dt: float) -> float:
    """Plain trapezoidal quadrature over uniformly spaced samples."""
    return float(dt * (np.sum(samples) - 0.5 * (samples[0] + samples[-1])))


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    init: np.ndarray,
    grid: TimeGrid,
) -> np.ndarray:
    """Classical fixed-step order-4 integration on the grid.

    ``rhs(t, y)`` may return any array broadcastable to ``y``; the state
    can be a single vector or a batch (extra leading axes).  Returns the
    trajectory with shape ``(grid.n_points,) + init.shape``.

    Raises
    ------
    IntegrationError
        If the state stops being finite, with the offending step index
        and time in the message.
    """
    y = np.array(init, dtype=complex)
    t = grid.values
    h = grid.dt
    traj = np.empty((grid.n_points,) + y.shape, dtype=complex)
    traj[0] = y
    for i in range(grid.n_points - 1):
        t0 = t[i]
        k1 = rhs(t0, y)
        k2 = rhs(t0 + 0.5 * h, y + (0.5 * h) * k1)
        k3 = rhs(t0 + 0.5 * h, y + (0.5 * h) * k2)
        k4 = rhs(t0 + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y.view(float))):
            raise IntegrationError(
                f"non-finite state after step {i + 1} (t = {t[i + 1]:.6e} s)"
            )
        traj[i + 1] = y
    return traj


def find_root(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Bisection/secant hybrid root finder on a sign-changing bracket.

    Stops when ``|f(x)| <= tol`` or the bracket width drops below
    ``tol * max(|x|, 1)``.  The returned root always lies inside the
    initial bracket.

    Raises
    ------
    BracketError
        If ``f`` has the same sign at both bracket ends.
    """
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(
            f"no sign change on bracket [{a:g}, {b:g}]: f(a)={fa:g}, f(b)={fb:g}"
        )
    # Width criterion is relative to the root scale; a valid sign-changing
    # bracket has at most one endpoint at zero.
    xtol = tol * max(abs(a), abs(b))
    for _ in range(max_iter):
        # Secant proposal, demoted to bisection whenever it leaves the
        # bracket or the bracket is no longer shrinking fast.
        if fb != fa:
            x = b - fb * (b - a) / (fb - fa)
        else:
            x = 0.5 * (a + b)
        lo, hi = (a, b) if a < b else (b, a)
        if not (lo < x < hi):
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) <= tol:
            return x
        if fa * fx <= 0.0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        if abs(b - a) <= xtol:
            return x
        # Guard against secant stagnation on one side.
        if abs(b - a) > 0.5 * abs(hi - lo):
            m = 0.5 * (a + b)
            fm = f(m)
            if abs(fm) <= tol:
                return m
            if fa * fm <= 0.0:
                b, fb = m, fm
            else:
                a, fa = m, fm
    return 0.5 * (a + b)
