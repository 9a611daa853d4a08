"""Independent references: a whole-line pseudospectral solver and manufactured
solutions.

The whole-line solver integrates u_t + u_xxx + (u^2)_x = 0 on a large periodic
domain with an integrating-factor RK4 (the dispersive phase is exact, only the
nonlinear flux is stepped) and 2/3-rule dealiasing.  Restricting such a run to
a window [x*, x*+L] manufactures inflow data for the half-line solver whose
answer can then be cross-checked against the restriction itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import make_interp_spline

from .discretization import Field, Grid1D
from .solver import BoundaryData

__all__ = [
    "PeriodicGrid",
    "WholelineTrajectory",
    "wholeline_solve",
    "extract_halfline_data",
    "ManufacturedSolution",
    "decaying_hump",
    "mms_forcing",
]

_SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class PeriodicGrid:
    """Periodic domain [x_left, x_left + P) sampled at m points (m a power of 2)."""

    P: float
    m: int
    x_left: float = 0.0

    def __post_init__(self):
        if not (self.P > 0.0):
            raise ValueError(f"period must be positive, got {self.P}")
        if self.m < 16 or (self.m & (self.m - 1)) != 0:
            raise ValueError(f"m must be a power of two >= 16, got {self.m}")

    @property
    def dx(self) -> float:
        return self.P / self.m

    @property
    def nodes(self):
        return self.x_left + self.dx * np.arange(self.m)

    @property
    def wavenumbers(self):
        return 2.0 * np.pi * np.fft.fftfreq(self.m, d=self.dx)


@dataclass
class WholelineTrajectory:
    """Dense periodic history: states[k] is the solution at times[k]."""

    grid: PeriodicGrid
    times: np.ndarray
    states: np.ndarray


def wholeline_solve(u0_values, grid: PeriodicGrid, T: float,
                    dt: Optional[float] = None, cfl: float = 0.5) -> WholelineTrajectory:
    """March the periodic problem to time T, storing every step.

    dt defaults to cfl * dx / max|2 u0| (the nonlinear advection limit; the
    stiff dispersive part is integrated exactly).  Data must be effectively
    compactly supported: below 1e-10 within P/8 of both period ends.
    """
    u0 = np.asarray(u0_values, dtype=float)
    if u0.shape != (grid.m,):
        raise ValueError(f"u0 has shape {u0.shape}, grid has m={grid.m}")
    guard = int(np.ceil(grid.m / 8))
    edge = max(np.max(np.abs(u0[:guard])), np.max(np.abs(u0[-guard:])))
    if edge > _SUPPORT_TOL:
        raise ValueError(
            f"periodic support guard violated: |u0| reaches {edge:.2e} within "
            f"P/8 of a period end (limit {_SUPPORT_TOL:.0e})"
        )
    if dt is None:
        speed = max(2.0 * float(np.max(np.abs(u0))), 1e-8)
        dt = cfl * grid.dx / speed
    nsteps = max(1, int(np.ceil(T / dt - 1e-12)))
    dt = T / nsteps

    k = grid.wavenumbers
    L = 1j * k**3
    kmax = np.max(np.abs(k))
    mask = np.abs(k) <= (2.0 / 3.0) * kmax
    E = np.exp(0.5 * dt * L)
    E2 = E * E

    def nonlin(uhat):
        u = np.fft.ifft(np.where(mask, uhat, 0.0)).real
        qhat = np.fft.fft(u * u)
        return -1j * k * np.where(mask, qhat, 0.0)

    states = np.empty((nsteps + 1, grid.m))
    states[0] = u0
    times = dt * np.arange(nsteps + 1)
    uhat = np.fft.fft(u0)
    for step in range(1, nsteps + 1):
        Nv = nonlin(uhat)
        a = E * (uhat + (0.5 * dt) * Nv)
        Na = nonlin(a)
        b = E * uhat + (0.5 * dt) * Na
        Nb = nonlin(b)
        c = E2 * uhat + dt * (E * Nb)
        Nc = nonlin(c)
        uhat = E2 * uhat + (dt / 6.0) * (E2 * Nv + 2.0 * E * (Na + Nb) + Nc)
        u = np.fft.ifft(uhat).real
        if not np.all(np.isfinite(u)):
            raise RuntimeError(f"whole-line solve went non-finite at t={times[step]:.6g}")
        states[step] = u
    return WholelineTrajectory(grid=grid, times=times, states=states)


def spectral_restriction(traj: WholelineTrajectory, step: int, x):
    """Evaluate the stored periodic state at arbitrary points by its series."""
    g = traj.grid
    uhat = np.fft.fft(traj.states[step])
    phase = np.exp(1j * np.outer(np.asarray(x, dtype=float) - g.x_left, g.wavenumbers))
    return (phase @ uhat).real / g.m


def extract_halfline_data(traj: WholelineTrajectory, x_star: float,
                          grid: Grid1D) -> tuple[Field, BoundaryData]:
    """Restrict a whole-line run to [x*, x*+L]: initial data plus inflow trace.

    f(t) samples the solution at x*; fprime comes from the equation itself,
    f'(t) = -(u_xxx + 2 u u_x)(x*, t), evaluated spectrally, so no time
    differencing enters.  Both are interpolated in t by cubic splines.
    """
    g = traj.grid
    if not (g.x_left <= x_star and x_star + grid.L <= g.x_left + g.P):
        raise ValueError(
            f"window [{x_star}, {x_star + grid.L}] is not contained in the "
            f"period [{g.x_left}, {g.x_left + g.P}]"
        )
    k = g.wavenumbers
    F = np.fft.fft(traj.states, axis=1)

    pts = x_star + grid.nodes - g.x_left
    phase0 = np.exp(1j * np.outer(k, pts))
    u0_vals = (F[0] @ phase0).real / g.m

    e0 = np.exp(1j * k * (x_star - g.x_left))
    fvals = (F @ e0).real / g.m
    d1 = (F @ ((1j * k) * e0)).real / g.m
    d3 = (F @ ((1j * k) ** 3 * e0)).real / g.m
    fpvals = -(d3 + 2.0 * fvals * d1)

    # quintic interpolation keeps the f / f' pair mutually consistent to
    # well below the boundary-validation tolerance
    fs = make_interp_spline(traj.times, fvals, k=5)
    fps = make_interp_spline(traj.times, fpvals, k=5)
    bd = BoundaryData(f=lambda t: float(fs(t)), fprime=lambda t: float(fps(t)))
    return Field(grid, u0_vals, 0.0), bd


@dataclass
class ManufacturedSolution:
    """Closed-form u_e with the derivatives the forcing construction needs.

    Cross-differencing at construction guards the hand-derived callables: u_x
    and u_xxx against centered differences of u, u_t against a time difference.
    """

    u: Callable[[np.ndarray, float], np.ndarray]
    u_x: Callable[[np.ndarray, float], np.ndarray]
    u_xxx: Callable[[np.ndarray, float], np.ndarray]
    u_t: Callable[[np.ndarray, float], np.ndarray]

    def __post_init__(self):
        xs = np.linspace(0.7, 9.3, 7)
        for t in (0.13, 0.77):
            hx = 1e-3
            du = (self.u(xs + hx, t) - self.u(xs - hx, t)) / (2 * hx)
            d3 = (
                -0.5 * self.u(xs - 2 * hx, t) + self.u(xs - hx, t)
                - self.u(xs + hx, t) + 0.5 * self.u(xs + 2 * hx, t)
            ) / hx**3
            ht = 1e-5
            dt_ = (self.u(xs, t + ht) - self.u(xs, t - ht)) / (2 * ht)
            scale = max(1.0, float(np.max(np.abs(du))), float(np.max(np.abs(d3))))
            if np.max(np.abs(du - self.u_x(xs, t))) > 1e-3 * scale:
                raise ValueError("manufactured u_x disagrees with differencing of u")
            if np.max(np.abs(d3 - self.u_xxx(xs, t))) > 1e-2 * scale:
                raise ValueError("manufactured u_xxx disagrees with differencing of u")
            if np.max(np.abs(dt_ - self.u_t(xs, t))) > 1e-3 * scale:
                raise ValueError("manufactured u_t disagrees with differencing of u")

    def forcing(self, x, t: float):
        """Residual forcing F = u_t + u_xxx + 2 u u_x that freezes u_e in."""
        return self.u_t(x, t) + self.u_xxx(x, t) + 2.0 * self.u(x, t) * self.u_x(x, t)

    def boundary(self) -> BoundaryData:
        return BoundaryData(
            f=lambda t: float(self.u(np.array(0.0), t)),
            fprime=lambda t: float(self.u_t(np.array(0.0), t)),
        )

    def initial(self, grid: Grid1D) -> Field:
        return Field(grid, self.u(grid.nodes, 0.0), 0.0)


def decaying_hump(amplitude: float = 1.0, center: float = 8.0,
                  width: float = 2.0) -> ManufacturedSolution:
    """u_e = a e^{-t} sech^2((x-c)/w): smooth, localized, all derivatives closed."""

    def parts(x):
        z = (np.asarray(x, dtype=float) - center) / width
        s2 = 1.0 / np.cosh(z) ** 2
        tz = np.tanh(z)
        return s2, tz

    def u(x, t):
        s2, _ = parts(x)
        return amplitude * np.exp(-t) * s2

    def u_x(x, t):
        s2, tz = parts(x)
        return amplitude * np.exp(-t) * (-2.0 * s2 * tz) / width

    def u_xxx(x, t):
        s2, tz = parts(x)
        return amplitude * np.exp(-t) * (-8.0 * s2 * tz**3 + 16.0 * s2**2 * tz) / width**3

    def u_t(x, t):
        s2, _ = parts(x)
        return -amplitude * np.exp(-t) * s2

    return ManufacturedSolution(u=u, u_x=u_x, u_xxx=u_xxx, u_t=u_t)


def mms_forcing(ms: ManufacturedSolution):
    """Forcing callable with the (x, t) signature the solver expects."""
    return ms.forcing
