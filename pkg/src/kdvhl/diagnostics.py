"""Moving-window energy functionals, boundary-trace diagnostics and the
integrated-by-parts identities they satisfy.

The central objects are the derivative energies J_l(t) = int (d_x^l u)^2
chi(x + v t - x0) dx.  Multiplying the differentiated equation by
(d_x^l u) chi and integrating by parts yields, for l = 1,

    1/2 dJ_1/dt - v/2 int w^2 chi' + 3/2 int w_x^2 chi' - 1/2 int w^2 chi'''
        + int w^3 chi - int u w^2 chi'
    = u_xxx(0) w(0) chi0 - 1/2 w_x(0)^2 chi0 - w_x(0) w(0) chi0'
        + 1/2 w(0)^2 chi0'' + f w(0)^2 chi0 + int F_x w chi,

with w = u_x and chi0 = chi(v t - x0); for l = 2 the same structure holds with
q = u_xx, the nonlinear pair 5 int u_x q^2 chi - int u q^2 chi', and traces one
order higher.  Every term is recorded as a signed series; their sum is the
residual, which must vanish to discretization order.  The third boundary
derivative is taken from the equation itself, u_xxx(0) = F(0) - f' - 2 f u_x(0),
with the one-sided stencil kept as a cross-check only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .discretization import Field, Grid1D, deriv_matrix, fd_weights, integrate, trace_derivs
from .solver import BoundaryData, Trajectory
from .weights import CutoffSpec, WeightSpec, chi, moving_weight

__all__ = [
    "DiagnosticsConfig",
    "stopping_time",
    "propagation_functional",
    "smoothing_functional",
    "TraceIntegral",
    "trace_integral",
    "trace_identity_residual",
    "IdentityBreakdown",
    "identity_residual",
    "kato_functional",
    "strichartz_functional",
    "maximal_functional",
    "InterpolationCheck",
    "interpolation_check",
    "DissipationAudit",
    "dissipation_audit",
    "RunningDiagnostics",
]

# fixed summation order defining every identity residual (bit-for-bit contract)
_TERM_ORDER_L1 = (
    "time_derivative", "weight_transport", "smoothing", "weight_third",
    "nl_cubic", "nl_transport", "forcing",
    "trace_d3d1", "trace_d2sq", "trace_d2d1", "trace_d1sq", "trace_cubic",
)
_TERM_ORDER_L2 = (
    "time_derivative", "weight_transport", "smoothing", "weight_third",
    "nl_steepening", "nl_transport", "forcing",
    "trace_d4d2", "trace_d3sq", "trace_d3d2", "trace_d2sq", "trace_cubic",
)


@dataclass(frozen=True)
class DiagnosticsConfig:
    """What to accumulate during a run.

    identity_levels selects which integrated-by-parts identities to track
    (subset of {1, 2}); R is the hard-window width (defaults to b so the hard
    window contains the chi' support); delta is the Young-split parameter,
    report-only, defaulting to 0.05 / sup(chi')^2 which keeps the split's
    leading coefficient positive.
    """

    wspec: WeightSpec
    l: int = 2
    identity_levels: tuple = ()
    R: Optional[float] = None
    delta: Optional[float] = None
    kato_orders: tuple = (1, 2)

    def __post_init__(self):
        if self.l not in (1, 2, 3):
            raise ValueError(f"derivative level l must be 1, 2 or 3, got {self.l}")
        if not set(self.identity_levels) <= {1, 2}:
            raise ValueError("identity bookkeeping is available for levels 1 and 2 only")
        if self.R is not None and self.R <= self.wspec.cutoff.epsilon:
            raise ValueError(
                f"hard-window width R={self.R} must exceed epsilon="
                f"{self.wspec.cutoff.epsilon}"
            )
        for j in self.kato_orders:
            if j not in (0, 1, 2, 3):
                raise ValueError(f"kato order {j} outside direct-differencing range")

    @property
    def hard_window_R(self) -> float:
        return self.R if self.R is not None else self.wspec.cutoff.b

    def young_delta(self) -> float:
        if self.delta is not None:
            return self.delta
        return 0.05 / self.wspec.sup_chi_prime**2


def stopping_time(T: float, wspec: WeightSpec, j: int) -> float:
    """Time horizon on which the level-j window estimate is asserted.

    Level 1 survives to T; higher levels stop when the window's foot would
    cross the boundary, at (x0 + epsilon)/v.
    """
    if j <= 1 or wspec.v == 0.0:
        return T
    return min(T, (wspec.x0 + wspec.cutoff.epsilon) / wspec.v)


def _weighted_sq(grid: Grid1D, vals, w) -> float:
    return integrate(vals * vals * w, grid)


def propagation_functional(traj: Trajectory, j: int, wspec: WeightSpec):
    """J_j(t) = int (d_x^j u)^2 chi(x + v t - x0) dx over stored snapshots.

    The weight's support imposes the moving lower limit max(x0 + eps - v t, 0)
    automatically.  Returns (times, values).
    """
    if j > 3:
        raise ValueError("direct differencing supports j <= 3 only")
    D = deriv_matrix(traj.grid, j) if j > 0 else None
    x = traj.grid.nodes
    times = np.array([s.t for s in traj.snapshots])
    vals = np.empty_like(times)
    for i, snap in enumerate(traj.snapshots):
        g = snap.values if j == 0 else D @ snap.values
        w = moving_weight(wspec, x, snap.t, 0)
        vals[i] = _weighted_sq(traj.grid, g, w)
    return times, vals


def _hard_window_indices(grid: Grid1D, wspec: WeightSpec, R: float, t: float):
    lo = max(wspec.x0 + wspec.cutoff.epsilon - wspec.v * t, 0.0)
    hi = wspec.x0 + R - wspec.v * t
    i0 = int(np.ceil(lo / grid.h - 1e-12))
    i1 = int(np.floor(hi / grid.h + 1e-12))
    return i0, i1


def smoothing_functional(traj: Trajectory, j: int, wspec: WeightSpec,
                         mode: str = "chiprime", R: Optional[float] = None):
    """Accumulated gain K_j = iint (d_x^{j+1} u)^2 * (window) dx dt.

    mode "chiprime" weighs by chi'(x + v t - x0); mode "window" integrates over
    the sliding slab [max(x0+eps-v t, 0), x0+R-v t].  Returns (times, running).
    """
    if j + 1 > 3:
        raise ValueError("smoothing functional needs j+1 <= 3")
    if mode not in ("chiprime", "window"):
        raise ValueError(f"unknown smoothing mode {mode!r}")
    Rw = R if R is not None else wspec.cutoff.b
    if mode == "window" and Rw <= wspec.cutoff.epsilon:
        raise ValueError(f"hard window needs R > epsilon, got R={Rw}")
    D = deriv_matrix(traj.grid, j + 1)
    x = traj.grid.nodes
    times = np.array([s.t for s in traj.snapshots])
    inst = np.empty_like(times)
    for i, snap in enumerate(traj.snapshots):
        g = D @ snap.values
        if mode == "chiprime":
            w = moving_weight(wspec, x, snap.t, 1)
            inst[i] = _weighted_sq(traj.grid, g, w)
        else:
            i0, i1 = _hard_window_indices(traj.grid, wspec, Rw, snap.t)
            inst[i] = integrate(g * g, traj.grid, window=(i0, i1))
    running = np.concatenate([[0.0], np.cumsum(0.5 * (inst[1:] + inst[:-1]) * np.diff(times))])
    return times, running


@dataclass
class TraceIntegral:
    """Windowed boundary dissipation int_{t0}^{t1} (d_x^k u(0,t))^2 dt."""

    value: float
    k: int
    t_start: float
    t_end: float
    empty: bool


def _equation_d3(traces, bd: BoundaryData, forcing, times):
    """Third trace from the equation: u_xxx(0) = F(0,.) - f' - 2 f u_x(0,.)."""
    f = np.array([bd.f(t) for t in times])
    fp = np.array([bd.fprime(t) for t in times])
    F0 = np.zeros_like(f)
    if forcing is not None:
        x0 = np.array([0.0])
        F0 = np.array([float(np.asarray(forcing(x0, t)).ravel()[0]) for t in times])
    return F0 - fp - 2.0 * f * traces.d1


def trace_integral(traj: Trajectory, k: int, wspec: WeightSpec, j: int = 1,
                   window: Optional[tuple] = None) -> TraceIntegral:
    """Boundary-trace dissipation over the late-time gain window.

    Defaults to [(b + x0)/v, T*] with T* = stopping_time(T, wspec, j); an empty
    window (which the j >= 2 stopping branch forces whenever it binds) returns
    value 0 with the empty flag set.  k=3 uses the equation route for the trace.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"trace order must be 1, 2 or 3, got {k}")
    times = traj.traces.times
    T = times[-1]
    if window is None:
        t0 = np.inf if wspec.v == 0.0 else (wspec.cutoff.b + wspec.x0) / wspec.v
        t1 = stopping_time(T, wspec, j)
    else:
        t0, t1 = window
    if t0 >= t1:
        return TraceIntegral(value=0.0, k=k, t_start=t0, t_end=t1, empty=True)
    if k == 3:
        g = _equation_d3(traj.traces, traj.boundary, traj.config.forcing, times)
    else:
        g = traj.traces.order(k)
    m = (times >= t0 - 1e-12) & (times <= t1 + 1e-12)
    if np.count_nonzero(m) < 2:
        return TraceIntegral(value=0.0, k=k, t_start=t0, t_end=t1, empty=True)
    val = float(np.trapezoid(g[m] ** 2, times[m]))
    return TraceIntegral(value=val, k=k, t_start=t0, t_end=t1, empty=False)


def trace_identity_residual(traj: Trajectory):
    """r(t) = u_xxx(0,t)|_stencil + f' + 2 f u_x(0,t) - F(0,t) and its RMS.

    Measures how well the one-sided third-derivative probe satisfies the
    boundary identity the equation forces; shrinks at discretization order.
    """
    times = traj.traces.times
    d3_eq = _equation_d3(traj.traces, traj.boundary, traj.config.forcing, times)
    r = traj.traces.d3 - d3_eq
    rms = float(np.sqrt(np.mean(r * r)))
    return times, r, rms


@lru_cache(maxsize=64)
def _aux_cutoff(eps: float, b: float) -> CutoffSpec:
    return CutoffSpec(eps, b)


def _trace_d4(field: Field) -> float:
    """One-sided fourth-derivative probe (order 2); noisy, used only where the
    weight has already switched on at the boundary."""
    h = field.grid.h
    w = fd_weights(np.arange(6, dtype=float) * h, 0.0, 4)
    return float(w @ field.values[:6])


def _identity_terms(field: Field, level: int, wspec: WeightSpec,
                    bd: BoundaryData, forcing) -> dict:
    """All signed identity terms except the dJ/dt piece, plus J itself."""
    grid = field.grid
    x = grid.nodes
    t = field.t
    u = field.values
    D1 = deriv_matrix(grid, 1)
    w = D1 @ u
    q = deriv_matrix(grid, 2) @ u
    c0 = moving_weight(wspec, x, t, 0)
    c1 = moving_weight(wspec, x, t, 1)
    c3 = moving_weight(wspec, x, t, 3)
    v = wspec.v
    cut = wspec.cutoff
    a0 = v * t - wspec.x0  # weight argument at the boundary
    b0 = float(chi(cut, a0, 0))
    b1 = float(chi(cut, a0, 1))
    b2 = float(chi(cut, a0, 2))
    d0, d1t, d2t, d3t_raw = trace_derivs(field)
    f = float(bd.f(t))
    fp = float(bd.fprime(t))
    F0 = 0.0
    if forcing is not None:
        F0 = float(np.asarray(forcing(np.array([0.0]), t)).ravel()[0])
    d3t = F0 - fp - 2.0 * f * d1t  # equation route

    out = {}
    if level == 1:
        out["J"] = _weighted_sq(grid, w, c0)
        out["weight_transport"] = -0.5 * v * _weighted_sq(grid, w, c1)
        out["smoothing"] = 1.5 * _weighted_sq(grid, q, c1)
        out["weight_third"] = -0.5 * _weighted_sq(grid, w, c3)
        out["nl_cubic"] = integrate(w**3 * c0, grid)
        out["nl_transport"] = -integrate(u * w * w * c1, grid)
        if forcing is not None:
            Fx = D1 @ np.asarray(forcing(x, t), dtype=float)
            out["forcing"] = -integrate(Fx * w * c0, grid)
        else:
            out["forcing"] = 0.0
        out["trace_d3d1"] = -d3t * d1t * b0
        out["trace_d2sq"] = 0.5 * d2t * d2t * b0
        out["trace_d2d1"] = d2t * d1t * b1
        out["trace_d1sq"] = -0.5 * d1t * d1t * b2
        out["trace_cubic"] = -f * d1t * d1t * b0
    elif level == 2:
        qx = deriv_matrix(grid, 3) @ u
        out["J"] = _weighted_sq(grid, q, c0)
        out["weight_transport"] = -0.5 * v * _weighted_sq(grid, q, c1)
        out["smoothing"] = 1.5 * _weighted_sq(grid, qx, c1)
        out["weight_third"] = -0.5 * _weighted_sq(grid, q, c3)
        out["nl_steepening"] = 5.0 * integrate(w * q * q * c0, grid)
        out["nl_transport"] = -integrate(u * q * q * c1, grid)
        if forcing is not None:
            Fxx = deriv_matrix(grid, 2) @ np.asarray(forcing(x, t), dtype=float)
            out["forcing"] = -integrate(Fxx * q * c0, grid)
        else:
            out["forcing"] = 0.0
        d4t = _trace_d4(field) if b0 != 0.0 else 0.0
        out["trace_d4d2"] = -d4t * d2t * b0
        out["trace_d3sq"] = 0.5 * d3t * d3t * b0
        out["trace_d3d2"] = d3t * d2t * b1
        out["trace_d2sq"] = -0.5 * d2t * d2t * b2
        out["trace_cubic"] = -f * d2t * d2t * b0
    else:
        raise ValueError(f"identity bookkeeping exists for levels 1 and 2, got {level}")
    return out


@dataclass
class IdentityBreakdown:
    """Signed per-step identity terms; residual == ordered sum, by definition.

    normalized is int |residual| dt divided by the largest single term's
    int |term| dt, the refinement-study metric.
    """

    level: int
    times: np.ndarray
    J: np.ndarray
    terms: dict
    residual: np.ndarray
    normalized: float
    scale: float

    @staticmethod
    def assemble(level: int, times, J, terms: dict) -> "IdentityBreakdown":
        times = np.asarray(times, dtype=float)
        J = np.asarray(J, dtype=float)
        order = _TERM_ORDER_L1 if level == 1 else _TERM_ORDER_L2
        full = dict(terms)
        full["time_derivative"] = 0.5 * np.gradient(J, times)
        residual = np.zeros_like(times)
        for name in order:
            residual = residual + np.asarray(full[name], dtype=float)
        scale = max(
            float(np.trapezoid(np.abs(np.asarray(full[n], dtype=float)), times))
            for n in order
        )
        resid_int = float(np.trapezoid(np.abs(residual), times))
        normalized = resid_int / scale if scale > 0.0 else 0.0
        return IdentityBreakdown(
            level=level, times=times, J=J, terms=full,
            residual=residual, normalized=normalized, scale=scale,
        )


def identity_residual(traj: Trajectory, level: int, wspec: WeightSpec) -> IdentityBreakdown:
    """Evaluate the level-1 or level-2 identity on a snapshot-dense trajectory.

    Snapshots must be uniformly spaced in time (dJ/dt is centered-differenced
    on the snapshot times, one-sided at the endpoints).
    """
    times = np.array([s.t for s in traj.snapshots])
    if len(times) < 3:
        raise ValueError("identity residual needs at least 3 snapshots")
    gaps = np.diff(times)
    if np.max(np.abs(gaps - gaps[0])) > 1e-9 * max(1.0, gaps[0]):
        raise ValueError("identity residual needs uniformly spaced snapshots")
    series = {}
    J = np.empty_like(times)
    for i, snap in enumerate(traj.snapshots):
        vals = _identity_terms(snap, level, wspec, traj.boundary, traj.config.forcing)
        J[i] = vals.pop("J")
        for k2, v2 in vals.items():
            series.setdefault(k2, np.empty_like(times))[i] = v2
    return IdentityBreakdown.assemble(level, times, J, series)


def kato_functional(traj: Trajectory, j: int):
    """sup_x int_0^T (d_x^j u)^2 dt from snapshots; returns (value, x_argmax)."""
    if j > 3:
        raise ValueError("direct differencing supports j <= 3 only")
    D = deriv_matrix(traj.grid, j) if j > 0 else None
    times = np.array([s.t for s in traj.snapshots])
    acc = np.zeros(traj.grid.n)
    prev = None
    for i, snap in enumerate(traj.snapshots):
        g = snap.values if j == 0 else D @ snap.values
        g2 = g * g
        if prev is not None:
            acc += 0.5 * (g2 + prev) * (times[i] - times[i - 1])
        prev = g2
    imax = int(np.argmax(acc))
    return float(acc[imax]), float(traj.grid.nodes[imax])


def strichartz_functional(traj: Trajectory) -> float:
    """(int_0^T sup_x |u_x|^4 dt)^(1/4) from snapshots."""
    D = deriv_matrix(traj.grid, 1)
    times = np.array([s.t for s in traj.snapshots])
    sup4 = np.array([np.max(np.abs(D @ s.values)) ** 4 for s in traj.snapshots])
    return float(np.trapezoid(sup4, times) ** 0.25)


def maximal_functional(traj: Trajectory) -> float:
    """(int sup_t |u|^2 dx)^(1/2) from snapshots."""
    peak = np.zeros(traj.grid.n)
    for s in traj.snapshots:
        np.maximum(peak, np.abs(s.values), out=peak)
    return float(np.sqrt(integrate(peak * peak, traj.grid)))


@dataclass
class InterpolationCheck:
    """sup-bound check: ||(u_xx)^2 chi'||_inf against the three gain integrals."""

    lhs: float
    rhs_terms: tuple
    ratio: float
    degenerate: bool


def interpolation_check(field: Field, wspec: WeightSpec) -> InterpolationCheck:
    """Compare sup (u_xx)^2 chi' with the integrals that dominate it.

    rhs terms: int (u_xx)^2 chi', int (u_xxx)^2 chi', and int (u_xx)^2 chi'
    for the widened companion cutoff (eps/3, b+eps) whose derivative dominates
    |chi''|.  The ratio lhs/sum(rhs) should stay O(1) under refinement.
    """
    grid = field.grid
    cut = wspec.cutoff
    x = grid.nodes
    q = deriv_matrix(grid, 2) @ field.values
    qx = deriv_matrix(grid, 3) @ field.values
    c1 = moving_weight(wspec, x, field.t, 1)
    wide = _aux_cutoff(cut.epsilon / 3.0, cut.b + cut.epsilon)
    c1w = chi(wide, x + wspec.v * field.t - wspec.x0, 1)
    lhs = float(np.max(q * q * c1))
    rhs = (
        _weighted_sq(grid, q, c1),
        _weighted_sq(grid, qx, c1),
        _weighted_sq(grid, q, c1w),
    )
    s = sum(rhs)
    if s <= 0.0:
        return InterpolationCheck(lhs=lhs, rhs_terms=rhs, ratio=0.0 if lhs == 0.0 else np.inf,
                                  degenerate=True)
    return InterpolationCheck(lhs=lhs, rhs_terms=rhs, ratio=lhs / s, degenerate=False)


@dataclass
class DissipationAudit:
    """Unforced, f=0 energy law: E(T) - E(0) = -1/2 int u_x(0,t)^2 dt."""

    e_initial: float
    e_final: float
    dissipated: float
    predicted: float
    discrepancy: float
    relative: float


def dissipation_audit(traj: Trajectory) -> DissipationAudit:
    """Compare the measured L2-energy drop with the boundary drain integral."""
    g = traj.grid
    e0 = 0.5 * integrate(traj.snapshots[0].values ** 2, g)
    eT = 0.5 * integrate(traj.snapshots[-1].values ** 2, g)
    times = traj.traces.times
    drain = -0.5 * float(np.trapezoid(traj.traces.d1 ** 2, times))
    measured = eT - e0
    disc = abs(measured - drain)
    rel = disc / max(abs(measured), 1e-300)
    return DissipationAudit(
        e_initial=e0, e_final=eT, dissipated=measured, predicted=drain,
        discrepancy=disc, relative=rel,
    )


class RunningDiagnostics:
    """Observer that accumulates the full report during a solve.

    Records per step: J_1, J_2, both smoothing accumulations, the running
    boundary-trace integrals, the mass curve, identity terms for the
    configured levels, and per-node accumulators for the sup-type functionals.
    Attach to solve(..., observers=[rd]); call finish() afterwards.
    """

    def __init__(self, grid: Grid1D, bd: BoundaryData, cfg: DiagnosticsConfig,
                 forcing=None):
        self.grid = grid
        self.bd = bd
        self.cfg = cfg
        self.forcing = forcing
        self.t = []
        self.J1 = []
        self.J2 = []
        self.J3 = []
        self.mass = []
        self.k_cp = [0.0]
        self.k_win = [0.0]
        self.tr2 = [0.0]
        self.tr3 = [0.0]
        self.identity = {lv: {} for lv in cfg.identity_levels}
        self.identity_J = {lv: [] for lv in cfg.identity_levels}
        self._prev = None
        self._kato = {j: np.zeros(grid.n) for j in cfg.kato_orders}
        self._kato_prev = {}
        self._peak = np.zeros(grid.n)
        self._stri4 = []
        self._D = {k: deriv_matrix(grid, k) for k in (1, 2, 3)}

    def __call__(self, field: Field):
        cfg = self.cfg
        ws = cfg.wspec
        g = self.grid
        x = g.nodes
        t = field.t
        u = field.values
        w = self._D[1] @ u
        q = self._D[2] @ u
        c0 = moving_weight(ws, x, t, 0)
        c1 = moving_weight(ws, x, t, 1)
        self.t.append(t)
        self.J1.append(_weighted_sq(g, w, c0))
        self.J2.append(_weighted_sq(g, q, c0))
        if cfg.l >= 3:
            qx = self._D[3] @ u
            self.J3.append(_weighted_sq(g, qx, c0))
        self.mass.append(integrate(u * u, g))

        kcp = _weighted_sq(g, q, c1)
        i0, i1 = _hard_window_indices(g, ws, cfg.hard_window_R, t)
        kwin = integrate(q * q, g, window=(i0, i1))
        d0, d1t, d2t, d3t_raw = trace_derivs(field)
        f = float(self.bd.f(t))
        fp = float(self.bd.fprime(t))
        F0 = 0.0
        if self.forcing is not None:
            F0 = float(np.asarray(self.forcing(np.array([0.0]), t)).ravel()[0])
        d3t = F0 - fp - 2.0 * f * d1t
        tr2_inst = d2t * d2t
        tr3_inst = d3t * d3t

        if self._prev is not None:
            dt = t - self._prev["t"]
            self.k_cp.append(self.k_cp[-1] + 0.5 * dt * (kcp + self._prev["kcp"]))
            self.k_win.append(self.k_win[-1] + 0.5 * dt * (kwin + self._prev["kwin"]))
            self.tr2.append(self.tr2[-1] + 0.5 * dt * (tr2_inst + self._prev["tr2"]))
            self.tr3.append(self.tr3[-1] + 0.5 * dt * (tr3_inst + self._prev["tr3"]))
        self._prev = {"t": t, "kcp": kcp, "kwin": kwin, "tr2": tr2_inst, "tr3": tr3_inst}

        for lv in cfg.identity_levels:
            vals = _identity_terms(field, lv, ws, self.bd, self.forcing)
            self.identity_J[lv].append(vals.pop("J"))
            store = self.identity[lv]
            for k2, v2 in vals.items():
                store.setdefault(k2, []).append(v2)

        for j in cfg.kato_orders:
            gj = u if j == 0 else self._D[j] @ u
            g2 = gj * gj
            if j in self._kato_prev:
                dt = t - self._prev_t_kato
                self._kato[j] += 0.5 * dt * (g2 + self._kato_prev[j])
            self._kato_prev[j] = g2
        self._prev_t_kato = t

        np.maximum(self._peak, np.abs(u), out=self._peak)
        self._stri4.append(float(np.max(np.abs(w))) ** 4)

    def finish(self) -> dict:
        times = np.asarray(self.t)
        out = {
            "times": times,
            "J1": np.asarray(self.J1),
            "J2": np.asarray(self.J2),
            "mass": np.asarray(self.mass),
            "K1_chiprime": np.asarray(self.k_cp),
            "K1_window": np.asarray(self.k_win),
            "trace2_acc": np.asarray(self.tr2),
            "trace3_acc": np.asarray(self.tr3),
            "strichartz": float(np.trapezoid(np.asarray(self._stri4), times) ** 0.25),
            "maximal": float(np.sqrt(integrate(self._peak**2, self.grid))),
            "kato": {j: (float(np.max(self._kato[j])),
                         float(self.grid.nodes[int(np.argmax(self._kato[j]))]))
                     for j in self.cfg.kato_orders},
        }
        if self.cfg.l >= 3:
            out["J3"] = np.asarray(self.J3)
        out["identity"] = {}
        for lv in self.cfg.identity_levels:
            series = {k: np.asarray(v) for k, v in self.identity[lv].items()}
            out["identity"][lv] = IdentityBreakdown.assemble(
                lv, times, np.asarray(self.identity_J[lv]), series
            )
        return out
