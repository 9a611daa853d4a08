"""Experiment drivers behind the CLI subcommands.

Each run_* function takes a parsed ExperimentConfig and returns
(report_dict, series_list); the CLI serializes those to report.json, the
canonical time-series CSVs and summary.txt.  Refinement studies halve h and dt
jointly per level; all stability/decay thresholds come from the config's
study.* keys and land in the report as pass/fail entries, never as inputs to
the computation itself.
"""

from __future__ import annotations

import numpy as np

from .config import ConfigError, ExperimentConfig, dump_config
from .datagen import (
    KinkSpec,
    boundary_pulse,
    gaussian_bump,
    kink_data,
    soliton_boundary,
    soliton_data,
    soliton_solution,
)
from .diagnostics import (
    DiagnosticsConfig,
    RunningDiagnostics,
    dissipation_audit,
    identity_residual,
    interpolation_check,
    stopping_time,
    trace_identity_residual,
    trace_integral,
)
from .discretization import Field, Grid1D, deriv_matrix, integrate
from .oracle import PeriodicGrid, decaying_hump, extract_halfline_data, wholeline_solve
from .solver import BoundaryData, SolverConfig, solve
from .weights import CutoffSpec, WeightSpec, chi

SCHEMA = "kdvhl-report-v1"

SERIES_COLUMNS = (
    "t", "J1", "J2", "K1_chiprime", "K1_window",
    "trace2_acc", "trace3_acc", "residual_l1", "residual_l2",
)


def weight_spec(cfg: ExperimentConfig) -> WeightSpec:
    return WeightSpec(cutoff=CutoffSpec(cfg.epsilon, cfg.b), v=cfg.v, x0=cfg.x0)


def refine(cfg: ExperimentConfig) -> ExperimentConfig:
    """One joint halving: h -> h/2 (n -> 2n-1) and dt -> dt/2."""
    import copy

    out = copy.copy(cfg)
    out.n = 2 * cfg.n - 1
    out.dt = 0.5 * cfg.dt
    return out


def scenario(cfg: ExperimentConfig):
    """(grid, u0 field, boundary data, forcing or None, exact or None)."""
    grid = Grid1D(cfg.L, cfg.n)
    forcing = None
    exact = None
    if cfg.data_kind == "zero":
        u0 = Field(grid, np.zeros(grid.n), 0.0)
    elif cfg.data_kind == "bump":
        u0 = Field(grid, gaussian_bump(cfg.data_amplitude, cfg.data_center,
                                       cfg.data_width)(grid.nodes), 0.0)
    elif cfg.data_kind == "kink":
        base = None
        if cfg.data_base_amplitude != 0.0:
            base = gaussian_bump(cfg.data_base_amplitude, cfg.data_base_center,
                                 cfg.data_base_width)
        spec = KinkSpec(
            m=cfg.data_m,
            x1=cfg.data_x1 if cfg.data_x1 is not None else 0.5 * cfg.x0,
            amplitude=cfg.data_amplitude,
            env_lo=cfg.data_env_lo if cfg.data_env_lo is not None else 0.25 * cfg.x0,
            env_hi=cfg.data_env_hi if cfg.data_env_hi is not None else 0.75 * cfg.x0,
            base=base,
        )
        u0 = kink_data(spec, grid)
    elif cfg.data_kind == "soliton":
        u0 = soliton_data(cfg.data_c, cfg.data_center, grid)
        exact = soliton_solution(cfg.data_c, cfg.data_center)
    elif cfg.data_kind == "mms":
        ms = decaying_hump(cfg.data_amplitude, cfg.data_center, cfg.data_width)
        u0 = ms.initial(grid)
        forcing = ms.forcing
        exact = ms.u
        if cfg.boundary_kind == "auto":
            return grid, u0, ms.boundary(), forcing, exact
    else:
        raise ConfigError(f"unhandled data kind {cfg.data_kind!r}")

    if cfg.boundary_kind == "auto":
        if cfg.data_kind == "soliton":
            bd = soliton_boundary(cfg.data_c, cfg.data_center)
        else:
            bd = boundary_pulse("zero")
    elif cfg.boundary_kind == "zero":
        bd = boundary_pulse("zero")
    elif cfg.boundary_kind == "gaussian-pulse":
        bd = boundary_pulse("gaussian-pulse", A=cfg.boundary_A, t_c=cfg.boundary_t_c,
                            w=cfg.boundary_w)
    else:
        bd = boundary_pulse("ramped-cosine", A=cfg.boundary_A, omega=cfg.boundary_omega,
                            ramp=cfg.boundary_ramp)
    return grid, u0, bd, forcing, exact


def solver_config(cfg: ExperimentConfig, forcing, snapshot_stride=None) -> SolverConfig:
    return SolverConfig(
        dt=cfg.dt,
        T=cfg.T,
        theta=cfg.theta,
        picard_max=cfg.picard_max,
        picard_tol=cfg.picard_tol,
        nonlinear=cfg.nonlinear,
        forcing=forcing,
        snapshot_stride=snapshot_stride if snapshot_stride is not None else cfg.snapshot_stride,
    )


def _series_table(fin: dict) -> np.ndarray:
    n = len(fin["times"])
    cols = [fin["times"], fin["J1"], fin["J2"], fin["K1_chiprime"], fin["K1_window"],
            fin["trace2_acc"], fin["trace3_acc"]]
    for lv in (1, 2):
        if lv in fin["identity"]:
            cols.append(fin["identity"][lv].residual)
        else:
            cols.append(np.full(n, np.nan))
    return np.column_stack(cols)


def _variation(a: float, b: float) -> float:
    m = max(abs(a), abs(b))
    return 0.0 if m == 0.0 else abs(a - b) / m


def _run_with_diagnostics(cfg: ExperimentConfig, snapshot_stride=None):
    grid, u0, bd, forcing, exact = scenario(cfg)
    ws = weight_spec(cfg)
    dcfg = DiagnosticsConfig(
        wspec=ws, l=cfg.l, identity_levels=tuple(cfg.identity_levels),
        R=cfg.R, delta=cfg.delta,
    )
    rd = RunningDiagnostics(grid, bd, dcfg, forcing=forcing)
    scfg = solver_config(cfg, forcing, snapshot_stride)
    traj = solve(u0, scfg, bd, observers=[rd])
    return traj, rd.finish(), ws, dcfg, exact


def _sup_before(times, vals, tstar) -> float:
    m = times <= tstar + 1e-12
    return float(np.max(vals[m])) if np.any(m) else 0.0


def run_simulate(cfg: ExperimentConfig):
    traj, fin, ws, dcfg, exact = _run_with_diagnostics(cfg)
    times = fin["times"]
    tstars = {j: stopping_time(cfg.T, ws, j) for j in range(1, cfg.l + 1)}
    ti2 = trace_integral(traj, 2, ws, j=cfg.trace_branch)
    ti3 = trace_integral(traj, 3, ws, j=cfg.trace_branch)
    _, _, rms = trace_identity_residual(traj)
    interp = [interpolation_check(s, ws) for s in traj.snapshots]
    ratios = [c.ratio for c in interp if np.isfinite(c.ratio)]
    report = {
        "schema": SCHEMA,
        "experiment": "simulate",
        "config": dump_config(cfg),
        "stopping_times": {str(j): tstars[j] for j in tstars},
        "functionals": {
            "sup_J1": _sup_before(times, fin["J1"], tstars.get(1, cfg.T)),
            "sup_J2": _sup_before(times, fin["J2"], tstars.get(2, cfg.T)),
            "K1_chiprime_final": float(fin["K1_chiprime"][-1]),
            "K1_window_final": float(fin["K1_window"][-1]),
            "kato": {str(j): {"value": v, "x": xx} for j, (v, xx) in fin["kato"].items()},
            "strichartz": fin["strichartz"],
            "maximal": fin["maximal"],
        },
        "traces": {
            "window_integral_d2": {"value": ti2.value, "t_start": ti2.t_start,
                                   "t_end": ti2.t_end, "empty": ti2.empty},
            "window_integral_d3": {"value": ti3.value, "t_start": ti3.t_start,
                                   "t_end": ti3.t_end, "empty": ti3.empty},
            "accumulated_d2": float(fin["trace2_acc"][-1]),
            "accumulated_d3": float(fin["trace3_acc"][-1]),
            "identity_rms": rms,
        },
        "interpolation": {
            "max_ratio": max(ratios) if ratios else 0.0,
            "n_samples": len(interp),
            "any_degenerate": bool(any(c.degenerate for c in interp)),
        },
        "identity": {},
        "flags": {"picard_max_update": float(np.max(traj.picard_updates))},
    }
    for lv, br in fin["identity"].items():
        delta = dcfg.young_delta()
        supcp = ws.sup_chi_prime
        report["identity"][str(lv)] = {
            "normalized_residual": br.normalized,
            "scale": br.scale,
            "young": {
                "delta": delta,
                "sup_chi_prime": supcp,
                "coefficient_check": 0.5 - delta * supcp**2,
            },
            "term_integrals": {
                name: float(np.trapezoid(np.abs(arr), br.times))
                for name, arr in br.terms.items()
            },
        }
    if cfg.boundary_kind == "zero" and cfg.data_kind != "mms":
        aud = dissipation_audit(traj)
        report["dissipation"] = {
            "e_initial": aud.e_initial, "e_final": aud.e_final,
            "dissipated": aud.dissipated, "predicted": aud.predicted,
            "discrepancy": aud.discrepancy, "relative": aud.relative,
        }
    if exact is not None:
        u_end = traj.final
        ref = exact(traj.grid.nodes, u_end.t)
        diff = u_end.values - ref
        report["exact_error"] = {
            "max": float(np.max(np.abs(diff))),
            "l2_rel": float(np.sqrt(integrate(diff**2, traj.grid))
                            / max(np.sqrt(integrate(ref**2, traj.grid)), 1e-300)),
        }
    return report, [("series", _series_table(fin))]


def run_converge(cfg: ExperimentConfig, levels=None):
    if cfg.data_kind not in ("mms", "soliton"):
        raise ConfigError("convergence study needs data.kind = mms or soliton")
    levels = levels if levels is not None else cfg.levels
    rows = []
    series = []
    c = cfg
    for lv in range(levels):
        grid, u0, bd, forcing, exact = scenario(c)
        nsteps = int(round(c.T / c.dt))
        scfg = solver_config(c, forcing, snapshot_stride=nsteps)
        traj = solve(u0, scfg, bd)
        u_end = traj.final
        ref = exact(grid.nodes, u_end.t)
        diff = u_end.values - ref
        err_max = float(np.max(np.abs(diff)))
        err_l2 = float(np.sqrt(integrate(diff**2, grid))
                       / max(np.sqrt(integrate(ref**2, grid)), 1e-300))
        rows.append({"level": lv, "n": c.n, "dt": c.dt,
                     "err_max": err_max, "err_l2_rel": err_l2})
        c = refine(c)
    orders_max = [float(np.log2(rows[i]["err_max"] / rows[i + 1]["err_max"]))
                  for i in range(len(rows) - 1)]
    orders_l2 = [float(np.log2(rows[i]["err_l2_rel"] / rows[i + 1]["err_l2_rel"]))
                 for i in range(len(rows) - 1)]
    report = {
        "schema": SCHEMA,
        "experiment": "converge",
        "config": dump_config(cfg),
        "levels": rows,
        "observed_order_max": orders_max,
        "observed_order_l2": orders_l2,
        "passes": {
            "order": bool(orders_max and orders_max[-1] >= cfg.order_tol),
            "order_l2": bool(orders_l2 and orders_l2[-1] >= cfg.order_tol),
        },
    }
    return report, series


def run_propagation(cfg: ExperimentConfig, levels=None):
    levels = levels if levels is not None else cfg.levels
    rows = []
    series = []
    c = cfg
    for lv in range(levels):
        nsteps = int(round(c.T / c.dt))
        stride = max(1, nsteps // 40)
        traj, fin, ws, dcfg, _ = _run_with_diagnostics(c, snapshot_stride=stride)
        times = fin["times"]
        t1 = stopping_time(c.T, ws, 1)
        t2 = stopping_time(c.T, ws, 2)
        u0 = traj.snapshots[0]
        rough = integrate((deriv_matrix(traj.grid, 2) @ u0.values) ** 2, traj.grid)
        interp = [interpolation_check(s, ws) for s in traj.snapshots]
        finite = [ic.ratio for ic in interp if np.isfinite(ic.ratio)]
        rows.append({
            "level": lv, "n": c.n, "dt": c.dt,
            "sup_J1": _sup_before(times, fin["J1"], t1),
            "sup_J2": _sup_before(times, fin["J2"], t2),
            "K1_chiprime": float(fin["K1_chiprime"][-1]),
            "K1_window": float(fin["K1_window"][-1]),
            "rough_global": float(rough),
            "interp_max_ratio": max(finite) if finite else 0.0,
            "T_star_1": t1, "T_star_2": t2,
        })
        series.append((f"series_level{lv}", _series_table(fin)))
        c = refine(c)
    growth = [rows[i + 1]["rough_global"] / rows[i]["rough_global"]
              for i in range(len(rows) - 1)]
    var_J2 = _variation(rows[-2]["sup_J2"], rows[-1]["sup_J2"]) if len(rows) > 1 else 0.0
    var_kcp = _variation(rows[-2]["K1_chiprime"], rows[-1]["K1_chiprime"]) if len(rows) > 1 else 0.0
    var_kwin = _variation(rows[-2]["K1_window"], rows[-1]["K1_window"]) if len(rows) > 1 else 0.0
    var_interp = (_variation(rows[-2]["interp_max_ratio"], rows[-1]["interp_max_ratio"])
                  if len(rows) > 1 else 0.0)
    report = {
        "schema": SCHEMA,
        "experiment": "propagation",
        "config": dump_config(cfg),
        "levels": rows,
        "rough_growth": growth,
        "variation": {"sup_J2": var_J2, "K1_chiprime": var_kcp,
                      "K1_window": var_kwin, "interp_max_ratio": var_interp},
        "passes": {
            "sup_J2_stable": bool(var_J2 <= cfg.stability_tol),
            "K1_chiprime_stable": bool(var_kcp <= cfg.stability_tol),
            "K1_window_stable": bool(var_kwin <= cfg.stability_tol),
            "rough_diverges": bool(growth and min(growth) >= cfg.rough_growth),
            "interp_stable": bool(var_interp <= cfg.interp_tol),
        },
    }
    return report, series


def run_traces(cfg: ExperimentConfig, levels=None):
    levels = levels if levels is not None else cfg.levels
    rows = []
    c = cfg
    for lv in range(levels):
        grid, u0, bd, forcing, _ = scenario(c)
        nsteps = int(round(c.T / c.dt))
        scfg = solver_config(c, forcing, snapshot_stride=nsteps)
        traj = solve(u0, scfg, bd)
        ws = weight_spec(c)
        ti = trace_integral(traj, 2, ws, j=c.trace_branch)
        _, _, rms = trace_identity_residual(traj)
        rows.append({
            "level": lv, "n": c.n, "dt": c.dt,
            "window_integral_d2": ti.value,
            "window": [ti.t_start, ti.t_end],
            "empty_window": ti.empty,
            "identity_rms": rms,
        })
        c = refine(c)
    rms_ratios = [rows[i]["identity_rms"] / max(rows[i + 1]["identity_rms"], 1e-300)
                  for i in range(len(rows) - 1)]
    var = (_variation(rows[-2]["window_integral_d2"], rows[-1]["window_integral_d2"])
           if len(rows) > 1 and not rows[-1]["empty_window"] else 0.0)
    report = {
        "schema": SCHEMA,
        "experiment": "traces",
        "config": dump_config(cfg),
        "levels": rows,
        "rms_decay": rms_ratios,
        "variation_window_integral": var,
        "passes": {
            "rms_decays": bool(rms_ratios and min(rms_ratios) >= cfg.residual_decay),
            "window_integral_stable": bool(var <= cfg.stability_tol),
        },
    }
    return report, []


def run_identity(cfg: ExperimentConfig, levels=None):
    if not cfg.identity_levels:
        raise ConfigError("identity study needs diagnostics.identity_levels (e.g. 1,2)")
    levels = levels if levels is not None else cfg.levels
    rows = []
    series = []
    c = cfg
    for lv in range(levels):
        traj, fin, ws, dcfg, _ = _run_with_diagnostics(c)
        entry = {"level": lv, "n": c.n, "dt": c.dt}
        for ilv, br in fin["identity"].items():
            entry[f"normalized_l{ilv}"] = br.normalized
            entry[f"scale_l{ilv}"] = br.scale
        rows.append(entry)
        series.append((f"series_level{lv}", _series_table(fin)))
        c = refine(c)
    decay = {}
    for ilv in cfg.identity_levels:
        key = f"normalized_l{ilv}"
        decay[str(ilv)] = [rows[i][key] / max(rows[i + 1][key], 1e-300)
                           for i in range(len(rows) - 1)]
    report = {
        "schema": SCHEMA,
        "experiment": "identity",
        "config": dump_config(cfg),
        "levels": rows,
        "residual_decay": decay,
        "passes": {
            str(ilv): bool(decay[str(ilv)] and min(decay[str(ilv)]) >= cfg.residual_decay)
            for ilv in cfg.identity_levels
        },
    }
    return report, series


def run_oracle_compare(cfg: ExperimentConfig):
    per = PeriodicGrid(cfg.oracle_P, cfg.oracle_m, cfg.oracle_x_left)
    if cfg.oracle_kind == "soliton":
        u0w = soliton_solution(cfg.oracle_c, cfg.oracle_center)(per.nodes, 0.0)
    elif cfg.oracle_kind == "bump":
        u0w = gaussian_bump(cfg.oracle_amplitude, cfg.oracle_center,
                            cfg.oracle_width)(per.nodes)
    else:
        raise ConfigError(f"key 'oracle.kind': unknown kind {cfg.oracle_kind!r}")
    wtraj = wholeline_solve(u0w, per, cfg.T, cfl=cfg.oracle_cfl)

    grid = Grid1D(cfg.L, cfg.n)
    u0, bd = extract_halfline_data(wtraj, cfg.oracle_x_star, grid)
    scfg = solver_config(cfg, None, snapshot_stride=1)
    traj = solve(u0, scfg, bd)

    k = per.wavenumbers
    pts = cfg.oracle_x_star + grid.nodes - per.x_left
    phase = np.exp(1j * np.outer(k, pts))

    sample_ts = np.linspace(0.0, cfg.T, cfg.oracle_samples)
    norms = []
    rows = []
    for ts in sample_ts:
        kh = int(round(ts / cfg.dt))
        th = traj.times[kh]
        # cubic interpolation of the stored periodic history at th
        j = np.searchsorted(wtraj.times, th)
        j = min(max(j, 2), len(wtraj.times) - 2)
        idx = np.arange(j - 2, j + 2)
        tloc = wtraj.times[idx]
        lag = np.array([
            np.prod([(th - tloc[b]) / (tloc[a] - tloc[b]) for b in range(4) if b != a])
            for a in range(4)
        ])
        state = lag @ wtraj.states[idx]
        restr = (np.fft.fft(state) @ phase).real / per.m
        uh = traj.snapshots[kh].values
        dnorm = float(np.sqrt(integrate((uh - restr) ** 2, grid)))
        rnorm = float(np.sqrt(integrate(restr**2, grid)))
        norms.append(rnorm)
        rows.append({"t": float(th), "diff_l2": dnorm, "restriction_l2": rnorm})
    scale = max(norms)
    for r in rows:
        r["rel"] = r["diff_l2"] / scale if scale > 0 else 0.0
    max_rel = max(r["rel"] for r in rows)
    report = {
        "schema": SCHEMA,
        "experiment": "oracle-compare",
        "config": dump_config(cfg),
        "samples": rows,
        "normalization": scale,
        "max_rel_discrepancy": max_rel,
        "passes": {"equivalence": bool(max_rel <= cfg.oracle_tol)},
    }
    return report, []
