"""Independent references: symbolic verification and the periodic solver."""

import numpy as np
import pytest
import sympy as sp

from kdvhl.datagen import gaussian_bump, soliton_solution
from kdvhl.discretization import Grid1D
from kdvhl.oracle import (
    ManufacturedSolution,
    PeriodicGrid,
    decaying_hump,
    extract_halfline_data,
    mms_forcing,
    spectral_restriction,
    wholeline_solve,
)


def test_soliton_satisfies_equation_symbolically():
    x, t = sp.symbols("x t", real=True)
    c = sp.Symbol("c", positive=True)
    xc = sp.Symbol("x_c", real=True)
    u = sp.Rational(3, 2) * c * sp.sech(sp.sqrt(c) / 2 * (x - c * t - xc)) ** 2
    residual = sp.diff(u, t) + sp.diff(u, x, 3) + sp.diff(u**2, x)
    assert sp.simplify(residual) == 0


def test_decaying_hump_derivatives_match_sympy():
    a, cen, w = 1.3, 8.0, 2.0
    x, t = sp.symbols("x t", real=True)
    u_sym = a * sp.exp(-t) * sp.sech((x - cen) / w) ** 2
    lam = {
        "u": sp.lambdify((x, t), u_sym, "numpy"),
        "u_x": sp.lambdify((x, t), sp.diff(u_sym, x), "numpy"),
        "u_xxx": sp.lambdify((x, t), sp.diff(u_sym, x, 3), "numpy"),
        "u_t": sp.lambdify((x, t), sp.diff(u_sym, t), "numpy"),
    }
    ms = decaying_hump(a, cen, w)
    xs = np.linspace(1.0, 15.0, 41)
    for tv in (0.0, 0.4, 1.7):
        assert np.max(np.abs(ms.u(xs, tv) - lam["u"](xs, tv))) <= 1e-12
        assert np.max(np.abs(ms.u_x(xs, tv) - lam["u_x"](xs, tv))) <= 1e-12
        assert np.max(np.abs(ms.u_xxx(xs, tv) - lam["u_xxx"](xs, tv))) <= 1e-11
        assert np.max(np.abs(ms.u_t(xs, tv) - lam["u_t"](xs, tv))) <= 1e-12


def test_forcing_is_equation_residual():
    a, cen, w = 1.0, 8.0, 2.0
    x, t = sp.symbols("x t", real=True)
    u_sym = a * sp.exp(-t) * sp.sech((x - cen) / w) ** 2
    F_sym = sp.diff(u_sym, t) + sp.diff(u_sym, x, 3) + sp.diff(u_sym**2, x)
    F_lam = sp.lambdify((x, t), F_sym, "numpy")
    ms = decaying_hump(a, cen, w)
    F = mms_forcing(ms)
    xs = np.linspace(2.0, 14.0, 31)
    for tv in (0.1, 0.9):
        assert np.max(np.abs(F(xs, tv) - F_lam(xs, tv))) <= 1e-11


def test_manufactured_cross_check_catches_bad_derivative():
    ms = decaying_hump()
    with pytest.raises(ValueError, match="u_x"):
        ManufacturedSolution(u=ms.u, u_x=lambda x, t: 2.0 * ms.u_x(x, t),
                             u_xxx=ms.u_xxx, u_t=ms.u_t)


def test_periodic_grid_validation():
    with pytest.raises(ValueError):
        PeriodicGrid(-1.0, 64)
    with pytest.raises(ValueError):
        PeriodicGrid(60.0, 100)  # not a power of two
    with pytest.raises(ValueError):
        PeriodicGrid(60.0, 8)
    g = PeriodicGrid(64.0, 128, x_left=-32.0)
    assert g.dx == pytest.approx(0.5)
    assert g.nodes[0] == -32.0


def test_support_guard_rejects_wide_data():
    g = PeriodicGrid(60.0, 128, x_left=-30.0)
    with pytest.raises(ValueError, match="support guard"):
        wholeline_solve(np.ones(g.m), g, T=1.0)


@pytest.fixture(scope="module")
def soliton_run():
    per = PeriodicGrid(96.0, 512, x_left=-30.0)
    u0 = soliton_solution(1.0, 8.0)(per.nodes, 0.0)
    return per, wholeline_solve(u0, per, T=2.0, cfl=0.1)


def test_wholeline_conserves_mass(soliton_run):
    per, traj = soliton_run
    masses = np.sum(traj.states, axis=1) * per.dx
    assert np.max(np.abs(masses - masses[0])) <= 1e-10


def test_wholeline_preserves_energy(soliton_run):
    per, traj = soliton_run
    e = np.sum(traj.states**2, axis=1) * per.dx
    assert abs(e[-1] - e[0]) / e[0] <= 1e-6


def test_wholeline_transports_soliton(soliton_run):
    per, traj = soliton_run
    ref = soliton_solution(1.0, 8.0)(per.nodes, traj.times[-1])
    assert np.max(np.abs(traj.states[-1] - ref)) <= 1e-5


def test_spectral_restriction_interpolates(soliton_run):
    per, traj = soliton_run
    k = len(traj.times) // 2
    at_nodes = spectral_restriction(traj, k, per.nodes)
    assert np.max(np.abs(at_nodes - traj.states[k])) <= 1e-12
    mids = per.nodes[100:140] + 0.5 * per.dx
    exact = soliton_solution(1.0, 8.0)(mids, traj.times[k])
    assert np.max(np.abs(spectral_restriction(traj, k, mids) - exact)) <= 1e-4


def test_extraction_window_must_fit(soliton_run):
    per, traj = soliton_run
    with pytest.raises(ValueError, match="not contained"):
        extract_halfline_data(traj, 60.0, Grid1D(20.0, 201))


def test_extracted_data_consistent(soliton_run):
    per, traj = soliton_run
    grid = Grid1D(20.0, 201)
    u0, bd = extract_halfline_data(traj, 12.0, grid)
    # corner compatibility and a self-consistent (f, f') pair
    assert abs(bd.f(0.0) - u0.values[0]) <= 1e-12
    bd.validate(2.0)
    # the restriction itself at t=0
    exact = soliton_solution(1.0, 8.0)(12.0 + grid.nodes, 0.0)
    assert np.max(np.abs(u0.values - exact)) <= 1e-8


def test_bump_data_round_trip():
    per = PeriodicGrid(96.0, 256, x_left=-48.0)
    u0 = gaussian_bump(0.5, 0.0, 3.0)(per.nodes)
    traj = wholeline_solve(u0, per, T=0.5, cfl=0.3)
    assert traj.states.shape == (len(traj.times), per.m)
    assert np.array_equal(traj.states[0], u0)
