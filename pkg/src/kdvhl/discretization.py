"""Uniform half-line grid, finite-difference operators and quadrature.

Interior stencils are the standard second-order centered ones (5-point for the
third derivative); rows too close to an edge fall back to one-sided stencils of
the same width, which keeps every row at accuracy order >= 2.  Stencil weights
come from the classic recurrence for finite-difference coefficients on
arbitrary nodes, so boundary closures and trace probes share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix

__all__ = [
    "Grid1D",
    "Field",
    "TraceSeries",
    "fd_weights",
    "deriv_matrix",
    "deriv",
    "trace_derivs",
    "integrate",
    "weighted_l2",
]


def fd_weights(xs, x0: float, k: int):
    """Weights approximating the k-th derivative at x0 from nodes xs.

    Fornberg's recurrence; exact for polynomials of degree < len(xs).
    """
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    if k >= n:
        raise ValueError(f"need more than {k} nodes for derivative order {k}")
    c = np.zeros((n, k + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, n):
        mn = min(i, k)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [0, L] with n nodes, h = L/(n-1)."""

    L: float
    n: int

    def __post_init__(self):
        if not (self.L > 0.0):
            raise ValueError(f"grid length must be positive, got {self.L}")
        if self.n < 8:
            raise ValueError(f"grid needs at least 8 nodes, got {self.n}")

    @property
    def h(self) -> float:
        return self.L / (self.n - 1)

    @property
    def nodes(self):
        return np.linspace(0.0, self.L, self.n)


@dataclass
class Field:
    """Grid function at one time level."""

    grid: Grid1D
    values: np.ndarray
    t: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"field has {self.values.shape} values for an n={self.grid.n} grid"
            )


@dataclass
class TraceSeries:
    """Boundary values at x = 0 recorded every step: u, u_x, u_xx, u_xxx."""

    times: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray

    def order(self, k: int):
        return (self.d0, self.d1, self.d2, self.d3)[k]


def _row_stencil(i: int, n: int, k: int):
    """(first node, width) of the row-i stencil: centered inside, one-sided
    same-width near the edges so accuracy order 2 holds on every row."""
    if k == 1:
        return min(max(i - 1, 0), n - 3), 3
    if k == 2:
        if 1 <= i <= n - 2:
            return i - 1, 3
        return (0, 4) if i == 0 else (n - 4, 4)
    if k == 3:
        if 2 <= i <= n - 3:
            return i - 2, 5
        return (0, 5) if i < 2 else (n - 5, 5)
    raise ValueError(f"derivative order must be 1, 2 or 3, got {k}")


@lru_cache(maxsize=64)
def _deriv_matrix_cached(n: int, h: float, k: int):
    rows, cols, data = [], [], []
    for i in range(n):
        lo, m = _row_stencil(i, n, k)
        w = fd_weights(np.arange(m, dtype=float) * h, (i - lo) * h, k)
        rows.extend([i] * m)
        cols.extend(range(lo, lo + m))
        data.extend(w)
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def deriv_matrix(grid: Grid1D, k: int):
    """Sparse k-th derivative operator for the grid (cached per (n, h, k))."""
    return _deriv_matrix_cached(grid.n, grid.h, k)


def deriv(field: Field, k: int):
    """k-th spatial derivative of a field, second-order accurate everywhere."""
    return deriv_matrix(field.grid, k) @ field.values


@lru_cache(maxsize=16)
def _trace_weights(h: float):
    # one-sided probes at x=0: 3 nodes for u_x, 4 for u_xx, 5 for u_xxx,
    # each accuracy order 2
    return tuple(
        fd_weights(np.arange(k + 2, dtype=float) * h, 0.0, k) for k in (1, 2, 3)
    )


def trace_derivs(field: Field):
    """(u, u_x, u_xx, u_xxx) at the left boundary node, one-sided, order >= 2."""
    u = field.values
    w1, w2, w3 = _trace_weights(field.grid.h)
    return (
        u[0],
        float(w1 @ u[:3]),
        float(w2 @ u[:4]),
        float(w3 @ u[:5]),
    )


def integrate(values, grid: Grid1D, window=None) -> float:
    """Composite trapezoid of nodal values; window is an (i0, i1) inclusive
    index pair, full grid when None.  Empty or inverted windows give 0."""
    values = np.asarray(values, dtype=float)
    if window is None:
        i0, i1 = 0, grid.n - 1
    else:
        i0, i1 = window
        i0 = max(int(i0), 0)
        i1 = min(int(i1), grid.n - 1)
    if i1 <= i0:
        return 0.0
    seg = values[i0 : i1 + 1]
    return grid.h * (np.sum(seg) - 0.5 * (seg[0] + seg[-1]))


def weighted_l2(field: Field, k: int, wspec, worder: int = 0) -> float:
    """integral of (d^k u)^2 times the moving weight (or a weight derivative).

    k = 0 uses the field itself; the weight is evaluated at the field's time.
    """
    from .weights import moving_weight

    g = field.values if k == 0 else deriv(field, k)
    w = moving_weight(wspec, field.grid.nodes, field.t, worder)
    return integrate(g * g * w, field.grid)
