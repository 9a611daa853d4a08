"""Smooth cutoff weights used by the moving-window energy functionals.

Everything here is built from a single C-infinity brick, exp(-1/theta): a
symmetric unit step `eta`, a fixed background ramp `rho`, and the two-parameter
family `chi(eps, b)` that vanishes on (0, eps], equals 1 on [b, infinity) and
increases in between.  The translate chi(x + v*t - x0) is the weight that
sweeps leftward across the half-line as time advances; `moving_weight`
evaluates it and its first three derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

__all__ = ["eta", "rho", "CutoffSpec", "chi", "WeightSpec", "moving_weight"]

# exp(w) underflows to 0.0 well before w = -745; beyond this cut the bump and
# every derivative of it are zero to double precision.
_LOG_FLOOR = -500.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_PANELS = 4096


def eta(theta):
    """Symmetric smooth step: 0 for theta <= 0, 1 for theta >= 1.

    Built as psi(theta) / (psi(theta) + psi(1-theta)), which makes the
    partition identity eta(theta) + eta(1-theta) = 1 hold to round-off.
    """
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    theta = np.atleast_1d(theta)
    out = np.empty_like(theta)
    out[theta <= 0.0] = 0.0
    out[theta >= 1.0] = 1.0
    mid = (theta > 0.0) & (theta < 1.0)
    t = theta[mid]
    a = np.exp(-1.0 / t)
    bb = np.exp(-1.0 / (1.0 - t))
    out[mid] = a / (a + bb)
    return out[0] if scalar else out


def rho(x):
    """Fixed background ramp: 1 on (-inf, -2], 2 on [1, inf), smooth between."""
    return 1.0 + eta((np.asarray(x, dtype=float) + 2.0) / 3.0)


def _bump_log_terms(s, eps, b):
    """w, w', w'' for w(s) = -1/((s-eps)(b-s)) on the open support."""
    p = s - eps
    q = b - s
    pq = p * q
    w = -1.0 / pq
    d = q - p                      # (pq)' since p' = 1, q' = -1
    w1 = d / pq**2
    w2 = -2.0 / pq**2 - 2.0 * d**2 / pq**3
    return w, w1, w2


def _bump(s, eps, b, order=0):
    """Derivatives 0..2 of the unnormalized bump exp(-1/((s-eps)(b-s)))."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > eps) & (s < b)
    if not np.any(inside):
        return out
    w, w1, w2 = _bump_log_terms(s[inside], eps, b)
    live = w > _LOG_FLOOR
    g = np.zeros_like(w)
    g[live] = np.exp(w[live])
    if order == 0:
        vals = g
    elif order == 1:
        vals = np.where(live, w1 * g, 0.0)
    elif order == 2:
        vals = np.where(live, (w2 + w1**2) * g, 0.0)
    else:
        raise ValueError("bump derivative order must be 0, 1 or 2")
    out[inside] = vals
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """Parameters of one cutoff chi_{eps,b}; normalization cached at construction.

    The profile is defined through its derivative: chi' is the bump
    exp(-1/((s-eps)(b-s))) scaled to unit integral, so chi ramps monotonically
    from 0 at eps to 1 at b.  The standing assumption b >= 5*eps is enforced.
    """

    epsilon: float
    b: float
    _norm: float = field(init=False, repr=False, compare=False)
    _antideriv: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.epsilon > 0.0):
            raise ValueError(f"cutoff requires epsilon > 0, got {self.epsilon}")
        if not (self.b >= 5.0 * self.epsilon):
            raise ValueError(
                f"cutoff requires b >= 5*epsilon, got b={self.b}, epsilon={self.epsilon}"
            )
        z, _ = quad(
            lambda s: float(_bump(np.array(s), self.epsilon, self.b)),
            self.epsilon,
            self.b,
            epsabs=0.0,
            epsrel=1e-12,
            limit=200,
        )
        object.__setattr__(self, "_norm", z)
        # cumulative integral of the bump on a fixed panel grid, one composite
        # Gauss-Legendre rule per panel; the spline reproduces chi between knots
        edges = np.linspace(self.epsilon, self.b, _PANELS + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        pts = mids[:, None] + half * _GL_NODES[None, :]
        panel = half * (_bump(pts, self.epsilon, self.b) @ _GL_WEIGHTS)
        cum = np.concatenate([[0.0], np.cumsum(panel)]) / z
        object.__setattr__(self, "_antideriv", CubicSpline(edges, cum))

    @property
    def normalization(self):
        """Cached integral of the unnormalized bump over (epsilon, b)."""
        return self._norm


def chi(spec: CutoffSpec, x, order: int = 0):
    """Evaluate chi_{eps,b} (order=0) or its derivatives (order=1..3).

    chi is exactly 0 on (-inf, eps], exactly 1 on [b, inf); derivatives are
    exactly 0 outside (eps, b) and come from closed-form differentiation of
    the normalized bump, so their supports are sharp.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if order == 0:
        out = np.zeros_like(x)
        out[x >= spec.b] = 1.0
        mid = (x > spec.epsilon) & (x < spec.b)
        if np.any(mid):
            out[mid] = np.clip(spec._antideriv(x[mid]), 0.0, 1.0)
    elif order in (1, 2, 3):
        out = _bump(x, spec.epsilon, spec.b, order - 1) / spec._norm
    else:
        raise ValueError(f"chi derivative order must be in 0..3, got {order}")
    return out[0] if scalar else out


@dataclass(frozen=True)
class WeightSpec:
    """A cutoff together with the translation law x -> x + v*t - x0."""

    cutoff: CutoffSpec
    v: float
    x0: float

    def __post_init__(self):
        if self.v < 0.0:
            raise ValueError(f"weight speed must satisfy v >= 0, got {self.v}")

    @property
    def sup_chi_prime(self):
        """Peak of chi' (used by the Young-split bookkeeping)."""
        c = self.cutoff
        s = np.linspace(c.epsilon, c.b, 2049)
        return float(np.max(chi(c, s, order=1)))


def moving_weight(wspec: WeightSpec, x, t: float, order: int = 0):
    """chi_{eps,b}(x + v*t - x0) and derivatives, the sweeping weight."""
    return chi(wspec.cutoff, np.asarray(x, dtype=float) + wspec.v * t - wspec.x0, order)
