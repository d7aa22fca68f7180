"""Reference curves and curve utilities.

A reference curve is any smooth map t -> gamma(t) into the state space;
it does not need to be a trajectory the system can actually follow.
Curves carry their dimension, first (and optionally second) derivative,
and a bound nu on the velocity norm over the horizon of interest, which
feeds the sampling-period certificates.

Evaluation convention: a scalar t yields shape (n,), an array of shape
(k,) yields shape (k, n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline

from .errors import DegenerateCurveError, UsageError


def _stack_components(funcs):
    """Vector-valued eval from per-component vectorized scalar functions."""
    def ev(t):
        t_arr = np.asarray(t, dtype=float)
        cols = [np.broadcast_to(np.asarray(f(t_arr), dtype=float), t_arr.shape)
                for f in funcs]
        return np.stack(cols, axis=-1)
    return ev


@dataclass(frozen=True)
class ReferenceCurve:
    """Smooth curve in R^n with derivative data and a velocity bound.

    ``nu`` bounds the true velocity norm on [0, horizon]; a margin is
    baked in by the factories so sampled suprema stay on the safe side.
    ``t_max`` marks the end of the range on which the curve data is
    valid (infinite for closed-form curves).
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    nu: float
    name: str = ""
    deriv2: Callable[[np.ndarray], np.ndarray] | None = None
    t_max: float = np.inf

    def __call__(self, t):
        return self.eval(t)


def velocity_bound(deriv, horizon: float, n_samples: int = 100_000,
                   margin: float = 1.01) -> float:
    """Sampled sup of the velocity norm over [0, horizon], inflated.

    The margin covers what a finite sample can miss between grid points.
    """
    if horizon <= 0:
        raise UsageError(f"horizon must be positive, got {horizon}")
    ts = np.linspace(0.0, horizon, n_samples)
    speeds = np.linalg.norm(np.asarray(deriv(ts), dtype=float), axis=-1)
    return margin * float(np.max(speeds))


def curve_gamma1(horizon: float = 40.0) -> ReferenceCurve:
    """Flower-shaped planar curve with a slowly rocking third component.

    Not admissible for the unicycle: the heading coordinate moves
    independently of the planar direction of travel.
    """
    ev = _stack_components([
        lambda t: 2 * np.cos(t / 2) * np.cos(t),
        lambda t: 2 * np.cos(t / 2) * np.sin(t),
        lambda t: np.cos(t / 10),
    ])
    dv = _stack_components([
        lambda t: -np.sin(t / 2) * np.cos(t) - 2 * np.cos(t / 2) * np.sin(t),
        lambda t: -np.sin(t / 2) * np.sin(t) + 2 * np.cos(t / 2) * np.cos(t),
        lambda t: -np.sin(t / 10) / 10,
    ])
    dv2 = _stack_components([
        lambda t: -2.5 * np.cos(t / 2) * np.cos(t) + 2 * np.sin(t / 2) * np.sin(t),
        lambda t: -2.5 * np.cos(t / 2) * np.sin(t) - 2 * np.sin(t / 2) * np.cos(t),
        lambda t: -np.cos(t / 10) / 100,
    ])
    nu = velocity_bound(dv, horizon)
    return ReferenceCurve(3, ev, dv, nu, name="gamma1", deriv2=dv2)


def curve_gamma2(horizon: float = 40.0) -> ReferenceCurve:
    """Curve whose velocity decays to zero, settling at (3, 0, 0)."""
    ev = _stack_components([
        lambda t: 3 - np.exp(1 - t),
        lambda t: np.exp(-t ** 2),
        lambda t: np.zeros_like(t),
    ])
    dv = _stack_components([
        lambda t: np.exp(1 - t),
        lambda t: -2 * t * np.exp(-t ** 2),
        lambda t: np.zeros_like(t),
    ])
    dv2 = _stack_components([
        lambda t: -np.exp(1 - t),
        lambda t: (4 * t ** 2 - 2) * np.exp(-t ** 2),
        lambda t: np.zeros_like(t),
    ])
    nu = velocity_bound(dv, horizon)
    return ReferenceCurve(3, ev, dv, nu, name="gamma2", deriv2=dv2)


def curve_gamma3_admissible(base: ReferenceCurve, gamma3_0: float | None = None,
                            horizon: float = 40.0,
                            step: float = 1e-4) -> ReferenceCurve:
    """Admissible companion of a planar curve for the unicycle.

    Keeps the first two components of ``base`` and replaces the third by
    the heading angle of the planar path, so the result can be followed
    exactly by a unicycle.  The heading rate

        theta' = (x' y'' - y' x'') / (x'^2 + y'^2)

    is integrated by cumulative Simpson quadrature on a fine grid and
    interpolated with a cubic Hermite spline (exact slopes at the
    nodes).  The grid extends past the horizon by a safety pad so the
    closed-loop simulation can sample slightly beyond it.
    """
    if base.deriv2 is None:
        raise UsageError("heading construction needs second derivatives of the base curve")
    if horizon <= 0 or step <= 0:
        raise UsageError("horizon and step must be positive")

    t_end = horizon + 0.05 * horizon + 2.0
    n_grid = int(np.ceil(t_end / step)) + 1
    ts = np.linspace(0.0, t_end, n_grid)
    d = np.asarray(base.deriv(ts), dtype=float)
    dd = np.asarray(base.deriv2(ts), dtype=float)
    den = d[:, 0] ** 2 + d[:, 1] ** 2
    if float(np.min(den)) < 1e-8:
        raise DegenerateCurveError(
            "planar speed vanishes; the path has no well-defined heading")
    rate = (d[:, 0] * dd[:, 1] - d[:, 1] * dd[:, 0]) / den

    if gamma3_0 is None:
        d0 = np.asarray(base.deriv(0.0), dtype=float)
        gamma3_0 = float(np.arctan2(d0[1], d0[0]))
    theta = gamma3_0 + cumulative_simpson(rate, x=ts, initial=0.0)
    spline = CubicHermiteSpline(ts, theta, rate)

    def heading_rate(t):
        t_arr = np.asarray(t, dtype=float)
        dv = np.asarray(base.deriv(t_arr), dtype=float)
        dv2 = np.asarray(base.deriv2(t_arr), dtype=float)
        return ((dv[..., 0] * dv2[..., 1] - dv[..., 1] * dv2[..., 0])
                / (dv[..., 0] ** 2 + dv[..., 1] ** 2))

    def _check_range(t_arr):
        if np.any(t_arr < -1e-6) or np.any(t_arr > t_end + 1e-9):
            raise UsageError(
                f"heading curve only tabulated on [0, {t_end:.6g}], got time outside it")

    def ev(t):
        t_arr = np.asarray(t, dtype=float)
        _check_range(t_arr)
        planar = np.asarray(base.eval(t_arr), dtype=float)[..., :2]
        return np.concatenate(
            [planar, spline(t_arr)[..., None]], axis=-1)

    def dv_full(t):
        t_arr = np.asarray(t, dtype=float)
        _check_range(t_arr)
        planar = np.asarray(base.deriv(t_arr), dtype=float)[..., :2]
        return np.concatenate(
            [planar, heading_rate(t_arr)[..., None]], axis=-1)

    nu = velocity_bound(dv_full, horizon)
    return ReferenceCurve(3, ev, dv_full, nu,
                          name=f"{base.name or 'base'}-heading", t_max=t_end)


def curve_gamma4_underwater(horizon: float = 40.0) -> ReferenceCurve:
    """Helical position reference for the six-state underwater vehicle."""
    ev = _stack_components([
        lambda t: np.cos(t / 4),
        lambda t: t / 4,
        lambda t: np.sin(t / 4),
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
    ])
    dv = _stack_components([
        lambda t: -np.sin(t / 4) / 4,
        lambda t: np.full_like(t, 0.25),
        lambda t: np.cos(t / 4) / 4,
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
    ])
    nu = velocity_bound(dv, horizon)
    return ReferenceCurve(6, ev, dv, nu, name="gamma4_underwater")


def curve_gamma4_car(horizon: float = 60.0) -> ReferenceCurve:
    """Figure-eight position reference for the rear-wheel car."""
    ev = _stack_components([
        lambda t: 5 * np.sin(t / 4),
        lambda t: 5 * np.sin(t / 4) * np.cos(t / 4),
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
    ])
    dv = _stack_components([
        lambda t: 1.25 * np.cos(t / 4),
        lambda t: 1.25 * np.cos(t / 2),
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
    ])
    nu = velocity_bound(dv, horizon)
    return ReferenceCurve(4, ev, dv, nu, name="gamma4_car")


def constant_curve(point: np.ndarray, name: str = "constant") -> ReferenceCurve:
    """A stationary target; nu is exactly zero."""
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise UsageError("constant curve needs a 1-d target point")
    n = point.size

    def ev(t):
        t_arr = np.asarray(t, dtype=float)
        return np.broadcast_to(point, t_arr.shape + (n,)).copy()

    def dv(t):
        t_arr = np.asarray(t, dtype=float)
        return np.zeros(t_arr.shape + (n,))

    return ReferenceCurve(n, ev, dv, 0.0, name=name, deriv2=dv)


CURVE_REGISTRY: dict[str, Callable[[float], ReferenceCurve]] = {
    "gamma1": curve_gamma1,
    "gamma2": curve_gamma2,
    "gamma3": lambda horizon: curve_gamma3_admissible(
        curve_gamma1(horizon), horizon=horizon),
    "gamma4_underwater": curve_gamma4_underwater,
    "gamma4_car": curve_gamma4_car,
}


def get_curve(name: str, horizon: float = 40.0) -> ReferenceCurve:
    """Look up a named curve or build one from an ``expr:`` string."""
    if name.startswith("expr:"):
        from .expressions import curve_from_expression
        return curve_from_expression(name[len("expr:"):], horizon=horizon)
    try:
        factory = CURVE_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(CURVE_REGISTRY))
        raise UsageError(f"unknown curve {name!r}; known curves: {known}, "
                         "or an expr:... component list") from None
    return factory(horizon)
