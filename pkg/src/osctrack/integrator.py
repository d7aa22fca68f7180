"""Fixed-step simulation under sampled and classical semantics.

The sampled semantics is the one the stability guarantees are stated
for: time is partitioned into intervals of length epsilon, the
coefficient solve happens once per interval using the state and
reference at the left endpoint, and the resulting open-loop control
(continuous in t, with absolute trigonometric phases) drives the system
until the next sampling instant.

The classical semantics instead lets the coefficients depend on the
current state at every instant, which is the textbook closed-loop ODE.
Both are integrated with the classical fourth-order Runge-Kutta scheme
on a fixed grid of ``substeps`` nodes per sampling interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .controller import (
    ControllerParams,
    coefficients,
    make_control_function,
)
from .curves import ReferenceCurve
from .errors import (
    DimensionMismatchError,
    DomainError,
    RankConditionError,
    SimulationError,
    UsageError,
)
from .systems import BracketScheme, ControlSystem

# Integration nodes per sampling interval must resolve the fastest
# oscillation with at least this many nodes per period.
MIN_NODES_PER_PERIOD = 40


def default_substeps(scheme: BracketScheme) -> int:
    return max(200, MIN_NODES_PER_PERIOD * scheme.max_frequency)


@dataclass(frozen=True)
class SamplerGrid:
    """Sampling period, horizon, and integration resolution.

    ``substeps`` is the number of integration nodes per sampling
    interval; None picks a default from the scheme's fastest frequency.
    """

    epsilon: float
    horizon: float
    substeps: int | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise UsageError(f"epsilon must be positive, got {self.epsilon}")
        if not self.horizon > 0:
            raise UsageError(f"horizon must be positive, got {self.horizon}")
        if self.substeps is not None and self.substeps < 1:
            raise UsageError(f"substeps must be positive, got {self.substeps}")

    def resolve(self, scheme: BracketScheme, params: ControllerParams) -> int:
        """Validate against the scheme and params, return the substep count."""
        if abs(self.epsilon - params.epsilon) > 1e-12 * max(1.0, params.epsilon):
            raise UsageError(
                f"grid epsilon {self.epsilon} does not match controller epsilon "
                f"{params.epsilon}")
        substeps = self.substeps if self.substeps is not None else default_substeps(scheme)
        needed = MIN_NODES_PER_PERIOD * scheme.max_frequency
        if substeps < needed:
            raise UsageError(
                f"{substeps} substeps cannot resolve oscillations up to harmonic "
                f"{scheme.max_frequency}; need at least {needed}")
        return substeps


@dataclass(frozen=True)
class Trajectory:
    """Recorded closed-loop run on the integration grid.

    ``controls[i]`` holds the control in effect at ``times[i]``; at
    sampling instants that is the incoming interval's value (the record
    is right-continuous), except for the very last row, which keeps the
    final interval's control.  ``dist`` is the raw distance to the
    reference, row by row.
    """

    times: np.ndarray
    states: np.ndarray
    reference: np.ndarray
    controls: np.ndarray
    dist: np.ndarray
    epsilon: float
    substeps: int
    n_intervals: int
    coefficient_evals: int
    semantics: str

    def sample_indices(self) -> np.ndarray:
        """Row indices of the sampling instants present in the record."""
        return np.arange(0, self.times.size, self.substeps)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])




def _integrate(sys: ControlSystem, scheme: BracketScheme, params: ControllerParams,
               curve: ReferenceCurve, x0: np.ndarray, grid: SamplerGrid,
               freeze: bool, on_coefficients=None) -> Trajectory:
    substeps = grid.resolve(scheme, params)
    if curve.dim != sys.n:
        raise DimensionMismatchError(
            f"curve has dim {curve.dim}, system has n={sys.n}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.n,):
        raise DimensionMismatchError(f"x0 must have shape ({sys.n},), got {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise UsageError("x0 must be finite")
    if not sys.in_domain(x0):
        raise DomainError(f"initial state {x0} outside the system domain")

    eps = params.epsilon
    h = eps / substeps
    n_int = int(np.ceil(grid.horizon / eps - 1e-9))
    rows = n_int * substeps + 1
    idx = np.arange(rows)
    times = (idx // substeps) * eps + (idx % substeps) * h
    gamma_all = np.asarray(curve.eval(times), dtype=float)

    states = np.empty((rows, sys.n))
    controls = np.empty((rows, scheme.m))
    fields = sys.fields
    semantics = "sampled" if freeze else "classic"
    eval_count = 0

    def drift_from(u: np.ndarray, x: np.ndarray) -> np.ndarray:
        out = u[0] * fields[0].eval(x)
        for i in range(1, len(fields)):
            out = out + u[i] * fields[i].eval(x)
        return out

    def partial_abort(reason: str, msg: str, last_good: int, t_fail: float):
        kept = last_good + 1
        traj = Trajectory(
            times=times[:kept], states=states[:kept], reference=gamma_all[:kept],
            controls=controls[:kept],
            dist=np.linalg.norm(states[:kept] - gamma_all[:kept], axis=1),
            epsilon=eps, substeps=substeps,
            n_intervals=last_good // substeps + 1,
            coefficient_evals=eval_count, semantics=semantics)
        raise SimulationError(msg, reason=reason, time=t_fail, partial=traj)

    x = x0.copy()
    for j in range(n_int):
        base = j * substeps
        if freeze:
            try:
                coeffs = coefficients(sys, scheme, params, x, gamma_all[base])
            except DomainError:
                partial_abort("domain-exit",
                              f"state left the domain at sampling instant t={times[base]:.6g}",
                              base, float(times[base]))
            except RankConditionError:
                partial_abort("rank-deficient",
                              f"gain matrix singular at sampling instant t={times[base]:.6g}",
                              base, float(times[base]))
            eval_count += 1
            if on_coefficients is not None:
                on_coefficients(j, float(times[base]), x.copy(), coeffs)
            u_func = make_control_function(scheme, params, coeffs)

            def control_at(t, state):
                return u_func(t)
        else:
            def control_at(t, state):
                nonlocal eval_count
                gamma_t = np.asarray(curve.eval(t), dtype=float)
                c = coefficients(sys, scheme, params, state, gamma_t)
                eval_count += 1
                return make_control_function(scheme, params, c)(t)

        for k in range(substeps):
            i = base + k
            t = float(times[i])
            states[i] = x
            try:
                u1 = control_at(t, x)
                controls[i] = u1
                k1 = drift_from(u1, x)
                xa = x + 0.5 * h * k1
                k2 = drift_from(control_at(t + 0.5 * h, xa), xa)
                xb = x + 0.5 * h * k2
                k3 = drift_from(control_at(t + 0.5 * h, xb), xb)
                xc = x + h * k3
                k4 = drift_from(control_at(t + h, xc), xc)
                x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            except DomainError:
                partial_abort("domain-exit",
                              f"state left the domain near t={t:.6g}", i, t)
            except RankConditionError:
                partial_abort("rank-deficient",
                              f"gain matrix singular near t={t:.6g}", i, t)
            t_next = float(times[i + 1])
            if not np.all(np.isfinite(x)):
                partial_abort("non-finite-state",
                              f"state became non-finite by t={t_next:.6g}", i, t_next)
            if not sys.in_domain(x):
                partial_abort("domain-exit",
                              f"state left the domain by t={t_next:.6g}", i, t_next)

    states[-1] = x
    try:
        controls[-1] = control_at(float(times[-1]), x)
    except (DomainError, RankConditionError):
        controls[-1] = controls[-2]

    keep = int(np.searchsorted(times, grid.horizon + 1e-9, side="right"))
    times = times[:keep]
    states = states[:keep]
    gamma_all = gamma_all[:keep]
    controls = controls[:keep]
    return Trajectory(
        times=times, states=states, reference=gamma_all, controls=controls,
        dist=np.linalg.norm(states - gamma_all, axis=1),
        epsilon=eps, substeps=substeps, n_intervals=n_int,
        coefficient_evals=eval_count, semantics=semantics)


def simulate(sys: ControlSystem, scheme: BracketScheme, params: ControllerParams,
             curve: ReferenceCurve, x0: np.ndarray, grid: SamplerGrid,
             on_coefficients: Callable | None = None) -> Trajectory:
    """Closed-loop run under sampled semantics.

    Coefficients are solved exactly once per sampling interval, at its
    left endpoint; ``on_coefficients(j, t_j, x_j, coeffs)`` is invoked
    for each solve when given.
    """
    return _integrate(sys, scheme, params, curve, x0, grid,
                      freeze=True, on_coefficients=on_coefficients)


def classic_solution_simulate(sys: ControlSystem, scheme: BracketScheme,
                              params: ControllerParams, curve: ReferenceCurve,
                              x0: np.ndarray, grid: SamplerGrid) -> Trajectory:
    """Closed-loop run where the coefficients track the state continuously.

    Every Runge-Kutta stage re-solves the coefficient system at the
    stage's own state and time, so the result converges to the
    classical solution of the instantaneous-feedback ODE as the grid is
    refined.
    """
    return _integrate(sys, scheme, params, curve, x0, grid, freeze=False)
