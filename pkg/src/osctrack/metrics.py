"""Tracking-quality metrics computed from recorded trajectories.

Practical stabilization to a curve means: the distance to the moving
reference enters a tube of radius rho in finite time and stays there.
The metrics below measure exactly that, plus the size of the residual
steady-state wobble and an exponential fit of the transient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .integrator import Trajectory

# Relative slack when deciding whether a distance sits inside the tube,
# so states that graze the boundary do not flip the verdict.
TUBE_EDGE_RTOL = 1e-9


def tube_distance(traj: Trajectory, rho: float) -> np.ndarray:
    """Distance to the rho-tube around the reference: max(0, dist - rho)."""
    if rho < 0:
        raise UsageError(f"tube radius must be nonnegative, got {rho}")
    return np.maximum(0.0, traj.dist - rho)


def entry_time(traj: Trajectory, rho: float) -> float:
    """First time after which the trajectory never leaves the rho-tube.

    Returns 0.0 when it never leaves the tube at all, and inf when it is
    still outside at the end of the record.
    """
    outside = traj.dist > rho * (1.0 + TUBE_EDGE_RTOL)
    if not np.any(outside):
        return 0.0
    last_out = int(np.max(np.nonzero(outside)[0]))
    if last_out == traj.dist.size - 1:
        return np.inf
    return float(traj.times[last_out + 1])


def steady_amplitude(traj: Trajectory) -> float:
    """Largest raw distance over the last quarter of the record."""
    t_cut = 0.75 * traj.times[-1]
    return float(np.max(traj.dist[traj.times >= t_cut]))


def tail_error(traj: Trajectory, t_start: float) -> float:
    """Largest raw distance over times >= t_start."""
    mask = traj.times >= t_start
    if not np.any(mask):
        raise UsageError(f"no recorded times at or after {t_start}")
    return float(np.max(traj.dist[mask]))


@dataclass(frozen=True)
class StabilityReport:
    """Tube verdict for one trajectory at tube radius rho.

    ``fitted_lambda``/``fitted_C`` describe a least-squares fit of
    C*exp(-lambda*t) to the distance-above-tube during the transient,
    evaluated at sampling instants; both are None when fewer than two
    usable points exist.
    """

    rho: float
    entry_time: float
    steady_amplitude: float
    fitted_lambda: float | None
    fitted_C: float | None

    @property
    def entered(self) -> bool:
        return np.isfinite(self.entry_time)


def stability_report(traj: Trajectory, rho: float) -> StabilityReport:
    t_enter = entry_time(traj, rho)
    tube = tube_distance(traj, rho)
    idx = traj.sample_indices()
    transient = idx[(traj.times[idx] < t_enter) & (tube[idx] > 0)]
    fitted_lambda = fitted_C = None
    if transient.size >= 2:
        ts = traj.times[transient]
        logs = np.log(tube[transient])
        slope, intercept = np.polyfit(ts, logs, 1)
        fitted_lambda = float(-slope)
        fitted_C = float(np.exp(intercept))
    return StabilityReport(
        rho=rho,
        entry_time=t_enter,
        steady_amplitude=steady_amplitude(traj),
        fitted_lambda=fitted_lambda,
        fitted_C=fitted_C,
    )


# Alias: the report quantifies the distance to the moving family of balls
# around the reference, and some call sites read better under that name.
dist_to_family = stability_report


@dataclass(frozen=True)
class GapReport:
    """Steady-state error comparison between two runs on the same grid."""

    tail_admissible: float
    tail_nonadmissible: float
    ratio: float


def admissible_vs_nonadmissible_gap(traj_adm: Trajectory,
                                    traj_nonadm: Trajectory) -> GapReport:
    """How much worse a non-admissible reference tracks than an admissible one.

    Both runs must share the same time grid so the comparison is
    apples-to-apples; the ratio is non-admissible over admissible
    steady amplitude.
    """
    if traj_adm.times.shape != traj_nonadm.times.shape or \
            not np.allclose(traj_adm.times, traj_nonadm.times, atol=1e-12):
        raise UsageError("gap comparison needs runs on identical time grids")
    tail_adm = steady_amplitude(traj_adm)
    tail_nonadm = steady_amplitude(traj_nonadm)
    ratio = np.inf if tail_adm == 0 else tail_nonadm / tail_adm
    return GapReport(tail_admissible=tail_adm, tail_nonadmissible=tail_nonadm,
                     ratio=float(ratio))
