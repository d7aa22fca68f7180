"""Coefficient solve and oscillating control synthesis.

At each sampling instant the tracking error x - gamma is pushed through
the inverse of the gain matrix to get one coefficient per spanned
direction.  Directions reachable directly get their coefficient as a
constant control component; bracket directions are realized on average
by sinusoidal components whose amplitude grows like 1/sqrt(epsilon)
(first-order brackets) or 1/epsilon^(2/3) (nested brackets).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, UsageError
from .systems import BracketScheme, ControlSystem, build_gain_matrix


@dataclass(frozen=True)
class ControllerParams:
    """Feedback gain alpha and sampling period epsilon."""

    alpha: float
    epsilon: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise UsageError(f"alpha must be positive, got {self.alpha}")
        if not self.epsilon > 0:
            raise UsageError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class CoefficientVector:
    """Solved direction coefficients, sliced by bracket degree.

    ``values`` follows the gain-matrix column order: direct fields
    first, then first-order bracket pairs, then nested terms.
    """

    values: np.ndarray
    scheme: BracketScheme

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.scheme.n_columns,):
            raise DimensionMismatchError(
                f"expected {self.scheme.n_columns} coefficients, got {values.shape}")

    @property
    def first_order(self) -> np.ndarray:
        return self.values[:len(self.scheme.s1)]

    @property
    def pair(self) -> np.ndarray:
        k = len(self.scheme.s1)
        return self.values[k:k + len(self.scheme.s2)]

    @property
    def nested(self) -> np.ndarray:
        return self.values[len(self.scheme.s1) + len(self.scheme.s2):]


def coefficients(sys: ControlSystem, scheme: BracketScheme,
                 params: ControllerParams, x: np.ndarray,
                 gamma: np.ndarray) -> CoefficientVector:
    """Solve F(x) a = -alpha (x - gamma) for the direction coefficients."""
    x = np.asarray(x, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != x.shape:
        raise DimensionMismatchError(
            f"state and reference shapes differ: {x.shape} vs {gamma.shape}")
    gain = build_gain_matrix(sys, scheme, x)
    rhs = -params.alpha * (x - gamma)
    return CoefficientVector(np.linalg.solve(gain, rhs), scheme)


def control_degree1(scheme: BracketScheme, params: ControllerParams,
                    t: float, coeffs: CoefficientVector) -> np.ndarray:
    """Degree-1 control terms at absolute time t.

    Sums the constant components over the directly actuated channels
    and the sqrt-amplitude sinusoids over the bracket pairs.  Nested
    terms declared by the scheme are left out; ``control_degree2``
    includes them.
    """
    u = np.zeros(scheme.m)
    for i, a in zip(scheme.s1, coeffs.first_order):
        u[i - 1] += a
    omega0 = 2.0 * np.pi / params.epsilon
    root = np.sqrt(4.0 * np.pi / params.epsilon)
    for (i, j), kap, a in zip(scheme.s2, scheme.kappa, coeffs.pair):
        amp = root * np.sqrt(kap * abs(a))
        u[i - 1] += amp * np.cos(kap * omega0 * t)
        u[j - 1] += amp * np.sign(a) * np.sin(kap * omega0 * t)
    return u


def control_degree2(scheme: BracketScheme, params: ControllerParams,
                    t: float, coeffs: CoefficientVector) -> np.ndarray:
    """Full control at absolute time t, nested-bracket terms included.

    The cube-root amplitude keeps the sign of the nested coefficient,
    so a negative coefficient flips the whole oscillation.
    """
    u = control_degree1(scheme, params, t, coeffs)
    omega0 = 2.0 * np.pi / params.epsilon
    for term, a in zip(scheme.degree2, coeffs.nested):
        j1, j2, _ = term.triple
        amp = np.cbrt(16.0 * np.pi ** 2 * (term.k2 ** 2 - term.k1 ** 2)
                      * a / params.epsilon ** 2)
        s2 = np.sin(term.k2 * omega0 * t)
        u[j1 - 1] += amp * np.cos(term.k1 * omega0 * t) * (1.0 + s2)
        u[j2 - 1] += amp * s2
    return u


def make_control_function(scheme: BracketScheme, params: ControllerParams,
                          coeffs: CoefficientVector
                          ) -> Callable[[float], np.ndarray]:
    """Control u(t) realizing the solved coefficients over one period.

    The returned closure takes absolute time (the trigonometric phases
    are not reset at sampling instants) and returns the m-vector of
    control values.  All amplitudes are precomputed; only the sines and
    cosines are evaluated per call.
    """
    m = scheme.m
    static = np.zeros(m)
    for i, a in zip(scheme.s1, coeffs.first_order):
        static[i - 1] = a

    omega0 = 2.0 * np.pi / params.epsilon
    root = np.sqrt(4.0 * np.pi / params.epsilon)
    osc = []
    for (i, j), kap, a in zip(scheme.s2, scheme.kappa, coeffs.pair):
        amp = root * np.sqrt(kap * abs(a))
        osc.append((i - 1, j - 1, kap * omega0, amp, float(np.sign(a))))

    deg2 = []
    for term, a in zip(scheme.degree2, coeffs.nested):
        j1, j2, _ = term.triple
        amp = np.cbrt(16.0 * np.pi ** 2 * (term.k2 ** 2 - term.k1 ** 2)
                      * a / params.epsilon ** 2)
        deg2.append((j1 - 1, j2 - 1, term.k1 * omega0, term.k2 * omega0, amp))

    def control(t: float) -> np.ndarray:
        u = static.copy()
        for i, j, w, amp, sgn in osc:
            u[i] += amp * np.cos(w * t)
            u[j] += amp * sgn * np.sin(w * t)
        for j1, j2, w1, w2, amp in deg2:
            s2 = np.sin(w2 * t)
            u[j1] += amp * np.cos(w1 * t) * (1.0 + s2)
            u[j2] += amp * s2
        return u

    return control


def control_profile(scheme: BracketScheme, params: ControllerParams,
                    coeffs: CoefficientVector, ts: np.ndarray) -> np.ndarray:
    """Vectorized evaluation of the control over an array of times.

    Returns an array of shape (len(ts), m).  Used for plotting, for
    recording control histories, and for bounding |u| over an interval.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    m = scheme.m
    u = np.zeros((ts.size, m))
    for i, a in zip(scheme.s1, coeffs.first_order):
        u[:, i - 1] += a

    omega0 = 2.0 * np.pi / params.epsilon
    root = np.sqrt(4.0 * np.pi / params.epsilon)
    for (i, j), kap, a in zip(scheme.s2, scheme.kappa, coeffs.pair):
        amp = root * np.sqrt(kap * abs(a))
        u[:, i - 1] += amp * np.cos(kap * omega0 * ts)
        u[:, j - 1] += amp * np.sign(a) * np.sin(kap * omega0 * ts)

    for term, a in zip(scheme.degree2, coeffs.nested):
        j1, j2, _ = term.triple
        amp = np.cbrt(16.0 * np.pi ** 2 * (term.k2 ** 2 - term.k1 ** 2)
                      * a / params.epsilon ** 2)
        s2 = np.sin(term.k2 * omega0 * ts)
        u[:, j1 - 1] += amp * np.cos(term.k1 * omega0 * ts) * (1.0 + s2)
        u[:, j2 - 1] += amp * s2
    return u


def control(sys: ControlSystem, scheme: BracketScheme, params: ControllerParams,
            t: float, x_sample: np.ndarray, gamma_sample: np.ndarray) -> np.ndarray:
    """One-call convenience: solve coefficients at the sample, evaluate u(t)."""
    coeffs = coefficients(sys, scheme, params, x_sample, gamma_sample)
    return make_control_function(scheme, params, coeffs)(t)
