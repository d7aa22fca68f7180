"""Certified sampling-period bounds and the quantitative checks behind them.

Given sup bounds on the fields and their first two derivatives over a
tube around the reference, this module produces explicit thresholds
eps1, eps2, eps3 such that for any sampling period below their minimum
the sampled feedback contracts the tracking error into the target tube.
It also provides the empirical counterparts: Monte-Carlo estimation of
the sup bounds, a Volterra-remainder residual check, the interval growth
bound, and a one-step contraction test.

All threshold formulas are evaluated in algebraically equivalent forms
that stay stable when C2 dominates or L is tiny (quadratic roots are
rationalized, exp(x) - 1 goes through expm1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .controller import ControllerParams
from .curves import ReferenceCurve
from .errors import (
    CertificationError,
    RankConditionError,
    UnsupportedSchemeError,
    UsageError,
)
from .integrator import SamplerGrid, Trajectory, simulate
from .systems import BracketScheme, ControlSystem, build_gain_matrix

# Lipschitz constants below this are treated as the zero-derivative
# limit (constant fields), where the growth bound degenerates smoothly.
L_FLOOR = 1e-12


@dataclass(frozen=True)
class CertificateInputs:
    """Geometry and sup bounds feeding the threshold formulas.

    Radii must satisfy the strict chain rho_prime < rho < delta <
    delta_prime < r (with nu/alpha < rho_prime checked against the
    controller gain later, since alpha lives in ControllerParams).
    ``lam`` is the targeted decay rate of the sampled error sequence.
    ``provenance`` records whether the sup bounds are closed-form
    ("analytic") or sampled with a safety factor ("empirical").
    """

    r: float
    rho: float
    rho_prime: float
    delta: float
    delta_prime: float
    mu: float
    nu: float
    M1: float
    M2: float
    M3: float
    L: float
    lam: float
    provenance: str = "analytic"

    def __post_init__(self):
        chain = (self.rho_prime, self.rho, self.delta, self.delta_prime, self.r)
        if not all(np.isfinite(chain)) or chain[0] <= 0:
            raise UsageError("tube radii must be finite and positive")
        if not (chain[0] < chain[1] < chain[2] < chain[3] < chain[4]):
            raise UsageError(
                "radii must satisfy rho_prime < rho < delta < delta_prime < r, "
                f"got {chain}")
        if self.mu <= 0:
            raise UsageError(f"mu must be positive, got {self.mu}")
        if self.nu < 0:
            raise UsageError(f"nu must be nonnegative, got {self.nu}")
        if self.M1 <= 0:
            raise UsageError(f"M1 must be positive, got {self.M1}")
        if self.M2 < 0 or self.M3 < 0 or self.L < 0:
            raise UsageError("M2, M3, and L must be nonnegative")
        if self.lam <= 0:
            raise UsageError(f"lam must be positive, got {self.lam}")


@dataclass(frozen=True)
class Certificate:
    """Successful certification: constants, thresholds, and their minimum.

    The guarantee applies to sampling periods strictly below
    ``eps_hat``.  ``lam`` is the decay rate of the sampled error
    sequence; between samples the continuous-time envelope decays at
    ``lam_continuous`` = lam / 2.
    """

    C1: float
    C2: float
    sigma: float
    eps1: float
    eps2: float
    eps3: float
    eps_hat: float
    lam: float
    lam_continuous: float
    provenance: str

    def as_dict(self) -> dict:
        return {
            "C1": self.C1, "C2": self.C2, "sigma": self.sigma,
            "eps1": self.eps1, "eps2": self.eps2, "eps3": self.eps3,
            "eps_hat": self.eps_hat, "lam": self.lam,
            "lam_continuous": self.lam_continuous,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of a certification attempt; ``certificate`` is None on failure."""

    ok: bool
    certificate: Certificate | None
    detail: str


def control_magnitude_constants(scheme: BracketScheme, params: ControllerParams,
                                mu: float) -> tuple[float, float]:
    """Constants (C1, C2) bounding the control: sum_i |u_i(t)| is at most
    C1 ||x - gamma|| + (C2 / sqrt(eps)) sqrt(||x - gamma||)."""
    if mu <= 0:
        raise UsageError(f"mu must be positive, got {mu}")
    c1 = params.alpha * mu * np.sqrt(len(scheme.s1))
    kappa_sum = sum(k ** (2.0 / 3.0) for k in scheme.kappa)
    c2 = 4.0 * np.sqrt(np.pi * mu * params.alpha) * kappa_sum ** 0.75
    return float(c1), float(c2)


def sigma_value(scheme: BracketScheme, params: ControllerParams,
                inputs: CertificateInputs, eps: float) -> float:
    """Remainder constant sigma at a given sampling period.

    sigma bounds the Volterra remainder via
    ||R|| <= sigma * eps^(3/2) * ||x0 - gamma0||^(3/2)
    and grows with eps through the sqrt(eps * delta_prime) terms.
    """
    if eps <= 0:
        raise UsageError(f"eps must be positive, got {eps}")
    c1, c2 = control_magnitude_constants(scheme, params, inputs.mu)
    am = params.alpha * inputs.mu
    inv_sum = 0.0
    for j in range(1, scheme.m + 1):
        inner = sum(k ** (-2.0 / 3.0)
                    for (p, q), k in zip(scheme.s2, scheme.kappa) if q == j)
        inv_sum += inner ** 0.75
    root = np.sqrt(eps * inputs.delta_prime)
    return float(
        inputs.M2 * (2.0 * am ** 1.5 * np.sqrt(len(scheme.s1)) * inv_sum
                     + 0.5 * root * am ** 2)
        + inputs.M3 * (c2 + c1 * root) ** 3)


def bound_constants(sys: ControlSystem, scheme: BracketScheme,
                    params: ControllerParams,
                    inputs: CertificateInputs) -> CertificationReport:
    """Compute the certificate for a first-order bracket scheme.

    The thresholds eps1 and eps3 come out of closed forms; eps2 depends
    on sigma, which itself depends on eps, so the pair is iterated to a
    fixed point starting from eps1 (at most 20 rounds).  Failure to
    converge, or a non-positive fixed point, yields an unsuccessful
    report rather than an exception.
    """
    if scheme.degree2:
        raise UnsupportedSchemeError(
            "certification covers direct fields and first-order brackets only")
    if not scheme.s1:
        raise UnsupportedSchemeError(
            "certification needs at least one directly actuated direction")
    if scheme.m != sys.m:
        raise UsageError(f"scheme is for m={scheme.m}, system has m={sys.m}")
    alpha = params.alpha
    if inputs.nu / alpha >= inputs.rho_prime:
        raise UsageError(
            f"need nu/alpha < rho_prime, got {inputs.nu / alpha:.6g} >= "
            f"{inputs.rho_prime:.6g}; increase alpha or widen the inner tube")
    lam_max = alpha - inputs.nu / inputs.rho_prime
    if inputs.lam >= lam_max:
        raise UsageError(
            f"lam must lie in (0, alpha - nu/rho_prime) = (0, {lam_max:.6g}), "
            f"got {inputs.lam}")

    c1, c2 = control_magnitude_constants(scheme, params, inputs.mu)
    L = max(inputs.L, L_FLOOR)
    d = min(inputs.delta_prime - inputs.delta,
            (inputs.rho - inputs.rho_prime) / 2.0)
    big_k = np.log1p(d * L / inputs.M1) / L
    # Positive root of C1 z^2 + C2 z = K, rationalized.
    z1 = 2.0 * big_k / (c2 + np.sqrt(c2 ** 2 + 4.0 * c1 * big_k))
    eps1_drift = (inputs.rho - inputs.rho_prime) / (2.0 * inputs.nu) \
        if inputs.nu > 0 else np.inf
    eps1 = min(eps1_drift, z1 ** 2 / inputs.delta_prime)
    # Positive root of z^2 + (C2/C1) z = 1/L.
    z3 = np.sqrt(c2 ** 2 / (4.0 * c1 ** 2) + 1.0 / L) - c2 / (2.0 * c1)
    eps3 = z3 ** 2 / inputs.delta_prime

    rate = inputs.lam + inputs.nu / inputs.rho_prime

    def eps2_of(sig: float) -> float:
        cap = 1.0 / rate
        if sig <= 0:
            return cap
        gap = (alpha - inputs.lam) / sig - inputs.nu / (sig * inputs.rho_prime)
        return min(gap ** 2 / inputs.delta_prime, cap)

    eps = eps1
    converged = False
    for _ in range(20):
        sig = sigma_value(scheme, params, inputs, eps)
        eps_new = min(eps1, eps3, eps2_of(sig))
        if not np.isfinite(eps_new) or eps_new <= 0:
            return CertificationReport(
                ok=False, certificate=None,
                detail=f"threshold recursion left the positive range (eps={eps_new})")
        if abs(eps_new - eps) <= 1e-12 * eps_new:
            eps = eps_new
            converged = True
            break
        eps = eps_new
    if not converged:
        return CertificationReport(
            ok=False, certificate=None,
            detail="sigma-eps recursion did not reach a fixed point in 20 rounds")

    sig = sigma_value(scheme, params, inputs, eps)
    eps2 = eps2_of(sig)
    slack = 1.0 + 1e-9
    if not (eps <= eps1 * slack and eps <= eps2 * slack and eps <= eps3 * slack):
        return CertificationReport(
            ok=False, certificate=None,
            detail=f"fixed point eps={eps:.6g} fails validation against "
                   f"(eps1, eps2, eps3)=({eps1:.6g}, {eps2:.6g}, {eps3:.6g})")
    cert = Certificate(
        C1=c1, C2=c2, sigma=sig, eps1=float(eps1), eps2=float(eps2),
        eps3=float(eps3), eps_hat=float(eps), lam=inputs.lam,
        lam_continuous=inputs.lam / 2.0, provenance=inputs.provenance)
    return CertificationReport(ok=True, certificate=cert, detail="certified")


class SupBounds(NamedTuple):
    """Sampled sup bounds over the delta_prime tube, safety-inflated."""

    M1: float
    M2: float
    M3: float
    L: float
    mu: float


def estimate_sup_bounds(sys: ControlSystem, scheme: BracketScheme,
                        curve: ReferenceCurve, *, delta_prime: float,
                        horizon: float, n_samples: int = 10_000,
                        seed: int = 0, inflation: float = 1.1) -> SupBounds:
    """Monte-Carlo sup bounds over the tube of radius delta_prime.

    Samples x = gamma(t) + radius * direction with t uniform on the
    horizon and radius distributed so points fill the ball uniformly.
    Second Lie derivatives are taken by central differences along the
    field directions.  All five outputs carry the inflation factor; the
    certificate they feed should be labeled "empirical".
    """
    if delta_prime <= 0 or horizon <= 0:
        raise UsageError("delta_prime and horizon must be positive")
    if n_samples < 1:
        raise UsageError("need at least one sample")
    rng = np.random.default_rng(seed)
    n = sys.n
    ts = rng.uniform(0.0, horizon, n_samples)
    dirs = rng.normal(size=(n_samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = delta_prime * rng.uniform(0.0, 1.0, n_samples) ** (1.0 / n)
    xs = np.asarray(curve.eval(ts), dtype=float) + radii[:, None] * dirs

    m1 = m2 = m3 = lip = mu = 0.0
    for x in xs:
        if not sys.in_domain(x):
            raise CertificationError(
                f"tube sample {x} leaves the system domain; "
                "shrink delta_prime or the horizon")
        vals = np.stack([f.eval(x) for f in sys.fields])
        jacs = np.stack([f.jacobian(x) for f in sys.fields])
        m1 = max(m1, float(np.max(np.linalg.norm(vals, axis=1))))
        lip = max(lip, float(np.max(np.linalg.svd(jacs, compute_uv=False)[:, 0])))
        # L_{f_j} f_i = Jf_i @ f_j for every ordered pair.
        first = np.einsum("ikl,jl->ijk", jacs, vals)
        m2 = max(m2, float(np.max(np.linalg.norm(first, axis=2))))

        # Directional derivative of x -> (L_{f_j2} f_j1)(x) along f_j3.
        total = 0.0
        for j3 in range(sys.m):
            w = vals[j3]
            wn = np.linalg.norm(w)
            if wn == 0.0:
                continue
            step = 1e-5 * max(1.0, float(np.linalg.norm(x)))
            offset = (step / wn) * w
            xp, xm = x + offset, x - offset
            vp = np.stack([f.eval(xp) for f in sys.fields])
            jp = np.stack([f.jacobian(xp) for f in sys.fields])
            vm = np.stack([f.eval(xm) for f in sys.fields])
            jm = np.stack([f.jacobian(xm) for f in sys.fields])
            gp = np.einsum("ikl,jl->ijk", jp, vp)
            gm = np.einsum("ikl,jl->ijk", jm, vm)
            deriv = (gp - gm) * (wn / (2.0 * step))
            total += float(np.sum(np.linalg.norm(deriv, axis=2)))
        m3 = max(m3, total / 6.0)

        try:
            gain = build_gain_matrix(sys, scheme, x)
        except RankConditionError as exc:
            raise CertificationError(
                f"gain matrix singular inside the tube at {x}; "
                "certification impossible for this curve and radius") from exc
        mu = max(mu, 1.0 / float(np.linalg.svd(gain, compute_uv=False)[-1]))

    return SupBounds(M1=inflation * m1, M2=inflation * m2, M3=inflation * m3,
                     L=inflation * lip, mu=inflation * mu)


@dataclass(frozen=True)
class VolterraReport:
    """One-interval remainder against the certified bound."""

    residual_norm: float
    bound: float
    margin: float
    ok: bool
    epsilon: float
    initial_error_norm: float


def volterra_residual(sys: ControlSystem, scheme: BracketScheme,
                      params: ControllerParams, x0: np.ndarray,
                      gamma0: np.ndarray, traj: Trajectory, *,
                      sigma: float) -> VolterraReport:
    """Check ||x(eps) - x0 + eps*alpha*(x0 - gamma0)|| against the sigma bound.

    The trajectory must start at (x0, gamma0) and contain at least one
    full sampling interval.
    """
    x0 = np.asarray(x0, dtype=float)
    gamma0 = np.asarray(gamma0, dtype=float)
    if traj.times.size <= traj.substeps:
        raise UsageError("trajectory does not contain a full sampling interval")
    if abs(traj.epsilon - params.epsilon) > 1e-12 * max(1.0, params.epsilon):
        raise UsageError("trajectory was recorded with a different epsilon")
    if not np.allclose(traj.states[0], x0, atol=1e-9) or \
            not np.allclose(traj.reference[0], gamma0, atol=1e-9):
        raise UsageError("trajectory does not start at the given (x0, gamma0)")

    eps = params.epsilon
    x_eps = traj.states[traj.substeps]
    residual = x_eps - x0 + eps * params.alpha * (x0 - gamma0)
    err0 = float(np.linalg.norm(x0 - gamma0))
    r_norm = float(np.linalg.norm(residual))
    bound = float(sigma * eps ** 1.5 * err0 ** 1.5)
    return VolterraReport(
        residual_norm=r_norm, bound=bound, margin=bound - r_norm,
        ok=r_norm <= bound * (1.0 + 1e-12) + 1e-15,
        epsilon=eps, initial_error_norm=err0)


@dataclass(frozen=True)
class VolterraScalingReport:
    """Residual norms across a grid of sampling periods, with fitted slope."""

    epsilons: tuple[float, ...]
    residual_norms: tuple[float, ...]
    exponent: float
    reports: tuple[VolterraReport, ...]


def volterra_scaling(sys: ControlSystem, scheme: BracketScheme, alpha: float,
                     epsilons: Sequence[float], curve: ReferenceCurve,
                     x0: np.ndarray, *, sigma: float,
                     substeps: int | None = None) -> VolterraScalingReport:
    """One-interval residuals over several eps values and their log-log slope."""
    if len(epsilons) < 2:
        raise UsageError("need at least two epsilon values to fit a slope")
    reports = []
    for eps in epsilons:
        params = ControllerParams(alpha=alpha, epsilon=eps)
        traj = simulate(sys, scheme, params, curve, x0,
                        SamplerGrid(eps, eps, substeps=substeps))
        reports.append(volterra_residual(
            sys, scheme, params, x0, np.asarray(curve.eval(0.0), dtype=float),
            traj, sigma=sigma))
    norms = [rep.residual_norm for rep in reports]
    slope = float(np.polyfit(np.log(list(epsilons)), np.log(norms), 1)[0])
    return VolterraScalingReport(
        epsilons=tuple(float(e) for e in epsilons),
        residual_norms=tuple(norms), exponent=slope, reports=tuple(reports))


@dataclass(frozen=True)
class GrowthReport:
    """Interval growth bound ||x(t) - x(t_j)|| <= (M1/L)(e^(U L tau) - 1)."""

    ok: bool
    min_margin: float
    interval_margins: np.ndarray
    u_sups: np.ndarray


def lemma1_growth_check(sys: ControlSystem, traj: Trajectory, M1: float,
                        L: float, tol: float = 1e-8) -> GrowthReport:
    """Verify the growth bound pointwise on every interval of a trajectory.

    U is the largest l1 control norm recorded on the interval; since the
    oscillating components complete whole periods, the grid maxima cover
    the continuous sup up to grid resolution.  The bound is evaluated in
    the expm1 form M1*U*tau*(expm1(z)/z), which passes smoothly through
    the constant-field limit L -> 0.
    """
    if M1 <= 0:
        raise UsageError(f"M1 must be positive, got {M1}")
    L = max(L, L_FLOOR)
    rows = traj.times.size
    margins = []
    u_sups = []
    for start in range(0, rows - 1, traj.substeps):
        end = min(start + traj.substeps, rows - 1)
        u_sup = float(np.max(np.sum(np.abs(traj.controls[start:end]), axis=1)))
        tau = traj.times[start + 1:end + 1] - traj.times[start]
        disp = np.linalg.norm(traj.states[start + 1:end + 1] - traj.states[start],
                              axis=1)
        z = L * u_sup * tau
        # An overflowing exponential makes the bound vacuously true; the
        # margin comes out +inf for those rows, which is correct.
        with np.errstate(over="ignore"):
            phi = np.where(z > 0, np.expm1(z) / np.where(z > 0, z, 1.0), 1.0)
            bound = M1 * u_sup * tau * phi
        margins.append(float(np.min(bound - disp)))
        u_sups.append(u_sup)
    interval_margins = np.asarray(margins)
    min_margin = float(np.min(interval_margins)) if margins else 0.0
    return GrowthReport(ok=bool(min_margin >= -tol), min_margin=min_margin,
                        interval_margins=interval_margins,
                        u_sups=np.asarray(u_sups))


@dataclass(frozen=True)
class ContractionReport:
    """One-step contraction statistics over random annulus draws."""

    n_draws: int
    n_pass: int
    failed_indices: tuple[int, ...]
    epsilon: float
    worst_violation: float


def contraction_check(sys: ControlSystem, scheme: BracketScheme,
                      params: ControllerParams, curve: ReferenceCurve,
                      *, lam: float, nu: float, rho_prime: float, delta: float,
                      n_draws: int = 100, seed: int = 0,
                      substeps: int | None = None) -> ContractionReport:
    """Test ||x(eps)-gamma(eps)|| <= ||e0||(1 - eps(lam + nu/rho')) + eps*nu.

    Draws x0 = gamma(0) + radius * direction with radius uniform on
    (rho_prime, delta) and direction uniform on the sphere, then runs a
    single sampling interval per draw.
    """
    if not 0 < rho_prime < delta:
        raise UsageError("need 0 < rho_prime < delta")
    rng = np.random.default_rng(seed)
    gamma0 = np.asarray(curve.eval(0.0), dtype=float)
    eps = params.epsilon
    factor = 1.0 - eps * (lam + nu / rho_prime)
    failed = []
    worst = 0.0
    for i in range(n_draws):
        direction = rng.normal(size=sys.n)
        direction /= np.linalg.norm(direction)
        radius = rng.uniform(rho_prime, delta)
        x0 = gamma0 + radius * direction
        traj = simulate(sys, scheme, params, curve, x0,
                        SamplerGrid(eps, eps, substeps=substeps))
        lhs = float(np.linalg.norm(traj.states[-1]
                                   - np.asarray(curve.eval(eps), dtype=float)))
        rhs = radius * factor + eps * nu
        if lhs > rhs + 1e-12:
            failed.append(i)
            worst = max(worst, lhs - rhs)
    return ContractionReport(n_draws=n_draws, n_pass=n_draws - len(failed),
                             failed_indices=tuple(failed), epsilon=eps,
                             worst_violation=worst)
