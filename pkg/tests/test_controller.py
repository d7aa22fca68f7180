"""Coefficient solves and the oscillating control law."""

import numpy as np
import pytest

from osctrack import (
    BracketScheme,
    CoefficientVector,
    ControllerParams,
    ControlSystem,
    DimensionMismatchError,
    NestedBracketTerm,
    UsageError,
    VectorField,
    build_gain_matrix,
    coefficients,
    control,
    control_degree1,
    control_degree2,
    control_profile,
    make_control_function,
)

from test_systems import car_fields, unicycle_fields


@pytest.fixture
def unicycle():
    f1, f2 = unicycle_fields()
    sys = ControlSystem(3, 2, (f1, f2), name="unicycle")
    scheme = BracketScheme(m=2, s1=(1, 2), s2=((1, 2),), kappa=(1,))
    return sys, scheme


@pytest.fixture
def car():
    f1, f2 = car_fields()
    sys = ControlSystem(4, 2, (f1, f2),
                        domain=lambda x: abs(x[2]) < np.pi / 2, name="car")
    scheme = BracketScheme(m=2, s1=(1, 2), s2=((1, 2),), kappa=(3,),
                           degree2=(NestedBracketTerm((1, 2, 1), 1, 2),))
    return sys, scheme


def test_params_validation():
    with pytest.raises(UsageError):
        ControllerParams(alpha=0.0, epsilon=0.1)
    with pytest.raises(UsageError):
        ControllerParams(alpha=1.0, epsilon=-0.1)


def test_unicycle_coefficients_closed_form(unicycle):
    """Orthogonal gain matrix gives projections of -alpha * error."""
    sys, scheme = unicycle
    params = ControllerParams(alpha=15.0, epsilon=0.1)
    rng = np.random.default_rng(7)
    for _ in range(25):
        x = rng.normal(size=3)
        gamma = rng.normal(size=3)
        c = coefficients(sys, scheme, params, x, gamma)
        e1, e2, e3 = x - gamma
        th = x[2]
        expected = -params.alpha * np.array([
            e1 * np.cos(th) + e2 * np.sin(th),
            e3,
            e1 * np.sin(th) - e2 * np.cos(th),
        ])
        assert np.allclose(c.values, expected, atol=1e-10)


def test_coefficient_spot_value(unicycle):
    sys, scheme = unicycle
    params = ControllerParams(alpha=15.0, epsilon=0.1)
    c = coefficients(sys, scheme, params, np.array([1.0, 0.0, 0.0]), np.zeros(3))
    assert np.allclose(c.values, [-15.0, 0.0, 0.0], atol=1e-12)


def test_coefficient_round_trip(car):
    """Gain matrix times the solved coefficients reproduces -alpha * error."""
    sys, scheme = car
    params = ControllerParams(alpha=5.0, epsilon=0.5)
    rng = np.random.default_rng(8)
    for _ in range(25):
        x = rng.normal(size=4)
        x[2] = rng.uniform(-1.0, 1.0)
        gamma = rng.normal(size=4)
        c = coefficients(sys, scheme, params, x, gamma)
        gain = build_gain_matrix(sys, scheme, x)
        assert np.allclose(gain @ c.values, -params.alpha * (x - gamma), atol=1e-10)


def test_car_coefficient_spot_value(car):
    sys, scheme = car
    params = ControllerParams(alpha=5.0, epsilon=0.5)
    c = coefficients(sys, scheme, params, np.array([8.0, 0.0, 0.0, 0.0]), np.zeros(4))
    assert np.allclose(c.values, [-40.0, 0.0, 0.0, 0.0], atol=1e-12)
    assert c.first_order.shape == (2,)
    assert c.pair.shape == (1,)
    assert c.nested.shape == (1,)


def test_coefficient_vector_shape_check(unicycle):
    _, scheme = unicycle
    with pytest.raises(DimensionMismatchError):
        CoefficientVector(np.zeros(5), scheme)


def test_coefficients_shape_mismatch(unicycle):
    sys, scheme = unicycle
    params = ControllerParams(alpha=1.0, epsilon=0.1)
    with pytest.raises(DimensionMismatchError):
        coefficients(sys, scheme, params, np.zeros(3), np.zeros(4))


def test_degree1_control_spot_values(unicycle):
    _, scheme = unicycle
    eps = 0.1
    params = ControllerParams(alpha=15.0, epsilon=eps)
    a1, a2, a12 = 2.0, -1.0, -3.0
    c = CoefficientVector(np.array([a1, a2, a12]), scheme)
    u = make_control_function(scheme, params, c)
    amp = np.sqrt(4 * np.pi / eps) * np.sqrt(abs(a12))

    assert np.allclose(u(0.0), [a1 + amp, a2], atol=1e-12)
    # Quarter period: cosine gone, sine at full strength with the sign of a12.
    assert np.allclose(u(eps / 4), [a1, a2 - amp], atol=1e-9)
    assert np.allclose(u(eps / 2), [a1 - amp, a2], atol=1e-9)
    assert np.allclose(u(eps), u(0.0), atol=1e-9)


def test_zero_pair_coefficient_is_silent(unicycle):
    _, scheme = unicycle
    params = ControllerParams(alpha=15.0, epsilon=0.1)
    c = CoefficientVector(np.array([1.5, 0.5, 0.0]), scheme)
    ts = np.linspace(0, 0.1, 101)
    prof = control_profile(scheme, params, c, ts)
    assert np.all(np.isfinite(prof))
    assert np.allclose(prof, np.array([1.5, 0.5]), atol=1e-14)


def test_amplitude_scales_inverse_sqrt_epsilon(unicycle):
    _, scheme = unicycle
    c = CoefficientVector(np.array([0.0, 0.0, 1.0]), scheme)
    u_a = make_control_function(scheme, ControllerParams(15.0, 0.4), c)
    u_b = make_control_function(scheme, ControllerParams(15.0, 0.1), c)
    # Halving epsilon twice doubles the oscillation amplitude.
    assert np.isclose(u_b(0.0)[0], 2.0 * u_a(0.0)[0], rtol=1e-12)


def test_degree2_control_spot_values(car):
    """Nested term drives both channels through one shared cube-root amplitude."""
    _, scheme = car
    eps = 0.5
    params = ControllerParams(alpha=5.0, epsilon=eps)
    a121 = -2.0
    c = CoefficientVector(np.array([1.0, -0.5, 0.0, a121]), scheme)
    amp = np.cbrt(16 * np.pi ** 2 * (2 ** 2 - 1 ** 2) * a121 / eps ** 2)
    assert amp < 0

    u = make_control_function(scheme, params, c)
    assert np.allclose(u(0.0), [1.0 + amp, -0.5], atol=1e-12)
    # At t = eps/8 the second harmonic peaks and the first sits at pi/4.
    t = eps / 8
    expected = [1.0 + amp * np.cos(np.pi / 4) * 2.0, -0.5 + amp]
    assert np.allclose(u(t), expected, atol=1e-9)


def test_degree2_amplitude_scales_epsilon_power(car):
    _, scheme = car
    c = CoefficientVector(np.array([0.0, 0.0, 0.0, 1.0]), scheme)
    u_a = make_control_function(scheme, ControllerParams(5.0, 0.8), c)
    u_b = make_control_function(scheme, ControllerParams(5.0, 0.1), c)
    # epsilon / 8 multiplies the nested amplitude by 8^(2/3) = 4.
    assert np.isclose(u_b(0.0)[0], 4.0 * u_a(0.0)[0], rtol=1e-12)


def test_oscillations_average_out(car):
    """Mean control over one full period is exactly the static part."""
    _, scheme = car
    eps = 0.5
    params = ControllerParams(alpha=5.0, epsilon=eps)
    c = CoefficientVector(np.array([0.7, -0.2, 1.3, -0.8]), scheme)
    ts = np.linspace(0.0, eps, 4097)
    prof = control_profile(scheme, params, c, ts)
    means = np.trapezoid(prof, ts, axis=0) / eps
    assert np.allclose(means, [0.7, -0.2], atol=1e-9)


def test_profile_matches_pointwise_closure(car):
    _, scheme = car
    params = ControllerParams(alpha=5.0, epsilon=0.5)
    c = CoefficientVector(np.array([0.3, 0.9, -1.1, 0.4]), scheme)
    u = make_control_function(scheme, params, c)
    ts = np.random.default_rng(9).uniform(0, 2, size=50)
    prof = control_profile(scheme, params, c, ts)
    stacked = np.stack([u(t) for t in ts])
    assert np.allclose(prof, stacked, atol=1e-12)


def test_control_degree1_spot_value(unicycle):
    _, scheme = unicycle
    params = ControllerParams(alpha=15.0, epsilon=0.1)
    c = CoefficientVector(np.array([2.0, 0.0, 0.25]), scheme)
    u = control_degree1(scheme, params, 0.0, c)
    assert np.allclose(u, [2.0 + np.sqrt(10 * np.pi), 0.0], atol=1e-12)


def test_control_degree1_matches_closure(unicycle):
    """On a pair-only scheme the closure is exactly the degree-1 sum."""
    _, scheme = unicycle
    params = ControllerParams(alpha=15.0, epsilon=0.1)
    c = CoefficientVector(np.array([0.6, -1.2, 0.8]), scheme)
    u = make_control_function(scheme, params, c)
    for t in (0.0, 0.021, 0.05, 0.4):
        assert np.allclose(control_degree1(scheme, params, t, c), u(t), atol=1e-12)


def test_control_degree2_spot_value_and_split(car):
    _, scheme = car
    eps = 0.5
    params = ControllerParams(alpha=5.0, epsilon=eps)
    c = CoefficientVector(np.array([0.0, 0.0, 0.0, -1.0]), scheme)
    # Degree-1 evaluation never sees the nested coefficient.
    assert np.allclose(control_degree1(scheme, params, 0.0, c), [0.0, 0.0], atol=1e-14)
    u = control_degree2(scheme, params, 0.0, c)
    assert np.allclose(u, [-np.cbrt(192 * np.pi ** 2), 0.0], atol=1e-12)

    full = make_control_function(scheme, params, c)
    for t in (0.0, 0.07, 0.125, 1.3):
        assert np.allclose(control_degree2(scheme, params, t, c), full(t), atol=1e-12)


def test_control_dispatcher_matches_composition(unicycle):
    sys, scheme = unicycle
    params = ControllerParams(alpha=15.0, epsilon=0.1)
    x = np.array([0.4, -0.2, 0.6])
    gamma = np.array([0.1, 0.1, 0.0])
    c = coefficients(sys, scheme, params, x, gamma)
    u = make_control_function(scheme, params, c)
    for t in (0.0, 0.037, 0.1):
        assert np.allclose(control(sys, scheme, params, t, x, gamma), u(t), atol=1e-14)


def test_phases_use_absolute_time(unicycle):
    """The trig arguments never reset: u(t + eps) = u(t) for any t."""
    _, scheme = unicycle
    eps = 0.1
    params = ControllerParams(alpha=15.0, epsilon=eps)
    c = CoefficientVector(np.array([0.2, -0.4, 0.9]), scheme)
    u = make_control_function(scheme, params, c)
    for t in (0.013, 1.77, 12.4):
        assert np.allclose(u(t + eps), u(t), atol=1e-7)
