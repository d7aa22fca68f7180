"""Three benchmark systems with analytic fields and ready-to-run defaults.

Each scenario bundles a control system (with hand-written Jacobians), the
bracket scheme that makes its gain matrix square, default controller
parameters, a default reference curve name, a default initial state, and
a simulation horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controller import ControllerParams
from .errors import UsageError
from .systems import BracketScheme, ControlSystem, NestedBracketTerm, VectorField


@dataclass(frozen=True)
class Scenario:
    name: str
    system: ControlSystem
    scheme: BracketScheme
    default_params: ControllerParams
    default_curve: str
    default_x0: np.ndarray
    horizon: float


def unicycle() -> Scenario:
    """Kinematic unicycle: planar position plus heading, m = 2.

    u1 drives forward speed, u2 the heading rate.  Sideways motion is
    unlocked through the bracket of the two fields, so the scheme pairs
    (1, 2) at unit frequency.  The gain matrix is orthogonal everywhere,
    which makes this the cleanest system for certification studies.
    """
    f1 = VectorField(
        dim=3,
        eval=lambda x: np.array([np.cos(x[2]), np.sin(x[2]), 0.0]),
        jacobian=lambda x: np.array([
            [0.0, 0.0, -np.sin(x[2])],
            [0.0, 0.0, np.cos(x[2])],
            [0.0, 0.0, 0.0],
        ]),
        name="forward",
    )
    f2 = VectorField(
        dim=3,
        eval=lambda x: np.array([0.0, 0.0, 1.0]),
        jacobian=lambda x: np.zeros((3, 3)),
        name="turn",
    )
    system = ControlSystem(n=3, m=2, fields=(f1, f2), name="unicycle")
    scheme = BracketScheme(m=2, s1=(1, 2), s2=((1, 2),), kappa=(1,))
    return Scenario(
        name="unicycle",
        system=system,
        scheme=scheme,
        default_params=ControllerParams(alpha=15.0, epsilon=0.1),
        default_curve="gamma1",
        default_x0=np.array([0.0, 0.0, 1.0]),
        horizon=40.0,
    )


def underwater_vehicle() -> Scenario:
    """Six-state kinematic underwater vehicle.

    States are the center of mass (x1, x2, x3) and Euler angles
    (x4, x5, x6); u1 is the translational speed along the body axis and
    u2..u4 are angular rates.  The pitch singularity keeps the domain at
    |x5| < pi/2.  Lateral and vertical translation come from the
    brackets [f1, f3] and [f1, f4] at frequencies 1 and 2; u2 stays
    unoscillated because channel 2 sits in no bracket pair.
    """
    def f1_eval(x):
        c5, s5 = np.cos(x[4]), np.sin(x[4])
        c6, s6 = np.cos(x[5]), np.sin(x[5])
        return np.array([c5 * c6, c5 * s6, -s5, 0.0, 0.0, 0.0])

    def f1_jac(x):
        c5, s5 = np.cos(x[4]), np.sin(x[4])
        c6, s6 = np.cos(x[5]), np.sin(x[5])
        jac = np.zeros((6, 6))
        jac[0, 4] = -s5 * c6
        jac[0, 5] = -c5 * s6
        jac[1, 4] = -s5 * s6
        jac[1, 5] = c5 * c6
        jac[2, 4] = -c5
        return jac

    def f3_eval(x):
        c4, s4 = np.cos(x[3]), np.sin(x[3])
        return np.array([0.0, 0.0, 0.0, s4 * np.tan(x[4]), c4,
                         s4 / np.cos(x[4])])

    def f3_jac(x):
        c4, s4 = np.cos(x[3]), np.sin(x[3])
        t5 = np.tan(x[4])
        sec5 = 1.0 / np.cos(x[4])
        jac = np.zeros((6, 6))
        jac[3, 3] = c4 * t5
        jac[3, 4] = s4 * sec5 ** 2
        jac[4, 3] = -s4
        jac[5, 3] = c4 * sec5
        jac[5, 4] = s4 * sec5 * t5
        return jac

    def f4_eval(x):
        c4, s4 = np.cos(x[3]), np.sin(x[3])
        return np.array([0.0, 0.0, 0.0, c4 * np.tan(x[4]), -s4,
                         c4 / np.cos(x[4])])

    def f4_jac(x):
        c4, s4 = np.cos(x[3]), np.sin(x[3])
        t5 = np.tan(x[4])
        sec5 = 1.0 / np.cos(x[4])
        jac = np.zeros((6, 6))
        jac[3, 3] = -s4 * t5
        jac[3, 4] = c4 * sec5 ** 2
        jac[4, 3] = -c4
        jac[5, 3] = -s4 * sec5
        jac[5, 4] = c4 * sec5 * t5
        return jac

    fields = (
        VectorField(dim=6, eval=f1_eval, jacobian=f1_jac, name="surge"),
        VectorField(dim=6, eval=lambda x: np.array([0., 0., 0., 1., 0., 0.]),
                    jacobian=lambda x: np.zeros((6, 6)), name="roll"),
        VectorField(dim=6, eval=f3_eval, jacobian=f3_jac, name="pitch"),
        VectorField(dim=6, eval=f4_eval, jacobian=f4_jac, name="yaw"),
    )
    system = ControlSystem(
        n=6, m=4, fields=fields,
        domain=lambda x: bool(abs(x[4]) < np.pi / 2),
        name="underwater",
    )
    scheme = BracketScheme(m=4, s1=(1, 2, 3, 4), s2=((1, 3), (1, 4)),
                           kappa=(1, 2))
    return Scenario(
        name="underwater",
        system=system,
        scheme=scheme,
        default_params=ControllerParams(alpha=15.0, epsilon=0.1),
        default_curve="gamma4_underwater",
        default_x0=np.array([0.0, 0.0, -1.0, np.pi / 4, np.pi / 4, np.pi / 4]),
        horizon=40.0,
    )


def rear_wheel_car() -> Scenario:
    """Rear-wheel driving car, a degree-two system.

    States: rear-axle position (x1, x2), steering angle x3, heading x4.
    Sideways translation needs the nested bracket [[f1, f2], f1], so the
    scheme carries a degree-two term for the triple (1, 2, 1) on top of
    the first-order pair.  The three oscillators run at pairwise
    distinct frequencies (3 for the pair, 1 and 2 for the triple).
    """
    f1 = VectorField(
        dim=4,
        eval=lambda x: np.array([np.cos(x[3]), np.sin(x[3]), 0.0,
                                 np.tan(x[2])]),
        jacobian=lambda x: np.array([
            [0.0, 0.0, 0.0, -np.sin(x[3])],
            [0.0, 0.0, 0.0, np.cos(x[3])],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0 / np.cos(x[2]) ** 2, 0.0],
        ]),
        name="drive",
    )
    f2 = VectorField(
        dim=4,
        eval=lambda x: np.array([0.0, 0.0, 1.0, 0.0]),
        jacobian=lambda x: np.zeros((4, 4)),
        name="steer",
    )
    system = ControlSystem(
        n=4, m=2, fields=(f1, f2),
        domain=lambda x: bool(abs(x[2]) < np.pi / 2),
        name="car",
    )
    scheme = BracketScheme(
        m=2, s1=(1, 2), s2=((1, 2),), kappa=(3,),
        degree2=(NestedBracketTerm(triple=(1, 2, 1), k1=1, k2=2),),
    )
    return Scenario(
        name="car",
        system=system,
        scheme=scheme,
        default_params=ControllerParams(alpha=5.0, epsilon=0.5),
        default_curve="gamma4_car",
        default_x0=np.array([8.0, 0.0, 0.0, 0.0]),
        horizon=60.0,
    )


SCENARIO_REGISTRY = {
    "unicycle": unicycle,
    "underwater": underwater_vehicle,
    "car": rear_wheel_car,
}


def get_scenario(name: str) -> Scenario:
    try:
        factory = SCENARIO_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIO_REGISTRY))
        raise UsageError(f"unknown scenario {name!r}; known scenarios: {known}") \
            from None
    return factory()
