"""
Rigid-flexible coupling (RFC) motion stage surrogate.

--> Structure

    The working stage (mass m_s) is driven by the actuator and hangs on
    flexure hinges (k, c) from a rigid frame (mass m_f). Only the frame
    touches the guideway, so only the frame sees friction:

        m_s a_s =  k_a k_s u + k (x_f - x_s) + c (v_f - v_s)
        m_f a_f = -k (x_f - x_s) - c (v_f - v_s) - F_friction(v_f)

    The measured output is the stage position x_s. Seen from the stage the
    plant is a double integrator with b = k_a k_s / m_s and the lumped
    disturbance (k d_x + c d_v) / m_s, d_x = x_f - x_s, d_v = v_f - v_s.

--> Friction (Karnopp)

    The mode is decided once per step from the state at the start of it.
    Stuck: |v_f| < v_dead and the flexure force on the frame is within
    F_static. The frame velocity is zeroed and the frame is frozen for the
    step. Slip: F = F_c + (F_s - F_c) exp(-(v/v_s)^2) opposing a direction
    fixed for the step, plus viscous sigma v. A slip step that carries v_f
    through zero ends with v_f = 0.

--> Defaults

    The mechanical and friction values below are surrogate defaults chosen
    to give a plausible desk scale stage with k_a k_s / m_s = 3.25. They are
    not identified from hardware and every one is configurable.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from plant.disturbance import ConstantDisturbance
from utils.exception_handler import ConfigException, DivergenceException
from utils.integrators import all_finite, rk4_step

## Instantiate Logger
logger = logging.getLogger(__name__)

# Surrogate Stage Default Values
STAGE_MASS = 2.0
FRAME_MASS = 5.0
FLEXURE_STIFFNESS = 4.0e4
FLEXURE_DAMPING = 40.0
FORCE_GAIN = 6.5

# Surrogate Friction Default Values
COULOMB_FORCE = 8.0
STATIC_FORCE = 12.0
STRIBECK_VELOCITY = 0.002
VISCOUS_COEFF = 10.0
DEAD_VELOCITY = 1.0e-4


@dataclass(frozen=True)
class FrictionParams:
    coulomb: float = COULOMB_FORCE
    static: float = STATIC_FORCE
    stribeck_velocity: float = STRIBECK_VELOCITY
    viscous: float = VISCOUS_COEFF
    dead_velocity: float = DEAD_VELOCITY

    def __post_init__(self):
        if not self.static >= self.coulomb >= 0:
            raise ConfigException("plant.friction", f"need static >= coulomb >= 0, got {self.static} / {self.coulomb}")
        if self.stribeck_velocity <= 0 and self.static != self.coulomb:
            raise ConfigException("plant.friction.stribeck_velocity", "must be positive when static > coulomb")
        if self.viscous < 0:
            raise ConfigException("plant.friction.viscous", "must be nonnegative")
        if self.dead_velocity < 0:
            raise ConfigException("plant.friction.dead_velocity", "must be nonnegative")

    def slip_force(self, v, direction):
        """Friction on the frame while sliding in the given direction (+1 / -1)."""
        magnitude = self.coulomb
        if self.static != self.coulomb:
            magnitude += (self.static - self.coulomb) * math.exp(-((v / self.stribeck_velocity) ** 2))
        return -direction * magnitude - self.viscous * v

    def scaled(self, scale):
        return replace(self, coulomb=self.coulomb * scale, static=self.static * scale)

    @classmethod
    def frictionless(cls):
        return cls(coulomb=0.0, static=0.0, stribeck_velocity=0.0, viscous=0.0, dead_velocity=0.0)


@dataclass
class RfcPlant:
    stage_mass: float = STAGE_MASS
    frame_mass: float = FRAME_MASS
    stiffness: float = FLEXURE_STIFFNESS
    damping: float = FLEXURE_DAMPING
    force_gain: float = FORCE_GAIN
    friction: FrictionParams = field(default_factory=FrictionParams)
    frame_locked: bool = False
    disturbance: object = field(default_factory=ConstantDisturbance)
    state: np.ndarray = None
    t: float = 0.0

    n = 2

    def __post_init__(self):
        for name in ("stage_mass", "frame_mass", "stiffness"):
            if not getattr(self, name) > 0:
                raise ConfigException(f"plant.{name}", f"must be strictly positive, got {getattr(self, name)}")
        if self.damping < 0:
            raise ConfigException("plant.damping", "must be nonnegative")
        if self.force_gain == 0:
            raise ConfigException("plant.force_gain", "must be nonzero")

        self.state = np.zeros(4) if self.state is None else np.array(self.state, dtype=float)
        if self.state.shape != (4,):
            raise ConfigException("plant.initial_state", f"expected (x_s, v_s, x_f, v_f), got {self.state.size} entries")

    @property
    def b(self):
        return self.force_gain / self.stage_mass

    @property
    def y(self):
        return float(self.state[0])

    @property
    def x(self):
        return self.state[:2]

    @property
    def tracked_state(self):
        return self.state[:2].copy()

    def flexure_force(self, state):
        """Force the flexures put on the stage; the frame feels the opposite."""
        x_s, v_s, x_f, v_f = state
        return self.stiffness * (x_f - x_s) + self.damping * (v_f - v_s)

    def step(self, u, dt):
        return rfc_step(self, u, dt)

    def total_disturbance(self, r_next):
        return self.flexure_force(self.state) / self.stage_mass + self.disturbance(self.t, self.x) - r_next


def _friction_mode(plant, state):
    """Karnopp decision for the coming step: ("locked"|"stuck"|"slip", direction)."""
    if plant.frame_locked:
        return "locked", 0.0

    friction = plant.friction
    v_f = state[3]
    if abs(v_f) < friction.dead_velocity or v_f == 0:
        at_rest = state.copy()
        at_rest[3] = 0.0
        applied = -plant.flexure_force(at_rest)
        if abs(applied) <= friction.static:
            return "stuck", 0.0
        return "slip", math.copysign(1.0, applied)

    return "slip", math.copysign(1.0, v_f)


def rfc_step(plant, u, dt):
    """One RK4 step of the stage and frame with u held; returns y = x_s."""
    if dt <= 0:
        raise ConfigException("dt", f"step must be positive, got {dt}")

    state = plant.state.copy()
    mode, direction = _friction_mode(plant, state)
    if mode == "stuck":
        state[3] = 0.0

    def fn(t, x):
        spring = plant.flexure_force(x)
        a_s = (plant.force_gain * u + spring) / plant.stage_mass + plant.disturbance(t, x[:2])
        if mode != "slip":
            return np.array([x[1], a_s, 0.0, 0.0])
        a_f = (-spring + plant.friction.slip_force(x[3], direction)) / plant.frame_mass
        return np.array([x[1], a_s, x[3], a_f])

    state_next = rk4_step(fn, plant.t, state, dt)
    if mode == "slip" and state_next[3] * direction < 0:
        state_next[3] = 0.0

    if not all_finite(state_next):
        raise DivergenceException(f"RFC stage state became non-finite at t={plant.t + dt:.6g}: {state_next}")

    plant.state = state_next
    plant.t = plant.t + dt
    return plant.y
