import logging
from dataclasses import dataclass, field

import numpy as np

from plant.disturbance import ConstantDisturbance
from utils.exception_handler import ConfigException, DivergenceException
from utils.integrators import all_finite, rk4_step

## Instantiate Logger
logger = logging.getLogger(__name__)

# Input gain of the motion stage, k_a k_s / m
DEFAULT_B = 3.25


@dataclass
class ChainPlant:
    """
    n-th order integrator chain with lumped disturbance on the last state.

    --> Dynamics

        x_i' = x_{i+1},  i < n
        x_n' = b u + f(t, x)
        y    = x_1
    """

    n: int = 2
    b: float = DEFAULT_B
    disturbance: object = field(default_factory=ConstantDisturbance)
    x: np.ndarray = None
    t: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigException("plant.n", f"order must be a positive integer, got {self.n}")
        if self.b == 0:
            raise ConfigException("plant.b", "input gain must be nonzero")

        self.n = int(self.n)
        self.x = np.zeros(self.n) if self.x is None else np.array(self.x, dtype=float)
        if self.x.shape != (self.n,):
            raise ConfigException("plant.initial_state", f"expected {self.n} entries, got {self.x.size}")

    @property
    def y(self):
        return float(self.x[0])

    @property
    def tracked_state(self):
        """Plant state in the coordinates of the ideal trajectory."""
        return self.x.copy()

    def rhs(self, u):
        def fn(t, x):
            dx = np.empty_like(x)
            dx[:-1] = x[1:]
            dx[-1] = self.b * u + self.disturbance(t, x)
            return dx

        return fn

    def step(self, u, dt):
        return chain_step(self, u, dt)

    def total_disturbance(self, r_next):
        return self.disturbance(self.t, self.x) - r_next

    def true_errors(self, ref_values, count):
        """
        Ground truth e_1..e_count in tracking-error coordinates.

        e_i = x_i - r_i for i <= n and e_{n+1+q} = f^(q)(t) - r_{n+1+q} beyond,
        ref_values holding r_1..r_count.
        """
        e = np.empty(count)
        for i in range(count):
            if i < self.n:
                e[i] = self.x[i] - ref_values[i]
            else:
                e[i] = self.disturbance.derivative(self.t, i - self.n) - ref_values[i]
        return e


def chain_step(plant, u, dt):
    """One RK4 step with u held; returns y after the step."""
    if dt <= 0:
        raise ConfigException("dt", f"step must be positive, got {dt}")

    x_next = rk4_step(plant.rhs(u), plant.t, plant.x, dt)
    if not all_finite(x_next):
        raise DivergenceException(f"Chain plant state became non-finite at t={plant.t + dt:.6g}: {x_next}")

    plant.x = x_next
    plant.t = plant.t + dt
    return plant.y


def total_disturbance_probe(plant, r_next):
    """Exact lumped disturbance e_{n+1} = f - r_{n+1} the observers are estimating."""
    if not all_finite(plant.x):
        raise DivergenceException("Plant state is non-finite, no disturbance to probe")
    return plant.total_disturbance(r_next)
