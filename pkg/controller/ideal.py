import logging
from dataclasses import dataclass

import numpy as np

from utils.exception_handler import ConfigException
from utils.integrators import rk4_step

## Instantiate Logger
logger = logging.getLogger(__name__)


@dataclass
class IdealTrajectory:
    """
    Closed loop response the real plant is measured against.

        x*' = A x* + B ( -K^T (x* - r) + r_{n+1} ),   x*(t0) = x(t0)

    so e* = x* - r decays with the poles of Delta and never sees the
    disturbance.
    """

    x_star: np.ndarray
    K: tuple
    t: float = 0.0

    def __post_init__(self):
        self.x_star = np.array(self.x_star, dtype=float)
        if self.x_star.shape != (len(self.K),):
            raise ConfigException("ideal.x_star", f"expected {len(self.K)} entries, got {self.x_star.size}")

    @classmethod
    def from_plant(cls, plant, K):
        return cls(x_star=plant.tracked_state, K=tuple(K), t=plant.t)

    @property
    def n(self):
        return len(self.K)


def ideal_step(traj, ref, dt):
    """One RK4 step of the ideal system; returns the new x*."""
    if dt <= 0:
        raise ConfigException("dt", f"step must be positive, got {dt}")

    n = traj.n
    K = np.asarray(traj.K, dtype=float)

    def fn(t, x):
        r = ref.derivatives(t, n + 1)
        dx = np.empty_like(x)
        dx[:-1] = x[1:]
        dx[-1] = -K @ (x - r[:n]) + r[n]
        return dx

    traj.x_star = rk4_step(fn, traj.t, traj.x_star, dt)
    traj.t = traj.t + dt
    return traj.x_star
