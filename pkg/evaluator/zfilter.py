import logging
from dataclasses import dataclass

import numpy as np

from algebra.polynomials import companion_matrix, degree, make_poly
from utils.exception_handler import ConfigException, DivergenceException, PolynomialException
from utils.integrators import all_finite, rk4_step

## Instantiate Logger
logger = logging.getLogger(__name__)

# Allowed deviation of a leading coefficient from 1
MONIC_TOL = 1e-12


@dataclass
class ZFilter:
    """
    Controllable canonical realization of g_n(s) / Delta(s).

    --> Realization

        g_n / Delta = 1 + (g_n - Delta) / Delta, both monic of degree n, so
        the feedthrough is exactly 1 and the strictly proper remainder has
        numerator C (ascending) over the companion matrix A of Delta.

        x' = A x + B e1_tilde
        z  = C x + e1_tilde

    The state starts at zero, which drops the initial condition terms of
    the tracking error; those decay with the poles of Delta.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float = 1.0
    x: np.ndarray = None
    z: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if self.x is None:
            self.x = np.zeros(self.A.shape[0])

    @property
    def n(self):
        return self.A.shape[0]

    def transfer(self, s):
        """C (sI - A)^-1 B + D at a (complex) point s."""
        resolvent = np.linalg.solve(s * np.eye(self.n) - self.A, self.B.astype(complex))
        return complex(self.C @ resolvent + self.D)

    def reset(self, t=0.0):
        self.x = np.zeros(self.n)
        self.z = 0.0
        self.t = t


def make_zfilter(g_n, delta):
    g_n = make_poly(g_n)
    delta = make_poly(delta)
    n = degree(delta)

    if degree(g_n) != n:
        raise PolynomialException(f"g_n has degree {degree(g_n)}, Delta has degree {n}")
    for name, poly in (("g_n", g_n), ("Delta", delta)):
        if abs(poly.coef[-1] - 1.0) > MONIC_TOL:
            raise PolynomialException(f"{name} must be monic, leading coefficient is {poly.coef[-1]}")

    remainder = g_n.coef[:n] - delta.coef[:n]
    B = np.zeros(n)
    B[-1] = 1.0

    logger.debug(f"z filter numerator {remainder} over {delta.coef}")
    return ZFilter(A=companion_matrix(delta.coef[:n]), B=B, C=remainder.copy())


def zfilter_step(zf, e1_tilde, dt, e1_tilde_previous=None):
    """
    Advance the filter one step and return z at the end of it.

    Input handling follows the observer: hold the newest sample, or
    interpolate linearly from e1_tilde_previous when given.
    """
    if dt <= 0:
        raise ConfigException("dt", f"step must be positive, got {dt}")

    t0 = zf.t
    if e1_tilde_previous is None:

        def fn(t, x):
            return zf.A @ x + zf.B * e1_tilde

    else:
        slope = (e1_tilde - e1_tilde_previous) / dt

        def fn(t, x):
            return zf.A @ x + zf.B * (e1_tilde_previous + slope * (t - t0))

    x_next = rk4_step(fn, t0, zf.x, dt)
    z = float(zf.C @ x_next + zf.D * e1_tilde)
    if not (all_finite(x_next) and np.isfinite(z)):
        raise DivergenceException(f"z filter became non-finite at t={t0 + dt:.6g}")

    zf.x = x_next
    zf.z = z
    zf.t = t0 + dt
    return z
