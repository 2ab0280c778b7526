"""
Linear extended state observer in tracking-error coordinates.

--> Observer of order N = n + m

    e_hat_i'  = e_hat_{i+1} + beta_i (e_1 - e_hat_1),          i != n, i < N
    e_hat_n'  = e_hat_{n+1} + beta_n (e_1 - e_hat_1) + b u
    e_hat_N'  = beta_N (e_1 - e_hat_1)

    beta comes from (s + omega_o)^N, so every observer pole sits at -omega_o.
    e_hat_{n+1} estimates the total disturbance f - r_{n+1}; the states after
    it estimate its derivatives.

--> Sampling

    The plant output is only known at the sample instants. The default step
    holds the newest sample over the step; passing the previous sample as
    well integrates with the straight line between the two. u is always held.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from algebra.polynomials import leso_gains
from utils.exception_handler import ConfigException, ObserverDivergedException
from utils.integrators import all_finite, rk4_step

## Instantiate Logger
logger = logging.getLogger(__name__)

# Observer Default Values
DEFAULT_OMEGA_O = 1500.0
DEFAULT_B = 3.25

# Relative tolerance when comparing supplied gains with the binomial ones
GAIN_MATCH_RTOL = 1e-12


@dataclass(frozen=True)
class LesoConfig:
    n: int = 2
    m: int = 1
    omega_o: float = DEFAULT_OMEGA_O
    b: float = DEFAULT_B
    beta: tuple = None
    initial_estimates: tuple = ()
    allow_nonbinomial: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigException("observer.n", f"plant order must be a positive integer, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise ConfigException("observer.order", f"extension order must be >= 1, got order {self.n + self.m}")
        if not self.omega_o > 0:
            raise ConfigException("observer.omega_o", f"bandwidth must be positive, got {self.omega_o}")
        if self.b == 0:
            raise ConfigException("observer.b", "input gain must be nonzero")

        binomial = leso_gains(self.order, self.omega_o)
        if self.beta is None:
            object.__setattr__(self, "beta", binomial)
        else:
            beta = tuple(float(value) for value in self.beta)
            if len(beta) != self.order:
                raise ConfigException("observer.beta", f"expected {self.order} gains, got {len(beta)}")
            if not np.allclose(beta, binomial, rtol=GAIN_MATCH_RTOL, atol=0.0):
                if not self.allow_nonbinomial:
                    raise ConfigException(
                        "observer.beta", f"gains {beta} do not match (s + {self.omega_o})^{self.order} = {binomial}"
                    )
                logger.warning(f"Observer uses non-binomial gains {beta} instead of {binomial}")
            object.__setattr__(self, "beta", beta)

        estimates = tuple(float(value) for value in self.initial_estimates)
        if estimates and len(estimates) != self.order - 1:
            raise ConfigException(
                "observer.initial_estimates", f"expected {self.order - 1} values (e_2..e_{self.order}), got {len(estimates)}"
            )
        object.__setattr__(self, "initial_estimates", estimates)

    @property
    def order(self):
        return self.n + self.m

    @cached_property
    def matrices(self):
        """(A - beta C, beta, B b) of the observer error form."""
        N = self.order
        A = np.zeros((N, N))
        A[:-1, 1:] = np.eye(N - 1)
        beta = np.asarray(self.beta, dtype=float)
        A[:, 0] -= beta

        B = np.zeros(N)
        B[self.n - 1] = self.b
        return A, beta, B

    @cached_property
    def alpha(self):
        """alpha_i = beta_i / omega_o^i."""
        return np.array([beta / self.omega_o ** (i + 1) for i, beta in enumerate(self.beta)])

    def with_typo_gains(self):
        """
        The 4th order observer with 6 omega_o^3 in the third gain, the value a
        commonly reproduced display gives instead of the binomial 4 omega_o^3.
        """
        if self.order != 4:
            raise ConfigException("observer.order", "the third-gain variant only exists for 4th order observers")
        beta = list(self.beta)
        beta[2] = 6.0 * self.omega_o**3
        return LesoConfig(
            n=self.n,
            m=self.m,
            omega_o=self.omega_o,
            b=self.b,
            beta=tuple(beta),
            initial_estimates=self.initial_estimates,
            allow_nonbinomial=True,
        )


@dataclass
class LesoState:
    e_hat: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.e_hat = np.array(self.e_hat, dtype=float)


def init_state(cfg, e1_measured, t0=0.0):
    """e_hat_1 starts at the measured e_1, the rest at the configured guesses (zero by default)."""
    rest = cfg.initial_estimates or (0.0,) * (cfg.order - 1)
    return LesoState(e_hat=np.array([e1_measured, *rest], dtype=float), t=t0)


def leso_step(state, cfg, e1_measured, u, dt, e1_previous=None):
    """
    Advance the observer by one control period.

    e1_measured is the sample at the end of the step. With e1_previous given
    the measurement is interpolated linearly over the step, otherwise it is
    held. Raises ObserverDivergedException on a non-finite estimate.
    """
    if dt <= 0:
        raise ConfigException("dt", f"step must be positive, got {dt}")

    A, beta, B = cfg.matrices
    forcing = B * u
    t0 = state.t

    if e1_previous is None:

        def fn(t, x):
            return A @ x + beta * e1_measured + forcing

    else:
        slope = (e1_measured - e1_previous) / dt

        def fn(t, x):
            return A @ x + beta * (e1_previous + slope * (t - t0)) + forcing

    e_hat = rk4_step(fn, t0, state.e_hat, dt)
    if not all_finite(e_hat):
        raise ObserverDivergedException(f"Observer estimate became non-finite at t={t0 + dt:.6g}: {e_hat}")

    return LesoState(e_hat=e_hat, t=t0 + dt)


@dataclass
class ScaledError:
    """epsilon_i = e_tilde_i / omega_o^(i-1) and gamma = running sup of ||epsilon||_inf."""

    omega_o: float
    gamma: float = 0.0
    epsilon: np.ndarray = field(default=None)

    def update(self, e_tilde):
        e_tilde = np.asarray(e_tilde, dtype=float)
        self.epsilon = e_tilde / self.omega_o ** np.arange(e_tilde.size)
        self.gamma = max(self.gamma, float(np.max(np.abs(self.epsilon))))
        return self.epsilon
