import logging

import numpy as np

from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)


def adrc_law(e_hat, K, b):
    """
    u = (-k_1 e_hat_1 - ... - k_n e_hat_n - e_hat_{n+1}) / b

    Only the first n + 1 estimates enter the law; the higher extended states
    of a longer observer shape its estimation but not the control.
    """
    if b == 0:
        raise ConfigException("b", "input gain must be nonzero")

    n = len(K)
    if len(e_hat) < n + 1:
        raise ConfigException("e_hat", f"need at least {n + 1} estimates, got {len(e_hat)}")

    return float((-np.dot(K, e_hat[:n]) - e_hat[n]) / b)


def clamp(u, limit):
    """Actuator saturation at +-limit; no limit when None."""
    if limit is None:
        return u
    return float(min(max(u, -limit), limit))
