"""
Estimation error bounds of the binomial-gain LESO.

--> Scaled error

    With epsilon_i = e_tilde_i / omega_o^(i-1) the error obeys

        epsilon' = omega_o A_tilde epsilon + B_tilde e_{n+1}^(m) / omega_o^(N-1)

    where A_tilde has -alpha_i in the first column and ones on the
    superdiagonal, alpha_i = beta_i / omega_o^i.

--> Bounds, for t > t0 and 1 <= i <= N

    |e_tilde_i(t)|    <= omega_o^(i-1) ||exp(omega_o A_tilde (t-t0))|| ||epsilon(t0)|| + (h1 + h2) G_i / omega_o^(N-i+1)
    ||epsilon(t)||    <= ||exp(omega_o A_tilde (t-t0))|| ||epsilon(t0)|| + (h1 + h2) G / omega_o^N

    G_i = sum_{j<i} C(N-i+j, N-i), G = max_i G_i. All norms are infinity norms.
"""

import logging
import math

import numpy as np
from scipy.linalg import expm

from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)


def lemma1_Gi(n_plus_m, i):
    if not 1 <= i <= n_plus_m:
        raise ConfigException("i", f"state index must lie in 1..{n_plus_m}, got {i}")
    return sum(math.comb(n_plus_m - i + j, n_plus_m - i) for j in range(i))


def lemma1_G(n_plus_m):
    return max(lemma1_Gi(n_plus_m, i) for i in range(1, n_plus_m + 1))


def scaled_matrix(cfg):
    """A_tilde of the scaled error system."""
    N = cfg.order
    A = np.zeros((N, N))
    A[:-1, 1:] = np.eye(N - 1)
    A[:, 0] = -cfg.alpha
    return A


def homogeneous_norm(cfg, tau):
    """||exp(omega_o A_tilde tau)||_inf for scalar or array tau."""
    A = cfg.omega_o * scaled_matrix(cfg)
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    norms = np.array([np.linalg.norm(expm(A * value), ord=np.inf) for value in taus])
    return norms if np.ndim(tau) else float(norms[0])


def lemma1_bound(cfg, eps0_norm, h1, h2, t, i, t0=0.0):
    """Bound on |e_tilde_i(t)|, scalar or array t."""
    if not cfg.omega_o > 0:
        raise ConfigException("observer.omega_o", f"bandwidth must be positive, got {cfg.omega_o}")

    N = cfg.order
    tail = (h1 + h2) * lemma1_Gi(N, i) / cfg.omega_o ** (N - i + 1)
    if eps0_norm == 0:
        return np.full(np.shape(t), tail) if np.ndim(t) else tail

    return cfg.omega_o ** (i - 1) * homogeneous_norm(cfg, np.asarray(t) - t0) * eps0_norm + tail


def lemma1_eps_bound(cfg, eps0_norm, h1, h2, t, t0=0.0):
    """Bound on ||epsilon(t)||_inf, scalar or array t."""
    N = cfg.order
    tail = (h1 + h2) * lemma1_G(N) / cfg.omega_o**N
    if eps0_norm == 0:
        return np.full(np.shape(t), tail) if np.ndim(t) else tail

    return homogeneous_norm(cfg, np.asarray(t) - t0) * eps0_norm + tail


def reference_bound(reference, count, horizon=None):
    """h2 = max over 1 <= i <= count of sup |r_i| (r_i the (i-1)th derivative)."""
    return max(reference.sup_derivative(order, horizon) for order in range(count))
