"""
Tracking error relations between z and e_bar_1.

--> Initial condition gap

    z(t) - e_bar_1(t) = sum_{i=2..n} sum_j exp(-s_j tau) p_{i,j}(tau) e_tilde_i(t0),  tau = t - t0

    p_{i,j} built from the residues of g_{n-i} / Delta. The sum is empty for
    estimation errors that start at zero and decays with the slowest pole.

--> Closed loop bound

    |e_bar_1(t)| <= ||exp(A* tau)||_inf ||e_bar(t0)||_inf
                    + sum_j sum_{k<=d_j} |c_{n,j,k}| / s_j^k * Delta(omega_o) * gamma(t, t0)

    The second term is the L1 norm of the impulse response of 1 / Delta
    (row i = n, numerator g_0 = 1) times the bound Delta(omega_o) gamma on
    the control error k_1 e_tilde_1 + ... + k_n e_tilde_n + e_tilde_{n+1}.
"""

import logging

import numpy as np
from scipy.linalg import expm

from algebra.polynomials import char_poly, inverse_transform

## Instantiate Logger
logger = logging.getLogger(__name__)


def theorem1_gap(table, e_tilde_t0, t, t0=0.0):
    """z - e_bar_1 from the initial estimation errors; e_tilde_t0[i-1] is e_tilde_i(t0)."""
    n = table.spec.degree
    tau = np.asarray(t, dtype=float) - t0
    gap = np.zeros_like(tau)
    for i in range(2, n + 1):
        if e_tilde_t0[i - 1] != 0:
            gap = gap + inverse_transform(table.rows[i], table.spec, tau) * e_tilde_t0[i - 1]
    return gap if np.ndim(t) else float(gap)


def theorem2_gain(spec, residue_row_n, omega_o):
    """Coefficient multiplying gamma in the closed loop bound."""
    l1_norm = sum(
        abs(c) / s_j**k for s_j, coeffs in zip(spec.values, residue_row_n) for k, c in enumerate(coeffs, start=1)
    )
    return l1_norm * float(char_poly(spec).delta(omega_o))


def theorem2_bound(spec, residue_row_n, omega_o, ebar_t0_norm, gamma, t, t0=0.0):
    """Bound on |e_bar_1(t)|; gamma may be an array aligned with t."""
    tail = theorem2_gain(spec, residue_row_n, omega_o) * np.asarray(gamma, dtype=float)
    if ebar_t0_norm == 0:
        return tail if np.ndim(tail) else float(tail)

    A_star = char_poly(spec).closed_loop_matrix()
    taus = np.atleast_1d(np.asarray(t, dtype=float) - t0)
    head = np.array([np.linalg.norm(expm(A_star * tau), ord=np.inf) for tau in taus]) * ebar_t0_norm
    bound = head + tail
    return bound if np.ndim(t) or np.ndim(gamma) else float(bound[0])
