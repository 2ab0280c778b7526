"""
Polynomial algebra behind the ADRC design.

--> Conventions

    Polynomials are numpy.polynomial.Polynomial objects, coefficients in
    ascending degree order, trailing zeros trimmed. Characteristic
    polynomials are never factored: poles are inputs (PoleSpec) and every
    polynomial is built by multiplying out (s + s_j)^d_j, which keeps
    integer pole values exact until the final float conversion.

--> Families

    g_n(s) = sum_i ( sum_{j<=i} beta_j k_{n+1-i+j} ) s^(n-i)
    g_i(s) = sum_{l<=i} k_{n-i+l+1} s^l,        i < n
    with beta_0 = k_{n+1} = 1, so every g_i is monic of degree i.

--> Residues

    For a strictly proper g/Delta the coefficient c[j][k] multiplies
    1/(s + s_j)^k. They are computed from the Taylor expansion of
    g(s) / prod_{l != j}(s + s_l)^d_l around s = -s_j, obtained by power
    series division of the two Taylor coefficient lists. Floats are
    converted to Fractions first: close poles make the residues large and
    of alternating sign, so float division cancels away their digits.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import Polynomial

from utils.exception_handler import PolynomialException

## Instantiate Logger
logger = logging.getLogger(__name__)

Poly = Polynomial

# Distinct poles closer than this (relative to the largest pole) are rejected
POLE_SEPARATION_TOL = 1e-9


def make_poly(coeffs):
    """Polynomial from ascending coefficients with trailing zeros removed."""
    coeffs = list(coeffs) if not isinstance(coeffs, Polynomial) else list(coeffs.coef)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        coeffs = [0]
    return Polynomial(np.asarray(coeffs, dtype=float))


def degree(poly):
    """Degree with the zero polynomial reported as -1."""
    coef = make_poly(poly).coef
    if len(coef) == 1 and coef[0] == 0:
        return -1
    return len(coef) - 1


def expand_factors(factors):
    """
    Exact expansion of prod (s + s_j)^d_j.

    Arithmetic stays in Python numbers so integer or Fraction poles give
    exact coefficients. Returns the ascending coefficient list.
    """
    coeffs = [1]
    for s_j, d_j in factors:
        for _ in range(d_j):
            shifted = [0] + coeffs
            scaled = [s_j * c for c in coeffs] + [0]
            coeffs = [a + b for a, b in zip(shifted, scaled)]
    return coeffs


@dataclass(frozen=True)
class PoleSpec:
    """
    Hurwitz pole placement, Delta(s) = prod (s + s_j)^d_j.

    poles: tuple of (s_j, d_j) with s_j > 0 real and d_j >= 1 integer.
    Complex poles are not supported.
    """

    poles: tuple

    def __post_init__(self):
        pairs = tuple((p[0], int(p[1])) for p in self.poles)
        if not pairs:
            raise PolynomialException("Pole spec needs at least one pole")

        for s_j, d_j in pairs:
            if not np.isfinite(float(s_j)) or s_j <= 0:
                raise PolynomialException(f"Pole value {s_j} is not a positive real (Hurwitz)")
            if d_j < 1:
                raise PolynomialException(f"Multiplicity {d_j} of pole {s_j} must be >= 1")

        values = [float(s) for s, _ in pairs]
        scale = max(values)
        for a in range(len(values)):
            for b in range(a + 1, len(values)):
                gap = abs(values[a] - values[b])
                if gap == 0:
                    raise PolynomialException(f"Duplicate pole value {values[a]}; use a multiplicity instead")
                if gap < POLE_SEPARATION_TOL * scale:
                    raise PolynomialException(
                        f"Poles {values[a]} and {values[b]} are nearly coincident; merge them explicitly"
                    )

        object.__setattr__(self, "poles", pairs)

    @classmethod
    def from_bandwidth(cls, omega_c, n):
        return cls(((omega_c, n),))

    @property
    def degree(self):
        return sum(d for _, d in self.poles)

    @property
    def values(self):
        return tuple(float(s) for s, _ in self.poles)

    @property
    def slowest(self):
        return min(self.values)

    def others(self, j):
        return tuple(p for idx, p in enumerate(self.poles) if idx != j)

    def to_list(self):
        return [[s, d] for s, d in self.poles]


@dataclass(frozen=True)
class CharPoly:
    """Delta(s) and its gain row K = [k_1, ..., k_n] (Delta = s^n + k_n s^(n-1) + ... + k_1)."""

    spec: PoleSpec
    coeffs: tuple

    @property
    def n(self):
        return len(self.coeffs) - 1

    @property
    def delta(self):
        return make_poly(self.coeffs)

    @property
    def K(self):
        return tuple(self.coeffs[:-1])

    def __call__(self, s):
        return self.delta(s)

    def closed_loop_matrix(self):
        """A* = A - B K^T in companion form."""
        return companion_matrix(self.K)


def companion_matrix(K):
    n = len(K)
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -np.asarray(K, dtype=float)
    return A


def char_poly(spec):
    """Monic Delta(s) = prod (s + s_j)^d_j together with the gain row K."""
    coeffs = expand_factors(spec.poles)
    logger.debug(f"Characteristic polynomial for {spec.poles}: {coeffs}")
    return CharPoly(spec=spec, coeffs=tuple(coeffs))


def leso_gains(order, omega_o):
    """beta_i = C(order, i) * omega_o^i, i = 1..order, i.e. (s + omega_o)^order."""
    if int(order) != order or order < 2:
        raise PolynomialException(f"LESO order must be an integer >= 2, got {order}")
    if not omega_o > 0:
        raise PolynomialException(f"Observer bandwidth must be positive, got {omega_o}")

    order = int(order)
    return tuple(math.comb(order, i) * omega_o**i for i in range(1, order + 1))


def build_g_family(K, beta, n):
    """
    The polynomials g_0..g_n of the tracking error decomposition.

    Returns a list indexed by i, so family[i] is g_i.
    """
    if len(K) != n:
        raise PolynomialException(f"Gain row has {len(K)} entries, plant order is {n}")
    if len(beta) < n:
        raise PolynomialException(f"Observer gain vector has {len(beta)} entries, needs at least {n}")

    k = [None] + list(K) + [1]
    b = [1] + list(beta)

    family = []
    for i in range(n):
        family.append(make_poly([k[n - i + l + 1] for l in range(i + 1)]))

    g_n = [0] * (n + 1)
    for i in range(n + 1):
        g_n[n - i] = sum(b[j] * k[n + 1 - i + j] for j in range(i + 1))
    family.append(make_poly(g_n))

    return family


@dataclass(frozen=True)
class ResidueTable:
    """
    Partial fraction coefficients of g_{n-i}(s) / Delta(s).

    rows[i][j][k-1] is c[i][j][k], the coefficient of 1/(s + s_j)^k.
    """

    spec: PoleSpec
    rows: dict

    def row(self, i):
        return self.rows[i]

    def reconstruct(self, i, s):
        return reconstruct(self.rows[i], self.spec, s)


def _exact_coeffs(poly):
    """Ascending Fraction coefficients of a Polynomial or a plain coefficient list."""
    coeffs = poly.coef if isinstance(poly, Polynomial) else poly
    exact = [Fraction(float(c)) if isinstance(c, (float, np.floating)) else Fraction(c) for c in coeffs]
    while len(exact) > 1 and exact[-1] == 0:
        exact.pop()
    return exact


def _taylor(coeffs, x0, count):
    """First count Taylor coefficients of the polynomial around x0."""
    return [
        sum(math.comb(k, m) * coeffs[k] * x0 ** (k - m) for k in range(m, len(coeffs)))
        for m in range(count)
    ]


def residues(numerator, spec, exact=False):
    """
    Residue column of a strictly proper numerator over Delta.

    Returns a tuple over poles j, each a tuple of c[j][k] for k = 1..d_j.
    The arithmetic is carried out in Fractions; exact=True returns them
    as Fractions, otherwise they are rounded to floats once at the end.
    """
    num = _exact_coeffs(numerator)
    num_degree = -1 if num == [0] else len(num) - 1
    if num_degree >= spec.degree:
        raise PolynomialException(
            f"Numerator degree {num_degree} is not below denominator degree {spec.degree}; strip the polynomial part first"
        )

    poles = tuple((Fraction(s_j), d_j) for s_j, d_j in spec.poles)

    column = []
    for j, (s_j, d_j) in enumerate(poles):
        rest = expand_factors(p for idx, p in enumerate(poles) if idx != j)
        x0 = -s_j

        num_taylor = _taylor(num, x0, d_j)
        rest_taylor = _taylor(rest, x0, d_j)

        series = []
        for m in range(d_j):
            acc = num_taylor[m] - sum(rest_taylor[q] * series[m - q] for q in range(1, m + 1))
            series.append(acc / rest_taylor[0])

        # series[m] multiplies (s + s_j)^(m - d_j)
        column.append(tuple(series[d_j - k] for k in range(1, d_j + 1)))

    if exact:
        return tuple(column)
    return tuple(tuple(float(c) for c in coeffs) for coeffs in column)


def residue_table(g_family, spec):
    """Residue rows i = 1..n for the numerators g_{n-i}."""
    n = spec.degree
    if len(g_family) != n + 1:
        raise PolynomialException(f"Expected g_0..g_{n}, got {len(g_family)} polynomials")
    return ResidueTable(spec=spec, rows={i: residues(g_family[n - i], spec) for i in range(1, n + 1)})


def reconstruct(column, spec, s):
    """sum_j sum_k c[j][k] / (s + s_j)^k at (possibly complex) points s."""
    s = np.asarray(s)
    total = np.zeros_like(s, dtype=complex if np.iscomplexobj(s) else float)
    for (s_j, _), coeffs in zip(spec.poles, column):
        for k, c in enumerate(coeffs, start=1):
            total = total + c / (s + s_j) ** k
    return total


def evaluate_exact(coeffs, s):
    """Horner evaluation of ascending coefficients at a rational point."""
    s = Fraction(s)
    total = Fraction(0)
    for c in reversed(_exact_coeffs(coeffs)):
        total = total * s + c
    return total


def reconstruct_exact(column, spec, s):
    """reconstruct() in Fractions, for exact residue columns and rational s."""
    s = Fraction(s)
    total = Fraction(0)
    for (s_j, _), coeffs in zip(spec.poles, column):
        base = s + Fraction(s_j)
        for k, c in enumerate(coeffs, start=1):
            total += Fraction(c) / base**k
    return total


def decay_poly_column(column):
    """p_j(tau) = sum_k c[j][k] tau^(k-1) / (k-1)! for each pole j."""
    return tuple(
        make_poly([c / math.factorial(k - 1) for k, c in enumerate(coeffs, start=1)]) for coeffs in column
    )


def decay_polys(table, spec=None):
    """p_{i,j} for every residue row, keyed like the table rows."""
    if spec is not None and spec != table.spec:
        raise PolynomialException("Residue table was computed for a different pole spec")
    return {i: decay_poly_column(column) for i, column in table.rows.items()}


def inverse_transform(column, spec, tau):
    """sum_j exp(-s_j tau) p_j(tau), the impulse response of the residue column."""
    tau = np.asarray(tau, dtype=float)
    total = np.zeros_like(tau)
    for s_j, p_j in zip(spec.values, decay_poly_column(column)):
        total = total + np.exp(-s_j * tau) * p_j(tau)
    return total
