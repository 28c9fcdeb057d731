"""Jacobi polynomials of the second kind and wavefunction coefficients.

``G_n(p, q, z)`` follows Abramowitz & Stegun 22.2.2: monic polynomials on
(0, 1), orthogonal under ``z**(q-1) * (1-z)**(p-q)``. They are evaluated
through the classical Jacobi polynomials on [-1, 1]::

    G_n(p, q, z) = n! / (n+p)_n * P_n^(p-q, q-1)(2z - 1)

where ``(x)_n`` is the rising factorial. ``P_n`` itself comes from the
standard three-term recurrence, both as float values and as ``Poly``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .poly import Poly


class WeightError(ValueError):
    """Raised when a Jacobi weight is not integrable on its interval."""


class CoefficientError(ValueError):
    """Raised when a printed normalization formula hits a gamma pole."""


@dataclass(frozen=True)
class ShiftedJacobiParams:
    p: float
    q: float

    @property
    def alpha(self) -> float:
        """Classical exponent attached to ``(1 - x)``, i.e. to ``(1 - z)``."""
        return self.p - self.q

    @property
    def beta(self) -> float:
        """Classical exponent attached to ``(1 + x)``, i.e. to ``z``."""
        return self.q - 1.0

    def check(self) -> None:
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise WeightError(
                f"non-integrable exponents: p-q={self.alpha:g}, q-1={self.beta:g}"
            )

    @classmethod
    def from_exponents(cls, z_exp: float, one_minus_z_exp: float) -> "ShiftedJacobiParams":
        q = z_exp + 1.0
        return cls(p=one_minus_z_exp + q, q=q)


def _recurrence_coeffs(n: int, a: float, b: float) -> tuple[float, float, float, float]:
    # 2n(n+a+b)(2n+a+b-2) P_n = (2n+a+b-1)[(2n+a+b)(2n+a+b-2) x + a^2-b^2] P_{n-1}
    #                           - 2(n+a-1)(n+b-1)(2n+a+b) P_{n-2}
    s = 2 * n + a + b
    lead = 2 * n * (n + a + b) * (s - 2)
    slope = (s - 1) * s * (s - 2)
    offset = (s - 1) * (a * a - b * b)
    back = 2 * (n + a - 1) * (n + b - 1) * s
    return lead, slope, offset, back


def jacobi_p(n: int, alpha: float, beta: float, x):
    """Classical Jacobi polynomial ``P_n^(alpha, beta)`` evaluated at ``x``."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p_cur = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        lead, slope, offset, back = _recurrence_coeffs(k, alpha, beta)
        p_prev, p_cur = p_cur, ((slope * x + offset) * p_cur - back * p_prev) / lead
    return p_cur if p_cur.ndim else float(p_cur)


def jacobi_p_poly(n: int, alpha: float, beta: float, x: Poly | None = None) -> Poly:
    """``P_n^(alpha, beta)`` as a polynomial in the variable underlying ``x``.

    ``x`` defaults to the identity polynomial; passing an affine ``Poly``
    yields the shifted polynomial without a separate composition step.
    """
    if x is None:
        x = Poly([0.0, 1.0])
    p_prev = Poly([1.0])
    if n == 0:
        return p_prev
    p_cur = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        lead, slope, offset, back = _recurrence_coeffs(k, alpha, beta)
        p_prev, p_cur = p_cur, ((slope * x + offset) * p_cur - back * p_prev) / lead
    return p_cur


def _monic_factor(n: int, p: float) -> float:
    if n == 0:
        return 1.0
    rising = special.poch(n + p, n)
    if rising == 0.0 or not np.isfinite(rising):
        raise WeightError(f"degenerate normalization for n={n}, p={p:g}")
    return math.factorial(n) / rising


def jacobi_g(n: int, params: ShiftedJacobiParams, z):
    """Evaluate ``G_n(p, q, z)`` for ``z`` in [0, 1]; ``G_0 = 1``."""
    params.check()
    if n == 0:
        z = np.asarray(z, dtype=float)
        out = np.ones_like(z)
        return out if out.ndim else 1.0
    x = 2.0 * np.asarray(z, dtype=float) - 1.0
    return _monic_factor(n, params.p) * jacobi_p(n, params.alpha, params.beta, x)


def jacobi_g_poly(n: int, params: ShiftedJacobiParams) -> Poly:
    params.check()
    return _monic_factor(n, params.p) * jacobi_p_poly(
        n, params.alpha, params.beta, Poly([-1.0, 2.0])
    )


def jacobi_weight(params: ShiftedJacobiParams, z):
    z = np.asarray(z, dtype=float)
    return z ** (params.q - 1.0) * (1.0 - z) ** (params.p - params.q)


def _log_factorial(x: float) -> tuple[float, float]:
    """``(log|x!|, sign(x!))`` with ``x!`` read as ``Gamma(x + 1)``."""
    arg = x + 1.0
    if arg <= 0 and float(arg).is_integer():
        raise CoefficientError(f"coefficient undefined: ({x:g})! is a gamma pole")
    return float(special.gammaln(arg)), float(special.gammasgn(arg))


def stp_coefficient(n_bar: int, delta1: float) -> float:
    """Printed squared-tangent normalization ``C_nbar`` (defined for nbar >= 2)."""
    if n_bar < 2:
        raise CoefficientError(f"printed coefficient needs n_bar >= 2, got {n_bar}")
    h = delta1 / 2.0
    l1, s1 = _log_factorial(n_bar - 1)
    l2, s2 = _log_factorial(n_bar - 2 + h)
    l3, s3 = _log_factorial(2 * n_bar - 2 + h)
    radicand = n_bar * (n_bar - 1 + h) / (2 * n_bar - 1 + h)
    if radicand < 0:
        raise CoefficientError("coefficient undefined: negative radicand")
    return s1 * s2 * s3 * math.exp(l1 + l2 - l3) * math.sqrt(radicand)


def ptp_coefficient(n: int, mu: float) -> float:
    """Printed Poschl-Teller normalization ``C_n`` with the factorials as gammas."""
    l1, s1 = _log_factorial(n + mu)
    l2, s2 = _log_factorial((2 * n + 2 * mu - 1) + 1)
    l3, s3 = _log_factorial(n)
    l4, s4 = _log_factorial(n + 2 * mu)
    inner_sign = s3 * s4
    denom = 2 * n + 2 * mu + 1
    if inner_sign * denom < 0:
        raise CoefficientError("coefficient undefined: negative radicand")
    root = math.exp(0.5 * (l3 + l4 - math.log(abs(denom))))
    return s1 * s2 * math.exp(l1 - l2) * root
