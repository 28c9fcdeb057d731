"""Nikiforov-Uvarov reduction and quantization on polynomial data.

A problem of hypergeometric type::

    psi'' + (tau_t / sigma) psi' + (sigma_t / sigma**2) psi = 0

is factored as ``psi = phi * y`` where ``pi / sigma = (ln phi)'`` and
``tau = tau_t + 2 pi``. ``pi`` is chosen so that the radicand

    ((sigma' - tau_t)/2)**2 - sigma_t + k sigma

is a perfect square, which fixes ``k`` through a quadratic. The energy
then follows from ``lambda = k + pi'`` equal to
``Gamma_n = -n tau' - n(n-1) sigma''/2``.

Everything here works for ``sigma`` with two distinct real roots, which
covers ``z(1-z)`` and ``2z(1-z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .orthopoly import jacobi_p_poly
from .poly import Poly

IDENTITY_RTOL = 1e-12
_SQUARE_RTOL = 1e-10


class NUError(ValueError):
    pass


class NoRealK(NUError):
    def __init__(self, discriminant: float):
        super().__init__(f"no real k (discriminant {discriminant:.6g})")
        self.discriminant = discriminant


class Underdetermined(NUError):
    def __init__(self):
        super().__init__("underdetermined: radicand is a perfect square for every k")


class InvalidK(NUError):
    pass


class UnsupportedSigma(NUError):
    pass


class NonIntegrableWeight(NUError):
    pass


class NoRoot(NUError):
    pass


class AmbiguousBracket(NUError):
    pass


class NoAdmissibleBranch(NUError):
    pass


@dataclass(frozen=True)
class NUProblem:
    sigma: Poly
    sigma_tilde: Poly
    tau_tilde: Poly
    domain: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.sigma.degree > 2 or self.sigma_tilde.degree > 2:
            raise NUError("sigma and sigma_tilde must have degree <= 2")
        if self.tau_tilde.degree > 1:
            raise NUError("tau_tilde must have degree <= 1")
        if self.sigma.degree < 0:
            raise NUError("sigma must be nonzero")
        lo, hi = self.domain
        for r in self.sigma.roots():
            if abs(r.imag) < 1e-14 and lo < r.real < hi:
                raise NUError(f"sigma vanishes inside the domain at z={r.real:g}")

    @property
    def half_gap(self) -> Poly:
        """``(sigma' - tau_tilde) / 2``."""
        return (self.sigma.deriv() - self.tau_tilde) / 2.0

    def radicand(self, k: float) -> Poly:
        h = self.half_gap
        return h * h - self.sigma_tilde + k * self.sigma


@dataclass(frozen=True)
class PiBranch:
    k: float
    pi: Poly
    tau: Poly
    lam: float
    descending: bool


@dataclass(frozen=True)
class BetaWeight:
    """``scale * (z - left_root)**a_exp * (right_root - z)**b_exp``."""

    a_exp: float
    b_exp: float
    left_root: float
    right_root: float
    scale: float = 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return self.scale * (z - self.left_root) ** self.a_exp * (self.right_root - z) ** self.b_exp

    @property
    def integrable(self) -> bool:
        return self.a_exp > -1.0 and self.b_exp > -1.0


def k_candidates(problem: NUProblem) -> list[float]:
    """Real ``k`` making the radicand a perfect square, sorted descending."""
    u = problem.radicand(0.0)
    s = problem.sigma
    u0, u1, u2 = u.coeff(0), u.coeff(1), u.coeff(2)
    s0, s1, s2 = s.coeff(0), s.coeff(1), s.coeff(2)
    # discriminant in z of (u + k s), as a quadratic in k
    qa = s1 * s1 - 4.0 * s2 * s0
    qb = 2.0 * u1 * s1 - 4.0 * u2 * s0 - 4.0 * u0 * s2
    qc = u1 * u1 - 4.0 * u2 * u0
    scale = max(abs(qa), abs(qb), abs(qc), 1e-300)
    if abs(qa) <= 1e-14 * scale:
        if abs(qb) <= 1e-14 * scale:
            if abs(qc) <= 1e-14 * scale:
                raise Underdetermined()
            raise NoRealK(qc)
        return [-qc / qb]
    disc = qb * qb - 4.0 * qa * qc
    if disc < -1e-13 * max(qb * qb, abs(4.0 * qa * qc), 1e-300):
        raise NoRealK(disc)
    root = math.sqrt(max(disc, 0.0))
    if root == 0.0:
        return [-qb / (2.0 * qa)]
    # cancellation-free pair
    w = -0.5 * (qb + math.copysign(root, qb))
    k1, k2 = w / qa, qc / w
    return sorted([k1, k2], reverse=True)


def _square_root_linear(r: Poly, ref_scale: float) -> Poly:
    a0, a1, a2 = r.coeff(0), r.coeff(1), r.coeff(2)
    tol = _SQUARE_RTOL * max(ref_scale, 1e-300)
    if r.degree > 2:
        raise InvalidK("radicand degree exceeds 2")
    if max(a0, a2) <= tol:
        if abs(a1) > tol or min(a0, a2) < -tol:
            raise InvalidK("invalid k: radicand is not a perfect square")
        return Poly([0.0])
    if a0 >= a2:
        g0 = math.sqrt(a0)
        g1 = a1 / (2.0 * g0)
    else:
        g1 = math.sqrt(a2)
        g0 = a1 / (2.0 * g1)
    g = Poly([g0, g1])
    if not (g * g).is_close(r, rtol=0.0, atol=tol):
        raise InvalidK("invalid k: radicand is not a perfect square")
    return g


def pi_branches(problem: NUProblem, k: float) -> list[PiBranch]:
    """Both sign branches of ``pi`` for a given ``k`` (plus sign first)."""
    h = problem.half_gap
    r = problem.radicand(k)
    ref = max((h * h).scale(), problem.sigma_tilde.scale(), abs(k) * problem.sigma.scale())
    g = _square_root_linear(r, ref)
    out = []
    for sgn in (1.0, -1.0):
        pi = h + sgn * g
        tau = problem.tau_tilde + 2.0 * pi
        tau_slope = tau.coeff(1)
        out.append(
            PiBranch(
                k=k,
                pi=pi,
                tau=tau,
                lam=k + pi.coeff(1),
                descending=tau_slope < 0.0,
            )
        )
    return out


def all_branches(problem: NUProblem) -> list[PiBranch]:
    return [b for k in k_candidates(problem) for b in pi_branches(problem, k)]


def lambda_n(branch: PiBranch, sigma: Poly, n: int) -> float:
    """``Gamma_n = -n tau' - n(n-1) sigma'' / 2``."""
    return -n * branch.tau.coeff(1) - n * (n - 1) * sigma.coeff(2)


def sigma_roots(sigma: Poly) -> tuple[float, float, float]:
    """Write ``sigma = c (z - l)(r - z)``; return ``(l, r, c)``."""
    if sigma.degree != 2:
        raise UnsupportedSigma("unsupported sigma shape: degree must be 2")
    s0, s1, s2 = sigma.coeffs
    disc = s1 * s1 - 4.0 * s2 * s0
    if disc <= 0.0:
        raise UnsupportedSigma("unsupported sigma shape: roots not real and distinct")
    root = math.sqrt(disc)
    l, r = sorted(((-s1 - root) / (2 * s2), (-s1 + root) / (2 * s2)))
    return l + 0.0, r + 0.0, -s2


def weight_function(branch: PiBranch, problem: NUProblem) -> BetaWeight:
    """Closed-form solution of ``(sigma rho)' = tau rho`` as a power law."""
    l, r, c = sigma_roots(problem.sigma)
    span = c * (r - l)
    return BetaWeight(
        a_exp=branch.tau(l) / span - 1.0,
        b_exp=-branch.tau(r) / span - 1.0,
        left_root=l,
        right_root=r,
    )


def phi_factor(branch: PiBranch, problem: NUProblem) -> BetaWeight:
    """``phi`` from ``pi / sigma = (ln phi)'`` via partial fractions."""
    l, r, c = sigma_roots(problem.sigma)
    span = c * (r - l)
    return BetaWeight(
        a_exp=branch.pi(l) / span,
        b_exp=-branch.pi(r) / span,
        left_root=l,
        right_root=r,
    )


def rodrigues_poly(weight: BetaWeight, sigma: Poly, n: int) -> Poly:
    """``y_n = (1/rho) d^n/dz^n [sigma^n rho]`` with unit Rodrigues constant.

    Evaluated as ``(-c L)^n n! P_n^(b, a)(2(z-l)/L - 1)`` through the Jacobi
    recurrence, where ``sigma = c (z-l)(r-z)`` and ``L = r - l``.
    """
    if not weight.integrable:
        raise NonIntegrableWeight(
            f"non-integrable weight exponents ({weight.a_exp:g}, {weight.b_exp:g})"
        )
    l, r, c = sigma_roots(sigma)
    if not (math.isclose(l, weight.left_root, abs_tol=1e-12)
            and math.isclose(r, weight.right_root, abs_tol=1e-12)):
        raise UnsupportedSigma("weight and sigma live on different intervals")
    span = r - l
    x = Poly([-1.0 - 2.0 * l / span, 2.0 / span])
    p = jacobi_p_poly(n, weight.b_exp, weight.a_exp, x)
    return ((-c * span) ** n * math.factorial(n)) * p


@dataclass(frozen=True)
class BranchRule:
    """Physical branch selection.

    At a wall end of ``sigma``'s root interval the larger indicial exponent
    of ``phi`` is taken (decay into the wall). A fold end is an interior
    point of the original coordinate mapped onto an end of ``z`` by a
    two-to-one substitution such as ``z = sin^2``; there the smaller root
    gives even states and the larger one odd states. Candidates must also
    satisfy ``tau' < 0`` with ``phi`` and ``rho`` exponents above -1.
    """

    folds: tuple[bool, bool] = (False, False)

    def degree(self, n: int) -> int:
        return n // 2 if any(self.folds) else n

    def parity(self, n: int) -> int:
        return n % 2 if any(self.folds) else 0

    def select(self, problem: NUProblem, n: int) -> PiBranch:
        if all(self.folds):
            raise NUError("at most one fold end is supported")
        branches = all_branches(problem)
        exps = [(phi_factor(b, problem), b) for b in branches]
        a_vals = [f.a_exp for f, _ in exps]
        b_vals = [f.b_exp for f, _ in exps]
        odd = self.parity(n) == 1
        want_a = (max(a_vals) if odd else min(a_vals)) if self.folds[0] else max(a_vals)
        want_b = (max(b_vals) if odd else min(b_vals)) if self.folds[1] else max(b_vals)
        tol = 1e-9 * max(1.0, *map(abs, a_vals + b_vals))
        for f, b in exps:
            if abs(f.a_exp - want_a) <= tol and abs(f.b_exp - want_b) <= tol:
                w = weight_function(b, problem)
                if b.descending and f.integrable and w.integrable:
                    return b
        raise NoAdmissibleBranch(
            f"no branch with tau' < 0 and integrable exponents for n={n}"
        )


Family = Callable[[float], NUProblem]


def _mismatch(family: Family, n: int, rule: BranchRule) -> Callable[[float], float]:
    deg = rule.degree(n)

    def f(energy: float) -> float:
        problem = family(energy)
        try:
            b = rule.select(problem, n)
        except NUError:
            return float("nan")
        return b.lam - lambda_n(b, problem.sigma, deg)

    return f


def _auto_bracket(f: Callable[[float], float]) -> tuple[float, float]:
    f0, f1 = f(0.0), f(1.0)
    if np.isfinite(f0) and np.isfinite(f1) and f1 != f0:
        guess = -f0 / (f1 - f0)
    else:
        guess = 0.0
    width = max(1.0, abs(guess)) * 1e-3
    for _ in range(80):
        lo, hi = guess - width, guess + width
        flo, fhi = f(lo), f(hi)
        if np.isfinite(flo) and np.isfinite(fhi) and flo * fhi <= 0.0:
            return lo, hi
        width *= 2.0
    raise NoRoot("no root: automatic bracketing failed")


def quantize(
    family: Family,
    n: int,
    bracket: Optional[tuple[float, float]] = None,
    branch_rule: BranchRule = BranchRule(),
    probes: int = 64,
) -> float:
    """Energy of the ``n``-th state of ``family`` by bisection on ``lambda - Gamma_n``."""
    f = _mismatch(family, n, branch_rule)
    lo, hi = bracket if bracket is not None else _auto_bracket(f)
    grid = np.linspace(lo, hi, probes + 1)
    vals = np.array([f(e) for e in grid])
    finite = vals[np.isfinite(vals)]
    signs = np.sign(finite)
    changes = int(np.count_nonzero(signs[1:] * signs[:-1] < 0))
    exact = int(np.count_nonzero(finite == 0.0))
    if changes + exact == 0:
        raise NoRoot(f"no root: no sign change in [{lo:g}, {hi:g}]")
    if changes > 1:
        raise AmbiguousBracket(f"ambiguous bracket: {changes} sign changes in [{lo:g}, {hi:g}]")
    if exact:
        return float(grid[np.isfinite(vals)][finite == 0.0][0])
    idx = np.flatnonzero(np.isfinite(vals))
    fin_grid = grid[idx]
    j = int(np.flatnonzero(signs[1:] * signs[:-1] < 0)[0])
    return float(
        optimize.bisect(f, fin_grid[j], fin_grid[j + 1], xtol=1e-12, rtol=4 * np.finfo(float).eps)
    )


@dataclass(frozen=True)
class NUState:
    n: int
    energy: float
    problem: NUProblem
    branch: PiBranch
    phi: BetaWeight
    weight: BetaWeight
    y: Poly
    odd: bool


def solve_state(family: Family, n: int, branch_rule: BranchRule = BranchRule()) -> NUState:
    energy = quantize(family, n, branch_rule=branch_rule)
    problem = family(energy)
    b = branch_rule.select(problem, n)
    weight = weight_function(b, problem)
    return NUState(
        n=n,
        energy=energy,
        problem=problem,
        branch=b,
        phi=phi_factor(b, problem),
        weight=weight,
        y=rodrigues_poly(weight, problem.sigma, branch_rule.degree(n)),
        odd=branch_rule.parity(n) == 1,
    )
