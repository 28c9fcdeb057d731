"""Brute-force finite-difference eigensolver for ``-kappa psi'' + V psi = E psi``.

The grid holds the interior nodes of a uniform partition, so Dirichlet
zeros sit exactly on the walls and a singular wall is never sampled. The
second-order stencil is combined with one Richardson step on an N/2, N
pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import linalg

from .susy_core import HBAR2_EQ_2M, SpectrumResult, TrigPotential, Units

DEFAULT_POINTS = 4096
SEED = 0x5EED
# relative to the Gershgorin width; 0 lets stebz bisect down to ULP * |T|
BISECTION_RTOL = 0.0


class SingularNode(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform partition of ``[theta_min + m L, theta_max - m L]`` into ``n_points`` cells.

    ``nodes`` are the ``n_points - 1`` interior vertices.
    """

    theta_min: float
    theta_max: float
    n_points: int = DEFAULT_POINTS
    margin: float = 0.0

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError("n_points must be >= 16")
        if not self.theta_max > self.theta_min:
            raise ValueError("empty interval")
        if not 0.0 <= self.margin < 0.5:
            raise ValueError("margin must lie in [0, 0.5)")

    @classmethod
    def over(cls, domain: tuple[float, float], n_points: int = DEFAULT_POINTS, margin: float = 0.0) -> "Grid":
        return cls(domain[0], domain[1], n_points, margin)

    @property
    def lo(self) -> float:
        return self.theta_min + self.margin * (self.theta_max - self.theta_min)

    @property
    def hi(self) -> float:
        return self.theta_max - self.margin * (self.theta_max - self.theta_min)

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return self.lo + self.h * np.arange(1, self.n_points)

    def refined(self) -> "Grid":
        return Grid(self.theta_min, self.theta_max, 2 * self.n_points, self.margin)

    def coarsened(self) -> "Grid":
        return Grid(self.theta_min, self.theta_max, self.n_points // 2, self.margin)


@dataclass(frozen=True)
class GridFunction:
    values: np.ndarray
    grid: Grid
    endpoints: str = "dirichlet-excluded"

    def norm(self) -> float:
        return math.sqrt(inner_product(self.values, self.values, grid=self.grid))


@dataclass(frozen=True)
class TridiagonalSym:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must have length N - 1")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.offdiag * x[1:]
        y[1:] += self.offdiag * x[:-1]
        return y

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros_like(self.diag)
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    grid: Optional[Grid] = None
    vectors: Optional[list[np.ndarray]] = None
    extrapolated: bool = False


PotentialLike = Union[TrigPotential, Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


def _sample(v: PotentialLike, grid: Grid) -> np.ndarray:
    if isinstance(v, TrigPotential) or callable(v):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(v(grid.nodes), dtype=float)
    values = np.asarray(v, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError("sampled potential does not match the grid")
    return values


def discretize(v: PotentialLike, grid: Grid, units: Units = HBAR2_EQ_2M) -> TridiagonalSym:
    """Central-difference Hamiltonian with Dirichlet zeros just beyond the end nodes."""
    values = _sample(v, grid)
    if not np.all(np.isfinite(values)):
        bad = grid.nodes[~np.isfinite(values)][0]
        raise SingularNode(f"singular node at theta={bad:g}")
    kappa = units.kappa
    h = grid.h
    diag = 2.0 * kappa / h**2 + values
    off = np.full(len(diag) - 1, -kappa / h**2)
    return TridiagonalSym(diag, off)


def sturm_count(h: TridiagonalSym, x: float) -> int:
    """Number of eigenvalues strictly below ``x`` (LDL^T sign count)."""
    tiny = np.finfo(float).tiny
    count = 0
    q = 1.0
    e2 = np.concatenate(([0.0], h.offdiag**2))
    for d, ee in zip(h.diag, e2):
        q = d - x - (ee / q if ee else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count


def _inverse_iteration(h: TridiagonalSym, lam: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    n = h.size
    # offset relative to the eigenvalue itself; the Gershgorin radius is huge near the walls
    shift = lam - 1e-10 * max(abs(lam), 1.0)
    ab = np.zeros((3, n))
    ab[0, 1:] = h.offdiag
    ab[1] = h.diag - shift
    ab[2, :-1] = h.offdiag
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for _ in range(2):
        x = linalg.solve_banded((1, 1), ab, x)
        x /= np.linalg.norm(x)
    rq = float(x @ h.matvec(x))
    return x, rq


def eigen_lowest(
    h: TridiagonalSym,
    m: int,
    want_vectors: bool = False,
    grid: Optional[Grid] = None,
    seed: int = SEED,
) -> EigenResult:
    """``m`` smallest eigenvalues by Sturm-sequence bisection (LAPACK ``stebz``).

    Vectors come from two steps of shifted inverse iteration followed by a
    Rayleigh quotient, normalized in the ``h``-weighted 2-norm when a grid
    is supplied.
    """
    if m > h.size:
        raise ValueError("m exceeds the matrix size")
    if h.size == 1:
        values = np.array([float(h.diag[0])])
    else:
        lo, hi = h.gershgorin()
        values = linalg.eigh_tridiagonal(
            h.diag,
            h.offdiag,
            eigvals_only=True,
            select="i",
            select_range=(0, m - 1),
            lapack_driver="stebz",
            tol=BISECTION_RTOL * (hi - lo),
            check_finite=False,
        )
    values = np.asarray(values, dtype=float)
    vectors = None
    if want_vectors:
        rng = np.random.default_rng(seed)
        vectors = []
        step = grid.h if grid is not None else 1.0
        for j, lam in enumerate(values):
            if h.size == 1:
                v = np.array([1.0])
            else:
                v, _ = _inverse_iteration(h, lam, rng)
            v = _fix_sign(v) / math.sqrt(step)
            vectors.append(v)
    return EigenResult(values=values, grid=grid, vectors=vectors)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Make the first significant sample positive."""
    big = np.flatnonzero(np.abs(v) > 1e-3 * np.max(np.abs(v)))
    return v if v[big[0]] > 0 else -v


def richardson(e_coarse, e_fine):
    """Eliminate the ``h^2`` term: ``(4 e_fine - e_coarse) / 3``."""
    return (4.0 * np.asarray(e_fine, dtype=float) - np.asarray(e_coarse, dtype=float)) / 3.0


def inner_product(f, g, weight=None, grid: Optional[Grid] = None, h: Optional[float] = None) -> float:
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError("length mismatch")
    w = np.ones_like(f) if weight is None else np.asarray(weight, dtype=float)
    if w.shape != f.shape:
        raise ValueError("length mismatch")
    step = h if h is not None else (grid.h if grid is not None else 1.0)
    return float(np.sum(f * g * w) * step)


def count_nodes(f) -> int:
    """Strict sign changes, ignoring samples below ``1e-10 * max|f|``."""
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        return 0
    keep = f[np.abs(f) >= 1e-10 * np.max(np.abs(f))]
    s = np.sign(keep)
    return int(np.count_nonzero(s[1:] != s[:-1]))


def ode_residual(
    psi: Callable[[np.ndarray], np.ndarray],
    e: float,
    v: PotentialLike,
    grid: Grid,
    units: Units = HBAR2_EQ_2M,
    step: Optional[float] = None,
) -> float:
    """``max |-kappa psi'' + (V - E) psi| / max|psi|`` on the interior 90%.

    ``psi''`` uses the five-point stencil with spacing ``step``.
    """
    x = grid.nodes
    span = grid.hi - grid.lo
    inner = x[(x > grid.lo + 0.05 * span) & (x < grid.hi - 0.05 * span)]
    d = step if step is not None else 1e-3 * span
    f = lambda t: np.asarray(psi(t), dtype=float)
    second = (-f(inner + 2 * d) + 16 * f(inner + d) - 30 * f(inner) + 16 * f(inner - d) - f(inner - 2 * d)) / (
        12 * d * d
    )
    vv = v(inner) if (isinstance(v, TrigPotential) or callable(v)) else np.interp(inner, x, np.asarray(v))
    res = -units.kappa * second + (vv - e) * f(inner)
    return float(np.max(np.abs(res)) / np.max(np.abs(f(x))))


def solve(
    v: PotentialLike,
    grid: Grid,
    m: int,
    units: Units = HBAR2_EQ_2M,
    want_vectors: bool = False,
    seed: int = SEED,
) -> EigenResult:
    return eigen_lowest(discretize(v, grid, units), m, want_vectors, grid, seed)


def extrapolated_eigenvalues(
    v: PotentialLike,
    domain: tuple[float, float],
    m: int,
    units: Units = HBAR2_EQ_2M,
    n_points: int = DEFAULT_POINTS,
    margin: float = 0.0,
) -> EigenResult:
    """Richardson-extrapolated lowest ``m`` eigenvalues from the ``N/2, N`` pair."""
    fine = Grid.over(domain, n_points, margin)
    coarse = fine.coarsened()
    e_c = solve(v, coarse, m, units).values
    e_f = solve(v, fine, m, units).values
    return EigenResult(values=richardson(e_c, e_f), grid=fine, extrapolated=True)


def oracle_spectrum(
    v: TrigPotential,
    n_max: int,
    units: Units = HBAR2_EQ_2M,
    n_points: int = DEFAULT_POINTS,
    margin: float = 0.0,
) -> SpectrumResult:
    res = extrapolated_eigenvalues(v, v.domain, n_max + 1, units, n_points, margin)
    return SpectrumResult.from_energies(res.values, "oracle", units)
