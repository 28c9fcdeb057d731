"""Small immutable real polynomial type used by the NU machinery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    out = [float(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    if not out:
        out = [0.0]
    return tuple(out)


@dataclass(frozen=True, init=False)
class Poly:
    """Polynomial with real coefficients in ascending degree order.

    Trailing exact zeros are trimmed on construction, so ``degree`` is
    canonical. The zero polynomial has degree -1.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _trim(list(coeffs)))

    @classmethod
    def const(cls, c: float) -> "Poly":
        return cls([c])

    @classmethod
    def linear(cls, c0: float, c1: float) -> "Poly":
        return cls([c0, c1])

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0.0:
            return -1
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> float:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc if acc.ndim else float(acc)

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Poly":
        return Poly(c / scalar for c in self.coeffs)

    def deriv(self, m: int = 1) -> "Poly":
        p = self
        for _ in range(m):
            if len(p.coeffs) == 1:
                return Poly([0.0])
            p = Poly(k * c for k, c in enumerate(p.coeffs) if k > 0)
        return p

    def compose(self, inner: "Poly") -> "Poly":
        """Return ``self(inner(z))``."""
        acc = Poly([0.0])
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def is_close(self, other, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        ref = max(self.scale(), other.scale())
        return all(
            abs(self.coeff(k) - other.coeff(k)) <= atol + rtol * ref for k in range(n)
        )

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.array([])
        return np.roots(self.coeffs[::-1])

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)})"


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly([float(x)])
