"""Partner potentials, zero modes and shape invariance for tan/cot superpotentials.

Everything is expressed in the canonical basis
``csc2 * cosec^2(alpha theta) + sec2 * sec^2(alpha theta) + const`` so the
SUSY identities become coefficient equalities. With ``c = hbar / sqrt(2m)``
and ``W = a cot(alpha theta) + b tan(alpha theta)``::

    V_-+ = (a^2 +- c alpha a) cosec^2 + (b^2 -+ c alpha b) sec^2 - (a - b)^2
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

PROBE_POINTS = 257
PROBE_MARGIN = 0.01


@dataclass(frozen=True)
class Units:
    hbar: float = 1.0
    mass: float = 0.5

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be positive")

    @property
    def c(self) -> float:
        """Factorization prefactor ``hbar / sqrt(2 m)``."""
        return self.hbar / math.sqrt(2.0 * self.mass)

    @property
    def kappa(self) -> float:
        """Kinetic prefactor ``hbar^2 / 2m``."""
        return self.hbar**2 / (2.0 * self.mass)


# hbar^2 = 2m, so c = 1 and the printed partner formulas hold verbatim
HBAR2_EQ_2M = Units(hbar=1.0, mass=0.5)
# the figures' stated convention alpha = hbar = m = 1, giving c = 1/sqrt(2)
HBAR_M_1 = Units(hbar=1.0, mass=1.0)

UNIT_PRESETS = {"hbar2-eq-2m": HBAR2_EQ_2M, "hbar-m-1": HBAR_M_1}


@dataclass(frozen=True)
class Superpotential:
    """``W(theta) = cot_coeff * cot(alpha theta) + tan_coeff * tan(alpha theta)``."""

    tan_coeff: float = 0.0
    cot_coeff: float = 0.0
    alpha: float = 1.0

    def __call__(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        out = np.zeros_like(x)
        if self.tan_coeff:
            out = out + self.tan_coeff * np.tan(x)
        if self.cot_coeff:
            out = out + self.cot_coeff / np.tan(x)
        return out

    def derivative(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        out = np.zeros_like(x)
        if self.tan_coeff:
            out = out + self.tan_coeff * self.alpha / np.cos(x) ** 2
        if self.cot_coeff:
            out = out - self.cot_coeff * self.alpha / np.sin(x) ** 2
        return out

    def negated(self) -> "Superpotential":
        return Superpotential(-self.tan_coeff, -self.cot_coeff, self.alpha)

    def domain(self) -> tuple[float, float]:
        return default_domain(self.cot_coeff != 0.0, self.tan_coeff != 0.0, self.alpha)


def default_domain(has_csc: bool, has_sec: bool, alpha: float) -> tuple[float, float]:
    """Largest singularity-free interval for the active terms."""
    if alpha == 0.0:
        return (-math.inf, math.inf)
    w = abs(alpha)
    if has_csc and has_sec:
        return (0.0, math.pi / (2 * w))
    if has_csc:
        return (0.0, math.pi / w)
    return (-math.pi / (2 * w), math.pi / (2 * w))


@dataclass(frozen=True)
class TrigPotential:
    csc2: float
    sec2: float
    const: float
    alpha: float
    domain: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(
                self, "domain", default_domain(self.csc2 != 0.0, self.sec2 != 0.0, self.alpha)
            )

    @classmethod
    def from_tan2(cls, coeff: float, const: float, alpha: float, domain=None) -> "TrigPotential":
        """``coeff * tan^2 + const`` rewritten with ``tan^2 = sec^2 - 1``."""
        return cls(0.0, coeff, const - coeff, alpha, domain)

    @classmethod
    def from_cot2(cls, coeff: float, const: float, alpha: float, domain=None) -> "TrigPotential":
        """``coeff * cot^2 + const`` rewritten with ``cot^2 = cosec^2 - 1``."""
        return cls(coeff, 0.0, const - coeff, alpha, domain)

    def __call__(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        out = np.full_like(x, self.const)
        if self.csc2:
            out = out + self.csc2 / np.sin(x) ** 2
        if self.sec2:
            out = out + self.sec2 / np.cos(x) ** 2
        return out

    @property
    def tan2_form(self) -> tuple[float, float]:
        """``(coeff, const)`` for a pure ``sec^2`` potential written with ``tan^2``."""
        return self.sec2, self.const + self.sec2

    @property
    def cot2_form(self) -> tuple[float, float]:
        return self.csc2, self.const + self.csc2

    def coefficients(self) -> tuple[float, float, float]:
        return self.csc2, self.sec2, self.const

    def shifted(self, delta: float) -> "TrigPotential":
        return replace(self, const=self.const + delta)

    def probe_grid(self, points: int = PROBE_POINTS, margin: float = PROBE_MARGIN) -> np.ndarray:
        lo, hi = self.domain
        span = hi - lo
        return np.linspace(lo + margin * span, hi - margin * span, points)


@dataclass(frozen=True)
class PartnerPair:
    v_minus: TrigPotential
    v_plus: TrigPotential
    source: Superpotential
    units: Units

    def get(self, sign: str) -> TrigPotential:
        return self.v_minus if sign == "minus" else self.v_plus

    def identity_residual(self) -> float:
        """Max of ``|V+ - V- - 2c W'|`` on the probe grid."""
        theta = self.v_minus.probe_grid()
        lhs = self.v_plus(theta) - self.v_minus(theta)
        rhs = 2.0 * self.units.c * self.source.derivative(theta)
        scale = max(1.0, float(np.max(np.abs(rhs))))
        return float(np.max(np.abs(lhs - rhs)) / scale)


def partner_potentials(w: Superpotential, units: Units = HBAR2_EQ_2M) -> PartnerPair:
    a, b, alpha = w.cot_coeff, w.tan_coeff, w.alpha
    c = units.c
    dom = w.domain()
    const = -((a - b) ** 2)
    if alpha == 0.0:
        # sec^2(0) = 1 folds into the constant; a cot term stays singular
        v = TrigPotential(a * a, 0.0, const + b * b, 0.0, dom)
        return PartnerPair(v, v, w, units)
    v_minus = TrigPotential(a * a + c * alpha * a, b * b - c * alpha * b, const, alpha, dom)
    v_plus = TrigPotential(a * a - c * alpha * a, b * b + c * alpha * b, const, alpha, dom)
    return PartnerPair(v_minus, v_plus, w, units)


@dataclass(frozen=True)
class GroundState:
    """Zero mode ``|sin|^sin_exp |cos|^cos_exp`` of ``H_-`` (unnormalized)."""

    sin_exp: float
    cos_exp: float
    alpha: float
    domain: tuple[float, float]
    normalizable: bool

    def __call__(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        out = np.ones_like(x)
        if self.sin_exp:
            out = out * np.abs(np.sin(x)) ** self.sin_exp
        if self.cos_exp:
            out = out * np.abs(np.cos(x)) ** self.cos_exp
        return out


def _touches_zero(domain: tuple[float, float], alpha: float, of: str) -> bool:
    """Does the closed domain contain a zero of ``sin`` or ``cos`` of ``alpha theta``?"""
    lo, hi = domain
    offset = 0.0 if of == "sin" else 0.5
    period = math.pi / abs(alpha)
    first = math.ceil(lo / period - offset - 1e-12)
    return (first + offset) * period <= hi + 1e-12


def ground_state(w: Superpotential, units: Units = HBAR2_EQ_2M) -> GroundState:
    """``psi_0 ~ exp(-(1/c) int W)`` with a normalizability flag.

    A vanishing flag means SUSY is broken: ``H_-`` has no zero-energy state.
    """
    dom = w.domain()
    if w.alpha == 0.0:
        return GroundState(0.0, 0.0, 0.0, dom, normalizable=False)
    c = units.c
    sin_exp = -w.cot_coeff / (c * w.alpha)
    cos_exp = w.tan_coeff / (c * w.alpha)
    ok = True
    for exp, which in ((sin_exp, "sin"), (cos_exp, "cos")):
        if exp != 0.0 and _touches_zero(dom, w.alpha, which):
            ok = ok and exp > 0.0
        ok = ok and exp > -0.5
    return GroundState(sin_exp, cos_exp, w.alpha, dom, normalizable=ok)


def shape_invariance_shift(
    w: Superpotential, units: Units = HBAR2_EQ_2M
) -> Optional[tuple[Superpotential, float]]:
    """Parameters ``w'`` and ``R`` with ``V_+(w) = V_-(w') + R``."""
    a, b, alpha = w.cot_coeff, w.tan_coeff, w.alpha
    step = units.c * alpha
    if alpha == 0.0:
        return None
    if a == 0.0 and b == 0.0:
        return w, 0.0
    if a == 0.0:
        shifted = replace(w, tan_coeff=b + step)
    elif b == 0.0:
        shifted = replace(w, cot_coeff=a - step)
    else:
        shifted = replace(w, cot_coeff=a - step, tan_coeff=b + step)
    plus = partner_potentials(w, units).v_plus
    minus = partner_potentials(shifted, units).v_minus
    if not (math.isclose(plus.csc2, minus.csc2, rel_tol=1e-12, abs_tol=1e-12)
            and math.isclose(plus.sec2, minus.sec2, rel_tol=1e-12, abs_tol=1e-12)):
        return None
    return shifted, plus.const - minus.const


@dataclass(frozen=True)
class SpectrumResult:
    levels: tuple[tuple[int, float], ...]
    provenance: str
    units: Units

    @property
    def energies(self) -> list[float]:
        return [e for _, e in self.levels]

    @classmethod
    def from_energies(cls, energies, provenance: str, units: Units, start: int = 0):
        return cls(tuple((start + i, float(e)) for i, e in enumerate(energies)), provenance, units)


class BrokenSusy(RuntimeError):
    pass


def hierarchy_spectrum(w: Superpotential, units: Units = HBAR2_EQ_2M, n_max: int = 5) -> SpectrumResult:
    """Spectrum of ``V_-`` by telescoping shape-invariance remainders."""
    if not ground_state(w, units).normalizable:
        raise BrokenSusy("no zero mode; hierarchy base energy unknown")
    if n_max > 0 and w.cot_coeff == 0.0 and w.tan_coeff == 0.0:
        raise BrokenSusy("W = 0 has no shape-invariant ladder")
    energies = [0.0]
    current = w
    total = 0.0
    for _ in range(n_max):
        step = shape_invariance_shift(current, units)
        if step is None:
            raise BrokenSusy("shape invariance does not close")
        current, remainder = step
        if not ground_state(current, units).normalizable:
            raise BrokenSusy("zero mode lost along the hierarchy")
        total += remainder
        energies.append(total)
    return SpectrumResult.from_energies(energies, "closed-form", units)


class Classification(enum.Enum):
    FREE_PARTICLE = "FreeParticle"
    STEP_POTENTIAL = "StepPotential"
    POTENTIAL_WELL = "PotentialWell"
    SINGULAR = "Singular"
    REGULAR = "Regular"


def _by_sign(value: float) -> Classification:
    if value > 0:
        return Classification.STEP_POTENTIAL
    if value < 0:
        return Classification.POTENTIAL_WELL
    return Classification.FREE_PARTICLE


def classify_potential(v: TrigPotential, theta: float) -> Classification:
    """Limiting character of ``v`` at ``theta``.

    Singular where an active term diverges. Where every active term sits at
    the point its ``tan^2``/``cot^2`` form vanishes, the potential is a bare
    constant and is read as a step (positive), well (negative) or free
    particle (zero). Any other point is regular.
    """
    if v.alpha == 0.0:
        if v.csc2 != 0.0:
            return Classification.SINGULAR
        return _by_sign(v.const) if v.const else Classification.FREE_PARTICLE
    x = v.alpha * theta
    s, co = math.sin(x), math.cos(x)
    if (v.csc2 and abs(s) < 1e-12) or (v.sec2 and abs(co) < 1e-12):
        return Classification.SINGULAR
    flat = True
    if v.csc2:
        flat = flat and abs(co) < 1e-12
    if v.sec2:
        flat = flat and abs(s) < 1e-12
    if not (v.csc2 or v.sec2):
        return _by_sign(v.const)
    if flat:
        return _by_sign(v.csc2 + v.sec2 + v.const)
    return Classification.REGULAR


def classify(pair: PartnerPair, theta: float, sign: str = "minus") -> Classification:
    return classify_potential(pair.get(sign), theta)


def swap_partners(w: Superpotential, units: Units = HBAR2_EQ_2M) -> PartnerPair:
    """Partner pair with ``alpha -> -alpha``; its labels are those of ``w`` exchanged."""
    return partner_potentials(replace(w, alpha=-w.alpha), units)


PotentialFn = Callable[[np.ndarray], np.ndarray]
