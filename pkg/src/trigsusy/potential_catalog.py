"""Squared tangent, squared cotangent and trigonometric Poschl-Teller families.

Each family is a superpotential ansatz. From it come the partner
potentials, the hypergeometric reduction for the NU pipeline, the printed
closed-form spectra and the NU wavefunctions.

The printed spectra are evaluated verbatim with ``hbar`` and ``m`` from the
units record, exactly as written. The NU and oracle routes use the physical
partner coefficients, which carry ``c = hbar / sqrt(2m)``; the two agree
when ``hbar^2 = 2m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from . import nu_core
from .nu_core import BranchRule, NUProblem, NUState
from .poly import Poly
from .spectral_oracle import DEFAULT_POINTS, oracle_spectrum as _oracle_spectrum
from .susy_core import (
    HBAR2_EQ_2M,
    PartnerPair,
    SpectrumResult,
    Superpotential,
    TrigPotential,
    Units,
    partner_potentials,
)


class FormulaDomainError(ValueError):
    """A printed closed form was asked for outside its real domain."""


class InadmissibleParameters(ValueError):
    pass


def _check_sign(sign: str) -> str:
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', got {sign!r}")
    return sign


@dataclass(frozen=True)
class StpParams:
    A: float
    alpha: float = 1.0
    units: Units = HBAR2_EQ_2M
    nu: Optional[float] = None
    allow_inadmissible: bool = False

    kind = "stp"

    def __post_init__(self):
        if self.alpha == 0.0:
            raise InadmissibleParameters("alpha must be nonzero")
        if not self.allow_inadmissible:
            if not self.A > 0:
                raise InadmissibleParameters("squared tangent needs A > 0")
            if self.nu is not None and self.nu < 1:
                raise InadmissibleParameters("nu must be >= 1")

    @classmethod
    def from_nu(cls, nu: float, alpha: float = 1.0, units: Units = HBAR2_EQ_2M) -> "StpParams":
        """Original potential ``V0 tan^2`` with ``V0 = kappa alpha^2 nu(nu-1)``."""
        return cls(A=units.c * alpha * nu, alpha=alpha, units=units, nu=nu)

    @property
    def v0(self) -> float:
        return self.A**2 - self.units.c * self.alpha * self.A

    def superpotential(self) -> Superpotential:
        return Superpotential(tan_coeff=self.A, alpha=self.alpha)


@dataclass(frozen=True)
class ScpParams:
    A: float
    alpha: float = 1.0
    units: Units = HBAR2_EQ_2M

    kind = "scp"

    def __post_init__(self):
        if self.alpha == 0.0:
            raise InadmissibleParameters("alpha must be nonzero")

    def superpotential(self) -> Superpotential:
        return Superpotential(cot_coeff=self.A, alpha=self.alpha)


@dataclass(frozen=True)
class PtpParams:
    a: float
    b: float
    alpha: float = 1.0
    units: Units = HBAR2_EQ_2M
    chi: Optional[float] = None
    lam: Optional[float] = None

    kind = "ptp"

    def __post_init__(self):
        if self.alpha == 0.0:
            raise InadmissibleParameters("alpha must be nonzero")

    @classmethod
    def from_flugge(
        cls, chi: float, lam: float, v0: float, alpha: float = 1.0, units: Units = HBAR2_EQ_2M
    ) -> "PtpParams":
        """Superpotential for ``A cosec^2 + B sec^2`` with ``A = V0 chi(chi-1)/2``, ``B = V0 lam(lam-1)/2``.

        Roots are picked so the zero mode vanishes at both walls.
        """
        big_a = v0 * chi * (chi - 1) / 2
        big_b = v0 * lam * (lam - 1) / 2
        s = units.c * alpha
        disc_a, disc_b = s * s + 4 * big_a, s * s + 4 * big_b
        if disc_a < 0 or disc_b < 0:
            raise InadmissibleParameters("cosec^2/sec^2 coefficients below the Langer bound")
        a = (-s - math.copysign(math.sqrt(disc_a), s)) / 2
        b = (s + math.copysign(math.sqrt(disc_b), s)) / 2
        return cls(a=a, b=b, alpha=alpha, units=units, chi=chi, lam=lam)

    @property
    def flugge_coefficients(self) -> tuple[float, float]:
        v = partner_potentials(self.superpotential(), self.units).v_minus
        return v.csc2, v.sec2

    def superpotential(self) -> Superpotential:
        return Superpotential(tan_coeff=self.b, cot_coeff=self.a, alpha=self.alpha)


FamilyParams = Union[StpParams, ScpParams, PtpParams]


def partners(p: FamilyParams) -> PartnerPair:
    return partner_potentials(p.superpotential(), p.units)


def potential(p: FamilyParams, sign: str = "minus") -> TrigPotential:
    return partners(p).get(_check_sign(sign))


# z = sin^2 for the tangent and Poschl-Teller cases, z = cos^2 for the cotangent
_MAP = {"stp": "sin2", "scp": "cos2", "ptp": "sin2"}
_FOLDS = {"stp": (True, False), "scp": (True, False), "ptp": (False, False)}


def branch_rule(p: FamilyParams) -> BranchRule:
    return BranchRule(folds=_FOLDS[p.kind])


def reduce_potential(
    v: TrigPotential, energy: float, units: Units, map_kind: str = "sin2", doubled: bool = False
) -> NUProblem:
    """Hypergeometric form of ``-kappa psi'' + V psi = E psi`` under ``z = sin^2`` or ``cos^2``.

    With ``eps = (E - const)/(4 kappa alpha^2)`` and ``p0``, ``p1`` the scaled
    coefficients of ``1/z`` and ``1/(1-z)``::

        sigma = z(1-z),  tau_t = 1/2 - z,  sigma_t = -eps z^2 + (eps + p0 - p1) z - p0

    ``doubled`` rescales to ``sigma = 2z(1-z)``, ``tau_t = 1 - 2z``, ``4 sigma_t``.
    """
    scale = 4.0 * units.kappa * v.alpha**2
    eps = (energy - v.const) / scale
    if map_kind == "sin2":
        p0, p1 = v.csc2 / scale, v.sec2 / scale
    elif map_kind == "cos2":
        p0, p1 = v.sec2 / scale, v.csc2 / scale
    else:
        raise ValueError(f"unknown map {map_kind!r}")
    sigma = Poly([0.0, 1.0, -1.0])
    tau_t = Poly([0.5, -1.0])
    sigma_t = Poly([-p0, eps + p0 - p1, -eps])
    if doubled:
        sigma, tau_t, sigma_t = 2.0 * sigma, 2.0 * tau_t, 4.0 * sigma_t
    return NUProblem(sigma=sigma, sigma_tilde=sigma_t, tau_tilde=tau_t)


def nu_problem_for(p: FamilyParams, energy: float, sign: str = "minus") -> NUProblem:
    return reduce_potential(
        potential(p, sign), energy, p.units, _MAP[p.kind], doubled=(p.kind == "ptp")
    )


def nu_family(p: FamilyParams, sign: str = "minus") -> Callable[[float], NUProblem]:
    v = potential(p, sign)
    mk, doubled = _MAP[p.kind], p.kind == "ptp"
    return lambda energy: reduce_potential(v, energy, p.units, mk, doubled)


def printed_groups(p: FamilyParams, energy: float, sign: str = "minus") -> dict[str, float]:
    """Dimensionless groups under the names used by the printed reductions."""
    v = potential(p, sign)
    scale = 4.0 * p.units.kappa * p.alpha**2
    if p.kind == "stp":
        coeff, const = v.tan2_form
        e_bar = (energy - const) / scale
        a_bar = coeff / scale
        cal_e = e_bar + a_bar
        return {"E_bar": e_bar, "A_bar": a_bar, "calE": cal_e,
                "calE_t": 1 + 4 * cal_e, "E_t": -1 - 4 * e_bar}
    if p.kind == "scp":
        coeff, const = v.cot2_form
        e_t = (energy - const) / scale
        a_t = coeff / scale
        return {"E_t": e_t, "A_t": a_t, "calE_t": e_t + a_t}
    e1 = 4 * (energy - v.const) / scale
    a_t = 4 * v.csc2 / scale
    b_t = 4 * v.sec2 / scale
    return {"E1": e1, "E2": e1 + a_t - b_t, "a_t": a_t, "b_t": b_t,
            "nu1": 1 + 4 * a_t, "nu2": 1 + 4 * b_t}


def nu_spectrum(p: FamilyParams, n_max: int, sign: str = "minus") -> SpectrumResult:
    fam, rule = nu_family(p, sign), branch_rule(p)
    energies = [nu_core.quantize(fam, n, branch_rule=rule) for n in range(n_max + 1)]
    return SpectrumResult.from_energies(energies, "nu-quantization", p.units)


def oracle_spectrum(
    p: FamilyParams, n_max: int, sign: str = "minus", n_points: int = DEFAULT_POINTS, margin: float = 0.0
) -> SpectrumResult:
    return _oracle_spectrum(potential(p, sign), n_max, p.units, n_points, margin)


# printed closed forms ---------------------------------------------------------


def _gamma_sign(sign: str, printed_upper: float, convention: str) -> float:
    # printed_upper is the sign the printed formula gives E^(+)
    s = printed_upper if sign == "plus" else -printed_upper
    if convention == "printed":
        return s
    if convention == "swapped":
        return -s
    raise ValueError(f"unknown gamma convention {convention!r}")


def _squared_trig_energy(p, n: int, sign: str, group_sign: float, gamma_sign: float) -> float:
    hbar, m, alpha, big_a = p.units.hbar, p.units.mass, p.alpha, p.A
    group = m * (big_a**2 + group_sign * alpha * big_a) / (2 * hbar**2 * alpha**2)
    radicand = 1 + 16 * group
    if radicand < 0:
        raise FormulaDomainError(f"formula domain violation: 1 + 16*group = {radicand:g}")
    delta = 1 + math.sqrt(radicand)
    gamma = alpha * big_a
    return gamma_sign * gamma + hbar**2 * alpha**2 / (2 * m) * (4 * n * n + (4 * n + 1) * delta / 2)


def stp_delta(p: StpParams, sign: str = "minus") -> float:
    hbar, m, alpha, big_a = p.units.hbar, p.units.mass, p.alpha, p.A
    s = 1.0 if _check_sign(sign) == "plus" else -1.0
    group = m * (big_a**2 + s * alpha * big_a) / (2 * hbar**2 * alpha**2)
    radicand = 1 + 16 * group
    if radicand < 0:
        raise FormulaDomainError(f"formula domain violation: 1 + 16*A_bar = {radicand:g}")
    return 1 + math.sqrt(radicand)


def scp_delta(p: ScpParams, sign: str = "minus") -> float:
    hbar, m, alpha, big_a = p.units.hbar, p.units.mass, p.alpha, p.A
    s = -1.0 if _check_sign(sign) == "plus" else 1.0
    group = m * (big_a**2 + s * alpha * big_a) / (2 * hbar**2 * alpha**2)
    radicand = 1 + 16 * group
    if radicand < 0:
        raise FormulaDomainError(f"formula domain violation: 1 + 16*A_t = {radicand:g}")
    return 1 + math.sqrt(radicand)


def stp_energy(p: StpParams, n: int, sign: str = "minus", gamma_convention: str = "printed") -> float:
    """Printed squared-tangent spectrum ``-+gamma + (hbar^2 alpha^2/2m)[4n^2 + (4n+1) delta1/2]``.

    ``A_bar`` takes ``A^2 + alpha A`` for ``E^(+)`` and ``A^2 - alpha A`` for
    ``E^(-)``. ``gamma_convention='swapped'`` flips the sign attached to gamma.
    """
    _check_sign(sign)
    group_sign = 1.0 if sign == "plus" else -1.0
    return _squared_trig_energy(p, n, sign, group_sign, _gamma_sign(sign, -1.0, gamma_convention))


def scp_energy(p: ScpParams, n: int, sign: str = "minus", gamma_convention: str = "printed") -> float:
    """Printed squared-cotangent spectrum ``+-gamma + (hbar^2 alpha^2/2m)[4n^2 + (4n+1) delta2/2]``."""
    _check_sign(sign)
    group_sign = -1.0 if sign == "plus" else 1.0
    return _squared_trig_energy(p, n, sign, group_sign, _gamma_sign(sign, 1.0, gamma_convention))


def ptp_groups(p: PtpParams, sign: str = "minus", a1_form: str = "derived") -> dict[str, float]:
    hbar, m, alpha, a, b = p.units.hbar, p.units.mass, p.alpha, p.a, p.b
    s = 1.0 if _check_sign(sign) == "plus" else -1.0
    if a1_form == "derived":
        a1 = a * a - s * alpha * a
    elif a1_form == "printed":
        a1 = alpha * alpha - s * alpha * a
    else:
        raise ValueError(f"unknown A1 form {a1_form!r}")
    b1 = b * b + s * alpha * b
    a_t = 2 * m * a1 / (hbar**2 * alpha**2)
    b_t = 2 * m * b1 / (hbar**2 * alpha**2)
    return {"A1": a1, "B1": b1, "C1": (a - b) ** 2, "a_t": a_t, "b_t": b_t,
            "nu1": 1 + 4 * a_t, "nu2": 1 + 4 * b_t}


def ptp_energy(p: PtpParams, n: int, sign: str = "minus", a1_form: str = "derived") -> float:
    """Printed Poschl-Teller spectrum, including the ``-(a-b)^2`` shift."""
    g = ptp_groups(p, sign, a1_form)
    nu1, nu2 = g["nu1"], g["nu2"]
    if nu1 < 0 or nu2 < 0:
        raise FormulaDomainError(f"formula domain violation: nu1={nu1:g}, nu2={nu2:g}")
    hbar, m, alpha = p.units.hbar, p.units.mass, p.alpha
    r1, r2 = math.sqrt(nu1), math.sqrt(nu2)
    k = 2 * n + 1
    body = k * (k + (r1 + r2)) + 0.5 * ((1 + math.sqrt(nu1 * nu2)) + 2 * (g["a_t"] + g["b_t"]))
    return hbar**2 * alpha**2 / (2 * m) * body - g["C1"]


def closed_form_spectrum(
    p: FamilyParams, n_max: int, sign: str = "minus", convention: str = "printed"
) -> SpectrumResult:
    if p.kind == "stp":
        es = [stp_energy(p, n, sign, convention) for n in range(n_max + 1)]
        tag = "closed-form(Eq.29)"
    elif p.kind == "scp":
        es = [scp_energy(p, n, sign, convention) for n in range(n_max + 1)]
        tag = "closed-form(Eq.38)"
    else:
        es = [ptp_energy(p, n, sign) for n in range(n_max + 1)]
        tag = "closed-form(Eq.49)"
    return SpectrumResult.from_energies(es, tag, p.units)


# wavefunctions ------------------------------------------------------------------


class NonNormalizable(ValueError):
    pass


@dataclass(frozen=True)
class Wavefunction:
    """``psi_n(theta) = norm * phi(z) * y(z)``, odd states carrying the signed root."""

    n: int
    energy: float
    state: NUState
    alpha: float
    map_kind: str
    domain: tuple[float, float]
    norm: float = 1.0

    def z(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        return np.sin(x) ** 2 if self.map_kind == "sin2" else np.cos(x) ** 2

    def raw(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        z = self.z(theta)
        phi = self.state.phi
        # doubled sigma keeps roots at 0 and 1, so phi = z^a (1-z)^b throughout
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.state.odd:
                root = np.sin(x) if self.map_kind == "sin2" else np.cos(x)
                out = root * z ** (phi.a_exp - 0.5) * (1 - z) ** phi.b_exp
            else:
                out = z**phi.a_exp * (1 - z) ** phi.b_exp
        out = out * self.state.y(z)
        return np.where(np.isfinite(out), out, 0.0)

    def __call__(self, theta):
        return self.norm * self.raw(theta)


def _quad_norm2(f, domain) -> float:
    val, _ = integrate.quad(lambda t: float(f(t)) ** 2, domain[0], domain[1],
                            limit=400, epsabs=1e-15, epsrel=1e-13)
    return val


def nu_wavefunction(p: FamilyParams, n: int, sign: str = "minus") -> Wavefunction:
    """Unit-normalized NU eigenfunction; ``n`` counts all states, so it has ``n`` nodes."""
    fam, rule = nu_family(p, sign), branch_rule(p)
    try:
        state = nu_core.solve_state(fam, n, rule)
    except nu_core.NonIntegrableWeight as exc:
        raise NonNormalizable(f"non-normalizable: {exc}") from exc
    v = potential(p, sign)
    wf = Wavefunction(n, state.energy, state, p.alpha, _MAP[p.kind], v.domain)
    norm2 = _quad_norm2(wf.raw, v.domain)
    if not (norm2 > 0 and math.isfinite(norm2)):
        raise NonNormalizable("non-normalizable: zero or divergent norm")
    samples = wf.raw(np.linspace(*v.domain, 2003)[1:-1])
    big = np.flatnonzero(np.abs(samples) > 1e-3 * np.max(np.abs(samples)))
    sgn = 1.0 if samples[big[0]] > 0 else -1.0
    return Wavefunction(n, state.energy, state, p.alpha, _MAP[p.kind], v.domain, sgn / math.sqrt(norm2))


def stp_wavefunction(p: StpParams, n: int, sign: str = "minus") -> Wavefunction:
    return nu_wavefunction(p, n, sign)


def scp_wavefunction(p: ScpParams, n: int, sign: str = "minus") -> Wavefunction:
    return nu_wavefunction(p, n, sign)


def ptp_wavefunction(p: PtpParams, n: int, sign: str = "minus") -> Wavefunction:
    return nu_wavefunction(p, n, sign)


def ptp_mu(p: PtpParams, sign: str = "minus") -> float:
    """``mu = (sqrt(1+4a_t) + sqrt(1+4b_t)) / 2`` from the printed groups."""
    g = ptp_groups(p, sign)
    return (math.sqrt(g["nu1"]) + math.sqrt(g["nu2"])) / 2


# PT transform ---------------------------------------------------------------------


@dataclass(frozen=True)
class PtForm:
    """Complex hyperbolic potential produced by ``alpha -> i alpha``."""

    csch2: complex = 0j
    sech2: complex = 0j
    tanh2: complex = 0j
    coth2: complex = 0j
    const: complex = 0j
    alpha: float = 1.0

    def __call__(self, theta):
        x = self.alpha * np.asarray(theta, dtype=float)
        out = np.full(x.shape, self.const, dtype=complex)
        if self.csch2:
            out = out + self.csch2 / np.sinh(x) ** 2
        if self.sech2:
            out = out + self.sech2 / np.cosh(x) ** 2
        if self.tanh2:
            out = out + self.tanh2 * np.tanh(x) ** 2
        if self.coth2:
            out = out + self.coth2 / np.tanh(x) ** 2
        return out


@dataclass(frozen=True)
class PtPair:
    v_minus: PtForm
    v_plus: PtForm
    source: Superpotential
    units: Units


def _to_hyperbolic(csc2: complex, sec2: complex, const: complex, has_csc: bool, has_sec: bool, alpha: float) -> PtForm:
    # tan^2(ix) = -tanh^2 x, cot^2(ix) = -coth^2 x, csc^2(ix) = -csch^2 x, sec^2(ix) = sech^2 x
    if has_csc and has_sec:
        return PtForm(csch2=-csc2, sech2=sec2, const=const, alpha=alpha)
    if has_sec:
        return PtForm(tanh2=-sec2, const=const + sec2, alpha=alpha)
    if has_csc:
        return PtForm(coth2=-csc2, const=const + csc2, alpha=alpha)
    return PtForm(const=const, alpha=alpha)


def pt_transform(v: Union[TrigPotential, PartnerPair, PtPair]):
    """Coefficient-level ``alpha -> i alpha``.

    A bare potential only has its argument continued. A partner pair also
    continues the ``alpha`` inside its coefficients and returns a ``PtPair``;
    transforming that ``PtPair`` again lands on ``alpha -> -alpha``, i.e. the
    real pair with the partner labels exchanged.
    """
    if isinstance(v, PtPair):
        w = v.source
        return partner_potentials(Superpotential(w.tan_coeff, w.cot_coeff, -w.alpha), v.units)
    if isinstance(v, TrigPotential):
        return _to_hyperbolic(v.csc2, v.sec2, v.const, v.csc2 != 0, v.sec2 != 0, v.alpha)
    w, c = v.source, v.units.c
    a, b = w.cot_coeff, w.tan_coeff
    ialpha = 1j * w.alpha
    const = -((a - b) ** 2) + 0j
    has_csc, has_sec = a != 0, b != 0
    minus = _to_hyperbolic(a * a + c * ialpha * a, b * b - c * ialpha * b, const, has_csc, has_sec, w.alpha)
    plus = _to_hyperbolic(a * a - c * ialpha * a, b * b + c * ialpha * b, const, has_csc, has_sec, w.alpha)
    return PtPair(minus, plus, w, v.units)


def params_from_cli(kind: str, A: float, a: float, b: float, alpha: float, units: Units) -> FamilyParams:
    if kind == "stp":
        return StpParams(A=A, alpha=alpha, units=units)
    if kind == "scp":
        return ScpParams(A=A, alpha=alpha, units=units)
    if kind == "ptp":
        return PtpParams(a=a, b=b, alpha=alpha, units=units)
    raise ValueError(f"unknown potential {kind!r}")
