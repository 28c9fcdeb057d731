"""Partner potentials, zero modes, shape invariance and the hierarchy."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trigsusy import spectral_oracle as so
from trigsusy.susy_core import (
    HBAR2_EQ_2M,
    HBAR_M_1,
    UNIT_PRESETS,
    BrokenSusy,
    Classification,
    Superpotential,
    TrigPotential,
    Units,
    classify,
    default_domain,
    ground_state,
    hierarchy_spectrum,
    partner_potentials,
    shape_invariance_shift,
    swap_partners,
)

coeffs = st.floats(min_value=-4, max_value=4).filter(lambda x: abs(x) > 0.1)
alphas = st.sampled_from([0.5, 1.0, 2.0, -1.0])
unit_sets = st.sampled_from([HBAR2_EQ_2M, HBAR_M_1, Units(2.0, 0.7)])


# ═══════════════════════════════════════════════════════════════════
# Units and domains
# ═══════════════════════════════════════════════════════════════════


class TestUnits:
    def test_presets(self):
        assert HBAR2_EQ_2M.c == 1.0 and HBAR2_EQ_2M.kappa == 1.0
        assert HBAR_M_1.c == pytest.approx(1 / math.sqrt(2))
        assert set(UNIT_PRESETS) == {"hbar2-eq-2m", "hbar-m-1"}

    def test_positive(self):
        with pytest.raises(ValueError):
            Units(hbar=0.0)

    def test_domains(self):
        assert default_domain(True, True, 1.0) == pytest.approx((0, math.pi / 2))
        assert default_domain(True, False, 1.0) == pytest.approx((0, math.pi))
        assert default_domain(False, True, 2.0) == pytest.approx((-math.pi / 4, math.pi / 4))


# ═══════════════════════════════════════════════════════════════════
# Partner potentials
# ═══════════════════════════════════════════════════════════════════


class TestPartners:
    def test_tangent_pair(self):
        A = 2.0
        pair = partner_potentials(Superpotential(tan_coeff=A), HBAR2_EQ_2M)
        for sign, s in (("minus", -1), ("plus", 1)):
            coeff, const = pair.get(sign).tan2_form
            assert coeff == pytest.approx(A * A + s * A)
            assert const == pytest.approx(s * A)

    def test_two_term_pair(self):
        a, b = -2.0, 3.0
        pair = partner_potentials(Superpotential(tan_coeff=b, cot_coeff=a), HBAR2_EQ_2M)
        assert pair.v_plus.sec2 == pytest.approx(b * b + b)
        assert pair.v_minus.sec2 == pytest.approx(b * b - b)
        assert pair.v_plus.const == pytest.approx(-((a - b) ** 2))

    def test_zero_superpotential(self):
        pair = partner_potentials(Superpotential(), HBAR2_EQ_2M)
        assert pair.v_minus.coefficients() == (0.0, 0.0, 0.0)
        assert pair.v_plus.coefficients() == (0.0, 0.0, 0.0)

    @given(coeffs, coeffs, alphas, unit_sets)
    def test_pointwise_identity(self, a, b, alpha, units):
        for w in (Superpotential(tan_coeff=b, alpha=alpha), Superpotential(cot_coeff=a, alpha=alpha),
                  Superpotential(tan_coeff=b, cot_coeff=a, alpha=alpha)):
            assert partner_potentials(w, units).identity_residual() < 1e-10

    @given(coeffs, coeffs, alphas, unit_sets)
    def test_swap_by_negating_alpha(self, a, b, alpha, units):
        w = Superpotential(tan_coeff=b, cot_coeff=a, alpha=alpha)
        pair, swapped = partner_potentials(w, units), swap_partners(w, units)
        assert swapped.v_minus.coefficients() == pair.v_plus.coefficients()
        assert swapped.v_plus.coefficients() == pair.v_minus.coefficients()

    def test_canonical_rewrite(self):
        v = TrigPotential.from_tan2(3.0, 1.0, 1.0)
        theta = np.linspace(-1.2, 1.2, 7)
        np.testing.assert_allclose(v(theta), 3 * np.tan(theta) ** 2 + 1, rtol=1e-13)
        v = TrigPotential.from_cot2(2.0, -1.0, 1.0)
        theta = np.linspace(0.3, 2.8, 7)
        np.testing.assert_allclose(v(theta), 2 / np.tan(theta) ** 2 - 1, rtol=1e-13)


# ═══════════════════════════════════════════════════════════════════
# Zero modes
# ═══════════════════════════════════════════════════════════════════


class TestGroundState:
    def test_tangent_normalizable(self):
        g = ground_state(Superpotential(tan_coeff=2.0))
        assert g.normalizable
        theta = np.linspace(-1.5, 1.5, 9)
        np.testing.assert_allclose(g(theta), np.cos(theta) ** 2, rtol=1e-13)

    def test_cotangent_broken(self):
        g = ground_state(Superpotential(cot_coeff=2.0))
        assert not g.normalizable
        assert g.sin_exp == -2.0

    def test_zero_superpotential_on_box(self):
        assert ground_state(Superpotential()).normalizable

    @pytest.mark.parametrize("w", [Superpotential(tan_coeff=2.0), Superpotential(tan_coeff=2.0, cot_coeff=-2.0)])
    def test_zero_mode_property(self, w):
        g = ground_state(w)
        v = partner_potentials(w).v_minus
        grid = so.Grid.over(v.domain, 4096)
        psi = g(grid.nodes)
        assert np.linalg.norm(so.discretize(v, grid).matvec(psi)) / np.linalg.norm(psi) < 1e-5

    def test_zero_mode_fractional_exponent(self):
        # cos^1.5 has a singular second derivative at the wall, so check the interior and the Rayleigh quotient
        w = Superpotential(tan_coeff=1.5)
        v = partner_potentials(w).v_minus
        grid = so.Grid.over(v.domain, 4096)
        psi = ground_state(w)(grid.nodes)
        r = so.discretize(v, grid).matvec(psi)
        inner = np.abs(grid.nodes) < 1.4
        assert np.max(np.abs(r[inner])) < 1e-5
        assert abs(psi @ r) / (psi @ psi) < 1e-4


# ═══════════════════════════════════════════════════════════════════
# Shape invariance and hierarchy
# ═══════════════════════════════════════════════════════════════════


class TestShapeInvariance:
    def test_tangent(self):
        shifted, r = shape_invariance_shift(Superpotential(tan_coeff=2.0))
        assert shifted.tan_coeff == 3.0 and r == pytest.approx(5.0)

    def test_cotangent(self):
        shifted, r = shape_invariance_shift(Superpotential(cot_coeff=2.0))
        assert shifted.cot_coeff == 1.0 and r == pytest.approx(-3.0)

    def test_zero(self):
        shifted, r = shape_invariance_shift(Superpotential())
        assert shifted == Superpotential() and r == 0.0

    @given(coeffs, coeffs, alphas, unit_sets)
    def test_pointwise(self, a, b, alpha, units):
        w = Superpotential(tan_coeff=b, cot_coeff=a, alpha=alpha)
        shifted, r = shape_invariance_shift(w, units)
        plus = partner_potentials(w, units).v_plus
        minus = partner_potentials(shifted, units).v_minus
        theta = plus.probe_grid()
        scale = max(1.0, float(np.max(np.abs(plus(theta)))))
        assert np.max(np.abs(plus(theta) - minus(theta) - r)) / scale < 1e-10


class TestHierarchy:
    def test_tangent(self):
        assert hierarchy_spectrum(Superpotential(tan_coeff=2.0), n_max=3).energies == pytest.approx([0, 5, 12, 21])

    def test_poschl_teller(self):
        w = Superpotential(tan_coeff=2.0, cot_coeff=-2.0)
        assert hierarchy_spectrum(w, n_max=2).energies == pytest.approx([0, 20, 48])

    def test_ground_only(self):
        res = hierarchy_spectrum(Superpotential(tan_coeff=2.0), n_max=0)
        assert res.energies == [0.0] and res.provenance == "closed-form"

    def test_broken(self):
        with pytest.raises(BrokenSusy, match="no zero mode"):
            hierarchy_spectrum(Superpotential(cot_coeff=2.0))

    @pytest.mark.parametrize("w", [Superpotential(tan_coeff=1.5), Superpotential(tan_coeff=2.0),
                                   Superpotential(tan_coeff=3.0), Superpotential(tan_coeff=2.0, cot_coeff=-2.0),
                                   Superpotential(tan_coeff=2.0, cot_coeff=-3.0)])
    def test_agrees_with_oracle(self, w):
        v = partner_potentials(w).v_minus
        ref = so.oracle_spectrum(v, 5).energies
        got = hierarchy_spectrum(w, n_max=5).energies
        for x, y in zip(got, ref):
            assert abs(x - y) <= 1e-6 * max(abs(x), abs(y), 1.0)


# ═══════════════════════════════════════════════════════════════════
# Classification
# ═══════════════════════════════════════════════════════════════════


class TestClassify:
    def test_free_particle(self):
        pair = partner_potentials(Superpotential(tan_coeff=2.0, alpha=0.0))
        assert classify(pair, 0.3) is Classification.FREE_PARTICLE

    def test_cot_at_zero_alpha_singular(self):
        pair = partner_potentials(Superpotential(cot_coeff=2.0, alpha=0.0))
        assert classify(pair, 0.3) is Classification.SINGULAR

    def test_tangent_step_and_well(self):
        pair = partner_potentials(Superpotential(tan_coeff=2.0))
        assert classify(pair, 0.0, "plus") is Classification.STEP_POTENTIAL
        assert classify(pair, 0.0, "minus") is Classification.POTENTIAL_WELL
        assert pair.v_plus(0.0) == pytest.approx(2.0)

    def test_cotangent_step(self):
        pair = partner_potentials(Superpotential(cot_coeff=2.0))
        assert classify(pair, math.pi / 2, "minus") is Classification.STEP_POTENTIAL
        assert pair.v_minus(math.pi / 2) == pytest.approx(2.0)
        assert classify(pair, math.pi / 2, "plus") is Classification.POTENTIAL_WELL

    @pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
    def test_poschl_teller_singular(self, theta):
        pair = partner_potentials(Superpotential(tan_coeff=2.0, cot_coeff=-2.0))
        assert classify(pair, theta) is Classification.SINGULAR

    def test_regular_interior(self):
        pair = partner_potentials(Superpotential(tan_coeff=2.0))
        assert classify(pair, 0.4) is Classification.REGULAR
