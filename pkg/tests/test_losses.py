"""Forward loss values: frozen oracles, reductions, orderings."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclical_focal import (
    EPS_PROB,
    LossKind,
    LossSpec,
    asl_terms,
    batch_loss,
    ce_term,
    fl_term,
    hc_term,
    multiclass_loss,
    p_t,
    per_sample_losses,
    softmax,
)

# Scalar reference values, computed independently with mpmath at 50 digits
# and rounded to float64.
LN2 = 0.6931471805599453
FL_HALF_G2 = 0.17328679513998632  # 0.25 * ln 2
HC_HALF_G2 = 1.559581156259877  # 2.25 * ln 2
NLL_09 = 0.10536051565782628  # -ln 0.9
CE_ZERO = 27.631021115928548  # -ln(1e-12)
ASL_NEG_01_G4 = 1.053605156578263e-05  # 0.1^4 * -ln 0.9
SOFTMAX_123 = (0.09003057317038046, 0.24472847105479767, 0.6652409557748219)


def spec_of(kind, **kw):
    return LossSpec(kind=kind, **kw)


class TestSoftmax:
    def test_uniform(self):
        np.testing.assert_array_equal(softmax([0.0, 0.0]), [0.5, 0.5])

    def test_frozen_values(self):
        # float evaluation may land within 1-2 ulp of the exact-math values
        got = softmax([1.0, 2.0, 3.0])
        np.testing.assert_allclose(got, SOFTMAX_123, rtol=5e-16, atol=0)

    def test_large_logits_no_overflow(self):
        got = softmax([1000.0, 0.0])
        assert np.all(np.isfinite(got))
        assert got[0] == pytest.approx(1.0, abs=1e-300)
        assert got[1] == pytest.approx(0.0, abs=1e-300)

    def test_shift_invariance(self):
        a = softmax([1.0, 2.0, 3.0])
        b = softmax([101.0, 102.0, 103.0])
        np.testing.assert_allclose(a, b, rtol=1e-12)

    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=20))
    @settings(max_examples=200)
    def test_valid_distribution(self, logits):
        p = softmax(logits)
        assert np.all(p >= 0.0)
        assert abs(p.sum() - 1.0) <= 1e-9

    def test_rejects_scalar_and_short(self):
        with pytest.raises(ValueError):
            softmax([1.0])
        with pytest.raises(ValueError):
            softmax(3.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            softmax([np.inf, 0.0])
        with pytest.raises(ValueError):
            softmax([np.nan, 0.0])


class TestPt:
    def test_positive_label(self):
        assert p_t(0.3, 1) == 0.3

    def test_negative_label(self):
        assert p_t(0.3, 0) == 0.7

    def test_rejects_out_of_range_prob(self):
        with pytest.raises(ValueError):
            p_t(1.5, 1)
        with pytest.raises(ValueError):
            p_t(-0.1, 0)

    def test_rejects_bad_label(self):
        with pytest.raises(ValueError):
            p_t(0.5, 2)


class TestScalarTerms:
    def test_ce_half(self):
        assert ce_term(0.5) == LN2

    def test_ce_perfect_is_zero(self):
        assert ce_term(1.0) == 0.0

    def test_ce_zero_is_clamped(self):
        assert ce_term(0.0) == CE_ZERO

    def test_fl_half_gamma2(self):
        assert fl_term(0.5, 2.0) == FL_HALF_G2

    def test_fl_gamma0_is_ce(self):
        for pt in (0.0, 0.123, 0.5, 0.999, 1.0):
            assert fl_term(pt, 0.0) == ce_term(pt)

    def test_hc_half_gamma2(self):
        assert hc_term(0.5, 2.0) == HC_HALF_G2

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            fl_term(0.5, -1.0)
        with pytest.raises(ValueError):
            hc_term(0.5, -0.5)

    @given(st.floats(0.001, 0.999), st.floats(0.1, 8.0))
    @settings(max_examples=300)
    def test_ordering_fl_ce_hc(self, pt, gamma):
        assert fl_term(pt, gamma) < ce_term(pt) < hc_term(pt, gamma)

    @given(st.floats(0.0, 1.0))
    @settings(max_examples=200)
    def test_terms_non_negative(self, pt):
        assert ce_term(pt) >= 0.0
        assert fl_term(pt, 2.0) >= 0.0
        assert hc_term(pt, 2.0) >= 0.0


class TestAslTerms:
    def test_positive_branch_gamma0(self):
        assert asl_terms(0.9, 1, 0.0, 4.0) == NLL_09

    def test_negative_branch(self):
        assert asl_terms(0.1, 0, 0.0, 4.0) == pytest.approx(ASL_NEG_01_G4, rel=1e-15)

    def test_confident_negative_is_tiny(self):
        # negative label, near-zero prob: p^4 crushes the loss
        assert asl_terms(1e-6, 0, 0.0, 4.0) < 1e-23

    def test_rejects_bad_label(self):
        with pytest.raises(ValueError):
            asl_terms(0.5, 2, 0.0, 4.0)

    def test_rejects_bad_prob(self):
        with pytest.raises(ValueError):
            asl_terms(1.2, 1, 0.0, 4.0)

    @given(st.floats(0.0, 1.0), st.integers(0, 1))
    @settings(max_examples=200)
    def test_non_negative_and_finite(self, prob, y):
        v = asl_terms(prob, y, 1.0, 4.0)
        assert v >= 0.0
        assert math.isfinite(v)


class TestLossSpec:
    def test_kind_coerced_from_string(self):
        assert LossSpec(kind="cyclical").kind is LossKind.CFL

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            LossSpec(kind="banana")

    def test_rejects_negative_gamma(self):
        with pytest.raises(ValueError):
            LossSpec(kind="focal", gamma_lc=-2.0)

    def test_rejects_factor_below_one(self):
        with pytest.raises(ValueError):
            LossSpec(kind="cyclical", cyclical_factor=0.5)


class TestMulticlassLoss:
    def test_ce_two_equal_logits(self):
        assert multiclass_loss([0.0, 0.0], 0, spec_of("ce")) == LN2

    def test_ce_matches_nll_of_softmax(self):
        z = [1.0, 2.0, 3.0]
        want = -math.log(SOFTMAX_123[2])
        assert multiclass_loss(z, 2, spec_of("ce")) == pytest.approx(want, rel=1e-15)

    def test_fl_on_half(self):
        got = multiclass_loss([0.0, 0.0], 0, spec_of("focal", gamma_lc=2.0))
        assert got == FL_HALF_G2

    def test_cfl_blend_midpoint(self):
        # p_t = 0.5, xi = 0.5, both gammas 2: (2.25 + 0.25)/2 * ln 2
        got = multiclass_loss([0.0, 0.0], 0, spec_of("cyclical", gamma_lc=2.0, gamma_hc=2.0), xi=0.5)
        assert got == pytest.approx(1.25 * LN2, rel=1e-15)

    def test_rejects_bad_target(self):
        with pytest.raises(ValueError):
            multiclass_loss([0.0, 0.0], 2, spec_of("ce"))
        with pytest.raises(ValueError):
            multiclass_loss([0.0, 0.0], -1, spec_of("ce"))

    def test_rejects_bad_xi(self):
        with pytest.raises(ValueError):
            multiclass_loss([0.0, 0.0], 0, spec_of("ce"), xi=1.5)
        with pytest.raises(ValueError):
            multiclass_loss([0.0, 0.0], 0, spec_of("ce"), xi=float("nan"))

    def test_asl_decomposition_binary(self):
        # one-vs-all on C=2: target positive term plus the other class negative term
        z = [0.4, -0.3]
        p = softmax(z)
        spec = spec_of("asym", gamma_pos=1.0, gamma_neg=4.0)
        want = asl_terms(float(p[0]), 1, 1.0, 4.0) + asl_terms(float(p[1]), 0, 1.0, 4.0)
        assert multiclass_loss(z, 0, spec) == pytest.approx(want, rel=1e-14)


class TestReductionIdentities:
    """gamma and xi degenerations collapse the families onto each other."""

    def draws(self, n=200):
        rng = np.random.default_rng(99)
        for _ in range(n):
            c = int(rng.integers(2, 20))
            z = rng.uniform(-5.0, 5.0, c)
            yield z, int(rng.integers(0, c)), float(rng.uniform())

    def test_fl_gamma0_is_ce(self):
        for z, t, _ in self.draws():
            assert multiclass_loss(z, t, spec_of("focal", gamma_lc=0.0)) == multiclass_loss(
                z, t, spec_of("ce")
            )

    def test_cfl_xi0_is_fl(self):
        spec_c = spec_of("cyclical", gamma_lc=2.0, gamma_hc=3.0)
        spec_f = spec_of("focal", gamma_lc=2.0)
        for z, t, _ in self.draws():
            assert multiclass_loss(z, t, spec_c, xi=0.0) == multiclass_loss(z, t, spec_f)

    def test_cfl_gamma00_any_xi_is_ce(self):
        spec_c = spec_of("cyclical", gamma_lc=0.0, gamma_hc=0.0)
        for z, t, x in self.draws():
            assert multiclass_loss(z, t, spec_c, xi=x) == multiclass_loss(z, t, spec_of("ce"))

    def test_casl_xi0_is_asl(self):
        spec_c = spec_of("asym-cyclical", gamma_pos=1.0, gamma_neg=4.0, gamma_hc=2.0)
        spec_a = spec_of("asym", gamma_pos=1.0, gamma_neg=4.0)
        for z, t, _ in self.draws():
            assert multiclass_loss(z, t, spec_c, xi=0.0) == multiclass_loss(z, t, spec_a)

    def test_cfl_xi1_is_hc_weighted_ce(self):
        spec_c = spec_of("cyclical", gamma_lc=2.0, gamma_hc=3.0)
        for z, t, _ in self.draws():
            p = softmax(z)
            qt = min(max(float(p[t]), EPS_PROB), 1.0 - EPS_PROB)
            want = (1.0 + qt) ** 3.0 * multiclass_loss(z, t, spec_of("ce"))
            got = multiclass_loss(z, t, spec_c, xi=1.0)
            assert got == pytest.approx(want, abs=1e-12)


class TestBatchLoss:
    def test_single_sample_matches_scalar(self):
        # scalar path uses libm, batch path uses vectorized kernels; they
        # agree to a couple of ulp, not always bitwise
        rng = np.random.default_rng(3)
        for kind, kw in [
            ("ce", {}),
            ("focal", dict(gamma_lc=2.0)),
            ("asym", dict(gamma_pos=1.0, gamma_neg=4.0)),
            ("cyclical", dict(gamma_lc=2.0, gamma_hc=2.0)),
            ("asym-cyclical", dict(gamma_pos=0.0, gamma_neg=4.0, gamma_hc=2.0)),
        ]:
            spec = spec_of(kind, **kw)
            for _ in range(20):
                z = rng.uniform(-5.0, 5.0, 10)
                t = int(rng.integers(0, 10))
                one = batch_loss(z[None, :], np.array([t]), spec, 0.375)
                ref = multiclass_loss(z, t, spec, 0.375)
                assert one == pytest.approx(ref, rel=1e-14)

    def test_mean_reduction(self):
        rng = np.random.default_rng(4)
        z = rng.uniform(-3.0, 3.0, (32, 5))
        t = rng.integers(0, 5, 32)
        spec = spec_of("cyclical", gamma_lc=2.0, gamma_hc=2.0)
        per = per_sample_losses(z, t, spec, 0.25)
        assert batch_loss(z, t, spec, 0.25) == float(per.mean())

    def test_order_invariance_of_samples(self):
        rng = np.random.default_rng(5)
        z = rng.uniform(-3.0, 3.0, (16, 4))
        t = rng.integers(0, 4, 16)
        spec = spec_of("asym", gamma_pos=0.0, gamma_neg=4.0)
        per = per_sample_losses(z, t, spec)
        perm = rng.permutation(16)
        per2 = per_sample_losses(z[perm], t[perm], spec)
        np.testing.assert_array_equal(per[perm], per2)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            batch_loss(np.zeros((3, 4)), np.zeros(2, dtype=np.int64), spec_of("ce"))

    def test_rejects_float_targets(self):
        with pytest.raises(ValueError):
            batch_loss(np.zeros((2, 3)), np.array([0.0, 1.0]), spec_of("ce"))
