"""Blend weight schedule: pinned anchor points and ramp properties."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclical_focal import CycleSchedule, DenominatorConvention, xi, xi_table

EN = DenominatorConvention.EN
EN1 = DenominatorConvention.EN_MINUS_ONE


class TestAnchors:
    def test_factor4_en_anchor_points(self):
        sched = CycleSchedule(200, 4.0, EN)
        assert xi(sched, 0) == 1.0
        assert xi(sched, 50) == 0.0  # 4 * 50 / 200 hits the turn exactly
        assert xi(sched, 125) == 0.5  # halfway back up: (2.5 - 1) / 3
        assert xi(sched, 199) == pytest.approx(2.98 / 3.0, abs=1e-12)

    def test_factor1_en_minus_one_ends_at_zero(self):
        sched = CycleSchedule(200, 1.0, EN1)
        table = xi_table(sched)
        assert table[0] == 1.0
        assert table[-1] == 0.0

    def test_factor2_en_triangle(self):
        sched = CycleSchedule(200, 2.0, EN)
        assert xi(sched, 0) == 1.0
        assert xi(sched, 100) == 0.0
        assert xi(sched, 50) == 0.5
        assert xi(sched, 150) == 0.5

    def test_factor1_en_never_reaches_zero(self):
        sched = CycleSchedule(200, 1.0, EN)
        table = xi_table(sched)
        assert min(table) > 0.0
        assert table[-1] == pytest.approx(1.0 - 199.0 / 200.0, abs=1e-15)

    def test_single_epoch_minus_one_convention(self):
        # denominator collapses to zero; the ramp has no width
        sched = CycleSchedule(1, 4.0, EN1)
        assert xi(sched, 0) == 1.0


class TestValidation:
    def test_rejects_epoch_out_of_range(self):
        sched = CycleSchedule(10, 2.0, EN)
        with pytest.raises(ValueError):
            xi(sched, 10)
        with pytest.raises(ValueError):
            xi(sched, -1)

    def test_rejects_bad_factor(self):
        with pytest.raises(ValueError):
            CycleSchedule(10, 0.5, EN)
        with pytest.raises(ValueError):
            CycleSchedule(10, float("inf"), EN)

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError):
            CycleSchedule(0, 1.0, EN)

    def test_convention_coerced_from_string(self):
        assert CycleSchedule(10, 1.0, "en-minus-one").convention is EN1


class TestProperties:
    @given(
        st.integers(1, 500),
        st.floats(1.0, 16.0),
        st.sampled_from([EN, EN1]),
    )
    @settings(max_examples=200)
    def test_bounded_unit_interval(self, total, factor, conv):
        sched = CycleSchedule(total, factor, conv)
        for value in xi_table(sched):
            assert 0.0 <= value <= 1.0

    @given(st.integers(2, 300), st.floats(1.0, 16.0))
    @settings(max_examples=100)
    def test_starts_at_one(self, total, factor):
        assert xi(CycleSchedule(total, factor, EN), 0) == 1.0

    @given(st.integers(4, 300))
    @settings(max_examples=100)
    def test_v_shape_factor4(self, total):
        # strictly decreasing before the vertex, strictly increasing after;
        # the pair straddling the vertex can go either way
        import math

        sched = CycleSchedule(total, 4.0, EN)
        table = xi_table(sched)
        vertex = sched.denominator / 4.0
        for i in range(total - 1):
            if i + 1 <= math.floor(vertex):
                assert table[i] > table[i + 1]
            elif i >= math.ceil(vertex):
                assert table[i] < table[i + 1]

    def test_table_matches_pointwise(self):
        sched = CycleSchedule(37, 3.0, EN1)
        assert xi_table(sched) == [xi(sched, e) for e in range(37)]
