import itertools
import math

import pytest
from hypothesis import given, strategies as st

from transferlab.control_maps import (
    ControlMap,
    LimitSet,
    MultiIndex,
    RegimePoint,
    allocation_map,
    classify_regime,
    phi_alloc,
    phi_triangular,
    probe_injectivity,
    triangular_array_map,
)


class TestMultiIndex:
    def test_valid(self):
        idx = MultiIndex((3, 1, 7))
        assert idx.dim == 3
        assert idx.product == 21

    def test_rejects_zero_coordinate(self):
        with pytest.raises(ValueError):
            MultiIndex((1, 0))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            MultiIndex(())


class TestPhiTriangular:
    def test_identity_sequence(self):
        assert phi_triangular(1, (1,), lambda n: n) == (1.0, 1.0)

    def test_power_sequence(self):
        # k_4 = 16: (1/4, 8/16, 2/16)
        assert phi_triangular(4, (8, 2), lambda n: 2**n) == (0.25, 0.5, 0.125)

    def test_square_sequence(self):
        assert phi_triangular(10, (100,), lambda n: n * n) == (0.1, 1.0)

    def test_rejects_bad_stage(self):
        with pytest.raises(ValueError):
            phi_triangular(0, (1,), lambda n: n)


class TestPhiAlloc:
    def test_r0(self):
        g, d = phi_alloc(0, 2, 2)
        assert g == 1.0
        assert d == pytest.approx(math.e / 2.0, abs=1e-12)

    def test_r1(self):
        g, d = phi_alloc(1, 1, 1)
        assert g == 1.0
        assert d == pytest.approx(math.e, abs=1e-12)

    def test_r2(self):
        g, d = phi_alloc(2, 2, 1)
        assert g == 0.5
        assert d == pytest.approx(0.5 * math.e**2, abs=1e-12)

    def test_overflow_saturates_to_inf(self):
        g, d = phi_alloc(0, 10**6, 1)
        assert d == math.inf
        assert g > 0.0

    def test_values_positive_or_inf(self):
        for r, t, u in itertools.product(range(4), [1, 3, 700, 10**5], [1, 2, 10**4]):
            g, d = phi_alloc(r, t, u)
            assert g > 0.0
            assert d > 0.0  # +inf compares greater than 0


class TestClassifyRegime:
    def test_r0_poisson_g(self):
        tag = classify_regime(0, RegimePoint(0.5, 0.0))
        assert tag.is_poisson and tag.lam == pytest.approx(2.0)

    def test_r0_normal(self):
        assert classify_regime(0, RegimePoint(0.0, 0.0)).is_normal

    def test_r0_poisson_d(self):
        tag = classify_regime(0, RegimePoint(0.0, 4.0))
        assert tag.is_poisson and tag.lam == pytest.approx(0.25)

    def test_r0_off_axes_undefined(self):
        assert classify_regime(0, RegimePoint(1.0, 1.0)).kind == "undefined"

    def test_r1_normal_needs_zero_g(self):
        assert classify_regime(1, RegimePoint(0.0, 0.0)).is_normal
        assert classify_regime(1, RegimePoint(1.0, 0.0)).kind == "undefined"

    def test_r2_poisson(self):
        tag = classify_regime(2, RegimePoint(0.0, 2.0))
        assert tag.is_poisson and tag.lam == pytest.approx(0.5)

    def test_infinite_coordinates_undefined(self):
        assert classify_regime(0, RegimePoint(math.inf, 0.0)).kind == "undefined"
        assert classify_regime(3, RegimePoint(0.0, math.inf)).kind == "undefined"

    def test_lambda_monotone_in_g(self):
        lams = [classify_regime(0, RegimePoint(g, 0.0)).lam for g in (0.1, 0.5, 1.0, 10.0)]
        assert lams == sorted(lams, reverse=True)

    @given(
        st.integers(min_value=0, max_value=5),
        st.floats(min_value=0, allow_nan=False),
        st.floats(min_value=0, allow_nan=False),
    )
    def test_total_and_deterministic(self, r, g, d):
        point = RegimePoint(g, d)
        first = classify_regime(r, point)
        assert first == classify_regime(r, point)
        assert first.kind in ("normal", "poisson", "undefined")


class TestProbeInjectivity:
    def test_triangular_grid(self):
        cmap = triangular_array_map(lambda n: 2**n, d=1)
        probe = [MultiIndex((n, k)) for n in range(1, 101) for k in range(1, 101)]
        ok, witness = probe_injectivity(cmap, probe)
        assert ok and witness is None

    def test_constant_map_collides(self):
        constant = ControlMap(
            dimension_in=1,
            dimension_out=1,
            evaluate=lambda idx: (1.0,),
            delta=LimitSet(contains=lambda p: False, description="empty"),
        )
        ok, witness = probe_injectivity(constant, [MultiIndex((1,)), MultiIndex((2,))])
        assert not ok
        assert witness == (MultiIndex((1,)), MultiIndex((2,)))

    @pytest.mark.parametrize("r", [0, 1, 2])
    def test_allocation_maps(self, r):
        cmap = allocation_map(r)
        probe = [(t, u) for t in range(1, 51) for u in range(1, 51)]
        ok, _ = probe_injectivity(cmap, probe)
        assert ok

    def test_allocation_map_large_grid(self):
        # 10^4-point probe per the discreteness contract
        cmap = allocation_map(0)
        probe = [(t, u) for t in range(1, 101) for u in range(1, 101)]
        ok, _ = probe_injectivity(cmap, probe)
        assert ok

    def test_empty_probe_rejected(self):
        with pytest.raises(ValueError):
            probe_injectivity(allocation_map(0), [])


def test_triangular_map_delta_membership():
    cmap = triangular_array_map(lambda n: 2**n, d=2)
    assert cmap.delta.contains((0.0, 0.5, 1.0))
    assert not cmap.delta.contains((0.1, 0.5, 1.0))


def test_allocation_map_delta_membership():
    assert allocation_map(0).delta.contains((1.5, 0.0))
    assert allocation_map(0).delta.contains((0.0, 2.0))
    assert not allocation_map(1).delta.contains((1.5, 0.0))
    assert allocation_map(2).delta.contains((0.0, 3.0))
