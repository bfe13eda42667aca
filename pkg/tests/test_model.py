import math

import pytest
from hypothesis import given, strategies as st

from fran_d2d.model import (
    Csi,
    DemandVector,
    LatencyBreakdown,
    SystemParams,
    draw_csi,
    ndt_from_latency,
)


class TestSystemParams:
    def test_valid_params_accepted(self):
        p = SystemParams(mu=0.5, r_f=1.0, r_d=2.0, n_files=3, file_bits=100, power=64.0)
        assert p.mu == 0.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"mu": -0.1, "r_f": 0.0, "r_d": 0.0},
            {"mu": 1.1, "r_f": 0.0, "r_d": 0.0},
            {"mu": 0.5, "r_f": -1.0, "r_d": 0.0},
            {"mu": 0.5, "r_f": 0.0, "r_d": -0.5},
            {"mu": 0.5, "r_f": 0.0, "r_d": 0.0, "n_files": 1},
            {"mu": 0.5, "r_f": 0.0, "r_d": 0.0, "file_bits": 0},
            {"mu": 0.5, "r_f": 0.0, "r_d": 0.0, "power": 0.0},
        ],
    )
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SystemParams(**kwargs)


class TestCsi:
    def test_zero_entry_rejected(self):
        with pytest.raises(ValueError):
            Csi(0.0, 1.0, 1.0, 1.0)

    def test_singular_matrix_rejected(self):
        with pytest.raises(ValueError):
            Csi(1.0, 1.0, 1.0, 1.0)

    def test_matrix_layout(self):
        c = Csi(1 + 0j, 2 + 0j, 3 + 0j, 4 + 0j)
        m = c.matrix()
        assert m[0, 1] == 2 + 0j and m[1, 0] == 3 + 0j


class TestDrawCsi:
    def test_same_seed_same_channel(self):
        assert draw_csi(7) == draw_csi(7)

    def test_different_seed_different_channel(self):
        a, b = draw_csi(7), draw_csi(8)
        assert any(
            getattr(a, k) != getattr(b, k) for k in ("h11", "h12", "h21", "h22")
        )

    def test_determinant_nonzero_across_seeds(self):
        for seed in range(200):
            assert abs(draw_csi(seed).determinant) > 0

    def test_unit_variance_entries(self):
        import numpy as np

        samples = np.array(
            [[draw_csi(s).h11, draw_csi(s).h22] for s in range(2000)]
        ).ravel()
        assert abs(np.mean(np.abs(samples) ** 2) - 1.0) < 0.1


class TestLatencyBreakdown:
    def test_total(self):
        assert LatencyBreakdown(1.0, 2.0, 3.0).total == 6.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            LatencyBreakdown(-1.0, 0.0, 0.0)

    def test_infinite_rejected(self):
        with pytest.raises(ValueError):
            LatencyBreakdown(math.inf, 0.0, 0.0)


class TestNdtFromLatency:
    def test_interference_free_baseline_is_one(self):
        power = 2.0**20
        lat = LatencyBreakdown(0.0, 1000 / math.log2(power), 0.0)
        assert ndt_from_latency(lat, 1000, power) == pytest.approx(1.0)

    def test_zero_latency_gives_zero(self):
        assert ndt_from_latency(LatencyBreakdown(0.0, 0.0, 0.0), 10, 4.0) == 0.0

    def test_hand_computed_example(self):
        lat = LatencyBreakdown(10.0, 50.0, 15.0)
        assert ndt_from_latency(lat, 1000, 2.0**20) == pytest.approx(1.5)

    def test_power_at_most_one_rejected(self):
        with pytest.raises(ValueError):
            ndt_from_latency(LatencyBreakdown(0.0, 1.0, 0.0), 10, 1.0)

    @given(
        t=st.tuples(
            st.floats(0, 1e6), st.floats(0, 1e6), st.floats(0, 1e6)
        ),
        scale=st.floats(0.1, 10.0),
    )
    def test_linear_in_each_component(self, t, scale):
        lat = LatencyBreakdown(*t)
        scaled = LatencyBreakdown(t[0] * scale, t[1] * scale, t[2] * scale)
        v = ndt_from_latency(lat, 100, 16.0)
        assert ndt_from_latency(scaled, 100, 16.0) == pytest.approx(scale * v, abs=1e-9)

    @given(bits=st.integers(1, 10**6), factor=st.integers(2, 50))
    def test_inverse_homogeneous_in_file_size(self, bits, factor):
        lat = LatencyBreakdown(3.0, 5.0, 7.0)
        v1 = ndt_from_latency(lat, bits, 16.0)
        v2 = ndt_from_latency(lat, bits * factor, 16.0)
        assert v2 == pytest.approx(v1 / factor, rel=1e-12)


class TestDemandVector:
    def test_worst_case_flag(self):
        assert DemandVector(0, 1).is_worst_case
        assert not DemandVector(2, 2).is_worst_case

    def test_range_check(self):
        with pytest.raises(ValueError):
            DemandVector(0, 5).check_against(2)
