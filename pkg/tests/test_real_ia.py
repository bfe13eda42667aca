import math

import numpy as np
import pytest

from fran_d2d.model import draw_csi
from fran_d2d.ndt_formulas import delta_nd
from fran_d2d.real_ia import (
    AlignedDemodulator,
    ConstellationInfeasibleError,
    IaConfig,
    LayerSymbols,
    SearchSpaceError,
    _aligned_truth,
    _resolved_truth,
    alignment_residual,
    config_from_q,
    d2d_exchange,
    demodulate_layers,
    effective_gains,
    encode,
    layer_ranges,
    min_distance,
    precoder_gains,
    receive,
    run_ia_delivery,
    select_constellation,
    sic_resolve,
    unrounded_constellation_size,
)


def symbols(idx, scale):
    return LayerSymbols(tuple(int(v) for v in idx), scale)


def plant_and_receive(csi, gains, cfg, a_idx, b_idx, noise=None):
    a = symbols(a_idx, cfg.a)
    b = symbols(b_idx, cfg.a)
    x1, x2 = encode(a, b, gains)
    return receive(x1, x2, csi, noise=noise)


class TestPrecoderGains:
    def test_first_layer_formula(self):
        for seed in range(10):
            csi = draw_csi(seed)
            for nd in (3, 5, 7):
                gains = precoder_gains(csi, nd)
                want = (csi.h11 * csi.h22) ** ((nd - 1) // 2)
                assert gains.g[0, 0] == pytest.approx(want)
                assert gains.g[1, 0] == pytest.approx(want)

    def test_alignment_identities(self):
        for seed in range(30):
            csi = draw_csi(seed)
            for nd in (3, 5, 7):
                gains = precoder_gains(csi, nd)
                assert alignment_residual(gains, csi) <= 1e-10

    def test_single_identity_directly(self):
        csi = draw_csi(11)
        gains = precoder_gains(csi, 5)
        lhs = csi.h11 * gains.g[0, 1]
        rhs = csi.h12 * gains.g[1, 0]
        assert abs(lhs - rhs) / abs(lhs) <= 1e-10

    def test_effective_gains_distinct(self):
        for seed in range(20):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 3)
            eff = effective_gains(gains, csi, ue=1)
            assert len(eff) == 4
            for i in range(4):
                for j in range(i + 1, 4):
                    assert abs(eff[i] - eff[j]) > 1e-12

    def test_even_layer_count_rejected(self):
        with pytest.raises(ValueError):
            precoder_gains(draw_csi(0), 4)


class TestSelectConstellation:
    def test_power_constraint_exhaustive_peak(self):
        # Every symbol choice must respect the peak budget in peak mode.
        for seed in range(10):
            csi = draw_csi(seed)
            cfg = select_constellation(csi, 3, power=2.0**14, eps_prime=0.5)
            gains = precoder_gains(csi, 3)
            grid = np.stack(
                np.meshgrid(*[np.arange(cfg.q)] * 3, indexing="ij"), axis=-1
            ).reshape(-1, 3)
            worst = 0.0
            for idx in grid:
                x1, x2 = encode(symbols(idx, cfg.a), symbols(idx, cfg.a), gains)
                worst = max(worst, abs(x1) ** 2, abs(x2) ** 2)
            assert worst <= cfg.power * (1.0 + 1e-9)

    def test_average_power_constraint(self):
        # Expected power under uniform symbols stays within budget.
        rng = np.random.default_rng(0)
        for seed in range(10):
            csi = draw_csi(seed)
            cfg = select_constellation(
                csi, 3, power=2.0**14, eps_prime=0.5, power_mode="average"
            )
            gains = precoder_gains(csi, 3)
            total = np.zeros(2)
            trials = 4000
            for _ in range(trials):
                a = rng.integers(0, cfg.q, 3)
                b = rng.integers(0, cfg.q, 3)
                x1, x2 = encode(symbols(a, cfg.a), symbols(b, cfg.a), gains)
                total += (abs(x1) ** 2, abs(x2) ** 2)
            assert (total / trials <= cfg.power * 1.05).all()

    def test_doubling_power_scales_unrounded_size(self):
        csi = draw_csi(4)
        nd, eps = 3, 0.5
        q1 = unrounded_constellation_size(csi, nd, 2.0**20, eps)
        q2 = unrounded_constellation_size(csi, nd, 2.0**21, eps)
        assert q2 / q1 == pytest.approx(2.0 ** (1.0 / (nd + 1 + 2 * eps)), rel=1e-12)

    def test_high_snr_size_exponent(self):
        csi = draw_csi(4)
        nd, eps = 3, 0.5
        target = 1.0 / (nd + 1 + 2 * eps)
        devs = []
        for k in (16, 32, 64):
            cfg = select_constellation(csi, nd, 2.0**k, eps)
            devs.append(abs(math.log2(cfg.q) / k - target))
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < 0.02

    def test_infeasible_power_raises(self):
        csi = draw_csi(0)
        with pytest.raises(ConstellationInfeasibleError):
            select_constellation(csi, 7, power=4.0, eps_prime=2.0)

    def test_rounding_never_below_two(self):
        cfg = select_constellation(draw_csi(1), 3, power=2.0**12, eps_prime=3.0)
        assert cfg.q >= 2


class TestEncodeReceive:
    def test_all_zero_symbols(self):
        csi = draw_csi(2)
        gains = precoder_gains(csi, 3)
        cfg = config_from_q(csi, 3, 4, eps_prime=0.5)
        x1, x2 = encode(symbols([0, 0, 0], cfg.a), symbols([0, 0, 0], cfg.a), gains)
        assert x1 == 0 and x2 == 0
        y1, y2 = receive(x1, x2, csi)
        assert y1 == 0 and y2 == 0

    def test_single_layer_linearity(self):
        csi = draw_csi(2)
        gains = precoder_gains(csi, 3)
        cfg = config_from_q(csi, 3, 4, eps_prime=0.5)
        x1, _ = encode(symbols([1, 0, 0], cfg.a), symbols([0, 0, 0], cfg.a), gains)
        assert x1 == pytest.approx(gains.g[0, 0] * cfg.a)

    def test_dimension_mismatch_rejected(self):
        csi = draw_csi(2)
        gains = precoder_gains(csi, 5)
        with pytest.raises(ValueError):
            encode(symbols([0, 0, 0], 1.0), symbols([0, 0, 0, 0, 0], 1.0), gains)

    def test_received_signal_matches_aligned_form(self):
        # Noiseless y1 equals sum of effective gains times aligned values.
        rng = np.random.default_rng(0)
        for seed in range(20):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 5)
            cfg = config_from_q(csi, 5, 4, eps_prime=0.5)
            a_idx = rng.integers(0, 4, 5)
            b_idx = rng.integers(0, 4, 5)
            y1, y2 = plant_and_receive(csi, gains, cfg, a_idx, b_idx)
            for ue, y in ((1, y1), (2, y2)):
                eff = effective_gains(gains, csi, ue)
                truth = np.array(_aligned_truth(a_idx, b_idx, ue), dtype=float)
                recon = np.dot(eff, cfg.a * truth)
                assert abs(y - recon) <= 1e-9 * abs(y)

    def test_noise_power_calibration(self):
        from fran_d2d.real_ia import draw_unit_noise

        rng = np.random.default_rng(5)
        zs = np.array([draw_unit_noise(rng) for _ in range(10**5)])
        assert np.mean(np.abs(zs) ** 2) == pytest.approx(1.0, rel=0.05)


class TestDemodulation:
    def test_zero_noise_exact_recovery(self):
        rng = np.random.default_rng(1)
        for seed in range(25):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 3)
            cfg = config_from_q(csi, 3, 4, eps_prime=0.5)
            demod = AlignedDemodulator(gains, csi, cfg, ue=1)
            assert demod.candidate_count == 784
            a_idx = rng.integers(0, 4, 3)
            b_idx = rng.integers(0, 4, 3)
            y1, _ = plant_and_receive(csi, gains, cfg, a_idx, b_idx)
            assert demod.demodulate(y1).indices == _aligned_truth(a_idx, b_idx, 1)

    def test_degenerate_single_point_constellation(self):
        csi = draw_csi(3)
        gains = precoder_gains(csi, 3)
        cfg = IaConfig(n_d=3, q=1, a=1.0, eps_prime=0.5, rho=0.5, power=4.0)
        obs = demodulate_layers(0j, gains, csi, cfg, ue=1)
        assert obs.indices == (0, 0, 0, 0)

    def test_noise_within_margin_never_errs(self):
        # |z| < d_min/2 is a sufficient condition for correct demodulation.
        rng = np.random.default_rng(42)
        for seed in range(15):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 3)
            cfg = config_from_q(csi, 3, 4, eps_prime=0.5)
            d_min = min_distance(gains, csi, cfg, ue=1)
            demod = AlignedDemodulator(gains, csi, cfg, ue=1)
            for _ in range(10):
                a_idx = rng.integers(0, 4, 3)
                b_idx = rng.integers(0, 4, 3)
                phase = rng.uniform(0.0, 2.0 * math.pi)
                z = 0.49 * d_min * complex(math.cos(phase), math.sin(phase))
                y1, _ = plant_and_receive(csi, gains, cfg, a_idx, b_idx, noise=(z, 0j))
                assert demod.demodulate(y1).indices == _aligned_truth(a_idx, b_idx, 1)

    def test_error_rate_decreases_with_power(self):
        ladder = (2.0**16, 2.0**20, 2.0**24)
        rates = []
        for power in ladder:
            vals = [
                run_ia_delivery(
                    seed, 3, 1.0, power, 2.0, 8, demod="exact", search_cap=3 * 10**7
                ).symbol_error_rate
                for seed in range(25)
            ]
            rates.append(float(np.mean(vals)))
        assert rates[0] >= rates[1] >= rates[2]
        assert rates[2] < rates[0]

    def test_search_cap_enforced(self):
        csi = draw_csi(0)
        gains = precoder_gains(csi, 3)
        cfg = config_from_q(csi, 3, 8, eps_prime=0.5)
        with pytest.raises(SearchSpaceError):
            AlignedDemodulator(gains, csi, cfg, ue=1, cap=100)


class TestMinDistance:
    def test_singleton_is_infinite(self):
        csi = draw_csi(3)
        gains = precoder_gains(csi, 3)
        cfg = IaConfig(n_d=3, q=1, a=1.0, eps_prime=0.5, rho=0.5, power=4.0)
        assert min_distance(gains, csi, cfg, ue=1) == math.inf

    def test_positive_for_generic_channels(self):
        for seed in range(50):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 3)
            cfg = config_from_q(csi, 3, 2, eps_prime=0.5)
            for ue in (1, 2):
                assert min_distance(gains, csi, cfg, ue) > 0.0

    def test_matches_pairwise_bruteforce(self):
        # The difference-grid oracle equals the literal pairwise minimum.
        for seed in range(5):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 3)
            cfg = config_from_q(csi, 3, 2, eps_prime=0.5)
            demod = AlignedDemodulator(gains, csi, cfg, ue=1)
            pts = demod._points
            diffs = np.abs(pts[:, None] - pts[None, :])
            diffs[np.diag_indices_from(diffs)] = np.inf
            assert min_distance(gains, csi, cfg, 1) == pytest.approx(float(diffs.min()))

    def test_grows_with_power(self):
        for seed in range(10):
            csi = draw_csi(seed)
            gains = precoder_gains(csi, 3)
            prev = 0.0
            for power in (2.0**20, 2.0**30, 2.0**40):
                cfg = select_constellation(csi, 3, power, eps_prime=3.0)
                d = min_distance(gains, csi, cfg, ue=1)
                assert d > prev
                prev = d

    def test_cap_enforced(self):
        csi = draw_csi(0)
        gains = precoder_gains(csi, 3)
        cfg = config_from_q(csi, 3, 16, eps_prime=0.5)
        with pytest.raises(SearchSpaceError):
            min_distance(gains, csi, cfg, ue=1, cap=1000)


class TestD2dAndSic:
    def _pipeline(self, seed, nd, q, corrupt=None):
        csi = draw_csi(seed)
        gains = precoder_gains(csi, nd)
        cfg = config_from_q(csi, nd, q, eps_prime=0.5)
        rng = np.random.default_rng(seed)
        a_idx = rng.integers(0, q, nd)
        b_idx = rng.integers(0, q, nd)
        if corrupt == "zero_symbols":
            a_idx = np.zeros(nd, dtype=int)
            b_idx = np.zeros(nd, dtype=int)
        y1, y2 = plant_and_receive(csi, gains, cfg, a_idx, b_idx)
        obs1 = demodulate_layers(y1, gains, csi, cfg, 1)
        obs2 = demodulate_layers(y2, gains, csi, cfg, 2)
        return a_idx, b_idx, obs1, obs2

    def test_message_lengths_and_alphabet(self):
        a_idx, b_idx, obs1, obs2 = self._pipeline(0, 5, 4)
        v1, v2 = d2d_exchange(obs1, obs2)
        assert len(v1) == len(v2) == 2
        assert all(0 <= v <= 2 * 4 - 2 for v in v1 + v2)

    def test_three_layer_message_is_single_element(self):
        _, _, obs1, obs2 = self._pipeline(1, 3, 4)
        v1, v2 = d2d_exchange(obs1, obs2)
        assert len(v1) == len(v2) == 1

    def test_zero_observations_zero_messages(self):
        _, _, obs1, obs2 = self._pipeline(2, 3, 4, corrupt="zero_symbols")
        v1, v2 = d2d_exchange(obs1, obs2)
        assert v1 == (0,) and v2 == (0,)

    def test_sic_recovers_planted_symbols(self):
        for seed in range(100):
            a_idx, b_idx, obs1, obs2 = self._pipeline(seed, 3, 4)
            v1, v2 = d2d_exchange(obs1, obs2)
            r1 = sic_resolve(obs1, v2, ue=1)
            r2 = sic_resolve(obs2, v1, ue=2)
            assert r1.in_range and r2.in_range
            assert r1.symbols == _resolved_truth(a_idx, b_idx, 1)
            assert r2.symbols == _resolved_truth(a_idx, b_idx, 2)

    def test_all_zero_resolves_to_zero(self):
        _, _, obs1, obs2 = self._pipeline(5, 5, 2, corrupt="zero_symbols")
        v1, v2 = d2d_exchange(obs1, obs2)
        r1 = sic_resolve(obs1, v2, ue=1)
        assert r1.symbols == (0,) * 6 and r1.in_range

    def test_corrupted_sum_detected(self):
        # With zero planted symbols, bumping a forwarded sum forces a
        # negative intermediate, which the range check flags.
        _, _, obs1, obs2 = self._pipeline(7, 3, 4, corrupt="zero_symbols")
        v1, v2 = d2d_exchange(obs1, obs2)
        bad_v2 = (v2[0] + 1,)
        r1 = sic_resolve(obs1, bad_v2, ue=1)
        assert not r1.in_range

    def test_wrong_message_length_rejected(self):
        _, _, obs1, _ = self._pipeline(3, 5, 2)
        with pytest.raises(ValueError):
            sic_resolve(obs1, (0, 0, 0), ue=1)


class TestRunIaDelivery:
    def test_noiseless_error_free(self):
        for seed in range(10):
            rep = run_ia_delivery(
                seed, 3, 0.5, 2.0**16, 2.0, n_uses=10, noiseless=True
            )
            assert rep.exact_demod
            assert rep.symbol_error_rate == 0.0

    def test_peak_power_respected(self):
        for seed in range(10):
            rep = run_ia_delivery(seed, 3, 0.5, 2.0**16, 2.0, 10, noiseless=True)
            assert rep.peak_power_ratio <= 1.0 + 1e-9

    def test_latency_identity(self):
        rep = run_ia_delivery(0, 5, 0.5, 2.0**18, 1.5, 4, noiseless=True)
        cfg = rep.config
        eps_hat = (math.log2(cfg.power) / math.log2(cfg.q) - (cfg.n_d + 1)) / 2.0
        expected = ((cfg.n_d + 1 + 2 * eps_hat) / (cfg.n_d - 1)) * (
            1.0
            + (math.log2(2 * cfg.q) / math.log2(cfg.power))
            * (cfg.n_d - 1)
            / (2.0 * 1.5)
        )
        assert rep.ndt_estimate == pytest.approx(expected, rel=1e-9)

    def test_margin_rates_monotone_over_power_ladder(self):
        rates = []
        for power in (2.0**24, 2.0**30, 2.0**36):
            vals = [
                run_ia_delivery(
                    seed, 3, 0.05, power, 2.0, 10, demod="margin", power_mode="average"
                ).symbol_error_rate
                for seed in range(40)
            ]
            rates.append(float(np.mean(vals)))
        assert rates[0] >= rates[1] >= rates[2]

    def test_finite_power_estimate_near_formula(self):
        vals = [
            run_ia_delivery(
                seed, 3, 0.05, 2.0**36, 2.0, 2, demod="margin", power_mode="average"
            ).ndt_estimate
            for seed in range(50)
        ]
        assert abs(np.mean(vals) - delta_nd(3, 2.0)) / delta_nd(3, 2.0) < 0.10

    def test_layer_ranges(self):
        assert layer_ranges(3, 4) == (4, 7, 7, 4)

    def test_zero_d2d_rate_rejected(self):
        with pytest.raises(ValueError):
            run_ia_delivery(0, 3, 0.5, 2.0**16, 0.0, 1)
