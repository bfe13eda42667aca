"""Real interference alignment with receiver cooperation, at signal level.

Each EN stacks ``n_d`` layers of integer constellation symbols (scaled copies
of {0, 1, ..., Q-1}) behind per-layer precoder gains built from products of
the channel coefficients.  The gains satisfy

    h11 * g[1][i] == h12 * g[2][i-1]      and
    h22 * g[2][i] == h21 * g[1][i-1]      for i >= 2,

so at UE 1 layer a_i lands exactly on top of b_{i-1} (and mirrored at UE 2):
the receiver sees n_d + 1 aligned values instead of 2 n_d separate ones.
Nearest-point demodulation over the aligned product set recovers them; the
UEs then swap their even-numbered aligned sums over the D2D link, and an
integer subtraction chain peels out every individual symbol.

Demodulation here is uncoded exhaustive search, the desk-scale verifiable
core of the argument; rate accounting uses log2(Q) bits per layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Csi, LatencyBreakdown, draw_csi, ndt_from_latency

DEFAULT_SEARCH_CAP = 10**7


class SearchSpaceError(RuntimeError):
    """Raised when an exhaustive search would exceed its candidate cap."""


class ConstellationInfeasibleError(ValueError):
    """Raised when the power budget cannot support a 2-point constellation."""


@dataclass(frozen=True)
class PrecoderGains:
    """Per-EN, per-layer complex gains, shape (2, n_d)."""

    n_d: int
    g: np.ndarray

    def __post_init__(self) -> None:
        if self.g.shape != (2, self.n_d):
            raise ValueError(f"gain array must be (2, {self.n_d})")


@dataclass(frozen=True)
class IaConfig:
    """Constellation and power parameters of one alignment run.

    ``a`` is the constellation step, tied to the size by
    a = q ** ((n_d - 1)/2 + eps_prime); ``rho`` is the power-normalization
    constant that ties q to the budget via q = rho * P ** (1/(n_d+1+2 eps')).
    """

    n_d: int
    q: int
    a: float
    eps_prime: float
    rho: float
    power: float

    def __post_init__(self) -> None:
        if self.n_d < 3 or self.n_d % 2 == 0:
            raise ValueError(f"n_d must be odd and >= 3, got {self.n_d}")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.eps_prime <= 0.0:
            raise ValueError("eps_prime must be positive")
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")
        if self.power <= 1.0:
            raise ValueError("power must exceed 1")
        expected = float(self.q) ** ((self.n_d - 1) / 2.0 + self.eps_prime)
        if abs(self.a - expected) > 1e-9 * expected:
            raise ValueError("a is inconsistent with q and eps_prime")

    @property
    def d_min_lower_bound(self) -> float:
        """Worst-case guaranteed distance A / (2Q)^((n_d-1)/2 + eps'/2).

        The exponent slack must be strictly below eps_prime for the bound to
        grow with the power budget; half of eps_prime is used throughout.
        """
        if self.q == 1:
            return math.inf
        return self.a / (2.0 * self.q) ** ((self.n_d - 1) / 2.0 + self.eps_prime / 2.0)


@dataclass(frozen=True)
class LayerSymbols:
    """One EN's n_d constellation symbols, stored as integer indices."""

    indices: tuple[int, ...]
    scale: float

    @property
    def values(self) -> np.ndarray:
        return self.scale * np.asarray(self.indices, dtype=float)


@dataclass(frozen=True)
class AlignedObservation:
    """Demodulated aligned layers at one UE.

    Index 0 is a clean own symbol (range Q), indices 1..n_d-1 are pairwise
    sums (range 2Q-1), index n_d is the peer's top symbol (range Q).
    """

    indices: tuple[int, ...]
    scale: float
    q: int

    @property
    def values(self) -> np.ndarray:
        return self.scale * np.asarray(self.indices, dtype=float)


@dataclass(frozen=True)
class SicResult:
    """Symbols recovered by the subtraction chain, plus a sanity flag.

    ``in_range`` is False when some intermediate fell outside {0..Q-1},
    which can only happen after an upstream demodulation error.
    """

    symbols: tuple[int, ...]
    in_range: bool


def precoder_gains(csi: Csi, n_d: int) -> PrecoderGains:
    """Closed-form alignment gains.

    Odd layers use (h11 h22)^((n_d-i)/2) * (h12 h21)^((i-1)/2) at both ENs;
    even layers use (h11 h22)^((n_d-i-1)/2) * (h12 h21)^((i-2)/2) scaled by
    h_{m'm'} h_{mm'} at EN m.  Layer 1 therefore carries (h11 h22)^((n_d-1)/2)
    at both ENs.
    """
    if n_d < 3 or n_d % 2 == 0:
        raise ValueError(f"n_d must be odd and >= 3, got {n_d}")
    direct = csi.h11 * csi.h22
    cross = csi.h12 * csi.h21
    g = np.empty((2, n_d), dtype=complex)
    for i in range(1, n_d + 1):
        if i % 2 == 1:
            val = direct ** ((n_d - i) // 2) * cross ** ((i - 1) // 2)
            g[0, i - 1] = val
            g[1, i - 1] = val
        else:
            base = direct ** ((n_d - i - 1) // 2) * cross ** ((i - 2) // 2)
            g[0, i - 1] = base * csi.h22 * csi.h12
            g[1, i - 1] = base * csi.h11 * csi.h21
    return PrecoderGains(n_d=n_d, g=g)


def alignment_residual(gains: PrecoderGains, csi: Csi) -> float:
    """Worst relative violation of the two alignment identities."""
    g = gains.g
    worst = 0.0
    for i in range(1, gains.n_d):  # 0-based layer i corresponds to index i+1
        lhs1 = csi.h11 * g[0, i]
        rhs1 = csi.h12 * g[1, i - 1]
        lhs2 = csi.h22 * g[1, i]
        rhs2 = csi.h21 * g[0, i - 1]
        worst = max(
            worst,
            abs(lhs1 - rhs1) / abs(lhs1),
            abs(lhs2 - rhs2) / abs(lhs2),
        )
    return worst


def effective_gains(gains: PrecoderGains, csi: Csi, ue: int) -> np.ndarray:
    """Gains of the n_d + 1 aligned values seen at one UE."""
    if ue == 1:
        own = csi.h11 * gains.g[0]
        tail = csi.h12 * gains.g[1, -1]
    elif ue == 2:
        own = csi.h22 * gains.g[1]
        tail = csi.h21 * gains.g[0, -1]
    else:
        raise ValueError(f"ue must be 1 or 2, got {ue}")
    return np.concatenate([own, [tail]])


def _gain_row_sums(gains: PrecoderGains) -> float:
    return float(max(np.abs(gains.g[0]).sum(), np.abs(gains.g[1]).sum()))


def _power_margin(gains: PrecoderGains, mode: str) -> float:
    """Gain-dependent factor M such that (A Q)^2 <= P / M keeps power legal.

    Peak mode bounds the worst-case amplitude A (Q-1) * sum|g|; average mode
    bounds E|x|^2 = A^2 (sum|g|^2 Var(k) + |sum g|^2 (E k)^2) for symbols
    uniform on {0..Q-1}, using the Q-independent limits Var <= Q^2/12 and
    (E k)^2 <= Q^2/4.
    """
    if mode == "peak":
        return _gain_row_sums(gains) ** 2
    if mode == "average":
        return float(
            max(
                np.abs(gains.g[m]).dot(np.abs(gains.g[m])) / 12.0
                + abs(gains.g[m].sum()) ** 2 / 4.0
                for m in (0, 1)
            )
        )
    raise ValueError(f"unknown power mode {mode!r}")


def unrounded_constellation_size(
    csi: Csi, n_d: int, power: float, eps_prime: float, power_mode: str = "peak"
) -> float:
    """Pre-rounding value rho * P^(1/(n_d+1+2 eps')) of the constellation size."""
    gains = precoder_gains(csi, n_d)
    exponent = 1.0 / (n_d + 1.0 + 2.0 * eps_prime)
    rho = _power_margin(gains, power_mode) ** (-exponent)
    return rho * power**exponent


def select_constellation(
    csi: Csi, n_d: int, power: float, eps_prime: float, power_mode: str = "peak"
) -> IaConfig:
    """Pick (Q, A, rho) for a power budget.

    rho is the largest scale the power constraint allows (peak amplitude in
    "peak" mode, expected power under uniform symbols in "average" mode), Q
    is its floored product with P^(1/(n_d+1+2 eps')) clamped up to 2, and A
    follows from the step/size invariant.  Rounding only shrinks the realized
    power, so the constraint survives it.

    Raises:
        ConstellationInfeasibleError: if even Q = 2 overshoots the budget.
    """
    if power <= 1.0:
        raise ValueError("power must exceed 1")
    if eps_prime <= 0.0:
        raise ValueError("eps_prime must be positive")
    gains = precoder_gains(csi, n_d)
    exponent = 1.0 / (n_d + 1.0 + 2.0 * eps_prime)
    margin = _power_margin(gains, power_mode)
    rho = margin ** (-exponent)
    q = max(2, math.floor(rho * power**exponent))
    a = float(q) ** ((n_d - 1) / 2.0 + eps_prime)
    if (a * q) ** 2 * margin > power * (1.0 + 1e-12):
        raise ConstellationInfeasibleError(
            f"power {power:g} cannot support a 2-point constellation at n_d={n_d}"
        )
    return IaConfig(n_d=n_d, q=q, a=a, eps_prime=eps_prime, rho=rho, power=power)


def config_from_q(csi: Csi, n_d: int, q: int, eps_prime: float) -> IaConfig:
    """Build a config with an explicit constellation size.

    The power budget is derived as the peak transmit power of the resulting
    constellation (floored at 4 so the NDT normalization stays defined), so
    the power invariant holds with equality for any non-degenerate channel.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    gains = precoder_gains(csi, n_d)
    a = float(q) ** ((n_d - 1) / 2.0 + eps_prime)
    peak_amp = a * (q - 1) * _gain_row_sums(gains)
    power = max(peak_amp**2, 4.0)
    exponent = 1.0 / (n_d + 1.0 + 2.0 * eps_prime)
    rho = q / power**exponent
    return IaConfig(n_d=n_d, q=q, a=a, eps_prime=eps_prime, rho=rho, power=power)


def encode(a: LayerSymbols, b: LayerSymbols, gains: PrecoderGains) -> tuple[complex, complex]:
    """Superpose the layered symbols: x_m = sum_i g[m][i] * symbol_i."""
    if len(a.indices) != gains.n_d or len(b.indices) != gains.n_d:
        raise ValueError("symbol count must match the layer count")
    x1 = complex(np.dot(gains.g[0], a.values))
    x2 = complex(np.dot(gains.g[1], b.values))
    return x1, x2


def receive(
    x1: complex, x2: complex, csi: Csi, noise: tuple[complex, complex] | None = None
) -> tuple[complex, complex]:
    """Channel outputs y_k = h_k1 x1 + h_k2 x2 + z_k."""
    z1, z2 = noise if noise is not None else (0.0, 0.0)
    y1 = csi.h11 * x1 + csi.h12 * x2 + z1
    y2 = csi.h21 * x1 + csi.h22 * x2 + z2
    return y1, y2


def draw_unit_noise(rng: np.random.Generator) -> complex:
    """Circularly-symmetric complex Gaussian sample with unit variance."""
    return complex(rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2.0)


def layer_ranges(n_d: int, q: int) -> tuple[int, ...]:
    """Alphabet sizes of the aligned values: (Q, 2Q-1, ..., 2Q-1, Q)."""
    return (q,) + (2 * q - 1,) * (n_d - 1) + (q,)


class AlignedDemodulator:
    """Exhaustive nearest-point demodulator for one UE.

    Precomputes the full noiseless received set (product of the aligned
    alphabets) once so repeated channel uses only pay an argmin.
    """

    def __init__(
        self,
        gains: PrecoderGains,
        csi: Csi,
        cfg: IaConfig,
        ue: int,
        cap: int = DEFAULT_SEARCH_CAP,
    ) -> None:
        self.cfg = cfg
        self.ue = ue
        self.ranges = layer_ranges(cfg.n_d, cfg.q)
        count = math.prod(self.ranges)
        if count > cap:
            raise SearchSpaceError(
                f"aligned search space {count} exceeds cap {cap}"
            )
        eff = effective_gains(gains, csi, ue)
        points = np.zeros(1, dtype=complex)
        for size, gain in zip(self.ranges, eff):
            step = (cfg.a * gain) * np.arange(size)
            points = (points[:, None] + step[None, :]).ravel()
        self._points = points

    @property
    def candidate_count(self) -> int:
        return self._points.size

    def demodulate(self, y: complex) -> AlignedObservation:
        flat = int(np.argmin(np.abs(self._points - y)))
        combo = np.unravel_index(flat, self.ranges)
        return AlignedObservation(
            indices=tuple(int(c) for c in combo), scale=self.cfg.a, q=self.cfg.q
        )


def demodulate_layers(
    y: complex,
    gains: PrecoderGains,
    csi: Csi,
    cfg: IaConfig,
    ue: int,
    cap: int = DEFAULT_SEARCH_CAP,
) -> AlignedObservation:
    """Nearest aligned tuple to ``y`` over the full product alphabet."""
    return AlignedDemodulator(gains, csi, cfg, ue, cap=cap).demodulate(y)


def min_distance(
    gains: PrecoderGains,
    csi: Csi,
    cfg: IaConfig,
    ue: int,
    cap: int = DEFAULT_SEARCH_CAP,
) -> float:
    """Exact minimum pairwise distance of the noiseless received set.

    Computed over candidate differences: every difference of two valid
    aligned tuples lies on the centered grid with per-slot ranges
    (2Q-1, 4Q-3, ..., 4Q-3, 2Q-1) and vice versa, so the minimum over that
    grid (zero excluded) equals the minimum pairwise distance.  A singleton
    set (Q = 1) has infinite distance by convention.
    """
    if cfg.q == 1:
        return math.inf
    diff_ranges = (
        (2 * cfg.q - 1,)
        + (4 * cfg.q - 3,) * (cfg.n_d - 1)
        + (2 * cfg.q - 1,)
    )
    count = math.prod(diff_ranges)
    if count > cap:
        raise SearchSpaceError(f"difference grid {count} exceeds cap {cap}")
    eff = effective_gains(gains, csi, ue)
    values = np.zeros(1, dtype=complex)
    for size, gain in zip(diff_ranges, eff):
        offsets = np.arange(size) - (size - 1) // 2
        values = (values[:, None] + (cfg.a * gain) * offsets[None, :]).ravel()
    center = np.ravel_multi_index(
        tuple((size - 1) // 2 for size in diff_ranges), diff_ranges
    )
    dist = np.abs(values)
    dist[center] = np.inf  # exclude the zero difference
    return float(dist.min())


def d2d_exchange(
    obs1: AlignedObservation, obs2: AlignedObservation
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Even-numbered aligned sums each UE forwards to its peer.

    Positions 2, 4, ..., n_d - 1 (1-based): (n_d - 1)/2 elements per message,
    each one of 2Q - 1 values; accounting charges log2(2Q) bits per element.
    """
    n_d = len(obs1.indices) - 1
    v1 = tuple(obs1.indices[1 : n_d - 1 : 2])
    v2 = tuple(obs2.indices[1 : n_d - 1 : 2])
    return v1, v2


def sic_resolve(
    obs: AlignedObservation, v_other: Sequence[int], ue: int
) -> SicResult:
    """Peel individual symbols out of the aligned sums.

    At UE 1 the chain starts from the clean a_1, subtracts it from the
    forwarded b_2 + a_1, subtracts that from the observed a_3 + b_2, and so
    on; the final slot contributes the peer's top symbol for free.  All
    arithmetic is on integer indices, so a correct demodulation propagates
    no error at all.  Out-of-range intermediates flag an upstream
    demodulation error instead of raising.
    """
    if ue not in (1, 2):
        raise ValueError(f"ue must be 1 or 2, got {ue}")
    c = obs.indices
    n_d = len(c) - 1
    if len(v_other) != (n_d - 1) // 2:
        raise ValueError("peer message has the wrong number of elements")
    symbols = [c[0]]
    prev = c[0]
    for pos in range(2, n_d + 1):  # 1-based layer position
        if pos % 2 == 0:
            val = int(v_other[pos // 2 - 1]) - prev
        else:
            val = c[pos - 1] - prev
        symbols.append(val)
        prev = val
    symbols.append(c[n_d])
    in_range = all(0 <= s < obs.q for s in symbols)
    return SicResult(symbols=tuple(symbols), in_range=in_range)


@dataclass(frozen=True)
class IaDeliveryReport:
    """Monte-Carlo outcome of the alignment pipeline.

    ``symbol_error_rate`` comes from exact nearest-point demodulation when
    ``exact_demod`` is True; otherwise it is the margin error rate, the
    fraction of (use, UE) events where the noise magnitude reached half the
    guaranteed minimum distance (a sufficient condition for demodulation
    errors, usable at constellation sizes no exhaustive search can touch).
    """

    config: IaConfig
    symbol_error_rate: float
    margin_error_rate: float
    exact_demod: bool
    latency: LatencyBreakdown
    ndt_estimate: float
    n_uses: int
    peak_power_ratio: float


def _aligned_truth(a_idx: np.ndarray, b_idx: np.ndarray, ue: int) -> tuple[int, ...]:
    n_d = a_idx.size
    own, other = (a_idx, b_idx) if ue == 1 else (b_idx, a_idx)
    vals = [int(own[0])]
    vals += [int(own[i] + other[i - 1]) for i in range(1, n_d)]
    vals.append(int(other[n_d - 1]))
    return tuple(vals)


def _resolved_truth(a_idx: np.ndarray, b_idx: np.ndarray, ue: int) -> tuple[int, ...]:
    n_d = a_idx.size
    own, other = (a_idx, b_idx) if ue == 1 else (b_idx, a_idx)
    out = [int(own[p - 1]) if p % 2 == 1 else int(other[p - 1]) for p in range(1, n_d + 1)]
    out.append(int(other[n_d - 1]))
    return tuple(out)


def run_ia_delivery(
    seed: int,
    n_d: int,
    eps_prime: float,
    power: float,
    r_d: float,
    n_uses: int,
    noiseless: bool = False,
    demod: str = "auto",
    power_mode: str = "peak",
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> IaDeliveryReport:
    """Run the full pipeline over fresh symbols and account its latency.

    Per channel use each UE gains n_d - 1 fresh layers of log2(Q) bits, so a
    run of ``n_uses`` uses delivers L = n_uses (n_d - 1) log2(Q) bits per UE
    with t_e = n_uses and t_d = t_e * log2(2Q) (n_d-1) / (2 r_d log2(P)).

    ``demod`` selects the error estimator: "exact" demands nearest-point
    demodulation (raising if the candidate set exceeds ``search_cap``),
    "margin" uses the minimum-distance margin event only, and "auto" picks
    exact when it fits the cap.  Noise draws depend on the seed but not on
    the power budget, so margin error rates are monotone over a power ladder
    by construction.
    """
    if r_d <= 0.0:
        raise ValueError("the alignment scheme needs r_d > 0")
    if n_uses < 1:
        raise ValueError("n_uses must be >= 1")
    if demod not in ("auto", "exact", "margin"):
        raise ValueError(f"unknown demod mode {demod!r}")

    csi = draw_csi(seed)
    gains = precoder_gains(csi, n_d)
    cfg = select_constellation(csi, n_d, power, eps_prime, power_mode=power_mode)
    count = math.prod(layer_ranges(n_d, cfg.q))
    exact = demod == "exact" or (demod == "auto" and count <= search_cap)
    demods = None
    if exact:
        demods = {
            ue: AlignedDemodulator(gains, csi, cfg, ue, cap=search_cap) for ue in (1, 2)
        }

    rng_symbols = np.random.default_rng([seed, 0x5EED])
    rng_noise = np.random.default_rng([seed, 0x401E])
    threshold = cfg.d_min_lower_bound / 2.0

    sym_errors = 0
    margin_events = 0
    peak_ratio = 0.0
    for _ in range(n_uses):
        a_idx = rng_symbols.integers(0, cfg.q, size=n_d)
        b_idx = rng_symbols.integers(0, cfg.q, size=n_d)
        z1 = 0j if noiseless else draw_unit_noise(rng_noise)
        z2 = 0j if noiseless else draw_unit_noise(rng_noise)
        a = LayerSymbols(indices=tuple(int(v) for v in a_idx), scale=cfg.a)
        b = LayerSymbols(indices=tuple(int(v) for v in b_idx), scale=cfg.a)
        x1, x2 = encode(a, b, gains)
        peak_ratio = max(peak_ratio, abs(x1) ** 2 / power, abs(x2) ** 2 / power)
        y1, y2 = receive(x1, x2, csi, noise=(z1, z2))
        margin_events += int(abs(z1) >= threshold) + int(abs(z2) >= threshold)
        if exact:
            assert demods is not None
            obs1 = demods[1].demodulate(y1)
            obs2 = demods[2].demodulate(y2)
            v1, v2 = d2d_exchange(obs1, obs2)
            res1 = sic_resolve(obs1, v2, ue=1)
            res2 = sic_resolve(obs2, v1, ue=2)
            truth1 = _resolved_truth(a_idx, b_idx, ue=1)
            truth2 = _resolved_truth(a_idx, b_idx, ue=2)
            sym_errors += sum(x != t for x, t in zip(res1.symbols, truth1))
            sym_errors += sum(x != t for x, t in zip(res2.symbols, truth2))

    margin_rate = margin_events / (2.0 * n_uses)
    ser = sym_errors / (2.0 * n_uses * (n_d + 1)) if exact else margin_rate

    bits_per_ue = n_uses * (n_d - 1) * math.log2(cfg.q)
    t_e = float(n_uses)
    t_d = t_e * (math.log2(2 * cfg.q) * (n_d - 1) / 2.0) / (r_d * math.log2(power))
    lat = LatencyBreakdown(t_f=0.0, t_e=t_e, t_d=t_d)
    estimate = ndt_from_latency(lat, bits_per_ue, power)
    return IaDeliveryReport(
        config=cfg,
        symbol_error_rate=ser,
        margin_error_rate=margin_rate,
        exact_demod=exact,
        latency=lat,
        ndt_estimate=estimate,
        n_uses=n_uses,
        peak_power_ratio=peak_ratio,
    )
