"""Shared domain types for the 2x2 cache-aided downlink with D2D cooperation.

The system has two edge nodes (ENs) serving two user equipments (UEs) over a
quasi-static complex Gaussian channel.  Each EN caches a fraction ``mu`` of
every file, receives cloud data over a fronthaul pipe of rate ``r_f * log2(P)``
bits per downlink channel use, and the UEs share an out-of-band D2D link of
rate ``r_d * log2(P)``.

Delivery latency is normalized against the time an interference-free link
needs to push one bit at high SNR, giving a dimensionless delivery time (NDT).
Normalized delivery times are plain floats here; ``math.inf`` marks infeasible
configurations and is handled by all comparisons.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# Dimensionless normalized delivery time.  Closed-form values are >= 1;
# finite-length estimates may dip below 1 and are reported raw.
Ndt = float

INFINITE_NDT: Ndt = math.inf

_CSI_MAX_DRAWS = 100


@dataclass(frozen=True)
class SystemParams:
    """Scenario tuple (mu, r_f, r_d, N, L, P).

    Attributes:
        mu: fractional cache size per EN, in [0, 1].
        r_f: fronthaul rate multiplier (>= 0).
        r_d: D2D rate multiplier (>= 0).
        n_files: library size N (>= 2).
        file_bits: file size L in bits (>= 1).
        power: transmit power budget P on a linear scale (> 0).
    """

    mu: float
    r_f: float
    r_d: float
    n_files: int = 2
    file_bits: int = 1024
    power: float = 2.0**20

    def __post_init__(self) -> None:
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if self.r_f < 0.0 or not math.isfinite(self.r_f):
            raise ValueError(f"r_f must be finite and >= 0, got {self.r_f}")
        if self.r_d < 0.0 or not math.isfinite(self.r_d):
            raise ValueError(f"r_d must be finite and >= 0, got {self.r_d}")
        if self.n_files < 2:
            raise ValueError(f"need at least two files, got {self.n_files}")
        if self.file_bits < 1:
            raise ValueError(f"file_bits must be >= 1, got {self.file_bits}")
        if not self.power > 0.0:
            raise ValueError(f"power must be positive, got {self.power}")


@dataclass(frozen=True)
class Csi:
    """One realization of the 2x2 complex channel matrix.

    Entries are generic: finite, nonzero, and with nonzero determinant, which
    holds almost surely for draws from a continuous distribution and is what
    the delivery schemes rely on (channel inversion, alignment).
    """

    h11: complex
    h12: complex
    h21: complex
    h22: complex

    def __post_init__(self) -> None:
        for name in ("h11", "h12", "h21", "h22"):
            h = getattr(self, name)
            if not (cmath.isfinite(h) and h != 0):
                raise ValueError(f"channel entry {name} must be finite and nonzero")
        if self.determinant == 0:
            raise ValueError("channel matrix must be invertible")

    @property
    def determinant(self) -> complex:
        return self.h11 * self.h22 - self.h12 * self.h21

    def matrix(self) -> np.ndarray:
        """Channel as a 2x2 ndarray with rows indexed by UE."""
        return np.array([[self.h11, self.h12], [self.h21, self.h22]])


@dataclass(frozen=True)
class LatencyBreakdown:
    """Durations of the three delivery phases, in downlink channel uses."""

    t_f: float
    t_e: float
    t_d: float

    def __post_init__(self) -> None:
        for name in ("t_f", "t_e", "t_d"):
            t = getattr(self, name)
            if not (math.isfinite(t) and t >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {t}")

    @property
    def total(self) -> float:
        return self.t_f + self.t_e + self.t_d


@dataclass(frozen=True)
class DemandVector:
    """Requested file indices (0-based) for UE 1 and UE 2."""

    d1: int
    d2: int

    def __post_init__(self) -> None:
        if self.d1 < 0 or self.d2 < 0:
            raise ValueError("file indices must be non-negative")

    def check_against(self, n_files: int) -> None:
        if self.d1 >= n_files or self.d2 >= n_files:
            raise ValueError(f"demand {self} out of range for {n_files} files")

    @property
    def is_worst_case(self) -> bool:
        return self.d1 != self.d2


def draw_csi(rng_seed: int) -> Csi:
    """Sample a generic channel realization, deterministic in the seed.

    Entries are i.i.d. circularly-symmetric complex Gaussian with unit
    variance.  Draws violating the genericity invariants are rejected and
    resampled, so downstream schemes never see measure-zero singularities.

    Raises:
        RuntimeError: if 100 consecutive draws are degenerate, which signals
            a broken random source rather than bad luck.
    """
    rng = np.random.default_rng(rng_seed)
    for _ in range(_CSI_MAX_DRAWS):
        re = rng.standard_normal(4)
        im = rng.standard_normal(4)
        h = (re + 1j * im) / math.sqrt(2.0)
        try:
            return Csi(complex(h[0]), complex(h[1]), complex(h[2]), complex(h[3]))
        except ValueError:
            continue
    raise RuntimeError("random source produced 100 degenerate channel draws")


def ndt_from_latency(lat: LatencyBreakdown, file_bits: float, power: float) -> Ndt:
    """Normalize raw phase durations into a delivery-time estimate.

    The reference time for one bit is ``1 / log2(power)`` channel uses, so the
    estimate is ``(t_f + t_e + t_d) * log2(power) / file_bits``.  This is the
    per-realization, finite-length figure; the >= 1 floor only binds in the
    limit and is deliberately not enforced here.

    Raises:
        ValueError: if ``power <= 1`` (normalization undefined) or
            ``file_bits < 1``.
    """
    if power <= 1.0:
        raise ValueError(f"power must exceed 1 for NDT normalization, got {power}")
    if file_bits < 1:
        raise ValueError(f"file_bits must be >= 1, got {file_bits}")
    return lat.total * math.log2(power) / file_bits
