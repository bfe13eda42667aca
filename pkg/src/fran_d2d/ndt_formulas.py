"""Closed-form minimum delivery times and the matching converse bound.

The minimum NDT of the 2x2 system is piecewise in (mu, r_f, r_d) with three
regimes.  ``minimum_ndt`` evaluates the piecewise optimum directly, while
``lower_bound`` rebuilds the same values from the three cut-set inequalities
and their regime-specific linear combinations.  The two code paths are kept
independent on purpose: their pointwise equality is the central tightness
check of the test suite.

Division conventions (chosen so every input is well defined):

* ``(1 - 2*mu) / r_f`` is 0 when the numerator is 0 regardless of ``r_f``;
  +inf when the numerator is positive and ``r_f == 0`` (uncached content with
  no fronthaul path cannot be delivered); -inf when the numerator is negative
  and ``r_f == 0``, in which case the enclosing max selects the other term.
"""

from __future__ import annotations

import enum
import math

from .model import Ndt, SystemParams


class Regime(enum.Enum):
    """Which resource dominates the (r_f, r_d) operating point."""

    BOTH_SMALL = "both_small"
    FRONTHAUL_DOMINANT = "fronthaul_dominant"
    D2D_DOMINANT = "d2d_dominant"


def _ratio(num: float, den: float) -> float:
    """num/den extended by its one-sided limits at den = 0."""
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf if num > 0.0 else -math.inf
    return num / den


def classify_regime(params: SystemParams) -> Regime:
    """Map (r_f, r_d) to its regime; boundary overlaps resolve in listed order.

    The branch expressions agree on all shared boundaries, so the tie-break
    order is a convention, not a correctness requirement.
    """
    r_f, r_d = params.r_f, params.r_d
    if r_f <= 1.0 and r_d <= 1.0:
        return Regime.BOTH_SMALL
    if r_f >= max(1.0, r_d):
        return Regime.FRONTHAUL_DOMINANT
    return Regime.D2D_DOMINANT


def _branch_both_small(mu: float, r_f: float) -> Ndt:
    return max(1.0 + mu + _ratio(1.0 - 2.0 * mu, r_f), 2.0 - mu)


def _branch_fronthaul_dominant(mu: float, r_f: float) -> Ndt:
    return 1.0 + (1.0 - mu) / r_f


def _branch_d2d_dominant(mu: float, r_f: float, r_d: float) -> Ndt:
    return max(
        1.0 + mu / r_d + _ratio(1.0 - 2.0 * mu, r_f),
        1.0 + (1.0 - mu) / r_d,
    )


def minimum_ndt(params: SystemParams) -> Ndt:
    """Minimum normalized delivery time at (mu, r_f, r_d).

    Returns +inf exactly when mu < 1/2 and r_f = 0: part of the library is
    cached nowhere and there is no fronthaul path to fill the gap.
    """
    regime = classify_regime(params)
    if regime is Regime.BOTH_SMALL:
        return _branch_both_small(params.mu, params.r_f)
    if regime is Regime.FRONTHAUL_DOMINANT:
        return _branch_fronthaul_dominant(params.mu, params.r_f)
    return _branch_d2d_dominant(params.mu, params.r_f, params.r_d)


def delta_x(r_d: float) -> Ndt:
    """Delivery time of the D2D-aided X-channel scheme: 1 + 1/(2 r_d).

    Infinite at r_d = 0: the scheme cannot run without D2D capacity.
    """
    if r_d < 0.0:
        raise ValueError(f"r_d must be >= 0, got {r_d}")
    return 1.0 + _ratio(1.0, 2.0 * r_d)


def _check_layer_count(n_d: int) -> None:
    if n_d < 3 or n_d % 2 == 0:
        raise ValueError(f"layer count must be odd and >= 3, got {n_d}")


def delta_nd(n_d: int, r_d: float) -> Ndt:
    """Finite-layer delivery time of the alignment scheme.

    ((n_d+1)/(n_d-1)) * (1 + (n_d-1) / (2 r_d (n_d+1))); decreases to
    ``delta_x(r_d)`` as the layer count grows, with gap exactly 2/(n_d-1).
    """
    _check_layer_count(n_d)
    if r_d < 0.0:
        raise ValueError(f"r_d must be >= 0, got {r_d}")
    lead = (n_d + 1.0) / (n_d - 1.0)
    return lead * (1.0 + _ratio(n_d - 1.0, 2.0 * r_d * (n_d + 1.0)))


def det_ndt(n_d: int, r_d: float) -> Ndt:
    """Finite-level delivery time of the deterministic-model scheme.

    (n_d/(n_d-1)) * (1 + (n_d-1) / (2 r_d n_d)); decreases to
    ``delta_x(r_d)`` with gap exactly 1/(n_d-1).
    """
    _check_layer_count(n_d)
    if r_d < 0.0:
        raise ValueError(f"r_d must be >= 0, got {r_d}")
    lead = n_d / (n_d - 1.0)
    return lead * (1.0 + _ratio(n_d - 1.0, 2.0 * r_d * n_d))


def zf_compress_forward_ndt(r_d: float) -> Ndt:
    """Baseline where each UE quantizes and forwards its whole signal: 1 + 1/r_d.

    Strictly worse than ``delta_x`` for every r_d > 0.
    """
    if r_d < 0.0:
        raise ValueError(f"r_d must be >= 0, got {r_d}")
    return 1.0 + _ratio(1.0, r_d)


def lower_bound(params: SystemParams) -> Ndt:
    """Converse bound assembled from the three cut-set inequalities.

    In normalized (per-bit, high-SNR) form the cuts give

        I1:  d_e + r_f * d_f + r_d * d_d >= 2 - mu
        I2:  d_f >= (1 - 2 mu) / r_f
        I3:  d_e >= 1

    where (d_f, d_e, d_d) are the normalized phase durations.  Per regime the
    bound on d_f + d_e + d_d follows from a fixed linear combination:

        both small        : max{ I1,  I1 + (1 - r_f) * I2 }
        fronthaul dominant: (I1 + (r_f - 1) * I3) / r_f
        d2d dominant      : max{ (I1 + (r_d - 1) * I3) / r_d,
                                 (I1 + (r_d - r_f) * I2 + (r_d - 1) * I3) / r_d }

    always floored at 1 (one bit per channel use is the best any link does).
    """
    mu, r_f, r_d = params.mu, params.r_f, params.r_d
    i1 = 2.0 - mu
    i2 = _ratio(1.0 - 2.0 * mu, r_f)

    regime = classify_regime(params)
    if regime is Regime.BOTH_SMALL:
        # 0*inf cannot occur: i2 is infinite only for r_f = 0, where 1-r_f = 1.
        candidates = (i1, i1 + (1.0 - r_f) * i2)
    elif regime is Regime.FRONTHAUL_DOMINANT:
        candidates = ((i1 + (r_f - 1.0)) / r_f,)
    else:
        candidates = (
            (i1 + (r_d - 1.0)) / r_d,
            (i1 + (r_d - r_f) * i2 + (r_d - 1.0)) / r_d,
        )
    return max(1.0, *candidates)
