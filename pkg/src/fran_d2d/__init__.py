"""Delivery-latency bounds and scheme simulations for a 2x2 cache-aided
edge network with device-to-device receiver cooperation."""

from .model import (
    Csi,
    DemandVector,
    LatencyBreakdown,
    Ndt,
    SystemParams,
    draw_csi,
    ndt_from_latency,
)
from .ndt_formulas import (
    Regime,
    classify_regime,
    delta_nd,
    delta_x,
    det_ndt,
    lower_bound,
    minimum_ndt,
    zf_compress_forward_ndt,
)

__all__ = [
    "Csi",
    "DemandVector",
    "LatencyBreakdown",
    "Ndt",
    "Regime",
    "SystemParams",
    "classify_regime",
    "delta_nd",
    "delta_x",
    "det_ndt",
    "draw_csi",
    "lower_bound",
    "minimum_ndt",
    "ndt_from_latency",
    "zf_compress_forward_ndt",
]

__version__ = "0.1.0"
