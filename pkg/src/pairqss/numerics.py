"""Shared numeric primitives: binary entropy, fiber-link efficiency, clamping."""

from __future__ import annotations

import math
from dataclasses import dataclass

# Absolute tolerance for closed-form identities (all formulas are smooth
# double-precision expressions at the magnitudes we care about).
IDENTITY_ATOL = 1e-12
# Tolerance for state-vector norms and probability-table sums.
NORM_ATOL = 1e-10
# Gains below this are treated as vacuum-dominated (see photonics).
GAIN_FLOOR = 1e-15


def check_probability(value: float, name: str) -> float:
    """Validate that ``value`` is a probability, snapping float dust at the ends."""
    if -IDENTITY_ATOL <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + IDENTITY_ATOL:
        return 1.0
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def clamp_nonnegative(value: float) -> float:
    return value if value > 0.0 else 0.0


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy h(x) in bits, with h(0) = h(1) = 0."""
    x = check_probability(x, "entropy argument")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class LinkParams:
    """One fiber arm from the network provider to a single participant.

    ``dark_count`` is the per-pulse background click probability and
    ``misalignment_x``/``misalignment_z`` the basis-dependent misalignment
    error rates of the detection setup.
    """

    distance_km: float
    detector_efficiency: float = 0.78
    dark_count: float = 1e-7
    misalignment_x: float = 0.01
    misalignment_z: float = 0.01
    attenuation_db_per_km: float = 0.16

    def __post_init__(self) -> None:
        if self.distance_km < 0.0:
            raise ValueError(f"distance_km must be >= 0, got {self.distance_km!r}")
        if self.attenuation_db_per_km < 0.0:
            raise ValueError(
                f"attenuation_db_per_km must be >= 0, got {self.attenuation_db_per_km!r}"
            )
        for name in ("detector_efficiency", "dark_count", "misalignment_x", "misalignment_z"):
            check_probability(getattr(self, name), name)


def link_efficiency(link: LinkParams) -> float:
    """Overall arm efficiency: detector efficiency times fiber transmittance."""
    loss = 10.0 ** (-link.attenuation_db_per_km * link.distance_km / 10.0)
    return link.detector_efficiency * loss
