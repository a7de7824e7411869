"""Closed-form channel statistics for bipartite pair distribution.

Covers the coincidence gain and error rates of a parametric pair source of
mean photon-pair number mu, the single-pair (perfect source) limit, the
all-party coincidence gain of a multipartite-state source used for
comparison, and the aggregation of per-pair errors into the n-party
X-basis parity error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .numerics import GAIN_FLOOR, LinkParams, check_probability, link_efficiency

# Error rate contributed by pure random noise (vacuum / dark coincidences).
E_RANDOM = 0.5

# The exact-binomial sum form is exposed only up to this participant count.
MAX_SUM_FORM_N = 64


class SourceKind(str, Enum):
    PERFECT = "perfect"
    PAIR = "pair"


@dataclass(frozen=True)
class SourceModel:
    """Entangled-pair source: either ideal single-pair or mean-number mu."""

    kind: SourceKind = SourceKind.PAIR
    mu: float = 0.04

    def __post_init__(self) -> None:
        if self.mu < 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu!r}")


@dataclass(frozen=True)
class BipartiteStats:
    """Per-pulse coincidence gain and basis error rates of one dealer-player pair."""

    gain: float
    error_x: float
    error_z: float

    def __post_init__(self) -> None:
        check_probability(self.gain, "gain")
        check_probability(self.error_x, "error_x")
        check_probability(self.error_z, "error_z")


def _pair_source_gain(mu: float, eta_a: float, eta_b: float, y0_a: float, y0_b: float) -> float:
    da = (1.0 + eta_a * mu / 2.0) ** 2
    db = (1.0 + eta_b * mu / 2.0) ** 2
    dab = (1.0 + eta_a * mu / 2.0 + eta_b * mu / 2.0 - eta_a * eta_b * mu / 2.0) ** 2
    return 1.0 - (1.0 - y0_a) / da - (1.0 - y0_b) / db + (1.0 - y0_a) * (1.0 - y0_b) / dab


def _pair_source_error_gain_product(
    mu: float, eta_a: float, eta_b: float, e_d: float, gain: float
) -> float:
    # Product form E * Q; dividing by Q recovers the error rate.
    num = 2.0 * (E_RANDOM - e_d) * eta_a * eta_b * (mu / 2.0) * (1.0 + mu / 2.0)
    den = (
        (1.0 + eta_a * mu / 2.0)
        * (1.0 + eta_b * mu / 2.0)
        * (1.0 + eta_a * mu / 2.0 + eta_b * mu / 2.0 - eta_a * eta_b * mu / 2.0)
    )
    return E_RANDOM * gain - num / den


def _single_pair_yield(eta_a: float, eta_b: float, y0_a: float, y0_b: float) -> float:
    click_a = 1.0 - (1.0 - y0_a) * (1.0 - eta_a)
    click_b = 1.0 - (1.0 - y0_b) * (1.0 - eta_b)
    return click_a * click_b


def bipartite_stats(source: SourceModel, link_a: LinkParams, link_b: LinkParams) -> BipartiteStats:
    """Coincidence gain and X/Z error rates for one dealer-player pair.

    ``link_a`` is the dealer arm and ``link_b`` the player arm.  For a pair
    source the closed forms in mu are used; for a perfect source the
    single-pair yield and its error formula apply.  When the gain is below
    ``GAIN_FLOOR`` the channel is vacuum dominated and both error rates are
    reported as the random-noise value 1/2.
    """
    eta_a = link_efficiency(link_a)
    eta_b = link_efficiency(link_b)
    y0_a = link_a.dark_count
    y0_b = link_b.dark_count

    if source.kind is SourceKind.PAIR:
        if source.mu <= 0.0:
            raise ValueError("pair source requires mu > 0")
        gain = _pair_source_gain(source.mu, eta_a, eta_b, y0_a, y0_b)
        if gain < GAIN_FLOOR:
            return BipartiteStats(gain=max(gain, 0.0), error_x=E_RANDOM, error_z=E_RANDOM)
        ex = _pair_source_error_gain_product(source.mu, eta_a, eta_b, link_b.misalignment_x, gain)
        ez = _pair_source_error_gain_product(source.mu, eta_a, eta_b, link_b.misalignment_z, gain)
        return BipartiteStats(gain=gain, error_x=ex / gain, error_z=ez / gain)

    gain = _single_pair_yield(eta_a, eta_b, y0_a, y0_b)
    if gain < GAIN_FLOOR:
        return BipartiteStats(gain=max(gain, 0.0), error_x=E_RANDOM, error_z=E_RANDOM)
    ex = E_RANDOM - (E_RANDOM - link_b.misalignment_x) * eta_a * eta_b / gain
    ez = E_RANDOM - (E_RANDOM - link_b.misalignment_z) * eta_a * eta_b / gain
    return BipartiteStats(gain=gain, error_x=ex, error_z=ez)


def ghz_source_gain(links: list[LinkParams]) -> float:
    """All-party coincidence gain for a source emitting one n-party state per pulse.

    ``links`` lists the arms of all n participants (dealer first).
    """
    if len(links) < 2:
        raise ValueError(f"need at least 2 participants, got {len(links)}")
    gain = 1.0
    for link in links:
        eta = link_efficiency(link)
        gain *= 1.0 - (1.0 - link.dark_count) * (1.0 - eta)
    return gain


def x_total_error(e_pair: float, n: int) -> float:
    """Total X-basis parity error across n participants, closed form.

    An X-basis round is wrong when an odd number of the n-1 players disagree
    with the dealer; with independent per-pair error ``e_pair`` this is
    (1 - (1 - 2e)^(n-1)) / 2.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    e_pair = check_probability(e_pair, "e_pair")
    return 0.5 * (1.0 - (1.0 - 2.0 * e_pair) ** (n - 1))


def x_total_error_sum_form(e_pair: float, n: int) -> float:
    """Total X-basis parity error as an explicit odd-weight binomial sum.

    Test oracle for :func:`x_total_error`; uses exact integer binomial
    coefficients, so n is capped at ``MAX_SUM_FORM_N``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > MAX_SUM_FORM_N:
        raise ValueError(f"sum form limited to n <= {MAX_SUM_FORM_N}, got {n}")
    e_pair = check_probability(e_pair, "e_pair")
    total = 0.0
    for j in range(n // 2):
        k = 2 * j + 1
        total += math.comb(n - 1, k) * e_pair**k * (1.0 - e_pair) ** (n - 2 - 2 * j)
    return total


def x_parity_error(e_pairs: list[float]) -> float:
    """Odd-parity error probability for independent per-pair errors.

    Generalizes :func:`x_total_error` to per-player error rates; reduces to
    it when all entries are equal.
    """
    if not e_pairs:
        raise ValueError("need at least one pair error rate")
    prod = 1.0
    for e in e_pairs:
        prod *= 1.0 - 2.0 * check_probability(e, "e_pair")
    return 0.5 * (1.0 - prod)


def z_marginal_error(e_pair: float) -> float:
    """Z-basis disagreement rate between the dealer and one player.

    The broadcast-and-XOR step adds no noise of its own, so the marginal
    equals the per-pair Z error regardless of the participant count.
    """
    return check_probability(e_pair, "e_pair")
