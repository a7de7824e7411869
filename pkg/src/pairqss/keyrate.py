"""Secret-key-rate engines: asymptotic rate, finite key length, comparison rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .numerics import LinkParams, binary_entropy, check_probability, clamp_nonnegative
from .photonics import (
    SourceKind,
    SourceModel,
    bipartite_stats,
    ghz_source_gain,
    x_parity_error,
)


class BudgetError(ValueError):
    """Round accounting left no usable key or test rounds."""


@dataclass(frozen=True)
class SecurityParams:
    """Failure parameters and post-processing constants of the key analysis."""

    eps_correct: float = 1e-10
    eps_sample: float = 1e-10 / 3.0
    eps_prime: float = 1e-10 / 3.0
    q_complementarity: float = 1.0
    f_e: float = 1.12

    def __post_init__(self) -> None:
        for name in ("eps_correct", "eps_sample", "eps_prime"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
        if not 0.0 < self.q_complementarity <= 1.0:
            raise ValueError(
                f"q_complementarity must lie in (0, 1], got {self.q_complementarity!r}"
            )
        if self.f_e < 1.0:
            raise ValueError(f"f_e must be >= 1, got {self.f_e!r}")


@dataclass(frozen=True)
class FiniteBudget:
    """Round counts available to the finite-size analysis.

    ``m`` X-basis rounds are kept for key generation, ``k`` Z-basis rounds
    for parameter estimation, and ``k_i`` of those enter each dealer-player
    correlation test.
    """

    n_signals: int
    m: int
    k: int
    k_i: int

    def __post_init__(self) -> None:
        if self.n_signals <= 0:
            raise ValueError(f"n_signals must be > 0, got {self.n_signals!r}")
        if self.m < 0 or self.k < 0 or self.k_i < 0:
            raise ValueError("round counts must be >= 0")
        if self.k_i > self.k:
            raise ValueError(f"k_i ({self.k_i}) cannot exceed k ({self.k})")


@dataclass(frozen=True)
class RateReport:
    """Rates and the channel statistics they were computed from."""

    gain: float
    e_x_total: float
    e_z_marginals: list[float] = field(default_factory=list)
    rate_per_pulse: float = 0.0
    key_length: int = 0
    leak_ec_bits: float = 0.0


def asymptotic_rate(
    gain: float, e_z_marginals: list[float], e_x: float, f_e: float
) -> float:
    """Asymptotic secret bits per pulse.

    The worst single-player Z-basis marginal bounds the eavesdropper's
    information; error-correction leakage is charged at f_e times the
    entropy of the total X error.  Negative values clamp to zero.
    """
    if not e_z_marginals:
        raise ValueError("need at least one Z-basis marginal error rate")
    gain = check_probability(gain, "gain")
    worst = max(binary_entropy(e) for e in e_z_marginals)
    bracket = 1.0 - worst - f_e * binary_entropy(e_x)
    return clamp_nonnegative(gain * bracket)


def fluctuation_lambda(e_obs: float, m: int, k_i: int, eps: float) -> float:
    """Statistical-fluctuation penalty on an observed error rate.

    Random-sampling-without-replacement bound for ``k_i`` test rounds
    against ``m`` key rounds at failure probability ``eps``.  The observed
    rate is clamped away from 0 and 1/2 by half a count so the log term
    stays finite.
    """
    if m < 1 or k_i < 1:
        raise ValueError(f"m and k_i must be >= 1, got m={m}, k_i={k_i}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    e_obs = check_probability(e_obs, "e_obs")
    floor = 1.0 / (2.0 * k_i)
    e = min(max(e_obs, floor), 0.5 - floor)
    if e <= 0.0:  # k_i = 1 leaves no clamping room
        raise ValueError("k_i too small to clamp the observed error rate")

    total = float(m) + float(k_i)
    a = float(max(m, k_i))
    g = (total / (m * float(k_i))) * math.log(
        total / (2.0 * math.pi * m * float(k_i) * e * (1.0 - e) * eps**2)
    )
    if g <= 0.0:
        # The bound degenerates for very loose eps; no penalty remains.
        return 0.0
    ag = a * g / total
    lam = ((1.0 - 2.0 * e) * ag + math.sqrt(ag * ag + 4.0 * e * (1.0 - e) * g)) / (
        2.0 + 2.0 * a * ag / total
    )
    return lam


def finite_key_length(
    budget: FiniteBudget,
    sec: SecurityParams,
    e_z_marginals: list[float],
    e_x: float,
) -> int:
    """Extractable secret-key length for a finite round budget, in bits.

    Each marginal is inflated by its fluctuation penalty before entering
    the entropy bound; error correction leaks m * f_e * h(e_x) bits and the
    correctness/secrecy tests cost a constant log term.  Clamped at zero.
    """
    if not e_z_marginals:
        raise ValueError("need at least one Z-basis marginal error rate")
    m = budget.m
    worst = 0.0
    for e in e_z_marginals:
        lam = fluctuation_lambda(e, m, budget.k_i, sec.eps_sample)
        worst = max(worst, binary_entropy(min(e + lam, 0.5)))
    leak_ec = m * sec.f_e * binary_entropy(e_x)
    log_term = math.log2(1.0 / (4.0 * sec.eps_correct * sec.eps_prime**2))
    length = m * (sec.q_complementarity - worst) - leak_ec - log_term
    return int(clamp_nonnegative(math.floor(length)))


def leak_ec_bits(m: int, f_e: float, e_x: float) -> float:
    """Bits disclosed during error correction."""
    return m * f_e * binary_entropy(e_x)


def derive_budget(n_signals: int, p_x: float, gain: float) -> FiniteBudget:
    """Expected round budget from the pulse count and basis bias.

    Both parties must pick the same basis and a coincidence must occur, so
    m = floor(N * p_x^2 * Q) and k = floor(N * (1 - p_x)^2 * Q).  Every
    disclosed Z round serves every dealer-player test, hence k_i = k.
    """
    p_x = check_probability(p_x, "p_x")
    gain = check_probability(gain, "gain")
    m = math.floor(n_signals * p_x**2 * gain)
    k = math.floor(n_signals * (1.0 - p_x) ** 2 * gain)
    if m == 0:
        raise BudgetError("budget yields zero key rounds (m = 0)")
    if k == 0:
        raise BudgetError("budget yields zero test rounds (k = 0)")
    return FiniteBudget(n_signals=n_signals, m=m, k=k, k_i=k)


def ghz_protocol_rate(links: list[LinkParams], f_e: float, n: int) -> float:
    """Asymptotic rate of the comparison protocol distributing n-party states.

    Same rate formula as :func:`asymptotic_rate` but with the all-party
    coincidence gain, which decays with the n-th power of the arm
    transmittance instead of the square.  Error rates are modeled exactly
    as in the pair protocol (single-pair bipartite errors per player arm)
    so the comparison isolates the gain scaling.

    ``links`` lists all n arms, dealer first.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 participants, got {n}")
    if len(links) != n:
        raise ValueError(f"expected {n} link arms, got {len(links)}")
    gain = ghz_source_gain(links)
    perfect = SourceModel(kind=SourceKind.PERFECT)
    marginals = [bipartite_stats(perfect, links[0], link).error_z for link in links[1:]]
    e_x = x_parity_error(
        [bipartite_stats(perfect, links[0], link).error_x for link in links[1:]]
    )
    return asymptotic_rate(gain, marginals, e_x, f_e)
