from itertools import product

import pytest

from pairqss.numerics import IDENTITY_ATOL, LinkParams
from pairqss.photonics import (
    SourceKind,
    SourceModel,
    bipartite_stats,
    ghz_source_gain,
    x_parity_error,
    x_total_error,
    x_total_error_sum_form,
    z_marginal_error,
)


def ideal_link(eta: float = 1.0, dark: float = 0.0, e_d: float = 0.01) -> LinkParams:
    return LinkParams(
        distance_km=0.0,
        detector_efficiency=eta,
        dark_count=dark,
        misalignment_x=e_d,
        misalignment_z=e_d,
        attenuation_db_per_km=0.0,
    )


class TestPairSource:
    def test_gain_at_unit_efficiency(self):
        # All three denominators collapse to (1 + mu/2)^2.
        stats = bipartite_stats(SourceModel(mu=0.04), ideal_link(), ideal_link())
        assert stats.gain == pytest.approx(1.0 - 1.0 / 1.02**2, abs=IDENTITY_ATOL)

    def test_vanishing_mu_gives_vanishing_gain(self):
        stats = bipartite_stats(SourceModel(mu=1e-12), ideal_link(eta=0.5), ideal_link(eta=0.5))
        assert stats.gain < 1e-10

    def test_mu_zero_rejected(self):
        with pytest.raises(ValueError, match="mu"):
            bipartite_stats(SourceModel(mu=0.0), ideal_link(), ideal_link())

    def test_negative_mu_rejected_at_construction(self):
        with pytest.raises(ValueError):
            SourceModel(mu=-0.1)

    def test_vacuum_dominated_channel_reports_random_errors(self):
        # Gain floors to ~0 when there is no light and no dark counts.
        a = LinkParams(distance_km=2000.0, detector_efficiency=0.5, dark_count=0.0,
                       attenuation_db_per_km=0.5)
        stats = bipartite_stats(SourceModel(mu=1e-9), a, a)
        assert stats.error_x == 0.5
        assert stats.error_z == 0.5

    def test_gain_non_increasing_in_distance(self):
        source = SourceModel(mu=0.04)
        gains = []
        for d in range(0, 250, 25):
            link = LinkParams(distance_km=float(d), dark_count=1e-7)
            gains.append(bipartite_stats(source, link, link).gain)
        assert all(a >= b for a, b in zip(gains, gains[1:]))
        assert all(0.0 <= g <= 1.0 for g in gains)

    def test_errors_bounded_by_random_noise(self):
        source = SourceModel(mu=0.04)
        for d, e_d in product((0, 50, 150), (0.0, 0.01, 0.25, 0.5)):
            link = LinkParams(
                distance_km=float(d),
                dark_count=1e-6,
                misalignment_x=e_d,
                misalignment_z=e_d,
            )
            stats = bipartite_stats(source, link, link)
            assert 0.0 <= stats.error_x <= 0.5 + IDENTITY_ATOL
            assert 0.0 <= stats.error_z <= 0.5 + IDENTITY_ATOL


class TestPerfectSource:
    def test_gain_is_squared_efficiency(self):
        link = ideal_link(eta=0.7)
        stats = bipartite_stats(SourceModel(kind=SourceKind.PERFECT), link, link)
        assert stats.gain == pytest.approx(0.49, abs=IDENTITY_ATOL)

    def test_error_reduces_to_misalignment_at_unit_yield(self):
        stats = bipartite_stats(SourceModel(kind=SourceKind.PERFECT), ideal_link(), ideal_link())
        assert stats.gain == pytest.approx(1.0, abs=IDENTITY_ATOL)
        assert stats.error_x == pytest.approx(0.01, abs=IDENTITY_ATOL)
        assert stats.error_z == pytest.approx(0.01, abs=IDENTITY_ATOL)

    def test_symmetric_gain_matches_two_party_multiparty_gain(self):
        link = LinkParams(distance_km=50.0, detector_efficiency=0.9,
                          dark_count=1e-5, attenuation_db_per_km=0.2)
        stats = bipartite_stats(SourceModel(kind=SourceKind.PERFECT), link, link)
        assert stats.gain == pytest.approx(ghz_source_gain([link, link]), abs=IDENTITY_ATOL)


class TestMultipartyGain:
    def test_lossless_noiseless(self):
        links = [ideal_link()] * 3
        assert ghz_source_gain(links) == pytest.approx(1.0, abs=IDENTITY_ATOL)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_symmetric_power_law(self, n):
        link = ideal_link(eta=0.3, dark=0.0)
        assert ghz_source_gain([link] * n) == pytest.approx(0.3**n, rel=1e-12)

    def test_product_against_term_by_term(self):
        link = LinkParams(distance_km=50.0, detector_efficiency=0.9,
                          dark_count=1e-5, attenuation_db_per_km=0.2)
        # eta = 0.9 * 10^-1 = 0.09 per arm.
        per_arm = 1.0 - (1.0 - 1e-5) * (1.0 - 0.09)
        expected = per_arm**4
        assert ghz_source_gain([link] * 4) == pytest.approx(expected, rel=1e-12)
        assert ghz_source_gain([link] * 4) == pytest.approx(6.5636539624837e-5, rel=1e-10)

    def test_rejects_single_party(self):
        with pytest.raises(ValueError):
            ghz_source_gain([ideal_link()])


def brute_force_parity_error(e: float, n: int) -> float:
    """Enumerate error patterns over n-1 independent pairs; odd parity is an error."""
    total = 0.0
    for pattern in product((0, 1), repeat=n - 1):
        p = 1.0
        for bit in pattern:
            p *= e if bit else (1.0 - e)
        if sum(pattern) % 2 == 1:
            total += p
    return total


class TestXTotalError:
    def test_two_party_identity(self):
        for e in (0.0, 0.01, 0.3, 0.5):
            assert x_total_error(e, 2) == pytest.approx(e, abs=IDENTITY_ATOL)

    def test_three_party_value(self):
        # Brute-force enumeration over the two pair-error events gives 0.0198.
        assert brute_force_parity_error(0.01, 3) == pytest.approx(0.0198, abs=IDENTITY_ATOL)
        assert x_total_error(0.01, 3) == pytest.approx(0.0198, abs=IDENTITY_ATOL)

    def test_half_is_fixed_point(self):
        for n in (2, 4, 9):
            assert x_total_error(0.5, n) == pytest.approx(0.5, abs=IDENTITY_ATOL)

    @pytest.mark.parametrize("n", range(2, 13))
    def test_sum_form_equals_closed_form(self, n):
        for i in range(0, 501):
            e = i / 1000.0
            assert abs(x_total_error_sum_form(e, n) - x_total_error(e, n)) <= 1e-12

    @pytest.mark.parametrize("n", [2, 3, 5, 7])
    def test_matches_brute_force(self, n):
        for e in (0.0, 0.01, 0.1, 0.37):
            assert x_total_error(e, n) == pytest.approx(brute_force_parity_error(e, n), abs=1e-12)

    def test_monotone_in_n(self):
        for e in (0.01, 0.1, 0.3):
            values = [x_total_error(e, n) for n in range(2, 13)]
            assert all(a <= b + IDENTITY_ATOL for a, b in zip(values, values[1:]))

    def test_monotone_in_error(self):
        for n in (3, 6):
            values = [x_total_error(i / 100.0, n) for i in range(0, 51)]
            assert all(a <= b + IDENTITY_ATOL for a, b in zip(values, values[1:]))

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            x_total_error(0.01, 1)
        with pytest.raises(ValueError):
            x_total_error_sum_form(0.01, 1)

    def test_sum_form_capped(self):
        with pytest.raises(ValueError):
            x_total_error_sum_form(0.01, 65)

    def test_heterogeneous_parity_error_reduces_to_closed_form(self):
        assert x_parity_error([0.02, 0.02, 0.02]) == pytest.approx(
            x_total_error(0.02, 4), abs=IDENTITY_ATOL
        )
        assert x_parity_error([0.01, 0.03]) == pytest.approx(
            0.01 * 0.97 + 0.03 * 0.99, abs=IDENTITY_ATOL
        )


class TestZMarginalError:
    def test_identity(self):
        assert z_marginal_error(0.0) == 0.0
        assert z_marginal_error(0.01) == 0.01
        assert z_marginal_error(0.37) == 0.37

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            z_marginal_error(1.4)
