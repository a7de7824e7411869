import math

import pytest

from pairqss.numerics import (
    IDENTITY_ATOL,
    LinkParams,
    binary_entropy,
    check_probability,
    link_efficiency,
)


class TestBinaryEntropy:
    def test_endpoints_are_zero(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_maximum_at_half(self):
        assert binary_entropy(0.5) == pytest.approx(1.0, abs=IDENTITY_ATOL)

    def test_reference_value(self):
        # High-precision evaluation of the defining formula (50-digit oracle).
        assert binary_entropy(0.11) == pytest.approx(0.499915958165, abs=1e-9)

    @pytest.mark.parametrize("bad", [-0.01, 1.01, 2.0, -5.0])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            binary_entropy(bad)

    def test_symmetry(self):
        for i in range(0, 101):
            x = i / 100.0
            assert binary_entropy(x) == pytest.approx(binary_entropy(1.0 - x), abs=IDENTITY_ATOL)

    def test_bounded_by_one(self):
        assert all(binary_entropy(i / 1000.0) <= 1.0 + IDENTITY_ATOL for i in range(1001))

    def test_concave_on_grid(self):
        xs = [i / 200.0 for i in range(1, 200)]
        for a, b, c in zip(xs, xs[1:], xs[2:]):
            mid = binary_entropy(b)
            chord = 0.5 * (binary_entropy(a) + binary_entropy(c))
            assert mid >= chord - IDENTITY_ATOL


class TestLinkEfficiency:
    def test_zero_length_fiber(self):
        link = LinkParams(distance_km=0.0, detector_efficiency=0.9)
        assert link_efficiency(link) == pytest.approx(0.9, abs=IDENTITY_ATOL)

    def test_lossless_fiber(self):
        link = LinkParams(distance_km=123.0, detector_efficiency=0.78, attenuation_db_per_km=0.0)
        assert link_efficiency(link) == pytest.approx(0.78, abs=IDENTITY_ATOL)

    def test_ten_db_loss(self):
        link = LinkParams(distance_km=50.0, detector_efficiency=0.9, attenuation_db_per_km=0.2)
        assert link_efficiency(link) == pytest.approx(0.09, abs=IDENTITY_ATOL)

    def test_strictly_decreasing_in_distance(self):
        values = [
            link_efficiency(LinkParams(distance_km=float(d), attenuation_db_per_km=0.2))
            for d in range(0, 200, 10)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_never_exceeds_detector_efficiency(self):
        for d in range(0, 300, 25):
            link = LinkParams(distance_km=float(d), detector_efficiency=0.78)
            assert link_efficiency(link) <= 0.78 + IDENTITY_ATOL


class TestValidation:
    def test_probability_snaps_float_dust(self):
        assert check_probability(-1e-13, "x") == 0.0
        assert check_probability(1.0 + 1e-13, "x") == 1.0

    def test_probability_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="p_x"):
            check_probability(1.2, "p_x")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"distance_km": -1.0},
            {"distance_km": 1.0, "detector_efficiency": 1.5},
            {"distance_km": 1.0, "dark_count": -0.1},
            {"distance_km": 1.0, "attenuation_db_per_km": -0.2},
            {"distance_km": 1.0, "misalignment_x": 2.0},
        ],
    )
    def test_link_params_rejects_bad_fields(self, kwargs):
        with pytest.raises(ValueError):
            LinkParams(**kwargs)

    def test_link_params_defaults(self):
        link = LinkParams(distance_km=10.0)
        assert link.detector_efficiency == 0.78
        assert link.dark_count == 1e-7
        assert link.misalignment_x == 0.01
        assert link.misalignment_z == 0.01
        assert link.attenuation_db_per_km == 0.16
        assert math.isfinite(link_efficiency(link))
