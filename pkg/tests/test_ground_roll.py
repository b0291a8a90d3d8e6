# tests/test_ground_roll.py
import math
import unittest

import numpy as np

from elfkit.exceptions import InvalidAircraftConfig, InvalidParameter, NonStoppingConfiguration
from elfkit.physics.aircraft import DA20_C1, STANDARD_ATMOSPHERE, AircraftConfig, Atmosphere
from elfkit.physics.factory import PhysicsFactory
from elfkit.physics.ground_roll import (
    GRASS_FIRM,
    WET_SHORT_GRASS,
    default_elf_width,
    default_search_length,
    derive_aero,
    ground_roll_distance,
    ground_roll_distance_expanded,
    ground_roll_slope_sensitivity,
    required_length,
    required_length_at_slope,
    slope_angle,
)
from tests.test_config import TestingConfig

# 50 angles strictly inside (-6, +12) degrees
SLOPE_GRID = np.radians(np.linspace(-6.0, 12.0, 52)[1:-1])


class AeroConstantsCase(unittest.TestCase):
    def test_da20_constants(self):
        aero = derive_aero(DA20_C1, STANDARD_ATMOSPHERE)
        self.assertAlmostEqual(aero.A, 10.2235, places=4)
        self.assertAlmostEqual(aero.e, 0.7508, places=4)
        self.assertAlmostEqual(aero.K, 0.04147, places=5)
        self.assertAlmostEqual(aero.C_D0, 0.0498, places=4)
        self.assertAlmostEqual(aero.C_L, 2.4344, places=4)

    def test_level_ground_friction_term(self):
        aero = derive_aero(DA20_C1, STANDARD_ATMOSPHERE, 0.0)
        self.assertEqual(aero.K_T, -DA20_C1.mu)

    def test_unit_aspect_ratio(self):
        plane = AircraftConfig(wing_area=9.0, wing_span=3.0)
        self.assertEqual(plane.aspect_ratio, 1.0)
        with self.assertLogs("elfkit.physics.ground_roll", level="WARNING"):
            self.assertEqual(derive_aero(plane, STANDARD_ATMOSPHERE).A, 1.0)

    def test_non_positive_oswald(self):
        glider = AircraftConfig(wing_area=1.0, wing_span=60.0, ld_max=50.0)
        with self.assertRaises(InvalidAircraftConfig):
            derive_aero(glider, STANDARD_ATMOSPHERE)

    def test_vertical_slope_rejected(self):
        with self.assertRaises(InvalidParameter):
            derive_aero(DA20_C1, STANDARD_ATMOSPHERE, math.pi / 2)


class AircraftConfigCase(unittest.TestCase):
    def test_impossible_values(self):
        bad = ({"mass": 0.0}, {"mu": 0.0}, {"mu": 1.5}, {"thrust": -1.0}, {"touchdown_speed": -2})
        for kwargs in bad:
            with self.subTest(**kwargs):
                with self.assertRaises(InvalidAircraftConfig):
                    AircraftConfig(**kwargs)

    def test_unusual_glide_ratio_warns(self):
        with self.assertLogs("elfkit.physics.aircraft", level="WARNING") as cm:
            AircraftConfig(ld_max=2.0)
        self.assertIn("L/D_max", cm.output[0])

    def test_atmosphere(self):
        with self.assertRaises(InvalidAircraftConfig):
            Atmosphere(rho=0.0)


class GroundRollCase(unittest.TestCase):
    def test_level_da20(self):
        s_g = ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE)
        self.assertAlmostEqual(s_g, 210.773, delta=0.01)

    def test_steepest_uphill(self):
        s_g = ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE, math.atan(0.1866))
        self.assertAlmostEqual(s_g, 132.068, delta=0.01)
        self.assertAlmostEqual(s_g * GRASS_FIRM, 151.877, delta=0.01)

    def test_expanded_form_agrees(self):
        for alpha in SLOPE_GRID:
            with self.subTest(degrees=math.degrees(alpha)):
                compact = ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE, alpha)
                expanded = ground_roll_distance_expanded(DA20_C1, STANDARD_ATMOSPHERE, alpha)
                self.assertLessEqual(abs(compact - expanded), 1e-12 * abs(compact))

    def test_vanishing_touchdown_speed(self):
        crawl = AircraftConfig(touchdown_speed=1e-6)
        self.assertLess(ground_roll_distance(crawl, STANDARD_ATMOSPHERE), 1e-5)

    def test_longer_with_speed_and_less_friction(self):
        previous = 0.0
        for speed in (15.0, 18.0, 21.298, 25.0, 30.0):
            s_g = ground_roll_distance(AircraftConfig(touchdown_speed=speed), STANDARD_ATMOSPHERE)
            self.assertGreater(s_g, previous)
            previous = s_g

        previous = 0.0
        for mu in (0.5, 0.4, 0.3, 0.2, 0.1):
            s_g = ground_roll_distance(AircraftConfig(mu=mu), STANDARD_ATMOSPHERE)
            self.assertGreater(s_g, previous)
            previous = s_g

    def test_slope_sensitivity_matches_finite_difference(self):
        h = 1e-6
        for alpha in SLOPE_GRID:
            with self.subTest(degrees=math.degrees(alpha)):
                numeric = (
                    ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE, alpha + h)
                    - ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE, alpha - h)
                ) / (2 * h)
                analytic = ground_roll_slope_sensitivity(DA20_C1, STANDARD_ATMOSPHERE, alpha)
                self.assertLessEqual(abs(analytic - numeric), 1e-6 * abs(numeric))

    def test_downslope_without_stop(self):
        with self.assertRaises(NonStoppingConfiguration) as ctx:
            ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE, slope_angle(-25.0))
        self.assertIn("non-stopping configuration", str(ctx.exception))

    def test_residual_thrust_lengthens_roll(self):
        pushed = AircraftConfig(thrust=300.0)
        self.assertGreater(
            ground_roll_distance(pushed, STANDARD_ATMOSPHERE),
            ground_roll_distance(DA20_C1, STANDARD_ATMOSPHERE),
        )


class RequiredLengthCase(unittest.TestCase):
    def test_firm_grass_flat(self):
        self.assertAlmostEqual(required_length(210.773, 1.15, 0.0), 242.389, delta=0.001)

    def test_identity(self):
        self.assertEqual(required_length(100.0, 1.0, 0.0), 100.0)

    def test_downslope_penalty(self):
        self.assertAlmostEqual(required_length(100.0, 1.0, -2.0), 110.0)

    def test_uphill_has_no_penalty(self):
        self.assertEqual(required_length(100.0, 1.0, 7.0), 100.0)

    def test_invalid(self):
        with self.assertRaises(InvalidParameter):
            required_length(0.0)
        with self.assertRaises(InvalidParameter):
            required_length(100.0, 0.9)

    def test_at_slope(self):
        self.assertAlmostEqual(
            required_length_at_slope(DA20_C1, STANDARD_ATMOSPHERE, 0.0), 242.389, delta=0.01
        )
        wet = required_length_at_slope(DA20_C1, STANDARD_ATMOSPHERE, 0.0, WET_SHORT_GRASS)
        self.assertAlmostEqual(wet, 210.773 * 1.6, delta=0.02)

    def test_steeper_downslope_needs_more(self):
        lengths = [
            required_length_at_slope(DA20_C1, STANDARD_ATMOSPHERE, p) for p in (0, -2, -5, -9.9)
        ]
        self.assertEqual(lengths, sorted(lengths))


class SearchDimensionsCase(unittest.TestCase):
    def test_defaults(self):
        length = default_search_length(DA20_C1, STANDARD_ATMOSPHERE)
        self.assertAlmostEqual(length, 151.877, delta=0.01)
        self.assertAlmostEqual(default_elf_width(DA20_C1), 32.67, places=6)

    def test_factory_derives_zero_values(self):
        length, width = PhysicsFactory.get_search_dimensions(TestingConfig())
        self.assertAlmostEqual(length, 151.877, delta=0.01)
        self.assertAlmostEqual(width, 32.67, places=6)

    def test_factory_keeps_explicit_values(self):
        config = TestingConfig()
        config.SEARCH_LENGTH = 242.389
        config.SEARCH_WIDTH = 20.0
        self.assertEqual(PhysicsFactory.get_search_dimensions(config), (242.389, 20.0))


if __name__ == "__main__":
    unittest.main(verbosity=2)
