# tests/test_search.py
import math
import unittest

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import MultiPoint, box

from elfkit.exceptions import InvalidParameter, NodataInProfile
from elfkit.geo.ops import contains, rotate
from elfkit.geo.types import GeoPolygon, OrientedRect
from elfkit.physics.aircraft import DA20_C1, STANDARD_ATMOSPHERE
from elfkit.raster.grid import DEFAULT_NODATA, GridRaster
from elfkit.search.evaluation import (
    SearchPolicy,
    SlopeReading,
    direction_requirement,
    direction_slopes,
    evaluate_elf,
    search_polygon,
)
from elfkit.search.factory import SearchFactory
from elfkit.search.placement import find_elfs, sweep_angles
from elfkit.search.profile import (
    center_line_profile,
    profile_slope,
    profile_stations,
    reverse_profile,
)
from tests.test_config import TestingConfig

HEXAGON = GeoPolygon(((0, 0), (90, -10), (130, 30), (110, 75), (30, 80), (-15, 40), (0, 0)))


def plane_dsm(width, height, gx=0.0, gy=0.0, base=100.0):
    """1 m DSM of base + gx*x + gy*y with its bottom-left corner at (0, 0)."""
    x = np.arange(width) + 0.5
    y = height - np.arange(height) - 0.5
    mx, my = np.meshgrid(x, y)
    return GridRaster(0.0, float(height), 1.0, 1.0, base + gx * mx + gy * my)


def reference_find(polygon, length, width, angle_step, step):
    """Sweep with shapely's own rotation and boxes, tested one candidate at a time."""
    pivot = polygon.shape.centroid
    found = []
    for deg in range(0, 180, angle_step):
        turned = affinity.rotate(polygon.shape, deg, origin=pivot)
        cover = turned.buffer(1e-9, join_style="mitre")
        shapely.prepare(cover)
        x_min, y_min, x_max, y_max = turned.bounds
        if x_max - x_min < length or y_max - y_min < width:
            continue
        n_rows = int(math.floor((y_max - y_min) / (width / 2)))
        for i in range(n_rows + 1):
            y = y_min + i * width / 2
            n_shifts = int(math.floor((x_max - x_min - length) / step)) + 1
            k = 0
            while k < n_shifts:
                x = x_min + k * step
                if not cover.covers(box(x, y, x + length, y + width)):
                    k += 1
                    continue
                grown = 0
                while cover.covers(box(x, y, x + length + (grown + 1) * step, y + width)):
                    grown += 1
                placed = box(x, y, x + length + grown * step, y + width)
                found.append((deg, affinity.rotate(placed, -deg, origin=pivot)))
                k += grown + 3
    return found


def star(cx, cy, outer, inner, points=5, phase=0.1):
    ring = []
    for i in range(2 * points):
        r = outer if i % 2 == 0 else inner
        a = phase + i * math.pi / points
        ring.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return GeoPolygon((*ring, ring[0]))


# fractional extents keep row and shift counts away from whole-number ratios
CONCAVE = {
    "L": GeoPolygon(
        ((0.3, 0.1), (150.7, 0.1), (150.7, 40.9), (45.2, 40.9), (45.2, 170.4), (0.3, 170.4),
         (0.3, 0.1))
    ),
    "U": GeoPolygon(
        ((0.2, 0.6), (180.3, 0.6), (180.3, 130.1), (140.9, 130.1), (140.9, 35.7), (40.4, 35.7),
         (40.4, 130.1), (0.2, 130.1), (0.2, 0.6))
    ),
    "T": GeoPolygon(
        ((72.9, 0.7), (118.1, 0.7), (118.1, 120.3), (190.6, 120.3), (190.6, 165.2),
         (0.4, 165.2), (0.4, 120.3), (72.9, 120.3), (72.9, 0.7))
    ),
    "E": GeoPolygon(
        ((0.5, 0.5), (160.2, 0.5), (160.2, 30.8), (50.1, 30.8), (50.1, 70.3), (160.2, 70.3),
         (160.2, 100.6), (50.1, 100.6), (50.1, 140.9), (160.2, 140.9), (160.2, 171.4),
         (0.5, 171.4), (0.5, 0.5))
    ),
    "star": star(100.0, 100.0, 99.0, 45.0),
}


class RandomPolygonSweepCase(unittest.TestCase):
    LENGTH, WIDTH, ANGLE_STEP, STEP = 60.0, 15.0, 30, 2.0

    def assertSweepMatches(self, polygon):
        rects = find_elfs(
            polygon, self.LENGTH, self.WIDTH, angle_step_deg=self.ANGLE_STEP, step=self.STEP
        )
        want = reference_find(polygon, self.LENGTH, self.WIDTH, self.ANGLE_STEP, self.STEP)
        self.assertEqual(len(rects), len(want))
        for rect, (deg, shape) in zip(rects, want):
            self.assertAlmostEqual(rect.rotation, -math.radians(deg), places=12)
            self.assertLess(rect.to_shapely().hausdorff_distance(shape), 1e-6)
            self.assertTrue(contains(polygon, rect))
        return len(rects)

    def test_random_convex_hulls(self):
        total = 0
        for seed in range(20):
            with self.subTest(seed=seed):
                rng = np.random.default_rng(seed)
                points = rng.uniform(0.0, 200.0, (int(rng.integers(5, 12)), 2))
                hull = MultiPoint([tuple(p) for p in points]).convex_hull
                total += self.assertSweepMatches(GeoPolygon.from_shapely(hull))
        self.assertGreater(total, 0)

    def test_concave_polygons(self):
        for name, polygon in CONCAVE.items():
            with self.subTest(shape=name):
                self.assertGreater(self.assertSweepMatches(polygon), 0)


class FindElfsCase(unittest.TestCase):
    def test_small_polygon_has_no_fields(self):
        self.assertEqual(find_elfs(GeoPolygon.box(0, 0, 10, 10), 242.0, 33.0), [])

    def test_long_rectangle_grows_to_far_edge(self):
        rects = find_elfs(GeoPolygon.box(0, 0, 300, 40), 242.389, 32.67)
        at_zero = [r for r in rects if r.rotation == 0.0]
        self.assertTrue(at_zero)
        self.assertGreaterEqual(max(r.length for r in at_zero), 299.0)
        self.assertTrue(all(r.length <= 300.0 for r in rects))

    def test_matches_exhaustive_sweep(self):
        rects = find_elfs(HEXAGON, 40.25, 9.5, angle_step_deg=30)
        want = reference_find(HEXAGON, 40.25, 9.5, 30, 1.0)
        self.assertTrue(want)
        self.assertEqual(len(rects), len(want))
        for rect, (deg, shape) in zip(rects, want):
            self.assertAlmostEqual(rect.rotation, -math.radians(deg), places=12)
            self.assertLess(rect.to_shapely().hausdorff_distance(shape), 1e-6)

    def test_pre_rotated_rectangle(self):
        field = GeoPolygon.box(0, 0, 300, 40)
        turned = rotate(field, math.radians(-44), (150.0, 20.0))
        rects = find_elfs(turned, 242.389, 32.67)
        self.assertTrue(rects)
        for rect in rects:
            self.assertAlmostEqual(rect.rotation, math.radians(-44), places=9)
            self.assertTrue(contains(turned, rect))
        self.assertGreaterEqual(max(r.length for r in rects), 299.0)

    def test_every_field_is_contained(self):
        for rect in find_elfs(HEXAGON, 40.25, 9.5, angle_step_deg=20):
            self.assertTrue(contains(HEXAGON, rect))
            self.assertGreaterEqual(rect.length, 40.25)

    def test_sweep_angles(self):
        angles = sweep_angles()
        self.assertEqual(angles[0].index, 0)
        self.assertEqual(angles[-1].index, 176)
        self.assertEqual(len(angles), 45)
        with self.assertRaises(InvalidParameter):
            sweep_angles(0)
        with self.assertRaises(InvalidParameter):
            sweep_angles(2.5)

    def test_bad_sizes(self):
        with self.assertRaises(InvalidParameter):
            find_elfs(HEXAGON, 0.0, 10.0)
        with self.assertRaises(InvalidParameter):
            find_elfs(HEXAGON, 10.0, 5.0, step=0.0)


class ProfileCase(unittest.TestCase):
    def test_stations(self):
        self.assertEqual(profile_stations(3.0), [0.0, 1.0, 2.0, 3.0])
        self.assertEqual(profile_stations(2.5), [0.0, 1.0, 2.0, 2.5])
        with self.assertRaises(InvalidParameter):
            profile_stations(3.0, 0.0)

    def test_flat_profile(self):
        profile = center_line_profile(plane_dsm(60, 30), OrientedRect(5, 5, 40, 10))
        self.assertEqual(len(profile), 41)
        for _, z in profile:
            self.assertAlmostEqual(z, 100.0, places=9)

    def test_plane_along_x(self):
        profile = center_line_profile(plane_dsm(200, 40, gx=0.05), OrientedRect(10, 5, 150, 20))
        regression, endpoint = profile_slope(profile)
        self.assertAlmostEqual(regression, 5.0, places=9)
        self.assertAlmostEqual(endpoint, 5.0, places=9)

    def test_plane_at_thirty_degrees(self):
        rect = OrientedRect(50, 40, 100, 10, math.radians(30))
        profile = center_line_profile(plane_dsm(300, 200, gx=0.05), rect)
        regression, endpoint = profile_slope(profile)
        self.assertAlmostEqual(regression, 5.0 * math.cos(math.radians(30)), places=9)
        self.assertAlmostEqual(endpoint, 5.0 * math.cos(math.radians(30)), places=9)

    def test_nodata_lists_stations(self):
        values = np.full((20, 40), 100.0)
        values[:, 20:22] = DEFAULT_NODATA
        dsm = GridRaster(0.0, 20.0, 1.0, 1.0, values)
        with self.assertRaises(NodataInProfile) as ctx:
            center_line_profile(dsm, OrientedRect(0, 5, 30, 10))
        self.assertTrue(ctx.exception.stations)
        self.assertTrue(all(18.0 <= s <= 23.0 for s in ctx.exception.stations))

    def test_slope_estimates(self):
        regression, endpoint = profile_slope([(0.0, 1.0), (10.0, 1.5), (20.0, 2.0)])
        self.assertAlmostEqual(regression, 5.0, places=12)
        self.assertAlmostEqual(endpoint, 5.0, places=12)
        for value in profile_slope([(0.0, 3.0), (5.0, 3.0)]):
            self.assertAlmostEqual(value, 0.0, places=12)

    def test_noisy_regression(self):
        rng = np.random.default_rng(4)
        d = np.arange(0.0, 101.0)
        z = 0.03 * d + rng.normal(0, 0.2, d.size)
        a = np.column_stack([d, np.ones_like(d)])
        gradient = np.linalg.solve(a.T @ a, a.T @ z)[0]
        regression, endpoint = profile_slope(list(zip(d, z)))
        self.assertAlmostEqual(regression, 100 * gradient, delta=1e-9)
        self.assertAlmostEqual(endpoint, 100 * (z[-1] - z[0]) / 100.0, delta=1e-12)

    def test_degenerate_profiles(self):
        with self.assertRaises(InvalidParameter):
            profile_slope([(0.0, 1.0)])
        with self.assertRaises(InvalidParameter):
            profile_slope([(0.0, 1.0), (0.0, 2.0)])

    def test_reverse(self):
        profile = [(0.0, 1.0), (1.0, 2.0), (2.5, 4.0)]
        self.assertEqual(reverse_profile(profile), [(0.0, 4.0), (1.5, 2.0), (2.5, 1.0)])


class EvaluateElfCase(unittest.TestCase):
    def test_flat_field_just_long_enough(self):
        dsm = plane_dsm(280, 40)
        record = evaluate_elf(OrientedRect(10, 5, 250, 30), dsm, DA20_C1, STANDARD_ATMOSPHERE)
        self.assertTrue(record.accepted)
        self.assertAlmostEqual(record.required_length_fwd, 242.389, delta=0.01)
        self.assertTrue(record.wet115)
        self.assertFalse(record.wet160)
        self.assertAlmostEqual(record.slope_fwd_pct, 0.0, places=9)

    def test_short_flat_field_rejected(self):
        dsm = plane_dsm(280, 40)
        record = evaluate_elf(OrientedRect(10, 5, 240, 30), dsm, DA20_C1, STANDARD_ATMOSPHERE)
        self.assertFalse(record.accepted)

    def test_steepest_uphill(self):
        dsm = plane_dsm(200, 40, gx=0.1866)
        record = evaluate_elf(OrientedRect(10, 5, 152, 20), dsm, DA20_C1, STANDARD_ATMOSPHERE)
        self.assertAlmostEqual(record.slope_fwd_pct, 18.66, places=6)
        self.assertAlmostEqual(record.required_length_fwd, 151.877, delta=0.01)
        self.assertTrue(math.isinf(record.required_length_rev))
        self.assertTrue(record.accepted)

        shorter = evaluate_elf(OrientedRect(10, 5, 151, 20), dsm, DA20_C1, STANDARD_ATMOSPHERE)
        self.assertFalse(shorter.accepted)

    def test_downhill_both_ways_rejected(self):
        dsm = plane_dsm(1200, 40, gx=0.105)
        rect = OrientedRect(20, 5, 1100, 20)
        policy = SearchPolicy(1100, 20, reading=SlopeReading.DIRECTIONS)
        record = evaluate_elf(rect, dsm, DA20_C1, STANDARD_ATMOSPHERE, policy=policy)
        self.assertAlmostEqual(record.slope_fwd_pct, -10.5, places=6)
        self.assertAlmostEqual(record.slope_rev_pct, -10.5, places=6)
        self.assertFalse(record.accepted)

        # both slope estimates: the uphill end still works
        self.assertTrue(evaluate_elf(rect, dsm, DA20_C1, STANDARD_ATMOSPHERE).accepted)

    def test_acceptance_monotone_in_length(self):
        dsm = plane_dsm(300, 40, gx=-0.03)
        flags = [
            evaluate_elf(OrientedRect(5, 5, length, 20), dsm, DA20_C1, STANDARD_ATMOSPHERE).accepted
            for length in range(200, 291, 5)
        ]
        self.assertEqual(flags, sorted(flags))
        self.assertTrue(flags[-1])

    def test_direction_slopes(self):
        self.assertEqual(direction_slopes(3.0, -4.0, SlopeReading.METHODS), (-4.0, 4.0))
        self.assertEqual(direction_slopes(3.0, 2.0, SlopeReading.METHODS), (3.0, -3.0))
        self.assertEqual(direction_slopes(3.0, -4.0, SlopeReading.DIRECTIONS), (-3.0, -3.0))

    def test_unstoppable_direction(self):
        required = direction_requirement(DA20_C1, STANDARD_ATMOSPHERE, -25.0, 1.15)
        self.assertTrue(math.isinf(required))

    def test_policy_validation(self):
        with self.assertRaises(InvalidParameter):
            SearchPolicy(100, 10, surface_factor=0.9)
        with self.assertRaises(InvalidParameter):
            SearchPolicy(100, 10, max_downslope_pct=5.0)
        with self.assertLogs("elfkit.search.evaluation", level="WARNING"):
            SearchPolicy(10, 20)

    def test_policy_from_config(self):
        policy = SearchFactory.get_policy(TestingConfig())
        self.assertAlmostEqual(policy.elf_length, 151.877, delta=0.01)
        self.assertAlmostEqual(policy.elf_width, 32.67, places=6)
        self.assertIs(policy.reading, SlopeReading.METHODS)

        config = TestingConfig()
        config.SEARCH_SLOPE_READING = "sideways"
        with self.assertRaises(InvalidParameter):
            SearchFactory.get_slope_reading(config)


class SearchPolygonCase(unittest.TestCase):
    def test_flat_polygon(self):
        policy = SearchPolicy(242.389, 32.67)
        box = GeoPolygon.box(0, 0, 300, 40)
        records = search_polygon(box, plane_dsm(320, 60), DA20_C1, STANDARD_ATMOSPHERE, policy, 3)
        self.assertTrue(records)
        self.assertTrue(all(r.polygon_id == 3 for r in records))
        self.assertTrue(any(r.accepted for r in records))

    def test_nodata_fields_skipped(self):
        values = np.full((60, 320), 100.0)
        values[:, 100] = DEFAULT_NODATA
        dsm = GridRaster(0.0, 60.0, 1.0, 1.0, values)
        policy = SearchPolicy(242.389, 32.67)
        with self.assertLogs("elfkit.search.evaluation", level="WARNING") as cm:
            box = GeoPolygon.box(0, 0, 300, 40)
            records = search_polygon(box, dsm, DA20_C1, STANDARD_ATMOSPHERE, policy)
        self.assertEqual(records, [])
        self.assertIn("skipped", cm.output[0])


if __name__ == "__main__":
    unittest.main(verbosity=2)
