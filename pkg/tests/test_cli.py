# tests/test_cli.py
import os
import shutil
import tempfile
import unittest

from click.testing import CliRunner

from elfkit import __version__
from elfkit.cli import cli
from elfkit.raster.grid import load_raster, save_raster
from tests.scenes import field_dsm


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.runner = CliRunner()
        self.dsm = os.path.join(self.tmp, "dsm.elfr")
        save_raster(self.dsm, field_dsm())
        self.config = os.path.join(self.tmp, "test.cfg")
        with open(self.config, "w", encoding="utf-8") as fh:
            fh.write(f"TESTING=true\nQUEUE_FSYNC=false\nINPUT_DSM={self.dsm}\n")

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def invoke(self, *args):
        return self.runner.invoke(cli, ["--config", self.config, *args])

    def out(self, name):
        return os.path.join(self.tmp, name)


class GrollCase(CliTestCase):
    def test_level_field(self):
        result = self.invoke("groll")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("s_g: 210.773 m", result.output)
        self.assertIn("L_req: 242.389 m", result.output)

    def test_steepest_uphill(self):
        result = self.invoke("groll", "--alpha-pct", "18.66")
        self.assertIn("L_req: 151.877 m", result.output)

    def test_steep_downhill_note(self):
        result = self.invoke("groll", "--alpha-pct", "-10.5")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("s_g: 588.4", result.output)
        self.assertIn("note:", result.output)

    def test_surface_factor(self):
        result = self.invoke("groll", "--surface-factor", "1.6")
        self.assertIn("L_req: 337.237 m", result.output)

    def test_aircraft_file(self):
        path = self.out("heavy.cfg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("AIRCRAFT_MASS=900\n")
        heavy = self.invoke("groll", "--aircraft", path)
        self.assertEqual(heavy.exit_code, 0, heavy.output)
        self.assertNotIn("s_g: 210.773 m", heavy.output)

    def test_unstoppable(self):
        result = self.invoke("groll", "--alpha-pct", "-25")
        self.assertEqual(result.exit_code, 1)
        self.assertIn("ground-roll/ground_roll_distance", result.output)

    def test_slope_is_an_alias_of_alpha_pct(self):
        alias = self.invoke("groll", "--slope", "18.66")
        self.assertEqual(alias.exit_code, 0, alias.output)
        self.assertEqual(alias.output, self.invoke("groll", "--alpha-pct", "18.66").output)

    def test_version(self):
        result = self.runner.invoke(cli, ["--version"])
        self.assertIn(__version__, result.output)


class CommandsCase(CliTestCase):
    def test_derive(self):
        result = self.invoke("derive", "--dsm", self.dsm, "--out", self.out("rasters"))
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("dsm: 400x160 cells at 1 m", result.output)
        for name in ("dsm", "slope", "roughness", "hillshade"):
            self.assertTrue(os.path.isfile(self.out(f"rasters/{name}.elfr")), name)

    def test_derive_without_input(self):
        with open(self.config, "w", encoding="utf-8") as fh:
            fh.write("TESTING=true\n")
        result = self.invoke("derive", "--out", self.out("rasters"))
        self.assertEqual(result.exit_code, 1)
        self.assertIn("raster-derive/load_dsm", result.output)

    def test_derive_single_op(self):
        result = self.invoke("derive", "--op", "slope", "--out", self.out("rasters"))
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("slope: 400x160 cells at 1 m", result.output)
        self.assertTrue(os.path.isfile(self.out("rasters/slope.elfr")))
        self.assertFalse(os.path.exists(self.out("rasters/roughness.elfr")))

    def test_derive_resample(self):
        result = self.invoke(
            "derive", "--op", "resample", "--resolution", "2", "--out", self.out("rasters")
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("resample: 200x80 cells at 2 m", result.output)
        self.assertEqual(load_raster(self.out("rasters/resample.elfr")).res_x, 2.0)

    def test_derive_idw(self):
        points = self.out("points.xyz")
        with open(points, "w", encoding="utf-8") as fh:
            for y in range(11):
                for x in range(11):
                    fh.write(f"{x} {y} {0.1 * x}\n")
        result = self.invoke(
            "derive", "--op", "idw", "--points", points, "--out", self.out("rasters")
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(os.path.isfile(self.out("rasters/idw.elfr")))

    def test_derive_ndvi_needs_bands(self):
        result = self.invoke("derive", "--op", "ndvi", "--out", self.out("rasters"))
        self.assertEqual(result.exit_code, 1)
        self.assertIn("raster-derive/ndvi", result.output)

    def test_derive_unknown_op(self):
        result = self.invoke("derive", "--op", "curvature", "--out", self.out("rasters"))
        self.assertEqual(result.exit_code, 2)
        self.assertFalse(os.path.exists(self.out("rasters")))

    def test_segment_then_search(self):
        result = self.invoke("segment", "--dsm", self.dsm, "--out", self.out("run"))
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("stage 2 sw=8", result.output)
        self.assertIn("landable: 1 polygon(s)", result.output)

        result = self.invoke(
            "search",
            "--polygons", self.out("run/landable.geojson"),
            "--dsm", self.dsm,
            "--out", self.out("run"),
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("polygons: 1", result.output)
        self.assertTrue(os.path.isfile(self.out("run/elfs.csv")))

    def test_segment_needs_input(self):
        result = self.invoke("segment", "--out", self.out("run"))
        self.assertEqual(result.exit_code, 2)

    def test_bad_stage_list(self):
        result = self.invoke(
            "segment", "--dsm", self.dsm, "--stages", "8:", "--out", self.out("run")
        )
        self.assertEqual(result.exit_code, 1)
        self.assertIn("segmentation-ensemble/hierarchical_refine", result.output)

    def test_pipeline_resumes(self):
        first = self.invoke("pipeline", "--out", self.out("run"), "--max-tasks", "0")
        self.assertEqual(first.exit_code, 0, first.output)
        self.assertIn("search interrupted", first.output)

        second = self.invoke("pipeline", "--out", self.out("run"))
        self.assertEqual(second.exit_code, 0, second.output)
        self.assertIn("polygons: 1", second.output)
        self.assertTrue(os.path.isfile(self.out("run/manifest.txt")))

    def test_dataset_raster_option(self):
        labels = self.out("labels.geojson")
        with open(labels, "w", encoding="utf-8") as fh:
            fh.write('{"type": "FeatureCollection", "features": []}')
        result = self.invoke(
            "dataset", "--labels", labels, "--raster", "dsm", "--out", self.out("ds")
        )
        self.assertEqual(result.exit_code, 2)
        self.assertIn("NAME=PATH", result.output)


if __name__ == "__main__":
    unittest.main(verbosity=2)
