# tests/test_dataset.py
import os
import shutil
import tempfile
import unittest

import numpy as np

from elfkit.dataset.samples import LabelPolygon, SampleSet, extract_samples, parse_layers
from elfkit.dataset.split import balance_split, compute_normalization, denormalize, normalize
from elfkit.dataset.store import read_dataset, write_dataset
from elfkit.dataset.verify import VerifyAction, verify_landable
from elfkit.exceptions import DatasetError, EmptyClass, InvalidParameter
from elfkit.geo.types import GeoPolygon
from elfkit.raster.grid import DEFAULT_NODATA, GridRaster

HEIGHT, WIDTH = 96, 160


def layer(values, res=1.0):
    return GridRaster(0.0, float(HEIGHT), res, res, values)


def dsm_values():
    return 100.0 + np.add.outer(np.arange(HEIGHT) * 0.5, np.arange(WIDTH) * 0.25)


def slope_values():
    values = np.full((HEIGHT, WIDTH), 2.0)
    values[32:64, 32:64] = 15.0  # square C, x and y in [32, 64]
    return values


def square(x, y, label, side=32.0):
    return LabelPolygon(GeoPolygon.box(x, y, x + side, y + side), label, side)


# A and C landable, B unlandable, D hangs off the east edge of the rasters
SQUARES = [square(0, 0, 1), square(64, 0, 0), square(32, 32, 1), square(150, 0, 0)]


class LayerNamesCase(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(parse_layers("rgb, dsm"), ("R", "G", "B", "DSM"))
        self.assertEqual(parse_layers("slope,SLOPE,ndvi"), ("SLOPE", "NDVI"))

    def test_bad_names(self):
        with self.assertRaises(DatasetError):
            parse_layers("dsm,lidar")
        with self.assertRaises(DatasetError):
            parse_layers(" , ")


class LabelPolygonCase(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(DatasetError):
            square(0, 0, 2)
        with self.assertRaises(DatasetError):
            LabelPolygon(GeoPolygon.box(0, 0, 32, 16), 1, 32.0)

    def test_from_feature(self):
        label = LabelPolygon.from_feature(GeoPolygon.box(10, 10, 74, 74), {"label": "1"})
        self.assertEqual((label.label, label.side), (1, 64.0))
        with self.assertRaises(DatasetError):
            LabelPolygon.from_feature(GeoPolygon.box(10, 10, 74, 74), {"class": 1})

    def test_unusual_side_warns(self):
        with self.assertLogs("elfkit.dataset.samples", level="WARNING"):
            square(0, 0, 1, side=50.0)


class ExtractSamplesCase(unittest.TestCase):
    def test_windows_and_labels(self):
        samples = extract_samples(SQUARES, {"DSM": layer(dsm_values())}, sw=16.0, stride=8.0)
        self.assertEqual(len(samples), 27)
        self.assertEqual(samples.class_counts(), (9, 18))
        self.assertEqual(samples.tensors.shape, (27, 16, 16, 1))
        self.assertEqual(samples.tensors.dtype, np.float32)

        # south-west window of A spans rows 80..95, cols 0..15
        np.testing.assert_array_equal(samples.origins[0], (0.0, 0.0))
        np.testing.assert_array_equal(
            samples.tensors[0, :, :, 0], dsm_values()[80:96, 0:16].astype(np.float32)
        )

    def test_nodata_windows_skipped(self):
        values = dsm_values()
        values[91, 4] = DEFAULT_NODATA  # inside the south-west window of A only
        samples = extract_samples(SQUARES, {"DSM": layer(values)}, sw=16.0, stride=8.0)
        self.assertEqual(len(samples), 26)
        self.assertEqual(samples.class_counts(), (9, 17))

    def test_coarser_layer_resampled(self):
        nir = layer(np.full((HEIGHT // 2, WIDTH // 2), 0.4), res=2.0)
        samples = extract_samples(SQUARES, {"DSM": layer(dsm_values()), "NIR": nir}, sw=16.0)
        self.assertEqual(samples.layers, ("DSM", "NIR"))
        self.assertEqual(samples.resolution, 1.0)
        np.testing.assert_allclose(samples.layer("NIR"), 0.4, atol=1e-6)

    def test_window_must_fit_pixels(self):
        coarse = layer(np.ones((HEIGHT // 2, WIDTH // 2)), res=2.0)
        with self.assertRaises(DatasetError):
            extract_samples(SQUARES, {"DSM": coarse}, sw=15.0)

    def test_bad_sample_shapes(self):
        with self.assertRaises(DatasetError):
            SampleSet(("DSM",), np.zeros((2, 4, 4, 2)), np.zeros(2), 4.0, 1.0)
        with self.assertRaises(DatasetError):
            SampleSet(("DSM",), np.zeros((2, 4, 4, 1)), np.array([0, 3]), 4.0, 1.0)


class SplitCase(unittest.TestCase):
    def setUp(self):
        self.samples = extract_samples(
            SQUARES, {"DSM": layer(dsm_values()), "SLOPE": layer(slope_values())}, sw=16.0
        )

    def test_balanced_split(self):
        train, test = balance_split(self.samples, train_fraction=0.8, seed=3)
        self.assertEqual(train.class_counts(), (7, 7))
        self.assertEqual(test.class_counts(), (2, 2))
        self.assertEqual((train.split, test.split), ("train", "test"))
        train_origins = {tuple(o) for o in train.origins}
        test_origins = {tuple(o) for o in test.origins}
        self.assertFalse(train_origins & test_origins)

    def test_split_is_seeded(self):
        a, _ = balance_split(self.samples, seed=11)
        b, _ = balance_split(self.samples, seed=11)
        np.testing.assert_array_equal(a.origins, b.origins)

    def test_split_errors(self):
        with self.assertRaises(InvalidParameter):
            balance_split(self.samples, train_fraction=1.5)
        only_landable = self.samples.subset(np.flatnonzero(self.samples.labels == 1))
        with self.assertRaises(EmptyClass):
            balance_split(only_landable)

    def test_normalization(self):
        train, test = balance_split(self.samples, seed=3)
        norm = compute_normalization(train, test)
        scaled = normalize(train, norm)
        self.assertEqual(scaled.normalization, norm)
        self.assertGreaterEqual(float(scaled.tensors.min()), 0.0)
        self.assertLessEqual(float(scaled.tensors.max()), 1.0)
        self.assertEqual(scaled.tensors.dtype, np.float64)
        np.testing.assert_allclose(denormalize(scaled), train.tensors, rtol=0, atol=1e-9)

    def test_constant_layer_normalizes_to_zero(self):
        flat = self.samples.subset(np.flatnonzero(self.samples.labels == 0))
        scaled = normalize(flat)
        self.assertEqual(scaled.normalization["SLOPE"], (2.0, 2.0))
        self.assertFalse(scaled.layer("SLOPE").any())
        with self.assertRaises(InvalidParameter):
            denormalize(flat)


class VerifyCase(unittest.TestCase):
    def setUp(self):
        self.samples = extract_samples(
            SQUARES, {"DSM": layer(dsm_values()), "SLOPE": layer(slope_values())}, sw=16.0
        )
        self.steep = tuple(range(18, 27))  # windows of square C

    def test_flag_only(self):
        with self.assertLogs("elfkit.dataset.verify", level="WARNING"):
            report = verify_landable(self.samples)
        self.assertEqual(report.flagged, self.steep)
        self.assertIs(report.samples, self.samples)

    def test_relabel_and_drop(self):
        relabeled = verify_landable(self.samples, action="relabel").samples
        self.assertEqual(relabeled.class_counts(), (18, 9))
        dropped = verify_landable(self.samples, action=VerifyAction.DROP).samples
        self.assertEqual(len(dropped), 18)
        self.assertEqual(dropped.class_counts(), (9, 9))

    def test_against_slope_raster(self):
        report = verify_landable(self.samples, slope=layer(slope_values()))
        self.assertEqual(report.flagged, self.steep)

    def test_unknown_action(self):
        with self.assertRaises(DatasetError):
            verify_landable(self.samples, action="burn")


class DatasetStoreCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        samples = extract_samples(
            SQUARES, {"DSM": layer(dsm_values()), "SLOPE": layer(slope_values())}, sw=16.0
        )
        train, test = balance_split(samples, seed=5)
        norm = compute_normalization(train, test)
        self.splits = {"train": normalize(train, norm), "test": normalize(test, norm)}

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_round_trip(self):
        write_dataset(self.tmp, self.splits, seed=5)
        loaded = read_dataset(self.tmp)
        self.assertEqual(list(loaded), ["train", "test"])
        for name, original in self.splits.items():
            self.assertEqual(loaded[name].tensors.dtype, np.float32)
            np.testing.assert_array_equal(
                loaded[name].tensors, original.tensors.astype(np.float32)
            )
            np.testing.assert_array_equal(loaded[name].labels, original.labels)
            self.assertEqual(loaded[name].normalization, original.normalization)
            self.assertEqual(loaded[name].layers, ("DSM", "SLOPE"))
            self.assertEqual(loaded[name].sw, 16.0)

    def test_bad_split_name(self):
        with self.assertRaises(DatasetError):
            write_dataset(self.tmp, {"not a name": self.splits["train"]})

    def test_truncated_blob(self):
        write_dataset(self.tmp, self.splits)
        path = os.path.join(self.tmp, "train.f32")
        with open(path, "r+b") as fh:
            fh.truncate(os.path.getsize(path) - 4)
        with self.assertRaises(DatasetError):
            read_dataset(self.tmp)

    def test_missing_manifest(self):
        with self.assertRaises(DatasetError):
            read_dataset(self.tmp)


if __name__ == "__main__":
    unittest.main(verbosity=2)
