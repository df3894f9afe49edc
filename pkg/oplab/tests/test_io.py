import os
import tempfile
import unittest

import numpy as np

from oplab.experiments import ExperimentRecord
from oplab.io import FLOAT_FORMAT, RECORD_COLUMNS, format_float, matrix_to_json, \
    matrix_from_json, write_json, read_json, write_fourier_weight, read_fourier_weight, \
    ordered, records_csv, report, write_report
from oplab.kernels import fourier_weight
from oplab.utils import EmptyInputException, MixedKindsException


def record(alpha, dim, value, kind="truncation", seed=0):
    return ExperimentRecord(kind, alpha, dim, 4, seed, value, function="strict-upper")


class TestMatrices(unittest.TestCase):

    def test_schema(self):
        x = np.array([[1 + 2j, 3.], [0., -1j]])
        data = matrix_to_json(x)
        self.assertEqual(data["dim"], 2)
        self.assertEqual(data["entries"][0], [1., 2.])
        self.assertEqual(data["entries"][3], [0., -1.])
        np.testing.assert_equal(matrix_from_json(data), x)

    def test_bad_length(self):
        with self.assertRaises(ValueError):
            matrix_from_json({"dim": 2, "entries": [[1., 0.]]})

    def test_json_file(self):
        with tempfile.TemporaryDirectory() as d:
            fn = os.path.join(d, "m.json")
            write_json(fn, {"b": 1, "a": [0.1]})
            self.assertEqual(read_json(fn), {"a": [0.1], "b": 1})
            with open(fn) as f:
                self.assertTrue(f.read().startswith('{\n "a"'))


class TestFormat(unittest.TestCase):

    def test_float(self):
        self.assertEqual(FLOAT_FORMAT, "%.17g")
        self.assertEqual(float(format_float(0.1)), 0.1)
        self.assertEqual(format_float(1.), "1")


class TestFourierWeightFile(unittest.TestCase):

    def test_write_read(self):
        g = fourier_weight(ds=0.05, smax=5., check=False)
        with tempfile.TemporaryDirectory() as d:
            fn = os.path.join(d, "g.csv")
            write_fourier_weight(fn, g, timestamp=True)
            with open(fn) as f:
                lines = f.read().splitlines()
            self.assertTrue(lines[0].startswith("# generated"))
            self.assertEqual(lines[1], "# s,re_g,im_g")
            s, samples = read_fourier_weight(fn)
            np.testing.assert_equal(s, g.s)
            np.testing.assert_equal(samples, g.samples)

    def test_no_timestamp_identical(self):
        g = fourier_weight(ds=0.05, smax=5., check=False)
        with tempfile.TemporaryDirectory() as d:
            contents = []
            for name in ("a.csv", "b.csv"):
                fn = os.path.join(d, name)
                write_fourier_weight(fn, g, timestamp=False)
                with open(fn, "rb") as f:
                    contents.append(f.read())
            self.assertEqual(contents[0], contents[1])
            self.assertTrue(contents[0].startswith(b"# s,re_g,im_g\n"))


class TestReport(unittest.TestCase):

    def test_ordering(self):
        rs = [record("inf", 8, 1.), record(2, 32, 1.), record("4/3", 8, 1.), record(2, 8, 1.)]
        self.assertEqual([(str(r.alpha), r.dim) for r in ordered(rs)],
                         [("4/3", 8), ("2", 8), ("2", 32), ("inf", 8)])

    def test_csv(self):
        text = records_csv([record(1, 8, 1.25)], timestamp=False)
        lines = text.splitlines()
        self.assertEqual(lines[0], ",".join(RECORD_COLUMNS))
        self.assertEqual(lines[1], "truncation,contrast,strict-upper,1,8,4,0,1.25,0")
        self.assertEqual(len(lines), 2)
        self.assertTrue(records_csv([record(1, 8, 1.25)]).startswith("# generated"))

    def test_report(self):
        rs = [record(1, 8, 1.2), record(1, 128, 2.4), record(2, 8, 1.), record(2, 128, 1.)]
        rep = report(rs, timestamp=False)
        self.assertEqual(rep.kind, "truncation")
        self.assertEqual(rep.growth["1"][:2], (8, 128))
        self.assertAlmostEqual(rep.growth["1"][2], 2.)
        self.assertAlmostEqual(rep.growth["2"][2], 1.)
        self.assertIn("growth dim 128 / dim 8: 2", rep.summary)
        self.assertEqual(len(rep.csv.splitlines()), 5)

    def test_single(self):
        rep = report([record(2, 4, 0.5)], timestamp=False)
        self.assertEqual(len(rep.csv.splitlines()), 2)
        self.assertEqual(rep.growth, {})

    def test_errors(self):
        with self.assertRaises(EmptyInputException):
            report([])
        with self.assertRaises(MixedKindsException):
            report([record(2, 4, 1.), record(2, 4, 1., kind="multiplier")])

    def test_write(self):
        rep = report([record(2, 4, 0.5)], timestamp=False)
        with tempfile.TemporaryDirectory() as d:
            csv_path, txt_path = write_report(d, "growth", rep)
            self.assertEqual(csv_path.read_text(), rep.csv)
            self.assertEqual(txt_path.read_text(), rep.summary)
