import json
import os
import shutil
import subprocess
import unittest
from pathlib import Path

from opdef.utils.paths import attach_root_path
from tests.file_paths import UNITTEST_JUNK_FOLDER, UNITTEST_PATH_FINITE_RANK_SPEC, UNITTEST_PATH_VECTOR_X


class Test_Opdef(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls._workdir = Path(attach_root_path(UNITTEST_JUNK_FOLDER)) / "entrypoints"

        # remove lingering artefact from previous runs, if present
        if os.path.exists(cls._workdir):
            shutil.rmtree(cls._workdir)
        cls._workdir.mkdir(parents=True, exist_ok=True)

    def _run(self, *args):
        return subprocess.run(["opdef", *args], capture_output=True, text=True)

    def test_classify_definable(self):
        result = self._run("classify", "--operator", "identity", "--output", "json")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        document = json.loads(result.stdout)
        self.assertEqual(document["result"]["verdict"], "definable")
        self.assertEqual(document["result"]["lambda"], [1.0, 0.0])

    def test_classify_not_definable(self):
        report = self._workdir / "shift_left.json"
        result = self._run("classify", "--operator", "shift_left", "--output", "json", "--report", str(report))
        self.assertEqual(result.returncode, 1, msg=result.stderr)
        self.assertEqual(json.loads(result.stdout)["result"]["witness"]["kind"], "weyl")
        with open(report, "r") as fh:
            self.assertEqual(json.load(fh)["exit_code"], 1)

    def test_classify_inconclusive(self):
        result = self._run("classify", "--operator", "diagonal_reciprocal")
        self.assertEqual(result.returncode, 2, msg=result.stderr)

    def test_classify_spec_file(self):
        result = self._run("classify", "--operator", attach_root_path(UNITTEST_PATH_FINITE_RANK_SPEC),
                           "--output", "json")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertEqual(json.loads(result.stdout)["result"]["lambda"], [0.0, 0.0])

    def test_spectrum_csv(self):
        result = self._run("spectrum", "--operator", "lr_directsum", "--grid", "circle:64;0,2", "--output", "csv")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        lines = result.stdout.strip().splitlines()
        self.assertEqual(lines[0], "mu_re,mu_im,defect")
        self.assertEqual(len(lines), 67)

    def test_index(self):
        result = self._run("index", "--operator", "shift_left_squared", "--output", "json")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertEqual(json.loads(result.stdout)["result"]["index"], 2)

    def test_predicate_eval(self):
        result = self._run("predicate-eval", "--operator", "finite_rank",
                           "--x", attach_root_path(UNITTEST_PATH_VECTOR_X), "--y", "[1, 0]", "--output", "json")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertAlmostEqual(json.loads(result.stdout)["result"]["value"], 0.0)

        result = self._run("predicate-eval", "--operator", "zero", "--y", "[1]", "--output", "json")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertAlmostEqual(json.loads(result.stdout)["result"]["value"], 1.0)

    def test_input_errors(self):
        self.assertEqual(self._run("classify", "--operator", "identity", "--no-such-option", "1").returncode, 3)
        self.assertEqual(self._run("classify").returncode, 3)
        self.assertEqual(self._run("classify", "--operator", "no_such_operator").returncode, 3)
        self.assertEqual(self._run("classify", "--operator", "identity", "--n-max", "8").returncode, 3)

    def test_operator_list(self):
        result = self._run("--operator-list", "console")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertIn("shift_left", result.stdout)

        path = self._workdir / "operators.csv"
        result = self._run("--operator-list", str(path))
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertTrue(path.exists())

    def test_help(self):
        result = self._run("--help")
        self.assertEqual(result.returncode, 0, msg=result.stderr)
        self.assertIn("--cert-tol", result.stdout)
