import json
import os
import shutil
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from opdef.dataclasses.results import (CompactnessCertificate, Definable, Inconclusive, KernelWitness, NotDefinable,
                                       WeylFamily, WeylWitness)
from opdef.reporting.report import Report, to_jsonable, verdict_payload, verdict_tables
from opdef.utils.paths import attach_root_path
from tests.file_paths import UNITTEST_JUNK_FOLDER


def _definable() -> Definable:
    certificate = CompactnessCertificate(lambda_value=2.0, route="structural",
                                         ladder=[(16, 0.05), (32, 0.02), (64, 0.005)], tolerance=0.01)
    return Definable(lambda_value=2.0, certificate=certificate)


def _weyl() -> NotDefinable:
    families = [WeylFamily(mu=mu, vectors=np.eye(8)[:, :6], residuals=[0.01] * 6) for mu in (1.0, -1.0)]
    return NotDefinable(witness=WeylWitness(families=families, tolerance=0.08, truncation_size=256))


class Test_Jsonable(unittest.TestCase):

    def test_scalars_and_arrays(self):
        self.assertEqual(to_jsonable(1 + 2j), [1.0, 2.0])
        self.assertEqual(to_jsonable(np.float64(0.5)), 0.5)
        self.assertEqual(to_jsonable(np.array([1j, 2.0])), [[0.0, 1.0], [2.0, 0.0]])
        # matrices are lists of columns
        self.assertEqual(to_jsonable(np.array([[1.0, 2.0], [3.0, 4.0]])), [[1.0, 3.0], [2.0, 4.0]])
        self.assertEqual(to_jsonable({1: (Path("a"), 3)}), {"1": ["a", 3]})


class Test_Verdicts(unittest.TestCase):

    def test_definable(self):
        payload = verdict_payload(_definable())
        self.assertEqual(payload["verdict"], "definable")
        self.assertEqual(payload["lambda"], [2.0, 0.0])
        self.assertEqual(payload["certificate"]["final_size"], 64)

        ladder = verdict_tables(_definable())["ladder"]
        self.assertListEqual(list(ladder.columns), ["N", "value"])
        self.assertEqual(ladder["N"].tolist(), [16, 32, 64])

    def test_not_definable(self):
        payload = verdict_payload(_weyl())
        self.assertEqual(payload["witness"]["points"], [[1.0, 0.0], [-1.0, 0.0]])
        self.assertEqual(len(payload["witness"]["families"][0]["vectors"]), 6)
        self.assertEqual(len(verdict_tables(_weyl())["witness"]), 12)

        kernel = NotDefinable(witness=KernelWitness(lambda_value=0.0, kernel_dims=[(128, 64), (256, 128)],
                                                    plateau=[(128, 1.0), (256, 1.0)], threshold=1e-6))
        self.assertEqual(verdict_payload(kernel)["witness"]["kernel_dims"], [[128, 64], [256, 128]])
        self.assertListEqual(verdict_tables(kernel)["witness"]["kernel_dim"].tolist(), [64, 128])

    def test_inconclusive(self):
        verdict = Inconclusive(reason="no refutation",
                               diagnostics={"ladders": {"structural": [(16, 0.06), (32, 0.03)], "measured": None}})
        payload = verdict_payload(verdict)
        self.assertEqual(payload["verdict"], "inconclusive")
        self.assertEqual(payload["diagnostics"]["ladders"]["structural"], [[16, 0.06], [32, 0.03]])
        self.assertListEqual(list(verdict_tables(verdict).keys()), ["structural_ladder"])


class Test_Report(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls._workdir = Path(attach_root_path(UNITTEST_JUNK_FOLDER)) / "reporting"

        if os.path.exists(cls._workdir):
            shutil.rmtree(cls._workdir)
        cls._workdir.mkdir(parents=True, exist_ok=True)

    def _report(self) -> Report:
        verdict = _definable()
        return Report(command="classify", config={"operator": "two_plus_reciprocal", "cert_tol": 0.01},
                      result=verdict_payload(verdict), tables=verdict_tables(verdict))

    def test_json(self):
        report = self._report()
        document = json.loads(report.to_json())
        self.assertEqual(document["command"], "classify")
        self.assertEqual(document["exit_code"], 0)
        self.assertEqual(document["result"]["lambda"], [2.0, 0.0])
        self.assertEqual(document["tables"]["ladder"]["rows"][-1], [64, 0.005])
        self.assertIn("timestamp", document)
        self.assertNotIn("timestamp", json.loads(report.to_json(include_volatile=False)))

    def test_json_floats_round_trip(self):
        value = 0.1 + 0.2
        report = Report(command="predicate-eval", result={"value": value})
        self.assertEqual(json.loads(report.to_json())["result"]["value"], value)

    def test_csv(self):
        lines = self._report().to_csv().strip().splitlines()
        self.assertEqual(lines[0], "N,value")
        self.assertEqual(lines[-1], "64,0.005")

        flat = Report(command="index", result={"index": 1, "sizes": [128, 256]}).primary_table()
        self.assertIsInstance(flat, pd.DataFrame)
        self.assertEqual(flat["key"].tolist(), ["index", "sizes"])

    def test_text_and_write(self):
        text = self._report().to_text()
        self.assertIn("command: classify", text)
        self.assertIn("[ladder]", text)

        path = self._workdir / "report.json"
        self._report().write(path, "json")
        with open(path, "r") as fh:
            self.assertEqual(json.load(fh)["result"]["verdict"], "definable")
