"""End-to-end checks of the vortexlab command line: schemas, exit codes, determinism."""
import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

BINARY = sys.argv.pop(1)
ROOT = Path(__file__).resolve().parent.parent
CONFIG_SCHEMA = json.loads((ROOT / "schema" / "config.schema.json").read_text())
REPORT_SCHEMA = json.loads((ROOT / "schema" / "report.schema.json").read_text())


def run(mode, config, *flags):
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "config.json"
        path.write_text(config if isinstance(config, str) else json.dumps(config))
        out = Path(tmp) / "out"
        proc = subprocess.run([BINARY, mode, "--config", str(path), "--out", str(out), *flags],
                              capture_output=True, text=True, timeout=300)
        files = {p.name: p.read_text() for p in out.glob("*")} if out.exists() else {}
    return proc, files


def report_of(files):
    doc = json.loads(files["report.json"])
    jsonschema.validate(doc, REPORT_SCHEMA)
    return doc["report"]


class ShippedConfigs(unittest.TestCase):
    def load(self, name):
        cfg = json.loads((ROOT / "configs" / name).read_text())
        jsonschema.validate(cfg, CONFIG_SCHEMA)
        return cfg

    def test_walls_contains_two(self):
        proc, files = run("walls", self.load("walls_221.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertIn("2", [w["alpha"] for w in report_of(files)["result"]["walls"]])

    def test_stability_semistable_with_witness(self):
        proc, files = run("stability", self.load("stability_semistable.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        result = report_of(files)["result"]
        self.assertEqual(result["verdict"], "strictly-semistable")
        self.assertIsNotNone(result["witness"])

    def test_hn(self):
        proc, files = run("hn", self.load("hn_unstable.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        steps = report_of(files)["result"]["steps"]
        self.assertEqual(len(steps), 2)

    def test_solve_converges(self):
        proc, files = run("solve", self.load("solve_o1.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        result = report_of(files)["result"]
        self.assertTrue(result["converged"])
        self.assertLess(result["J"], 1e-6)
        self.assertTrue(files["history.csv"].startswith("iteration,J,l2,sup_residual,step\n"))
        self.assertIn("fields.csv", files)

    def test_sweep_flips_at_wall(self):
        proc, files = run("sweep", self.load("sweep_wall.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        rows = report_of(files)["result"]["rows"]
        self.assertEqual([r["alpha"] for r in rows], ["19/10", "39/20", "2", "41/20", "21/10"])
        wall = [r for r in rows if r["wall"] is not None]
        self.assertEqual([r["alpha"] for r in wall], ["2"])
        for r in rows:
            at_wall = r["alpha"] == "2"
            self.assertEqual(r["verdict"], "strictly-semistable" if at_wall else "unstable")
            self.assertEqual(r["converged"], at_wall)
        self.assertEqual(len(files["sweep.csv"].splitlines()), 6)

    def test_deform_curve(self):
        proc, files = run("deform", self.load("deform_toy.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        curve = report_of(files)["result"]["curve"]
        for point in curve:
            self.assertLess(abs(point["J"] - point["predicted_2k2"]), 5e-3)
        self.assertIn("j_curve.csv", files)


class Sweeps(unittest.TestCase):
    def test_empty_range_is_header_only(self):
        cfg = {"schema_version": 1, "system": {"split": {"degrees": [1], "sections": [[[1]]]}},
               "alpha_range": {"start": "2", "stop": "1", "step": "1/2"}, "grid": {"N": 8}}
        proc, files = run("sweep", cfg)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertEqual(files["sweep.csv"].count("\n"), 1)
        self.assertEqual(report_of(files)["result"]["rows"], [])

    def test_rank_one_always_stable(self):
        cfg = {"schema_version": 1,
               "system": {"split": {"degrees": [2], "sections": [[[1, 0, 1]], [[0, 1]]]}},
               "alpha_range": {"start": "1/2", "stop": "3", "step": "1/2"}, "grid": {"N": 16}}
        proc, files = run("sweep", cfg)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        rows = report_of(files)["result"]["rows"]
        self.assertEqual(len(rows), 6)
        for r in rows:
            self.assertEqual(r["verdict"], "stable")
            self.assertTrue(r["converged"])


class Determinism(unittest.TestCase):
    def test_identical_reports(self):
        cfg = {"schema_version": 1, "system": {"split": {"degrees": [2], "sections": [[[1]], [[0, 1]]]}},
               "alpha": "3/2", "grid": {"N": 16}, "random_start": True, "seed": 7}
        first = run("solve", cfg)[1]
        second = run("solve", cfg)[1]
        strip = lambda files: json.dumps(json.loads(files["report.json"])["report"], sort_keys=True)
        self.assertEqual(strip(first), strip(second))
        self.assertEqual(first["history.csv"], second["history.csv"])
        other = run("solve", cfg, "--seed", "8")[1]
        self.assertNotEqual(first["history.csv"], other["history.csv"])


class ExitCodes(unittest.TestCase):
    def assertFails(self, code, mode, cfg, *flags):
        proc, _ = run(mode, cfg, *flags)
        self.assertEqual(proc.returncode, code, proc.stderr)
        lines = proc.stderr.strip().splitlines()
        self.assertEqual(len(lines), 1, proc.stderr)
        self.assertRegex(lines[0], r"^error: [a-z]+: .+")

    base = {"schema_version": 1, "system": {"summands": [[1, 1]]}, "alpha": "1"}

    def test_malformed_json(self):
        self.assertFails(2, "stability", "{not json")

    def test_unknown_key(self):
        self.assertFails(2, "stability", {**self.base, "colour": "red"})

    def test_wrong_schema_version(self):
        self.assertFails(2, "stability", {**self.base, "schema_version": 2})

    def test_nonpositive_alpha(self):
        self.assertFails(2, "stability", {**self.base, "alpha": "-1/2"})

    def test_small_grid(self):
        self.assertFails(2, "stability", self.base, "--grid-n", "4")

    def test_missing_mode_field(self):
        self.assertFails(2, "solve", {"schema_version": 1, "system": {"summands": [[1, 1]]}})

    def test_mode_mismatch(self):
        self.assertFails(2, "walls", {**self.base, "mode": "stability"})

    def test_dependent_lifts_are_numerical(self):
        cfg = json.loads((ROOT / "configs" / "deform_toy.json").read_text())
        cfg["deform"]["lifts"] = [[1]]
        self.assertFails(3, "deform", cfg)

    def test_unstable_and_unconverged_are_results(self):
        cfg = {"schema_version": 1, "system": {"split": {"degrees": [2, 0], "sections": [[[0], [1]]]}},
               "alpha": "1", "grid": {"N": 8}}
        proc, files = run("solve", cfg)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertFalse(report_of(files)["result"]["converged"])

    def test_decimal_alpha_warns(self):
        proc, files = run("stability", {**self.base, "alpha": 0.5})
        self.assertEqual(proc.returncode, 0, proc.stderr)
        report = report_of(files)
        self.assertEqual(report["config"]["alpha"], "1/2")
        self.assertEqual(len(report["warnings"]), 1)


if __name__ == "__main__":
    unittest.main()
