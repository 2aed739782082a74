"""End-to-end checks of the meandim executable: schema, determinism, exit codes."""

import json
import os
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema

EXE = pathlib.Path(sys.argv.pop(1))
ROOT = pathlib.Path(__file__).resolve().parents[2]
PRESETS = sorted((ROOT / "presets").glob("*.json"))
REPORT_SCHEMA = json.loads((ROOT / "schema" / "report.schema.json").read_text())
CONFIG_SCHEMA = json.loads((ROOT / "schema" / "config.schema.json").read_text())


def meandim(*args, cwd=None):
    return subprocess.run([str(EXE), *map(str, args)], capture_output=True, text=True, cwd=cwd, timeout=600)


def masked(report):
    for r in report["results"]:
        r["timing_ms"] = 0
    return json.dumps(report, sort_keys=False)


class Presets(unittest.TestCase):
    def test_configs_match_schema(self):
        self.assertEqual(len(PRESETS), 12)
        for p in PRESETS:
            jsonschema.validate(json.loads(p.read_text()), CONFIG_SCHEMA)
            self.assertEqual(meandim("validate", p).returncode, 0, p.name)

    def test_reports_validate_and_rerun_identically(self):
        with tempfile.TemporaryDirectory() as tmp:
            for p in PRESETS:
                runs = []
                for k in range(2):
                    out = pathlib.Path(tmp) / f"{p.stem}-{k}.json"
                    tsv = pathlib.Path(tmp) / f"{p.stem}-{k}.tsv"
                    res = meandim("--compact", "--json", out, "--tsv", tsv, "run", p)
                    self.assertEqual(res.returncode, 0, f"{p.name}: {res.stderr}")
                    report = json.loads(out.read_text())
                    jsonschema.validate(report, REPORT_SCHEMA)
                    runs.append((masked(report), tsv.read_text()))
                self.assertEqual(runs[0], runs[1], p.name)

    def test_tsv_columns(self):
        res = meandim("run", PRESETS[3], "--tsv", "-")
        lines = res.stdout.splitlines()
        self.assertEqual(lines[0].split("\t"), ["invariant", "window", "lower", "upper", "witness", "status"])
        self.assertTrue(all(len(line.split("\t")) == 6 for line in lines))


class Subcommands(unittest.TestCase):
    def test_tile(self):
        res = meandim("tile", "--group", "free:2", "--F", "ball:2", "--tau", "1/5", "--d", "720", "--seed", "7")
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertIn("PASS", res.stdout)

    def test_meanrank_free(self):
        res = meandim("meanrank", "--preset", "ZGamma-free", "--family", "balls:0..4", "--json", "-")
        self.assertEqual(res.returncode, 0, res.stderr)
        b = json.loads(res.stdout)["results"][0]["bracket"]
        self.assertEqual((b["lower"], b["upper"]), ("1", "1"))

    def test_sofic_audit(self):
        res = meandim("sofic-audit", "--group", "free:2", "--d", "1000", "--seed", "42", "--F", "ball:2", "--json", "-")
        self.assertEqual(res.returncode, 0, res.stderr)
        report = json.loads(res.stdout)
        jsonschema.validate(report, REPORT_SCHEMA)
        g = report["results"][0]["data"]["goodness"]
        self.assertEqual(g["degree"], 1000)
        self.assertEqual(report["seeds"], [{"request": "sofic-audit-0", "seeds": [42]}])

    def test_decimal_and_rational_flags_agree(self):
        a = meandim("entropy", "--system", "golden-mean", "--eps", "0.5", "--family", "intervals:1..6")
        b = meandim("entropy", "--system", "golden-mean", "--eps", "1/2", "--family", "intervals:1..6")
        self.assertEqual(a.returncode, 0, a.stderr)
        self.assertEqual(a.stdout, b.stdout)

    def test_every_subcommand_runs(self):
        calls = [
            ["group-info", "--group", "Z^2"],
            ["sofic-gen", "--group", "free:2", "--d", "10", "--seed", "1"],
            ["mdim", "--system", "cube:2", "--eps", "1/10", "--family", "intervals:1..10"],
            ["ocap", "--system", "golden-mean", "--cylinder", "interval:0..0=1", "--family", "intervals:1..8"],
            ["microstates", "--system", "full:2", "--F", "interval:1..1", "--delta", "1/4", "--d", "5"],
            ["decay", "--system", "golden-mean", "--eps", "1/2;1/4", "--family", "intervals:1..4",
             "--metric-base", "induced", "--metric-depth", "4"],
        ]
        for c in calls:
            res = meandim(*c, "--json", "-")
            self.assertEqual(res.returncode, 0, f"{c}: {res.stderr}")
            jsonschema.validate(json.loads(res.stdout), REPORT_SCHEMA)


class ExitCodes(unittest.TestCase):
    def write(self, tmp, text):
        p = pathlib.Path(tmp) / "config.json"
        p.write_text(text)
        return p

    def test_malformed_config_reports_line_and_column(self):
        with tempfile.TemporaryDirectory() as tmp:
            p = self.write(tmp, '{\n  "requests": [\n    {"op": "smith",, }\n  ]\n}\n')
            out = pathlib.Path(tmp) / "report.json"
            res = meandim("--json", out, "run", p)
            self.assertEqual(res.returncode, 2)
            self.assertIn("line 3, column", res.stderr)
            self.assertFalse(out.exists())

    def test_unknown_key_is_rejected_before_running(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = {"requests": [{"op": "smith", "matrix": [[1]]}, {"op": "entropy", "system": "full:2",
                                                                  "eps": "1", "family": "intervals:1..2", "colour": 1}]}
            out = pathlib.Path(tmp) / "report.json"
            res = meandim("--json", out, "run", self.write(tmp, json.dumps(cfg)))
            self.assertEqual(res.returncode, 2)
            self.assertIn("/requests/1/colour", res.stderr)
            self.assertFalse(out.exists())

    def test_empty_request_list(self):
        with tempfile.TemporaryDirectory() as tmp:
            res = meandim("--json", "-", "run", self.write(tmp, '{"requests": []}'))
            self.assertEqual(res.returncode, 0)
            report = json.loads(res.stdout)
            jsonschema.validate(report, REPORT_SCHEMA)
            self.assertEqual(report["results"], [])

    def test_failed_request_exits_one(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = {"requests": [{"op": "microstates", "id": "too-big", "system": "full:2", "F": "interval:1..1",
                                 "delta": "1/4", "sofic": {"d": 12}, "mode": "exhaustive", "budget": 10},
                                {"op": "smith", "matrix": [[2]]}]}
            res = meandim("--json", "-", "run", self.write(tmp, json.dumps(cfg)))
            self.assertEqual(res.returncode, 1, res.stderr)
            report = json.loads(res.stdout)
            jsonschema.validate(report, REPORT_SCHEMA)
            self.assertEqual([r["status"] for r in report["results"]], ["error", "ok"])

    def test_budget_hit_is_partial_with_exit_zero(self):
        res = meandim("microstates", "--system", "golden-mean", "--F", "interval:1..1", "--delta", "1/4",
                      "--d", "12", "--mode", "count", "--budget", "3", "--json", "-")
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertEqual(json.loads(res.stdout)["results"][0]["status"], "partial")

    def test_thread_cap_does_not_change_results(self):
        env = dict(os.environ, MEANDIM_THREADS="1")
        one = subprocess.run([str(EXE), "--tsv", "-", "run", str(PRESETS[0])], capture_output=True, text=True, env=env)
        many = meandim("--threads", "4", "--tsv", "-", "run", PRESETS[0])
        self.assertEqual(one.stdout, many.stdout)


if __name__ == "__main__":
    unittest.main(verbosity=2)
