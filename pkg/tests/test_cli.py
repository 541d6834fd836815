import io
import json
import os
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

from coregular import cli, config
from coregular.gfcore import ConsistencyFault


def fixture(name):
    return os.path.join(config.fixtures_dir(), name)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


class CliTests(unittest.TestCase):
    def test_worked_example_json(self):
        code, out, _ = run("worked-example", "--output", "json", "--quiet", "--degree-bound", "6")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["verdict"]["verdict"], "not_coregular")
        self.assertEqual(payload["different"]["theta"], "x1^2*x2 + x1*x2^2")

    def test_analyze_text_report(self):
        code, out, _ = run("analyze", fixture("mixed_gf3.json"), "--quiet", "--output", "text", "--degree-bound", "6")
        self.assertEqual(code, 0)
        self.assertIn("=" * 72, out)
        self.assertIn("COREGULARITY REPORT  -  mixed-gf3", out)
        self.assertIn("COREGULAR", out)
        self.assertIn("x1^2*x2", out)

    def test_timing_flag(self):
        code, out, _ = run("analyze", fixture("single_transvection_gf2.json"), "--quiet", "--output", "json", "--timing")
        self.assertEqual(code, 0)
        self.assertIn("closing group", json.loads(out)["timing"])

    def test_different_and_dsp(self):
        code, out, _ = run("different", fixture("homology_gf3.json"), "--output", "json")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["theta"], "x2")
        self.assertEqual(payload["hyperplanes"][0]["kind"], "homology")

        code, out, _ = run("dsp", fixture("single_transvection_gf2.json"), "--output", "json")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["witness"], "x2")

        code, out, _ = run("dsp", fixture("single_transvection_gf2.json"), "--output", "text")
        self.assertIn("DIRECT SUMMAND PROPERTY", out)

    def test_invariants(self):
        code, out, _ = run("invariants", fixture("scalar_gf5.json"), "--max-degree", "2", "--output", "json")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["dims"], [1, 0, 3])
        self.assertEqual([g["degree"] for g in payload["algebra_generators"]], [2, 2, 2])

    def test_transfer_image(self):
        code, out, _ = run("transfer-image", fixture("transvection_gf3.json"), "--output", "json")
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["principal"])

    def test_verify_theorem(self):
        code, out, _ = run("verify-theorem", "--n", "2", "--p", "2", "--max-order", "4", "--quiet", "--output", "json")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(len(payload["rows"]), 1)
        self.assertEqual(payload["summary"]["violations"], 0)

        code, out, _ = run("verify-theorem", "--n", "2", "--p", "3", "--max-order", "3", "--quiet")
        self.assertEqual(code, 0)
        self.assertIn("THEOREM CENSUS", out)

    def test_sampled_json_is_byte_identical(self):
        argv = ("verify-theorem", "--n", "3", "--p", "3", "--max-order", "27", "--sampled",
                "--seed", "42", "--count", "20", "--quiet", "--output", "json")
        first_code, first, _ = run(*argv)
        second_code, second, _ = run(*argv)
        self.assertEqual((first_code, second_code), (0, 0))
        self.assertEqual(first, second)
        self.assertTrue(json.loads(first)["rows"])

    def test_violations_exit_two(self):
        row = mock.Mock(ok=False, violations=["theorem broke"], signature="sig")
        row.name = "bad"
        census = mock.Mock(rows=[row], violations=[row])
        census.to_json.return_value = "{}"
        with mock.patch.object(cli, "verify_theorem", return_value=census):
            code, _, _ = run("verify-theorem", "--n", "2", "--p", "2", "--max-order", "4", "--quiet", "--output", "json")
        self.assertEqual(code, 2)

    def test_input_errors_exit_one(self):
        code, _, err = run("analyze", fixture("missing.json"))
        self.assertEqual(code, 1)
        self.assertIn("Error:", err)

        code, _, err = run("verify-theorem", "--n", "2", "--p", "4", "--max-order", "4")
        self.assertEqual(code, 1)
        self.assertIn("not a prime", err)

        code, _, err = run("analyze", fixture("worked_example.json"), "--element-cap", "3", "--quiet")
        self.assertEqual(code, 1)
        self.assertIn("element cap", err)

        code, _, err = run("analyze", fixture("homology_gf3.json"), "--degree-bound", "0")
        self.assertEqual(code, 1)

    def test_usage_errors_exit_one(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                cli.main([])
        self.assertEqual(ctx.exception.code, 1)
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                cli.main(["analyze", fixture("homology_gf3.json"), "--output", "xml"])
        self.assertEqual(ctx.exception.code, 1)

    def test_consistency_fault_exits_three(self):
        with mock.patch.object(cli, "analyze", side_effect=ConsistencyFault("boom")):
            code, _, err = run("analyze", fixture("homology_gf3.json"))
        self.assertEqual(code, 3)
        self.assertIn("Internal consistency fault: boom", err)

    def test_output_default_from_environment(self):
        with mock.patch.dict(os.environ, {"COREGULAR_OUTPUT": "json"}):
            code, out, _ = run("different", fixture("single_transvection_gf2.json"))
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["theta"], "x1")


if __name__ == "__main__":
    unittest.main()
