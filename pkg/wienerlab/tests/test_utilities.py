# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Tests for wienerlab Utility Infrastructure
Run with: python -m unittest wienerlab.tests.test_utilities
"""

import io
import json
import logging
import unittest


class TestConfigParsing(unittest.TestCase):
    """Plain-text config format"""

    def test_sections_and_root_keys(self):
        """Keys before the first header live in the root section"""
        from wienerlab.utils.config import parse_config

        doc = parse_config("# run\nkind = solve\n[Domain]\nGrid-N = 16  # cells\n")
        self.assertEqual(doc.kind, "solve")
        self.assertEqual(doc.get_int("domain", "grid_n"), 16)
        self.assertEqual(doc.section("domain")["grid_n"].line, 4)

    def test_duplicate_key(self):
        """A repeated key names its second line"""
        from wienerlab.exceptions import ConfigError
        from wienerlab.utils.config import parse_config

        with self.assertRaises(ConfigError) as ctx:
            parse_config("[model]\np = 1.5\np = 1.3\n")
        self.assertEqual(ctx.exception.details["line"], 3)
        self.assertEqual(ctx.exception.details["field"], "model.p")

    def test_malformed_lines(self):
        """Lines without '=' and broken headers are rejected"""
        from wienerlab.exceptions import ConfigError
        from wienerlab.utils.config import parse_config

        with self.assertRaises(ConfigError):
            parse_config("kind = solve\njust words\n")
        with self.assertRaises(ConfigError):
            parse_config("[domain\n")

    def test_typed_getters(self):
        """Numbers, booleans, lists and auto values"""
        from wienerlab.exceptions import ConfigError
        from wienerlab.utils.config import parse_config

        doc = parse_config("[s]\nx = 0.5\nflag = Yes\npoint = 0, -1\nr = auto\nbad = abc\n")
        self.assertEqual(doc.get_float("s", "x"), 0.5)
        self.assertTrue(doc.get_bool("s", "flag"))
        self.assertEqual(doc.get_floats("s", "point"), (0.0, -1.0))
        self.assertIsNone(doc.get_optional_float("s", "r"))
        self.assertEqual(doc.get_float("s", "missing", 2.0), 2.0)
        with self.assertRaises(ConfigError):
            doc.get_float("s", "bad")
        with self.assertRaises(ConfigError):
            doc.get_float("s", "missing")

    def test_overrides_leave_the_original(self):
        """with_overrides returns a copy"""
        from wienerlab.utils.config import parse_config

        doc = parse_config("[solver]\ndt = 0.01\n")
        changed = doc.with_overrides({"solver": {"dt": 0.02}})
        self.assertEqual(changed.get_float("solver", "dt"), 0.02)
        self.assertEqual(doc.get_float("solver", "dt"), 0.01)

    def test_missing_file(self):
        """An unreadable path is a config error"""
        from wienerlab.exceptions import ConfigError
        from wienerlab.utils.config import load_config

        with self.assertRaises(ConfigError):
            load_config("/nonexistent/run.cfg")

    def test_digest_follows_the_text(self):
        """Equal text gives equal digests"""
        from wienerlab.utils.config import parse_config

        self.assertEqual(parse_config("kind = qo\n").digest, parse_config("kind = qo\n").digest)
        self.assertNotEqual(parse_config("kind = qo\n").digest, parse_config("kind = solve\n").digest)


class TestValidators(unittest.TestCase):
    """Chainable validation"""

    def test_errors_collect_per_field(self):
        """Each failed rule adds one error"""
        from wienerlab.utils.validators import Validator

        result = (Validator()
                  .field("dt", -1.0).positive()
                  .field("method", "newton").in_list(["lbfgs", "nesterov"])
                  .validate())
        self.assertFalse(result.is_valid)
        self.assertEqual([e.field for e in result.errors], ["dt", "method"])

    def test_non_numbers_skip_the_chain(self):
        """A non-number reports once"""
        from wienerlab.utils.validators import Validator

        result = Validator().field("tol", "tiny").positive().at_least(0.0).validate()
        self.assertEqual(len(result.errors), 1)
        self.assertEqual(result.errors[0].code, "type")

    def test_validate_or_raise(self):
        """Errors are raised together"""
        from wienerlab.exceptions import ValidationError
        from wienerlab.utils.validators import validate_dimension, validate_exponent, validate_or_raise

        with self.assertRaises(ValidationError) as ctx:
            validate_or_raise(validate_exponent(2.0), validate_dimension(4))
        self.assertEqual(len(ctx.exception.details["errors"]), 2)

    def test_point_length(self):
        """Points need N coordinates"""
        from wienerlab.utils.validators import validate_point

        self.assertTrue(validate_point((0.0, 0.0), 2).is_valid)
        self.assertFalse(validate_point((0.0,), 2).is_valid)


class TestExceptions(unittest.TestCase):
    """Error hierarchy"""

    def test_to_dict(self):
        """Errors serialize with their class and details"""
        from wienerlab.exceptions import ConfigError

        data = ConfigError("bad value", field="solver.dt", line=7).to_dict()
        self.assertEqual(data["error"], "ConfigError")
        self.assertEqual(data["details"]["line"], 7)

    def test_numerical_family(self):
        """Both solver failures are numerical errors"""
        from wienerlab.exceptions import CapacityConvergenceError, NumericalError, SolverConvergenceError

        self.assertIsInstance(CapacityConvergenceError("stalled", residual=1.0, iterations=3), NumericalError)
        self.assertIsInstance(SolverConvergenceError("stalled", dt=0.1), NumericalError)


class TestStructuredLogging(unittest.TestCase):
    """JSON log records and run IDs"""

    def setUp(self):
        from wienerlab.utils.logging import RunContext, configure

        self.stream = io.StringIO()
        configure(logging.DEBUG, self.stream)
        for handler in logging.getLogger("wienerlab").handlers:
            if getattr(handler, "_wienerlab", False):
                handler.setStream(self.stream)
        RunContext.clear()

    def records(self):
        return [json.loads(line) for line in self.stream.getvalue().splitlines() if line.strip()]

    def test_records_are_json(self):
        """Every record carries level, logger, run ID and data"""
        from wienerlab.utils.logging import RunContext, get_logger

        RunContext.set_id("run-a")
        get_logger("wienerlab.test").info("Step accepted", t=0.25)
        record = self.records()[-1]
        self.assertEqual(record["level"], "INFO")
        self.assertEqual(record["run_id"], "run-a")
        self.assertEqual(record["data"], {"t": 0.25})

    def test_context_is_merged(self):
        """log_context adds fields to every record in the block"""
        from wienerlab.utils.logging import get_logger, log_context

        with log_context(check="harnack"):
            get_logger("wienerlab.test").warning("Vacuous row", rho=0.125)
        get_logger("wienerlab.test").warning("Outside")
        inside, outside = self.records()[-2:]
        self.assertEqual(inside["data"], {"check": "harnack", "rho": 0.125})
        self.assertNotIn("data", outside)

    def test_check_event_level(self):
        """Failed checks log as warnings"""
        from wienerlab.utils.logging import get_logger

        get_logger("wienerlab.test").check_event("boundary_decay", False, gamma_fit=0.0)
        record = self.records()[-1]
        self.assertEqual(record["level"], "WARNING")
        self.assertFalse(record["data"]["passed"])

    def test_run_id_is_stable(self):
        """The generated ID persists until cleared"""
        from wienerlab.utils.logging import RunContext

        first = RunContext.get_id()
        self.assertEqual(RunContext.get_id(), first)
        RunContext.clear()
        self.assertNotEqual(RunContext.get_id(), first)


class TestMetrics(unittest.TestCase):
    """In-process metrics"""

    def test_counters_and_snapshot(self):
        """Tagged counters show up in the snapshot without the prefix"""
        from wienerlab.utils.metrics import MetricsCollector

        collector = MetricsCollector()
        collector.increment("capacity_solves", tags={"method": "lbfgs"})
        collector.increment("capacity_solves", tags={"method": "lbfgs"})
        with collector.timer("solve"):
            pass
        snapshot = collector.snapshot()
        self.assertEqual(snapshot["capacity_solves:method=lbfgs"], 2.0)
        self.assertEqual(snapshot["solve:timings"]["count"], 1)
        collector.reset()
        self.assertEqual(collector.snapshot(), {})

    def test_check_outcomes(self):
        """Failures are counted separately"""
        from wienerlab.utils.metrics import metrics, record_check

        metrics.reset()
        record_check("extinction", True)
        record_check("extinction", False)
        self.assertEqual(metrics.get_counter("checks_total", tags={"check": "extinction"}), 2.0)
        self.assertEqual(metrics.get_counter("checks_failed", tags={"check": "extinction"}), 1.0)


class TestBackgroundJobs(unittest.TestCase):
    """Ordered parallel map"""

    def test_order_is_kept(self):
        """Results follow the input order for any worker count"""
        from wienerlab.utils.background import run_ordered

        items = list(range(12))
        self.assertEqual(run_ordered(lambda x: x * x, items, workers=4), [x * x for x in items])
        self.assertEqual(run_ordered(lambda x: x * x, items, workers=1), [x * x for x in items])

    def test_run_id_reaches_the_workers(self):
        """Jobs see the caller's run ID"""
        from wienerlab.utils.background import run_ordered
        from wienerlab.utils.logging import RunContext

        RunContext.set_id("shared-run")
        self.assertEqual(run_ordered(lambda _: RunContext.get_id(), range(3), workers=3), ["shared-run"] * 3)

    def test_first_failure_propagates(self):
        """An exception in a job is raised to the caller"""
        from wienerlab.utils.background import run_ordered

        def job(x):
            if x == 2:
                raise ValueError("bad item")
            return x

        with self.assertRaises(ValueError):
            run_ordered(job, range(4), workers=2)


class TestLoggerDecorators(unittest.TestCase):
    """log_action and log_experiment"""

    def setUp(self):
        from wienerlab.utils.logging import configure

        self.stream = io.StringIO()
        configure(logging.DEBUG, self.stream)
        for handler in logging.getLogger("wienerlab").handlers:
            if getattr(handler, "_wienerlab", False):
                handler.setStream(self.stream)

    def messages(self):
        return [json.loads(line)["message"] for line in self.stream.getvalue().splitlines() if line.strip()]

    def test_experiment_is_timed(self):
        """Start and completion are logged with the pass flag"""
        from types import SimpleNamespace

        from wienerlab.logger import log_experiment

        @log_experiment("Toy check")
        def check():
            return SimpleNamespace(passed=True)

        self.assertTrue(check().passed)
        self.assertEqual(self.messages()[-2:], ["Experiment Started: Toy check", "Experiment Completed: Toy check"])

    def test_action_failure_is_logged_and_raised(self):
        """Exceptions leave an error record with the serialized error"""
        from wienerlab.exceptions import PreconditionError
        from wienerlab.logger import log_action

        @log_action("Toy action")
        def fail():
            raise PreconditionError("not a boundary point")

        with self.assertRaises(PreconditionError):
            fail()
        record = json.loads(self.stream.getvalue().splitlines()[-1])
        self.assertEqual(record["level"], "ERROR")
        self.assertEqual(record["data"]["error"]["error"], "PreconditionError")


class TestRunManifest(unittest.TestCase):
    """manifest.json"""

    def test_manifest_records_inputs_and_outputs(self):
        """Config digest, outputs and exit code are written"""
        from wienerlab.commands.manifest import MANIFEST_NAME, load_manifest
        from wienerlab.commands.manifest import RunManifest
        from wienerlab.utils.testing import make_config, temporary_directory

        doc = make_config("qo", {"harnack": {"p": 1.3, "dim": 2}})
        manifest = RunManifest.start("qo", doc, workers=2, seed=5)
        with temporary_directory() as tmp:
            manifest.add_output(tmp / "qo.json")
            manifest.add_output(tmp / "qo.json")
            manifest.exit_code = 0
            loaded = load_manifest(manifest.write(tmp))
            self.assertTrue((tmp / MANIFEST_NAME).exists())
        self.assertEqual(loaded.outputs, ["qo.json"])
        self.assertEqual(loaded.inputs[doc.source], doc.digest)
        self.assertEqual(loaded.config["harnack"]["p"], "1.3")
        self.assertEqual((loaded.workers, loaded.seed, loaded.exit_code), (2, 5, 0))


if __name__ == "__main__":
    unittest.main()
