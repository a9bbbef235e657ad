# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Tests for the wienerlab Command Line
Run with: python -m unittest wienerlab.tests.test_cli
"""

import json
import unittest
from pathlib import Path

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


class TestExitCodes(unittest.TestCase):
    """Error to exit code mapping"""

    def test_mapping(self):
        """Preconditions fail checks, bad input is 2, non-convergence is 3"""
        from wienerlab.commands import exit_code_for
        from wienerlab.exceptions import (
            CapacityConvergenceError,
            ConfigError,
            GeometryError,
            PreconditionError,
            ValidationError,
            WienerLabError,
        )

        self.assertEqual(exit_code_for(PreconditionError("not on the boundary")), 1)
        self.assertEqual(exit_code_for(ConfigError("missing")), 2)
        self.assertEqual(exit_code_for(ValidationError("bad p")), 2)
        self.assertEqual(exit_code_for(GeometryError("beta out of range")), 2)
        self.assertEqual(exit_code_for(CapacityConvergenceError("stalled", 1.0, 10)), 3)
        self.assertEqual(exit_code_for(WienerLabError("other")), 1)


class TestParser(unittest.TestCase):
    """argparse surface"""

    def test_every_command_is_registered(self):
        """Each subcommand takes --config"""
        from wienerlab.commands import build_parser
        from wienerlab.commands.handlers import COMMANDS

        parser = build_parser()
        for name in COMMANDS:
            args = parser.parse_args([name, "--config", "run.cfg", "--workers", "2", "--svg"])
            self.assertEqual(args.command, name)
            self.assertEqual(args.workers, 2)
            self.assertTrue(args.svg)
            self.assertEqual(args.out_dir, Path("out"))

    def test_config_is_required(self):
        """Missing --config is a usage error"""
        from wienerlab.commands import build_parser

        with self.assertRaises(SystemExit):
            build_parser().parse_args(["qo"])


class TestMain(unittest.TestCase):
    """End-to-end runs on small configs"""

    def run_main(self, argv):
        from wienerlab.commands import main
        from wienerlab.commands.manifest import MANIFEST_NAME, load_manifest

        code = main(argv + ["--quiet"])
        manifest = load_manifest(Path(argv[argv.index("--out-dir") + 1]) / MANIFEST_NAME)
        return code, manifest

    def test_qo(self):
        """qo writes its exponents and a manifest"""
        from wienerlab.utils.testing import temporary_directory, write_config

        with temporary_directory() as tmp:
            path = write_config(tmp, "qo.cfg", "qo", {"harnack": {"p": 1.3, "dim": 2, "r": "auto",
                                                                   "gamma": 1.0}})
            code, manifest = self.run_main(["qo", "--config", str(path), "--out-dir", str(tmp / "out")])
            payload = json.loads((tmp / "out" / "qo.json").read_text(encoding="utf-8"))
        self.assertEqual(code, 0)
        self.assertEqual(manifest.exit_code, 0)
        self.assertEqual(manifest.outputs, ["qo.json"])
        self.assertIn(str(path), manifest.inputs)
        self.assertTrue(payload["r_auto"])
        self.assertGreater(payload["q_o"], 0.0)
        self.assertIn("c1", payload)

    def test_empty_capacity(self):
        """A condenser with nothing to charge passes with capacity 0"""
        from wienerlab.utils.testing import temporary_directory

        with temporary_directory() as tmp:
            code, manifest = self.run_main(["capacity", "--config", str(CONFIG_DIR / "capacity_empty.cfg"),
                                            "--out-dir", str(tmp)])
            payload = json.loads((tmp / "capacity.json").read_text(encoding="utf-8"))
        self.assertEqual(code, 0)
        self.assertEqual(payload["value"], 0.0)
        self.assertEqual(manifest.outputs, ["capacity.csv", "capacity.json"])

    def test_solve_zero_data(self):
        """Zero data stay zero and every solve output is listed"""
        from wienerlab.utils.testing import temporary_directory

        with temporary_directory() as tmp:
            code, manifest = self.run_main(["solve", "--config", str(CONFIG_DIR / "solve_zero.cfg"),
                                            "--out-dir", str(tmp)])
            payload = json.loads((tmp / "solve.json").read_text(encoding="utf-8"))
        self.assertEqual(code, 0)
        self.assertEqual(payload["max_sup"], 0.0)
        self.assertEqual(manifest.outputs, ["domain.pgm", "final_slice.csv", "norms.csv", "solve.json",
                                            "trajectory.bin"])
        self.assertGreater(manifest.metrics["time_steps"], 0)

    def test_zero_profile_gives_unit_modulus(self):
        """A profile file with delta = 0 leaves omega_bar at 1 on every row"""
        import csv

        from wienerlab.utils.testing import temporary_directory, write_config

        with temporary_directory() as tmp:
            (tmp / "profile.csv").write_text("scale,delta\n0.5,0\n0.25,0\n0.125,0\n", encoding="utf-8")
            path = write_config(tmp, "wiener.cfg", "wiener", {"wiener": {"profile": "profile.csv", "p": 1.5,
                                                                          "x_o": (0, 0), "q_o": 2.0}})
            code, manifest = self.run_main(["wiener", "--config", str(path), "--out-dir", str(tmp / "out")])
            with (tmp / "out" / "wiener.csv").open(encoding="utf-8") as fh:
                rows = list(csv.DictReader(fh))
        self.assertEqual(code, 0)
        self.assertTrue(rows)
        self.assertTrue(all(float(row["modulus"]) == 1.0 for row in rows))
        self.assertEqual(len(manifest.inputs), 2)

    def test_malformed_profile_is_a_config_error(self):
        """A ratio above 1 in the profile file exits with 2 and still leaves a manifest"""
        from wienerlab.utils.testing import temporary_directory, write_config

        with temporary_directory() as tmp:
            (tmp / "profile.csv").write_text("scale,delta\n0.5,0.2\n0.25,1.5\n", encoding="utf-8")
            path = write_config(tmp, "wiener.cfg", "wiener", {"wiener": {"profile": "profile.csv", "p": 1.5,
                                                                          "x_o": (0, 0), "q_o": 2.0}})
            code, manifest = self.run_main(["wiener", "--config", str(path), "--out-dir", str(tmp / "out")])
        self.assertEqual(code, 2)
        self.assertEqual(manifest.exit_code, 2)
        self.assertEqual(manifest.outputs, [])

    def test_kind_mismatch(self):
        """A config of another kind is rejected with exit code 2"""
        from wienerlab.utils.testing import temporary_directory

        with temporary_directory() as tmp:
            code, manifest = self.run_main(["solve", "--config", str(CONFIG_DIR / "qo.cfg"),
                                            "--out-dir", str(tmp)])
        self.assertEqual(code, 2)
        self.assertEqual(manifest.exit_code, 2)
        self.assertEqual(manifest.outputs, [])

    def test_missing_config(self):
        """An unreadable config still leaves a manifest"""
        from wienerlab.utils.testing import temporary_directory

        with temporary_directory() as tmp:
            code, manifest = self.run_main(["qo", "--config", str(tmp / "absent.cfg"), "--out-dir", str(tmp)])
        self.assertEqual(code, 2)
        self.assertEqual(manifest.command, "qo")

    def test_workers_must_be_positive(self):
        """--workers 0 is a configuration error"""
        from wienerlab.utils.testing import temporary_directory

        with temporary_directory() as tmp:
            code, _ = self.run_main(["qo", "--config", str(CONFIG_DIR / "qo.cfg"), "--workers", "0",
                                     "--out-dir", str(tmp)])
        self.assertEqual(code, 2)

    def test_bundled_configs_parse(self):
        """Every bundled config parses and names a known kind"""
        from wienerlab.commands.handlers import COMMANDS
        from wienerlab.utils.config import load_config

        kinds = {kind for accepted, _, _ in COMMANDS.values() for kind in accepted}
        paths = sorted(CONFIG_DIR.glob("*.cfg"))
        self.assertTrue(paths)
        for path in paths:
            self.assertIn(load_config(path).kind, kinds, path.name)


if __name__ == "__main__":
    unittest.main()
