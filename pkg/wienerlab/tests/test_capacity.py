# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Capacity Tests
Run with: python -m unittest wienerlab.tests.test_capacity
"""

import math
import os
import unittest

import numpy as np

from wienerlab.utils.testing import assert_relative_close


class TestRadialOracle(unittest.TestCase):
    """Closed-form capacities of concentric balls"""

    def test_logarithmic_case(self):
        """p = N gives 2 pi / log(R / r) in the plane"""
        from wienerlab.capacity.radial import radial_capacity

        self.assertAlmostEqual(radial_capacity(2, 2.0, 0.25, 1.0), 2 * math.pi / math.log(4.0), places=10)

    def test_quadrature_matches_closed_form(self):
        """Both evaluations agree for a singular exponent"""
        from wienerlab.capacity.radial import radial_capacity

        quad = radial_capacity(3, 1.5, 0.2, 0.9)
        closed = radial_capacity(3, 1.5, 0.2, 0.9, closed_form=True)
        self.assertAlmostEqual(quad, closed, places=9)

    def test_sphere_areas(self):
        """|S^0| = 2, |S^1| = 2 pi, |S^2| = 4 pi"""
        from wienerlab.capacity.radial import sphere_area

        self.assertAlmostEqual(sphere_area(1), 2.0)
        self.assertAlmostEqual(sphere_area(2), 2 * math.pi)
        self.assertAlmostEqual(sphere_area(3), 4 * math.pi)

    def test_radii_must_be_ordered(self):
        """R <= r is invalid"""
        from wienerlab.capacity.radial import radial_capacity
        from wienerlab.exceptions import ValidationError

        with self.assertRaises(ValidationError):
            radial_capacity(2, 1.5, 1.0, 0.5)


class TestCondenserCapacity(unittest.TestCase):
    """Discrete p-capacity by energy minimization"""

    def test_ball_condenser_matches_the_oracle(self):
        """N = 2, p = 1.3 on 128 cells lands within 2% of the radial value"""
        from wienerlab.capacity.condenser import CapacitySettings, ball_condenser, p_capacity
        from wienerlab.capacity.radial import radial_capacity

        result = p_capacity(ball_condenser(2, 0.25, 1.0, 1.3, 128), CapacitySettings(method="lbfgs", tol=1e-9))
        assert_relative_close(self, result.value, radial_capacity(2, 1.3, 0.25, 1.0), 0.02)
        self.assertGreater(result.iterations, 0)

    @unittest.skipUnless(os.environ.get("WIENERLAB_SLOW_TESTS"), "set WIENERLAB_SLOW_TESTS=1 for 128-cell 3-D runs")
    def test_bundled_ball_configs_match_the_oracle(self):
        """Every bundled ball condenser passes its 2% oracle check through the command line"""
        import json
        from pathlib import Path

        from wienerlab.commands import main
        from wienerlab.utils.testing import temporary_directory

        configs = sorted((Path(__file__).resolve().parent.parent / "configs").glob("capacity_ball_*.cfg"))
        self.assertEqual(len(configs), 4)
        for path in configs:
            with self.subTest(config=path.name), temporary_directory() as tmp:
                code = main(["capacity", "--config", str(path), "--out-dir", str(tmp), "--quiet"])
                payload = json.loads((tmp / "capacity.json").read_text(encoding="utf-8"))
                self.assertEqual(code, 0)
                self.assertLessEqual(payload["relative_error"], 0.02)

    def test_cube_capacity_scales_like_rho_to_the_n_minus_p(self):
        """cap_p(K_rho, K_3rho/2) halves its scale by the factor (1/2)^{N-p}"""
        from wienerlab.capacity.condenser import CapacitySettings, cube_condenser, p_capacity

        settings = CapacitySettings(tol=1e-9)
        large = p_capacity(cube_condenser((0.0, 0.0), 0.5, 1.3, 24), settings).value
        small = p_capacity(cube_condenser((0.0, 0.0), 0.25, 1.3, 24), settings).value
        assert_relative_close(self, small / large, 0.5 ** 0.7, 0.03)
        self.assertAlmostEqual(0.5 ** 0.7, 0.6156, places=4)

    def test_empty_obstacle_has_zero_capacity(self):
        """cap_p of the empty set is exactly 0 without iterating"""
        from wienerlab.capacity.condenser import cube_condenser, p_capacity

        condenser = cube_condenser((0.0, 0.0), 0.25, 1.5, 16, obstacle=lambda pts: np.zeros(len(pts), dtype=bool))
        result = p_capacity(condenser)
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.iterations, 0)

    def test_capacity_is_monotone_in_the_obstacle(self):
        """Removing half of K lowers the capacity"""
        from wienerlab.capacity.condenser import CapacitySettings, cube_condenser, p_capacity

        settings = CapacitySettings(tol=1e-8)
        full = p_capacity(cube_condenser((0.0, 0.0), 0.25, 1.5, 24), settings).value
        half = p_capacity(cube_condenser((0.0, 0.0), 0.25, 1.5, 24, obstacle=lambda pts: pts[:, 0] > 0),
                          settings).value
        self.assertGreater(half, 0.0)
        self.assertLess(half, full)

    def test_minimizer_stays_in_unit_range(self):
        """The returned potential is 1 on K and within [0, 1]"""
        from wienerlab.capacity.condenser import cube_condenser, p_capacity

        condenser = cube_condenser((0.0, 0.0), 0.25, 1.5, 16)
        u = p_capacity(condenser).minimizer
        self.assertTrue(np.all(u >= 0.0) and np.all(u <= 1.0))
        np.testing.assert_allclose(u[condenser.inner], 1.0)

    def test_obstacle_touching_the_boundary_is_rejected(self):
        """K must stay off the faces of Omega"""
        from wienerlab.capacity.condenser import Condenser
        from wienerlab.exceptions import GeometryError
        from wienerlab.geometry.cube import Cube

        with self.assertRaises(GeometryError):
            Condenser(np.ones((8, 8), dtype=bool), Cube((0.0, 0.0), 1.0), 1.5)

    def test_nesterov_agrees_with_lbfgs(self):
        """The fallback method reaches the same energy"""
        from wienerlab.capacity.condenser import CapacitySettings, cube_condenser, p_capacity

        condenser = cube_condenser((0.0, 0.0), 0.25, 1.5, 16)
        lbfgs = p_capacity(condenser, CapacitySettings(method="lbfgs", tol=1e-8)).value
        nesterov = p_capacity(condenser, CapacitySettings(method="nesterov", tol=1e-8, max_iter=50000)).value
        assert_relative_close(self, nesterov, lbfgs, 0.02)

    def test_settings_are_validated(self):
        """Unknown methods and out-of-range annuli are rejected"""
        from wienerlab.capacity.condenser import CapacitySettings
        from wienerlab.exceptions import ValidationError

        with self.assertRaises(ValidationError):
            CapacitySettings(method="newton").validate()
        with self.assertRaises(ValidationError):
            CapacitySettings(annulus_ratio=1.0).validate()

    def test_settings_from_config(self):
        """The [capacity] section maps onto the settings, auto cells included"""
        from wienerlab.capacity.condenser import CapacitySettings
        from wienerlab.utils.testing import make_config

        doc = make_config("capacity", {"capacity": {"method": "Nesterov", "condenser_cells": "auto", "workers": 2}})
        settings = CapacitySettings.from_config(doc)
        self.assertEqual(settings.method, "nesterov")
        self.assertIsNone(settings.condenser_cells)
        self.assertEqual(settings.workers, 2)
        self.assertEqual(settings.cells_for(2), 48)

    def test_default_method_is_accelerated_descent(self):
        """Backtracking accelerated descent is the default and L-BFGS-B stays selectable"""
        from wienerlab.capacity.condenser import CapacitySettings
        from wienerlab.utils.testing import make_config

        self.assertEqual(CapacitySettings().method, "nesterov")
        self.assertEqual(CapacitySettings.from_config(make_config("capacity", {})).method, "nesterov")
        doc = make_config("capacity", {"capacity": {"method": "lbfgs"}})
        self.assertEqual(CapacitySettings.from_config(doc).method, "lbfgs")


class TestCapacityProfile(unittest.TestCase):
    """delta(rho) on dyadic scales"""

    def fast_settings(self):
        from wienerlab.capacity.condenser import CapacitySettings
        return CapacitySettings(condenser_cells=16, tol=1e-7)

    def test_full_cube_has_zero_ratios(self):
        """Without complement every numerator is empty"""
        from wienerlab.capacity.profile import delta_ratio
        from wienerlab.utils.testing import make_full_cube_domain

        domain = make_full_cube_domain(32)
        self.assertEqual(delta_ratio(domain, (0.0, 0.0), 0.25, 1.5, self.fast_settings()), 0.0)

    def test_half_space_ratio_is_strictly_between(self):
        """A flat boundary carries a fixed fraction of the capacity"""
        from wienerlab.capacity.profile import delta_ratio
        from wienerlab.utils.testing import make_half_space_domain

        delta = delta_ratio(make_half_space_domain(32), (0.0, 0.0), 0.25, 1.5, self.fast_settings())
        self.assertGreater(delta, 0.1)
        self.assertLess(delta, 1.0)

    def test_complement_covering_the_cube_gives_one(self):
        """K_rho(x_o) inside the complement makes both condensers equal"""
        from wienerlab.capacity.profile import delta_ratio
        from wienerlab.utils.testing import make_half_space_domain

        domain = make_half_space_domain(64, offset=-0.5)
        self.assertEqual(delta_ratio(domain, (0.0, 0.0), 0.125, 1.5, self.fast_settings()), 1.0)

    def test_half_space_ratio_is_scale_invariant(self):
        """delta at rho and rho / 2 agree for a flat boundary"""
        from wienerlab.capacity.profile import delta_ratio
        from wienerlab.utils.testing import make_half_space_domain

        domain = make_half_space_domain(64)
        coarse = delta_ratio(domain, (0.0, 0.0), 0.25, 1.5, self.fast_settings())
        fine = delta_ratio(domain, (0.0, 0.0), 0.125, 1.5, self.fast_settings())
        assert_relative_close(self, fine, coarse, 1e-3)

    def test_half_space_profile_is_uniformly_fat(self):
        """Scale invariance keeps delta bounded below at every scale"""
        from wienerlab.capacity.profile import capacity_profile
        from wienerlab.utils.testing import make_half_space_domain
        from wienerlab.wiener.integral import is_uniformly_fat

        profile = capacity_profile(make_half_space_domain(64), (0.0, 0.0), 1.5, 3, self.fast_settings(), rho_0=0.5)
        self.assertEqual(profile.gaps, {})
        self.assertTrue(is_uniformly_fat(profile))
        self.assertAlmostEqual(profile.scales[-1], 0.125)

    def test_unresolved_scales_become_gaps(self):
        """Scales below min_cells cells are recorded, not fatal"""
        from wienerlab.capacity.profile import capacity_profile
        from wienerlab.utils.testing import make_half_space_domain

        profile = capacity_profile(make_half_space_domain(16), (0.0, 0.0), 1.5, 4, self.fast_settings(), rho_0=0.5)
        # h = 0.125, so rho = 0.25 and below span fewer than 4 cells
        self.assertIn(3, profile.gaps)
        self.assertTrue(math.isnan(profile.deltas[3]))
        self.assertFalse(math.isnan(profile.deltas[0]))

    def test_oversized_top_scale_is_rejected(self):
        """rho_0 must fit the annulus into the bounding cube"""
        from wienerlab.capacity.profile import capacity_profile
        from wienerlab.exceptions import PreconditionError
        from wienerlab.utils.testing import make_half_space_domain

        with self.assertRaises(PreconditionError):
            capacity_profile(make_half_space_domain(16), (0.0, 0.0), 1.5, 3, self.fast_settings(), rho_0=0.9)

    def test_worker_count_does_not_change_the_profile(self):
        """Parallel scales give the same numbers in the same order"""
        from dataclasses import replace

        from wienerlab.capacity.profile import capacity_profile
        from wienerlab.utils.testing import make_half_space_domain

        domain = make_half_space_domain(32)
        serial = capacity_profile(domain, (0.0, 0.0), 1.5, 3, replace(self.fast_settings(), workers=1), rho_0=0.5)
        parallel = capacity_profile(domain, (0.0, 0.0), 1.5, 3, replace(self.fast_settings(), workers=3),
                                    rho_0=0.5)
        self.assertEqual(serial.deltas, parallel.deltas)

    def test_profile_rejects_invalid_values(self):
        """Scales decrease strictly and ratios stay in [0, 1]"""
        from wienerlab.capacity.profile import CapacityProfile

        with self.assertRaises(ValueError):
            CapacityProfile((0.0,), 1.5, [0.25, 0.5], [0.5, 0.5])
        with self.assertRaises(ValueError):
            CapacityProfile((0.0,), 1.5, [0.5, 0.25], [0.5, 1.5])

    def test_profile_csv_keeps_gaps(self):
        """A NaN ratio written to CSV reads back as a gap"""
        from wienerlab.capacity.profile import CapacityProfile
        from wienerlab.utils.testing import make_profile, temporary_directory

        profile = make_profile([0.5, 0.4, math.nan])
        with temporary_directory() as tmp:
            loaded = CapacityProfile.from_csv(profile.to_csv(tmp / "profile.csv"), (0.0, 0.0), 1.5)
        self.assertEqual(list(loaded.gaps), [2])
        self.assertEqual(loaded.deltas[:2], [0.5, 0.4])


if __name__ == "__main__":
    unittest.main()
