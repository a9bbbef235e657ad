# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Parabolic Solver Tests
Run with: python -m unittest wienerlab.tests.test_pde
"""

import unittest

import numpy as np

from wienerlab.utils.testing import make_constant_trajectory, make_full_cube_domain, make_half_space_domain


class TestFluxModels(unittest.TestCase):
    """Flux models and their structure constants"""

    def test_exponent_must_be_singular(self):
        """p outside (1, 2) is rejected"""
        from wienerlab.exceptions import ValidationError
        from wienerlab.pde.structure import FluxModel

        with self.assertRaises(ValidationError):
            FluxModel(2.5, 2)
        with self.assertRaises(ValidationError):
            FluxModel(1.0, 2)

    def test_modulation_is_bounded(self):
        """|m| < 1 keeps the coefficients positive"""
        from wienerlab.exceptions import ValidationError
        from wienerlab.pde.structure import FluxModel

        with self.assertRaises(ValidationError):
            FluxModel(1.5, 2, "diagonal-matrix", (1.0, 2.0), modulation=1.0)

    def test_coefficients_match_the_dimension(self):
        """A diagonal model needs one positive coefficient per axis"""
        from wienerlab.exceptions import ValidationError
        from wienerlab.pde.structure import FluxModel

        with self.assertRaises(ValidationError):
            FluxModel(1.5, 2, "diagonal-matrix", (1.0,))
        model = FluxModel(1.5, 2, "diagonal-matrix")
        self.assertEqual(model.coefficients, (1.0, 1.0))

    def test_structure_regime(self):
        """p_* = 4/3 in the plane separates the two regimes"""
        from wienerlab.pde.structure import FluxModel

        self.assertEqual(FluxModel(1.25, 2).structure().regime, "sub-critical")
        self.assertEqual(FluxModel(1.5, 2).structure().regime, "super-critical")

    def test_diagonal_structure_constants(self):
        """C_o and C_1 bound the modulated coefficients"""
        from wienerlab.pde.structure import FluxModel

        params = FluxModel(1.5, 2, "diagonal-matrix", (1.0, 2.0), modulation=0.25).structure()
        self.assertAlmostEqual(params.C_o, 0.75)
        self.assertAlmostEqual(params.C_1, 2.5)

    def test_model_from_config(self):
        """The [model] section selects kind and coefficients"""
        from wienerlab.pde.structure import FluxModel
        from wienerlab.utils.testing import make_config

        doc = make_config("solve", {"model": {"kind": "Diagonal-Matrix", "p": 1.4, "coefficients": [1.0, 3.0]}})
        model = FluxModel.from_config(doc, 2)
        self.assertEqual(model.kind, "diagonal-matrix")
        self.assertEqual(model.coefficients, (1.0, 3.0))
        self.assertFalse(model.is_prototype)


class TestTimeGrid(unittest.TestCase):
    """Step end times"""

    def test_constant_steps_end_on_the_horizon(self):
        """A partial last step lands exactly on T"""
        from wienerlab.pde.solver import SolverSettings, time_grid

        grid = time_grid(0.25, SolverSettings(dt=0.1))
        np.testing.assert_allclose(grid, [0.0, 0.1, 0.2, 0.25])

    def test_longer_runs_share_the_prefix(self):
        """Constant steps are k dt regardless of the horizon"""
        from wienerlab.pde.solver import SolverSettings, time_grid

        settings = SolverSettings(dt=0.1)
        short, long = time_grid(0.3, settings), time_grid(0.6, settings)
        self.assertEqual(short, long[:len(short)])

    def test_growing_steps_respect_the_cap(self):
        """dt grows geometrically up to dt_max"""
        from wienerlab.pde.solver import SolverSettings, time_grid

        grid = time_grid(1.0, SolverSettings(dt=0.1, dt_growth=2.0, dt_max=0.3))
        steps = np.diff(grid)
        self.assertAlmostEqual(grid[-1], 1.0)
        self.assertTrue(np.all(steps <= 0.3 + 1e-12))
        self.assertAlmostEqual(steps[1], 0.2)

    def test_settings_are_validated(self):
        """Shrinking steps are not allowed"""
        from wienerlab.exceptions import ValidationError
        from wienerlab.pde.solver import SolverSettings

        with self.assertRaises(ValidationError):
            SolverSettings(dt_growth=0.5).validate()


class TestSolver(unittest.TestCase):
    """Implicit Euler with Newton"""

    def test_zero_data_stay_zero(self):
        """g = 0 and u_o = 0 give the trivial solution"""
        from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel

        domain = make_half_space_domain(16)
        traj = solve_cauchy_dirichlet(domain, FluxModel(1.5, 2), None, 0.05, SolverSettings(dt=0.025))
        self.assertEqual(traj.times[-1], 0.05)
        self.assertEqual(float(np.abs(traj.fields[-1]).max()), 0.0)
        self.assertEqual(traj.metadata["T"], 0.05)

    def test_constants_are_stationary(self):
        """A constant datum on the full cube is an exact solution"""
        from wienerlab.geometry.datum import BoundaryDatum
        from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel

        g = BoundaryDatum("constant", lambda points, t: np.full(len(points), 0.5))
        traj = solve_cauchy_dirichlet(make_full_cube_domain(16), FluxModel(1.5, 2), g, 0.1, SolverSettings(dt=0.05))
        np.testing.assert_allclose(traj.fields[-1], 0.5)

    def test_maximum_principle(self):
        """The solution stays within the range of the ramp datum"""
        from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel
        from wienerlab.utils.testing import make_ramp_datum

        domain = make_half_space_domain(16, datum=make_ramp_datum())
        traj = solve_cauchy_dirichlet(domain, FluxModel(1.5, 2), domain.datum, 0.1, SolverSettings(dt=0.05))
        for field in traj.fields:
            self.assertGreaterEqual(float(field.min()), -1e-6)
            self.assertLessEqual(float(field.max()), 1.0 + 1e-6)

    def test_dimension_mismatch(self):
        """The model and the domain must agree on N"""
        from wienerlab.pde.solver import solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel

        with self.assertRaises(ValueError):
            solve_cauchy_dirichlet(make_full_cube_domain(16), FluxModel(1.5, 1), None, 0.1)

    def test_manufactured_errors_decrease(self):
        """Three refinement levels lower the max-norm error at first order in time"""
        from wienerlab.pde.manufactured import ManufacturedSolution, manufactured_convergence

        levels = [(16, 0.02), (32, 0.01), (64, 0.005)]
        report = manufactured_convergence(ManufacturedSolution(2, 1.5), levels, T=0.1)
        self.assertTrue(report.monotone)
        self.assertEqual(len(report.orders), 2)
        self.assertGreaterEqual(report.min_order, 0.9)

    def test_ordered_data_give_ordered_solutions(self):
        """g1 <= g2 on random pairs keeps u1 <= u2 at every cell and time"""
        from wienerlab.geometry.datum import BoundaryDatum
        from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel
        from wienerlab.utils.testing import make_spike_domain

        rng = np.random.default_rng(20)
        model = FluxModel(1.5, 2)
        settings = SolverSettings(dt=0.02)
        for domain in (make_half_space_domain(16), make_spike_domain(16)):
            worst = -np.inf
            for _ in range(20):
                a, b, c = rng.uniform(-0.5, 0.5, 3)
                s, w = rng.uniform(0.05, 0.5), rng.uniform(0.0, 0.5)

                def low(x, t, a=a, b=b, c=c):
                    return a + b * x[:, 0] + c * x[:, 1] * (1 + t)

                def high(x, t, low=low, s=s, w=w):
                    return low(x, t) + s + w * x[:, 0] ** 2

                u1 = solve_cauchy_dirichlet(domain, model, BoundaryDatum("low", low), 0.04, settings)
                u2 = solve_cauchy_dirichlet(domain, model, BoundaryDatum("high", high), 0.04, settings)
                for f1, f2 in zip(u1.fields, u2.fields):
                    worst = max(worst, float((f1 - f2).max()))
            self.assertLessEqual(worst, 1e-6)

    def test_halving_dt_keeps_the_oscillation(self):
        """Oscillations on a boundary cylinder move by less than 5% when dt is halved"""
        from wienerlab.geometry.cube import Cube, Cylinder
        from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel
        from wienerlab.pde.trajectory import ess_osc
        from wienerlab.utils.testing import make_ramp_datum

        domain = make_half_space_domain(16, datum=make_ramp_datum())
        cylinder = Cylinder(Cube((0.0, 0.0), 0.5), 0.4, 0.2)
        oscillations = []
        for dt in (0.02, 0.01):
            traj = solve_cauchy_dirichlet(domain, FluxModel(1.5, 2), domain.datum, 0.4, SolverSettings(dt=dt))
            oscillations.append(ess_osc(traj, cylinder)[2])
        self.assertGreater(oscillations[0], 0.0)
        self.assertLess(abs(oscillations[1] - oscillations[0]) / oscillations[0], 0.05)


class TestAuxiliaryProblem(unittest.TestCase):
    """Bump initial data with zero lateral values"""

    @classmethod
    def setUpClass(cls):
        from wienerlab.pde.manufactured import auxiliary_problem
        from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
        from wienerlab.pde.structure import FluxModel

        aux = auxiliary_problem(make_full_cube_domain(32), (0.0, 0.0), 0.125)
        cls.traj = solve_cauchy_dirichlet(aux.domain, FluxModel(1.3333333333, 2), aux.domain.datum, 1.0,
                                          SolverSettings(dt=0.01, dt_growth=1.1, dt_max=0.05), initial=aux.initial)

    def test_bump_is_supported_in_the_double_cube(self):
        """u_o is positive near x_o and zero on the outer layer"""
        from wienerlab.pde.manufactured import auxiliary_problem

        aux = auxiliary_problem(make_full_cube_domain(32), (0.0, 0.0), 0.25)
        self.assertGreater(aux.initial_average, 0.0)
        self.assertEqual(float(np.abs(aux.initial[aux.domain.outer_layer()]).max()), 0.0)
        self.assertEqual(aux.domain.datum.kind, "zero")

    def test_solution_stays_nonnegative(self):
        """Comparison with 0 keeps every stored field non-negative"""
        for field in self.traj.fields:
            self.assertGreaterEqual(float(field.min()), -1e-8)

    def test_extinction_in_finite_time(self):
        """The sup norm falls below 1e-6 sup u_o before the horizon"""
        from wienerlab.verify.extinction import extinction_time

        t_ext = extinction_time(self.traj)
        self.assertIsNotNone(t_ext)
        self.assertGreater(t_ext, 0.0)
        self.assertLess(t_ext, self.traj.t_final)

    def test_mass_does_not_increase(self):
        """Zero Dirichlet data on the whole cube only lose mass"""
        masses = self.traj.masses()
        self.assertGreater(masses[0], 0.0)
        self.assertTrue(np.all(np.diff(masses) <= 1e-6 * masses[0]))


class TestTrajectory(unittest.TestCase):
    """Stored fields and their diagnostics"""

    def test_interpolation_in_time(self):
        """at() is linear between stored times and refuses extrapolation"""
        from wienerlab.exceptions import PreconditionError
        from wienerlab.pde.trajectory import Trajectory

        domain = make_full_cube_domain(8)
        traj = Trajectory(domain, [0.0, 1.0], [np.zeros(domain.shape), np.ones(domain.shape)], dt=1.0)
        np.testing.assert_allclose(traj.at(0.25), 0.25)
        with self.assertRaises(PreconditionError):
            traj.at(2.0)

    def test_times_must_increase(self):
        """Repeated times are rejected"""
        from wienerlab.pde.trajectory import Trajectory

        domain = make_full_cube_domain(8)
        with self.assertRaises(ValueError):
            Trajectory(domain, [0.0, 0.0], [np.zeros(domain.shape)] * 2)

    def test_norms_and_masses(self):
        """A constant 1 on half the cube has mass 2"""
        traj = make_constant_trajectory(make_half_space_domain(16))
        np.testing.assert_allclose(traj.sup_norms(), 1.0)
        np.testing.assert_allclose(traj.masses(), 2.0)

    def test_checkpoint_restores_fields(self):
        """Times, mask and fields come back from the binary checkpoint"""
        from wienerlab.pde.trajectory import load_checkpoint
        from wienerlab.utils.testing import temporary_directory

        traj = make_constant_trajectory(make_half_space_domain(16), value=0.75)
        with temporary_directory() as tmp:
            loaded = load_checkpoint(traj.save_checkpoint(tmp / "trajectory.bin"))
        self.assertEqual(loaded.times, traj.times)
        np.testing.assert_array_equal(loaded.domain.inside, traj.domain.inside)
        np.testing.assert_allclose(loaded.fields[-1], traj.fields[-1])

    def test_foreign_file_is_not_a_checkpoint(self):
        """The magic header is checked"""
        from wienerlab.exceptions import WienerLabError
        from wienerlab.pde.trajectory import load_checkpoint
        from wienerlab.utils.testing import temporary_directory

        with temporary_directory() as tmp:
            path = tmp / "junk.bin"
            path.write_bytes(b"not a trajectory")
            with self.assertRaises(WienerLabError):
                load_checkpoint(path)

    def test_constant_field_has_no_oscillation(self):
        """ess osc over a cylinder inside E vanishes for constants"""
        from wienerlab.geometry.cube import Cube, Cylinder
        from wienerlab.pde.trajectory import ess_osc

        traj = make_constant_trajectory(make_half_space_domain(16))
        mu_plus, mu_minus, omega = ess_osc(traj, Cylinder(Cube((-0.5, 0.0), 0.25), 1.0, 0.5))
        self.assertEqual((mu_plus, mu_minus, omega), (1.0, 1.0, 0.0))

    def test_oscillation_needs_cells_of_e(self):
        """A cylinder inside the complement is a precondition failure"""
        from wienerlab.exceptions import PreconditionError
        from wienerlab.geometry.cube import Cube, Cylinder
        from wienerlab.pde.trajectory import ess_osc

        traj = make_constant_trajectory(make_half_space_domain(16))
        with self.assertRaises(PreconditionError):
            ess_osc(traj, Cylinder(Cube((0.5, 0.0), 0.25), 1.0, 0.5))

    def test_slice_export(self):
        """The exported slice runs along x_1 through the middle row"""
        import csv

        from wienerlab.utils.testing import temporary_directory

        traj = make_constant_trajectory(make_half_space_domain(16), value=0.5)
        with temporary_directory() as tmp:
            with traj.export_slice_csv(tmp / "slice.csv", 0.5).open(encoding="utf-8") as fh:
                rows = list(csv.reader(fh))
        self.assertEqual(rows[0], ["x", "u", "inside"])
        self.assertEqual(len(rows), 17)
        self.assertEqual((float(rows[1][1]), rows[1][2]), (0.5, "1"))
        self.assertEqual((float(rows[-1][1]), rows[-1][2]), (0.0, "0"))


class TestTruncation(unittest.TestCase):
    """(u - k)_+ and the extension v = mu - (u - k)_+"""

    def test_level_below_the_lateral_sup_is_rejected(self):
        """k < sup g would not give a sub-solution"""
        from wienerlab.exceptions import PreconditionError
        from wienerlab.pde.truncation import truncate_and_extend

        traj = make_constant_trajectory(make_half_space_domain(16))
        with self.assertRaises(PreconditionError):
            truncate_and_extend(traj, -0.1, "upper")
        with self.assertRaises(PreconditionError):
            truncate_and_extend(traj, 0.1, "lower")

    def test_extension_lies_between_zero_and_mu(self):
        """0 <= v <= mu wherever it is defined"""
        from wienerlab.pde.truncation import truncate_and_extend

        traj = make_constant_trajectory(make_half_space_domain(16))
        result = truncate_and_extend(traj, 0.25, "upper")
        self.assertAlmostEqual(result.mu, 0.75)
        for v in result.v:
            self.assertGreaterEqual(float(v.min()), 0.0)
            self.assertLessEqual(float(v.max()), result.mu)

    def test_unknown_mode(self):
        """Only upper and lower truncations exist"""
        from wienerlab.pde.truncation import truncate_and_extend

        with self.assertRaises(ValueError):
            truncate_and_extend(make_constant_trajectory(make_half_space_domain(16)), 1.0, "both")

    def test_lateral_extremes(self):
        """The complement cells carry the lateral data"""
        from wienerlab.pde.truncation import lateral_extremes

        self.assertEqual(lateral_extremes(make_constant_trajectory(make_half_space_domain(16))), (0.0, 0.0))


class TestRetryWithHalving(unittest.TestCase):
    """dt halving on solver failure"""

    def test_failed_step_is_split(self):
        """A step too large for the solver is covered by quarter steps"""
        from wienerlab.exceptions import SolverConvergenceError
        from wienerlab.utils.resilience import retry_with_halving

        calls = []

        @retry_with_halving(max_halvings=2)
        def advance(state, t, dt):
            if dt > 0.3:
                raise SolverConvergenceError("too large", dt=dt)
            calls.append((t, dt))
            return state + dt

        self.assertAlmostEqual(advance(0.0, 0.0, 1.0), 1.0)
        self.assertEqual([dt for _, dt in calls], [0.25] * 4)
        self.assertEqual([t for t, _ in calls], [0.0, 0.25, 0.5, 0.75])

    def test_exhausted_budget_reraises(self):
        """The last failure propagates once no halving is left"""
        from wienerlab.exceptions import SolverConvergenceError
        from wienerlab.utils.resilience import retry_with_halving

        @retry_with_halving(max_halvings=1)
        def advance(state, t, dt):
            raise SolverConvergenceError("never converges", dt=dt)

        with self.assertRaises(SolverConvergenceError):
            advance(0.0, 0.0, 1.0)

    def test_non_finite_states_are_rejected(self):
        """NaN updates become a convergence failure"""
        from wienerlab.exceptions import SolverConvergenceError
        from wienerlab.utils.resilience import finite_or_raise

        with self.assertRaises(SolverConvergenceError):
            finite_or_raise(np.array([0.0, np.nan]), "update")


if __name__ == "__main__":
    unittest.main()
