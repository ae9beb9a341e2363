import numpy as np
import pytest

from drsplit.experiments import gen_monotone_pair
from drsplit.spectral import (
    LinearMonotonePair,
    UnboundedStepsizeError,
    disc_report,
    dr_update_matrix,
    iteration_matrix,
    match_spectra,
    monotonicity_ratio,
    optimal_local_stepsizes,
    radius_scan,
    spectral_radius,
)


class TestIterationMatrix:
    def test_zero_operators_give_identity(self):
        h = iteration_matrix(np.zeros((3, 3)), np.zeros((3, 3)), np.ones(3))
        np.testing.assert_array_equal(h, np.eye(3))
        f = dr_update_matrix(np.zeros((3, 3)), np.zeros((3, 3)), np.ones(3))
        np.testing.assert_array_equal(f, np.eye(3))

    def test_scalar_closed_form(self):
        # One-dimensional halves with slopes a and b: both maps reduce
        # to (1 + t^2 a b) / ((1 + t a)(1 + t b)).
        for a, b, t in [(1.0, 1.0, 1.0), (3.0, 0.5, 0.8), (2.0, 0.0, 1.3)]:
            want = (1 + t * t * a * b) / ((1 + t * a) * (1 + t * b))
            h = iteration_matrix([[a]], [[b]], [t])
            f = dr_update_matrix([[a]], [[b]], [t])
            assert h[0, 0] == pytest.approx(want, rel=1e-14)
            assert f[0, 0] == pytest.approx(want, rel=1e-14)

    def test_unit_slopes_at_unit_step_contract_by_half(self):
        h = iteration_matrix([[1.0]], [[1.0]], [1.0])
        assert h[0, 0] == 0.5

    def test_same_spectrum_as_update_matrix(self):
        # The two maps are similar, so their spectra must coincide well
        # below the eigensolver noise floor.
        rng = np.random.default_rng(61)
        for seed in range(5):
            pair = gen_monotone_pair(seed, half_dim=6)
            a = pair.block_diag_half()
            b = pair.skew_half()
            d = 10.0 ** rng.uniform(-1, 1, size=a.shape[0])
            h = iteration_matrix(a, b, d)
            f = dr_update_matrix(a, b, d)
            gap = match_spectra(np.linalg.eigvals(h), np.linalg.eigvals(f))
            assert gap <= 1e-8

    def test_matrix_preconditioner_accepted(self):
        h_vec = iteration_matrix([[1.0]], [[1.0]], [2.0])
        h_mat = iteration_matrix([[1.0]], [[1.0]], np.array([[2.0]]))
        np.testing.assert_array_equal(h_vec, h_mat)

    def test_preconditioner_validation(self):
        with pytest.raises(ValueError):
            iteration_matrix(np.eye(2), np.eye(2), [1.0, -1.0])
        with pytest.raises(ValueError):
            iteration_matrix(np.eye(2), np.eye(2),
                             np.array([[1.0, 0.5], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            iteration_matrix(np.eye(2), np.eye(3), np.ones(2))


class TestMonotonicityRatio:
    def test_identity_operator_identity_metric(self):
        # <z, z> / (||z||^2 + ||z||^2) = 1/2 for any nonzero z.
        rng = np.random.default_rng(71)
        for _ in range(10):
            z = rng.standard_normal(5)
            assert monotonicity_ratio(np.eye(5), np.ones(5), z) == \
                pytest.approx(0.5, rel=1e-14)

    def test_skew_operator_gives_zero(self):
        rng = np.random.default_rng(72)
        g = rng.standard_normal((6, 6))
        skew = g - g.T
        z = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert monotonicity_ratio(skew, np.ones(6), z) <= 1e-14

    def test_scale_invariance(self):
        rng = np.random.default_rng(73)
        g = rng.standard_normal((4, 4))
        a = g.T @ g
        d = rng.uniform(0.5, 2.0, size=4)
        z = rng.standard_normal(4)
        r1 = monotonicity_ratio(a, d, z)
        r2 = monotonicity_ratio(a, d, -3.7 * z)
        assert r2 == pytest.approx(r1, rel=1e-12)

    def test_nonmonotone_direction_raises(self):
        with pytest.raises(ValueError, match="not monotone"):
            monotonicity_ratio(-np.eye(2), np.ones(2), np.array([1.0, 0.0]))

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            monotonicity_ratio(np.eye(2), np.ones(2), np.zeros(2))


class TestDiscReport:
    def test_decoupled_unit_blocks(self):
        # No coupling and unit blocks: every eigenvalue is 1/(1 + step)
        # and sits dead center of its disc.
        pair = LinearMonotonePair(block_one=np.eye(1),
                                  block_two_inv=np.eye(1),
                                  coupling=np.zeros((1, 1)))
        report = disc_report(pair, np.ones(2))
        np.testing.assert_allclose(np.sort(report.eigenvalues.real),
                                   [0.5, 0.5], atol=1e-14)
        assert report.all_contained()
        assert report.spectral_radius == pytest.approx(0.5, abs=1e-14)

    def test_unit_eigenvalue_flagged_exempt(self):
        pair = LinearMonotonePair(block_one=np.zeros((1, 1)),
                                  block_two_inv=np.eye(1),
                                  coupling=np.zeros((1, 1)))
        report = disc_report(pair, np.ones(2))
        flags = {round(r.eigenvalue.real, 6): r.exempt for r in report.records}
        assert flags[1.0] is True
        assert report.all_contained()

    def test_random_instances_contained(self):
        # Both the outer half-disc and the per-eigenvector refinement,
        # in the squared form that keeps roundoff additive.
        for seed in range(5):
            pair = gen_monotone_pair(seed, half_dim=6)
            rng = np.random.default_rng(1000 + seed)
            d = 10.0 ** rng.uniform(-1, 1, size=2 * 6)
            report = disc_report(pair, d)
            assert report.all_contained()
            for rec in report.records:
                dist2 = abs(rec.eigenvalue - 0.5) ** 2
                assert dist2 <= 0.25 + 1e-8
                if not rec.exempt:
                    bound = 0.25 - rec.ratio / (1.0 + 2.0 * rec.ratio)
                    assert dist2 <= bound + 1e-8

    def test_record_fields(self):
        pair = gen_monotone_pair(0, half_dim=3)
        report = disc_report(pair, np.ones(6))
        assert len(report.records) == 6
        for rec in report.records:
            assert 0.0 <= rec.ratio
            assert 0.0 <= rec.disc_radius <= 0.5


class TestOptimalStepsizes:
    def test_grid_oracle(self):
        # The claimed per-block stepsizes must beat every point of a
        # surrounding log grid in the monotonicity ratio at that vector.
        rng = np.random.default_rng(81)
        n, m = 4, 3
        g1 = rng.standard_normal((n, n))
        a1 = g1.T @ g1 + 0.1 * np.eye(n)
        g2 = rng.standard_normal((m, m))
        a2 = g2.T @ g2 + 0.1 * np.eye(m)
        z1 = rng.standard_normal(n)
        z2 = rng.standard_normal(m)
        t_star, s_star = optimal_local_stepsizes(z1, z2, a1, a2)
        a = np.zeros((n + m, n + m))
        a[:n, :n] = a1
        a[n:, n:] = a2
        z = np.concatenate([z1, z2])

        def ratio(t, s):
            return monotonicity_ratio(
                a, np.concatenate([np.full(n, t), np.full(m, s)]), z)

        best = ratio(t_star, s_star)
        for t in np.geomspace(t_star / 10, t_star * 10, 9):
            for s in np.geomspace(s_star / 10, s_star * 10, 9):
                assert best >= ratio(t, s) - 1e-12

    def test_scalar_closed_form(self):
        t, s = optimal_local_stepsizes(np.array([2.0]), np.array([3.0]),
                                       np.array([[4.0]]), np.array([[0.5]]))
        assert t == pytest.approx(2.0 / 8.0)
        assert s == pytest.approx(3.0 / 1.5)

    def test_unbounded_raises(self):
        a1 = np.array([[1.0, 0.0], [0.0, 0.0]])
        z1 = np.array([0.0, 1.0])
        with pytest.raises(UnboundedStepsizeError):
            optimal_local_stepsizes(z1, np.ones(1), a1, np.eye(1))


class TestRadiusScan:
    def test_row_order_and_best(self):
        pair = gen_monotone_pair(2, half_dim=4)
        t_grid = [0.5, 1.0, 2.0]
        s_grid = [0.7, 1.4]
        scan = radius_scan(pair, t_grid, s_grid)
        assert [(r.t, r.s) for r in scan.rows] == [
            (t, s) for t in t_grid for s in s_grid]
        assert scan.best.rho == min(r.rho for r in scan.rows)
        assert scan.best in scan.rows

    def test_grid_permutation_keeps_best(self):
        pair = gen_monotone_pair(3, half_dim=4)
        scan1 = radius_scan(pair, [0.5, 1.0, 2.0], [0.5, 1.0, 2.0])
        scan2 = radius_scan(pair, [2.0, 0.5, 1.0], [1.0, 2.0, 0.5])
        assert scan1.best == scan2.best

    def test_rectangle_beats_diagonal(self):
        pair = gen_monotone_pair(4, half_dim=4)
        grid = np.geomspace(0.1, 10, 7)
        full = radius_scan(pair, grid, grid)
        diag = min(
            radius_scan(pair, [t], [t]).best.rho for t in grid)
        assert full.best.rho <= diag + 1e-15

    def test_spectral_radius_in_unit_interval(self):
        # Monotone halves keep every radius at or below 1.
        pair = gen_monotone_pair(5, half_dim=4)
        scan = radius_scan(pair, np.geomspace(0.01, 100, 5),
                           np.geomspace(0.01, 100, 5))
        for row in scan.rows:
            assert row.rho <= 1.0 + 1e-10

    def test_validation(self):
        pair = gen_monotone_pair(6, half_dim=3)
        with pytest.raises(ValueError):
            radius_scan(pair, [], [1.0])
        with pytest.raises(ValueError):
            radius_scan(pair, [1.0], [-1.0])


class TestHelpers:
    def test_spectral_radius_known(self):
        assert spectral_radius(np.diag([0.2, -0.9])) == pytest.approx(0.9)

    def test_match_spectra_permutation(self):
        rng = np.random.default_rng(91)
        vals = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        shuffled = vals[rng.permutation(8)]
        assert match_spectra(vals, shuffled) == 0.0

    def test_match_spectra_perturbation(self):
        vals = np.array([1.0, 2.0, 3.0], dtype=complex)
        moved = vals + 1e-9
        assert match_spectra(vals, moved) == pytest.approx(1e-9, rel=1e-3)

    def test_match_spectra_size_mismatch(self):
        with pytest.raises(ValueError):
            match_spectra(np.ones(2), np.ones(3))

    def test_pair_validate(self):
        pair = gen_monotone_pair(9, half_dim=4)
        pair.validate()
        bad = LinearMonotonePair(block_one=-np.eye(2),
                                 block_two_inv=np.eye(2),
                                 coupling=np.zeros((2, 2)))
        with pytest.raises(ValueError, match="not monotone"):
            bad.validate()

    def test_pair_halves_shapes(self):
        pair = gen_monotone_pair(10, half_dim=3)
        a = pair.block_diag_half()
        b = pair.skew_half()
        assert a.shape == b.shape == (6, 6)
        np.testing.assert_array_equal(b, -b.T)
        np.testing.assert_array_equal(a[:3, 3:], np.zeros((3, 3)))
