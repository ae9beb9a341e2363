import numpy as np
import pytest

from drsplit.linalg import (
    LinearMap,
    NotPositiveDefiniteError,
    NotPsdError,
    eig_all,
    eig_pairs,
    seminorm,
    spd_factor,
    spd_solve,
)


def random_spd(rng, dim, shift=1.0):
    g = rng.standard_normal((dim, dim))
    return g.T @ g + shift * np.eye(dim)


class TestSpdFactor:
    def test_identity(self):
        fac = spd_factor(np.eye(3))
        np.testing.assert_array_equal(fac.lower, np.eye(3))

    def test_diagonal(self):
        fac = spd_factor(np.diag([4.0, 9.0]))
        np.testing.assert_array_equal(fac.lower, np.diag([2.0, 3.0]))

    def test_multiply_back(self):
        # The factor must reproduce the input to relative 1e-12 entrywise.
        rng = np.random.default_rng(101)
        for _ in range(5):
            s = random_spd(rng, 20)
            fac = spd_factor(s)
            err = np.abs(fac.lower @ fac.lower.T - s).max()
            assert err <= 1e-12 * np.abs(s).max()

    def test_not_positive_definite_reports_pivot(self):
        with pytest.raises(NotPositiveDefiniteError) as info:
            spd_factor(np.diag([1.0, -1.0]))
        assert info.value.pivot == 1
        with pytest.raises(NotPositiveDefiniteError) as info:
            spd_factor(np.zeros((3, 3)))
        assert info.value.pivot == 0

    def test_asymmetric_rejected(self):
        s = np.eye(2)
        s[0, 1] = 1e-3
        with pytest.raises(ValueError, match="symmetric"):
            spd_factor(s)

    def test_fingerprint_recorded(self):
        fac = spd_factor(np.eye(2), fingerprint=0.25)
        assert fac.fingerprint == 0.25


class TestSpdSolve:
    def test_identity(self):
        fac = spd_factor(np.eye(4))
        rhs = np.arange(4.0)
        np.testing.assert_array_equal(spd_solve(fac, rhs), rhs)

    def test_left_inverse(self):
        # solve(factor(S), S @ x) recovers x.
        rng = np.random.default_rng(7)
        for _ in range(5):
            s = random_spd(rng, 15)
            fac = spd_factor(s)
            x = rng.standard_normal(15)
            np.testing.assert_allclose(spd_solve(fac, s @ x), x, atol=1e-9, rtol=1e-9)

    def test_residual_bound(self):
        rng = np.random.default_rng(8)
        s = random_spd(rng, 30)
        fac = spd_factor(s)
        rhs = rng.standard_normal(30)
        x = spd_solve(fac, rhs)
        assert np.linalg.norm(s @ x - rhs) <= 1e-10 * np.linalg.norm(rhs)

    def test_dimension_mismatch(self):
        fac = spd_factor(np.eye(3))
        with pytest.raises(ValueError, match="dimension mismatch"):
            spd_solve(fac, np.ones(4))


class TestEig:
    def test_identity(self):
        vals = eig_all(np.eye(4))
        np.testing.assert_allclose(np.sort_complex(vals), np.ones(4))

    def test_rotation_pair(self):
        vals = eig_all(np.array([[0.0, -1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(sorted(vals, key=lambda z: z.imag), [-1j, 1j],
                                   atol=1e-14)

    def test_eigenpair_residuals(self):
        rng = np.random.default_rng(11)
        mat = rng.standard_normal((30, 30))
        scale = np.linalg.norm(mat, 2)
        vals, vecs = eig_pairs(mat)
        for j in range(30):
            z = vecs[:, j] / np.linalg.norm(vecs[:, j])
            assert np.linalg.norm(mat @ z - vals[j] * z) <= 1e-8 * scale

    def test_count_and_trace(self):
        rng = np.random.default_rng(12)
        mat = rng.standard_normal((40, 40))
        vals = eig_all(mat)
        assert vals.size == 40
        scale = max(1.0, abs(np.trace(mat)))
        assert abs(vals.sum().real - np.trace(mat)) <= 1e-6 * scale
        assert abs(vals.sum().imag) <= 1e-6 * scale

    def test_dimension_guard(self):
        with pytest.raises(ValueError, match="exceeds"):
            eig_all(np.eye(501))

    def test_nonfinite_rejected(self):
        mat = np.eye(3)
        mat[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            eig_all(mat)


class TestSeminorm:
    def test_euclidean_metric(self):
        u = np.array([3.0, 4.0])
        assert seminorm(u, np.eye(2)) == pytest.approx(5.0)

    def test_rank_deficient_kernel(self):
        # (a, a) lies in the kernel of [[1, -1], [-1, 1]].
        m = np.array([[1.0, -1.0], [-1.0, 1.0]])
        assert seminorm(np.array([2.5, 2.5]), m) == 0.0
        assert seminorm(np.array([1.0, 0.0]), m) == pytest.approx(1.0)

    def test_block_preconditioner_closed_form(self):
        # For M = [[D^-1, -I], [-I, D]] the seminorm of (u1, u2) is the
        # D-norm of D^-1 u1 - u2.
        rng = np.random.default_rng(21)
        for _ in range(10):
            d = rng.uniform(0.2, 5.0, size=2)
            m = np.block([[np.diag(1.0 / d), -np.eye(2)],
                          [-np.eye(2), np.diag(d)]])
            u = rng.standard_normal(4)
            want = np.sqrt(np.sum(d * (u[:2] / d - u[2:]) ** 2))
            assert seminorm(u, m) == pytest.approx(want, abs=1e-12)

    def test_homogeneity(self):
        rng = np.random.default_rng(22)
        m = random_spd(rng, 6, shift=0.0)
        u = rng.standard_normal(6)
        for alpha in (-3.0, 0.5, 2.0):
            assert seminorm(alpha * u, m) == pytest.approx(
                abs(alpha) * seminorm(u, m), rel=1e-12)

    def test_complex_conjugate_pairing(self):
        z = np.array([1.0 + 2.0j, -1.0j])
        assert seminorm(z, np.eye(2)) == pytest.approx(np.sqrt(6.0))

    def test_not_psd(self):
        with pytest.raises(NotPsdError):
            seminorm(np.array([1.0]), np.array([[-1.0]]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            seminorm(np.ones(3), np.eye(2))


class TestLinearMap:
    def test_forward_adjoint(self):
        rng = np.random.default_rng(31)
        op = LinearMap(rng.standard_normal((5, 3)))
        x = rng.standard_normal(3)
        y = rng.standard_normal(5)
        assert op.matvec(x) @ y == pytest.approx(x @ op.rmatvec(y), rel=1e-12)

    def test_gram_caching(self):
        op = LinearMap(np.arange(6.0).reshape(2, 3))
        assert op.gram_cols is op.gram_cols
        np.testing.assert_array_equal(op.gram_rows, op.mat @ op.mat.T)

    def test_shape_checks(self):
        op = LinearMap(np.ones((2, 3)))
        with pytest.raises(ValueError, match="dimension mismatch"):
            op.matvec(np.ones(2))
        with pytest.raises(ValueError, match="dimension mismatch"):
            op.rmatvec(np.ones(3))
