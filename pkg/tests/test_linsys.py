import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from willmore import kernels
from willmore._pykernel import assemble_picard_system
from willmore.grid import discrete_curvature
from willmore.linsys import (SingularSystemError, SparseSystem, fold_positions, solve,
                             solve_periodic)

from .conftest import random_star


def picard_system(M, seed, tangential=True):
    rng = np.random.default_rng(seed)
    X = random_star(M, rng)
    k = discrete_curvature(X)
    ta = rng.uniform(0.0, 1e-3, M) if tangential else np.zeros(M)
    tb = rng.uniform(-1, 1, M) if tangential else np.zeros(M)
    return X, k, -X, 1.0, 1e-3, ta, tb


class TestSolve:
    def test_identity(self):
        b = np.array([1.0, -2.0, 3.5, 0.25])
        assert np.allclose(solve(SparseSystem.from_dense(np.eye(4), b)), b)

    def test_diagonal(self):
        u = solve(SparseSystem.from_dense([[2.0, 0], [0, 4.0]], [2.0, 8.0]))
        assert np.allclose(u, [1, 2])

    def test_zero_matrix(self):
        with pytest.raises(SingularSystemError) as exc:
            solve(SparseSystem.from_dense(np.zeros((4, 4)), np.ones(4)))
        assert exc.value.pivot == 0.0

    def test_rank_deficient(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularSystemError):
            solve(SparseSystem.from_dense(A, [1.0, 2.0]))

    def test_bad_indices(self):
        with pytest.raises(ValueError):
            SparseSystem(2, [0, 2], [0, 1], [1.0, 1.0], np.zeros(2))

    @given(st.integers(0, 2**31 - 1), st.integers(2, 12))
    def test_residual_contract(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n)) + n * np.eye(n)
        b = rng.normal(size=n) * 10
        u = solve(SparseSystem.from_dense(A, b))
        assert np.abs(A @ u - b).max() <= 1e-10 * (1 + np.abs(b).max())

    def test_deterministic(self):
        sys_ = assemble_picard_system(*picard_system(32, 1))
        assert np.array_equal(solve(sys_), solve(sys_))


class TestPeriodicBand:
    def test_fold_is_permutation(self):
        for M in (4, 5, 16, 17):
            assert sorted(fold_positions(M)) == list(range(M))

    @given(st.integers(0, 2**31 - 1), st.integers(4, 60))
    def test_band_matches_sparse_lu(self, seed, M):
        sys_ = assemble_picard_system(*picard_system(M, seed))
        u1 = solve(sys_)
        u2 = solve_periodic(sys_)
        assert np.allclose(u1, u2, rtol=1e-9, atol=1e-9 * np.abs(u1).max())

    @given(st.integers(0, 2**31 - 1), st.integers(1, 39))
    def test_cyclic_renumbering(self, seed, shift):
        X, k, S, a0, dt, ta, tb = picard_system(40, seed)
        r = lambda f: np.roll(f, shift, axis=0)
        u = solve(assemble_picard_system(X, k, S, a0, dt, ta, tb)).reshape(40, 4)
        us = solve(assemble_picard_system(r(X), r(k), r(S), a0, dt, r(ta), r(tb))).reshape(40, 4)
        assert np.allclose(us, r(u), rtol=1e-9, atol=1e-10)


@pytest.mark.skipif(kernels.compiled_picard_solve is None, reason="compiled kernel not built")
class TestCompiledKernel:
    @given(st.integers(0, 2**31 - 1), st.integers(4, 200), st.booleans())
    def test_matches_python(self, seed, M, tangential):
        args = picard_system(M, seed, tangential)
        for a, b in zip(kernels.python_picard_solve(*args), kernels.compiled_picard_solve(*args)):
            assert np.allclose(a, b, rtol=1e-9, atol=1e-9)

    def test_degenerate(self):
        from willmore.grid import DegenerateGeometryError
        X = np.zeros((6, 2))
        with pytest.raises(DegenerateGeometryError):
            kernels.compiled_picard_solve(X, np.zeros(6), X, 1.0, 1e-3, np.zeros(6), np.zeros(6))


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
