import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anetf.errors import NearSingularError
from anetf.linalg import inf_norm, solve


def random_system(rng, n, cond=None):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if cond is not None:
        u, _, vh = np.linalg.svd(m)
        s = np.geomspace(1.0, 1.0 / cond, n)
        m = (u * s) @ vh
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    return m, b


class TestExamples:
    def test_identity(self, backend):
        r = np.array([1 + 2j, -3j, 0.5])
        np.testing.assert_array_equal(solve(np.eye(3), r, backend=backend).x, r)

    def test_diagonal(self, backend):
        x = solve([[2, 0], [0, 4]], [2, 4j], backend=backend).x
        np.testing.assert_allclose(x, [1, 1j], rtol=0, atol=1e-15)

    def test_12x12_residual(self, backend, rng):
        m, b = random_system(rng, 12)
        res = solve(m, b, backend=backend)
        assert res.residual <= 1e-10 * np.abs(b).max()
        assert np.abs(m @ res.x - b).max() == pytest.approx(res.residual, abs=1e-15)


class TestAgainstNumpy:
    @pytest.mark.parametrize("n", [1, 2, 5, 12, 30, 64])
    def test_matches_lapack(self, backend, rng, n):
        m, b = random_system(rng, n, cond=1e4)
        np.testing.assert_allclose(solve(m, b, backend=backend).x, np.linalg.solve(m, b), rtol=1e-9, atol=1e-12)

    @given(n=st.integers(1, 64), seed=st.integers(0, 2**32 - 1), log_cond=st.floats(0, 6))
    def test_recovers_known_solution(self, n, seed, log_cond):
        rng = np.random.default_rng(seed)
        m, x0 = random_system(rng, n, cond=10.0**log_cond)
        x = solve(m, m @ x0).x
        assert np.abs(x - x0).max() <= 1e-9 * np.abs(x0).max()

    @given(n=st.integers(1, 20), seed=st.integers(0, 2**32 - 1))
    def test_conjugation_equivariance(self, n, seed):
        m, b = random_system(np.random.default_rng(seed), n, cond=100.0)
        x = solve(m, b).x
        xc = solve(m.conj(), b.conj()).x
        np.testing.assert_allclose(xc, x.conj(), rtol=1e-12, atol=1e-14)


class TestBackends:
    def test_backends_agree(self, rng):
        from anetf.kernels import available_backends

        m, b = random_system(rng, 20, cond=1e3)
        xs = [solve(m, b, backend=mod).x for mod in available_backends().values()]
        for x in xs[1:]:
            np.testing.assert_allclose(x, xs[0], rtol=1e-12, atol=1e-15)


class TestErrors:
    def test_singular_names_step(self, backend):
        m = np.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]], dtype=complex)
        with pytest.raises(NearSingularError) as info:
            solve(m, np.ones(3), backend=backend)
        assert info.value.step in (1, 2)
        assert "step" in str(info.value)
        assert info.value.pivot < 1e-13 * inf_norm(m)

    def test_scaled_near_singular(self, backend):
        m = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]]) * 1e8
        with pytest.raises(NearSingularError):
            solve(m, [1.0, 1.0], backend=backend)

    @pytest.mark.parametrize(
        "m, b",
        [
            (np.ones((2, 3)), np.ones(2)),
            (np.eye(2), np.ones(3)),
            (np.array([[np.nan, 0], [0, 1]]), np.ones(2)),
            (np.ones(3), np.ones(3)),
        ],
    )
    def test_shape_and_finiteness(self, m, b):
        with pytest.raises(ValueError):
            solve(m, b)

    def test_refinement_pass_does_not_worsen_residual(self, backend):
        rng = np.random.default_rng(7)
        m, b = random_system(rng, 40, cond=1e13)
        lu, piv, bad, _ = backend.lu_factor(m.astype(complex), 0.0)
        assert bad < 0
        plain = np.abs(b - m @ backend.lu_solve(lu, piv, b.astype(complex))).max()
        res = solve(m, b, backend=backend)
        assert res.refined == (plain > 1e-10 * np.abs(b).max())
        assert res.residual <= plain
