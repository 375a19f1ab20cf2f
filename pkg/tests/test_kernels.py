import json

import numpy as np
import pytest

from kernellp.backend import NUMBA_ENABLED, sq_dists_numpy, pairwise_sq_dists
from kernellp.errors import InputError
from kernellp.kernels import KernelSpec, cross_gram, gram, kernel_eval


class TestKernelEval:
    def test_rbf_zero_distance_is_one(self):
        x = np.array([1.0, 2.0, 3.0])
        assert kernel_eval(KernelSpec("rbf", width=7.0), x, x) == 1.0

    def test_rbf_default_width_formula(self):
        # ||x-y||^2 = 2e6 with width 1e3 puts the exponent at exactly -1
        x = np.zeros(1)
        y = np.array([np.sqrt(2e6)])
        value = kernel_eval(KernelSpec("rbf", width=1e3), x, y)
        assert value == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_linear_dot_product(self):
        assert kernel_eval(KernelSpec("linear"), [1, 2], [3, 4]) == 11.0

    def test_quadratic_is_degree_two_polynomial(self):
        x, y = np.array([1.0, 2.0]), np.array([0.5, -1.0])
        quad = kernel_eval(KernelSpec("quadratic", offset=1.0), x, y)
        poly = kernel_eval(KernelSpec("polynomial", degree=2, offset=1.0), x, y)
        assert quad == poly == (x @ y + 1.0) ** 2

    def test_polynomial_formula(self):
        x, y = np.array([1.0, 1.0]), np.array([2.0, 0.0])
        value = kernel_eval(KernelSpec("polynomial", degree=3, offset=0.5), x, y)
        assert value == pytest.approx((2.0 + 0.5) ** 3)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            kernel_eval(KernelSpec("rbf"), [1.0, 2.0], [1.0])


class TestKernelSpec:
    def test_validation(self):
        with pytest.raises(InputError):
            KernelSpec("rbf", width=0.0)
        with pytest.raises(InputError):
            KernelSpec("polynomial", degree=0)
        with pytest.raises(InputError):
            KernelSpec("sigmoid")

    def test_json_round_trip(self):
        for spec in (
            KernelSpec("rbf", width=1000.0),
            KernelSpec("linear"),
            KernelSpec("quadratic", offset=0.5),
            KernelSpec("polynomial", degree=4, offset=1.0),
        ):
            obj = json.loads(json.dumps(spec.to_json()))
            again = KernelSpec.from_json(obj)
            assert again.kind == spec.kind
            assert again.effective_degree == spec.effective_degree
            if spec.kind == "rbf":
                assert again.width == spec.width
            if spec.kind in ("quadratic", "polynomial"):
                assert again.offset == spec.offset

    def test_rbf_json_has_only_kind_and_width(self):
        assert set(KernelSpec("rbf", width=2.0).to_json()) == {"kind", "width"}
        assert set(KernelSpec("polynomial").to_json()) == {"kind", "degree", "offset"}


class TestGram:
    def test_single_point_rbf(self):
        g = gram(KernelSpec("rbf", width=3.0), np.array([[1.5], [2.5]]))
        assert g.entries.shape == (1, 1)
        assert g.entries[0, 0] == 1.0

    def test_tiny_width_approaches_identity(self):
        # unit-separated points, width 1e-4: off-diagonals collapse
        X = np.arange(6, dtype=np.float64).reshape(1, 6)
        g = gram(KernelSpec("rbf", width=1e-4), X).entries
        off = g[~np.eye(6, dtype=bool)]
        assert np.all(off < 1e-12)
        assert np.all(np.diag(g) == 1.0)

    def test_linear_identity_columns(self):
        g = gram(KernelSpec("linear"), np.eye(4))
        assert np.array_equal(g.entries, np.eye(4))

    def test_empty_dataset_rejected(self):
        with pytest.raises(InputError):
            gram(KernelSpec("rbf"), np.empty((3, 0)))

    def test_exact_symmetry_and_rbf_range(self, rng):
        X = rng.standard_normal((5, 40))
        g = gram(KernelSpec("rbf", width=1.3), X).entries
        assert np.array_equal(g, g.T)
        assert np.all(g > 0.0) and np.all(g <= 1.0)
        assert np.all(np.diag(g) == 1.0)

    def test_psd_up_to_tolerance(self, rng):
        for width in (0.3, 1.0, 5.0):
            X = rng.standard_normal((4, 60))
            g = gram(KernelSpec("rbf", width=width), X).entries
            eigs = np.linalg.eigvalsh(g)
            assert eigs.min() >= -1e-8 * 60

    def test_permutation_invariance(self, rng):
        X = rng.standard_normal((3, 25))
        perm = rng.permutation(25)
        g = gram(KernelSpec("rbf", width=0.8), X).entries
        gp = gram(KernelSpec("rbf", width=0.8), X[:, perm]).entries
        if NUMBA_ENABLED:
            # the loop backend's arithmetic is exactly permutation-symmetric
            assert np.array_equal(gp, g[np.ix_(perm, perm)])
        else:
            # the expanded-form GEMM reorders summation under permutation
            assert np.allclose(gp, g[np.ix_(perm, perm)], rtol=0.0, atol=1e-14)

    def test_translation_invariance(self, rng):
        X = rng.standard_normal((3, 25))
        shift = rng.standard_normal((3, 1))
        g = gram(KernelSpec("rbf", width=0.8), X).entries
        gt = gram(KernelSpec("rbf", width=0.8), X + shift).entries
        assert np.allclose(g, gt, rtol=0.0, atol=1e-12)

    def test_immutability(self, rng):
        g = gram(KernelSpec("rbf"), rng.standard_normal((2, 5)))
        with pytest.raises(ValueError):
            g.entries[0, 0] = 0.0


class TestCrossGram:
    def test_same_inputs_match_gram(self, rng):
        X = rng.standard_normal((4, 30))
        for spec in (KernelSpec("rbf", width=0.7), KernelSpec("linear"), KernelSpec("quadratic")):
            g = gram(spec, X).entries
            cg = cross_gram(spec, X, X).entries
            if NUMBA_ENABLED and spec.kind == "rbf":
                # the loop backend computes exactly symmetric distances
                assert np.array_equal(g, cg)
            else:
                assert np.allclose(g, cg, rtol=1e-12, atol=1e-15)

    def test_single_test_point_is_gram_column(self, rng):
        X = rng.standard_normal((4, 12))
        spec = KernelSpec("rbf", width=0.9)
        g = gram(spec, X).entries
        col = cross_gram(spec, X, X[:, :1]).entries
        assert np.allclose(col[:, 0], g[:, 0], rtol=1e-12, atol=1e-14)

    def test_matches_bruteforce_loop(self, rng):
        X = rng.standard_normal((5, 5))
        X_T = rng.standard_normal((5, 3))
        spec = KernelSpec("rbf", width=1.1)
        cg = cross_gram(spec, X, X_T).entries
        expected = np.empty((5, 3))
        for i in range(5):
            for j in range(3):
                expected[i, j] = kernel_eval(spec, X[:, i], X_T[:, j])
        assert np.allclose(cg, expected, rtol=1e-12, atol=0.0)

    def test_rbf_entries_in_unit_interval(self, rng):
        cg = cross_gram(KernelSpec("rbf", width=0.5), rng.standard_normal((3, 8)), rng.standard_normal((3, 6)))
        assert np.all(cg.entries > 0.0) and np.all(cg.entries <= 1.0)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(InputError):
            cross_gram(KernelSpec("rbf"), rng.standard_normal((3, 4)), rng.standard_normal((2, 4)))


class TestBackends:
    def test_numpy_path_matches_active_backend(self, rng):
        a = rng.standard_normal((20, 6))
        b = rng.standard_normal((15, 6))
        assert np.allclose(pairwise_sq_dists(a, b), sq_dists_numpy(a, b), rtol=1e-10, atol=1e-12)

    def test_numpy_path_clamps_round_off(self):
        a = np.full((1, 3), 1e8)
        d = sq_dists_numpy(a, a)
        assert d[0, 0] >= 0.0
